//! Exhaustive subdivision search for small hosts (at most 64 vertices).
//!
//! `NotFound` is a proof: every injective branch assignment and every
//! family of internally disjoint paths within the length caps was ruled out.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::{instance_seed, Exec};
use crate::subdivision::{verify, PathWitness, PatternDigraph, Subdivision};
use crate::tournament::{generate, Generator, Tournament};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
pub const MAX_ORACLE_N: usize = 64;
pub const MAX_EXHAUSTIVE_N: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleQuery {
    pub pattern: PatternDigraph,
    pub max_len: usize,
    /// When set, the only allowed path length.
    pub exact_len: Option<usize>,
    pub node_budget: u64,
}

impl OracleQuery {
    pub fn new(pattern: PatternDigraph, max_len: usize) -> Self {
        Self {
            pattern,
            max_len,
            exact_len: None,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn exact(pattern: PatternDigraph, len: usize) -> Self {
        Self {
            max_len: len,
            exact_len: Some(len),
            ..Self::new(pattern, len)
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    fn allows(&self, len: usize) -> bool {
        match self.exact_len {
            Some(l) => len == l,
            None => (1..=self.max_len).contains(&len),
        }
    }

    fn longest(&self) -> usize {
        self.exact_len.unwrap_or(self.max_len)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleResult {
    Found(Subdivision),
    NotFound,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub result: OracleResult,
    pub nodes: u64,
}

impl OracleReport {
    pub fn contains(&self) -> Option<bool> {
        match self.result {
            OracleResult::Found(_) => Some(true),
            OracleResult::NotFound => Some(false),
            OracleResult::BudgetExceeded => None,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("host has {0} vertices; the oracle handles at most {MAX_ORACLE_N}")]
    HostTooLarge(usize),
    #[error("exhaustive enumeration supports 1..={MAX_EXHAUSTIVE_N} vertices, got {0}")]
    EnumerationTooLarge(usize),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

struct Search<'a> {
    n: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
    q: &'a OracleQuery,
    symmetric: bool,
    nodes: u64,
    exhausted: bool,
    branch: Vec<usize>,
    routes: Vec<Option<Vec<usize>>>,
}

/// Decides whether `t` contains a subdivision of `q.pattern` within the caps.
pub fn oracle_subdivision(t: &Tournament, q: &OracleQuery) -> Result<OracleReport, OracleError> {
    let n = t.n();
    if n > MAX_ORACLE_N {
        return Err(OracleError::HostTooLarge(n));
    }
    if q.max_len == 0 || q.exact_len == Some(0) {
        return Err(OracleError::InvalidQuery("path lengths start at 1".into()));
    }
    if q.node_budget == 0 {
        return Err(OracleError::InvalidQuery("node budget must be positive".into()));
    }
    let mask = |set: &crate::bitset::VertexSet| set.words().first().copied().unwrap_or(0);
    let mut s = Search {
        n,
        out: (0..n).map(|v| mask(t.out(v))).collect(),
        inn: (0..n).map(|v| mask(t.inn(v))).collect(),
        q,
        symmetric: q.pattern.is_complete(),
        nodes: 0,
        exhausted: false,
        branch: Vec::with_capacity(q.pattern.k),
        routes: vec![None; q.pattern.edges.len()],
    };
    let found = q.pattern.k <= n && s.assign(0);
    let result = if found {
        let sub = Subdivision {
            pattern: q.pattern.clone(),
            branch: s.branch.clone(),
            paths: q
                .pattern
                .edges
                .iter()
                .zip(&s.routes)
                .map(|(&(a, b), r)| PathWitness {
                    from: s.branch[a],
                    to: s.branch[b],
                    internals: r.clone().expect("all edges routed"),
                })
                .collect(),
        };
        debug_assert!(verify(t, &sub, q.max_len, q.exact_len).is_valid());
        OracleResult::Found(sub)
    } else if s.exhausted {
        OracleResult::BudgetExceeded
    } else {
        OracleResult::NotFound
    };
    Ok(OracleReport { result, nodes: s.nodes })
}

impl Search<'_> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.q.node_budget {
            self.exhausted = true;
        }
        !self.exhausted
    }

    fn used_mask(&self) -> u64 {
        let mut m = 0u64;
        for &b in &self.branch {
            m |= 1 << b;
        }
        for r in self.routes.iter().flatten() {
            for &v in r {
                m |= 1 << v;
            }
        }
        m
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Fewest internals a path `x → y` can have under the caps, ignoring
    /// disjointness.
    fn floor_internals(&self, x: usize, y: usize) -> usize {
        if self.q.allows(1) && self.out[x] >> y & 1 == 1 {
            0
        } else {
            match self.q.exact_len {
                Some(l) => l - 1,
                None => 1,
            }
        }
    }

    fn assign(&mut self, p: usize) -> bool {
        let k = self.q.pattern.k;
        if p == k {
            return self.route();
        }
        let taken = self.used_mask();
        let start = if self.symmetric {
            self.branch.last().map_or(0, |&b| b + 1)
        } else {
            0
        };
        for v in start..self.n {
            if taken >> v & 1 == 1 {
                continue;
            }
            if !self.tick() {
                return false;
            }
            self.branch.push(v);
            if self.internal_floor_fits() && self.assign(p + 1) {
                return true;
            }
            self.branch.pop();
            if self.exhausted {
                return false;
            }
        }
        false
    }

    /// Internals forced by edges among assigned branch vertices, plus the
    /// branch vertices still to place, must fit in the host.
    fn internal_floor_fits(&self) -> bool {
        let placed = self.branch.len();
        let need: usize = self
            .q
            .pattern
            .edges
            .iter()
            .filter(|&&(a, b)| a < placed && b < placed)
            .map(|&(a, b)| self.floor_internals(self.branch[a], self.branch[b]))
            .sum();
        placed + need + (self.q.pattern.k - placed) <= self.n
    }

    /// Candidate internals for `x → y` through `pool`, shortest first, at
    /// most `limit` of them.
    fn paths(&self, x: usize, y: usize, pool: u64, limit: usize) -> Vec<Vec<usize>> {
        let mut found = Vec::new();
        if self.q.allows(1) && self.out[x] >> y & 1 == 1 {
            found.push(Vec::new());
        }
        let longest = self.q.longest();
        for len in 2..=longest {
            if found.len() >= limit {
                break;
            }
            if !self.q.allows(len) {
                continue;
            }
            let mut stack = Vec::with_capacity(len - 1);
            self.extend(x, y, pool, len - 1, &mut stack, &mut found, limit);
        }
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        at: usize,
        y: usize,
        pool: u64,
        left: usize,
        stack: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if found.len() >= limit {
            return;
        }
        let mut cand = self.out[at] & pool;
        if left == 1 {
            cand &= self.inn[y];
        }
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            stack.push(v);
            if left == 1 {
                found.push(stack.clone());
            } else {
                self.extend(v, y, pool & !(1 << v), left - 1, stack, found, limit);
            }
            stack.pop();
            if found.len() >= limit {
                return;
            }
        }
    }

    fn route(&mut self) -> bool {
        let pool = self.full() & !self.used_mask();
        let open: Vec<usize> = (0..self.routes.len()).filter(|&i| self.routes[i].is_none()).collect();
        if open.is_empty() {
            return true;
        }
        // most constrained edge first; counting stops at the current best
        let mut best: Option<(usize, Vec<Vec<usize>>)> = None;
        let mut floor = 0usize;
        for &i in &open {
            let (a, b) = self.q.pattern.edges[i];
            let (x, y) = (self.branch[a], self.branch[b]);
            let limit = best.as_ref().map_or(usize::MAX, |(_, c)| c.len());
            let cands = self.paths(x, y, pool, limit);
            if cands.is_empty() {
                return false;
            }
            floor += cands.iter().map(Vec::len).min().expect("nonempty");
            if best.as_ref().is_none_or(|(_, c)| cands.len() < c.len()) {
                best = Some((i, cands));
            }
        }
        if floor > pool.count_ones() as usize {
            return false;
        }
        let (i, cands) = best.expect("open edges");
        for c in cands {
            if !self.tick() {
                return false;
            }
            self.routes[i] = Some(c);
            if self.route() {
                return true;
            }
            self.routes[i] = None;
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

/// Every labelled tournament on `n ≤ 5` vertices. Bit `p` of the index
/// orients the `p`-th pair `(i, j)`, `i < j`, in lexicographic order as
/// `i → j` when set.
pub fn exhaustive_tournaments(n: usize) -> Result<impl Iterator<Item = Tournament>, OracleError> {
    if n == 0 || n > MAX_EXHAUSTIVE_N {
        return Err(OracleError::EnumerationTooLarge(n));
    }
    let pairs = n * (n - 1) / 2;
    Ok((0u64..1 << pairs).map(move |code| tournament_from_code(n, code)))
}

fn tournament_from_code(n: usize, code: u64) -> Tournament {
    let index = |i: usize, j: usize| i * (2 * n - i - 1) / 2 + (j - i - 1);
    Tournament::from_fn(n, |i, j| code >> index(i, j) & 1 == 1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    pub instance: u64,
    /// Generator seed for sampled rows; empty for enumerated ones.
    pub seed: Option<u64>,
    pub delta_plus: usize,
    /// Empty when the node budget ran out.
    pub contains: Option<bool>,
    pub nodes: u64,
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanTable {
    pub k: usize,
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    /// Largest `δ⁺` seen on a host without the subdivision: a sampled lower
    /// bound signal for `d(k)`, not a proof.
    pub fn max_delta_without(&self) -> Option<usize> {
        self.rows
            .iter()
            .filter(|r| r.contains == Some(false))
            .map(|r| r.delta_plus)
            .max()
    }

    pub fn budget_misses(&self) -> usize {
        self.rows.iter().filter(|r| r.contains.is_none()).count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub k: usize,
    pub n_min: usize,
    pub n_max: usize,
    /// Samples per `n` above the enumeration limit.
    pub trials: usize,
    pub seed: u64,
    pub max_len: usize,
    pub node_budget: u64,
    pub timings: bool,
}

/// For each `n`, records `δ⁺` and `TK→_k` containment (paths of length at
/// most `max_len`). Sizes up to 5 are enumerated, larger ones sampled with
/// per-instance seeds derived from `(seed, n·2³² + trial)`.
pub fn scan_d_lower(cfg: &ScanConfig, exec: Exec) -> Result<ScanTable, OracleError> {
    if cfg.n_max > MAX_ORACLE_N {
        return Err(OracleError::HostTooLarge(cfg.n_max));
    }
    let pattern = PatternDigraph::complete(cfg.k).map_err(|e| OracleError::InvalidQuery(e.to_string()))?;
    let query = OracleQuery::new(pattern, cfg.max_len).with_budget(cfg.node_budget);

    let mut jobs: Vec<(usize, u64, Option<u64>)> = Vec::new();
    for n in cfg.n_min.max(1)..=cfg.n_max {
        if n <= MAX_EXHAUSTIVE_N {
            let pairs = n * (n - 1) / 2;
            jobs.extend((0u64..1 << pairs).map(|code| (n, code, None)));
        } else {
            for trial in 0..cfg.trials as u64 {
                let s = instance_seed(cfg.seed, ((n as u64) << 32) | trial);
                jobs.push((n, trial, Some(s)));
            }
        }
    }
    let rows = exec.map(&jobs, |&(n, instance, seed)| {
        let t = match seed {
            None => tournament_from_code(n, instance),
            Some(s) => generate(Generator::Random { n }, s).expect("n ≥ 1"),
        };
        let start = Instant::now();
        let report = oracle_subdivision(&t, &query).expect("size checked");
        ScanRow {
            n,
            instance,
            seed,
            delta_plus: t.min_out_degree(),
            contains: report.contains(),
            nodes: report.nodes,
            millis: cfg.timings.then(|| start.elapsed().as_millis() as u64),
        }
    });
    Ok(ScanTable { k: cfg.k, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::cyclic_triangle;

    fn k2() -> PatternDigraph {
        PatternDigraph::complete(2).unwrap()
    }

    #[test]
    fn acyclic_host_has_no_k2() {
        let t = generate(Generator::Transitive { n: 7 }, 0).unwrap();
        let r = oracle_subdivision(&t, &OracleQuery::new(k2(), 7)).unwrap();
        assert_eq!(r.result, OracleResult::NotFound);
    }

    #[test]
    fn triangle_has_k2() {
        let t = cyclic_triangle();
        let r = oracle_subdivision(&t, &OracleQuery::new(k2(), 3)).unwrap();
        let OracleResult::Found(sub) = r.result else { panic!() };
        assert!(verify(&t, &sub, 3, None).is_valid());
    }

    #[test]
    fn transitive_six_has_one_subdivided_t3() {
        let t = generate(Generator::Transitive { n: 6 }, 0).unwrap();
        let q = OracleQuery::exact(PatternDigraph::transitive(3).unwrap(), 2);
        let r = oracle_subdivision(&t, &q).unwrap();
        let OracleResult::Found(sub) = r.result else { panic!() };
        assert!(verify(&t, &sub, 2, Some(2)).is_valid());
        assert_eq!(sub.branch, vec![0, 2, 5]);
    }

    #[test]
    fn transitive_five_has_no_one_subdivided_t3() {
        let t = generate(Generator::Transitive { n: 5 }, 0).unwrap();
        let q = OracleQuery::exact(PatternDigraph::transitive(3).unwrap(), 2);
        assert_eq!(oracle_subdivision(&t, &q).unwrap().result, OracleResult::NotFound);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(exhaustive_tournaments(1).unwrap().count(), 1);
        assert_eq!(exhaustive_tournaments(5).unwrap().count(), 1024);
        assert!(exhaustive_tournaments(6).is_err());
        let cyclic = exhaustive_tournaments(3)
            .unwrap()
            .filter(|t| t.min_out_degree() == 1)
            .count();
        assert_eq!(cyclic, 2);
        // distinct codes give distinct orientations
        let mut texts: Vec<String> = exhaustive_tournaments(4).unwrap().map(|t| t.to_text()).collect();
        texts.sort();
        texts.dedup();
        assert_eq!(texts.len(), 64);
    }

    #[test]
    fn tiny_budget_is_reported() {
        let t = generate(Generator::Random { n: 12 }, 1).unwrap();
        let q = OracleQuery::new(PatternDigraph::complete(3).unwrap(), 3).with_budget(3);
        assert_eq!(oracle_subdivision(&t, &q).unwrap().result, OracleResult::BudgetExceeded);
    }

    #[test]
    fn blowup_has_no_short_k3() {
        let t = generate(Generator::BlowupCyclicTriangle { class_size: 4 }, 0).unwrap();
        let q = OracleQuery::new(PatternDigraph::complete(3).unwrap(), 2);
        let r = oracle_subdivision(&t, &q).unwrap();
        assert!(r.contains().is_some());
    }

    #[test]
    fn random_twelve_k3_within_three() {
        let t = generate(Generator::Random { n: 12 }, 4).unwrap();
        let q = OracleQuery::new(PatternDigraph::complete(3).unwrap(), 3);
        let r = oracle_subdivision(&t, &q).unwrap();
        if let OracleResult::Found(sub) = r.result {
            assert!(verify(&t, &sub, 3, None).is_valid());
        }
    }

    #[test]
    fn scan_k3_on_five_is_empty() {
        let cfg = ScanConfig {
            k: 3,
            n_min: 5,
            n_max: 5,
            trials: 0,
            seed: 1,
            max_len: 3,
            node_budget: DEFAULT_NODE_BUDGET,
            timings: false,
        };
        let table = scan_d_lower(&cfg, Exec::Sequential).unwrap();
        assert_eq!(table.rows.len(), 1024);
        assert!(table.rows.iter().all(|r| r.contains == Some(false)));
    }
}
