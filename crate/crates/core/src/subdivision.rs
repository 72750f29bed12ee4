//! Pattern digraphs, subdivision witnesses and the verifier every finder and
//! the oracle are checked against.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tournament::Tournament;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern needs at least one vertex")]
    Empty,
    #[error("self-loop at pattern vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate pattern edge ({0},{1})")]
    Duplicate(usize, usize),
    #[error("pattern edge ({0},{1}) names a vertex outside 0..{2}")]
    OutOfRange(usize, usize, usize),
    #[error("pattern vertex {0} is isolated")]
    Isolated(usize),
    #[error("cannot parse pattern `{0}`; expected complete:K, transitive:K or edges:K:a-b,c-d")]
    Syntax(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternDigraph {
    pub k: usize,
    pub edges: Vec<(usize, usize)>,
}

impl PatternDigraph {
    pub fn new(k: usize, edges: Vec<(usize, usize)>) -> Result<Self, PatternError> {
        if k == 0 {
            return Err(PatternError::Empty);
        }
        let mut seen = HashSet::new();
        for &(a, b) in &edges {
            if a >= k || b >= k {
                return Err(PatternError::OutOfRange(a, b, k));
            }
            if a == b {
                return Err(PatternError::SelfLoop(a));
            }
            if !seen.insert((a, b)) {
                return Err(PatternError::Duplicate(a, b));
            }
        }
        Ok(Self { k, edges })
    }

    /// Both directed edges between every pair of `k` vertices.
    pub fn complete(k: usize) -> Result<Self, PatternError> {
        let edges = (0..k)
            .flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        Self::new(k, edges)
    }

    /// The transitive tournament: `(i, j)` for all `i < j`.
    pub fn transitive(k: usize) -> Result<Self, PatternError> {
        let edges = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
        Self::new(k, edges)
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.k * (self.k - 1)
    }

    /// Rejects patterns with a vertex touching no edge.
    pub fn require_no_isolated(&self) -> Result<(), PatternError> {
        let mut touched = vec![false; self.k];
        for &(a, b) in &self.edges {
            touched[a] = true;
            touched[b] = true;
        }
        match touched.iter().position(|&t| !t) {
            Some(v) => Err(PatternError::Isolated(v)),
            None => Ok(()),
        }
    }
}

impl std::str::FromStr for PatternDigraph {
    type Err = PatternError;

    /// `complete:3`, `transitive:4`, or `edges:3:0-1,1-2,2-0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syntax = || PatternError::Syntax(s.to_string());
        let mut parts = s.splitn(3, ':');
        let kind = parts.next().ok_or_else(syntax)?;
        let k: usize = parts.next().ok_or_else(syntax)?.parse().map_err(|_| syntax())?;
        match (kind, parts.next()) {
            ("complete", None) => Self::complete(k),
            ("transitive", None) => Self::transitive(k),
            ("edges", Some(list)) => {
                let edges = list
                    .split(',')
                    .filter(|e| !e.is_empty())
                    .map(|e| {
                        let (a, b) = e.split_once('-').ok_or_else(syntax)?;
                        Ok((
                            a.trim().parse().map_err(|_| syntax())?,
                            b.trim().parse().map_err(|_| syntax())?,
                        ))
                    })
                    .collect::<Result<Vec<_>, PatternError>>()?;
                Self::new(k, edges)
            }
            _ => Err(syntax()),
        }
    }
}

/// A directed path between two branch vertices (host coordinates).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathWitness {
    pub from: usize,
    pub to: usize,
    pub internals: Vec<usize>,
}

impl PathWitness {
    pub fn direct(from: usize, to: usize) -> Self {
        Self {
            from,
            to,
            internals: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.internals.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.from)
            .chain(self.internals.iter().copied())
            .chain(std::iter::once(self.to))
    }
}

/// Branch map plus one path per pattern edge, `paths[i]` realising
/// `pattern.edges[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subdivision {
    pub pattern: PatternDigraph,
    pub branch: Vec<usize>,
    pub paths: Vec<PathWitness>,
}

impl Subdivision {
    pub fn paths_of_len(&self, len: usize) -> usize {
        self.paths.iter().filter(|p| p.len() == len).count()
    }

    /// Paths of length 2.
    pub fn l1(&self) -> usize {
        self.paths_of_len(2)
    }

    /// Paths of length 3.
    pub fn l2(&self) -> usize {
        self.paths_of_len(3)
    }

    pub fn span(&self) -> usize {
        self.branch.len() + self.paths.iter().map(|p| p.internals.len()).sum::<usize>()
    }

    pub fn max_internals(&self) -> usize {
        self.paths.iter().map(|p| p.internals.len()).max().unwrap_or(0)
    }

    /// Re-expresses every vertex through `map` (e.g. sub-tournament → root).
    pub fn relabel(&self, map: &[usize]) -> Subdivision {
        Subdivision {
            pattern: self.pattern.clone(),
            branch: self.branch.iter().map(|&v| map[v]).collect(),
            paths: self
                .paths
                .iter()
                .map(|p| PathWitness {
                    from: map[p.from],
                    to: map[p.to],
                    internals: p.internals.iter().map(|&v| map[v]).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    BranchCount {
        expected: usize,
        got: usize,
    },
    VertexOutOfRange {
        vertex: usize,
    },
    BranchCollision {
        vertex: usize,
    },
    MissingPath {
        edge: (usize, usize),
    },
    UnmatchedPath {
        from: usize,
        to: usize,
    },
    MissingHop {
        from: usize,
        to: usize,
    },
    ReusedInternal {
        vertex: usize,
    },
    InternalOnBranch {
        vertex: usize,
    },
    LengthCap {
        from: usize,
        to: usize,
        len: usize,
        cap: usize,
    },
    ExactLength {
        from: usize,
        to: usize,
        len: usize,
        required: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
    pub l1: usize,
    pub l2: usize,
    pub span: usize,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every clause of the subdivision definition and reports all
/// violations. `exact_len`, when set, overrides `max_len` as the only allowed
/// path length.
pub fn verify(t: &Tournament, sub: &Subdivision, max_len: usize, exact_len: Option<usize>) -> VerifyReport {
    let mut violations = Vec::new();
    let n = t.n();
    let pattern = &sub.pattern;

    if sub.branch.len() != pattern.k {
        violations.push(Violation::BranchCount {
            expected: pattern.k,
            got: sub.branch.len(),
        });
    }
    let mut branch_seen = HashSet::new();
    for &b in &sub.branch {
        if b >= n {
            violations.push(Violation::VertexOutOfRange { vertex: b });
        } else if !branch_seen.insert(b) {
            violations.push(Violation::BranchCollision { vertex: b });
        }
    }

    // Pair paths with pattern edges by their endpoints under the branch map.
    let mut matched = vec![false; pattern.edges.len()];
    let mut internal_seen = HashSet::new();
    for path in &sub.paths {
        let slot = pattern.edges.iter().enumerate().position(|(i, &(a, b))| {
            !matched[i] && sub.branch.get(a) == Some(&path.from) && sub.branch.get(b) == Some(&path.to)
        });
        match slot {
            Some(i) => matched[i] = true,
            None => violations.push(Violation::UnmatchedPath {
                from: path.from,
                to: path.to,
            }),
        }

        let hops: Vec<usize> = path.vertices().collect();
        if let Some(&v) = hops.iter().find(|&&v| v >= n) {
            violations.push(Violation::VertexOutOfRange { vertex: v });
            continue;
        }
        for w in hops.windows(2) {
            if !t.beats(w[0], w[1]) {
                violations.push(Violation::MissingHop { from: w[0], to: w[1] });
            }
        }
        for &v in &path.internals {
            if branch_seen.contains(&v) {
                violations.push(Violation::InternalOnBranch { vertex: v });
            } else if !internal_seen.insert(v) {
                violations.push(Violation::ReusedInternal { vertex: v });
            }
        }
        let len = path.len();
        match exact_len {
            Some(required) if len != required => violations.push(Violation::ExactLength {
                from: path.from,
                to: path.to,
                len,
                required,
            }),
            None if len > max_len => violations.push(Violation::LengthCap {
                from: path.from,
                to: path.to,
                len,
                cap: max_len,
            }),
            _ => {}
        }
    }
    for (i, &m) in matched.iter().enumerate() {
        if !m {
            violations.push(Violation::MissingPath { edge: pattern.edges[i] });
        }
    }

    VerifyReport {
        violations,
        l1: sub.l1(),
        l2: sub.l2(),
        span: sub.span(),
    }
}

/// Fewest host vertices any subdivision of `pattern` can occupy. For the
/// complete digraph in a tournament one direction of every pair must be
/// subdivided, giving `k(k−1)/2 + k`; otherwise the branch count.
pub fn min_span(pattern: &PatternDigraph, host_is_tournament: bool) -> usize {
    let k = pattern.k;
    if host_is_tournament && pattern.is_complete() {
        k * (k - 1) / 2 + k
    } else {
        k
    }
}

/// On-disk witness: the subdivision, the host fingerprint and optionally the
/// resolved run configuration that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub pattern: PatternDigraph,
    pub branch: Vec<usize>,
    pub paths: Vec<PathWitness>,
    pub host_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl Witness {
    pub fn new(host: &Tournament, sub: &Subdivision) -> Self {
        Self {
            pattern: sub.pattern.clone(),
            branch: sub.branch.clone(),
            paths: sub.paths.clone(),
            host_hash: host.hash_hex(),
            config: None,
        }
    }

    pub fn subdivision(&self) -> Subdivision {
        Subdivision {
            pattern: self.pattern.clone(),
            branch: self.branch.clone(),
            paths: self.paths.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{cyclic_triangle, generate, Generator};

    fn k2_on_triangle() -> Subdivision {
        Subdivision {
            pattern: PatternDigraph::complete(2).unwrap(),
            branch: vec![0, 1],
            paths: vec![
                PathWitness::direct(0, 1),
                PathWitness {
                    from: 1,
                    to: 0,
                    internals: vec![2],
                },
            ],
        }
    }

    #[test]
    fn pattern_constructors() {
        assert_eq!(PatternDigraph::complete(2).unwrap().edges, vec![(0, 1), (1, 0)]);
        assert_eq!(
            PatternDigraph::transitive(3).unwrap().edges,
            vec![(0, 1), (0, 2), (1, 2)]
        );
        assert_eq!(PatternDigraph::complete(3).unwrap().edges.len(), 6);
        assert_eq!(PatternDigraph::complete(0).unwrap_err(), PatternError::Empty);
        assert_eq!(
            PatternDigraph::new(2, vec![(1, 1)]).unwrap_err(),
            PatternError::SelfLoop(1)
        );
        assert_eq!(
            PatternDigraph::new(2, vec![(0, 1), (0, 1)]).unwrap_err(),
            PatternError::Duplicate(0, 1)
        );
        assert_eq!(
            PatternDigraph::new(3, vec![(0, 1)]).unwrap().require_no_isolated(),
            Err(PatternError::Isolated(2))
        );
    }

    #[test]
    fn pattern_parsing() {
        let p: PatternDigraph = "edges:3:0-1,1-2,2-0".parse().unwrap();
        assert_eq!(p.edges, vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!("complete:3".parse::<PatternDigraph>().unwrap().edges.len(), 6);
        assert!("cycle:3".parse::<PatternDigraph>().is_err());
    }

    #[test]
    fn triangle_carries_k2() {
        let t = cyclic_triangle();
        let sub = k2_on_triangle();
        let r = verify(&t, &sub, 3, None);
        assert!(r.is_valid(), "{:?}", r.violations);
        assert_eq!((r.l1, r.l2, r.span), (1, 0, 3));

        let r = verify(&t, &sub, 3, Some(2));
        assert!(!r.is_valid());
        assert!(matches!(r.violations[0], Violation::ExactLength { len: 1, .. }));
    }

    #[test]
    fn one_subdivision_of_t3_in_transitive_six() {
        let t = generate(Generator::Transitive { n: 6 }, 0).unwrap();
        let sub = Subdivision {
            pattern: PatternDigraph::transitive(3).unwrap(),
            branch: vec![0, 2, 5],
            paths: vec![
                PathWitness {
                    from: 0,
                    to: 2,
                    internals: vec![1],
                },
                PathWitness {
                    from: 0,
                    to: 5,
                    internals: vec![3],
                },
                PathWitness {
                    from: 2,
                    to: 5,
                    internals: vec![4],
                },
            ],
        };
        assert!(verify(&t, &sub, 2, Some(2)).is_valid());
    }

    #[test]
    fn reports_every_violation() {
        let t = generate(Generator::Transitive { n: 5 }, 0).unwrap();
        let sub = Subdivision {
            pattern: PatternDigraph::complete(2).unwrap(),
            branch: vec![0, 0],
            paths: vec![
                PathWitness {
                    from: 0,
                    to: 0,
                    internals: vec![2, 3, 4],
                },
                PathWitness {
                    from: 0,
                    to: 0,
                    internals: vec![2],
                },
            ],
        };
        let r = verify(&t, &sub, 3, None);
        let has = |f: &dyn Fn(&Violation) -> bool| r.violations.iter().any(f);
        assert!(has(&|v| matches!(v, Violation::BranchCollision { vertex: 0 })));
        assert!(has(&|v| matches!(v, Violation::MissingHop { .. })));
        assert!(has(&|v| matches!(v, Violation::ReusedInternal { vertex: 2 })));
        assert!(has(&|v| matches!(v, Violation::LengthCap { len: 4, .. })));
    }

    #[test]
    fn missing_and_unmatched_paths() {
        let t = cyclic_triangle();
        let mut sub = k2_on_triangle();
        sub.paths[1].from = 2;
        let r = verify(&t, &sub, 3, None);
        assert!(r.violations.contains(&Violation::MissingPath { edge: (1, 0) }));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::UnmatchedPath { from: 2, .. })));
    }

    #[test]
    fn min_span_values() {
        let span = |k| min_span(&PatternDigraph::complete(k).unwrap(), true);
        assert_eq!(span(3), 6);
        assert_eq!(span(2), 3);
        assert_eq!(span(4), 10);
        assert_eq!(min_span(&PatternDigraph::transitive(4).unwrap(), true), 4);
    }

    #[test]
    fn witness_json_schema() {
        let t = cyclic_triangle();
        let w = Witness::new(&t, &k2_on_triangle());
        let v: serde_json::Value = serde_json::to_value(&w).unwrap();
        assert_eq!(v["pattern"]["k"], 2);
        assert_eq!(v["branch"], serde_json::json!([0, 1]));
        assert_eq!(v["paths"][1]["internals"], serde_json::json!([2]));
        assert_eq!(v["host_hash"].as_str().unwrap().len(), 64);
        let back: Witness = serde_json::from_value(v).unwrap();
        assert_eq!(back, w);
    }
}
