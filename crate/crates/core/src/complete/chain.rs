//! The chain `T₁ ⊃ T₂ ⊃ …` of nested sinks, cut repair, low out-degree
//! peeling and the final 3-path embedding through cut and source sets.

use thiserror::Error;

use super::matching::{half_matching, HalfMatchOutcome, HalfMatching};
use crate::bitset::VertexSet;
use crate::subdivision::PathWitness;
use crate::tournament::{CutSplit, Tournament};

/// One step of the chain: `Tᵢ = Uᵢ ⊔ Sᵢ ⊔ Tᵢ₊₁` with `Sᵢ → Tᵢ₊₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainStage {
    pub tournament: VertexSet,
    pub cut: VertexSet,
    pub source: VertexSet,
    /// Low out-degree vertices peeled before the dichotomy; part of `cut`.
    pub peeled: Vec<usize>,
    /// Half-matching of `cut` into `source` certifying expansion.
    pub matching: HalfMatching,
    pub repairs: usize,
}

impl ChainStage {
    pub fn sink(&self) -> VertexSet {
        self.tournament.minus(&self.cut).minus(&self.source)
    }

    pub fn split(&self) -> CutSplit {
        CutSplit {
            cut: self.cut.clone(),
            source: self.source.clone(),
            sink: self.sink(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutChain {
    pub stages: Vec<ChainStage>,
    pub terminal: VertexSet,
}

impl CutChain {
    pub fn new(host: VertexSet) -> Self {
        Self {
            stages: Vec::new(),
            terminal: host,
        }
    }

    pub fn push(&mut self, stage: ChainStage) {
        self.terminal = stage.sink();
        self.stages.push(stage);
    }

    pub fn cut_union(&self) -> VertexSet {
        let mut u = self.terminal.clone();
        u.clear();
        for s in &self.stages {
            u.union_with(&s.cut);
        }
        u
    }

    /// Structural invariants of every stage; returns the first broken one.
    pub fn check(&self, t: &Tournament, k: usize) -> Result<(), String> {
        for (i, st) in self.stages.iter().enumerate() {
            let sink = st.sink();
            if !st.split().is_valid_in(t, &st.tournament) {
                return Err(format!("stage {i}: not a source/sink split"));
            }
            if st.source.len() < st.cut.len() {
                return Err(format!("stage {i}: |S| = {} < |U| = {}", st.source.len(), st.cut.len()));
            }
            if sink.len() < k {
                return Err(format!("stage {i}: sink has {} < {k} vertices", sink.len()));
            }
            let next = self.stages.get(i + 1).map_or(&self.terminal, |s| &s.tournament);
            if *next != sink {
                return Err(format!("stage {i}: next tournament is not the sink"));
            }
            let mut used = vec![0u8; t.n()];
            let mut covered = 0;
            for &(u, s) in &st.matching.edges {
                used[s] += 1;
                covered += 1;
                if !st.cut.contains(u) || !st.source.contains(s) || !t.beats(u, s) || used[s] > 2 {
                    return Err(format!("stage {i}: bad matching edge ({u}, {s})"));
                }
            }
            if covered != st.cut.len() {
                return Err(format!("stage {i}: matching misses cut vertices"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("cut repair broke a bound: |S| = {source_size}, |U| = {cut}, |sink| = {sink}, k = {k}")]
    RepairExhausted {
        source_size: usize,
        cut: usize,
        sink: usize,
        k: usize,
    },
    #[error("vertex {vertex} has {count} out-neighbours in the cut sets, needs {needed}")]
    InsufficientOutNeighbours { vertex: usize, count: usize, needed: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizedCut {
    pub split: CutSplit,
    pub matching: HalfMatching,
    pub repairs: usize,
}

/// Repairs a cut of `ground` until its cut side half-matches into the source.
/// A violator `X` (`|N⁺(X) ∩ S| < |X|/2`) moves into the sink while
/// `N⁺(X) ∩ S` moves from the source into the cut, so `|U|` strictly drops
/// and `S → sink` is preserved.
pub fn minimize_cut(t: &Tournament, ground: &VertexSet, split: CutSplit, k: usize) -> Result<MinimizedCut, ChainError> {
    let CutSplit {
        mut cut,
        mut source,
        mut sink,
    } = split;
    let bound = cut.len();
    let mut repairs = 0;
    loop {
        if source.len() < cut.len() || sink.len() < k {
            return Err(ChainError::RepairExhausted {
                source_size: source.len(),
                cut: cut.len(),
                sink: sink.len(),
                k,
            });
        }
        let left = cut.to_vec();
        let right = source.to_vec();
        match half_matching(&left, &right, |u, s| t.beats(u, s)) {
            HalfMatchOutcome::Matched(matching) => {
                return Ok(MinimizedCut {
                    split: CutSplit { cut, source, sink },
                    matching,
                    repairs,
                })
            }
            HalfMatchOutcome::Violator(x) => {
                let xs = VertexSet::from_vertices(t.n(), x);
                let gained = t.out_of_set(&xs).and(&source);
                assert!(2 * gained.len() < xs.len(), "violator does not violate");
                cut.difference_with(&xs);
                cut.union_with(&gained);
                source.difference_with(&gained);
                sink.union_with(&xs);
                repairs += 1;
                assert!(repairs <= bound, "cut repair exceeded |U| steps");
                debug_assert!(CutSplit {
                    cut: cut.clone(),
                    source: source.clone(),
                    sink: sink.clone()
                }
                .is_valid_in(t, ground));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peel {
    /// Removed vertices in removal order.
    pub removed: Vec<usize>,
    pub rest: VertexSet,
}

/// Repeatedly removes a vertex of minimum out-degree (lowest index on ties)
/// while that degree is below `threshold`, stopping once `k` are removed.
pub fn peel_low_outdegree(t: &Tournament, within: &VertexSet, threshold: f64, k: usize) -> Peel {
    let mut rest = within.clone();
    let mut deg = vec![0usize; t.n()];
    for v in within {
        deg[v] = t.out_degree_in(v, within);
    }
    let mut removed = Vec::new();
    while removed.len() < k {
        let Some(v) = rest.iter().min_by_key(|&v| (deg[v], v)) else {
            break;
        };
        if deg[v] as f64 >= threshold {
            break;
        }
        rest.remove(v);
        for w in t.inn(v).and(&rest).iter() {
            deg[w] -= 1;
        }
        removed.push(v);
    }
    Peel { removed, rest }
}

/// Joins each pair `(x, y)` by a 3-path `x → u → s → y` with `u` in a cut
/// set and `s` its matched source vertex. Needs every `y` inside the terminal
/// tournament and every `x` with at least `2·pairs.len()` out-neighbours in
/// the cut sets.
pub fn embed_via_cut_chain(
    t: &Tournament,
    pairs: &[(usize, usize)],
    chain: &CutChain,
) -> Result<Vec<PathWitness>, ChainError> {
    let ell = pairs.len();
    if ell == 0 {
        return Ok(Vec::new());
    }
    let n = t.n();
    let mut m1 = vec![None; n];
    let mut m2 = vec![None; n];
    for st in &chain.stages {
        let (a, b) = st.matching.split();
        for (u, s) in a {
            m1[u] = Some(s);
        }
        for (u, s) in b {
            m2[u] = Some(s);
        }
    }
    let u1 = VertexSet::from_vertices(n, (0..n).filter(|&u| m1[u].is_some()));
    let u2 = VertexSet::from_vertices(n, (0..n).filter(|&u| m2[u].is_some()));
    let cuts = u1.or(&u2);

    for &(x, _) in pairs {
        let count = t.out(x).count_and(&cuts);
        if count < 2 * ell {
            return Err(ChainError::InsufficientOutNeighbours {
                vertex: x,
                count,
                needed: 2 * ell,
            });
        }
    }

    let mut paths: Vec<Option<PathWitness>> = vec![None; ell];
    let mut taken_u = VertexSet::new(n);
    let mut taken_s = VertexSet::new(n);
    let (first, second): (Vec<usize>, Vec<usize>) = (0..ell).partition(|&i| t.out(pairs[i].0).count_and(&u1) >= ell);

    for &i in &first {
        let (x, y) = pairs[i];
        let u = t
            .out(x)
            .and(&u1)
            .minus(&taken_u)
            .first()
            .expect("at least ell candidates for at most ell pairs");
        let s = m1[u].expect("matched");
        taken_u.insert(u);
        taken_s.insert(s);
        paths[i] = Some(PathWitness {
            from: x,
            to: y,
            internals: vec![u, s],
        });
    }

    let blocked = VertexSet::from_vertices(n, u2.iter().filter(|&u| taken_s.contains(m2[u].expect("matched"))));
    let pool = u2.minus(&blocked);
    for &i in &second {
        let (x, y) = pairs[i];
        let u = t
            .out(x)
            .and(&pool)
            .minus(&taken_u)
            .first()
            .expect("more than |second| candidates remain");
        let s = m2[u].expect("matched");
        taken_u.insert(u);
        paths[i] = Some(PathWitness {
            from: x,
            to: y,
            internals: vec![u, s],
        });
    }
    Ok(paths.into_iter().map(|p| p.expect("every pair placed")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{generate, Generator};

    #[test]
    fn peel_transitive_removes_sinks() {
        let t = generate(Generator::Transitive { n: 5 }, 0).unwrap();
        let p = peel_low_outdegree(&t, &t.all(), 1.0, 3);
        assert_eq!(p.removed, vec![4, 3, 2]);
        assert_eq!(p.rest.to_vec(), vec![0, 1]);
    }

    #[test]
    fn peel_regular_is_strict() {
        let t = generate(Generator::Rotational { n: 11 }, 0).unwrap();
        let p = peel_low_outdegree(&t, &t.all(), 5.0, 3);
        assert!(p.removed.is_empty());
        assert_eq!(p.rest, t.all());
    }

    #[test]
    fn peel_random_disjunction() {
        let t = generate(Generator::Random { n: 60 }, 9).unwrap();
        let p = peel_low_outdegree(&t, &t.all(), 10.0, 4);
        let min_rest = p.rest.iter().map(|v| t.out_degree_in(v, &p.rest)).min().unwrap();
        assert!(p.removed.len() == 4 || min_rest >= 10);
    }

    #[test]
    fn expanding_cut_is_left_alone() {
        // 0 → {1, 2}; cut {0}, source {1}, sink {2}; 1 → 2
        let t = Tournament::from_fn(3, |_, _| true);
        let split = CutSplit {
            cut: VertexSet::from_vertices(3, [0]),
            source: VertexSet::from_vertices(3, [1]),
            sink: VertexSet::from_vertices(3, [2]),
        };
        let m = minimize_cut(&t, &t.all(), split.clone(), 1).unwrap();
        assert_eq!(m.split, split);
        assert_eq!(m.repairs, 0);
        assert_eq!(m.matching.edges, vec![(0, 1)]);
    }

    #[test]
    fn three_into_one_is_replaced() {
        // cut {a, b, c} = {0, 1, 2} all → s = 3; S = {3, 4, 5, 6}; 4, 5, 6 → {0, 1, 2}
        // sink {7}; S → 7; cut → 7
        let t = Tournament::from_fn(8, |i, j| match (i, j) {
            (0..=2, 3) => true,
            (0..=2, 4..=6) => false,
            _ => true,
        });
        let split = CutSplit {
            cut: VertexSet::from_vertices(8, [0, 1, 2]),
            source: VertexSet::from_vertices(8, [3, 4, 5, 6]),
            sink: VertexSet::from_vertices(8, [7]),
        };
        assert!(split.is_valid_in(&t, &t.all()));
        let m = minimize_cut(&t, &t.all(), split, 1).unwrap();
        assert_eq!(m.split.cut.to_vec(), vec![3]);
        assert_eq!(m.split.source.to_vec(), vec![4, 5, 6]);
        assert_eq!(m.split.sink.to_vec(), vec![0, 1, 2, 7]);
        assert_eq!(m.repairs, 1);
        assert!(m.split.is_valid_in(&t, &t.all()));
    }

    fn chain_for(t: &Tournament, cut: &[usize], source: &[usize]) -> CutChain {
        let n = t.n();
        let HalfMatchOutcome::Matched(matching) = half_matching(cut, source, |u, s| t.beats(u, s)) else {
            panic!("cut does not half-match");
        };
        let mut chain = CutChain::new(t.all());
        chain.push(ChainStage {
            tournament: t.all(),
            cut: VertexSet::from_vertices(n, cut.iter().copied()),
            source: VertexSet::from_vertices(n, source.iter().copied()),
            peeled: Vec::new(),
            matching,
            repairs: 0,
        });
        chain
    }

    #[test]
    fn single_pair_goes_through_cut_and_source() {
        // x = 0, y = 1; cut {2, 3} both → s = 4; 4 → {0, 1}
        let t = Tournament::from_fn(5, |i, j| !matches!((i, j), (0 | 1, 4)));
        let chain = chain_for(&t, &[2, 3], &[4]);
        let paths = embed_via_cut_chain(&t, &[(1, 0)], &chain).unwrap();
        assert_eq!(paths[0].internals, vec![2, 4]);
    }

    #[test]
    fn two_pairs_sharing_a_vertex_are_disjoint() {
        // x = 0, y = 1, cut {2..5}, source {6, 7}; 2, 3 → 6 and 4, 5 → 7
        let t = Tournament::from_fn(8, |i, j| !matches!((i, j), (0 | 1, 6 | 7) | (4 | 5, 6) | (2 | 3, 7)));
        let chain = chain_for(&t, &[2, 3, 4, 5], &[6, 7]);
        let pairs = [(0, 1), (1, 0)];
        let paths = embed_via_cut_chain(&t, &pairs, &chain).unwrap();
        let mut seen = std::collections::HashSet::new();
        for (p, &(x, y)) in paths.iter().zip(&pairs) {
            let vs: Vec<usize> = p.vertices().collect();
            assert_eq!((vs[0], vs[3]), (x, y));
            for w in vs.windows(2) {
                assert!(t.beats(w[0], w[1]));
            }
            for &v in &p.internals {
                assert!(seen.insert(v), "internal {v} reused");
            }
        }
    }

    #[test]
    fn one_out_neighbour_is_not_enough() {
        // x = 0 → only 2 among the cut {2, 3}
        let t = Tournament::from_fn(5, |i, j| !matches!((i, j), (0 | 1, 4) | (0, 3)));
        let chain = chain_for(&t, &[2, 3], &[4]);
        assert_eq!(
            embed_via_cut_chain(&t, &[(0, 1)], &chain),
            Err(ChainError::InsufficientOutNeighbours {
                vertex: 0,
                count: 1,
                needed: 2
            })
        );
    }
}
