//! Greedy partial embedding on a balanced branch set and its two outcomes:
//! enough short paths, or a cut whose source side is large.
//!
//! Pairs `(x, y)` are branch pairs whose tournament edge points `y → x`, so
//! the pattern edge `x → y` needs a subdivided path. Paths of length 2 are
//! preferred over length 3; when a pair gets stuck, vertices of
//! `N⁺(x) ∩ N⁻(y)` sitting on 3-paths are traded to it, which strictly
//! raises the number of 2-paths.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::balanced::BalancedSet;
use crate::bitset::VertexSet;
use crate::subdivision::PatternDigraph;
use crate::tournament::{CutSplit, Tournament};

#[derive(Clone, Debug, PartialEq)]
pub struct PartialSubdivision {
    n: usize,
    pub branch: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
    /// Internal vertices of each pair's path (1 or 2 of them), if embedded.
    pub routes: Vec<Option<Vec<usize>>>,
}

impl PartialSubdivision {
    pub fn new(n: usize, branch: Vec<usize>, pairs: Vec<(usize, usize)>) -> Self {
        let routes = vec![None; pairs.len()];
        Self {
            n,
            branch,
            pairs,
            routes,
        }
    }

    /// Paths of length 2.
    pub fn l1(&self) -> usize {
        self.routes.iter().flatten().filter(|r| r.len() == 1).count()
    }

    /// Paths of length 3.
    pub fn l2(&self) -> usize {
        self.routes.iter().flatten().filter(|r| r.len() == 2).count()
    }

    pub fn internals(&self) -> VertexSet {
        VertexSet::from_vertices(self.n, self.routes.iter().flatten().flatten().copied())
    }

    /// `V(𝒮)`: branch vertices plus all internals.
    pub fn vertex_set(&self) -> VertexSet {
        let mut s = self.internals();
        for &b in &self.branch {
            s.insert(b);
        }
        s
    }

    pub fn remaining(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .zip(&self.routes)
            .filter(|(_, r)| r.is_none())
            .map(|(&p, _)| p)
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.routes.iter().all(Option::is_some)
    }

    /// Route of the pair `(x, y)`, if embedded.
    pub fn route_of(&self, pair: (usize, usize)) -> Option<&[usize]> {
        let i = self.pairs.iter().position(|&p| p == pair)?;
        self.routes[i].as_deref()
    }
}

/// Where paths may run: inside `scope`, avoiding `forbidden`.
#[derive(Clone, Copy)]
pub struct Region<'a> {
    pub scope: &'a VertexSet,
    pub forbidden: &'a VertexSet,
}

impl Region<'_> {
    fn free(&self, partial: &PartialSubdivision) -> VertexSet {
        let mut f = self.scope.minus(self.forbidden);
        f.difference_with(&partial.vertex_set());
        f
    }
}

/// Shortest (2 preferred, else 3) path `x → … → y` with internals in `free`;
/// lowest indices first.
pub fn short_route(t: &Tournament, free: &VertexSet, x: usize, y: usize) -> Option<Vec<usize>> {
    if let Some(z) = t.out(x).first_and3(t.inn(y), free) {
        return Some(vec![z]);
    }
    for a in t.out(x).and(free).iter() {
        if let Some(b) = t.out(a).first_and3(t.inn(y), free) {
            return Some(vec![a, b]);
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapSummary {
    /// Index of the pair still stuck at the fixpoint, if any.
    pub failed: Option<usize>,
    pub swaps: usize,
}

/// Trades vertices of `N⁺(x) ∩ N⁻(y)` on 3-paths to the stuck pair until
/// none is left. Each trade embeds the stuck pair as a 2-path and either
/// re-embeds the displaced pair or makes it the new stuck pair; the count of
/// 2-paths rises every time, so at most `pairs.len()` trades happen.
pub fn maximize_len2(
    t: &Tournament,
    region: Region<'_>,
    partial: &mut PartialSubdivision,
    failed: usize,
) -> SwapSummary {
    let start_l1 = partial.l1();
    let mut failed = failed;
    let mut swaps = 0;
    loop {
        let (x, y) = partial.pairs[failed];
        let owner: HashMap<usize, usize> = partial
            .routes
            .iter()
            .enumerate()
            .filter_map(|(j, r)| r.as_ref().filter(|r| r.len() == 2).map(|r| (j, r)))
            .flat_map(|(j, r)| r.iter().map(move |&v| (v, j)))
            .collect();
        let hit = t
            .out(x)
            .and(t.inn(y))
            .and(region.scope)
            .iter()
            .find_map(|z| owner.get(&z).map(|&j| (j, z)));
        let Some((j, z)) = hit else {
            return SwapSummary {
                failed: Some(failed),
                swaps,
            };
        };

        partial.routes[j] = None;
        partial.routes[failed] = Some(vec![z]);
        swaps += 1;
        assert!(
            swaps <= partial.pairs.len(),
            "2-path count exceeded the number of pairs"
        );
        assert!(partial.l1() >= start_l1 + swaps, "swap did not raise the 2-path count");

        let (u, v) = partial.pairs[j];
        if let Some(r) = short_route(t, &region.free(partial), u, v) {
            partial.routes[j] = Some(r);
            return SwapSummary { failed: None, swaps };
        }
        failed = j;
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("derived cut is unusable: |S| = {source_size}, |U| = {cut_size}, |sink| = {sink_size}, orientation ok: {orientation_ok}")]
pub struct CutInvalid {
    pub source_size: usize,
    pub cut_size: usize,
    pub sink_size: usize,
    pub orientation_ok: bool,
    pub split: Box<CutSplit>,
}

/// `U = V(𝒮) ∪ (N⁻(x) ∖ N⁻(y))`, source `N⁻(y) ∖ U`, sink `N⁺(x) ∖ V(𝒮)`,
/// all inside the region. Accepted only when the sides partition the scope,
/// the source dominates the sink, `|S| ≥ |U| + k` and `|sink| ≥ k`.
pub fn derive_cut(
    t: &Tournament,
    region: Region<'_>,
    partial: &PartialSubdivision,
    failed_edge: (usize, usize),
    k: usize,
) -> Result<CutSplit, CutInvalid> {
    let (x, y) = failed_edge;
    let scope = region.scope;
    let occupied = partial.vertex_set().or(region.forbidden).and(scope);
    let mut cut = t.inn(x).minus(t.inn(y)).and(scope);
    cut.union_with(&occupied);
    let source = t.inn(y).and(scope).minus(&cut);
    let sink = t.out(x).and(scope).minus(&occupied);

    let split = CutSplit { cut, source, sink };
    let orientation_ok = split.is_valid_in(t, scope);
    let (source_size, cut_size, sink_size) = (split.source.len(), split.cut.len(), split.sink.len());
    if orientation_ok && source_size >= cut_size + k && sink_size >= k {
        Ok(split)
    } else {
        Err(CutInvalid {
            source_size,
            cut_size,
            sink_size,
            orientation_ok,
            split: Box::new(split),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DichotomyOutcome {
    /// Enough paths were embedded (`4(ℓ₁+ℓ₂) + 6·slack > m`) or all of them.
    Partial {
        partial: PartialSubdivision,
        failed_edge: Option<(usize, usize)>,
        swaps: usize,
    },
    /// The stuck pair yields a cut with a large source side.
    Cut {
        partial: PartialSubdivision,
        failed_edge: (usize, usize),
        split: CutSplit,
        swaps: usize,
    },
}

/// Host pairs needing a subdivided path when pattern vertex `i` sits on
/// `branch[i]`: the pattern edges whose host edge points the other way.
pub fn reversed_pairs(t: &Tournament, pattern: &PatternDigraph, branch: &[usize]) -> Vec<(usize, usize)> {
    pattern
        .edges
        .iter()
        .map(|&(a, b)| (branch[a], branch[b]))
        .filter(|&(x, y)| !t.beats(x, y))
        .collect()
}

/// Embeds the reversed pairs of `pattern` on the balanced set one at a time;
/// on the first pair that cannot be placed, trades 2-path vertices to a
/// fixpoint and then decides between the partial arm and the cut arm.
pub fn greedy_partial_subdivision(
    t: &Tournament,
    region: Region<'_>,
    balanced: &BalancedSet,
    pattern: &PatternDigraph,
) -> Result<DichotomyOutcome, CutInvalid> {
    let branch = balanced.members.clone();
    let pairs = reversed_pairs(t, pattern, &branch);
    let mut partial = PartialSubdivision::new(t.n(), branch, pairs);
    let mut swaps = 0;
    let mut stuck = None;
    for i in 0..partial.pairs.len() {
        if partial.routes[i].is_some() {
            continue;
        }
        let (x, y) = partial.pairs[i];
        if let Some(r) = short_route(t, &region.free(&partial), x, y) {
            partial.routes[i] = Some(r);
            continue;
        }
        let s = maximize_len2(t, region, &mut partial, i);
        swaps += s.swaps;
        if let Some(f) = s.failed {
            stuck = Some(f);
            break;
        }
    }

    let Some(f) = stuck else {
        return Ok(DichotomyOutcome::Partial {
            partial,
            failed_edge: None,
            swaps,
        });
    };
    let failed_edge = partial.pairs[f];
    let embedded = (partial.l1() + partial.l2()) as f64;
    if 4.0 * embedded + 6.0 * balanced.slack > balanced.m as f64 {
        return Ok(DichotomyOutcome::Partial {
            partial,
            failed_edge: Some(failed_edge),
            swaps,
        });
    }
    let split = derive_cut(t, region, &partial, failed_edge, balanced.members.len())?;
    Ok(DichotomyOutcome::Cut {
        partial,
        failed_edge,
        split,
        swaps,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DichotomyStats {
    pub l1: usize,
    pub l2: usize,
    pub swaps: usize,
}
