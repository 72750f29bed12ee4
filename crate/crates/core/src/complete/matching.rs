//! Half-matchings: saturate the left side while every right vertex is used at
//! most twice, or return a Hall violator `X` with `|N(X)| < |X|/2`.
//!
//! Each right vertex is duplicated, a maximum matching is computed with
//! Hopcroft–Karp, and on failure the violator is read off the alternating
//! forest grown from an exposed left vertex.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

const NIL: usize = usize::MAX;

/// Maximum bipartite matching. `adj[l]` lists right neighbours of left `l`.
/// Returns `mate_left[l]` (right index or `None`).
pub fn maximum_matching(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut mate_l = vec![NIL; left];
    let mut mate_r = vec![NIL; right];
    let mut dist = vec![0usize; left];

    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        for l in 0..left {
            if mate_l[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = mate_r[r];
                if m == NIL {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut augmented = false;
        for l in 0..left {
            if mate_l[l] == NIL && augment(l, adj, &mut mate_l, &mut mate_r, &mut dist) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    mate_l.into_iter().map(|r| (r != NIL).then_some(r)).collect()
}

fn augment(l: usize, adj: &[Vec<usize>], mate_l: &mut [usize], mate_r: &mut [usize], dist: &mut [usize]) -> bool {
    for &r in &adj[l] {
        let m = mate_r[r];
        if m == NIL || (dist[m] == dist[l] + 1 && augment(m, adj, mate_l, mate_r, dist)) {
            mate_l[l] = r;
            mate_r[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

/// Left vertices reachable from `root` by alternating paths
/// (any edge left→right, matching edge right→left).
fn alternating_reach(adj: &[Vec<usize>], mate_l: &[Option<usize>], right: usize, root: usize) -> Vec<usize> {
    let mut mate_r = vec![NIL; right];
    for (l, r) in mate_l.iter().enumerate() {
        if let Some(r) = r {
            mate_r[*r] = l;
        }
    }
    let mut seen_l = vec![false; adj.len()];
    let mut seen_r = vec![false; right];
    let mut queue = VecDeque::from([root]);
    seen_l[root] = true;
    while let Some(l) = queue.pop_front() {
        for &r in &adj[l] {
            if seen_r[r] {
                continue;
            }
            seen_r[r] = true;
            let m = mate_r[r];
            debug_assert_ne!(m, NIL, "augmenting path left in a maximum matching");
            if m != NIL && !seen_l[m] {
                seen_l[m] = true;
                queue.push_back(m);
            }
        }
    }
    (0..adj.len()).filter(|&l| seen_l[l]).collect()
}

pub type Edges = Vec<(usize, usize)>;

/// Every left vertex appears once; every right vertex at most twice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfMatching {
    pub edges: Vec<(usize, usize)>,
}

impl HalfMatching {
    /// Splits into two proper matchings `M′`, `M″` by sending the second use
    /// of each right vertex to `M″`.
    pub fn split(&self) -> (Edges, Edges) {
        let mut first = Vec::new();
        let mut second = Vec::new();
        let mut used = std::collections::HashSet::new();
        for &(u, v) in &self.edges {
            if used.insert(v) {
                first.push((u, v));
            } else {
                second.push((u, v));
            }
        }
        (first, second)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HalfMatchOutcome {
    Matched(HalfMatching),
    /// `X ⊆ left` with `|N(X)| < |X|/2`.
    Violator(Vec<usize>),
}

/// Half-matching from `left` into `right` over the edges accepted by `adj`.
/// Labels are returned as given.
pub fn half_matching(left: &[usize], right: &[usize], adj: impl Fn(usize, usize) -> bool) -> HalfMatchOutcome {
    let dup: Vec<Vec<usize>> = left
        .iter()
        .map(|&u| {
            right
                .iter()
                .enumerate()
                .filter(|&(_, &v)| adj(u, v))
                .flat_map(|(j, _)| [2 * j, 2 * j + 1])
                .collect()
        })
        .collect();
    let mate = maximum_matching(&dup, 2 * right.len());
    match mate.iter().position(Option::is_none) {
        None => HalfMatchOutcome::Matched(HalfMatching {
            edges: left
                .iter()
                .zip(&mate)
                .map(|(&u, r)| (u, right[r.expect("saturated") / 2]))
                .collect(),
        }),
        Some(root) => HalfMatchOutcome::Violator(
            alternating_reach(&dup, &mate, 2 * right.len(), root)
                .into_iter()
                .map(|l| left[l])
                .collect(),
        ),
    }
}
