use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::nearly_regular::find_nearly_regular_k;
use super::{greedy_transitive_chain, TransitiveParams};
use crate::bitset::VertexSet;
use crate::complete::dichotomy::short_route;
use crate::finder::{FailureTrace, FinderError, Outcome};
use crate::subdivision::{verify, PathWitness, PatternDigraph, Subdivision};
use crate::tournament::Tournament;

const FINDER: &str = "tt3";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TtStats {
    /// Stuck pairs resolved by splitting into common in/out-neighbourhoods.
    pub splits: usize,
    pub max_depth: usize,
    /// Sub-problems answered by a greedy transitive chain instead.
    pub chain_fallbacks: usize,
}

#[derive(Clone, Debug)]
pub struct TtRun {
    pub outcome: Outcome,
    pub stats: TtStats,
}

/// Branch vertices in pattern order plus internals per pattern edge `(i, j)`,
/// `i < j`.
struct Block {
    branch: Vec<usize>,
    routes: HashMap<(usize, usize), Vec<usize>>,
}

impl Block {
    fn chain(prefix: &[usize]) -> Block {
        Block {
            branch: prefix.to_vec(),
            routes: HashMap::new(),
        }
    }
}

/// A subdivision of `T_k` whose paths all have length at most 3.
///
/// At unit scale the host needs `150k²` vertices. Scaled runs skip that
/// check and may return a [`FailureTrace`].
pub fn find_tt_len3(t: &Tournament, k: usize, params: &TransitiveParams) -> Result<TtRun, FinderError> {
    if k < 2 {
        return Err(FinderError::InvalidK { k, min: 2 });
    }
    let required = params.tt3_size(k);
    if params.is_unit_scale() && (t.n() as f64) < required {
        return Err(FinderError::InfeasibleSize { n: t.n(), required });
    }
    let pattern = PatternDigraph::transitive(k)?;
    let mut stats = TtStats::default();
    let outcome = match embed(t, &t.all(), k, 0, &mut stats) {
        Ok(block) => {
            let paths = pattern
                .edges
                .iter()
                .map(|&(i, j)| PathWitness {
                    from: block.branch[i],
                    to: block.branch[j],
                    internals: block.routes.get(&(i, j)).cloned().unwrap_or_default(),
                })
                .collect();
            let sub = Subdivision {
                pattern,
                branch: block.branch,
                paths,
            };
            let report = verify(t, &sub, 3, None);
            assert!(
                report.is_valid(),
                "tt3 finder produced an invalid subdivision: {:?}",
                report.violations
            );
            Outcome::Found(sub)
        }
        Err(trace) => Outcome::Failed(trace.with("required_size", required)),
    };
    Ok(TtRun { outcome, stats })
}

fn embed(
    t: &Tournament,
    within: &VertexSet,
    k: usize,
    depth: usize,
    stats: &mut TtStats,
) -> Result<Block, FailureTrace> {
    stats.max_depth = stats.max_depth.max(depth);
    let size = within.len();
    if size < k {
        return Err(FailureTrace::new(
            FINDER,
            depth,
            "recursion_size",
            "sub-tournament smaller than its target",
        )
        .with("size", size as f64)
        .with("k", k as f64));
    }
    match k {
        0 => return Ok(Block::chain(&[])),
        1 => return Ok(Block::chain(&[within.first().expect("nonempty")])),
        2 => {
            let mut it = within.iter();
            let (a, b) = (it.next().expect("two vertices"), it.next().expect("two vertices"));
            return Ok(Block::chain(&if t.beats(a, b) { [a, b] } else { [b, a] }));
        }
        _ => {}
    }

    let set = match find_nearly_regular_k(t, within, k) {
        Ok(s) => s,
        Err(e) => {
            let chain = greedy_transitive_chain(t, within);
            if chain.len() >= k {
                stats.chain_fallbacks += 1;
                return Ok(Block::chain(&chain[..k]));
            }
            return Err(FailureTrace::new(FINDER, depth, "nearly_regular", e.to_string())
                .with("size", size as f64)
                .with("k", k as f64)
                .with("chain", chain.len() as f64));
        }
    };

    let members = VertexSet::from_vertices(t.n(), set.members.iter().copied());
    let mut sigma = set.members.clone();
    sigma.sort_by_key(|&v| {
        (
            std::cmp::Reverse(t.out_degree_in(v, &members)),
            std::cmp::Reverse(t.out_degree_in(v, within)),
            v,
        )
    });

    let mut free = within.minus(&members);
    let mut routes = HashMap::new();
    for i in 0..k {
        for j in i + 1..k {
            let (x, y) = (sigma[i], sigma[j]);
            if t.beats(x, y) {
                continue;
            }
            match short_route(t, &free, x, y) {
                Some(r) => {
                    for &v in &r {
                        free.remove(v);
                    }
                    routes.insert((i, j), r);
                }
                None => return split(t, &free, k, x, y, depth, stats),
            }
        }
    }
    Ok(Block { branch: sigma, routes })
}

/// No free 2- or 3-path from `x` to `y`, so every edge between the free
/// common out-neighbourhood `A` and common in-neighbourhood `B` runs
/// `B → A`. Solve both sides and put the `B` block first.
fn split(
    t: &Tournament,
    free: &VertexSet,
    k: usize,
    x: usize,
    y: usize,
    depth: usize,
    stats: &mut TtStats,
) -> Result<Block, FailureTrace> {
    stats.splits += 1;
    let a = t.out(x).and(t.out(y)).and(free);
    let b = t.inn(x).and(t.inn(y)).and(free);
    debug_assert!(a.iter().all(|v| t.out(v).and(&b).is_empty()));
    let larger = (3 * k).div_ceil(5);
    let (kb, ka) = if b.len() >= a.len() {
        (larger, k - larger)
    } else {
        (k - larger, larger)
    };
    let first = embed(t, &b, kb, depth + 1, stats)?;
    let second = embed(t, &a, ka, depth + 1, stats)?;

    let mut branch = first.branch;
    let mut routes = first.routes;
    for ((i, j), r) in second.routes {
        routes.insert((i + kb, j + kb), r);
    }
    branch.extend(second.branch);
    Ok(Block { branch, routes })
}
