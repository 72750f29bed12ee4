//! Subdivisions of complete digraphs (and of arbitrary patterns without
//! isolated vertices) in which every edge is subdivided at most twice.

pub mod balanced;
pub mod chain;
pub mod dichotomy;
pub mod matching;
pub mod params;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use balanced::{find_balanced_set, BalancedError, BalancedSet};
pub use chain::{embed_via_cut_chain, minimize_cut, peel_low_outdegree, ChainError, ChainStage, CutChain};
pub use dichotomy::{
    derive_cut, greedy_partial_subdivision, maximize_len2, DichotomyOutcome, PartialSubdivision, Region,
};
pub use matching::{half_matching, HalfMatchOutcome, HalfMatching};
pub use params::FinderParams;

use crate::finder::{FailureTrace, FinderError, Outcome};
use crate::subdivision::{verify, PathWitness, PatternDigraph, Subdivision};
use crate::tournament::Tournament;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalKind {
    /// Two branch vertices closed by a directed triangle (two-vertex patterns).
    Cycle,
    /// The dichotomy returned a partial subdivision.
    Partial,
    /// `k` vertices of low out-degree inside the last sink.
    LowOutDegree,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub stages: usize,
    pub repairs: usize,
    pub swaps: usize,
    pub terminal: Option<TerminalKind>,
}

#[derive(Clone, Debug)]
pub struct CompleteRun {
    pub outcome: Outcome,
    pub chain: CutChain,
    pub stats: RunStats,
}

/// A `TK→_k` in `t` with every path of length at most 3.
///
/// At unit scale the minimum out-degree must reach `2k² + 147k^{7/4}`; at
/// smaller scales the run is best-effort and may end in a [`FailureTrace`].
/// Any returned subdivision has been re-verified against `t`.
pub fn find_complete_subdivision(t: &Tournament, k: usize, params: &FinderParams) -> Result<CompleteRun, FinderError> {
    if k < 2 {
        return Err(FinderError::InvalidK { k, min: 2 });
    }
    let pattern = PatternDigraph::complete(k)?;
    if k == 2 {
        return two_vertex(t, &pattern, "complete");
    }
    if params.is_unit_scale() && (t.min_out_degree() as f64) < params.degree_requirement {
        return Err(FinderError::InfeasibleDegree {
            min_out: t.min_out_degree(),
            required: params.degree_requirement,
        });
    }
    let params = FinderParams { k, ..*params };
    Ok(drive(t, &pattern, &params, "complete"))
}

/// A subdivision of `pattern` with every path of length at most 3. Pattern
/// vertex `i` is placed on the `i`-th smallest branch vertex. At unit scale
/// the minimum out-degree must reach `C·|E(pattern)|` with `C` the
/// configured digraph constant.
pub fn find_digraph_subdivision(
    t: &Tournament,
    pattern: &PatternDigraph,
    params: &FinderParams,
) -> Result<CompleteRun, FinderError> {
    pattern.require_no_isolated()?;
    if pattern.k == 2 {
        return two_vertex(t, pattern, "digraph");
    }
    let mut p = FinderParams::scaled(pattern.k, params.scale)?;
    p.digraph_constant = params.digraph_constant;
    let required = p.digraph_constant * pattern.edges.len() as f64;
    if p.is_unit_scale() && (t.min_out_degree() as f64) < required {
        return Err(FinderError::InfeasibleDegree {
            min_out: t.min_out_degree(),
            required,
        });
    }
    Ok(drive(t, pattern, &p, "digraph"))
}

/// Lowest directed triangle `a → b → c → a`.
fn directed_triangle(t: &Tournament) -> Option<(usize, usize, usize)> {
    (0..t.n()).find_map(|a| {
        t.out(a)
            .iter()
            .find_map(|b| t.out(b).and(t.inn(a)).first().map(|c| (a, b, c)))
    })
}

fn two_vertex(t: &Tournament, pattern: &PatternDigraph, finder: &str) -> Result<CompleteRun, FinderError> {
    let both = pattern.edges.len() == 2;
    let min_out = t.min_out_degree();
    let (branch, paths) = if both {
        if min_out < 1 {
            return Err(FinderError::InfeasibleDegree { min_out, required: 1.0 });
        }
        let (a, b, c) = directed_triangle(t).expect("a tournament without a sink has a directed triangle");
        let branch = vec![a, b];
        let paths = pattern
            .edges
            .iter()
            .map(|&(p, q)| {
                let (x, y) = (branch[p], branch[q]);
                if t.beats(x, y) {
                    PathWitness::direct(x, y)
                } else {
                    PathWitness {
                        from: x,
                        to: y,
                        internals: vec![c],
                    }
                }
            })
            .collect();
        (branch, paths)
    } else {
        let Some(a) = (0..t.n()).find(|&a| !t.out(a).is_empty()) else {
            return Err(FinderError::InfeasibleSize {
                n: t.n(),
                required: 2.0,
            });
        };
        let b = t.out(a).first().expect("non-empty");
        let (p, q) = pattern.edges[0];
        let mut branch = vec![0; 2];
        branch[p] = a;
        branch[q] = b;
        (branch, vec![PathWitness::direct(a, b)])
    };
    let sub = Subdivision {
        pattern: pattern.clone(),
        branch,
        paths,
    };
    assert_sound(t, &sub, finder);
    Ok(CompleteRun {
        outcome: Outcome::Found(sub),
        chain: CutChain::new(t.all()),
        stats: RunStats {
            terminal: Some(TerminalKind::Cycle),
            ..RunStats::default()
        },
    })
}

fn assert_sound(t: &Tournament, sub: &Subdivision, finder: &str) {
    let report = verify(t, sub, 3, None);
    assert!(
        report.is_valid(),
        "{finder} finder produced an invalid subdivision: {:?}",
        report.violations
    );
    assert!(sub.max_internals() <= 2);
}

fn drive(t: &Tournament, pattern: &PatternDigraph, params: &FinderParams, finder: &str) -> CompleteRun {
    let k = pattern.k;
    let mut chain = CutChain::new(t.all());
    let mut stats = RunStats::default();
    let none = t.empty_set();

    let fail = |chain: CutChain, stats: RunStats, trace: FailureTrace| CompleteRun {
        outcome: Outcome::Failed(trace),
        chain,
        stats,
    };

    for stage in 0.. {
        assert!(stage <= t.n(), "nested sinks did not shrink");
        stats.stages = chain.stages.len();
        let ti = chain.terminal.clone();
        let peel = peel_low_outdegree(t, &ti, params.peel_threshold, k);

        if peel.removed.len() == k {
            let mut branch = peel.removed.clone();
            branch.sort_unstable();
            stats.terminal = Some(TerminalKind::LowOutDegree);
            return finish(t, pattern, branch, None, chain, stats, finder, stage);
        }

        let balanced = match find_balanced_set(t, &peel.rest, params) {
            Ok(b) => b,
            Err(e) => {
                let trace = FailureTrace::new(finder, stage, "balanced_set", e.to_string())
                    .with("tournament", ti.len() as f64)
                    .with("peeled", peel.removed.len() as f64)
                    .with("remaining", peel.rest.len() as f64);
                return fail(chain, stats, trace);
            }
        };

        let region = Region {
            scope: &peel.rest,
            forbidden: &none,
        };
        match greedy_partial_subdivision(t, region, &balanced, pattern) {
            Err(e) => {
                let trace = FailureTrace::new(finder, stage, "derive_cut", e.to_string())
                    .with("source", e.source_size as f64)
                    .with("cut", e.cut_size as f64)
                    .with("sink", e.sink_size as f64)
                    .with("m", balanced.m as f64);
                return fail(chain, stats, trace);
            }
            Ok(DichotomyOutcome::Partial { partial, swaps, .. }) => {
                stats.swaps += swaps;
                stats.terminal = Some(TerminalKind::Partial);
                let branch = partial.branch.clone();
                return finish(t, pattern, branch, Some(partial), chain, stats, finder, stage);
            }
            Ok(DichotomyOutcome::Cut { mut split, swaps, .. }) => {
                stats.swaps += swaps;
                for &r in &peel.removed {
                    split.cut.insert(r);
                }
                match minimize_cut(t, &ti, split, k) {
                    Ok(m) => {
                        stats.repairs += m.repairs;
                        chain.push(ChainStage {
                            tournament: ti,
                            cut: m.split.cut,
                            source: m.split.source,
                            peeled: peel.removed,
                            matching: m.matching,
                            repairs: m.repairs,
                        });
                    }
                    Err(e) => {
                        let trace = FailureTrace::new(finder, stage, "minimize_cut", e.to_string());
                        return fail(chain, stats, trace);
                    }
                }
            }
        }
    }
    unreachable!()
}

#[allow(clippy::too_many_arguments)]
fn finish(
    t: &Tournament,
    pattern: &PatternDigraph,
    branch: Vec<usize>,
    partial: Option<PartialSubdivision>,
    chain: CutChain,
    mut stats: RunStats,
    finder: &str,
    stage: usize,
) -> CompleteRun {
    stats.stages = chain.stages.len();
    let mut routes: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    if let Some(p) = &partial {
        for (pair, r) in p.pairs.iter().zip(&p.routes) {
            if let Some(r) = r {
                routes.insert(*pair, r.clone());
            }
        }
    }
    let remaining: Vec<(usize, usize)> = dichotomy::reversed_pairs(t, pattern, &branch)
        .into_iter()
        .filter(|p| !routes.contains_key(p))
        .collect();
    match embed_via_cut_chain(t, &remaining, &chain) {
        Ok(paths) => {
            for p in paths {
                routes.insert((p.from, p.to), p.internals);
            }
        }
        Err(e) => {
            let mut trace = FailureTrace::new(finder, stage, "embed_via_cut_chain", e.to_string())
                .with("remaining_pairs", remaining.len() as f64);
            if let ChainError::InsufficientOutNeighbours { vertex, count, needed } = e {
                trace = trace
                    .with("vertex", vertex as f64)
                    .with("count", count as f64)
                    .with("needed", needed as f64);
            }
            return CompleteRun {
                outcome: Outcome::Failed(trace),
                chain,
                stats,
            };
        }
    }

    let paths = pattern
        .edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (branch[a], branch[b]);
            match routes.get(&(x, y)) {
                Some(r) if !t.beats(x, y) => PathWitness {
                    from: x,
                    to: y,
                    internals: r.clone(),
                },
                _ => PathWitness::direct(x, y),
            }
        })
        .collect();
    let sub = Subdivision {
        pattern: pattern.clone(),
        branch,
        paths,
    };
    assert_sound(t, &sub, finder);
    CompleteRun {
        outcome: Outcome::Found(sub),
        chain,
        stats,
    }
}
