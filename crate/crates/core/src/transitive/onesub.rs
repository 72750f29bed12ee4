use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::aux::{ball_decomposition, build_aux_graph_within, BallError};
use super::partition::partition_components;
use super::{greedy_transitive_chain, TransitiveParams};
use crate::bitset::VertexSet;
use crate::exec::Exec;
use crate::finder::{FailureTrace, FinderError, Outcome};
use crate::subdivision::{verify, PathWitness, PatternDigraph, Subdivision};
use crate::tournament::Tournament;

const FINDER: &str = "onesub";

/// Pattern edge and the chain position of its middle vertex.
type Mid = ((usize, usize), usize);

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OneSubStats {
    pub max_depth: usize,
    pub base_cases: usize,
    pub aux_edges: usize,
    pub removed: usize,
    pub cross_pairs: usize,
    /// Smallest `|N⁺(x) ∩ N⁻(y)|` over the cross pairs embedded.
    pub min_common: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct OneSubRun {
    pub outcome: Outcome,
    pub stats: OneSubStats,
}

struct Block {
    branch: Vec<usize>,
    mids: HashMap<(usize, usize), usize>,
    used: VertexSet,
}

/// A 1-subdivision of `T_k`: every pattern edge becomes a path of length
/// exactly 2.
///
/// At unit scale the host needs `10⁷·k²·ln³k` vertices. Scaled runs skip
/// that check and may return a [`FailureTrace`].
pub fn find_one_subdivision(t: &Tournament, k: usize, params: &TransitiveParams) -> Result<OneSubRun, FinderError> {
    if k < 2 {
        return Err(FinderError::InvalidK { k, min: 2 });
    }
    let required = params.onesub_size(k);
    if params.is_unit_scale() && (t.n() as f64) < required {
        return Err(FinderError::InfeasibleSize { n: t.n(), required });
    }
    let pattern = PatternDigraph::transitive(k)?;
    let mut stats = OneSubStats::default();
    let outcome = match embed(t, &t.all(), k, 0, &mut stats) {
        Ok(block) => {
            let paths = pattern
                .edges
                .iter()
                .map(|&(i, j)| PathWitness {
                    from: block.branch[i],
                    to: block.branch[j],
                    internals: vec![block.mids[&(i, j)]],
                })
                .collect();
            let sub = Subdivision {
                pattern,
                branch: block.branch,
                paths,
            };
            let report = verify(t, &sub, 2, Some(2));
            assert!(
                report.is_valid(),
                "onesub finder produced an invalid subdivision: {:?}",
                report.violations
            );
            Outcome::Found(sub)
        }
        Err(trace) => Outcome::Failed(trace.with("required_size", required)),
    };
    Ok(OneSubRun { outcome, stats })
}

fn embed(
    t: &Tournament,
    within: &VertexSet,
    k: usize,
    depth: usize,
    stats: &mut OneSubStats,
) -> Result<Block, FailureTrace> {
    stats.max_depth = stats.max_depth.max(depth);
    let span = k + k * (k - 1) / 2;
    if within.len() < span {
        return Err(
            FailureTrace::new(FINDER, depth, "recursion_size", "sub-tournament smaller than the span")
                .with("size", within.len() as f64)
                .with("k", k as f64),
        );
    }
    if k <= 3 {
        return base_case(t, within, k, depth, stats);
    }

    let threshold = 2 * k * k;
    let aux = build_aux_graph_within(t, within, threshold, Exec::default());
    stats.aux_edges += aux.graph.edge_count();
    let dec = ball_decomposition(&aux.graph).map_err(|e| {
        let BallError::BallTooLarge { x, r, size, bound } = e.clone();
        FailureTrace::new(FINDER, depth, "aux_graph", e.to_string())
            .with("x", x as f64)
            .with("r", r as f64)
            .with("ball", size as f64)
            .with("bound", bound)
    })?;
    stats.removed += dec.removed.len();
    let part = partition_components(t, within, &dec.components)
        .map_err(|e| FailureTrace::new(FINDER, depth, "partition", e.to_string()))?;

    let (k1, k2) = (k.div_ceil(2), k / 2);
    let first = embed(t, &part.x_cap_a1, k1, depth + 1, stats)?;
    let second = embed(t, &part.y_cap_a2, k2, depth + 1, stats)?;

    let mut used = first.used.or(&second.used);
    let mut mids = first.mids;
    for ((i, j), z) in second.mids {
        mids.insert((i + k1, j + k1), z);
    }
    let claim = (threshold - 2) / 2;
    for (i, &x) in first.branch.iter().enumerate() {
        for (j, &y) in second.branch.iter().enumerate() {
            let common = t.out(x).and(t.inn(y)).and(within);
            assert!(
                common.len() >= claim,
                "pair ({x},{y}) across components has {} common vertices, below {claim}",
                common.len()
            );
            stats.min_common = Some(stats.min_common.map_or(common.len(), |m| m.min(common.len())));
            let Some(z) = common.minus(&used).first() else {
                return Err(
                    FailureTrace::new(FINDER, depth, "cross_pairs", "no unused common vertex")
                        .with("x", x as f64)
                        .with("y", y as f64)
                        .with("common", common.len() as f64),
                );
            };
            used.insert(z);
            mids.insert((i, k1 + j), z);
            stats.cross_pairs += 1;
        }
    }
    let mut branch = first.branch;
    branch.extend(second.branch);
    Ok(Block { branch, mids, used })
}

/// Places `T_2` or `T_3` on a greedy transitive chain `c₀ → c₁ → …`.
fn base_case(
    t: &Tournament,
    within: &VertexSet,
    k: usize,
    depth: usize,
    stats: &mut OneSubStats,
) -> Result<Block, FailureTrace> {
    let chain = greedy_transitive_chain(t, within);
    let (positions, mids): (&[usize], &[Mid]) = match k {
        2 => (&[0, 2], &[((0, 1), 1)]),
        3 => (&[0, 2, 5], &[((0, 1), 1), ((0, 2), 3), ((1, 2), 4)]),
        _ => unreachable!("base case is k ≤ 3"),
    };
    let need = positions[positions.len() - 1] + 1;
    if chain.len() < need {
        return Err(
            FailureTrace::new(FINDER, depth, "base_case", "transitive chain too short")
                .with("chain", chain.len() as f64)
                .with("needed", need as f64),
        );
    }
    stats.base_cases += 1;
    Ok(Block {
        branch: positions.iter().map(|&p| chain[p]).collect(),
        mids: mids.iter().map(|&(e, p)| (e, chain[p])).collect(),
        used: VertexSet::from_vertices(t.n(), chain[..need].iter().copied()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{generate, Generator};

    fn scaled(s: f64) -> TransitiveParams {
        TransitiveParams::scaled(s).unwrap()
    }

    #[test]
    fn transitive_six_k3() {
        let t = generate(Generator::Transitive { n: 6 }, 0).unwrap();
        let run = find_one_subdivision(&t, 3, &scaled(1e-6)).unwrap();
        let sub = run.outcome.subdivision().unwrap();
        assert_eq!(sub.branch, vec![0, 2, 5]);
        let mids: Vec<usize> = sub.paths.iter().map(|p| p.internals[0]).collect();
        assert_eq!(mids, vec![1, 3, 4]);
        // every hop goes forward in the order
        assert!(sub
            .paths
            .iter()
            .all(|p| p.from < p.internals[0] && p.internals[0] < p.to));
    }

    #[test]
    fn transitive_three_k2() {
        let t = generate(Generator::Transitive { n: 3 }, 0).unwrap();
        let run = find_one_subdivision(&t, 2, &scaled(1e-6)).unwrap();
        let sub = run.outcome.subdivision().unwrap();
        assert_eq!(sub.branch, vec![0, 2]);
        assert_eq!(sub.paths[0].internals, vec![1]);
    }

    #[test]
    fn cyclic_triangle_is_too_short() {
        let t = generate(Generator::Rotational { n: 3 }, 0).unwrap();
        let run = find_one_subdivision(&t, 2, &scaled(1e-6)).unwrap();
        let Outcome::Failed(trace) = run.outcome else { panic!() };
        assert_eq!(trace.phase, "base_case");
    }

    #[test]
    fn unit_scale_checks_size() {
        let t = generate(Generator::Random { n: 100 }, 0).unwrap();
        assert!(matches!(
            find_one_subdivision(&t, 4, &TransitiveParams::unit()),
            Err(FinderError::InfeasibleSize { .. })
        ));
    }

    #[test]
    fn random_host_k4_recurses() {
        let t = generate(Generator::Random { n: 600 }, 13).unwrap();
        let run = find_one_subdivision(&t, 4, &scaled(1e-6)).unwrap();
        let sub = run.outcome.subdivision().expect("found");
        assert!(verify(&t, sub, 2, Some(2)).is_valid());
        assert_eq!(run.stats.cross_pairs, 4);
        assert!(run.stats.min_common.unwrap() >= 15);
    }
}
