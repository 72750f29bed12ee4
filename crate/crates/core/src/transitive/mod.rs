//! Subdivisions of transitive tournaments: paths of length at most 3, and
//! 1-subdivisions.

pub mod aux;
pub mod nearly_regular;
pub mod onesub;
pub mod partition;
pub mod tt3;

use serde::{Deserialize, Serialize};

pub use aux::{ball_decomposition, build_aux_graph, AuxGraph, BallDecomposition, BallError, UGraph};
pub use nearly_regular::{find_nearly_regular, find_nearly_regular_k, NearlyRegularSet, RatioSide};
pub use onesub::{find_one_subdivision, OneSubRun};
pub use partition::{partition_components, ComponentPartition};
pub use tt3::{find_tt_len3, TtRun};

use crate::bitset::VertexSet;
use crate::finder::FinderError;
use crate::tournament::Tournament;

pub const TT3_CONSTANT: f64 = 150.0;
pub const ONESUB_CONSTANT: f64 = 1e7;

/// Size requirements of both constructions, multiplied by `scale`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitiveParams {
    pub scale: f64,
}

impl TransitiveParams {
    pub fn unit() -> Self {
        Self { scale: 1.0 }
    }

    pub fn scaled(scale: f64) -> Result<Self, FinderError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(FinderError::InvalidScale(scale));
        }
        Ok(Self { scale })
    }

    pub fn is_unit_scale(&self) -> bool {
        self.scale == 1.0
    }

    /// `scale · 150k²`
    pub fn tt3_size(&self, k: usize) -> f64 {
        self.scale * TT3_CONSTANT * (k * k) as f64
    }

    /// `scale · 10⁷k² ln³k`
    pub fn onesub_size(&self, k: usize) -> f64 {
        self.scale * ONESUB_CONSTANT * (k * k) as f64 * (k as f64).ln().powi(3)
    }
}

/// Repeatedly takes the vertex of largest out-degree (lowest index on ties)
/// and restricts to its out-neighbourhood. The result is transitive in the
/// order returned and has at least `log₂|within|` vertices.
pub fn greedy_transitive_chain(t: &Tournament, within: &VertexSet) -> Vec<usize> {
    let mut rest = within.clone();
    let mut chain = Vec::new();
    while !rest.is_empty() {
        let v = rest
            .iter()
            .max_by_key(|&v| (t.out_degree_in(v, &rest), std::cmp::Reverse(v)))
            .expect("nonempty");
        chain.push(v);
        rest = t.out(v).and(&rest);
    }
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{generate, Generator};

    #[test]
    fn chain_is_transitive_and_long() {
        for seed in 0..10 {
            let t = generate(Generator::Random { n: 300 }, seed).unwrap();
            let c = greedy_transitive_chain(&t, &t.all());
            assert!(c.len() as f64 >= (300f64).log2().floor());
            for i in 0..c.len() {
                for j in i + 1..c.len() {
                    assert!(t.beats(c[i], c[j]));
                }
            }
        }
    }

    #[test]
    fn size_requirements() {
        let p = TransitiveParams::unit();
        assert_eq!(p.tt3_size(4), 2400.0);
        let want = 1e7 * 9.0 * 3f64.ln().powi(3);
        assert!((p.onesub_size(3) - want).abs() < 1e-3);
        assert!(TransitiveParams::scaled(-1.0).is_err());
    }
}
