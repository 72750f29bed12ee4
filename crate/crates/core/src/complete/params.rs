use serde::{Deserialize, Serialize};

use crate::finder::FinderError;

/// `k^{7/4}`, the unit of every slack term in the construction.
pub fn slack_base(k: usize) -> f64 {
    (k as f64).powf(1.75)
}

/// Thresholds of the complete-digraph construction. `scale = 1` reproduces
/// the constants under which success is guaranteed; smaller scales shrink
/// all of them together for desk-size hosts, where only soundness is kept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinderParams {
    pub k: usize,
    pub scale: f64,
    /// Width of the in-degree window: `scale · k^{7/4}`.
    pub slack: f64,
    /// A vertex is peeled while its out-degree is below this:
    /// `scale · (k² + 12k^{7/4})`.
    pub peel_threshold: f64,
    /// Required minimum out-degree: `scale · (2k² + 147k^{7/4})`.
    pub degree_requirement: f64,
    /// Constant `C` of the general-pattern driver (`δ⁺ ≥ C·|E(D)|`). Not
    /// fixed by the construction; 150 is an arbitrary default.
    pub digraph_constant: f64,
}

pub const DEFAULT_DIGRAPH_CONSTANT: f64 = 150.0;

impl FinderParams {
    pub fn unit(k: usize) -> Self {
        Self::scaled(k, 1.0).expect("unit scale is valid")
    }

    pub fn scaled(k: usize, scale: f64) -> Result<Self, FinderError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(FinderError::InvalidScale(scale));
        }
        let kf = k as f64;
        let base = slack_base(k);
        Ok(Self {
            k,
            scale,
            slack: scale * base,
            peel_threshold: scale * (kf * kf + 12.0 * base),
            degree_requirement: scale * (2.0 * kf * kf + 147.0 * base),
            digraph_constant: DEFAULT_DIGRAPH_CONSTANT,
        })
    }

    pub fn is_unit_scale(&self) -> bool {
        self.scale == 1.0
    }

    /// Smallest host on which the balanced-set construction applies with `α ≥ 1`:
    /// `scale · (2k² + 24k^{7/4})`.
    pub fn balanced_size_floor(&self) -> f64 {
        let kf = self.k as f64;
        self.scale * (2.0 * kf * kf + 24.0 * slack_base(self.k))
    }

    /// `α` solving `size = scale · (2αk² + (20α + 4)k^{7/4})`.
    pub fn alpha_for(&self, size: usize) -> f64 {
        let kf = self.k as f64;
        let base = slack_base(self.k);
        (size as f64 / self.scale - 4.0 * base) / (2.0 * kf * kf + 20.0 * base)
    }

    /// Minimum in-degree for branch candidates: `scale · (αk² + 2k^{7/4})`.
    pub fn deg_floor(&self, alpha: f64) -> f64 {
        let kf = self.k as f64;
        self.scale * (alpha * kf * kf + 2.0 * slack_base(self.k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_constants_for_k3() {
        let p = FinderParams::unit(3);
        let base = 3f64.powf(1.75);
        assert!((p.slack - base).abs() < 1e-12);
        assert!((p.degree_requirement - (18.0 + 147.0 * base)).abs() < 1e-9);
        assert!((p.peel_threshold - (9.0 + 12.0 * base)).abs() < 1e-9);
        // α solves the size equation exactly
        let size = 2000;
        let a = p.alpha_for(size);
        let back = 2.0 * a * 9.0 + (20.0 * a + 4.0) * base;
        assert!((back - size as f64).abs() < 1e-9);
    }

    #[test]
    fn scale_shrinks_everything_together() {
        let p = FinderParams::unit(4);
        let q = FinderParams::scaled(4, 0.125).unwrap();
        assert!((q.slack * 8.0 - p.slack).abs() < 1e-9);
        assert!((q.degree_requirement * 8.0 - p.degree_requirement).abs() < 1e-9);
        assert!((q.balanced_size_floor() * 8.0 - p.balanced_size_floor()).abs() < 1e-9);
        assert!(FinderParams::scaled(4, 0.0).is_err());
        assert!(FinderParams::scaled(4, f64::NAN).is_err());
    }

    #[test]
    fn alpha_at_size_floor_is_one() {
        let p = FinderParams::scaled(5, 0.5).unwrap();
        let floor = p.balanced_size_floor();
        // alpha_for is affine in size; at the floor it equals 1
        let kf = 25.0;
        let base = slack_base(5);
        let exact = (floor / 0.5 - 4.0 * base) / (2.0 * kf + 20.0 * base);
        assert!((exact - 1.0).abs() < 1e-12);
    }
}
