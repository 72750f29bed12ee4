use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::params::FinderParams;
use crate::bitset::VertexSet;
use crate::tournament::Tournament;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum BalancedError {
    #[error("subtournament has {size} vertices, balanced sets need {required:.1}")]
    TooSmall { size: usize, required: f64 },
    #[error("no in-degree window of width {width} holds {k} candidates ({candidates} above the floor {floor})")]
    NoWindow {
        k: usize,
        width: usize,
        floor: usize,
        candidates: usize,
    },
}

/// `k` vertices whose in-degrees clear `deg_floor` and pairwise differ by at
/// most `slack`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancedSet {
    pub members: Vec<usize>,
    /// Smallest member in-degree; every member lies in `[m, m + slack]`.
    pub m: usize,
    pub alpha: f64,
    pub slack: f64,
    pub deg_floor: f64,
}

impl BalancedSet {
    /// Re-checks both defining properties from scratch.
    pub fn holds_in(&self, t: &Tournament, within: &VertexSet) -> bool {
        self.members.iter().all(|&v| {
            let d = t.in_degree_in(v, within) as f64;
            d >= self.deg_floor && d >= self.m as f64 - self.slack && d <= self.m as f64 + self.slack
        })
    }
}

/// Pigeonholes the in-degrees (inside `within`) that clear the floor into
/// consecutive windows of `⌊slack⌋ + 1` integers starting at the floor and
/// returns the `k` lowest-index vertices of the lowest window holding `k`.
pub fn find_balanced_set(
    t: &Tournament,
    within: &VertexSet,
    params: &FinderParams,
) -> Result<BalancedSet, BalancedError> {
    let size = within.len();
    let required = params.balanced_size_floor();
    if (size as f64) < required {
        return Err(BalancedError::TooSmall { size, required });
    }
    let k = params.k;
    let alpha = params.alpha_for(size);
    let deg_floor = params.deg_floor(alpha);
    let floor = deg_floor.ceil().max(0.0) as usize;
    let width = params.slack.floor() as usize + 1;

    let mut buckets: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let mut candidates = 0;
    for v in within {
        let d = t.in_degree_in(v, within);
        if d >= floor {
            candidates += 1;
            buckets.entry((d - floor) / width).or_default().push(v);
        }
    }
    let (_, members) = buckets
        .into_iter()
        .find(|(_, vs)| vs.len() >= k)
        .ok_or(BalancedError::NoWindow {
            k,
            width,
            floor,
            candidates,
        })?;
    let members: Vec<usize> = members.into_iter().take(k).collect();
    let m = members
        .iter()
        .map(|&v| t.in_degree_in(v, within))
        .min()
        .expect("k >= 1");
    Ok(BalancedSet {
        members,
        m,
        alpha,
        slack: params.slack,
        deg_floor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{generate, Generator};

    #[test]
    fn regular_host_gives_degenerate_window() {
        let t = generate(Generator::Rotational { n: 15 }, 0).unwrap();
        let p = FinderParams::scaled(3, 0.08).unwrap();
        let b = find_balanced_set(&t, &t.all(), &p).unwrap();
        assert_eq!(b.members, vec![0, 1, 2]);
        assert_eq!(b.m, 7);
        assert!(b.alpha >= 1.0);
        assert!(b.holds_in(&t, &t.all()));
    }

    #[test]
    fn transitive_ten_is_too_small_at_unit_scale() {
        let t = generate(Generator::Transitive { n: 10 }, 0).unwrap();
        let err = find_balanced_set(&t, &t.all(), &FinderParams::unit(3)).unwrap_err();
        assert!(matches!(err, BalancedError::TooSmall { size: 10, .. }));
    }

    #[test]
    fn random_host_post_hoc_check() {
        let t = generate(Generator::Random { n: 400 }, 2).unwrap();
        let p = FinderParams::scaled(3, 0.125).unwrap();
        let b = find_balanced_set(&t, &t.all(), &p).unwrap();
        let prof = t.degree_profile();
        let degs: Vec<usize> = b.members.iter().map(|&v| prof.in_degrees[v]).collect();
        let (lo, hi) = (*degs.iter().min().unwrap(), *degs.iter().max().unwrap());
        assert_eq!(b.members.len(), 3);
        assert!((hi - lo) as f64 <= p.slack);
        assert!(lo as f64 >= b.deg_floor);
    }

    #[test]
    fn transitive_host_has_no_window_when_slack_is_narrow() {
        // distinct in-degrees, window holds one vertex, k = 3 cannot fit
        let t = generate(Generator::Transitive { n: 60 }, 0).unwrap();
        let p = FinderParams::scaled(3, 0.1).unwrap();
        assert!(matches!(
            find_balanced_set(&t, &t.all(), &p),
            Err(BalancedError::NoWindow { .. })
        ));
    }
}
