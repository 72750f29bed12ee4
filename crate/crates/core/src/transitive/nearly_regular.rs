use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::VertexSet;
use crate::tournament::Tournament;

pub const RATIO_BOUND: usize = 4;

/// Which inequality chain every member satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioSide {
    /// `d⁻ ≤ d⁺ ≤ C·d⁻`
    OutHeavy,
    /// `d⁺ ≤ d⁻ ≤ C·d⁺`
    InHeavy,
}

impl RatioSide {
    pub fn holds(self, out_deg: usize, in_deg: usize, c: usize) -> bool {
        match self {
            RatioSide::OutHeavy => in_deg <= out_deg && out_deg <= c * in_deg,
            RatioSide::InHeavy => out_deg <= in_deg && in_deg <= c * out_deg,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearlyRegularSet {
    pub members: Vec<usize>,
    pub ratio_bound: usize,
    /// Lowest member in-degree; set only by [`find_nearly_regular_k`], whose
    /// members then lie in `[m, m + 10k)`.
    pub m: Option<usize>,
    pub side: RatioSide,
}

impl NearlyRegularSet {
    pub fn holds_in(&self, t: &Tournament, within: &VertexSet) -> bool {
        self.members.iter().all(|&v| {
            self.side
                .holds(t.out_degree_in(v, within), t.in_degree_in(v, within), self.ratio_bound)
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum NearlyRegularError {
    #[error("need at least {required} vertices, got {size}")]
    TooSmall { size: usize, required: usize },
    #[error("no in-degree window of width {width} holds {k} members of a homogeneous ratio set")]
    NoWindow { k: usize, width: usize },
}

/// Both halves of the ratio set `R`, degrees measured inside `within`.
/// A vertex with `d⁺ = d⁻` lands in both.
pub fn ratio_sides(t: &Tournament, within: &VertexSet) -> (Vec<usize>, Vec<usize>) {
    let mut out_heavy = Vec::new();
    let mut in_heavy = Vec::new();
    for v in within {
        let (o, i) = (t.out_degree_in(v, within), t.in_degree_in(v, within));
        if o == 0 || i == 0 {
            continue;
        }
        if RatioSide::OutHeavy.holds(o, i, RATIO_BOUND) {
            out_heavy.push(v);
        }
        if RatioSide::InHeavy.holds(o, i, RATIO_BOUND) {
            in_heavy.push(v);
        }
    }
    (out_heavy, in_heavy)
}

/// Size of `R = {v : 1 ≤ max(d⁺/d⁻, d⁻/d⁺) ≤ 4}`.
pub fn ratio_set_size(t: &Tournament, within: &VertexSet) -> usize {
    let (a, b) = ratio_sides(t, within);
    let mut r = VertexSet::from_vertices(t.n(), a);
    r.union_with(&VertexSet::from_vertices(t.n(), b));
    r.len()
}

/// The larger side-homogeneous half of the ratio set; at least a tenth of
/// `within`. Panics if `|R| < |within|/5`, which cannot happen.
pub fn find_nearly_regular(t: &Tournament, within: &VertexSet) -> Result<NearlyRegularSet, NearlyRegularError> {
    let n = within.len();
    if n < 10 {
        return Err(NearlyRegularError::TooSmall { size: n, required: 10 });
    }
    let r = ratio_set_size(t, within);
    assert!(5 * r >= n, "ratio set has {r} of {n} vertices");
    let (out_heavy, in_heavy) = ratio_sides(t, within);
    let (members, side) = if out_heavy.len() >= in_heavy.len() {
        (out_heavy, RatioSide::OutHeavy)
    } else {
        (in_heavy, RatioSide::InHeavy)
    };
    debug_assert!(10 * members.len() >= n);
    Ok(NearlyRegularSet {
        members,
        ratio_bound: RATIO_BOUND,
        m: None,
        side,
    })
}

/// `k` members of one homogeneous side whose in-degrees span less than
/// `10k`. Scans a sliding window over the sorted in-degrees of the larger
/// side first, then the other; the lowest qualifying window wins.
pub fn find_nearly_regular_k(
    t: &Tournament,
    within: &VertexSet,
    k: usize,
) -> Result<NearlyRegularSet, NearlyRegularError> {
    let n = within.len();
    if k == 0 || n < 10 * k {
        return Err(NearlyRegularError::TooSmall {
            size: n,
            required: 10 * k.max(1),
        });
    }
    let big = find_nearly_regular(t, within)?;
    let (out_heavy, in_heavy) = ratio_sides(t, within);
    let other = match big.side {
        RatioSide::OutHeavy => (in_heavy, RatioSide::InHeavy),
        RatioSide::InHeavy => (out_heavy, RatioSide::OutHeavy),
    };
    let width = 10 * k;
    for (pool, side) in [(big.members, big.side), other] {
        let mut keyed: Vec<(usize, usize)> = pool.iter().map(|&v| (t.in_degree_in(v, within), v)).collect();
        keyed.sort_unstable();
        if let Some(w) = keyed.windows(k).find(|w| w[k - 1].0 - w[0].0 < width) {
            let mut members: Vec<usize> = w.iter().map(|&(_, v)| v).collect();
            members.sort_unstable();
            return Ok(NearlyRegularSet {
                members,
                ratio_bound: RATIO_BOUND,
                m: Some(w[0].0),
                side,
            });
        }
    }
    Err(NearlyRegularError::NoWindow { k, width })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{generate, Generator};

    #[test]
    fn rotational_is_all_ratio_one() {
        let t = generate(Generator::Rotational { n: 21 }, 0).unwrap();
        assert_eq!(ratio_set_size(&t, &t.all()), 21);
        let s = find_nearly_regular(&t, &t.all()).unwrap();
        assert_eq!(s.members.len(), 21);
        assert!(s.holds_in(&t, &t.all()));
    }

    #[test]
    fn transitive_twenty_keeps_positions_four_to_fifteen() {
        let t = generate(Generator::Transitive { n: 20 }, 0).unwrap();
        // position p has d⁺ = 19 - p, d⁻ = p
        let expect: Vec<usize> = (0..20)
            .filter(|&p| {
                let (o, i) = (19 - p, p);
                i > 0 && o > 0 && ((i <= o && o <= 4 * i) || (o <= i && i <= 4 * o))
            })
            .collect();
        assert_eq!(expect, (4..=15).collect::<Vec<_>>());
        assert_eq!(ratio_set_size(&t, &t.all()), 12);
        let s = find_nearly_regular(&t, &t.all()).unwrap();
        assert_eq!(s.members.len(), 6);
        assert!(s.holds_in(&t, &t.all()));
    }

    #[test]
    fn random_hundred_post_hoc() {
        let t = generate(Generator::Random { n: 100 }, 3).unwrap();
        let s = find_nearly_regular(&t, &t.all()).unwrap();
        assert!(s.members.len() >= 10);
        assert!(s.holds_in(&t, &t.all()));
    }

    #[test]
    fn k_variant_on_rotational() {
        let t = generate(Generator::Rotational { n: 31 }, 0).unwrap();
        let s = find_nearly_regular_k(&t, &t.all(), 3).unwrap();
        assert_eq!(s.members.len(), 3);
        assert_eq!(s.m, Some(15));
    }

    #[test]
    fn k_variant_too_small() {
        let t = generate(Generator::Random { n: 29 }, 1).unwrap();
        assert_eq!(
            find_nearly_regular_k(&t, &t.all(), 3),
            Err(NearlyRegularError::TooSmall { size: 29, required: 30 })
        );
    }

    #[test]
    fn k_variant_window_on_random() {
        let t = generate(Generator::Random { n: 500 }, 4).unwrap();
        let all = t.all();
        let s = find_nearly_regular_k(&t, &all, 5).unwrap();
        let degs: Vec<usize> = s.members.iter().map(|&v| t.in_degree_in(v, &all)).collect();
        let (lo, hi) = (*degs.iter().min().unwrap(), *degs.iter().max().unwrap());
        assert_eq!(s.members.len(), 5);
        assert!(hi - lo < 50);
        assert_eq!(s.m, Some(lo));
        assert!(s.holds_in(&t, &all));
    }

    #[test]
    fn subsets_use_induced_degrees() {
        let t = generate(Generator::Random { n: 80 }, 9).unwrap();
        let within = VertexSet::from_vertices(80, (0..80).filter(|v| v % 3 != 0));
        let s = find_nearly_regular(&t, &within).unwrap();
        assert!(s.members.iter().all(|&v| within.contains(v)));
        assert!(s.holds_in(&t, &within));
    }
}
