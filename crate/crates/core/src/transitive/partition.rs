use thiserror::Error;

use super::aux::ball_bound;
use crate::bitset::VertexSet;
use crate::tournament::Tournament;

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentPartition {
    /// Kept vertices by non-increasing out-degree, ties by index.
    pub order: Vec<usize>,
    /// Component vertices dropped to bring the kept count down to `m`.
    pub dropped: VertexSet,
    pub m: usize,
    pub a1: VertexSet,
    pub a2: VertexSet,
    /// Components after dropping, indexed by `x_family` and `y_family`.
    pub components: Vec<VertexSet>,
    pub x_family: Vec<usize>,
    pub y_family: Vec<usize>,
    pub x_cap_a1: VertexSet,
    pub y_cap_a2: VertexSet,
}

impl ComponentPartition {
    /// `(1 − 1/(2 ln n))·m/4` for the host size `n`.
    pub fn lower_bound(&self, n: usize) -> f64 {
        (1.0 - 1.0 / (2.0 * (n as f64).ln())) * self.m as f64 / 4.0
    }

    pub fn meets_bounds(&self, n: usize) -> bool {
        let lb = self.lower_bound(n);
        self.x_cap_a1.len() as f64 >= lb && self.y_cap_a2.len() as f64 >= lb
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PartitionError {
    #[error("component of {size} vertices exceeds n/(5 ln n) = {bound:.2}")]
    ComponentTooLarge { size: usize, bound: f64 },
    #[error("partition sides {x} and {y} fall below {bound:.2}")]
    BoundsNotMet { x: usize, y: usize, bound: f64 },
}

/// Splits the components of `G − S` into two families, one heavy on the
/// first half of the out-degree order and one heavy on the second.
///
/// `within` is the host of size `n`; `components` are disjoint subsets of
/// it, each at most `n/(5 ln n)`. If they cover more than
/// `⌈(1 − 1/(5 ln n))n⌉` vertices the lowest out-degree ones are dropped.
pub fn partition_components(
    t: &Tournament,
    within: &VertexSet,
    components: &[VertexSet],
) -> Result<ComponentPartition, PartitionError> {
    let n = within.len();
    let bound = ball_bound(n);
    if let Some(c) = components.iter().find(|c| c.len() as f64 > bound) {
        return Err(PartitionError::ComponentTooLarge { size: c.len(), bound });
    }
    let universe = t.n();
    let mut kept = VertexSet::new(universe);
    for c in components {
        kept.union_with(c);
    }
    let mut order = kept.to_vec();
    order.sort_by_key(|&v| (std::cmp::Reverse(t.out_degree_in(v, within)), v));

    let ln = (n as f64).ln();
    let target = ((1.0 - 1.0 / (5.0 * ln)) * n as f64).ceil() as usize;
    let m = order.len().min(target);
    let dropped = VertexSet::from_vertices(universe, order.drain(m..));
    let comps: Vec<VertexSet> = components
        .iter()
        .map(|c| c.minus(&dropped))
        .filter(|c| !c.is_empty())
        .collect();

    let a1 = VertexSet::from_vertices(universe, order[..m / 2].iter().copied());
    let a2 = VertexSet::from_vertices(universe, order[m / 2..].iter().copied());
    let share1: Vec<usize> = comps.iter().map(|c| c.count_and(&a1)).collect();
    let share2: Vec<usize> = comps.iter().map(|c| c.count_and(&a2)).collect();

    let (mut xf, mut yf): (Vec<usize>, Vec<usize>) = (0..comps.len()).partition(|&i| 2 * share1[i] >= comps[i].len());
    let x1: usize = xf.iter().map(|&i| share1[i]).sum();
    let y2: usize = yf.iter().map(|&i| share2[i]).sum();

    if 4 * x1 < m {
        // grow X by A2-heavy components while its A1 mass stays ≤ m/4
        let mut mass = x1;
        let mut moved = Vec::new();
        for &j in &yf {
            if 4 * (mass + share1[j]) <= m {
                mass += share1[j];
                moved.push(j);
            }
        }
        yf.retain(|j| !moved.contains(j));
        xf.extend(moved);
    } else if 4 * y2 < m {
        let mut mass = y2;
        let mut moved = Vec::new();
        for &j in &xf {
            if 4 * (mass + share2[j]) <= m {
                mass += share2[j];
                moved.push(j);
            }
        }
        xf.retain(|j| !moved.contains(j));
        yf.extend(moved);
    }
    xf.sort_unstable();
    yf.sort_unstable();

    let mut x_cap_a1 = VertexSet::new(universe);
    for &i in &xf {
        x_cap_a1.union_with(&comps[i].and(&a1));
    }
    let mut y_cap_a2 = VertexSet::new(universe);
    for &i in &yf {
        y_cap_a2.union_with(&comps[i].and(&a2));
    }

    let part = ComponentPartition {
        order,
        dropped,
        m,
        a1,
        a2,
        components: comps,
        x_family: xf,
        y_family: yf,
        x_cap_a1,
        y_cap_a2,
    };
    if !part.meets_bounds(n) {
        return Err(PartitionError::BoundsNotMet {
            x: part.x_cap_a1.len(),
            y: part.y_cap_a2.len(),
            bound: part.lower_bound(n),
        });
    }
    Ok(part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tournament::{generate, Generator};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn singletons(n: usize) -> Vec<VertexSet> {
        (0..n).map(|v| VertexSet::from_vertices(n, [v])).collect()
    }

    #[test]
    fn transitive_host_singletons() {
        let n = 400;
        let t = generate(Generator::Transitive { n }, 0).unwrap();
        let p = partition_components(&t, &t.all(), &singletons(n)).unwrap();
        assert!(p.meets_bounds(n));
        assert_eq!(p.order[0], 0);
        // the lowest out-degree vertices are the ones dropped
        assert!(p.dropped.iter().all(|v| v >= p.m));
        assert!(p.x_cap_a1.is_subset(&p.a1) && p.y_cap_a2.is_subset(&p.a2));
    }

    #[test]
    fn components_aligned_with_halves() {
        // in the transitive order, two blocks of small components, one per half
        let n = 600;
        let t = generate(Generator::Transitive { n }, 0).unwrap();
        let comps: Vec<VertexSet> = (0..n / 15)
            .map(|b| VertexSet::from_vertices(n, b * 15..(b + 1) * 15))
            .collect();
        let p = partition_components(&t, &t.all(), &comps).unwrap();
        assert!(p.x_family.iter().all(|&i| p.components[i].first().unwrap() < p.m / 2));
        assert!(p.meets_bounds(n));
    }

    #[test]
    fn oversized_component_is_rejected() {
        let n = 100;
        let t = generate(Generator::Random { n }, 0).unwrap();
        let comps = vec![VertexSet::from_vertices(n, 0..10)];
        assert!(matches!(
            partition_components(&t, &t.all(), &comps),
            Err(PartitionError::ComponentTooLarge { size: 10, .. })
        ));
    }

    #[test]
    fn greedy_branch_on_skewed_components() {
        // A1 is 0..300 and A2 is 300..600; the A1-heavy singletons carry only
        // 100 < m/4 of A1, so A2-heavy components must be moved across
        let n = 700;
        let t = generate(Generator::Transitive { n }, 0).unwrap();
        let mut comps: Vec<VertexSet> = (0..100).map(|v| VertexSet::from_vertices(n, [v])).collect();
        for i in 0..100 {
            let a1 = [100 + 2 * i, 101 + 2 * i];
            let a2 = [300 + 3 * i, 301 + 3 * i, 302 + 3 * i];
            comps.push(VertexSet::from_vertices(n, a1.into_iter().chain(a2)));
        }
        let p = partition_components(&t, &t.all(), &comps).unwrap();
        assert_eq!(p.m, 600);
        assert_eq!(p.x_family.len(), 125);
        assert_eq!(p.x_cap_a1.len(), 150);
        assert_eq!(p.y_cap_a2.len(), 225);
        assert!(p.meets_bounds(n));
    }

    #[test]
    fn randomized_stress_keeps_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for round in 0..200 {
            let n = rng.gen_range(200..700);
            let t = generate(Generator::Random { n }, round).unwrap();
            let cap = ball_bound(n).floor() as usize;
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let removed = rng.gen_range(0..=cap);
            let mut comps = Vec::new();
            let mut rest = &perm[removed..];
            while !rest.is_empty() {
                let s = rng.gen_range(1..=cap.min(rest.len()));
                comps.push(VertexSet::from_vertices(n, rest[..s].iter().copied()));
                rest = &rest[s..];
            }
            let p = partition_components(&t, &t.all(), &comps).unwrap();
            assert!(p.meets_bounds(n), "round {round}");
            let (x, y) = (&p.x_family, &p.y_family);
            assert!(x.iter().all(|i| !y.contains(i)));
            assert_eq!(x.len() + y.len(), p.components.len());
        }
    }
}
