//! Tournament representation, generators, degree statistics and the
//! disconnection primitives used by the finders.
//!
//! Vertices are dense `0..n` indices. Both the out- and in-neighbourhood of
//! every vertex are kept as [`VertexSet`] rows; the in-row is the complement
//! of the out-row minus the vertex itself, so orientation is stored once per
//! ordered pair and read back in either direction without recomputation.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bitset::VertexSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TournamentError {
    #[error("rotational tournaments need an odd vertex count, got {0}")]
    EvenRotational(usize),
    #[error("size parameter must be positive")]
    NonPositiveSize,
    #[error("induced subtournament on an empty vertex set")]
    EmptyInduced,
    #[error("vertex {0} is outside the tournament")]
    VertexOutOfRange(usize),
    #[error("malformed tournament file, line {line}: {reason}")]
    Format { line: usize, reason: String },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    out: Vec<VertexSet>,
    inn: Vec<VertexSet>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tournament(n={})", self.n)
    }
}

impl Tournament {
    /// Builds a tournament where `beats(i, j)` decides the orientation of the
    /// pair `{i, j}` for `i < j` (true means `i → j`).
    pub fn from_fn(n: usize, mut beats: impl FnMut(usize, usize) -> bool) -> Self {
        let mut out = vec![VertexSet::new(n); n];
        let mut inn = vec![VertexSet::new(n); n];
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = if beats(i, j) { (i, j) } else { (j, i) };
                out[a].insert(b);
                inn[b].insert(a);
            }
        }
        Self { n, out, inn }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// `true` iff the edge between `u` and `v` is directed `u → v`.
    #[inline]
    pub fn beats(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(v)
    }

    #[inline]
    pub fn out(&self, v: usize) -> &VertexSet {
        &self.out[v]
    }

    #[inline]
    pub fn inn(&self, v: usize) -> &VertexSet {
        &self.inn[v]
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    #[inline]
    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    #[inline]
    pub fn out_degree_in(&self, v: usize, within: &VertexSet) -> usize {
        self.out[v].count_and(within)
    }

    #[inline]
    pub fn in_degree_in(&self, v: usize, within: &VertexSet) -> usize {
        self.inn[v].count_and(within)
    }

    pub fn all(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::new(self.n)
    }

    pub fn min_out_degree(&self) -> usize {
        (0..self.n).map(|v| self.out_degree(v)).min().unwrap_or(0)
    }

    /// `N⁺(X) = ∪_{x∈X} N⁺(x)`.
    pub fn out_of_set(&self, xs: &VertexSet) -> VertexSet {
        let mut acc = self.empty_set();
        for x in xs {
            acc.union_with(&self.out[x]);
        }
        acc
    }

    /// Orientation-preserving induced subtournament with a map back to `self`.
    pub fn induced(&self, s: &VertexSet) -> Result<SubTournament, TournamentError> {
        if s.is_empty() {
            return Err(TournamentError::EmptyInduced);
        }
        let to_parent = s.to_vec();
        if let Some(&v) = to_parent.iter().find(|&&v| v >= self.n) {
            return Err(TournamentError::VertexOutOfRange(v));
        }
        let tournament = Tournament::from_fn(to_parent.len(), |i, j| self.beats(to_parent[i], to_parent[j]));
        Ok(SubTournament { tournament, to_parent })
    }

    /// Writes the `tournament v1` text format.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n + 1) + 16);
        let _ = writeln!(s, "tournament v1");
        let _ = writeln!(s, "{}", self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                s.push(if i == j {
                    '-'
                } else if self.beats(i, j) {
                    '1'
                } else {
                    '0'
                });
            }
            s.push('\n');
        }
        s
    }

    /// Hex SHA-256 of the canonical text form; identifies the host in witnesses.
    pub fn hash_hex(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let out_degrees: Vec<usize> = (0..self.n).map(|v| self.out_degree(v)).collect();
        let in_degrees: Vec<usize> = (0..self.n).map(|v| self.in_degree(v)).collect();
        DegreeProfile {
            min_out: out_degrees.iter().copied().min().unwrap_or(0),
            min_in: in_degrees.iter().copied().min().unwrap_or(0),
            out_degrees,
            in_degrees,
        }
    }
}

impl FromStr for Tournament {
    type Err = TournamentError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bad = |line: usize, reason: &str| TournamentError::Format {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
        match lines.next() {
            Some((_, "tournament v1")) => {}
            _ => return Err(bad(1, "expected header `tournament v1`")),
        }
        let (_, count) = lines.next().ok_or_else(|| bad(2, "missing vertex count"))?;
        let n: usize = count
            .trim()
            .parse()
            .map_err(|_| bad(2, "vertex count is not a non-negative integer"))?;
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(n);
        for (line, row) in lines.by_ref().take(n) {
            let bytes = row.as_bytes().to_vec();
            if bytes.len() != n {
                return Err(bad(line, &format!("expected {n} characters, got {}", bytes.len())));
            }
            rows.push(bytes);
        }
        if rows.len() != n {
            return Err(bad(rows.len() + 3, "too few matrix rows"));
        }
        if lines.any(|(_, l)| !l.trim().is_empty()) {
            return Err(bad(n + 3, "trailing content after matrix"));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                let ok = match (i == j, c) {
                    (true, b'-') => true,
                    (false, b'1') => rows[j][i] == b'0',
                    (false, b'0') => rows[j][i] == b'1',
                    _ => false,
                };
                if !ok {
                    return Err(bad(
                        i + 3,
                        &format!("entry ({i},{j}) breaks the antisymmetric tournament pattern"),
                    ));
                }
            }
        }
        Ok(Tournament::from_fn(n, |i, j| rows[i][j] == b'1'))
    }
}

/// An induced subtournament together with its vertex map into the parent.
#[derive(Clone, Debug)]
pub struct SubTournament {
    pub tournament: Tournament,
    pub to_parent: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub out_degrees: Vec<usize>,
    pub in_degrees: Vec<usize>,
    pub min_out: usize,
    pub min_in: usize,
}

impl DegreeProfile {
    /// `d⁺(v) + d⁻(v) = n − 1` everywhere and `Σ d⁺ = n(n−1)/2`.
    pub fn satisfies_handshake(&self) -> bool {
        let n = self.out_degrees.len();
        let pairs = n * n.saturating_sub(1) / 2;
        self.out_degrees
            .iter()
            .zip(&self.in_degrees)
            .all(|(o, i)| o + i + 1 == n)
            && self.out_degrees.iter().sum::<usize>() == pairs
            && self.in_degrees.iter().sum::<usize>() == pairs
    }
}

/// Tournament families understood by [`generate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Generator {
    /// Uniform over all `2^{n(n-1)/2}` labelled orientations.
    Random { n: usize },
    /// `i → j` for every `i < j`.
    Transitive { n: usize },
    /// `i → i+1, …, i+(n−1)/2 (mod n)`; `n` must be odd.
    Rotational { n: usize },
    /// Three transitive classes `A → B → C → A` of `class_size` vertices each.
    BlowupCyclicTriangle { class_size: usize },
    /// `blocks` cyclic triangles `(aᵢ, bᵢ, cᵢ)` in transitive order, except
    /// `cᵢ₊₁ → aᵢ`, all dominating a uniform random tournament on `tail`
    /// vertices. Branch sets inside one triangle have no short return
    /// paths, which forces cut stages.
    StackedTriangles { blocks: usize, tail: usize },
}

impl Generator {
    pub fn vertex_count(&self) -> usize {
        match *self {
            Generator::Random { n } | Generator::Transitive { n } | Generator::Rotational { n } => n,
            Generator::BlowupCyclicTriangle { class_size } => 3 * class_size,
            Generator::StackedTriangles { blocks, tail } => 3 * blocks + tail,
        }
    }
}

pub fn generate(kind: Generator, seed: u64) -> Result<Tournament, TournamentError> {
    match kind {
        Generator::Random { n } => {
            if n == 0 {
                return Err(TournamentError::NonPositiveSize);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(Tournament::from_fn(n, |_, _| rng.gen_bool(0.5)))
        }
        Generator::Transitive { n } => {
            if n == 0 {
                return Err(TournamentError::NonPositiveSize);
            }
            Ok(Tournament::from_fn(n, |_, _| true))
        }
        Generator::Rotational { n } => {
            if n == 0 {
                return Err(TournamentError::NonPositiveSize);
            }
            if n % 2 == 0 {
                return Err(TournamentError::EvenRotational(n));
            }
            let half = (n - 1) / 2;
            Ok(Tournament::from_fn(n, |i, j| j - i <= half))
        }
        Generator::BlowupCyclicTriangle { class_size } => {
            if class_size == 0 {
                return Err(TournamentError::NonPositiveSize);
            }
            let c = class_size;
            Ok(Tournament::from_fn(3 * c, |i, j| {
                let (ci, cj) = (i / c, j / c);
                if ci == cj {
                    true
                } else {
                    // i < j so (ci, cj) is (0,1), (1,2) or (0,2); C → A reverses the last.
                    !(ci == 0 && cj == 2)
                }
            }))
        }
        Generator::StackedTriangles { blocks, tail } => {
            if blocks + tail == 0 {
                return Err(TournamentError::NonPositiveSize);
            }
            let top = 3 * blocks;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(Tournament::from_fn(top + tail, |i, j| {
                if j >= top {
                    i < top || rng.gen_bool(0.5)
                } else if i / 3 == j / 3 {
                    j - i == 1
                } else {
                    !(i % 3 == 0 && j == i + 5)
                }
            }))
        }
    }
}

/// Convenience for the 3-vertex cyclic tournament `0 → 1 → 2 → 0`.
pub fn cyclic_triangle() -> Tournament {
    generate(Generator::Rotational { n: 3 }, 0).expect("3 is odd")
}

/// `{v : d⁻(v) ≤ ℓ}`; never larger than `2ℓ + 1`.
pub fn low_in_degree_vertices(t: &Tournament, ell: usize) -> VertexSet {
    VertexSet::from_vertices(t.n(), (0..t.n()).filter(|&v| t.in_degree(v) <= ell))
}

/// `{v : d⁺(v) ≤ ℓ}`; never larger than `2ℓ + 1`.
pub fn low_out_degree_vertices(t: &Tournament, ell: usize) -> VertexSet {
    VertexSet::from_vertices(t.n(), (0..t.n()).filter(|&v| t.out_degree(v) <= ell))
}

/// A split of `V ∖ cut` into a source side and a sink side with
/// every crossing edge directed source → sink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSplit {
    pub cut: VertexSet,
    pub source: VertexSet,
    pub sink: VertexSet,
}

impl CutSplit {
    /// Exhaustive check of the partition and orientation properties.
    pub fn is_valid_in(&self, t: &Tournament, ground: &VertexSet) -> bool {
        let union = self.cut.or(&self.source).or(&self.sink);
        let disjoint = !self.cut.intersects(&self.source)
            && !self.cut.intersects(&self.sink)
            && !self.source.intersects(&self.sink);
        disjoint
            && union == *ground
            && !self.source.is_empty()
            && !self.sink.is_empty()
            && self.sink.iter().all(|w| !t.out(w).intersects(&self.source))
    }
}

fn backward_closure(t: &Tournament, start: usize, within: &VertexSet) -> VertexSet {
    let mut reached = VertexSet::from_vertices(t.n(), [start]);
    let mut frontier = vec![start];
    while let Some(u) = frontier.pop() {
        let fresh = t.inn(u).and(within).minus(&reached);
        for w in &fresh {
            frontier.push(w);
        }
        reached.union_with(&fresh);
    }
    reached
}

/// Strong components of `T[within]` listed in condensation order
/// (the first component dominates all later ones).
pub fn strong_components(t: &Tournament, within: &VertexSet) -> Vec<VertexSet> {
    let mut rest = within.clone();
    let mut comps = Vec::new();
    while let Some(top) = top_component(t, &rest) {
        rest.difference_with(&top);
        comps.push(top);
    }
    comps
}

/// The initial strong component of `T[within]`: it contains every vertex of
/// maximum score, and is exactly the set of vertices that reach such a vertex.
fn top_component(t: &Tournament, within: &VertexSet) -> Option<VertexSet> {
    let best = within
        .iter()
        .max_by_key(|&v| (t.out_degree_in(v, within), std::cmp::Reverse(v)))?;
    Some(backward_closure(t, best, within))
}

/// Splits `T ∖ cut` when it is not strongly connected, taking the top strong
/// component as the source.
pub fn split_by_cut(t: &Tournament, cut: &VertexSet) -> Option<CutSplit> {
    split_by_cut_within(t, &t.all(), cut)
}

/// [`split_by_cut`] relative to the subtournament on `ground`.
pub fn split_by_cut_within(t: &Tournament, ground: &VertexSet, cut: &VertexSet) -> Option<CutSplit> {
    let rest = ground.minus(cut);
    if rest.len() < 2 {
        return None;
    }
    let source = top_component(t, &rest)?;
    if source == rest {
        return None;
    }
    let sink = rest.minus(&source);
    Some(CutSplit {
        cut: cut.and(ground),
        source,
        sink,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outs(t: &Tournament) -> Vec<usize> {
        (0..t.n()).map(|v| t.out_degree(v)).collect()
    }

    #[test]
    fn transitive_three_has_scores_two_one_zero() {
        let t = generate(Generator::Transitive { n: 3 }, 0).unwrap();
        assert_eq!(outs(&t), vec![2, 1, 0]);
    }

    #[test]
    fn rotational_is_regular() {
        let t = generate(Generator::Rotational { n: 5 }, 0).unwrap();
        assert!((0..5).all(|v| t.out_degree(v) == 2 && t.in_degree(v) == 2));
        let p = generate(Generator::Rotational { n: 7 }, 0).unwrap().degree_profile();
        assert_eq!((p.min_out, p.min_in), (3, 3));
    }

    #[test]
    fn blowup_degrees_lie_in_window() {
        let t = generate(Generator::BlowupCyclicTriangle { class_size: 4 }, 0).unwrap();
        assert_eq!(t.n(), 12);
        // within-class transitive gives 0..=3, the dominated class gives 4
        for v in 0..12 {
            let d = t.out_degree(v);
            assert!((4..=7).contains(&d), "vertex {v} has out-degree {d}");
        }
        assert!(t.beats(0, 4) && t.beats(4, 8) && t.beats(8, 0));
    }

    #[test]
    fn generator_errors() {
        assert_eq!(
            generate(Generator::Rotational { n: 6 }, 0).unwrap_err(),
            TournamentError::EvenRotational(6)
        );
        assert_eq!(
            generate(Generator::Random { n: 0 }, 0).unwrap_err(),
            TournamentError::NonPositiveSize
        );
        assert!(generate(Generator::BlowupCyclicTriangle { class_size: 0 }, 0).is_err());
    }

    #[test]
    fn stacked_triangles_shape() {
        let t = generate(Generator::StackedTriangles { blocks: 3, tail: 4 }, 1).unwrap();
        assert_eq!(t.n(), 13);
        // each block is a directed triangle
        for b in 0..3 {
            let (a, m, c) = (3 * b, 3 * b + 1, 3 * b + 2);
            assert!(t.beats(a, m) && t.beats(m, c) && t.beats(c, a));
        }
        assert!(t.beats(5, 0) && t.beats(8, 3));
        assert!(t.beats(0, 4) && t.beats(1, 5) && t.beats(0, 8));
        for v in 0..9 {
            for w in 9..13 {
                assert!(t.beats(v, w));
            }
        }
        assert!(t.degree_profile().satisfies_handshake());
    }

    #[test]
    fn random_is_seed_deterministic() {
        let a = generate(Generator::Random { n: 40 }, 9).unwrap();
        let b = generate(Generator::Random { n: 40 }, 9).unwrap();
        let c = generate(Generator::Random { n: 40 }, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn degree_profile_examples() {
        let p = generate(Generator::Transitive { n: 4 }, 0).unwrap().degree_profile();
        assert_eq!((p.min_out, p.min_in), (0, 0));
        let p = generate(Generator::Random { n: 10 }, 1).unwrap().degree_profile();
        assert_eq!(p.out_degrees.iter().sum::<usize>(), 45);
        assert!(p.satisfies_handshake());
    }

    #[test]
    fn low_in_degree_examples() {
        let t = generate(Generator::Transitive { n: 5 }, 0).unwrap();
        let low = low_in_degree_vertices(&t, 1);
        assert_eq!(low.to_vec(), vec![0, 1]);
        let r = generate(Generator::Rotational { n: 7 }, 0).unwrap();
        assert!(low_in_degree_vertices(&r, 2).is_empty());
        let t = generate(Generator::Random { n: 50 }, 7).unwrap();
        let direct = (0..50).filter(|&v| t.in_degree(v) <= 10).count();
        let low = low_in_degree_vertices(&t, 10);
        assert_eq!(low.len(), direct);
        assert!(low.len() <= 21);
    }

    #[test]
    fn split_examples() {
        let tri = cyclic_triangle();
        assert!(split_by_cut(&tri, &tri.empty_set()).is_none());

        let t = generate(Generator::Transitive { n: 3 }, 0).unwrap();
        let split = split_by_cut(&t, &VertexSet::from_vertices(3, [1])).unwrap();
        assert_eq!(split.source.to_vec(), vec![0]);
        assert_eq!(split.sink.to_vec(), vec![2]);
        assert!(split.is_valid_in(&t, &t.all()));

        let b = generate(Generator::BlowupCyclicTriangle { class_size: 2 }, 0).unwrap();
        assert!(split_by_cut(&b, &b.empty_set()).is_none());
    }

    #[test]
    fn strong_components_of_transitive_are_singletons_in_order() {
        let t = generate(Generator::Transitive { n: 4 }, 0).unwrap();
        let comps: Vec<Vec<usize>> = strong_components(&t, &t.all()).iter().map(|c| c.to_vec()).collect();
        assert_eq!(comps, vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn induced_examples() {
        let t = generate(Generator::Transitive { n: 5 }, 0).unwrap();
        let sub = t.induced(&VertexSet::from_vertices(5, [0, 2, 4])).unwrap();
        assert_eq!(sub.tournament, generate(Generator::Transitive { n: 3 }, 0).unwrap());
        assert_eq!(sub.to_parent, vec![0, 2, 4]);
        assert_eq!(t.induced(&t.all()).unwrap().tournament, t);
        assert_eq!(t.induced(&t.empty_set()).unwrap_err(), TournamentError::EmptyInduced);

        // 0→1, 0→2, 1→2 by the rotational rule i → i+1..i+3 (mod 7)
        let r = generate(Generator::Rotational { n: 7 }, 0).unwrap();
        let sub = r.induced(&VertexSet::from_vertices(7, [0, 1, 2])).unwrap();
        assert_eq!(outs(&sub.tournament), vec![2, 1, 0]);
    }

    #[test]
    fn text_round_trip_and_rejects_asymmetric_rows() {
        let t = generate(Generator::Random { n: 9 }, 3).unwrap();
        let parsed: Tournament = t.to_text().parse().unwrap();
        assert_eq!(parsed, t);
        assert_eq!(parsed.hash_hex(), t.hash_hex());

        let bad = "tournament v1\n2\n-1\n1-\n";
        assert!(matches!(bad.parse::<Tournament>(), Err(TournamentError::Format { .. })));
        assert!("tournament v2\n1\n-\n".parse::<Tournament>().is_err());
        assert!("tournament v1\n2\n-1\n".parse::<Tournament>().is_err());
    }
}
