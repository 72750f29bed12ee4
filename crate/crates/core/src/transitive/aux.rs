use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::VertexSet;
use crate::exec::Exec;
use crate::tournament::Tournament;

/// Simple undirected graph on a subset of `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UGraph {
    vertices: VertexSet,
    adj: Vec<VertexSet>,
}

impl UGraph {
    pub fn new(vertices: VertexSet) -> Self {
        let u = vertices.universe();
        Self {
            adj: vec![VertexSet::new(u); u],
            vertices,
        }
    }

    /// Graph on `0..n` with the given edges.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(VertexSet::full(n));
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b && self.vertices.contains(a) && self.vertices.contains(b));
        self.adj[a].insert(b);
        self.adj[b].insert(a);
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn neighbours(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.iter().map(|v| self.adj[v].len()).sum::<usize>() / 2
    }

    /// Vertices reachable from `x` inside `alive`, as BFS levels.
    pub fn bfs_levels(&self, x: usize, alive: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::from_vertices(alive.universe(), [x]);
        let mut levels = vec![seen.clone()];
        loop {
            let mut next = VertexSet::new(alive.universe());
            for v in levels.last().expect("nonempty") {
                next.union_with(&self.adj[v]);
            }
            next.intersect_with(alive);
            next.difference_with(&seen);
            if next.is_empty() {
                return levels;
            }
            seen.union_with(&next);
            levels.push(next);
        }
    }

    /// Connected components of the subgraph induced on `alive`, ordered by
    /// smallest vertex.
    pub fn components_within(&self, alive: &VertexSet) -> Vec<VertexSet> {
        let mut left = alive.clone();
        let mut out = Vec::new();
        while let Some(x) = left.first() {
            let mut comp = VertexSet::new(alive.universe());
            for level in self.bfs_levels(x, &left) {
                comp.union_with(&level);
            }
            left.difference_with(&comp);
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<VertexSet> {
        self.components_within(&self.vertices)
    }
}

/// `x ∼ y` iff `|N⁺(x) Δ N⁺(y)| < threshold`, neighbourhoods taken inside
/// the vertex set of the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxGraph {
    pub graph: UGraph,
    pub threshold: usize,
}

/// Auxiliary graph on all of `t` with threshold `2k²`.
pub fn build_aux_graph(t: &Tournament, k: usize) -> AuxGraph {
    build_aux_graph_within(t, &t.all(), 2 * k * k, Exec::default())
}

pub fn build_aux_graph_within(t: &Tournament, within: &VertexSet, threshold: usize, exec: Exec) -> AuxGraph {
    let verts = within.to_vec();
    let outs: Vec<VertexSet> = verts.iter().map(|&v| t.out(v).and(within)).collect();
    let rows: Vec<Vec<usize>> = exec.map(&(0..verts.len()).collect::<Vec<_>>(), |&i| {
        (i + 1..verts.len())
            .filter(|&j| outs[i].count_xor(&outs[j]) < threshold)
            .collect()
    });
    let mut graph = UGraph::new(within.clone());
    for (i, row) in rows.into_iter().enumerate() {
        for j in row {
            graph.add_edge(verts[i], verts[j]);
        }
    }
    AuxGraph { graph, threshold }
}

/// `n / (5 ln n)`, the size cap for balls, components and the removed set.
pub fn ball_bound(n: usize) -> f64 {
    n as f64 / (5.0 * (n as f64).ln())
}

/// `10 ln² n`, the largest radius the ball condition constrains.
pub fn ball_radius_cap(n: usize) -> f64 {
    10.0 * (n as f64).ln().powi(2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallDecomposition {
    pub removed: VertexSet,
    pub components: Vec<VertexSet>,
}

impl BallDecomposition {
    pub fn largest_component(&self) -> usize {
        self.components.iter().map(VertexSet::len).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Serialize, Deserialize)]
pub enum BallError {
    #[error("ball of radius {r} around {x} has {size} vertices, above {bound:.2}")]
    BallTooLarge {
        x: usize,
        r: usize,
        size: usize,
        bound: f64,
    },
}

/// Removes BFS levels until every component has at most `n/(5 ln n)`
/// vertices. From the lowest vertex `x` of an oversized component the first
/// level `L_j` with `5 ln n · |L_j| < |B_{j-1}(x)|` is cut out.
pub fn ball_decomposition(g: &UGraph) -> Result<BallDecomposition, BallError> {
    let n = g.order();
    let bound = ball_bound(n);
    let factor = 5.0 * (n as f64).ln();
    let mut alive = g.vertices().clone();
    let mut removed = VertexSet::new(alive.universe());
    let oversized = |c: &VertexSet| c.len() as f64 > bound;
    let keyed = |c: VertexSet| (c.first().expect("nonempty"), c);
    let mut queue: BTreeMap<usize, VertexSet> = g
        .components_within(&alive)
        .into_iter()
        .filter(oversized)
        .map(keyed)
        .collect();

    while let Some((x, comp)) = queue.pop_first() {
        let mut seen = VertexSet::from_vertices(comp.universe(), [x]);
        let mut frontier = seen.clone();
        let mut ball = 1usize;
        let mut r = 0;
        let level = loop {
            let mut next = VertexSet::new(comp.universe());
            for v in &frontier {
                next.union_with(&g.adj[v]);
            }
            next.intersect_with(&comp);
            next.difference_with(&seen);
            r += 1;
            assert!(!next.is_empty(), "oversized component has a sparse level");
            if factor * (next.len() as f64) < ball as f64 {
                break next;
            }
            ball += next.len();
            if ball as f64 > bound {
                return Err(BallError::BallTooLarge {
                    x,
                    r,
                    size: ball,
                    bound,
                });
            }
            seen.union_with(&next);
            frontier = next;
        };
        removed.union_with(&level);
        alive.difference_with(&level);
        let rest = comp.minus(&level).minus(&seen);
        queue.extend(g.components_within(&rest).into_iter().filter(oversized).map(keyed));
    }

    let components = g.components_within(&alive);
    Ok(BallDecomposition { removed, components })
}
