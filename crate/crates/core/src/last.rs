//! Light approximate shortest-path trees.
//!
//! An `(alpha, beta)`-LAST rooted at `r` keeps every root distance within
//! `alpha` times the shortest-path distance and weighs at most `beta` times
//! an MST. [`build_last`] walks the MST depth-first, relaxing tree distances
//! along the walk, and splices in the shortest path to any vertex whose
//! distance has stretched past `alpha`. That gives `beta = (alpha+1)/(alpha-1)`.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{minimum_spanning_tree, shortest_path_tree, EdgeId, Graph, VertexId};

/// Absolute slack on both LAST checks.
pub const LAST_SLACK: f64 = 1e-9;

/// Smallest `beta` the construction guarantees for a given `alpha`.
pub fn beta_for(alpha: f64) -> f64 {
    (alpha + 1.0) / (alpha - 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LastTree {
    pub root: VertexId,
    /// Host edge ids, ascending.
    pub edges: Vec<EdgeId>,
    /// Parent vertex and connecting edge; `None` at the root.
    pub parent: Vec<Option<(VertexId, EdgeId)>>,
    /// Distance to the root inside the tree.
    pub tree_dist: Vec<f64>,
}

impl LastTree {
    /// Orients an arbitrary spanning tree of `g` at `root`.
    pub fn from_edges(g: &Graph, root: VertexId, edges: &[EdgeId]) -> Result<Self> {
        let n = g.vertex_count();
        let index = g.edge_index();
        let mut adjacency: Vec<Vec<(VertexId, EdgeId, f64)>> = vec![Vec::new(); n];
        for id in edges {
            let e = index
                .get(id)
                .ok_or_else(|| Error::NotATree(format!("edge {id} not in host graph")))?;
            adjacency[e.u].push((e.v, e.id, e.length));
            adjacency[e.v].push((e.u, e.id, e.length));
        }
        let mut parent = vec![None; n];
        let mut tree_dist = vec![f64::INFINITY; n];
        tree_dist[root] = 0.0;
        let mut queue = VecDeque::from([root]);
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &(w, id, len) in &adjacency[u] {
                if parent[u].map(|(_, pid)| pid) == Some(id) {
                    continue;
                }
                if tree_dist[w].is_finite() {
                    return Err(Error::NotATree(format!("edge {id} closes a cycle")));
                }
                tree_dist[w] = tree_dist[u] + len;
                parent[w] = Some((u, id));
                reached += 1;
                queue.push_back(w);
            }
        }
        if reached != n {
            return Err(Error::NotATree("tree does not span the host graph".into()));
        }
        let mut edges = edges.to_vec();
        edges.sort_unstable();
        edges.dedup();
        Ok(LastTree {
            root,
            edges,
            parent,
            tree_dist,
        })
    }

    pub fn weight(&self, g: &Graph) -> f64 {
        let index = g.edge_index();
        self.edges.iter().map(|id| index[id].length).sum()
    }
}

/// Builds an `(alpha, (alpha+1)/(alpha-1))`-LAST of a connected graph.
pub fn build_last(g: &Graph, root: VertexId, alpha: f64) -> Result<LastTree> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidParameters(format!(
            "LAST needs alpha > 1, got {alpha}"
        )));
    }
    let n = g.vertex_count();
    if n == 1 {
        return LastTree::from_edges(g, root, &[]);
    }
    let sp = shortest_path_tree(g, root);
    let mst = minimum_spanning_tree(g)?;

    let index = g.edge_index();
    let mut children: Vec<Vec<(VertexId, EdgeId, f64)>> = vec![Vec::new(); n];
    for id in &mst {
        let e = index[id];
        children[e.u].push((e.v, e.id, e.length));
        children[e.v].push((e.u, e.id, e.length));
    }
    for list in &mut children {
        list.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.1.cmp(&b.1)));
    }

    let mut dist = vec![f64::INFINITY; n];
    let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    dist[root] = 0.0;

    let relax = |dist: &mut Vec<f64>, parent: &mut Vec<Option<(VertexId, EdgeId)>>, from: VertexId, to: VertexId, id: EdgeId, len: f64| {
        if dist[from] + len < dist[to] {
            dist[to] = dist[from] + len;
            parent[to] = Some((from, id));
        }
    };

    // explicit stack of (vertex, mst parent edge, next child slot)
    let mut stack: Vec<(VertexId, Option<(VertexId, EdgeId, f64)>, usize)> = vec![(root, None, 0)];
    while let Some(frame) = stack.last_mut() {
        let (v, up, slot) = *frame;
        if slot < children[v].len() {
            frame.2 += 1;
            let (w, id, len) = children[v][slot];
            if up.is_some_and(|(p, _, _)| p == w) {
                continue;
            }
            relax(&mut dist, &mut parent, v, w, id, len);
            if dist[w] > alpha * sp.dist[w] {
                // splice in the shortest path until it meets a vertex that is
                // already at its true distance
                let mut x = w;
                while dist[x] > sp.dist[x] {
                    let (p, pid) = sp.pred[x].expect("non-root vertex has a predecessor");
                    dist[x] = sp.dist[x];
                    parent[x] = Some((p, pid));
                    x = p;
                }
            }
            stack.push((w, Some((v, id, len)), 0));
        } else {
            stack.pop();
            if let Some((p, id, len)) = up {
                relax(&mut dist, &mut parent, v, p, id, len);
            }
        }
    }

    let edges: Vec<EdgeId> = parent.iter().flatten().map(|&(_, id)| id).collect();
    LastTree::from_edges(g, root, &edges)
}

#[derive(Clone, Debug, Serialize)]
pub struct LastReport {
    /// Tree distance over graph distance per vertex; 1 at the root.
    pub stretch: Vec<f64>,
    pub max_stretch: f64,
    pub worst_vertex: Option<VertexId>,
    pub weight: f64,
    pub mst_weight: f64,
    pub weight_ratio: f64,
    pub stretch_ok: bool,
    pub weight_ok: bool,
}

impl LastReport {
    pub fn passed(&self) -> bool {
        self.stretch_ok && self.weight_ok
    }
}

/// Checks both LAST properties from scratch. `beta = None` skips the weight
/// check.
pub fn verify_last(g: &Graph, t: &LastTree, alpha: f64, beta: Option<f64>) -> Result<LastReport> {
    let oriented = LastTree::from_edges(g, t.root, &t.edges)?;
    let sp = shortest_path_tree(g, t.root);
    let mut stretch = vec![1.0; g.vertex_count()];
    let mut max_stretch = 1.0;
    let mut worst_vertex = None;
    for v in 0..g.vertex_count() {
        if v == t.root {
            continue;
        }
        let s = oriented.tree_dist[v] / sp.dist[v];
        stretch[v] = s;
        if s > max_stretch {
            max_stretch = s;
            worst_vertex = Some(v);
        }
    }
    let mst = minimum_spanning_tree(g)?;
    let index = g.edge_index();
    let mst_weight: f64 = mst.iter().map(|id| index[id].length).sum();
    let weight = oriented.weight(g);
    let weight_ratio = if mst_weight > 0.0 { weight / mst_weight } else { 1.0 };
    Ok(LastReport {
        stretch,
        max_stretch,
        worst_vertex,
        weight,
        mst_weight,
        weight_ratio,
        stretch_ok: max_stretch <= alpha + LAST_SLACK,
        weight_ok: beta.map_or(true, |b| weight_ratio <= b + LAST_SLACK),
    })
}
