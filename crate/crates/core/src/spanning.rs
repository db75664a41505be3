//! Spanning-tree counting (matrix-tree theorem) and exhaustive enumeration.

use crate::graph::{EdgeId, Graph};
use crate::unionfind::DisjointSets;

/// Number of spanning trees via the determinant of the reduced Laplacian.
/// Parallel edges count with multiplicity. Floating point, so an estimate
/// for large graphs.
pub fn spanning_tree_count(g: &Graph) -> f64 {
    let n = g.vertex_count();
    if n <= 1 {
        return 1.0;
    }
    let size = n - 1;
    let mut lap = vec![vec![0.0f64; size]; size];
    for e in g.edges() {
        let (u, v) = (e.u, e.v);
        if u > 0 {
            lap[u - 1][u - 1] += 1.0;
        }
        if v > 0 {
            lap[v - 1][v - 1] += 1.0;
        }
        if u > 0 && v > 0 {
            lap[u - 1][v - 1] -= 1.0;
            lap[v - 1][u - 1] -= 1.0;
        }
    }
    determinant(lap).max(0.0).round()
}

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
            }
        }
    }
    det
}

/// Union-find with rollback, for backtracking.
struct UndoSets {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<usize>,
}

impl UndoSets {
    fn new(n: usize) -> Self {
        UndoSets {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push(rb);
        true
    }

    fn undo(&mut self) {
        let rb = self.history.pop().expect("nothing to undo");
        let ra = self.parent[rb];
        self.size[ra] -= self.size[rb];
        self.parent[rb] = rb;
    }
}

/// Calls `visit` once per spanning tree of `g` with the tree's edge ids in
/// the order of `g.edges()`. A disconnected graph has no spanning trees.
///
/// Include/exclude backtracking; an edge is only excluded when the rest of
/// the graph stays connected, so every branch ends in a tree.
pub fn for_each_spanning_tree(g: &Graph, mut visit: impl FnMut(&[EdgeId])) {
    let n = g.vertex_count();
    if n == 0 {
        return;
    }
    if !g.is_connected() {
        return;
    }
    let mut walker = Walker {
        g,
        sets: UndoSets::new(n),
        chosen: Vec::with_capacity(n.saturating_sub(1)),
        target: n - 1,
    };
    walker.descend(0, &mut visit);
}

struct Walker<'a> {
    g: &'a Graph,
    sets: UndoSets,
    chosen: Vec<usize>,
    target: usize,
}

impl Walker<'_> {
    fn descend(&mut self, k: usize, visit: &mut impl FnMut(&[EdgeId])) {
        if self.chosen.len() == self.target {
            let ids: Vec<EdgeId> = self.chosen.iter().map(|&s| self.g.edges()[s].id).collect();
            visit(&ids);
            return;
        }
        let edges = self.g.edges();
        if k == edges.len() {
            return;
        }
        let e = edges[k];
        if self.sets.union(e.u, e.v) {
            self.chosen.push(k);
            self.descend(k + 1, visit);
            self.chosen.pop();
            self.sets.undo();
        }
        if self.connected_without(k) {
            self.descend(k + 1, visit);
        }
    }

    /// Whether the chosen edges plus `edges[k+1..]` still span the graph.
    fn connected_without(&self, k: usize) -> bool {
        let edges = self.g.edges();
        let n = self.g.vertex_count();
        let mut sets = DisjointSets::new(n);
        let mut components = n;
        for e in self.chosen.iter().map(|&s| &edges[s]).chain(&edges[k + 1..]) {
            if sets.union(e.u, e.v) {
                components -= 1;
                if components == 1 {
                    return true;
                }
            }
        }
        components == 1
    }
}
