//! Small brute-force references shared by the integration tests. None of
//! these call into the library's algorithms; they work on raw edge lists.
#![allow(dead_code)]

use onetree::graph::Instance;
use rand::seq::SliceRandom;
use rand::Rng;

/// `(u, v, length)` of every edge, indexed by edge id.
pub fn raw_edges(inst: &Instance) -> Vec<(usize, usize, f64)> {
    inst.graph().edges().iter().map(|e| (e.u, e.v, e.length)).collect()
}

/// All-pairs distances.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for &(u, v, l) in edges {
        if l < d[u][v] {
            d[u][v] = l;
            d[v][u] = l;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    p[x] = r;
    r
}

/// Is `subset` (edge ids) a spanning tree of all `n` vertices?
pub fn is_spanning_tree(n: usize, edges: &[(usize, usize, f64)], subset: &[usize]) -> bool {
    if subset.len() + 1 != n {
        return false;
    }
    let mut p: Vec<usize> = (0..n).collect();
    for &id in subset {
        let (u, v, _) = edges[id];
        let (a, b) = (find(&mut p, u), find(&mut p, v));
        if a == b {
            return false;
        }
        p[a] = b;
    }
    true
}

/// Every spanning tree, as ascending edge-id lists, by trying all subsets of
/// size `n - 1`.
pub fn all_spanning_trees(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<usize>> {
    let m = edges.len();
    assert!(m <= 24, "subset enumeration is exponential");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << m) {
        if mask.count_ones() as usize + 1 != n {
            continue;
        }
        let subset: Vec<usize> = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
        if is_spanning_tree(n, edges, &subset) {
            out.push(subset);
        }
    }
    out
}

/// Flow on each tree edge when every vertex sends its demand to `root`.
pub fn tree_flows(
    n: usize,
    edges: &[(usize, usize, f64)],
    tree: &[usize],
    root: usize,
    demand: &[u64],
) -> Vec<(usize, u64)> {
    let mut adj = vec![Vec::new(); n];
    for &id in tree {
        let (u, v, _) = edges[id];
        adj[u].push((v, id));
        adj[v].push((u, id));
    }
    let mut order = vec![root];
    let mut parent_edge = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut k = 0;
    while k < order.len() {
        let u = order[k];
        k += 1;
        for &(w, id) in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = Some((u, id));
                order.push(w);
            }
        }
    }
    let mut sub: Vec<u64> = demand.to_vec();
    let mut flows = Vec::new();
    for &v in order.iter().rev() {
        if let Some((u, id)) = parent_edge[v] {
            flows.push((id, sub[v]));
            sub[u] += sub[v];
        }
    }
    flows.sort();
    flows
}

pub fn demand_vector(inst: &Instance) -> Vec<u64> {
    (0..inst.vertex_count()).map(|v| inst.demand(v)).collect()
}

/// `sum l_e f(x_e)` of a spanning tree given as edge ids.
pub fn tree_cost(inst: &Instance, tree: &[usize], f: impl Fn(f64) -> f64) -> f64 {
    let edges = raw_edges(inst);
    tree_flows(inst.vertex_count(), &edges, tree, inst.root(), &demand_vector(inst))
        .into_iter()
        .map(|(id, x)| edges[id].2 * f(x as f64))
        .sum()
}

/// Minimum of `f` over all spanning trees (graph assumed connected).
pub fn brute_force_optimum(inst: &Instance, f: impl Fn(f64) -> f64) -> f64 {
    let edges = raw_edges(inst);
    all_spanning_trees(inst.vertex_count(), &edges)
        .iter()
        .map(|t| tree_cost(inst, t, &f))
        .fold(f64::INFINITY, f64::min)
}

/// Minimum spanning tree weight by exhaustive search.
pub fn brute_force_mst_weight(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    all_spanning_trees(n, edges)
        .iter()
        .map(|t| t.iter().map(|&id| edges[id].2).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Kruskal, for graphs too large to enumerate.
pub fn kruskal_weight(n: usize, edges: &[(usize, usize, f64)]) -> f64 {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_by(|&a, &b| edges[a].2.total_cmp(&edges[b].2));
    let mut p: Vec<usize> = (0..n).collect();
    let mut w = 0.0;
    for id in order {
        let (u, v, l) = edges[id];
        let (a, b) = (find(&mut p, u), find(&mut p, v));
        if a != b {
            p[a] = b;
            w += l;
        }
    }
    w
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Kruskal over a shuffled edge order: a random spanning tree, ascending ids.
pub fn random_spanning_tree(inst: &Instance, rng: &mut impl Rng) -> Vec<usize> {
    let edges = raw_edges(inst);
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(rng);
    let mut p: Vec<usize> = (0..inst.vertex_count()).collect();
    let mut tree = Vec::new();
    for id in order {
        let (u, v, _) = edges[id];
        let (a, b) = (find(&mut p, u), find(&mut p, v));
        if a != b {
            p[a] = b;
            tree.push(id);
        }
    }
    tree.sort_unstable();
    tree
}
