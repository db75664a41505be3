//! Routed trees, basis-function costs and the rent/buy split of a tree at a
//! threshold.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Instance, VertexId, VertexSet};

/// Relative slack on the `x_e >= M` test, absorbing rounding in `(1+eps)^i`.
pub const THRESHOLD_SLACK: f64 = 1e-12;

/// The `i`-th grid threshold `(1+eps)^i`.
pub fn threshold(i: usize, eps: f64) -> f64 {
    (1.0 + eps).powi(i as i32)
}

fn is_bought(flow: u64, m: f64) -> bool {
    flow as f64 >= m - THRESHOLD_SLACK * m
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RoutedEdge {
    pub id: EdgeId,
    /// Endpoint closer to the root.
    pub parent: VertexId,
    pub child: VertexId,
    pub length: f64,
    /// Demand units crossing the edge toward the root.
    pub flow: u64,
}

/// A tree containing the root and every demand vertex, with the flow
/// induced by sending all demand to the root.
#[derive(Clone, Debug, PartialEq)]
pub struct RoutedTree {
    root: VertexId,
    edges: Vec<RoutedEdge>,
}

impl RoutedTree {
    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Edges in ascending id order.
    pub fn edges(&self) -> &[RoutedEdge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&RoutedEdge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|k| &self.edges[k])
    }

    pub fn flow(&self, id: EdgeId) -> Option<u64> {
        self.edge(id).map(|e| e.flow)
    }

    pub fn vertices(&self) -> VertexSet {
        let mut vs = VertexSet::from([self.root]);
        for e in &self.edges {
            vs.insert(e.parent);
            vs.insert(e.child);
        }
        vs
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// `sum_e l_e * min(x_e, m)`.
    pub fn basis_cost(&self, m: f64) -> f64 {
        self.cost_by(|x| x.min(m))
    }

    /// `sum_e l_e * f(x_e)` for an arbitrary per-edge cost function.
    pub fn cost_by(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.flow > 0)
            .map(|e| e.length * f(e.flow as f64))
            .sum()
    }

    /// `basis_cost` restricted to the edges accepted by `keep`.
    pub fn basis_cost_where(&self, m: f64, keep: impl Fn(EdgeId) -> bool) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.flow > 0 && keep(e.id))
            .map(|e| e.length * (e.flow as f64).min(m))
            .sum()
    }

    /// Rent/buy split at threshold index `i` on the `(1+eps)^i` grid.
    pub fn decompose(&self, i: usize, eps: f64) -> RentBuyDecomposition {
        self.decompose_at(i, threshold(i, eps))
    }

    pub fn decompose_at(&self, index: usize, m: f64) -> RentBuyDecomposition {
        let mut bought = Vec::new();
        let mut rent = 0.0;
        let mut buy = 0.0;
        let mut core = VertexSet::from([self.root]);
        for e in &self.edges {
            if is_bought(e.flow, m) {
                bought.push(e.id);
                buy += e.length;
                core.insert(e.parent);
                core.insert(e.child);
            } else {
                rent += e.length * e.flow as f64;
            }
        }
        RentBuyDecomposition {
            index,
            threshold: m,
            bought,
            rent,
            buy,
            core,
        }
    }
}

/// Rent cost, normalized buy cost and core of a routed tree at one
/// threshold. Edges with `x_e >= M` are bought; the rest are rented.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RentBuyDecomposition {
    pub index: usize,
    pub threshold: f64,
    pub bought: Vec<EdgeId>,
    /// Flow-weighted length of the rented edges.
    pub rent: f64,
    /// Unweighted length of the bought edges.
    pub buy: f64,
    /// The root plus every endpoint of a bought edge.
    pub core: VertexSet,
}

impl RentBuyDecomposition {
    /// `R + M * B`, equal to the tree's basis cost at this threshold.
    pub fn total(&self) -> f64 {
        self.rent + self.threshold * self.buy
    }

    pub fn periphery<'a>(&'a self, inst: &'a Instance) -> impl Iterator<Item = VertexId> + 'a {
        (0..inst.vertex_count()).filter(move |v| !self.core.contains(v))
    }
}

/// Orients `edges` away from the root and accumulates demand leaf-to-root.
pub fn route(inst: &Instance, edges: &[EdgeId]) -> Result<RoutedTree> {
    let ids: BTreeSet<EdgeId> = edges.iter().copied().collect();
    let n = inst.vertex_count();
    let m = inst.graph().edge_count();
    let mut adjacency: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for &id in &ids {
        if id >= m {
            return Err(Error::NotATree(format!("unknown edge id {id}")));
        }
        let e = inst.edge(id);
        adjacency[e.u].push(id);
        adjacency[e.v].push(id);
    }

    let root = inst.root();
    let mut parent_edge: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &id in &adjacency[u] {
            if parent_edge[u] == Some(id) {
                continue;
            }
            let w = inst.edge(id).other(u);
            if seen[w] {
                return Err(Error::NotATree(format!("edge {id} closes a cycle")));
            }
            seen[w] = true;
            parent_edge[w] = Some(id);
            queue.push_back(w);
        }
    }

    if order.len() != ids.len() + 1 {
        return Err(Error::NotATree(
            "some edges are not connected to the root".into(),
        ));
    }
    if let Some(&v) = inst.demands().keys().find(|&&v| !seen[v]) {
        return Err(Error::NotATree(format!("demand vertex {v} is not spanned")));
    }

    let mut subtree: Vec<u64> = (0..n).map(|v| inst.demand(v)).collect();
    let mut routed = Vec::with_capacity(ids.len());
    for &v in order.iter().rev() {
        if let Some(id) = parent_edge[v] {
            let e = inst.edge(id);
            let p = e.other(v);
            subtree[p] += subtree[v];
            routed.push(RoutedEdge {
                id,
                parent: p,
                child: v,
                length: e.length,
                flow: subtree[v],
            });
        }
    }
    routed.sort_by_key(|e| e.id);
    Ok(RoutedTree {
        root,
        edges: routed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Instance {
        Instance::new(3, &[(0, 1, 1.0), (1, 2, 1.0)], 0, &[(1, 1), (2, 1)]).unwrap()
    }

    #[test]
    fn routes_path() {
        let t = route(&path3(), &[0, 1]).unwrap();
        assert_eq!(t.flow(0), Some(2));
        assert_eq!(t.flow(1), Some(1));
        assert_eq!(t.edge(1).unwrap().parent, 1);
    }

    #[test]
    fn routes_star() {
        let inst = Instance::new(
            4,
            &[(0, 1, 1.0), (0, 2, 2.0), (0, 3, 3.0)],
            0,
            &[(1, 1), (2, 1), (3, 1)],
        )
        .unwrap();
        let t = route(&inst, &[0, 1, 2]).unwrap();
        assert!(t.edges().iter().all(|e| e.flow == 1));
    }

    #[test]
    fn steiner_branch_carries_no_flow() {
        let inst = Instance::new(4, &[(0, 1, 1.0), (1, 2, 1.0), (1, 3, 7.0)], 0, &[(2, 1)]).unwrap();
        let t = route(&inst, &[0, 1, 2]).unwrap();
        assert_eq!(t.flow(2), Some(0));
        assert_eq!(t.basis_cost(1.0), 2.0);
        assert_eq!(t.basis_cost(100.0), 2.0);
    }

    #[test]
    fn rejects_cycles_and_missing_demand() {
        let inst = Instance::new(
            3,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)],
            0,
            &[(1, 1), (2, 1)],
        )
        .unwrap();
        assert!(matches!(route(&inst, &[0, 1, 2]), Err(Error::NotATree(_))));
        assert!(matches!(route(&inst, &[0]), Err(Error::NotATree(_))));
        let ok = route(&inst, &[0, 2]).unwrap();
        assert_eq!(ok.flow(2), Some(1));
    }

    #[test]
    fn rejects_detached_edges() {
        let inst = Instance::new(4, &[(0, 1, 1.0), (2, 3, 1.0)], 0, &[(1, 1)]).unwrap();
        assert!(route(&inst, &[0, 1]).is_err());
    }

    #[test]
    fn basis_costs_on_path() {
        let t = route(&path3(), &[0, 1]).unwrap();
        assert_eq!(t.basis_cost(1.0), 2.0);
        assert_eq!(t.basis_cost(2.0), 3.0);
        assert_eq!(t.basis_cost(50.0), 3.0);
    }

    #[test]
    fn decompose_path_at_both_thresholds() {
        let t = route(&path3(), &[0, 1]).unwrap();
        let d1 = t.decompose(1, 1.0);
        assert_eq!(d1.threshold, 2.0);
        assert_eq!(d1.bought, vec![0]);
        assert_eq!((d1.buy, d1.rent), (1.0, 1.0));
        assert_eq!(d1.core, VertexSet::from([0, 1]));

        let d0 = t.decompose(0, 1.0);
        assert_eq!(d0.bought, vec![0, 1]);
        assert_eq!((d0.buy, d0.rent), (2.0, 0.0));
        assert_eq!(d0.core, VertexSet::from([0, 1, 2]));
        assert_eq!(d0.periphery(&path3()).count(), 0);
    }

    #[test]
    fn flow_equal_to_threshold_is_bought() {
        let t = route(&path3(), &[0, 1]).unwrap();
        let d = t.decompose_at(0, 2.0);
        assert_eq!(d.bought, vec![0]);
    }

    #[test]
    fn zero_flow_edge_is_rented_for_free() {
        let inst = Instance::new(3, &[(0, 1, 1.0), (0, 2, 4.0)], 0, &[(1, 1)]).unwrap();
        let t = route(&inst, &[0, 1]).unwrap();
        let d = t.decompose(0, 0.5);
        assert_eq!(d.bought, vec![0]);
        assert_eq!(d.rent, 0.0);
        assert!(!d.core.contains(&2));
    }
}
