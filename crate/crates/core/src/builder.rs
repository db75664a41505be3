//! Stitches the layer cores into one tree, innermost layer first, by
//! connecting each core to the contracted tree-so-far with a LAST.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluate::Parameters;
use crate::graph::{contract_within, EdgeId, Instance, VertexSet};
use crate::last::{build_last, verify_last};
use crate::layers::LayerSet;
use crate::routing::{route, threshold, RoutedTree};

/// Relative slack on the per-layer bounds.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct LayerRound {
    pub index: usize,
    /// Edges this round added, ascending.
    pub added: Vec<EdgeId>,
    /// The whole tree after this round (`T_B` for this index), ascending.
    pub snapshot: Vec<EdgeId>,
    pub host_vertices: usize,
    pub host_edges: usize,
    pub last_max_stretch: f64,
    pub last_weight_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct SimultaneousTree {
    pub tree: RoutedTree,
    /// Rounds in build order, i.e. decreasing layer index.
    pub rounds: Vec<LayerRound>,
}

impl SimultaneousTree {
    fn round(&self, i: usize) -> Option<&LayerRound> {
        self.rounds.iter().find(|r| r.index == i)
    }

    /// Edges present once layer `i` has been connected.
    pub fn buy_part(&self, i: usize) -> Option<&[EdgeId]> {
        self.round(i).map(|r| r.snapshot.as_slice())
    }

    /// Edges added after layer `i`.
    pub fn rent_part(&self, i: usize) -> Option<Vec<EdgeId>> {
        let inside: BTreeSet<EdgeId> = self.buy_part(i)?.iter().copied().collect();
        Some(
            self.tree
                .edge_ids()
                .into_iter()
                .filter(|id| !inside.contains(id))
                .collect(),
        )
    }

    /// Build-order position of the round that added `edge`.
    pub fn round_of(&self, edge: EdgeId) -> Option<usize> {
        self.rounds
            .iter()
            .position(|r| r.added.binary_search(&edge).is_ok())
    }
}

/// Connects the cores of `layers.l` from the largest index down, each time
/// building a LAST of the core restricted graph with the current tree
/// contracted to its root.
pub fn build_tree(inst: &Instance, layers: &LayerSet, alpha: f64) -> Result<SimultaneousTree> {
    let g = inst.graph();
    let mut tree_vertices = VertexSet::from([inst.root()]);
    let mut tree_edges: BTreeSet<EdgeId> = BTreeSet::new();
    let mut rounds = Vec::with_capacity(layers.l.len());

    for &i in layers.l.iter().rev() {
        let core = &layers.decompositions[i].core;
        let host = contract_within(g, &tree_vertices, Some(core));
        let mut round = LayerRound {
            index: i,
            added: Vec::new(),
            snapshot: Vec::new(),
            host_vertices: host.graph().vertex_count(),
            host_edges: host.graph().edge_count(),
            last_max_stretch: 1.0,
            last_weight_ratio: 1.0,
        };
        if host.graph().vertex_count() > 1 {
            let last = build_last(host.graph(), host.supernode(), alpha).map_err(|e| match e {
                Error::Disconnected => {
                    Error::Invariant(format!("core of layer {i} is disconnected after contraction"))
                }
                other => other,
            })?;
            let check = verify_last(host.graph(), &last, alpha, None)?;
            round.last_max_stretch = check.max_stretch;
            round.last_weight_ratio = check.weight_ratio;
            for &id in &last.edges {
                let e = inst.edge(id);
                if !tree_edges.insert(id) {
                    return Err(Error::Invariant(format!("edge {id} added twice")));
                }
                tree_vertices.insert(e.u);
                tree_vertices.insert(e.v);
            }
            round.added = last.edges;
        }
        round.snapshot = tree_edges.iter().copied().collect();
        rounds.push(round);
    }

    let ids: Vec<EdgeId> = tree_edges.into_iter().collect();
    let tree = route(inst, &ids).map_err(|e| Error::Invariant(format!("built tree is invalid: {e}")))?;
    Ok(SimultaneousTree { tree, rounds })
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerBoundRow {
    pub index: usize,
    /// Edge weight of the tree after this layer was connected.
    pub buy_weight: f64,
    pub buy_bound: f64,
    /// Flow-weighted length of the edges added afterwards.
    pub rent_cost: f64,
    pub rent_bound: f64,
    pub buy_ok: bool,
    pub rent_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerBoundReport {
    pub rows: Vec<LayerBoundRow>,
    /// Largest observed `weight(T_B) / B_i`.
    pub c_b_observed: f64,
    /// Largest observed `rent(T_R) / R_i`.
    pub c_r_observed: f64,
    pub passed: bool,
}

fn within(value: f64, bound: f64) -> bool {
    value <= bound * (1.0 + BOUND_SLACK)
}

fn observed(value: f64, base: f64) -> f64 {
    if base > 0.0 {
        value / base
    } else if value > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Checks `weight(T_B_i) <= c_B * B_i` and `A_K(T_R_i) <= c_R * R_i` for
/// every layer.
pub fn check_layer_bounds(
    st: &SimultaneousTree,
    layers: &LayerSet,
    params: &Parameters,
) -> LayerBoundReport {
    let (c_b, c_r) = (params.c_b(), params.c_r());
    let top = threshold(layers.k, layers.eps);
    let mut rows = Vec::new();
    let (mut c_b_obs, mut c_r_obs) = (0.0f64, 0.0f64);
    for r in &st.rounds {
        let i = r.index;
        let inside: BTreeSet<EdgeId> = r.snapshot.iter().copied().collect();
        let buy_weight: f64 = st
            .tree
            .edges()
            .iter()
            .filter(|e| inside.contains(&e.id))
            .map(|e| e.length)
            .sum();
        let rent_cost = st.tree.basis_cost_where(top, |id| !inside.contains(&id));
        let (b, rent) = (layers.buy(i), layers.rent(i));
        c_b_obs = c_b_obs.max(observed(buy_weight, b));
        c_r_obs = c_r_obs.max(observed(rent_cost, rent));
        rows.push(LayerBoundRow {
            index: i,
            buy_weight,
            buy_bound: c_b * b,
            rent_cost,
            rent_bound: c_r * rent,
            buy_ok: within(buy_weight, c_b * b),
            rent_ok: within(rent_cost, c_r * rent),
        });
    }
    let passed = rows.iter().all(|r| r.buy_ok && r.rent_ok);
    LayerBoundReport {
        rows,
        c_b_observed: c_b_obs,
        c_r_observed: c_r_obs,
        passed,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureRow {
    pub index: usize,
    pub cost_t: f64,
    pub cost_basis_tree: f64,
    pub bound: f64,
    pub ok: bool,
}

/// `A_k(T) <= max(c_B gamma, c_R delta) * A_k(T_k)` for every grid index,
/// with `T_k` the monotonized basis trees.
pub fn check_structure_bound(
    st: &SimultaneousTree,
    layers: &LayerSet,
    params: &Parameters,
) -> Vec<StructureRow> {
    let factor = params.layer_bound();
    layers
        .trees
        .iter()
        .enumerate()
        .map(|(k, tk)| {
            let m = threshold(k, layers.eps);
            let cost_t = st.tree.basis_cost(m);
            let cost_basis_tree = tk.basis_cost(m);
            let bound = factor * cost_basis_tree;
            StructureRow {
                index: k,
                cost_t,
                cost_basis_tree,
                bound,
                ok: within(cost_t, bound),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::optimal_parameters;

    fn path3() -> Instance {
        Instance::new(3, &[(0, 1, 1.0), (1, 2, 1.0)], 0, &[(1, 1), (2, 1)]).unwrap()
    }

    #[test]
    fn single_layer_on_path_is_the_path() {
        let inst = path3();
        let t = route(&inst, &[0, 1]).unwrap();
        let layers = LayerSet::from_trees(vec![t.clone(), t], 1.0, 2.0, 3.0 + 5f64.sqrt());
        let p = optimal_parameters(1.0);
        let st = build_tree(&inst, &layers, p.alpha).unwrap();
        assert_eq!(st.tree.edge_ids(), vec![0, 1]);
        assert_eq!(st.rounds.len(), 1);
        assert_eq!(st.rent_part(0).unwrap(), Vec::<EdgeId>::new());
        let report = check_layer_bounds(&st, &layers, &p);
        assert!(report.passed);
        assert_eq!(report.rows[0].rent_cost, 0.0);
    }

    #[test]
    fn empty_inner_core_is_a_no_op_round() {
        // one vertex with demand 4 at distance 1: at M = 8 nothing is bought
        let inst = Instance::new(2, &[(0, 1, 1.0)], 0, &[(1, 4)]).unwrap();
        let t = route(&inst, &[0]).unwrap();
        // eps = 1: K = 2 (M = 1, 2, 4); buy stays 1 throughout, so L = {0}
        let layers = LayerSet::from_trees(vec![t.clone(), t.clone(), t.clone()], 1.0, 2.0, 5.3);
        assert_eq!(layers.l, vec![0]);

        // force a zero-buy innermost layer by hand
        let mut layers = layers;
        layers.decompositions[2] = t.decompose_at(2, 8.0);
        layers.l = vec![0, 2];
        let st = build_tree(&inst, &layers, 1.618).unwrap();
        assert_eq!(st.rounds[0].index, 2);
        assert!(st.rounds[0].added.is_empty());
        assert_eq!(st.buy_part(2).unwrap(), &[] as &[EdgeId]);
        assert_eq!(st.tree.edge_ids(), vec![0]);
    }
}
