//! Single-sink rent-or-buy solvers for the basis functions `min(x, M)`.
//!
//! [`SampleAugment`] is the default randomized heuristic: sample a core of
//! demand vertices with probability about `1/M`, buy a Steiner tree over it,
//! rent shortest paths for everyone else. [`ExactSolver`] enumerates spanning
//! trees and is only usable on small graphs.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{
    contract, minimum_spanning_forest, shortest_path_tree, Edge, EdgeId, Graph, Instance,
    VertexId, VertexSet,
};
use crate::routing::{route, RoutedTree};
use crate::spanning::{for_each_spanning_tree, spanning_tree_count};

pub const DEFAULT_TRIALS: usize = 32;

/// Spanning-tree budget for the exhaustive oracle.
pub const ORACLE_TREE_LIMIT: f64 = 1e7;

const ORACLE_BATCH: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Quality {
    Exact,
    Heuristic { trials: usize },
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quality::Exact => write!(f, "exact"),
            Quality::Heuristic { trials } => write!(f, "heuristic(trials={trials})"),
        }
    }
}

pub trait SsrobSolver: Send + Sync {
    /// A tree for `min(x, m)` spanning the root and all demand vertices.
    fn solve(&self, inst: &Instance, m: f64, seed: u64) -> Result<RoutedTree>;

    fn quality(&self) -> Quality;

    fn name(&self) -> &'static str;
}

#[derive(Clone, Copy, Debug)]
pub struct SampleAugment {
    pub trials: usize,
    pub exec: Exec,
}

impl Default for SampleAugment {
    fn default() -> Self {
        SampleAugment {
            trials: DEFAULT_TRIALS,
            exec: Exec::default(),
        }
    }
}

impl SsrobSolver for SampleAugment {
    fn solve(&self, inst: &Instance, m: f64, seed: u64) -> Result<RoutedTree> {
        sample_and_augment(inst, m, seed, self.trials, self.exec)
    }

    fn quality(&self) -> Quality {
        Quality::Heuristic {
            trials: self.trials,
        }
    }

    fn name(&self) -> &'static str {
        "sample-augment"
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExactSolver {
    pub exec: Exec,
}

impl SsrobSolver for ExactSolver {
    fn solve(&self, inst: &Instance, m: f64, _seed: u64) -> Result<RoutedTree> {
        exact_minimum(inst, self.exec, |t| t.basis_cost(m))
    }

    fn quality(&self) -> Quality {
        Quality::Exact
    }

    fn name(&self) -> &'static str {
        "exact"
    }
}

/// Looks up a solver by its command-line name.
pub fn solver_by_name(name: &str, trials: usize, exec: Exec) -> Option<Box<dyn SsrobSolver>> {
    match name {
        "exact" => Some(Box::new(ExactSolver { exec })),
        "sample-augment" => Some(Box::new(SampleAugment { trials, exec })),
        _ => None,
    }
}

/// `(cost, sorted edge ids)` ordering shared by every solver's tie rule.
fn better(a: &(f64, RoutedTree), b: &(f64, RoutedTree)) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => a.1.edge_ids() < b.1.edge_ids(),
    }
}

fn pick_best(candidates: impl IntoIterator<Item = (f64, RoutedTree)>) -> Option<(f64, RoutedTree)> {
    candidates.into_iter().fold(None, |best, c| match best {
        Some(b) if !better(&c, &b) => Some(b),
        _ => Some(c),
    })
}

/// Sample-and-augment: the cheapest of `trials` randomized trees under
/// `min(x, m)`. Trial `k` draws from a generator seeded with `seed + k`.
pub fn sample_and_augment(
    inst: &Instance,
    m: f64,
    seed: u64,
    trials: usize,
    exec: Exec,
) -> Result<RoutedTree> {
    assert!(trials >= 1, "need at least one trial");
    let demand = inst.total_demand() as f64;
    if m >= demand {
        return route(inst, &shortest_path_edges(inst));
    }
    if m <= 1.0 {
        let mut terminals: VertexSet = inst.demands().keys().copied().collect();
        terminals.insert(inst.root());
        return route(inst, &steiner_tree(inst.graph(), &terminals));
    }

    let p = 1.0 / m;
    let outcomes = exec.map_indices(trials, |k| -> Result<(f64, RoutedTree)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let mut marked = VertexSet::from([inst.root()]);
        for (&v, &d) in inst.demands() {
            let prob = 1.0 - (1.0 - p).powi(d.min(i32::MAX as u64) as i32);
            if rng.gen::<f64>() < prob {
                marked.insert(v);
            }
        }
        let tree = augment(inst, &marked)?;
        Ok((tree.basis_cost(m), tree))
    });
    let outcomes: Vec<(f64, RoutedTree)> = outcomes.into_iter().collect::<Result<_>>()?;
    Ok(pick_best(outcomes).expect("at least one trial").1)
}

/// Buys a Steiner tree over `marked` and connects every other demand vertex
/// to it by a shortest path.
fn augment(inst: &Instance, marked: &VertexSet) -> Result<RoutedTree> {
    let g = inst.graph();
    let mut edges = steiner_tree(g, marked);
    let mut core = VertexSet::from([inst.root()]);
    for &id in &edges {
        let e = inst.edge(id);
        core.insert(e.u);
        core.insert(e.v);
    }
    let contracted = contract(g, &core);
    let sp = shortest_path_tree(contracted.graph(), contracted.supernode());
    let mut rented = VertexSet::new();
    for &v in inst.demands().keys() {
        if core.contains(&v) {
            continue;
        }
        let local = contracted.local_vertex(v).expect("non-core vertex is kept");
        rented.extend(sp.path_edges(local));
    }
    edges.extend(rented);
    route(inst, &edges)
}

/// Union of root-to-demand shortest paths.
pub fn shortest_path_edges(inst: &Instance) -> Vec<EdgeId> {
    let sp = shortest_path_tree(inst.graph(), inst.root());
    let mut ids = VertexSet::new();
    for &v in inst.demands().keys() {
        ids.extend(sp.path_edges(v));
    }
    ids.into_iter().collect()
}

/// Metric-closure Steiner tree over `terminals`: MST of the terminals under
/// shortest-path distance, expanded into graph paths, reduced to a spanning
/// tree of the union, then stripped of non-terminal leaves. Sorted edge ids.
pub fn steiner_tree(g: &Graph, terminals: &VertexSet) -> Vec<EdgeId> {
    let terms: Vec<VertexId> = terminals.iter().copied().collect();
    if terms.len() <= 1 {
        return Vec::new();
    }
    let trees: Vec<_> = terms.iter().map(|&t| shortest_path_tree(g, t)).collect();
    let mut closure = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let d = trees[i].dist[terms[j]];
            if d.is_finite() {
                closure.push(Edge {
                    id: closure.len(),
                    u: i,
                    v: j,
                    length: d,
                });
            }
        }
    }
    let closure_mst = minimum_spanning_forest(&Graph::new(terms.len(), closure));

    let index = g.edge_index();
    let mut used = VertexSet::new();
    for pair in &closure_mst {
        used.extend(trees[pair.u].path_edges(terms[pair.v]));
    }
    let union = Graph::new(
        g.vertex_count(),
        used.iter().map(|id| index[id]).collect(),
    );
    let mut tree: Vec<Edge> = minimum_spanning_forest(&union);

    // strip Steiner leaves
    loop {
        let mut degree: BTreeMap<VertexId, usize> = BTreeMap::new();
        for e in &tree {
            *degree.entry(e.u).or_default() += 1;
            *degree.entry(e.v).or_default() += 1;
        }
        let before = tree.len();
        tree.retain(|e| {
            let leaf = |x: VertexId| degree[&x] == 1 && !terminals.contains(&x);
            !(leaf(e.u) || leaf(e.v))
        });
        if tree.len() == before {
            break;
        }
    }
    let mut ids: Vec<EdgeId> = tree.iter().map(|e| e.id).collect();
    ids.sort_unstable();
    ids
}

/// The root component with parallel edges reduced to the cheapest one.
/// Dominated parallel edges never appear in a strictly better tree.
fn oracle_graph(inst: &Instance) -> Graph {
    let (component, _) = inst.root_component();
    let mut best: BTreeMap<(VertexId, VertexId), Edge> = BTreeMap::new();
    for e in component.edges() {
        let key = (e.u.min(e.v), e.u.max(e.v));
        best.entry(key)
            .and_modify(|b| {
                if (e.length, e.id) < (b.length, b.id) {
                    *b = *e;
                }
            })
            .or_insert(*e);
    }
    let mut edges: Vec<Edge> = best.into_values().collect();
    edges.sort_by_key(|e| e.id);
    Graph::new(component.vertex_count(), edges)
}

/// Estimated number of spanning trees the oracle would enumerate.
pub fn oracle_size(inst: &Instance) -> f64 {
    spanning_tree_count(&oracle_graph(inst))
}

/// Exhaustive minimum of `objective` over the spanning trees of the root
/// component. Ties go to the lexicographically smaller edge-id set.
pub fn exact_minimum<F>(inst: &Instance, exec: Exec, objective: F) -> Result<RoutedTree>
where
    F: Fn(&RoutedTree) -> f64 + Sync + Send,
{
    let g = oracle_graph(inst);
    let estimate = spanning_tree_count(&g);
    if estimate > ORACLE_TREE_LIMIT {
        return Err(Error::OracleTooLarge {
            estimate,
            limit: ORACLE_TREE_LIMIT,
        });
    }

    let mut best: Option<(f64, RoutedTree)> = None;
    let mut batch: Vec<Vec<EdgeId>> = Vec::with_capacity(ORACLE_BATCH);
    let mut failure = None;
    let mut flush = |batch: &mut Vec<Vec<EdgeId>>, best: &mut Option<(f64, RoutedTree)>| {
        let scored = exec.map_slice(batch, |ids| {
            route(inst, ids).map(|t| (objective(&t), t))
        });
        batch.clear();
        for s in scored {
            match s {
                Ok(c) => *best = pick_best(best.take().into_iter().chain([c])),
                Err(e) => failure = Some(e),
            }
        }
    };
    for_each_spanning_tree(&g, |ids| {
        let mut ids = ids.to_vec();
        ids.sort_unstable();
        batch.push(ids);
        if batch.len() == ORACLE_BATCH {
            flush(&mut batch, &mut best);
        }
    });
    flush(&mut batch, &mut best);
    if let Some(e) = failure {
        return Err(e);
    }
    best.map(|(_, t)| t)
        .ok_or_else(|| Error::Invariant("root component has no spanning tree".into()))
}

/// Exact optimum for `min(x, m)`.
pub fn exact_ssrob(inst: &Instance, m: f64) -> Result<RoutedTree> {
    ExactSolver::default().solve(inst, m, 0)
}
