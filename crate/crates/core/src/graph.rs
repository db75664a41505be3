//! Graph representation and the elementary algorithms the rest of the crate
//! builds on: shortest paths, minimum spanning trees and contraction.
//!
//! Every tie-break is keyed on `(value, id)` pairs so identical input always
//! produces identical output.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::unionfind::DisjointSets;

pub type VertexId = usize;
pub type EdgeId = usize;
pub type VertexSet = BTreeSet<VertexId>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

impl Edge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    /// Ordering key used wherever edges are ranked: length first, then id.
    fn rank(&self, other: &Edge) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then(self.id.cmp(&other.id))
    }
}

/// Undirected multigraph with stable edge ids.
///
/// Edge ids need not be dense: a contracted graph keeps the ids of the base
/// edges it was derived from.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (slot, e) in edges.iter().enumerate() {
            adjacency[e.u].push(slot);
            adjacency[e.v].push(slot);
        }
        Graph {
            n,
            edges,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = &Edge> + '_ {
        self.adjacency[v].iter().map(move |&slot| &self.edges[slot])
    }

    /// Map from edge id to edge.
    pub fn edge_index(&self) -> BTreeMap<EdgeId, Edge> {
        self.edges.iter().map(|e| (e.id, *e)).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Vertices reachable from `source`, as a membership mask.
    pub fn reachable_from(&self, source: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([source]);
        seen[source] = true;
        while let Some(u) = queue.pop_front() {
            for e in self.incident(u) {
                let w = e.other(u);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.reachable_from(0).iter().all(|&b| b)
    }
}

/// The problem input: a graph, a root and integer demands.
#[derive(Clone, Debug)]
pub struct Instance {
    graph: Graph,
    root: VertexId,
    demands: BTreeMap<VertexId, u64>,
}

impl Instance {
    /// Builds and validates an instance. Edge ids are assigned in input order.
    pub fn new(
        n: usize,
        edges: &[(VertexId, VertexId, f64)],
        root: VertexId,
        demands: &[(VertexId, u64)],
    ) -> Result<Self> {
        let mut builder = InstanceBuilder::new(n, root)?;
        for (i, &(u, v, len)) in edges.iter().enumerate() {
            builder.add_edge(u, v, len, i + 2)?;
        }
        for &(v, d) in demands {
            builder.add_demand(v, d, 0)?;
        }
        builder.finish()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n
    }

    /// Demand per vertex; vertices without demand are absent.
    pub fn demands(&self) -> &BTreeMap<VertexId, u64> {
        &self.demands
    }

    pub fn demand(&self, v: VertexId) -> u64 {
        self.demands.get(&v).copied().unwrap_or(0)
    }

    pub fn total_demand(&self) -> u64 {
        self.demands.values().sum()
    }

    /// Base edge by id. Instance edge ids are dense.
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.graph.edges[id]
    }

    /// The connected component containing the root, with dense local ids.
    /// Returns the component graph and the local-to-base vertex map.
    pub fn root_component(&self) -> (Graph, Vec<VertexId>) {
        let mask = self.graph.reachable_from(self.root);
        let mut local = vec![usize::MAX; self.graph.n];
        let mut to_base = Vec::new();
        for (v, &inside) in mask.iter().enumerate() {
            if inside {
                local[v] = to_base.len();
                to_base.push(v);
            }
        }
        let edges = self
            .graph
            .edges
            .iter()
            .filter(|e| mask[e.u])
            .map(|e| Edge {
                id: e.id,
                u: local[e.u],
                v: local[e.v],
                length: e.length,
            })
            .collect();
        (Graph::new(to_base.len(), edges), to_base)
    }

    /// Serializes back into the text instance format.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} {} {}\n",
            self.graph.n,
            self.graph.edges.len(),
            self.root
        );
        for e in &self.graph.edges {
            out.push_str(&format!("{} {} {}\n", e.u, e.v, e.length));
        }
        for (v, d) in &self.demands {
            out.push_str(&format!("d {v} {d}\n"));
        }
        out
    }
}

struct InstanceBuilder {
    n: usize,
    root: VertexId,
    edges: Vec<Edge>,
    demands: BTreeMap<VertexId, u64>,
}

impl InstanceBuilder {
    fn new(n: usize, root: VertexId) -> Result<Self> {
        if root >= n {
            return Err(Error::VertexOutOfRange { vertex: root, n });
        }
        Ok(InstanceBuilder {
            n,
            root,
            edges: Vec::new(),
            demands: BTreeMap::new(),
        })
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v >= self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    fn add_edge(&mut self, u: VertexId, v: VertexId, length: f64, line: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let id = self.edges.len();
        if u == v {
            return Err(Error::SelfLoop { line, vertex: u });
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::NonpositiveLength {
                line,
                edge: id,
                length,
            });
        }
        self.edges.push(Edge { id, u, v, length });
        Ok(())
    }

    fn add_demand(&mut self, v: VertexId, amount: u64, line: usize) -> Result<()> {
        self.check_vertex(v)?;
        if self.demands.contains_key(&v) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate demand for vertex {v}"),
            });
        }
        if amount > 0 {
            self.demands.insert(v, amount);
        }
        Ok(())
    }

    fn finish(self) -> Result<Instance> {
        if self.demands.is_empty() {
            return Err(Error::NoDemand);
        }
        let graph = Graph::new(self.n, self.edges);
        let reach = graph.reachable_from(self.root);
        if let Some(&v) = self.demands.keys().find(|&&v| !reach[v]) {
            return Err(Error::DisconnectedDemand { vertex: v });
        }
        Ok(Instance {
            graph,
            root: self.root,
            demands: self.demands,
        })
    }
}

/// Parses the text instance format:
///
/// ```text
/// n m root
/// u v length      (m lines)
/// d v amount      (one line per demand vertex)
/// ```
///
/// `#` starts a comment that runs to the end of the line.
pub fn load_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let parse_err = |line: usize, message: String| Error::Parse { line, message };

    let (line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header `n m root`".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(line, format!("expected `n m root`, got `{header}`")));
    }
    let n: usize = parse_field(fields[0], line, "vertex count")?;
    let m: usize = parse_field(fields[1], line, "edge count")?;
    let root: VertexId = parse_field(fields[2], line, "root")?;
    let mut builder = InstanceBuilder::new(n, root)?;

    for k in 0..m {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_err(line, format!("expected {m} edges, found {k}")))?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 3 || fields[0] == "d" {
            return Err(parse_err(line, format!("expected `u v length`, got `{text}`")));
        }
        let u = parse_field(fields[0], line, "endpoint")?;
        let v = parse_field(fields[1], line, "endpoint")?;
        let length: f64 = parse_field(fields[2], line, "length")?;
        builder.add_edge(u, v, length, line)?;
    }

    for (line, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "d" {
            return Err(parse_err(line, format!("expected `d v amount`, got `{text}`")));
        }
        let v = parse_field(fields[1], line, "demand vertex")?;
        let amount = parse_field(fields[2], line, "demand amount")?;
        builder.add_demand(v, amount, line)?;
    }

    builder.finish().map_err(|e| match e {
        Error::NoDemand => parse_err(text.lines().count().max(1), "no demand lines".into()),
        other => other,
    })
}

fn parse_field<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid {what} `{field}`"),
    })
}

/// Output of [`shortest_path_tree`].
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    pub source: VertexId,
    /// `f64::INFINITY` for unreachable vertices.
    pub dist: Vec<f64>,
    /// Predecessor vertex and the edge used to reach it.
    pub pred: Vec<Option<(VertexId, EdgeId)>>,
}

impl ShortestPaths {
    /// Edge ids on the shortest path from `v` back to the source.
    pub fn path_edges(&self, v: VertexId) -> Vec<EdgeId> {
        let mut path = Vec::new();
        let mut x = v;
        while let Some((p, e)) = self.pred[x] {
            path.push(e);
            x = p;
        }
        path
    }

    pub fn is_reachable(&self, v: VertexId) -> bool {
        self.dist[v].is_finite()
    }
}

#[derive(PartialEq)]
struct HeapItem(f64, VertexId);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source`. Among equally short routes the predecessor is the
/// smallest `(predecessor id, edge id)` pair.
pub fn shortest_path_tree(g: &Graph, source: VertexId) -> ShortestPaths {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::from([HeapItem(0.0, source)]);
    while let Some(HeapItem(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for e in g.incident(u) {
            let w = e.other(u);
            let nd = d + e.length;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(HeapItem(nd, w));
            }
        }
    }

    let mut pred = vec![None; n];
    for (w, slot) in pred.iter_mut().enumerate() {
        if w == source || !dist[w].is_finite() {
            continue;
        }
        *slot = g
            .incident(w)
            .filter_map(|e| {
                let u = e.other(w);
                (dist[u] < dist[w] && dist[u] + e.length == dist[w]).then_some((u, e.id))
            })
            .min();
    }
    ShortestPaths { source, dist, pred }
}

/// Kruskal over `(length, id)` order. Errors if the graph is disconnected.
pub fn minimum_spanning_tree(g: &Graph) -> Result<Vec<EdgeId>> {
    let forest = minimum_spanning_forest(g);
    if g.vertex_count() > 0 && forest.len() + 1 != g.vertex_count() {
        return Err(Error::Disconnected);
    }
    let mut ids: Vec<EdgeId> = forest.iter().map(|e| e.id).collect();
    ids.sort_unstable();
    Ok(ids)
}

/// Kruskal without the connectivity requirement. Edges come back in the
/// order they were accepted.
pub fn minimum_spanning_forest(g: &Graph) -> Vec<Edge> {
    let mut order: Vec<&Edge> = g.edges().iter().collect();
    order.sort_by(|a, b| a.rank(b));
    let mut sets = DisjointSets::new(g.vertex_count());
    order
        .into_iter()
        .filter(|e| sets.union(e.u, e.v))
        .copied()
        .collect()
}

/// A graph with one vertex set merged into a supernode.
///
/// Local vertex 0 is the supernode; the remaining local ids follow ascending
/// base id. Edges keep their base ids.
#[derive(Clone, Debug)]
pub struct ContractedGraph {
    graph: Graph,
    local_to_base: Vec<Option<VertexId>>,
    base_to_local: Vec<Option<VertexId>>,
    members: VertexSet,
    dropped: Vec<EdgeId>,
}

impl ContractedGraph {
    pub const SUPERNODE: VertexId = 0;

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn supernode(&self) -> VertexId {
        Self::SUPERNODE
    }

    /// Base vertex for a local id; `None` for the supernode.
    pub fn base_vertex(&self, local: VertexId) -> Option<VertexId> {
        self.local_to_base[local]
    }

    /// Local id for a base vertex; members of the contracted set map to the
    /// supernode, filtered-out vertices to `None`.
    pub fn local_vertex(&self, base: VertexId) -> Option<VertexId> {
        self.base_to_local[base]
    }

    pub fn members(&self) -> &VertexSet {
        &self.members
    }

    /// Parallel edges discarded in favour of a cheaper one.
    pub fn dropped(&self) -> &[EdgeId] {
        &self.dropped
    }
}

/// Contracts `s` into a single supernode.
pub fn contract(g: &Graph, s: &VertexSet) -> ContractedGraph {
    contract_within(g, s, None)
}

/// Contracts `s`, then restricts to `keep` plus the supernode. With
/// `keep = C` this is `(G/S)[C]`.
pub fn contract_within(g: &Graph, s: &VertexSet, keep: Option<&VertexSet>) -> ContractedGraph {
    assert!(!s.is_empty(), "contracted set must be nonempty");
    let n = g.vertex_count();
    let mut base_to_local = vec![None; n];
    let mut local_to_base = vec![None];
    for v in 0..n {
        if s.contains(&v) {
            base_to_local[v] = Some(ContractedGraph::SUPERNODE);
        } else if keep.is_none_or(|k| k.contains(&v)) {
            base_to_local[v] = Some(local_to_base.len());
            local_to_base.push(Some(v));
        }
    }

    let mut best: BTreeMap<(VertexId, VertexId), Edge> = BTreeMap::new();
    let mut dropped = Vec::new();
    for e in g.edges() {
        let (Some(a), Some(b)) = (base_to_local[e.u], base_to_local[e.v]) else {
            continue;
        };
        if a == b {
            continue;
        }
        let mapped = Edge {
            id: e.id,
            u: a,
            v: b,
            length: e.length,
        };
        match best.entry((a.min(b), a.max(b))) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(mapped);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                if mapped.rank(slot.get()) == Ordering::Less {
                    dropped.push(slot.get().id);
                    slot.insert(mapped);
                } else {
                    dropped.push(mapped.id);
                }
            }
        }
    }
    dropped.sort_unstable();
    let mut edges: Vec<Edge> = best.into_values().collect();
    edges.sort_by_key(|e| e.id);

    ContractedGraph {
        graph: Graph::new(local_to_base.len(), edges),
        local_to_base,
        base_to_local,
        members: s.clone(),
        dropped,
    }
}
