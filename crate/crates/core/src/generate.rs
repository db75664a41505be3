//! Seeded random instances for corpora, tests and benches.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Instance, VertexId};

#[derive(Clone, Copy, Debug)]
pub struct GenSpec {
    pub min_vertices: usize,
    pub max_vertices: usize,
    /// Probability of each non-tree vertex pair getting an edge.
    pub extra_edge_prob: f64,
    /// Integer lengths drawn from `1..=max_length`.
    pub max_length: u32,
    pub max_demand: u64,
}

impl GenSpec {
    /// Small instances the exhaustive oracle handles quickly: at most 7
    /// vertices, lengths 1-9, total demand at most 8.
    pub fn desk() -> Self {
        GenSpec {
            min_vertices: 2,
            max_vertices: 7,
            extra_edge_prob: 0.35,
            max_length: 9,
            max_demand: 8,
        }
    }
}

/// A connected instance: random spanning tree plus random extra edges, root
/// 0, total demand uniform in `1..=max_demand` spread over non-root vertices.
pub fn random_instance(rng: &mut impl Rng, spec: &GenSpec) -> Instance {
    let n = rng.gen_range(spec.min_vertices..=spec.max_vertices).max(2);
    let mut edges: Vec<(VertexId, VertexId, f64)> = Vec::new();
    let mut order: Vec<VertexId> = (1..n).collect();
    order.shuffle(rng);
    let mut placed = vec![0];
    let mut adjacent = vec![vec![false; n]; n];
    for &v in &order {
        let u = placed[rng.gen_range(0..placed.len())];
        edges.push((u, v, rng.gen_range(1..=spec.max_length) as f64));
        adjacent[u][v] = true;
        adjacent[v][u] = true;
        placed.push(v);
    }
    for u in 0..n {
        for v in u + 1..n {
            if !adjacent[u][v] && rng.gen_bool(spec.extra_edge_prob) {
                edges.push((u, v, rng.gen_range(1..=spec.max_length) as f64));
            }
        }
    }
    let total = rng.gen_range(1..=spec.max_demand);
    let mut demand = vec![0u64; n];
    for _ in 0..total {
        demand[rng.gen_range(1..n)] += 1;
    }
    let demands: Vec<(VertexId, u64)> = demand
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > 0)
        .map(|(v, &d)| (v, d))
        .collect();
    Instance::new(n, &edges, 0, &demands).expect("generated instance is valid")
}

/// `count` instances named `inst-0000`, `inst-0001`, ...
pub fn corpus(seed: u64, count: usize, spec: &GenSpec) -> Vec<(String, Instance)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| (format!("inst-{k:04}"), random_instance(&mut rng, spec)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_instances_respect_the_spec() {
        for (_, inst) in corpus(5, 100, &GenSpec::desk()) {
            assert!(inst.vertex_count() <= 7);
            assert!((1..=8).contains(&inst.total_demand()));
            assert!(inst.graph().is_connected());
            assert!(inst
                .graph()
                .edges()
                .iter()
                .all(|e| e.length >= 1.0 && e.length <= 9.0 && e.length.fract() == 0.0));
        }
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = corpus(9, 5, &GenSpec::desk());
        let b = corpus(9, 5, &GenSpec::desk());
        for ((na, ia), (nb, ib)) in a.iter().zip(&b) {
            assert_eq!(na, nb);
            assert_eq!(ia.to_text(), ib.to_text());
        }
    }
}
