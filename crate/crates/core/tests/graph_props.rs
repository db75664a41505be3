mod common;

use std::collections::BTreeSet;

use onetree::generate::{random_instance, GenSpec};
use onetree::graph::{contract, minimum_spanning_tree, shortest_path_tree, Instance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_force_mst_weight, floyd_warshall, raw_edges};

fn instance(seed: u64, max_vertices: usize) -> Instance {
    let spec = GenSpec {
        max_vertices,
        ..GenSpec::desk()
    };
    random_instance(&mut ChaCha8Rng::seed_from_u64(seed), &spec)
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dijkstra_matches_floyd_warshall(seed in any::<u64>()) {
        let inst = instance(seed, 8);
        let edges = raw_edges(&inst);
        let fw = floyd_warshall(inst.vertex_count(), &edges);
        let sp = shortest_path_tree(inst.graph(), inst.root());
        for v in 0..inst.vertex_count() {
            prop_assert_eq!(sp.dist[v], fw[inst.root()][v]);
            // the reported path has the reported length
            let len: f64 = sp.path_edges(v).iter().map(|&id| edges[id].2).sum();
            prop_assert_eq!(len, sp.dist[v]);
        }
    }

    #[test]
    fn distances_obey_triangle_inequality(seed in any::<u64>()) {
        let inst = instance(seed, 8);
        let n = inst.vertex_count();
        let d: Vec<Vec<f64>> = (0..n).map(|s| shortest_path_tree(inst.graph(), s).dist).collect();
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(d[a][b], d[b][a]);
                for c in 0..n {
                    prop_assert!(d[a][c] <= d[a][b] + d[b][c]);
                }
            }
        }
    }

    #[test]
    fn mst_is_minimum(seed in any::<u64>()) {
        let inst = instance(seed, 8);
        let edges = raw_edges(&inst);
        prop_assume!(edges.len() <= 20);
        let mst = minimum_spanning_tree(inst.graph()).unwrap();
        prop_assert_eq!(mst.len() + 1, inst.vertex_count());
        prop_assert!(common::is_spanning_tree(inst.vertex_count(), &edges, &mst));
        let w: f64 = mst.iter().map(|&id| edges[id].2).sum();
        prop_assert_eq!(w, brute_force_mst_weight(inst.vertex_count(), &edges));
    }

    #[test]
    fn contraction_keeps_outside_structure(seed in any::<u64>(), mask in 1u32..256) {
        let inst = instance(seed, 8);
        let n = inst.vertex_count();
        let mut s: BTreeSet<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        s.insert(inst.root());
        let c = contract(inst.graph(), &s);
        let h = c.graph();
        prop_assert_eq!(h.vertex_count(), n - s.len() + 1);

        for v in 0..n {
            let local = c.local_vertex(v).unwrap();
            if s.contains(&v) {
                prop_assert_eq!(local, c.supernode());
            } else {
                prop_assert_eq!(c.base_vertex(local), Some(v));
            }
        }
        // no loops; every crossing edge survives unless a cheaper parallel one does
        let kept: BTreeSet<usize> = h.edges().iter().map(|e| e.id).collect();
        for e in h.edges() {
            prop_assert!(e.u != e.v);
        }
        for e in inst.graph().edges() {
            let inside = s.contains(&e.u) && s.contains(&e.v);
            if inside {
                prop_assert!(!kept.contains(&e.id));
            } else {
                prop_assert!(kept.contains(&e.id) || c.dropped().contains(&e.id));
            }
        }

        // distance from the supernode is the distance from the nearest member
        let fw = floyd_warshall(n, &raw_edges(&inst));
        let dist = shortest_path_tree(h, c.supernode()).dist;
        for v in (0..n).filter(|v| !s.contains(v)) {
            let expect = s.iter().map(|&u| fw[u][v]).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(dist[c.local_vertex(v).unwrap()], expect);
        }
    }
}
