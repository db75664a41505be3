mod common;

use onetree::evaluate::optimal_parameters;
use onetree::exec::Exec;
use onetree::generate::{corpus, random_instance, GenSpec};
use onetree::layers::{compute_k, find_layers, LayerSet};
use onetree::routing::route;
use onetree::ssrob::{ExactSolver, SampleAugment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random_spanning_tree;

const SLACK: f64 = 1e-9;

/// Every grid index is covered by a layer whose buy cost is within gamma
/// and rent cost within delta of its own.
fn assert_covering(layers: &LayerSet, gamma: f64, delta: f64) {
    assert!(layers.l.contains(&0) && layers.l_b.contains(&0));
    assert!(layers.l.iter().all(|i| layers.l_b.contains(i)));
    assert!(layers.l.windows(2).all(|w| w[0] < w[1]));
    assert!(layers.monotonicity_violations(SLACK).is_empty());
    for k in 0..=layers.k {
        let i = layers.covering_index(k);
        assert!(layers.l.contains(&i));
        assert!(
            layers.buy(i) <= gamma * layers.buy(k) * (1.0 + SLACK),
            "k={k} i={i}: B_i={} B_k={}",
            layers.buy(i),
            layers.buy(k)
        );
        assert!(
            layers.rent(i) <= delta * layers.rent(k) * (1.0 + SLACK),
            "k={k} i={i}: R_i={} R_k={}",
            layers.rent(i),
            layers.rent(k)
        );
    }
}

#[test]
fn covering_holds_for_random_tree_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let spec = GenSpec {
        max_vertices: 10,
        max_demand: 40,
        ..GenSpec::desk()
    };
    for _ in 0..1000 {
        let inst = random_instance(&mut rng, &spec);
        let eps = rng.gen_range(0.1..1.0);
        let gamma = rng.gen_range(1.2..4.0);
        let delta = rng.gen_range(2.5..8.0);
        let k = compute_k(inst.total_demand(), eps);
        let trees = (0..=k)
            .map(|_| route(&inst, &random_spanning_tree(&inst, &mut rng)).unwrap())
            .collect();
        assert_covering(&LayerSet::from_trees(trees, eps, gamma, delta), gamma, delta);
    }
}

#[test]
fn covering_holds_for_solver_outputs() {
    let p = optimal_parameters(0.5);
    for (_, inst) in corpus(22, 150, &GenSpec::desk()) {
        let exact = find_layers(&inst, &ExactSolver::default(), 0.5, p.gamma, p.delta, 0, Exec::default()).unwrap();
        assert_covering(&exact, p.gamma, p.delta);
        let heur = find_layers(&inst, &SampleAugment::default(), 0.5, p.gamma, p.delta, 3, Exec::default()).unwrap();
        assert_covering(&heur, p.gamma, p.delta);
    }
}

#[test]
fn monotonized_trees_come_from_the_solver_family() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let inst = random_instance(&mut rng, &GenSpec { max_vertices: 8, max_demand: 30, ..GenSpec::desk() });
    let k = compute_k(inst.total_demand(), 0.3);
    let trees: Vec<_> = (0..=k)
        .map(|_| route(&inst, &random_spanning_tree(&inst, &mut rng)).unwrap())
        .collect();
    let layers = LayerSet::from_trees(trees.clone(), 0.3, 2.0, 5.0);
    assert_eq!(layers.trees.len(), k + 1);
    for (i, &s) in layers.source.iter().enumerate() {
        assert_eq!(layers.trees[i].edge_ids(), trees[s].edge_ids());
    }
}
