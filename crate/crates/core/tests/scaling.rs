//! Doubling the total demand at a fixed graph adds a constant number of grid
//! indices, so everything after the solver calls should grow by far less
//! than 2x.

use std::time::{Duration, Instant};

use onetree::builder::build_tree;
use onetree::evaluate::optimal_parameters;
use onetree::exec::Exec;
use onetree::generate::{random_instance, GenSpec};
use onetree::graph::Instance;
use onetree::layers::{compute_k, LayerSet};
use onetree::routing::{threshold, RoutedTree};
use onetree::ssrob::sample_and_augment;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 0.1;

fn with_demand_scaled(base: &Instance, factor: u64) -> Instance {
    let edges: Vec<(usize, usize, f64)> =
        base.graph().edges().iter().map(|e| (e.u, e.v, e.length)).collect();
    let demands: Vec<(usize, u64)> = base.demands().iter().map(|(&v, &d)| (v, d * factor)).collect();
    Instance::new(base.vertex_count(), &edges, base.root(), &demands).unwrap()
}

fn solve_all(inst: &Instance) -> Vec<RoutedTree> {
    let k = compute_k(inst.total_demand(), EPS);
    (0..=k)
        .map(|i| sample_and_augment(inst, threshold(i, EPS), i as u64, 4, Exec::Sequential).unwrap())
        .collect()
}

/// Median wall time of layer search and tree construction, solver excluded.
fn post_solver_time(inst: &Instance, trees: &[RoutedTree]) -> Duration {
    let p = optimal_parameters(EPS);
    let mut samples: Vec<Duration> = (0..11)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..5 {
                let layers = LayerSet::from_trees(trees.to_vec(), EPS, p.gamma, p.delta);
                std::hint::black_box(build_tree(inst, &layers, p.alpha).unwrap());
            }
            start.elapsed()
        })
        .collect();
    samples.sort();
    samples[samples.len() / 2]
}

#[test]
fn doubling_demand_less_than_doubles_post_solver_time() {
    let spec = GenSpec {
        min_vertices: 40,
        max_vertices: 40,
        extra_edge_prob: 0.15,
        max_length: 20,
        max_demand: 200,
    };
    let base = random_instance(&mut ChaCha8Rng::seed_from_u64(61), &spec);
    let small = with_demand_scaled(&base, 50);
    let large = with_demand_scaled(&base, 100);
    let (ts, tl) = (solve_all(&small), solve_all(&large));
    let (a, b) = (post_solver_time(&small, &ts), post_solver_time(&large, &tl));
    let factor = b.as_secs_f64() / a.as_secs_f64();
    println!(
        "K {} -> {}: {:?} -> {:?} (x{factor:.3})",
        ts.len() - 1,
        tl.len() - 1,
        a,
        b
    );
    assert!(factor < 2.0);
}
