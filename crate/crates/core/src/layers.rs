//! Basis trees for every grid threshold, cross-index repair and geometric
//! pruning down to the layer indices.

use serde::Serialize;

use crate::error::Result;
use crate::exec::Exec;
use crate::graph::Instance;
use crate::routing::{threshold, RentBuyDecomposition, RoutedTree};
use crate::ssrob::SsrobSolver;

/// Relative tolerance below which two basis costs count as equal.
pub const COST_TIE_TOL: f64 = 1e-12;

/// `K = ceil(log_{1+eps} D)`, the top grid index.
pub fn compute_k(total_demand: u64, eps: f64) -> usize {
    assert!(total_demand >= 1 && eps > 0.0);
    let d = total_demand as f64;
    let mut k = (d.ln() / (1.0 + eps).ln()).ceil().max(0.0) as usize;
    // repair rounding in the logarithms
    while k > 0 && threshold(k - 1, eps) >= d {
        k -= 1;
    }
    while threshold(k, eps) < d {
        k += 1;
    }
    k
}

fn strictly_less(a: f64, b: f64) -> bool {
    a < b - COST_TIE_TOL * a.abs().max(b.abs())
}

/// Makes each tree at least as good under its own threshold as both
/// neighbours'. Returns, per index, which input tree it now uses.
pub fn monotonize(trees: &[RoutedTree], eps: f64) -> Vec<usize> {
    let mut source: Vec<usize> = (0..trees.len()).collect();
    let cost = |src: usize, i: usize| trees[src].basis_cost(threshold(i, eps));
    for i in 1..trees.len() {
        if strictly_less(cost(source[i - 1], i), cost(source[i], i)) {
            source[i] = source[i - 1];
        }
    }
    for i in (0..trees.len().saturating_sub(1)).rev() {
        if strictly_less(cost(source[i + 1], i), cost(source[i], i)) {
            source[i] = source[i + 1];
        }
    }
    source
}

/// Keeps indices where the buy cost drops by more than `gamma`, then, from
/// the survivors taken in decreasing order, those where the rent cost drops
/// by more than `delta`. Returns `(L_B, L)`, both ascending.
pub fn prune(buy: &[f64], rent: &[f64], gamma: f64, delta: f64) -> (Vec<usize>, Vec<usize>) {
    let mut l_b = Vec::new();
    let mut best_buy = f64::INFINITY;
    for (i, &b) in buy.iter().enumerate() {
        if b < best_buy / gamma {
            l_b.push(i);
            best_buy = b;
        }
    }
    let mut l = Vec::new();
    let mut best_rent = f64::INFINITY;
    for &i in l_b.iter().rev() {
        if rent[i] < best_rent / delta {
            l.push(i);
            best_rent = rent[i];
        }
    }
    l.reverse();
    (l_b, l)
}

/// Output of the layer search.
#[derive(Clone, Debug, Serialize)]
pub struct LayerSet {
    pub eps: f64,
    #[serde(rename = "K")]
    pub k: usize,
    /// Trees after monotonization, one per grid index.
    #[serde(skip)]
    pub trees: Vec<RoutedTree>,
    /// Which solver output each index ended up with.
    pub source: Vec<usize>,
    pub decompositions: Vec<RentBuyDecomposition>,
    pub l_b: Vec<usize>,
    /// Layer indices, ascending.
    pub l: Vec<usize>,
    /// Set when index 0 had to be added to `l` by hand.
    pub forced_zero: bool,
}

impl LayerSet {
    /// Monotonizes solver trees, decomposes them and prunes.
    pub fn from_trees(solved: Vec<RoutedTree>, eps: f64, gamma: f64, delta: f64) -> Self {
        let k = solved.len() - 1;
        let source = monotonize(&solved, eps);
        let trees: Vec<RoutedTree> = source.iter().map(|&s| solved[s].clone()).collect();
        let decompositions: Vec<RentBuyDecomposition> = trees
            .iter()
            .enumerate()
            .map(|(i, t)| t.decompose(i, eps))
            .collect();
        let buy: Vec<f64> = decompositions.iter().map(|d| d.buy).collect();
        let rent: Vec<f64> = decompositions.iter().map(|d| d.rent).collect();
        let (l_b, mut l) = prune(&buy, &rent, gamma, delta);
        // the outermost layer must cover every demand
        let forced_zero = l.first() != Some(&0);
        if forced_zero {
            l.insert(0, 0);
        }
        LayerSet {
            eps,
            k,
            trees,
            source,
            decompositions,
            l_b,
            l,
            forced_zero,
        }
    }

    pub fn buy(&self, i: usize) -> f64 {
        self.decompositions[i].buy
    }

    pub fn rent(&self, i: usize) -> f64 {
        self.decompositions[i].rent
    }

    /// The layer that stands in for grid index `k`: the smallest `i` in `L`
    /// at or above the largest `j` in `L_B` at or below `k`.
    pub fn covering_index(&self, k: usize) -> usize {
        let j = self
            .l_b
            .iter()
            .copied()
            .filter(|&j| j <= k)
            .max()
            .expect("0 is always in L_B");
        self.l
            .iter()
            .copied()
            .find(|&i| i >= j)
            .expect("the largest index of L_B is in L")
    }

    /// Indices `i` where `B_i < B_{i+1}` or `R_i > R_{i+1}` beyond a
    /// relative `slack`.
    pub fn monotonicity_violations(&self, slack: f64) -> Vec<usize> {
        (0..self.k)
            .filter(|&i| {
                let (b0, b1) = (self.buy(i), self.buy(i + 1));
                let (r0, r1) = (self.rent(i), self.rent(i + 1));
                b0 < b1 - slack * b1.abs() || r0 > r1 + slack * r0.abs()
            })
            .collect()
    }
}

/// Solves every grid threshold with `solver`, then builds the layer set.
/// Index `i` uses seed `seed + (i << 32)`.
pub fn find_layers(
    inst: &Instance,
    solver: &dyn SsrobSolver,
    eps: f64,
    gamma: f64,
    delta: f64,
    seed: u64,
    exec: Exec,
) -> Result<LayerSet> {
    let k = compute_k(inst.total_demand(), eps);
    let solved = exec
        .map_indices(k + 1, |i| {
            solver.solve(inst, threshold(i, eps), seed.wrapping_add((i as u64) << 32))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(LayerSet::from_trees(solved, eps, gamma, delta))
}
