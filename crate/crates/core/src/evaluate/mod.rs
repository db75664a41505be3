//! Cost functions, ratio measurement and parameter choice.

mod function;
mod params;

pub use function::{eval_cost, ConcaveFunction};
pub use params::{
    branches, optimal_layer_bound, optimal_parameters, reoptimize, Parameters, Reoptimized,
};

use serde::Serialize;

use crate::error::Result;
use crate::exec::Exec;
use crate::graph::Instance;
use crate::layers::compute_k;
use crate::routing::{threshold, RoutedTree};
use crate::ssrob::SsrobSolver;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexRatio {
    pub index: usize,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "cost_T")]
    pub cost_t: f64,
    pub cost_opt: f64,
    pub ratio: f64,
}

/// Per-basis-function cost ratios of one tree against reference trees.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub eps: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub per_i: Vec<IndexRatio>,
    pub max_ratio: f64,
    pub argmax_i: usize,
    pub lambda_mode: String,
}

/// `a / b` with `0 / 0 = 1`.
pub fn cost_ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else if a > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Compares `t` with `refs[i]` under `min(x, M_i)` for every grid index.
pub fn ratio_against(
    t: &RoutedTree,
    eps: f64,
    refs: &[RoutedTree],
    lambda_mode: impl Into<String>,
) -> RatioReport {
    let per_i: Vec<IndexRatio> = refs
        .iter()
        .enumerate()
        .map(|(index, r)| {
            let m = threshold(index, eps);
            let cost_t = t.basis_cost(m);
            let cost_opt = r.basis_cost(m);
            IndexRatio {
                index,
                m,
                cost_t,
                cost_opt,
                ratio: cost_ratio(cost_t, cost_opt),
            }
        })
        .collect();
    let (argmax_i, max_ratio) = per_i
        .iter()
        .map(|r| (r.index, r.ratio))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    RatioReport {
        eps,
        k: refs.len().saturating_sub(1),
        per_i,
        max_ratio,
        argmax_i,
        lambda_mode: lambda_mode.into(),
    }
}

/// Solves every basis function with `oracle` and reports
/// `max_i A_i(T) / A_i(T_i*)`. With a heuristic oracle the denominators are
/// upper bounds on the optimum, so the ratios are not certified.
pub fn simultaneous_ratio(
    t: &RoutedTree,
    inst: &Instance,
    eps: f64,
    oracle: &dyn SsrobSolver,
    seed: u64,
    exec: Exec,
) -> Result<(RatioReport, Vec<RoutedTree>)> {
    let k = compute_k(inst.total_demand(), eps);
    let refs = exec
        .map_indices(k + 1, |i| oracle.solve(inst, threshold(i, eps), seed))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((ratio_against(t, eps, &refs, oracle.quality().to_string()), refs))
}
