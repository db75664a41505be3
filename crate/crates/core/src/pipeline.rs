//! End-to-end run: layer search, tree construction, self-checks and the
//! optional comparison against exact optima.

use serde::Serialize;

use crate::builder::{
    build_tree, check_layer_bounds, check_structure_bound, LayerBoundReport, LayerRound,
    SimultaneousTree, StructureRow,
};
use crate::error::{Error, Result};
use crate::evaluate::{cost_ratio, ratio_against, IndexRatio, Parameters};
use crate::exec::Exec;
use crate::graph::{EdgeId, Instance};
use crate::layers::{find_layers, LayerSet};
use crate::routing::threshold;
use crate::ssrob::{oracle_size, ExactSolver, SsrobSolver, ORACLE_TREE_LIMIT};

/// Relative slack for the end-to-end ratio bound.
pub const RATIO_SLACK: f64 = 1e-9;

pub struct PipelineConfig<'a> {
    pub params: Parameters,
    pub solver: &'a dyn SsrobSolver,
    pub seed: u64,
    /// Compare against exact optima when the instance is small enough.
    pub oracle: bool,
    pub exec: Exec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Off,
    Exact,
    Skipped,
}

pub struct PipelineOutput {
    pub layers: LayerSet,
    pub built: SimultaneousTree,
    pub report: Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsReport {
    #[serde(flatten)]
    pub params: Parameters,
    #[serde(rename = "c_B")]
    pub c_b: f64,
    #[serde(rename = "c_R")]
    pub c_r: f64,
    pub layer_bound: f64,
    pub headline_ratio: f64,
}

impl From<Parameters> for ParamsReport {
    fn from(params: Parameters) -> Self {
        ParamsReport {
            params,
            c_b: params.c_b(),
            c_r: params.c_r(),
            layer_bound: params.layer_bound(),
            headline_ratio: params.headline_ratio(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerTrace {
    pub l_b: Vec<usize>,
    pub l: Vec<usize>,
    pub forced_zero: bool,
    pub buy: Vec<f64>,
    pub rent: Vec<f64>,
    pub rounds: Vec<LayerRound>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Checks {
    pub monotonicity_violations: Vec<usize>,
    pub layer_bounds: LayerBoundReport,
    pub structure: Vec<StructureRow>,
    /// `(1+eps) * lambda_emp * layer_bound`; only with the oracle.
    pub ratio_bound: Option<f64>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeSummary {
    pub edges: Vec<EdgeId>,
    pub total_length: f64,
}

/// The run report. `per_i` compares the final tree with exact optima when
/// `reference` is `oracle`, otherwise with the solver's own basis trees.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub eps: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub per_i: Vec<IndexRatio>,
    pub max_ratio: f64,
    pub argmax_i: usize,
    pub params: ParamsReport,
    pub lambda_mode: String,
    pub solver: String,
    pub reference: &'static str,
    pub oracle: OracleStatus,
    /// `max_i A_i(T_i) / A_i(T_i*)` over the monotonized solver trees.
    pub lambda_emp: Option<f64>,
    pub tree: TreeSummary,
    pub layers: LayerTrace,
    pub checks: Checks,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.violations.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn run_pipeline(inst: &Instance, cfg: &PipelineConfig<'_>) -> Result<PipelineOutput> {
    let p = cfg.params;
    p.validate()?;
    let layers = find_layers(inst, cfg.solver, p.eps, p.gamma, p.delta, cfg.seed, cfg.exec)?;
    let built = build_tree(inst, &layers, p.alpha)?;

    let monotonicity_violations = layers.monotonicity_violations(RATIO_SLACK);
    let layer_bounds = check_layer_bounds(&built, &layers, &p);
    let structure = check_structure_bound(&built, &layers, &p);

    let mut violations = Vec::new();
    if !monotonicity_violations.is_empty() {
        violations.push(format!(
            "buy/rent monotonicity broken at indices {monotonicity_violations:?}"
        ));
    }
    for row in &layer_bounds.rows {
        if !row.buy_ok {
            violations.push(format!(
                "layer {}: buy weight {} exceeds {}",
                row.index, row.buy_weight, row.buy_bound
            ));
        }
        if !row.rent_ok {
            violations.push(format!(
                "layer {}: rent cost {} exceeds {}",
                row.index, row.rent_cost, row.rent_bound
            ));
        }
    }
    for row in structure.iter().filter(|r| !r.ok) {
        violations.push(format!(
            "index {}: A(T) = {} exceeds {} times the basis tree",
            row.index,
            row.cost_t,
            p.layer_bound()
        ));
    }

    let want_oracle = cfg.oracle && oracle_size(inst) <= ORACLE_TREE_LIMIT;
    let oracle_status = match (cfg.oracle, want_oracle) {
        (false, _) => OracleStatus::Off,
        (true, true) => OracleStatus::Exact,
        (true, false) => OracleStatus::Skipped,
    };

    let (ratio, lambda_emp, ratio_bound) = if want_oracle {
        let exact = ExactSolver { exec: cfg.exec };
        let optima = cfg
            .exec
            .map_indices(layers.k + 1, |i| exact.solve(inst, threshold(i, p.eps), 0))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let ratio = ratio_against(&built.tree, p.eps, &optima, cfg.solver.quality().to_string());
        let lambda_emp = layers
            .trees
            .iter()
            .zip(&optima)
            .enumerate()
            .map(|(i, (t, o))| {
                let m = threshold(i, p.eps);
                cost_ratio(t.basis_cost(m), o.basis_cost(m))
            })
            .fold(1.0f64, f64::max);
        let bound = (1.0 + p.eps) * lambda_emp * p.layer_bound();
        if ratio.max_ratio > bound * (1.0 + RATIO_SLACK) {
            violations.push(format!(
                "max ratio {} exceeds {}",
                ratio.max_ratio, bound
            ));
        }
        (ratio, Some(lambda_emp), Some(bound))
    } else {
        let ratio = ratio_against(
            &built.tree,
            p.eps,
            &layers.trees,
            cfg.solver.quality().to_string(),
        );
        (ratio, None, None)
    };

    let report = Report {
        eps: p.eps,
        k: layers.k,
        per_i: ratio.per_i,
        max_ratio: ratio.max_ratio,
        argmax_i: ratio.argmax_i,
        params: p.into(),
        lambda_mode: ratio.lambda_mode,
        solver: cfg.solver.name().to_string(),
        reference: if want_oracle { "oracle" } else { "basis_trees" },
        oracle: oracle_status,
        lambda_emp,
        tree: TreeSummary {
            edges: built.tree.edge_ids(),
            total_length: built.tree.total_length(),
        },
        layers: LayerTrace {
            l_b: layers.l_b.clone(),
            l: layers.l.clone(),
            forced_zero: layers.forced_zero,
            buy: layers.decompositions.iter().map(|d| d.buy).collect(),
            rent: layers.decompositions.iter().map(|d| d.rent).collect(),
            rounds: built.rounds.clone(),
        },
        checks: Checks {
            monotonicity_violations,
            layer_bounds,
            structure,
            ratio_bound,
            violations,
        },
    };
    Ok(PipelineOutput {
        layers,
        built,
        report,
    })
}

/// Runs the pipeline and turns failed self-checks into an error.
pub fn run_checked(inst: &Instance, cfg: &PipelineConfig<'_>) -> Result<PipelineOutput> {
    let out = run_pipeline(inst, cfg)?;
    if !out.report.passed() {
        return Err(Error::Invariant(out.report.checks.violations.join("; ")));
    }
    Ok(out)
}
