//! Command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::builder::SimultaneousTree;
use crate::error::{Error, Result};
use crate::evaluate::{optimal_parameters, Parameters};
use crate::exec::Exec;
use crate::generate::{corpus, GenSpec};
use crate::graph::{load_instance, Instance};
use crate::pipeline::{run_pipeline, OracleStatus, PipelineConfig, Report};
use crate::ssrob::{ExactSolver, SampleAugment, SsrobSolver, DEFAULT_TRIALS};

#[derive(Debug, Parser)]
#[command(name = "onetree", version, about = "One aggregation tree for every concave cost")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the tree for one instance, or for every file under --corpus.
    Run(RunConfig),
    /// Write a seeded corpus of small random instances.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverName {
    Exact,
    SampleAugment,
}

#[derive(Clone, Debug, Args)]
pub struct RunConfig {
    /// Instance file.
    #[arg(required_unless_present = "corpus", conflicts_with = "corpus")]
    pub instance: Option<PathBuf>,

    /// Directory of instance files to run as a batch.
    #[arg(long, value_name = "DIR")]
    pub corpus: Option<PathBuf>,

    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,

    /// LAST stretch [default: golden ratio].
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Buy-cost drop between layers [default: 2].
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Rent-cost growth between layers [default: 2*alpha + 2].
    #[arg(long)]
    pub delta: Option<f64>,

    #[arg(long, value_enum, default_value = "sample-augment")]
    pub ssrob: SolverName,

    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Compare against exhaustive optima (small instances only).
    #[arg(long)]
    pub oracle: bool,

    /// Tree output; `.dot` writes Graphviz, anything else an edge list.
    #[arg(long, value_name = "PATH")]
    pub out_tree: Option<PathBuf>,

    /// Report JSON (corpus mode also writes a CSV next to it).
    #[arg(long, value_name = "PATH")]
    pub out_report: Option<PathBuf>,

    /// Include zero-flow edges in DOT output, dashed.
    #[arg(long)]
    pub dot_zero_flow: bool,

    /// Disable the thread pool.
    #[arg(long)]
    pub sequential: bool,

    #[arg(short, long, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

impl RunConfig {
    pub fn parameters(&self) -> Result<Parameters> {
        let opt = optimal_parameters(self.eps);
        let alpha = self.alpha.unwrap_or(opt.alpha);
        let gamma = self.gamma.unwrap_or(opt.gamma);
        let delta = self.delta.unwrap_or(2.0 * alpha + 2.0);
        if self.trials == 0 {
            return Err(Error::InvalidParameters("trials must be at least 1".into()));
        }
        Parameters::with_tight_beta(self.eps, alpha, gamma, delta)
    }

    pub fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }

    pub fn solver(&self) -> Box<dyn SsrobSolver> {
        match self.ssrob {
            SolverName::Exact => Box::new(ExactSolver { exec: self.exec() }),
            SolverName::SampleAugment => Box::new(SampleAugment {
                trials: self.trials,
                exec: self.exec(),
            }),
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 7)]
    pub max_vertices: usize,
    #[arg(long, default_value_t = 8)]
    pub max_demand: u64,
    #[arg(long, default_value_t = 9)]
    pub max_length: u32,
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Run(cfg) if cfg.corpus.is_some() => run_corpus(&cfg),
        Command::Run(cfg) => run_single(&cfg),
        Command::Generate(args) => generate(&args).map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance> {
    load_instance(&fs::read_to_string(path)?)
}

fn run_single(cfg: &RunConfig) -> Result<i32> {
    let params = cfg.parameters()?;
    let path = cfg.instance.as_ref().expect("clap requires an instance");
    let inst = read_instance(path)?;
    let solver = cfg.solver();
    let started = Instant::now();
    let out = run_pipeline(
        &inst,
        &PipelineConfig {
            params,
            solver: solver.as_ref(),
            seed: cfg.seed,
            oracle: cfg.oracle,
            exec: cfg.exec(),
        },
    )?;
    if cfg.verbose > 0 {
        eprintln!(
            "{}: n={} m={} D={} K={} L={:?} in {:.3}s",
            path.display(),
            inst.vertex_count(),
            inst.graph().edge_count(),
            inst.total_demand(),
            out.layers.k,
            out.layers.l,
            started.elapsed().as_secs_f64()
        );
        for r in &out.built.rounds {
            eprintln!(
                "  layer {}: host {}v/{}e, added {} edges, stretch {:.4}, weight ratio {:.4}",
                r.index,
                r.host_vertices,
                r.host_edges,
                r.added.len(),
                r.last_max_stretch,
                r.last_weight_ratio
            );
        }
    }

    if let Some(tree_path) = &cfg.out_tree {
        let text = if tree_path.extension().is_some_and(|e| e == "dot") {
            to_dot(&inst, &out.built, cfg.dot_zero_flow)
        } else {
            to_edge_list(&out.built)
        };
        fs::write(tree_path, text)?;
    }
    let json = out.report.to_json()?;
    match &cfg.out_report {
        Some(p) => fs::write(p, json + "\n")?,
        None => println!("{json}"),
    }

    if out.report.passed() {
        Ok(0)
    } else {
        for v in &out.report.checks.violations {
            eprintln!("invariant violated: {v}");
        }
        Ok(3)
    }
}

/// `id u v length flow layer` per edge, `u` the endpoint nearer the root.
pub fn to_edge_list(st: &SimultaneousTree) -> String {
    let mut out = String::from("# id parent child length flow layer\n");
    for e in st.tree.edges() {
        let layer = st.round_of(e.id).map(|k| st.rounds[k].index);
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            e.id,
            e.parent,
            e.child,
            e.length,
            e.flow,
            layer.map_or("-".to_string(), |l| l.to_string())
        );
    }
    out
}

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

/// Graphviz rendering; edges are coloured by the round that added them.
pub fn to_dot(inst: &Instance, st: &SimultaneousTree, zero_flow: bool) -> String {
    let mut out = String::from("graph onetree {\n  node [shape=circle];\n");
    let mut vertices = st.tree.vertices();
    vertices.extend(inst.demands().keys());
    for v in vertices {
        let d = inst.demand(v);
        let shape = if v == inst.root() { ", shape=doublecircle" } else { "" };
        let label = if d > 0 { format!("{v}\\nd={d}") } else { v.to_string() };
        let _ = writeln!(out, "  {v} [label=\"{label}\"{shape}];");
    }
    for e in st.tree.edges() {
        if e.flow == 0 && !zero_flow {
            continue;
        }
        let round = st.round_of(e.id).unwrap_or(0);
        let style = if e.flow == 0 { ", style=dashed" } else { "" };
        let _ = writeln!(
            out,
            "  {} -- {} [label=\"{}/{}\", color=\"{}\"{}];",
            e.parent,
            e.child,
            e.length,
            e.flow,
            PALETTE[round % PALETTE.len()],
            style
        );
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusRow {
    pub name: String,
    pub status: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub demand: Option<u64>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub layers: Option<usize>,
    pub max_ratio: Option<f64>,
    pub argmax_i: Option<usize>,
    pub lambda_emp: Option<f64>,
    pub c_b_observed: Option<f64>,
    pub c_r_observed: Option<f64>,
}

impl CorpusRow {
    fn failed(name: String, status: String) -> Self {
        CorpusRow {
            name,
            status,
            n: None,
            m: None,
            demand: None,
            k: None,
            layers: None,
            max_ratio: None,
            argmax_i: None,
            lambda_emp: None,
            c_b_observed: None,
            c_r_observed: None,
        }
    }

    fn from_report(name: String, inst: &Instance, report: &Report) -> Self {
        let status = if !report.passed() {
            "invariant violation"
        } else if report.oracle == OracleStatus::Skipped {
            "oracle skipped"
        } else {
            "ok"
        };
        CorpusRow {
            name,
            status: status.into(),
            n: Some(inst.vertex_count()),
            m: Some(inst.graph().edge_count()),
            demand: Some(inst.total_demand()),
            k: Some(report.k),
            layers: Some(report.layers.l.len()),
            max_ratio: Some(report.max_ratio),
            argmax_i: Some(report.argmax_i),
            lambda_emp: report.lambda_emp,
            c_b_observed: Some(report.checks.layer_bounds.c_b_observed),
            c_r_observed: Some(report.checks.layer_bounds.c_r_observed),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusSummary {
    pub instances: usize,
    pub aggregate_max_ratio: f64,
    pub errors: usize,
    pub invariant_failures: usize,
    pub oracle_skipped: usize,
    pub params: Parameters,
    pub rows: Vec<CorpusRow>,
}

impl CorpusSummary {
    pub fn exit_code(&self) -> i32 {
        if self.invariant_failures > 0 {
            3
        } else if self.errors > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            writer
                .serialize(row)
                .map_err(|e| Error::Invariant(format!("csv: {e}")))?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Invariant(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Runs every regular file in `dir` (sorted by name). Per-file failures are
/// recorded as rows and do not stop the batch.
pub fn corpus_summary(dir: &Path, cfg: &RunConfig) -> Result<CorpusSummary> {
    let params = cfg.parameters()?;
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidParameters(format!(
            "no instance files in {}",
            dir.display()
        )));
    }
    let solver = cfg.solver();
    let exec = cfg.exec();
    let rows: Vec<CorpusRow> = exec.map_slice(&files, |path| {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let inst = match read_instance(path) {
            Ok(inst) => inst,
            Err(e) => return CorpusRow::failed(name, format!("error: {e}")),
        };
        let run = run_pipeline(
            &inst,
            &PipelineConfig {
                params,
                solver: solver.as_ref(),
                seed: cfg.seed,
                oracle: cfg.oracle,
                exec,
            },
        );
        match run {
            Ok(out) => CorpusRow::from_report(name, &inst, &out.report),
            Err(e @ Error::Invariant(_)) => CorpusRow::failed(name, format!("invariant violation: {e}")),
            Err(e) => CorpusRow::failed(name, format!("error: {e}")),
        }
    });

    let count = |pred: &dyn Fn(&CorpusRow) -> bool| rows.iter().filter(|r| pred(r)).count();
    Ok(CorpusSummary {
        instances: rows.len(),
        aggregate_max_ratio: rows
            .iter()
            .filter_map(|r| r.max_ratio)
            .fold(f64::NEG_INFINITY, f64::max),
        errors: count(&|r| r.status.starts_with("error")),
        invariant_failures: count(&|r| r.status.starts_with("invariant")),
        oracle_skipped: count(&|r| r.status == "oracle skipped"),
        params,
        rows,
    })
}

fn run_corpus(cfg: &RunConfig) -> Result<i32> {
    let dir = cfg.corpus.as_ref().expect("corpus mode");
    let summary = corpus_summary(dir, cfg)?;
    let csv = summary.to_csv()?;
    match &cfg.out_report {
        Some(p) => {
            fs::write(p, serde_json::to_string_pretty(&summary)? + "\n")?;
            fs::write(p.with_extension("csv"), &csv)?;
        }
        None => print!("{csv}"),
    }
    eprintln!(
        "{} instances, aggregate max ratio {:.6}, {} errors, {} invariant failures, {} oracle skipped",
        summary.instances,
        summary.aggregate_max_ratio,
        summary.errors,
        summary.invariant_failures,
        summary.oracle_skipped
    );
    Ok(summary.exit_code())
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let spec = GenSpec {
        max_vertices: args.max_vertices.max(2),
        max_demand: args.max_demand.max(1),
        max_length: args.max_length.max(1),
        ..GenSpec::desk()
    };
    fs::create_dir_all(&args.out)?;
    for (name, inst) in corpus(args.seed, args.count, &spec) {
        fs::write(args.out.join(format!("{name}.graph")), inst.to_text())?;
    }
    Ok(())
}
