//! Command-line front end: dataset ingestion, algorithm dispatch, and
//! serialization.
//!
//! File formats are deliberately plain. A dataset is described by a JSON
//! manifest naming the variables and, per regime, the intervention targets
//! and a headerless CSV of samples (columns in manifest variable order, data
//! paths relative to the manifest). Graphs travel as two-column
//! `source,target` CSVs of variable names, one arrow per line, sorted
//! lexicographically. Every subcommand is deterministic given its flags:
//! all randomness flows from `--seed`, which defaults to the fixed value 7
//! rather than to entropy, so repeated invocations are byte-identical.
//!
//! Exit codes: 0 success, 1 a requested check did not pass (`oracle-check`
//! with a missed recovery), 2 usage or runtime error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::citest::{DataOracle, DsepOracle, RegimeData};
use crate::error::Error;
use crate::eval::{
    consistency_sweep, imec_recovered, random_guess_baseline, structural_metrics,
    SweepAlgorithm, SweepOptions, SweepScenario,
};
use crate::graph::{Dag, InterventionFamily, NodeSet};
use crate::imap::Permutation;
use crate::rng;
use crate::score::ScoreConfig;
use crate::search::{igsp, scored_search, Objective, SearchConfig, SearchResult};
use crate::sem::{random_dag, random_weights, sample_with, InterventionDist};

/// RNG stream reserved for drawing the random structure itself, keeping it
/// disjoint from the per-regime sampling streams (regime `k` uses stream
/// `k`).
const STRUCTURE_STREAM: u64 = u64::MAX;

/// Errors with enough file/line context to act on.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: invalid JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: regime 0 must be observational (no targets)")]
    ObservationalRegime { path: PathBuf },
    #[error("{path}: no regimes declared")]
    NoRegimes { path: PathBuf },
    #[error("{path}: regime {regime} target {name:?} is not a declared variable")]
    UnknownTarget { path: PathBuf, regime: usize, name: String },
    #[error("{path}: duplicate variable name {name:?}")]
    DuplicateVariable { path: PathBuf, name: String },
    #[error("{path}: file contains no data rows")]
    EmptyData { path: PathBuf },
    #[error("{path}:{line}: expected {want} columns, found {have}")]
    CsvColumns { path: PathBuf, line: usize, want: usize, have: usize },
    #[error("{path}:{line}:{column}: cannot parse {cell:?} as a number")]
    BadNumber { path: PathBuf, line: usize, column: usize, cell: String },
    #[error("{path}:{line}: expected `source,target`, found {found:?}")]
    BadEdge { path: PathBuf, line: usize, found: String },
    #[error("{path}:{line}: unknown variable {name:?}")]
    UnknownVariable { path: PathBuf, line: usize, name: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] Error),
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.into(), source })
}

/// The JSON description of a multi-regime dataset.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub variables: Vec<String>,
    pub regimes: Vec<RegimeEntry>,
    /// Free-form provenance echoed by whatever produced the dataset.
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub options: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegimeEntry {
    pub targets: Vec<String>,
    pub data: String,
}

impl Manifest {
    /// Parses and structurally validates a manifest; data files are not
    /// touched.
    pub fn from_path(path: &Path) -> CliResult<Manifest> {
        let text = read_file(path)?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|source| CliError::Json { path: path.into(), source })?;
        let mut seen = std::collections::BTreeSet::new();
        for name in &manifest.variables {
            if !seen.insert(name.clone()) {
                return Err(CliError::DuplicateVariable { path: path.into(), name: name.clone() });
            }
        }
        if manifest.regimes.is_empty() {
            return Err(CliError::NoRegimes { path: path.into() });
        }
        if !manifest.regimes[0].targets.is_empty() {
            return Err(CliError::ObservationalRegime { path: path.into() });
        }
        for (regime, entry) in manifest.regimes.iter().enumerate() {
            for name in &entry.targets {
                if !manifest.variables.contains(name) {
                    return Err(CliError::UnknownTarget {
                        path: path.into(),
                        regime,
                        name: name.clone(),
                    });
                }
            }
        }
        Ok(manifest)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn family(&self) -> CliResult<InterventionFamily> {
        let targets: Vec<NodeSet> = self
            .regimes
            .iter()
            .map(|entry| {
                entry
                    .targets
                    .iter()
                    .map(|name| self.index_of(name).expect("validated target"))
                    .collect()
            })
            .collect();
        Ok(InterventionFamily::new(targets)?)
    }
}

/// Loads the manifest and every regime's samples. Returns the family, the
/// per-regime data (regime 0 first), and the ordered variable names, whose
/// positions are the node indices used everywhere else.
pub fn load_dataset(path: &Path) -> CliResult<(InterventionFamily, Vec<RegimeData>, Vec<String>)> {
    let manifest = Manifest::from_path(path)?;
    let family = manifest.family()?;
    let base = path.parent().unwrap_or(Path::new(""));
    let p = manifest.variables.len();
    let mut dataset = Vec::with_capacity(manifest.regimes.len());
    for entry in &manifest.regimes {
        let data_path = base.join(&entry.data);
        let rows = read_samples_csv(&data_path, p)?;
        if rows.is_empty() {
            return Err(CliError::EmptyData { path: data_path });
        }
        dataset.push(RegimeData::from_rows(&rows)?);
    }
    Ok((family, dataset, manifest.variables))
}

/// Headerless CSV of reals with exactly `p` columns per row.
pub fn read_samples_csv(path: &Path, p: usize) -> CliResult<Vec<Vec<f64>>> {
    let text = read_file(path)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != p {
            return Err(CliError::CsvColumns {
                path: path.into(),
                line: idx + 1,
                want: p,
                have: cells.len(),
            });
        }
        let mut row = Vec::with_capacity(p);
        for (col, cell) in cells.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| CliError::BadNumber {
                path: path.into(),
                line: idx + 1,
                column: col + 1,
                cell: cell.trim().to_string(),
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes samples with `Display` formatting, whose shortest-round-trip
/// digits make read-back exact.
pub fn write_samples_csv(path: &Path, data: &RegimeData) -> CliResult<()> {
    let m = data.samples();
    let mut out = String::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", m[(r, c)]);
        }
        out.push('\n');
    }
    write_file(path, &out)
}

/// Reads a `source,target` edge list into a DAG over the named variables.
/// An empty file is the empty graph.
pub fn read_edges(path: &Path, names: &[String]) -> CliResult<Dag> {
    let text = read_file(path)?;
    let index: BTreeMap<&str, usize> =
        names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut arrows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let Some((src, dst)) = line.split_once(',') else {
            return Err(CliError::BadEdge {
                path: path.into(),
                line: idx + 1,
                found: line.to_string(),
            });
        };
        let resolve = |name: &str| -> CliResult<usize> {
            index.get(name.trim()).copied().ok_or_else(|| CliError::UnknownVariable {
                path: path.into(),
                line: idx + 1,
                name: name.trim().to_string(),
            })
        };
        arrows.push((resolve(src)?, resolve(dst)?));
    }
    Ok(Dag::new(names.len(), arrows)?)
}

/// Writes an edge list, lexicographically sorted on the `source,target`
/// lines so equal graphs serialize identically.
pub fn write_edges(path: &Path, dag: &Dag, names: &[String]) -> CliResult<()> {
    let mut lines: Vec<String> = dag
        .arrows()
        .map(|(i, j)| format!("{},{}", names[i], names[j]))
        .collect();
    lines.sort();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    write_file(path, &out)
}

fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("X{i}")).collect()
}

#[derive(Parser, Debug)]
#[command(
    name = "igsp",
    version,
    about = "Causal structure discovery from observational and interventional data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw a random linear Gaussian model and write a multi-regime dataset.
    Simulate(SimulateArgs),
    /// Estimate a DAG from a dataset manifest.
    Run(RunArgs),
    /// Compare an estimated edge list against the truth.
    Evaluate(EvaluateArgs),
    /// Recovery proportions over a grid of cutoffs and sample sizes.
    Sweep(SweepArgs),
    /// Self-test: run the search with an exact d-separation oracle against a
    /// known truth; exits 1 if any start misses the equivalence class.
    OracleCheck(OracleCheckArgs),
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Number of variables.
    #[arg(long)]
    pub p: usize,
    /// Expected neighborhood size of the random DAG.
    #[arg(long, default_value_t = 1.5)]
    pub density: f64,
    /// Number of interventional regimes beyond the observational one.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Nodes per interventional target (sampled without replacement).
    #[arg(long, default_value_t = 1)]
    pub target_size: usize,
    /// Samples per regime.
    #[arg(long)]
    pub n: usize,
    /// Lower magnitude bound for edge weights.
    #[arg(long, default_value_t = 0.5)]
    pub weight_floor: f64,
    /// Mean of the intervention draw.
    #[arg(long, default_value_t = 0.0)]
    pub intervention_mean: f64,
    /// Standard deviation of the intervention draw.
    #[arg(long, default_value_t = 1.0)]
    pub intervention_sd: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Output directory for manifest.json, regime_<k>.csv, truth.edges.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmChoice {
    /// CI-oracle-driven sparsity search.
    Igsp,
    /// Score-driven search with slack.
    Alg1,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Dataset manifest (required unless --from-report).
    #[arg(long, required_unless_present = "from_report")]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgorithmChoice::Igsp)]
    pub algorithm: AlgorithmChoice,
    /// CI-test cutoff (igsp only).
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Absolute slack for alg1; overrides --delta-factor.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Slack as a multiple of the summed penalty weights (alg1 only).
    #[arg(long, default_value_t = 2.0)]
    pub delta_factor: f64,
    /// Depth bound for the search walks; 0 removes the bound.
    #[arg(long, default_value_t = 4)]
    pub max_depth: u64,
    /// Independent runs; the first starts from a seed-derived permutation,
    /// the rest from fresh random ones.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Estimated edge list path; the report lands at <out>.report.json.
    #[arg(long, required_unless_present = "from_report")]
    pub out: Option<PathBuf>,
    /// Re-run the exact configuration embedded in an earlier run report.
    #[arg(long, conflicts_with_all = ["manifest", "out"])]
    pub from_report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Estimated edge list.
    #[arg(long)]
    pub estimate: PathBuf,
    /// Ground-truth edge list.
    #[arg(long)]
    pub truth: PathBuf,
    /// Manifest supplying variable names and the intervention family.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Write the metrics JSON here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 1.5)]
    pub density: f64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub target_size: usize,
    #[arg(long, default_value_t = 0.5)]
    pub weight_floor: f64,
    /// Per-regime sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// CI-test cutoffs, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.05])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = AlgorithmChoice::Igsp)]
    pub algorithm: AlgorithmChoice,
    #[arg(long, default_value_t = 2.0)]
    pub delta_factor: f64,
    /// Depth bound for the search walks; 0 removes the bound.
    #[arg(long, default_value_t = 4)]
    pub max_depth: u64,
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    /// Replace CI tests by exact d-separation on the sampled truth.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleCheckArgs {
    /// Ground-truth edge list.
    #[arg(long)]
    pub truth: PathBuf,
    /// Manifest supplying variable names and the intervention family.
    #[arg(long, conflicts_with_all = ["vars", "targets"])]
    pub manifest: Option<PathBuf>,
    /// Comma-separated variable names (default: the names in the truth
    /// file, sorted).
    #[arg(long, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,
    /// Interventional targets: regimes separated by ';', nodes by ','
    /// (e.g. "X2;X3,X4"). Omit for an observational-only family.
    #[arg(long)]
    pub targets: Option<String>,
    /// Number of starting permutations to test.
    #[arg(long, default_value_t = 5)]
    pub perms: usize,
    /// Depth bound; 0 (the default here) removes it, as exact oracles want.
    #[arg(long, default_value_t = 0)]
    pub max_depth: u64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

/// Everything a `run` needs, embedded in its report so the run can be
/// reproduced from the report alone.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: AlgorithmChoice,
    pub manifest: PathBuf,
    pub out: PathBuf,
    pub alpha: f64,
    /// Resolved absolute slack (alg1); None for igsp.
    pub delta: Option<f64>,
    pub delta_factor: f64,
    /// 0 means unbounded.
    pub max_depth: u64,
    pub restarts: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportObjective {
    Sparsity { arrows: usize, contradicting: usize },
    Score { score: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub arrow_count: usize,
    pub objective: ReportObjective,
}

fn depth_option(raw: u64) -> Option<usize> {
    (raw != 0).then_some(raw as usize)
}

/// Executes a parsed subcommand; returns the process exit code.
pub fn execute(command: Command) -> CliResult<i32> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Run(args) => run(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Sweep(args) => sweep(args),
        Command::OracleCheck(args) => oracle_check(args),
    }
}

fn simulate(args: SimulateArgs) -> CliResult<i32> {
    let mut gen = rng::derive(args.seed, STRUCTURE_STREAM);
    let truth = random_dag(args.p, args.density, &mut gen)?;
    let model = random_weights(&truth, args.weight_floor, &mut gen)?;
    let mut targets = vec![NodeSet::new()];
    if args.k > 0 && (args.target_size == 0 || args.target_size > args.p) {
        return Err(CliError::Invalid(format!(
            "--target-size must lie in 1..={}, got {}",
            args.p, args.target_size
        )));
    }
    for _ in 0..args.k {
        let picked = rand::seq::index::sample(&mut gen, args.p, args.target_size);
        targets.push(picked.into_iter().collect());
    }
    let family = InterventionFamily::new(targets)?;
    let dist = InterventionDist { mean: args.intervention_mean, sd: args.intervention_sd };

    fs::create_dir_all(&args.out)
        .map_err(|source| CliError::Io { path: args.out.clone(), source })?;
    let names = default_names(args.p);
    write_edges(&args.out.join("truth.edges"), &truth, &names)?;

    let mut regimes = Vec::new();
    for (k, target) in family.targets().iter().enumerate() {
        let mut stream = rng::derive(args.seed, k as u64);
        let data = sample_with(&model, args.n, target, dist, &mut stream)?;
        let file = format!("regime_{k}.csv");
        write_samples_csv(&args.out.join(&file), &data)?;
        regimes.push(RegimeEntry {
            targets: target.iter().map(|&v| names[v].clone()).collect(),
            data: file,
        });
    }

    let manifest = Manifest {
        variables: names,
        regimes,
        options: json!({
            "generator": {
                "p": args.p,
                "density": args.density,
                "k": args.k,
                "target_size": args.target_size,
                "n": args.n,
                "weight_floor": args.weight_floor,
                "intervention_mean": args.intervention_mean,
                "intervention_sd": args.intervention_sd,
                "seed": args.seed,
                "truth": "truth.edges",
            }
        }),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&args.out.join("manifest.json"), &(text + "\n"))?;
    println!(
        "wrote {} variables, {} regimes, {} samples each to {}",
        args.p,
        family.regime_count(),
        args.n,
        args.out.display()
    );
    Ok(0)
}

fn run(args: RunArgs) -> CliResult<i32> {
    let config = match &args.from_report {
        Some(report_path) => {
            let text = read_file(report_path)?;
            let report: RunReport = serde_json::from_str(&text)
                .map_err(|source| CliError::Json { path: report_path.clone(), source })?;
            report.config
        }
        None => RunConfig {
            algorithm: args.algorithm,
            manifest: args.manifest.clone().expect("required by clap"),
            out: args.out.clone().expect("required by clap"),
            alpha: args.alpha,
            delta: args.delta,
            delta_factor: args.delta_factor,
            max_depth: args.max_depth,
            restarts: args.restarts,
            seed: args.seed,
        },
    };

    let (family, dataset, names) = load_dataset(&config.manifest)?;
    let p = names.len();
    let start = Permutation::random(p, &mut rng::derive(config.seed, 0));
    let search = SearchConfig {
        max_depth: depth_option(config.max_depth),
        max_restarts: config.restarts,
        rng_seed: config.seed,
    };
    let (result, resolved_delta): (SearchResult, Option<f64>) = match config.algorithm {
        AlgorithmChoice::Igsp => {
            let oracle = DataOracle::new(dataset, config.alpha)?;
            (igsp(&oracle, &family, &start, &search)?, None)
        }
        AlgorithmChoice::Alg1 => {
            let sizes: Vec<usize> = dataset.iter().map(RegimeData::n).collect();
            let base = ScoreConfig::from_sample_sizes(&sizes)?;
            let cfg = match config.delta {
                Some(delta) => base.with_delta(delta)?,
                None => {
                    let sum = base.lambda_sum();
                    base.with_delta(config.delta_factor * sum)?
                }
            };
            let delta = cfg.delta();
            (scored_search(&dataset, &family, &start, &cfg, &search)?, Some(delta))
        }
    };

    write_edges(&config.out, &result.dag, &names)?;
    let report = RunReport {
        config: RunConfig { delta: resolved_delta, ..config.clone() },
        arrow_count: result.dag.arrow_count(),
        objective: match result.objective {
            Objective::Sparsity { arrows, contradicting } => {
                ReportObjective::Sparsity { arrows, contradicting }
            }
            Objective::Score(score) => ReportObjective::Score { score },
        },
    };
    let report_path = PathBuf::from(format!("{}.report.json", config.out.display()));
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    write_file(&report_path, &(text + "\n"))?;
    println!(
        "estimated {} arrows -> {} (report: {})",
        result.dag.arrow_count(),
        config.out.display(),
        report_path.display()
    );
    Ok(0)
}

fn evaluate(args: EvaluateArgs) -> CliResult<i32> {
    let manifest = Manifest::from_path(&args.manifest)?;
    let family = manifest.family()?;
    let estimate = read_edges(&args.estimate, &manifest.variables)?;
    let truth = read_edges(&args.truth, &manifest.variables)?;
    let metrics = structural_metrics(&estimate, &truth)?;
    let recovered = imec_recovered(&estimate, &truth, &family)?;
    let baseline = random_guess_baseline(&truth, estimate.arrow_count())?;
    let output = json!({
        "estimate": args.estimate.display().to_string(),
        "truth": args.truth.display().to_string(),
        "metrics": metrics,
        "imec_recovered": recovered,
        "random_guess_baseline": baseline,
    });
    let text = serde_json::to_string_pretty(&output).expect("metrics serialize") + "\n";
    print!("{text}");
    if let Some(out) = &args.out {
        write_file(out, &text)?;
    }
    Ok(0)
}

fn sweep(args: SweepArgs) -> CliResult<i32> {
    let scenario = SweepScenario {
        p: args.p,
        density: args.density,
        interventional_regimes: args.k,
        target_size: args.target_size,
        weight_floor: args.weight_floor,
        sample_sizes: args.n.clone(),
    };
    let options = SweepOptions {
        algorithm: match args.algorithm {
            AlgorithmChoice::Igsp => SweepAlgorithm::Igsp,
            AlgorithmChoice::Alg1 => SweepAlgorithm::Scored { delta_factor: args.delta_factor },
        },
        search: SearchConfig {
            max_depth: depth_option(args.max_depth),
            max_restarts: args.restarts,
            rng_seed: args.seed,
        },
        use_dsep_oracle: args.oracle,
    };
    let rows = consistency_sweep(&scenario, &options, &args.alpha, args.trials, args.seed)?;
    let mut csv = String::from("alpha,n,proportion,recovered,failed,trials\n");
    for row in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            row.alpha,
            row.n,
            row.proportion(),
            row.recovered,
            row.failed,
            row.trials
        );
    }
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn parse_targets(spec: &str, names: &[String]) -> CliResult<Vec<NodeSet>> {
    let mut targets = vec![NodeSet::new()];
    for group in spec.split(';') {
        let mut target = NodeSet::new();
        for raw in group.split(',') {
            let name = raw.trim();
            if name.is_empty() {
                return Err(CliError::Invalid(format!(
                    "empty variable name in --targets {spec:?}"
                )));
            }
            let Some(idx) = names.iter().position(|n| n == name) else {
                return Err(CliError::Invalid(format!(
                    "--targets names unknown variable {name:?}"
                )));
            };
            target.insert(idx);
        }
        targets.push(target);
    }
    Ok(targets)
}

/// Variable names appearing in an edge-list file, sorted, for when no
/// explicit list is given. Isolated nodes cannot be inferred this way.
fn infer_names(path: &Path) -> CliResult<Vec<String>> {
    let text = read_file(path)?;
    let mut seen = std::collections::BTreeSet::new();
    for (idx, line) in text.lines().enumerate() {
        let Some((src, dst)) = line.split_once(',') else {
            return Err(CliError::BadEdge {
                path: path.into(),
                line: idx + 1,
                found: line.to_string(),
            });
        };
        seen.insert(src.trim().to_string());
        seen.insert(dst.trim().to_string());
    }
    Ok(seen.into_iter().collect())
}

fn oracle_check(args: OracleCheckArgs) -> CliResult<i32> {
    let (names, family) = match &args.manifest {
        Some(path) => {
            let manifest = Manifest::from_path(path)?;
            let family = manifest.family()?;
            (manifest.variables, family)
        }
        None => {
            let names = match &args.vars {
                Some(vars) => vars.clone(),
                None => infer_names(&args.truth)?,
            };
            let targets = match &args.targets {
                Some(spec) => parse_targets(spec, &names)?,
                None => vec![NodeSet::new()],
            };
            (names, InterventionFamily::new(targets)?)
        }
    };
    let truth = read_edges(&args.truth, &names)?;
    let oracle = DsepOracle::new(&truth, &family)?;
    let search = SearchConfig {
        max_depth: depth_option(args.max_depth),
        max_restarts: 1,
        rng_seed: args.seed,
    };
    if args.perms == 0 {
        return Err(CliError::Invalid("--perms must be at least 1".into()));
    }
    let mut missed = 0;
    for s in 0..args.perms {
        let start = Permutation::random(names.len(), &mut rng::derive(args.seed, s as u64));
        let result = igsp(&oracle, &family, &start, &search)?;
        let ok = imec_recovered(&result.dag, &truth, &family)?;
        if !ok {
            missed += 1;
        }
        println!(
            "start {}/{}: {} ({} arrows)",
            s + 1,
            args.perms,
            if ok { "recovered" } else { "missed" },
            result.dag.arrow_count()
        );
    }
    if missed == 0 {
        println!("oracle check passed: {}/{} starts recovered", args.perms, args.perms);
        Ok(0)
    } else {
        println!(
            "oracle check FAILED: {} of {} starts missed the class",
            missed, args.perms
        );
        Ok(1)
    }
}
