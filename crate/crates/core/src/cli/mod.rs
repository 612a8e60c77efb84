//! Command-line front end: `generate`, `select` and `plot`.
//!
//! Settings come from flags, then from an optional TOML file given with
//! `--config`, then from built-in defaults, in that order of precedence.

pub mod plot;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::dataset::{generate_toy, generative_reference, load_csv, save_csv, Dataset, ReferenceSolution, ToyConfig};
use crate::error::{Error, Result};
use crate::metrics::MetricConfig;
use crate::perturbation::PerturbationPlan;
use crate::selection::{select, GridSpec, DEFAULT_LAMBDAS};
use crate::solver::LassoSpec;

use plot::{render_svg, Separator, MODEL_COLOR, REFERENCE_COLOR};
use report::{table_csv, ReportFile, RunConfig};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
/// Every candidate fell below the performance floor.
pub const EXIT_NO_CANDIDATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "interp-select", version, about = "Interpretability-aware model selection for sparse linear classifiers")]
pub struct Cli {
    /// Seed for data generation and (unless --bootstrap-seed is set) resampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a two-class Gaussian toy dataset as CSV.
    Generate(GenerateArgs),
    /// Run the regularisation grid search and write report.json and table.csv.
    Select(SelectArgs),
    /// Draw the data and decision boundaries as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args, Default)]
pub struct ToyArgs {
    /// Samples per class.
    #[arg(long)]
    pub n_per_class: Option<usize>,
    /// Row-major noise covariance, e.g. 1.02,-0.3,-0.3,0.15.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub cov: Option<Vec<f64>>,
    /// Mean of the positive class; the negative class is centred on its negation.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub offset: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub toy: ToyArgs,
    /// Output CSV path [default: <out-dir>/toy.csv].
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub toy: ToyArgs,
    /// Dataset CSV with header x1,...,xp,y.
    #[arg(long, conflicts_with = "generate")]
    pub data: Option<PathBuf>,
    /// Generate the toy dataset in memory instead of reading one.
    #[arg(long)]
    pub generate: bool,
    /// Comma-separated, strictly ascending regularisation grid.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub lambdas: Option<Vec<f64>>,
    /// Number of bootstrap replicates.
    #[arg(long)]
    pub m: Option<usize>,
    /// Weight on interpretability.
    #[arg(long)]
    pub omega1: Option<f64>,
    /// Weight on out-of-bag accuracy.
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Performance floor.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Solver stopping tolerance on the largest coordinate change.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Maximum coordinate-descent sweeps.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Fit an unpenalised intercept.
    #[arg(long)]
    pub fit_intercept: bool,
    /// Seed for resampling [default: --seed].
    #[arg(long)]
    pub bootstrap_seed: Option<u64>,
    /// Reference direction; defaults to the noise-free toy solution.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub reference: Option<Vec<f64>>,
    /// Evaluate candidates and replicates concurrently.
    #[arg(long)]
    pub parallel: bool,
    /// Worker threads for --parallel [default: all cores].
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Overlay {
    /// Full fit of the candidate with the highest out-of-bag accuracy.
    #[default]
    BestDelta,
    /// Full fit of the selected candidate.
    Selected,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub toy: ToyArgs,
    /// Dataset CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// report.json from `select`; omit to draw only the reference boundary.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Overlay::BestDelta)]
    pub overlay: Overlay,
    /// Reference direction when no report is given.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub reference: Option<Vec<f64>>,
    /// Output SVG path [default: <out-dir>/figure.svg].
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Keys accepted in the `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub n_per_class: Option<usize>,
    pub cov: Option<Vec<f64>>,
    pub offset: Option<Vec<f64>>,
    pub data: Option<PathBuf>,
    pub lambdas: Option<Vec<f64>>,
    pub m: Option<usize>,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub kappa: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub fit_intercept: Option<bool>,
    pub bootstrap_seed: Option<u64>,
    pub reference: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.root() {
        Error::Config(_) => EXIT_USAGE,
        Error::Selection(_) => EXIT_NO_CANDIDATE,
        _ => EXIT_FAILURE,
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let out_dir = cli.out_dir.clone().or_else(|| file.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let seed = cli.seed.or(file.seed).unwrap_or(ToyConfig::default().seed);
    match &cli.command {
        Command::Generate(args) => cmd_generate(args, &file, seed, &out_dir),
        Command::Select(args) => cmd_select(args, &file, seed, &out_dir),
        Command::Plot(args) => cmd_plot(args, &file, seed, &out_dir),
    }
}

fn toy_config(args: &ToyArgs, file: &FileConfig, seed: u64) -> Result<ToyConfig> {
    let defaults = ToyConfig::default();
    let n_per_class = args.n_per_class.or(file.n_per_class).unwrap_or(defaults.n_per_class);
    let offset = args.offset.clone().or_else(|| file.offset.clone()).unwrap_or_else(|| defaults.class_offsets[0].clone());
    let p = offset.len();
    let noise_covariance = match args.cov.clone().or_else(|| file.cov.clone()) {
        None if p == defaults.p() => defaults.noise_covariance,
        None => return Err(Error::Config(format!("--cov is required for {p}-dimensional offsets"))),
        Some(flat) if flat.len() == p * p => flat.chunks(p).map(<[f64]>::to_vec).collect(),
        Some(flat) => {
            return Err(Error::Config(format!("--cov needs {} values for p = {p}, got {}", p * p, flat.len())))
        }
    };
    let negated = offset.iter().map(|v| 0.0 - v).collect();
    let config = ToyConfig { n_per_class, class_offsets: [offset, negated], noise_covariance, seed };
    config.validate()?;
    Ok(config)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(parent) if !parent.as_os_str().is_empty() => ensure_dir(parent),
        _ => Ok(()),
    }
}

fn cmd_generate(args: &GenerateArgs, file: &FileConfig, seed: u64, out_dir: &Path) -> Result<()> {
    let config = toy_config(&args.toy, file, seed)?;
    let data = generate_toy(&config)?;
    let output = args.output.clone().unwrap_or_else(|| out_dir.join("toy.csv"));
    ensure_parent(&output)?;
    save_csv(&data, &output)?;
    let (pos, neg) = data.class_counts();
    println!("wrote {}", output.display());
    println!("n = {}, p = {}, class +1: {pos}, class -1: {neg}", data.n(), data.p());
    Ok(())
}

fn reference_for(explicit: Option<&Vec<f64>>, toy: &ToyConfig, p: usize) -> Result<(ReferenceSolution, String)> {
    let reference = match explicit {
        Some(v) => (ReferenceSolution::from_direction(v.clone())?, "explicit".to_string()),
        None => (generative_reference(toy)?, "noise-free toy model".to_string()),
    };
    if reference.0.mbm_star.len() != p {
        return Err(Error::Config(format!(
            "reference has {} entries but the data has {p} features; pass --reference",
            reference.0.mbm_star.len()
        )));
    }
    Ok(reference)
}

fn cmd_select(args: &SelectArgs, file: &FileConfig, seed: u64, out_dir: &Path) -> Result<()> {
    let toy = toy_config(&args.toy, file, seed)?;
    let data_path = args.data.clone().or_else(|| if args.generate { None } else { file.data.clone() });
    let (data, data_label) = match (&data_path, args.generate) {
        (Some(path), _) => (load_csv(path)?, path.display().to_string()),
        (None, true) => (generate_toy(&toy)?, "generated".to_string()),
        (None, false) => return Err(Error::Config("select needs --data <csv> or --generate".into())),
    };

    let defaults = GridSpec::default();
    let grid = GridSpec {
        lambdas: args.lambdas.clone().or_else(|| file.lambdas.clone()).unwrap_or_else(|| DEFAULT_LAMBDAS.to_vec()),
        plan: PerturbationPlan {
            m: args.m.or(file.m).unwrap_or(defaults.plan.m),
            master_seed: args.bootstrap_seed.or(file.bootstrap_seed).unwrap_or(seed),
        },
        metric_config: MetricConfig {
            omega1: args.omega1.or(file.omega1).unwrap_or(defaults.metric_config.omega1),
            omega2: args.omega2.or(file.omega2).unwrap_or(defaults.metric_config.omega2),
            kappa: args.kappa.or(file.kappa).unwrap_or(defaults.metric_config.kappa),
        },
        solver_spec: LassoSpec {
            lambda: 0.0,
            max_iter: args.max_iter.or(file.max_iter).unwrap_or(defaults.solver_spec.max_iter),
            tol: args.tol.or(file.tol).unwrap_or(defaults.solver_spec.tol),
            fit_intercept: args.fit_intercept || file.fit_intercept.unwrap_or(false),
        },
        parallel: args.parallel || args.threads.is_some(),
    };
    grid.validate()?;

    let explicit = args.reference.as_ref().or(file.reference.as_ref());
    let (reference, reference_label) = reference_for(explicit, &toy, data.p())?;

    let report = match args.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?
            .install(|| select(&data, &grid, &reference))?,
        None => select(&data, &grid, &reference)?,
    };

    ensure_dir(out_dir)?;
    let table_path = out_dir.join("table.csv");
    fs::write(&table_path, table_csv(&report, data.p())).map_err(|e| Error::io(&table_path, e))?;
    let file_report = ReportFile {
        config: RunConfig {
            data: data_label,
            toy,
            grid,
            reference: reference_label,
            out_dir: out_dir.display().to_string(),
        },
        reference_mbm: reference.mbm_star.clone(),
        report,
    };
    file_report.save(out_dir.join("report.json"))?;

    let chosen = file_report.report.selected();
    println!(
        "selected lambda = {} (delta = {:.4}, eta = {:.4}, zeta = {:.4})",
        chosen.lambda, chosen.delta, chosen.eta, chosen.zeta
    );
    if let Some(note) = &file_report.report.tie_note {
        println!("{note}");
    }
    Ok(())
}

fn cmd_plot(args: &PlotArgs, file: &FileConfig, seed: u64, out_dir: &Path) -> Result<()> {
    let data: Dataset = load_csv(&args.data)?;
    let report = args.report.as_ref().map(ReportFile::load).transpose()?;

    let reference_mbm = match &report {
        Some(r) => r.reference_mbm.clone(),
        None => {
            let toy = toy_config(&args.toy, file, seed)?;
            let explicit = args.reference.as_ref().or(file.reference.as_ref());
            reference_for(explicit, &toy, data.p())?.0.mbm_star
        }
    };
    let as_pair = |v: &[f64]| -> Result<[f64; 2]> {
        <[f64; 2]>::try_from(v).map_err(|_| Error::Input(format!("plotting needs 2 features, got {}", v.len())))
    };

    let mut separators = vec![Separator {
        normal: as_pair(&reference_mbm)?,
        color: REFERENCE_COLOR,
        label: "true separator (reference map)".into(),
    }];
    if let Some(r) = &report {
        let cands = &r.report.candidates;
        let (index, what) = match args.overlay {
            Overlay::Selected => (r.report.selected_index, "selected"),
            Overlay::BestDelta => {
                let best = (0..cands.len()).fold(0, |b, i| if cands[i].delta > cands[b].delta { i } else { b });
                (best, "most accurate")
            }
        };
        match &cands[index].full_fit_mbm {
            Some(mbm) => separators.push(Separator {
                normal: as_pair(mbm.direction())?,
                color: MODEL_COLOR,
                label: format!("{what} model (lambda = {})", cands[index].lambda),
            }),
            None => eprintln!("warning: lambda = {} fit is all zero; no model boundary drawn", cands[index].lambda),
        }
    }

    let svg = render_svg(&data, &separators)?;
    let output = args.output.clone().unwrap_or_else(|| out_dir.join("figure.svg"));
    ensure_parent(&output)?;
    fs::write(&output, svg).map_err(|e| Error::io(&output, e))?;
    println!("wrote {}", output.display());
    Ok(())
}
