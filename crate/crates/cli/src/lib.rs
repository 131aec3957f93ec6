//! Command-line front end: argument parsing, configuration merging and
//! command dispatch. The binary is a thin wrapper around [`run`].

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gevrey_flow::engine::ConstantPolicy;

use crate::commands::Outcome;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const THREADS_ENV: &str = "GEVREY_FLOW_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gevrey-flow", version, about = "Complex-time Galerkin engine for inviscid flow models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one ray or a θ sweep and write trajectories.
    Simulate(RunArgs),
    /// Print the certified region without integrating.
    Certify(RunArgs),
    /// Measure estimate ratios on a random ensemble.
    VerifyEstimates {
        #[command(flatten)]
        args: RunArgs,
        /// Also run the exhaustive lattice lemma sweep.
        #[arg(long)]
        exhaustive_lemmas: bool,
    },
    /// Cover a time interval by overlapping analyticity disks.
    ChainDisks(RunArgs),
    /// List the initial-data catalog.
    Catalog,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub beta0: Option<f64>,
    /// A positive number or `empirical`.
    #[arg(long, value_parser = parse_constant)]
    pub constant: Option<ConstantPolicy>,
    /// Boussinesq gravity.
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub up_axis: Option<usize>,
    /// MHD coupling `S`.
    #[arg(long)]
    pub mhd_s: Option<f64>,
    #[arg(long)]
    pub rho0: Option<f64>,
    /// Analytic series: `square`, `cube`, `geometric:N`, `sin:N`,
    /// `exp_minus_one:N` or coefficients `a1,a2,…`.
    #[arg(long)]
    pub series: Option<String>,
    /// Analytic-model multiplier, e.g. `partial:0`.
    #[arg(long)]
    pub op: Option<String>,
    /// Initial-data catalog name.
    #[arg(long)]
    pub data: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub beta_decay: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Number of equally spaced rays.
    #[arg(long)]
    pub sweep_theta: Option<usize>,
    #[arg(long)]
    pub ds: Option<f64>,
    #[arg(long)]
    pub s_max: Option<f64>,
    /// `rk4_fixed` or `rk4_doubling`.
    #[arg(long)]
    pub integrator: Option<String>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub blowup_factor: Option<f64>,
    #[arg(long)]
    pub steps_per_radius: Option<usize>,
    /// Ensemble size for verify-estimates.
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub ensemble_seed: Option<u64>,
    #[arg(long)]
    pub ensemble_beta_decay: Option<f64>,
    /// Radius at which the ensemble is measured (default `beta0`).
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lemma_max_norm: Option<i64>,
    /// CSV schedule with columns `t,beta,M`.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Re-read and validate emitted records.
    #[arg(long)]
    pub self_check: bool,
}

fn parse_constant(text: &str) -> Result<ConstantPolicy, String> {
    ConstantPolicy::parse(text).map_err(|e| e.to_string())
}

fn set<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

impl RunArgs {
    /// The configuration file (if any) with every given flag applied on top.
    pub fn merged(&self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        set(&mut c.model.name, self.model.clone());
        set(&mut c.model.g, self.g);
        set(&mut c.model.up_axis, self.up_axis);
        set(&mut c.model.s, self.mhd_s);
        set(&mut c.model.rho0, self.rho0);
        set(&mut c.model.series, self.series.clone());
        set(&mut c.model.op, self.op.clone());
        set(&mut c.grid.dim, self.dim);
        set(&mut c.grid.n, self.n);
        set(&mut c.grid.cutoff, self.cutoff);
        set(&mut c.gevrey.r, self.r);
        set(&mut c.gevrey.beta0, self.beta0);
        set(&mut c.gevrey.constant, self.constant);
        set(&mut c.ray.theta, self.theta);
        set(&mut c.ray.n_theta, self.sweep_theta);
        set(&mut c.ray.ds, self.ds);
        set(&mut c.ray.s_max, self.s_max);
        set(&mut c.ray.integrator, self.integrator.clone());
        set(&mut c.ray.atol, self.atol);
        set(&mut c.ray.rtol, self.rtol);
        set(&mut c.ray.blowup_factor, self.blowup_factor);
        set(&mut c.ray.steps_per_radius, self.steps_per_radius);
        set(&mut c.data.name, self.data.clone());
        set(&mut c.data.seed, self.seed);
        set(&mut c.data.beta_decay, self.beta_decay);
        set(&mut c.estimates.count, self.count);
        set(&mut c.estimates.seed, self.ensemble_seed);
        set(&mut c.estimates.beta_decay, self.ensemble_beta_decay);
        set(&mut c.estimates.beta, self.beta);
        set(&mut c.estimates.lemma_max_norm, self.lemma_max_norm);
        set(&mut c.chain.schedule, self.schedule.clone());
        set(&mut c.chain.t_end, self.t_end);
        set(&mut c.output, self.out.clone());
        Ok(c)
    }
}

/// Caps the global rayon pool from `GEVREY_FLOW_THREADS`.
pub fn configure_threads() -> CliResult<()> {
    let Ok(text) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV}: expected a positive integer, got {text:?}")))?;
    // a pool that already exists (tests calling run twice) is left alone
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn json_line<T: serde::Serialize>(out: &mut impl Write, v: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
}

/// Runs one parsed command, printing results to `out`.
pub fn run(cli: Cli, out: &mut impl Write) -> CliResult<Outcome> {
    configure_threads()?;
    let stdout = |e| CliError::io(std::path::Path::new("<stdout>"), e);
    match cli.command {
        Command::Simulate(args) => {
            let cfg = args.merged()?;
            let outcome = commands::simulate(&cfg, args.self_check)?;
            let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("gevrey-out"));
            let summary = std::fs::read_to_string(dir.join("summary.json")).map_err(|e| CliError::io(&dir, e))?;
            write!(out, "{summary}").map_err(stdout)?;
            Ok(outcome)
        }
        Command::Certify(args) => {
            let cfg = args.merged()?;
            let (region, calibration) = commands::certify(&cfg)?;
            if let Some(cal) = calibration {
                json_line(out, &cal)?;
            }
            json_line(out, &region)?;
            Ok(Outcome::Clean)
        }
        Command::VerifyEstimates { args, exhaustive_lemmas } => {
            let mut cfg = args.merged()?;
            if cfg.model.name.is_none() {
                cfg.model.name = Some("euler".into());
            }
            let (report, lemmas, outcome) = commands::verify_estimates(&cfg, exhaustive_lemmas)?;
            json_line(out, &report)?;
            if let Some(l) = lemmas {
                writeln!(out, "lemma violations: {}", l.total_violations).map_err(stdout)?;
            }
            Ok(outcome)
        }
        Command::ChainDisks(args) => {
            let cfg = args.merged()?;
            let (cov, outcome) = commands::chain(&cfg)?;
            json_line(out, &cov)?;
            Ok(outcome)
        }
        Command::Catalog => {
            write!(out, "{}", commands::catalog()).map_err(stdout)?;
            Ok(Outcome::Clean)
        }
    }
}
