//! The five subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use gevrey_flow::engine::{
    calibrate_constant, certified_radius, chain_disks, run_ray, sweep_theta, Calibration, CalibrationSettings,
    CertifiedRegion, ConstantPolicy, Coverage, RaySpec, SchedulePoint,
};
use gevrey_flow::gevrey::shell_spectrum;
use gevrey_flow::lab::{empirical_constant, verify_wavenumber_lemmas, ConstantReport, Ensemble, LemmaReport, LemmaSweep};
use gevrey_flow::models::{initial_data, write_state, CatalogEntry, ModelState};
use gevrey_flow::GevreyParams;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{trajectory_jsonl, validate_jsonl, OutputDir};

/// Exit status of a successful command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    /// A reportable finding: a certified-region violation, a lemma
    /// violation, or incomplete disk coverage.
    Finding,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Self::Clean => 0,
            Self::Finding => 2,
        }
    }
}

fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output.clone().unwrap_or_else(|| PathBuf::from("gevrey-out"))
}

/// Initial state and the parameters actually used (δ = 0, resolved constant).
pub struct Prepared {
    pub entry: CatalogEntry,
    pub state0: ModelState,
    pub params: GevreyParams,
    pub policy: ConstantPolicy,
    pub calibration: Option<Calibration>,
}

pub fn prepare(cfg: &RunConfig) -> CliResult<Prepared> {
    let kind = cfg.model_kind()?;
    let grid = cfg.grid()?;
    let (params, policy) = cfg.gevrey()?;
    let entry = cfg.data()?;
    let state0 = initial_data(&entry, kind, grid).map_err(|e| CliError::Config(format!("data.name: {e}")))?;
    let (params, calibration) = match policy {
        ConstantPolicy::Explicit(_) => (params, None),
        ConstantPolicy::Empirical(_) => {
            let cal = calibrate_constant(&state0, &params, &CalibrationSettings::default())?;
            (params.with_constant(cal.c_emp), Some(cal))
        }
    };
    Ok(Prepared { entry, state0, params, policy, calibration })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub data: String,
    pub constant_policy: ConstantPolicy,
    pub calibration: Option<Calibration>,
    pub region: CertifiedRegion,
    pub ray: RaySpec,
    pub blowup_factor: f64,
    pub flagged_thetas: Vec<f64>,
    pub violation: bool,
}

fn seeds(cfg: &RunConfig, entry: &CatalogEntry) -> BTreeMap<String, u64> {
    let mut s = BTreeMap::new();
    if let CatalogEntry::RandomGevrey { seed, .. } = entry {
        s.insert("data".into(), *seed);
    }
    if let Some(seed) = cfg.estimates.seed {
        s.insert("estimates".into(), seed);
    }
    s
}

#[derive(Serialize)]
struct SpectrumRow<'a> {
    member: &'a str,
    shell: usize,
    modes: usize,
    energy: f64,
}

fn spectrum_csv(state: &ModelState, r: f64, beta: f64) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (name, f) in state.member_names().iter().zip(state.fields()) {
        for sh in shell_spectrum(f, r, beta)? {
            w.serialize(SpectrumRow { member: name, shell: sh.shell, modes: sh.modes, energy: sh.energy })
                .map_err(|e| CliError::Input(e.to_string()))?;
        }
    }
    w.into_inner().map_err(|e| CliError::Input(e.to_string()))
}

/// Integrates one ray (`ray.theta`) or a sweep (`ray.n_theta`) and writes
/// `ray_XXX.jsonl`, `summary.json`, `spectrum.csv`, the initial state and
/// the manifest.
pub fn simulate(cfg: &RunConfig, self_check: bool) -> CliResult<Outcome> {
    let prep = prepare(cfg)?;
    let blowup = cfg.blowup_factor()?;
    let n_theta = cfg.n_theta()?;
    let region0 = certified_radius(&prep.state0, &prep.params)?;
    let template = cfg.ray(region0.s_certified)?;
    let (region, trajectories) = match n_theta {
        Some(n) => {
            let sw = sweep_theta(&prep.state0, &prep.params, n, &template, blowup)?;
            (sw.region, sw.trajectories)
        }
        None => {
            let mut region = region0;
            let (outcome, t) = run_ray(&prep.state0, &region, &template, blowup);
            region.rays.push(outcome);
            (region, t.into_iter().collect())
        }
    };

    let mut out = OutputDir::create(&output_dir(cfg))?;
    let mut ray_files = Vec::new();
    for (j, t) in trajectories.iter().enumerate() {
        let name = format!("ray_{j:03}.jsonl");
        out.write_bytes(&name, &trajectory_jsonl(t)?)?;
        ray_files.push(name);
    }
    let flagged = region.flagged();
    let summary = Summary {
        data: prep.entry.to_string(),
        constant_policy: prep.policy,
        calibration: prep.calibration.clone(),
        violation: !flagged.is_empty(),
        flagged_thetas: flagged,
        ray: template,
        blowup_factor: blowup,
        region,
    };
    out.write_json("summary.json", &summary)?;
    out.write_bytes("spectrum.csv", &spectrum_csv(&prep.state0, prep.params.r, prep.params.beta0)?)?;
    for (name, bytes) in write_state(&prep.state0, "initial")? {
        out.write_bytes(&name, &bytes)?;
    }
    if self_check {
        for name in &ray_files {
            validate_jsonl(&out.root().join(name))?;
        }
    }
    out.finish("simulate", cfg, seeds(cfg, &prep.entry))?;
    Ok(if summary.violation { Outcome::Finding } else { Outcome::Clean })
}

/// Region prediction only; printed to stdout and written to `certified.json`
/// when an output directory is configured.
pub fn certify(cfg: &RunConfig) -> CliResult<(CertifiedRegion, Option<Calibration>)> {
    let prep = prepare(cfg)?;
    let region = certified_radius(&prep.state0, &prep.params)?;
    if cfg.output.is_some() {
        let mut out = OutputDir::create(&output_dir(cfg))?;
        #[derive(Serialize)]
        struct Certified<'a> {
            data: String,
            constant_policy: ConstantPolicy,
            calibration: &'a Option<Calibration>,
            region: &'a CertifiedRegion,
        }
        out.write_json(
            "certified.json",
            &Certified {
                data: prep.entry.to_string(),
                constant_policy: prep.policy,
                calibration: &prep.calibration,
                region: &region,
            },
        )?;
        out.finish("certify", cfg, seeds(cfg, &prep.entry))?;
    }
    Ok((region, prep.calibration))
}

#[derive(Serialize)]
struct EstimateRow {
    index: usize,
    seed: u64,
    model: &'static str,
    beta: f64,
    ratio: f64,
    lhs: f64,
    lhs_spectral: f64,
    rhs_without_c: f64,
    norm: f64,
    quarter_norm: f64,
}

pub const DEFAULT_ENSEMBLE: usize = 200;

/// Random-ensemble estimate sweep (`estimates.csv`, `c_emp.json`) and,
/// optionally, the exhaustive wavenumber-lemma sweep (`lemmas.json`).
pub fn verify_estimates(cfg: &RunConfig, exhaustive_lemmas: bool) -> CliResult<(ConstantReport, Option<LemmaReport>, Outcome)> {
    let kind = cfg.model_kind()?;
    let grid = cfg.grid()?;
    let dim = grid.dim();
    let r = cfg.gevrey.r.unwrap_or(if dim == 2 { 2.0 } else { 2.5 });
    let beta = match (cfg.estimates.beta, cfg.gevrey.beta0) {
        (Some(b), _) | (None, Some(b)) => b,
        (None, None) => return Err(CliError::Config("gevrey.beta0 required".into())),
    };
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(CliError::Config(format!("estimates.beta: expected a nonnegative number, got {beta}")));
    }
    GevreyParams::new(r, beta.max(f64::MIN_POSITIVE), 0.0, dim).map_err(|e| CliError::Config(format!("gevrey: {e}")))?;
    let ensemble = Ensemble::Random {
        kind,
        grid,
        count: cfg.estimates.count.unwrap_or(DEFAULT_ENSEMBLE),
        seed: cfg.estimates.seed.unwrap_or(0),
        beta_decay: cfg.estimates.beta_decay.unwrap_or(0.8),
    };
    let report = empirical_constant(&ensemble, r, beta)?;
    let mut out = OutputDir::create(&output_dir(cfg))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for (index, s) in report.samples.iter().enumerate() {
        w.serialize(EstimateRow {
            index,
            seed: s.meta.seed.unwrap_or(0),
            model: s.model.name(),
            beta: s.meta.beta,
            ratio: s.ratio,
            lhs: s.lhs,
            lhs_spectral: s.lhs_spectral,
            rhs_without_c: s.rhs_without_c,
            norm: s.norm,
            quarter_norm: s.quarter_norm,
        })
        .map_err(|e| CliError::Input(e.to_string()))?;
    }
    out.write_bytes("estimates.csv", &w.into_inner().map_err(|e| CliError::Input(e.to_string()))?)?;
    out.write_json("c_emp.json", &report)?;
    let lemmas = if exhaustive_lemmas {
        let sweep = LemmaSweep {
            max_norm: cfg.estimates.lemma_max_norm.unwrap_or(16),
            dim,
            seed: cfg.estimates.seed.unwrap_or(0),
            ..LemmaSweep::default()
        };
        if sweep.max_norm < 1 {
            return Err(CliError::Config("estimates.lemma_max_norm: expected a positive bound".into()));
        }
        let rep = verify_wavenumber_lemmas(&sweep);
        out.write_json("lemmas.json", &rep)?;
        Some(rep)
    } else {
        None
    };
    let mut seeds = BTreeMap::new();
    seeds.insert("estimates".to_string(), cfg.estimates.seed.unwrap_or(0));
    out.finish("verify-estimates", cfg, seeds)?;
    let finding = lemmas.as_ref().is_some_and(|l| l.total_violations > 0);
    Ok((report, lemmas, if finding { Outcome::Finding } else { Outcome::Clean }))
}

#[derive(Deserialize)]
struct ScheduleRow {
    t: f64,
    beta: f64,
    #[serde(rename = "M", alias = "m")]
    m: f64,
}

/// Reads a `t,beta,M` CSV schedule.
pub fn read_schedule(path: &Path) -> CliResult<Vec<SchedulePoint>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<ScheduleRow>().enumerate() {
        let row = row.map_err(|e| CliError::Input(format!("{} row {}: {e}", path.display(), i + 1)))?;
        out.push(SchedulePoint { t: row.t, beta: row.beta, m: row.m });
    }
    Ok(out)
}

/// Disk chaining for a schedule file; `coverage.json` when an output
/// directory is configured.
pub fn chain(cfg: &RunConfig) -> CliResult<(Coverage, Outcome)> {
    let path = cfg.chain.schedule.as_deref().ok_or_else(|| CliError::Config("chain.schedule required".into()))?;
    let schedule = read_schedule(path)?;
    let dim = cfg.dim()?;
    let r = cfg.gevrey.r.unwrap_or(if dim == 2 { 2.0 } else { 2.5 });
    let c = match cfg.gevrey.constant.unwrap_or_default() {
        ConstantPolicy::Explicit(c) => c,
        ConstantPolicy::Empirical(_) => {
            return Err(CliError::Config("gevrey.constant: chain-disks needs an explicit constant".into()))
        }
    };
    let cov = chain_disks(&schedule, r, dim, c, cfg.chain.t_end).map_err(|e| CliError::Input(e.to_string()))?;
    if cfg.output.is_some() {
        let mut out = OutputDir::create(&output_dir(cfg))?;
        out.write_json("coverage.json", &cov)?;
        out.finish("chain-disks", cfg, BTreeMap::new())?;
    }
    let outcome = if cov.covers { Outcome::Clean } else { Outcome::Finding };
    Ok((cov, outcome))
}

pub fn catalog() -> String {
    let mut entries: Vec<CatalogEntry> = CatalogEntry::NAMED.to_vec();
    entries.push(CatalogEntry::RandomGevrey { seed: 0, beta_decay: 1.0 });
    let mut s = String::new();
    for e in entries {
        s.push_str(&format!("{:<26}{}\n", e.name(), e.describe()));
    }
    s
}
