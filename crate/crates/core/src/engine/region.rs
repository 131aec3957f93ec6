//! Certified analyticity regions and the θ sweep that tests them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ray::{integrate_ray, RaySpec, RayStatus, RayTrajectory};
use crate::error::{Error, Result};
use crate::gevrey::{combined_gevrey_norm, cwien, GevreyParams};
use crate::models::{ModelKind, ModelState, ModelTag};

/// How the absolute constant in the region formulas is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstantPolicy {
    Explicit(f64),
    Empirical(EmpiricalTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmpiricalTag {
    Empirical,
}

impl Default for ConstantPolicy {
    fn default() -> Self {
        Self::Explicit(1.0)
    }
}

impl ConstantPolicy {
    pub const EMPIRICAL: Self = Self::Empirical(EmpiricalTag::Empirical);

    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("empirical") {
            return Ok(Self::EMPIRICAL);
        }
        match t.parse::<f64>() {
            Ok(c) if c > 0.0 && c.is_finite() => Ok(Self::Explicit(c)),
            _ => Err(Error::Config(format!("gevrey.constant: expected a positive number or \"empirical\", got {t:?}"))),
        }
    }
}

/// One ray of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayOutcome {
    pub theta: f64,
    /// Breakdown arclength, or `s_max` when the ray survived.
    pub s_empirical: f64,
    pub censored: bool,
    pub status: RayStatus,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedRegion {
    pub model: ModelTag,
    pub s_certified: f64,
    pub delta_used: f64,
    pub constant_used: f64,
    pub initial_norm: f64,
    pub r: f64,
    pub beta0: f64,
    pub dim: usize,
    /// Boussinesq `2 ln 2 / g`.
    pub cap: Option<f64>,
    pub rays: Vec<RayOutcome>,
}

impl CertifiedRegion {
    /// Parameters with the region's `δ` and constant.
    pub fn params(&self) -> GevreyParams {
        GevreyParams { r: self.r, beta0: self.beta0, delta: self.delta_used, constant: self.constant_used }
    }

    pub fn flagged(&self) -> Vec<f64> {
        self.rays.iter().filter(|r| r.flagged).map(|r| r.theta).collect()
    }

    pub fn min_empirical(&self) -> Option<f64> {
        self.rays.iter().map(|r| r.s_empirical).reduce(f64::min)
    }
}

/// Region radius `s = β₀/δ` with `δ = C 2^r C_W ‖state0‖_{β₀}` (capped at
/// `2 ln 2/g` for Boussinesq) or `δ = C F̃(‖u₀‖_{β₀})` for the analytic
/// model, `C = params.constant`. Multi-member states use the root-sum-square
/// norm.
pub fn certified_radius(state0: &ModelState, params: &GevreyParams) -> Result<CertifiedRegion> {
    let dim = state0.grid().dim();
    params.validate(dim)?;
    let GevreyParams { r, beta0, constant, .. } = *params;
    let norm = combined_gevrey_norm(state0.fields(), r, beta0)?;
    if !norm.is_finite() {
        return Err(Error::Overflow { k_norm: state0.grid().cutoff() as f64 });
    }
    let growth = match state0.kind() {
        ModelKind::Analytic { series, .. } => series.ftilde_eval(r, dim, norm)?.upper(),
        _ => 2f64.powf(r) * cwien(r, dim)? * norm,
    };
    if !(growth > 0.0) {
        return Err(Error::Domain("zero initial datum: the region is unbounded".into()));
    }
    let delta = constant * growth;
    let cap = match state0.kind() {
        ModelKind::Boussinesq { g, .. } if *g > 0.0 => Some(2.0 * std::f64::consts::LN_2 / g),
        _ => None,
    };
    let s = beta0 / delta;
    let s_certified = cap.map_or(s, |c| s.min(c));
    Ok(CertifiedRegion {
        model: state0.tag(),
        s_certified,
        delta_used: delta,
        constant_used: constant,
        initial_norm: norm,
        r,
        beta0,
        dim,
        cap,
        rays: Vec::new(),
    })
}

/// Integrates one ray of `region` to `ray.s_max` without the radius guard.
/// A ray that errors is recorded as `failed` at `s = 0`.
pub fn run_ray(
    state0: &ModelState,
    region: &CertifiedRegion,
    ray: &RaySpec,
    blowup_factor: f64,
) -> (RayOutcome, Option<RayTrajectory>) {
    let theta = ray.theta;
    let ray = ray.with_stop_at_radius(false);
    match integrate_ray(state0, &region.params(), &ray, blowup_factor) {
        Ok(t) => {
            let (s_empirical, censored) = match t.status.breakdown() {
                Some(s) => (s, false),
                None => (ray.s_max, true),
            };
            let flagged = s_empirical < region.s_certified;
            (RayOutcome { theta, s_empirical, censored, status: t.status.clone(), flagged }, Some(t))
        }
        Err(e) => {
            let status = RayStatus::Failed { s: 0.0, message: e.to_string() };
            (RayOutcome { theta, s_empirical: 0.0, censored: false, status, flagged: true }, None)
        }
    }
}

pub struct Sweep {
    pub region: CertifiedRegion,
    pub trajectories: Vec<RayTrajectory>,
}

/// Integrates `n_theta` rays at `θ_j = 2πj/n_theta` with the template's step
/// settings, records breakdown arclengths and flags rays that break down
/// inside the certified radius (see [`run_ray`]).
pub fn sweep_theta(
    state0: &ModelState,
    params: &GevreyParams,
    n_theta: usize,
    template: &RaySpec,
    blowup_factor: f64,
) -> Result<Sweep> {
    if n_theta < 4 {
        return Err(Error::Precondition(format!("n_theta = {n_theta} < 4")));
    }
    template.validate()?;
    let mut region = certified_radius(state0, params)?;
    let rays: Vec<(RayOutcome, Option<RayTrajectory>)> = (0..n_theta)
        .into_par_iter()
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64;
            run_ray(state0, &region, &template.with_theta(theta), blowup_factor)
        })
        .collect();
    let mut trajectories = Vec::with_capacity(n_theta);
    for (outcome, t) in rays {
        region.rays.push(outcome);
        trajectories.extend(t);
    }
    Ok(Sweep { region, trajectories })
}
