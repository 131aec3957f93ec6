//! Data-driven constant for a given datum.
//!
//! The ensemble is the set of states the datum itself produces: samples
//! along `n_theta` rays inside the region that the candidate constant
//! certifies, each measured at its own shrinking radius. A constant `C` is
//! consistent when `1.1 × max ratio` over that ensemble does not exceed `C`
//! and no ray breaks down inside the region. The search starts from `C = 1`,
//! tries the measured value, and then bisects geometrically between the
//! smallest consistent and the largest inconsistent candidate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ray::{integrate_ray_with, RaySpec};
use super::region::certified_radius;
use crate::error::{Error, Result};
use crate::gevrey::GevreyParams;
use crate::lab::{state_ratio, DEGENERATE_RATIO, MIN_ENSEMBLE, SAFETY_FACTOR};
use crate::models::{ModelState, ModelTag};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSettings {
    pub n_theta: usize,
    /// Ray samples per certified radius.
    pub samples: usize,
    pub max_iterations: usize,
    /// Relative width at which the search stops.
    pub tolerance: f64,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self { n_theta: 8, samples: 100, max_iterations: 12, tolerance: 0.1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStep {
    pub constant: f64,
    pub s_certified: f64,
    /// Largest ratio seen, infinite if a ray broke down.
    pub max_ratio: f64,
    pub states: usize,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub model: ModelTag,
    pub c_emp: f64,
    pub safety_factor: f64,
    pub degenerate: bool,
    pub steps: Vec<CalibrationStep>,
}

fn probe(state0: &ModelState, params: &GevreyParams, constant: f64, set: &CalibrationSettings) -> Result<CalibrationStep> {
    let region = certified_radius(state0, &params.with_constant(constant))?;
    let p = region.params();
    let ds = region.s_certified / set.samples as f64;
    let per_ray = (0..set.n_theta)
        .into_par_iter()
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / set.n_theta as f64;
            // stop just short of the radius so every sample has β > 0
            let ray = RaySpec::new(theta, ds, region.s_certified)?;
            let mut worst: f64 = 0.0;
            let mut count = 0usize;
            let mut failure = None;
            let t = integrate_ray_with(state0, &p, &ray, f64::INFINITY, |s, st| {
                count += 1;
                match state_ratio(st, p.r, p.beta_at(s)) {
                    Ok(x) if x.is_finite() => worst = worst.max(x),
                    Ok(_) => worst = f64::INFINITY,
                    Err(e) => failure = Some(e),
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            if t.status.breakdown().is_some() {
                worst = f64::INFINITY;
            }
            Ok((worst, count))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = per_ray.iter().map(|x| x.0).fold(0.0, f64::max);
    let states = per_ray.iter().map(|x| x.1).sum();
    let consistent = max_ratio <= DEGENERATE_RATIO || SAFETY_FACTOR * max_ratio <= constant;
    Ok(CalibrationStep { constant, s_certified: region.s_certified, max_ratio, states, consistent })
}

/// Smallest consistent constant found for `state0` (see the module notes).
/// Degenerate data (no transfer anywhere along the rays) keep `C = 1`.
pub fn calibrate_constant(state0: &ModelState, params: &GevreyParams, set: &CalibrationSettings) -> Result<Calibration> {
    if set.n_theta < 4 || set.samples < 2 || set.n_theta * (set.samples + 1) < MIN_ENSEMBLE {
        return Err(Error::Precondition(format!(
            "calibration ensemble of {} rays × {} samples is too small",
            set.n_theta, set.samples
        )));
    }
    let mut steps = Vec::new();
    // lo: largest inconsistent candidate below hi; hi: smallest consistent one
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = None;
    let mut c = 1.0;
    for _ in 0..set.max_iterations.max(1) {
        let step = probe(state0, params, c, set)?;
        steps.push(step);
        if step.consistent {
            hi = Some(c);
            if step.max_ratio <= DEGENERATE_RATIO {
                break;
            }
        } else if hi.is_some() {
            lo = Some(c);
        }
        c = match (lo, hi) {
            (_, None) if step.max_ratio.is_finite() => SAFETY_FACTOR * step.max_ratio,
            (_, None) => 4.0 * c,
            (None, Some(h)) => {
                let next = SAFETY_FACTOR * step.max_ratio;
                if next >= h * (1.0 - set.tolerance) {
                    break;
                }
                next
            }
            (Some(l), Some(h)) => {
                if h <= l * (1.0 + set.tolerance) {
                    break;
                }
                (l * h).sqrt()
            }
        };
    }
    let c_emp = hi.ok_or_else(|| {
        Error::Precondition(format!("no consistent constant found in {} iterations", steps.len()))
    })?;
    let degenerate = steps.iter().all(|s| s.max_ratio <= DEGENERATE_RATIO);
    Ok(Calibration { model: state0.tag(), c_emp, safety_factor: SAFETY_FACTOR, degenerate, steps })
}
