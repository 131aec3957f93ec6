//! Sampled check of the differential inequality behind the region theorems.

use serde::{Deserialize, Serialize};

use super::ray::RayTrajectory;
use crate::error::{Error, Result};
use crate::gevrey::{cwien, GevreyParams};
use crate::models::ModelKind;

/// Relative slack granted to the centered difference.
pub const BUDGET_TOLERANCE: f64 = 1e-4;
/// Largest sample spacing, as a fraction of `β₀/δ`.
pub const MAX_SPACING: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetStep {
    pub s: f64,
    /// `½ d/ds |||u|||² + δ |||A^{1/4}u|||²`.
    pub lhs: f64,
    pub rhs: f64,
    /// `(lhs − rhs)/rhs`; negative when the inequality holds.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub constant: f64,
    pub delta: f64,
    pub steps: Vec<BudgetStep>,
    pub max_margin: f64,
    pub holds: bool,
}

/// Compares `½ d/ds |||u|||² + δ|||A^{1/4}u|||²` (centered differences of the
/// samples) with its structural bound at interior samples:
/// - euler, sqg, mhd: `C 2^r C_W |||u||| |||A^{1/4}u|||²`,
/// - boussinesq: `C 2^r C_W (|||u|||+|||η|||) |||A^{1/4}(u,η)|||² + g/2 |||(u,η)|||²`,
/// - analytic: `C F̃(|||u|||) |||A^{1/4}u|||²`.
///
/// `C = params.constant`; `δ` is the trajectory's own.
pub fn energy_budget(traj: &RayTrajectory, kind: &ModelKind, params: &GevreyParams) -> Result<BudgetReport> {
    let p = traj.params;
    if traj.samples.len() < 3 {
        return Err(Error::Precondition("energy budget needs at least three samples".into()));
    }
    let scale = if p.delta > 0.0 { p.beta0 / p.delta } else { 1.0 };
    let spacing = traj.samples.windows(2).map(|w| w[1].s - w[0].s).fold(0.0, f64::max);
    if spacing > MAX_SPACING * scale {
        return Err(Error::Precondition(format!(
            "sample spacing {spacing:.3e} exceeds {MAX_SPACING}·β₀/δ = {:.3e}",
            MAX_SPACING * scale
        )));
    }
    let space_dim = traj.dim;
    let c = params.constant;
    let factor = 2f64.powf(p.r) * cwien(p.r, space_dim)?;
    let mut steps = Vec::with_capacity(traj.samples.len() - 2);
    for w in traj.samples.windows(3) {
        let (a, b, z) = (&w[0], &w[1], &w[2]);
        let x = |s: &super::ray::Sample| s.combined * s.combined;
        let dx = (x(z) - x(a)) / (z.s - a.s);
        let q = b.quarter_sq();
        let lhs = 0.5 * dx + p.delta * q;
        let rhs = match kind {
            ModelKind::Analytic { series, .. } => c * series.ftilde_eval(p.r, space_dim, b.combined)?.upper() * q,
            ModelKind::Boussinesq { g, .. } => {
                let sum: f64 = b.norms.iter().map(|n| n.gevrey).sum();
                c * factor * sum * q + 0.5 * g * x(b)
            }
            _ => c * factor * b.combined * q,
        };
        let margin = if rhs > 0.0 { (lhs - rhs) / rhs } else if lhs > 0.0 { f64::INFINITY } else { 0.0 };
        steps.push(BudgetStep { s: b.s, lhs, rhs, margin });
    }
    let max_margin = steps.iter().map(|s| s.margin).fold(f64::NEG_INFINITY, f64::max);
    Ok(BudgetReport { constant: c, delta: p.delta, holds: max_margin <= BUDGET_TOLERANCE, max_margin, steps })
}
