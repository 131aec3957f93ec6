//! Integration along a complex-time ray `ζ = s·e^{iθ}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gevrey::{norm_report, GevreyParams, NormReport};
use crate::models::{rhs, ModelState, ModelTag};

/// Fraction of `β₀/δ` a radius-guarded ray may reach.
pub const RADIUS_GUARD: f64 = 0.999;
pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Integrator {
    /// Classical RK4 with step `ds`.
    #[default]
    Rk4Fixed,
    /// RK4 with step-doubling error control; `ds` is then the output spacing
    /// and the largest internal step.
    Rk4Doubling { atol: f64, rtol: f64 },
}

impl Integrator {
    pub fn doubling() -> Self {
        Self::Rk4Doubling { atol: 1e-9, rtol: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RaySpec {
    pub theta: f64,
    pub ds: f64,
    pub s_max: f64,
    #[serde(default)]
    pub integrator: Integrator,
    /// Stop at `0.999·β₀/δ` with status `radius_exhausted`. When unset the
    /// ray runs to `s_max` and the norm radius is clamped at zero.
    #[serde(default = "yes")]
    pub stop_at_radius: bool,
}

fn yes() -> bool {
    true
}

impl RaySpec {
    pub fn new(theta: f64, ds: f64, s_max: f64) -> Result<Self> {
        let r = Self { theta, ds, s_max, integrator: Integrator::Rk4Fixed, stop_at_radius: true };
        r.validate()?;
        Ok(r)
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Result<Self> {
        self.integrator = integrator;
        self.validate()?;
        Ok(self)
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    pub fn with_stop_at_radius(self, stop_at_radius: bool) -> Self {
        Self { stop_at_radius, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ds > 0.0 && self.ds.is_finite()) {
            return Err(Error::Config(format!("ray.ds = {} must be positive", self.ds)));
        }
        if !(self.s_max > 0.0 && self.s_max.is_finite()) {
            return Err(Error::Config(format!("ray.s_max = {} must be positive", self.s_max)));
        }
        if !self.theta.is_finite() {
            return Err(Error::Config("ray.theta must be finite".into()));
        }
        if let Integrator::Rk4Doubling { atol, rtol } = self.integrator {
            if !(atol > 0.0 && rtol > 0.0) {
                return Err(Error::Config("doubling tolerances must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Norms of every member at one arclength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub s: f64,
    pub beta_effective: f64,
    pub norms: Vec<NormReport>,
    /// Root-sum-square Gevrey norm over members, `|||state|||`.
    pub combined: f64,
    /// Rejected internal steps since the previous sample.
    pub rejections: u32,
}

impl Sample {
    /// `Σ_members ‖A^{1/4}·‖²_β`.
    pub fn quarter_sq(&self) -> f64 {
        self.norms.iter().map(|n| n.gevrey_quarter * n.gevrey_quarter).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RayStatus {
    Completed,
    BlownUp { s: f64 },
    RadiusExhausted { s: f64 },
    /// The right-hand side refused to evaluate (e.g. the analytic series
    /// left its convergence disk).
    Failed { s: f64, message: String },
}

impl RayStatus {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Completed => "completed",
            Self::BlownUp { .. } => "blown_up",
            Self::RadiusExhausted { .. } => "radius_exhausted",
            Self::Failed { .. } => "failed",
        }
    }

    /// Arclength at which the solution stopped existing numerically.
    pub fn breakdown(&self) -> Option<f64> {
        match self {
            Self::BlownUp { s } | Self::Failed { s, .. } => Some(*s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayTrajectory {
    pub model: ModelTag,
    pub members: Vec<String>,
    pub dim: usize,
    pub theta: f64,
    pub params: GevreyParams,
    pub ray: RaySpec,
    pub samples: Vec<Sample>,
    pub status: RayStatus,
}

/// Step-by-step integrator for one ray; output points are spaced `ds`.
pub struct RayStepper {
    state: ModelState,
    params: GevreyParams,
    ray: RaySpec,
    phase: Complex64,
    s: f64,
    s_end: f64,
    radius_stop: bool,
    h: f64,
    initial: f64,
    blowup_factor: f64,
    status: Option<RayStatus>,
}

impl RayStepper {
    pub fn new(state0: ModelState, params: GevreyParams, ray: RaySpec, blowup_factor: f64) -> Result<Self> {
        ray.validate()?;
        params.validate(state0.grid().dim())?;
        state0.validate()?;
        if !(blowup_factor > 1.0) {
            return Err(Error::Config(format!("blowup factor {blowup_factor} must exceed 1")));
        }
        let limit = RADIUS_GUARD * params.radius_limit();
        let radius_stop = ray.stop_at_radius && ray.s_max > limit;
        let s_end = if radius_stop { limit } else { ray.s_max };
        let mut st = Self {
            state: state0,
            params,
            ray,
            phase: Complex64::from_polar(1.0, ray.theta),
            s: 0.0,
            s_end,
            radius_stop,
            h: ray.ds,
            initial: 0.0,
            blowup_factor,
            status: None,
        };
        st.initial = st.sample(0)?.combined;
        Ok(st)
    }

    pub fn state(&self) -> &ModelState {
        &self.state
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn status(&self) -> Option<&RayStatus> {
        self.status.as_ref()
    }

    pub fn beta_effective(&self, s: f64) -> f64 {
        let b = self.params.beta_at(s);
        if self.ray.stop_at_radius {
            b
        } else {
            b.max(0.0)
        }
    }

    /// Norm sample of the current state.
    pub fn sample(&self, rejections: u32) -> Result<Sample> {
        let beta = self.beta_effective(self.s);
        let norms = self
            .state
            .fields()
            .iter()
            .map(|f| norm_report(f, self.params.r, beta))
            .collect::<Result<Vec<_>>>()?;
        let combined = norms.iter().map(|n| n.gevrey * n.gevrey).sum::<f64>().sqrt();
        Ok(Sample { s: self.s, beta_effective: beta, norms, combined, rejections })
    }

    fn tendency(&self, y: &ModelState) -> Result<ModelState> {
        Ok(rhs(y)?.scaled(self.phase))
    }

    fn rk4(&self, y: &ModelState, h: f64) -> Result<ModelState> {
        let c = |x: f64| Complex64::new(x, 0.0);
        let k1 = self.tendency(y)?;
        let k2 = self.tendency(&y.axpy(c(0.5 * h), &k1)?)?;
        let k3 = self.tendency(&y.axpy(c(0.5 * h), &k2)?)?;
        let k4 = self.tendency(&y.axpy(c(h), &k3)?)?;
        let mut out = y.axpy(c(h / 6.0), &k1)?;
        out = out.axpy(c(h / 3.0), &k2)?;
        out = out.axpy(c(h / 3.0), &k3)?;
        out.axpy(c(h / 6.0), &k4)
    }

    /// Moves the state from `s` to `target`, returning rejected step count.
    fn integrate_to(&mut self, target: f64) -> Result<u32> {
        match self.ray.integrator {
            Integrator::Rk4Fixed => {
                self.state = self.rk4(&self.state, target - self.s)?;
                self.s = target;
                Ok(0)
            }
            Integrator::Rk4Doubling { atol, rtol } => {
                let mut rejections = 0;
                while self.s < target {
                    let h = self.h.min(target - self.s);
                    let full = self.rk4(&self.state, h)?;
                    let half = self.rk4(&self.state, 0.5 * h)?;
                    let two = self.rk4(&half, 0.5 * h)?;
                    let err = two.max_abs_diff(&full)? / 15.0;
                    let tol = atol + rtol * two.max_abs_coeff();
                    if !err.is_finite() {
                        self.state = two;
                        self.s += h;
                        return Ok(rejections);
                    }
                    let grow = if err > 0.0 { 0.9 * (tol / err).powf(0.2) } else { 4.0 };
                    if err <= tol {
                        self.state = two;
                        self.s = if h == target - self.s { target } else { self.s + h };
                        self.h = (h * grow.clamp(0.2, 4.0)).min(self.ray.ds);
                    } else {
                        rejections += 1;
                        self.h = h * grow.clamp(0.1, 0.9);
                        if self.h < 1e-14 * self.ray.s_max.max(1.0) {
                            return Err(Error::State(format!("step size underflow at s = {}", self.s)));
                        }
                    }
                }
                Ok(rejections)
            }
        }
    }

    /// Advances one output interval. Returns the new sample, or `None` once
    /// the ray has terminated (see [`RayStepper::status`]).
    pub fn advance(&mut self) -> Result<Option<Sample>> {
        if self.status.is_some() {
            return Ok(None);
        }
        if self.s >= self.s_end {
            self.finish();
            return Ok(None);
        }
        let remaining = self.s_end - self.s;
        // land exactly on s_end instead of leaving a sliver step
        let target = if remaining <= self.ray.ds * (1.0 + 1e-9) { self.s_end } else { self.s + self.ray.ds };
        let from = self.s;
        let rejections = match self.integrate_to(target) {
            Ok(r) => r,
            Err(Error::ConvergenceRadius(msg)) => {
                self.status = Some(RayStatus::Failed { s: from, message: msg });
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        if !self.state.is_finite() {
            self.status = Some(RayStatus::BlownUp { s: self.s });
            return Ok(None);
        }
        let sample = match self.sample(rejections) {
            Ok(s) => s,
            Err(Error::Overflow { .. }) => {
                self.status = Some(RayStatus::BlownUp { s: self.s });
                return Ok(None);
            }
            Err(e) => return Err(e),
        };
        if !sample.combined.is_finite() || (self.initial > 0.0 && sample.combined > self.blowup_factor * self.initial) {
            self.status = Some(RayStatus::BlownUp { s: self.s });
            return Ok(Some(sample));
        }
        if self.s >= self.s_end {
            self.finish();
        }
        Ok(Some(sample))
    }

    fn finish(&mut self) {
        self.status = Some(if self.radius_stop {
            RayStatus::RadiusExhausted { s: self.s }
        } else {
            RayStatus::Completed
        });
    }
}

/// Integrates `du/ds = e^{iθ}·rhs(u)` from `s = 0`, recording norms at every
/// output point. `observe` sees the state after each accepted output step.
pub fn integrate_ray_with(
    state0: &ModelState,
    params: &GevreyParams,
    ray: &RaySpec,
    blowup_factor: f64,
    mut observe: impl FnMut(f64, &ModelState),
) -> Result<RayTrajectory> {
    let mut stepper = RayStepper::new(state0.clone(), *params, *ray, blowup_factor)?;
    let mut samples = vec![stepper.sample(0)?];
    observe(0.0, stepper.state());
    while let Some(sample) = stepper.advance()? {
        observe(sample.s, stepper.state());
        samples.push(sample);
    }
    Ok(RayTrajectory {
        model: state0.tag(),
        members: state0.member_names().iter().map(|s| s.to_string()).collect(),
        dim: state0.grid().dim(),
        theta: ray.theta,
        params: *params,
        ray: *ray,
        samples,
        status: stepper.status().cloned().expect("stepper terminated"),
    })
}

pub fn integrate_ray(
    state0: &ModelState,
    params: &GevreyParams,
    ray: &RaySpec,
    blowup_factor: f64,
) -> Result<RayTrajectory> {
    integrate_ray_with(state0, params, ray, blowup_factor, |_, _| {})
}
