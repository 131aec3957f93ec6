//! Model states and their complexified Galerkin right-hand sides.

mod catalog;
mod series;
mod sidecar;

pub use catalog::{initial_data, CatalogEntry};
pub use series::{AnalyticSeries, SeriesValue};
pub use sidecar::{read_state, write_state, StateSidecar};

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    apply_multiplier, bilinear_advect, elsasser_advect, leray_project, self_advect_solenoidal, truncated_power_series,
    GridSpec, MultiplierSpec, SpectralField, DIV_FREE_TOL,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelTag {
    Euler,
    Sqg,
    Boussinesq,
    Mhd,
    Analytic,
}

impl ModelTag {
    pub const ALL: [ModelTag; 5] = [Self::Euler, Self::Sqg, Self::Boussinesq, Self::Mhd, Self::Analytic];

    pub fn name(self) -> &'static str {
        match self {
            Self::Euler => "euler",
            Self::Sqg => "sqg",
            Self::Boussinesq => "boussinesq",
            Self::Mhd => "mhd",
            Self::Analytic => "analytic",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == text)
            .ok_or_else(|| Error::Config(format!("unknown model '{text}'")))
    }

    /// Names of the state members, in storage order.
    pub fn members(self) -> &'static [&'static str] {
        match self {
            Self::Euler => &["u"],
            Self::Sqg => &["eta"],
            Self::Boussinesq => &["u", "eta"],
            Self::Mhd => &["v", "w"],
            Self::Analytic => &["u"],
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Model family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelKind {
    Euler,
    Sqg,
    /// Buoyancy `η g e` with `e` the unit vector along `up_axis`.
    Boussinesq { g: f64, up_axis: usize },
    /// `s = ρ₀μ₀`.
    Mhd { s: f64, rho0: f64 },
    /// `∂ₜu = T F(u)`.
    Analytic { series: AnalyticSeries, op: MultiplierSpec },
}

impl ModelKind {
    pub fn tag(&self) -> ModelTag {
        match self {
            Self::Euler => ModelTag::Euler,
            Self::Sqg => ModelTag::Sqg,
            Self::Boussinesq { .. } => ModelTag::Boussinesq,
            Self::Mhd { .. } => ModelTag::Mhd,
            Self::Analytic { .. } => ModelTag::Analytic,
        }
    }

    /// Boussinesq with "up" along the last axis.
    pub fn boussinesq(g: f64, dim: usize) -> Self {
        Self::Boussinesq { g, up_axis: dim - 1 }
    }

    /// Component count of each member on a `dim`-dimensional grid.
    pub fn member_components(&self, dim: usize) -> Vec<usize> {
        match self {
            Self::Euler => vec![dim],
            Self::Sqg => vec![1],
            Self::Boussinesq { .. } => vec![dim, 1],
            Self::Mhd { .. } => vec![dim, dim],
            Self::Analytic { .. } => vec![1],
        }
    }

    /// Parameter and operator checks against `grid`.
    pub fn check_params(&self, grid: &GridSpec) -> Result<()> {
        match self {
            Self::Sqg if grid.dim() != 2 => Err(Error::State("sqg is defined for d = 2 only".into())),
            Self::Boussinesq { g, up_axis } => {
                if !(*g > 0.0 && g.is_finite()) {
                    return Err(Error::Parameter(format!("boussinesq g = {g} must be positive")));
                }
                if *up_axis >= grid.dim() {
                    return Err(Error::Parameter(format!("up axis {up_axis} outside d = {}", grid.dim())));
                }
                Ok(())
            }
            Self::Mhd { s, rho0 } => {
                if !(*s > 0.0) || !(*rho0 > 0.0) {
                    return Err(Error::Parameter(format!("mhd needs S > 0 and rho0 > 0, got {s}, {rho0}")));
                }
                Ok(())
            }
            Self::Analytic { op, .. } => match op {
                MultiplierSpec::ExpGevrey { .. } => {
                    Err(Error::Parameter("the analytic-model operator must vanish at k = 0".into()))
                }
                MultiplierSpec::Riesz { axis } | MultiplierSpec::Partial { axis } if *axis >= grid.dim() => {
                    Err(Error::Parameter(format!("multiplier axis {axis} outside d = {}", grid.dim())))
                }
                MultiplierSpec::Custom(t) if t.grid != *grid => {
                    Err(Error::Parameter("custom multiplier tabulated on another grid".into()))
                }
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

/// Model kind plus one spectral field per member (see [`ModelTag::members`]).
#[derive(Clone, Debug, PartialEq)]
pub struct ModelState {
    kind: ModelKind,
    fields: Vec<SpectralField>,
}

impl ModelState {
    /// Validates shapes, parameters, mean-freeness and (for velocity-like
    /// members) divergence-freeness.
    pub fn new(kind: ModelKind, fields: Vec<SpectralField>) -> Result<Self> {
        let s = Self { kind, fields };
        s.validate()?;
        Ok(s)
    }

    /// Same kind, new member fields; shapes are trusted.
    pub(crate) fn with_fields(&self, fields: Vec<SpectralField>) -> Self {
        debug_assert_eq!(fields.len(), self.fields.len());
        Self { kind: self.kind.clone(), fields }
    }

    pub fn validate(&self) -> Result<()> {
        let grid = *self
            .fields
            .first()
            .ok_or_else(|| Error::State("state without fields".into()))?
            .grid();
        self.kind.check_params(&grid)?;
        let comps = self.kind.member_components(grid.dim());
        if comps.len() != self.fields.len() {
            return Err(Error::State(format!(
                "{} state needs {} members, got {}",
                self.tag(),
                comps.len(),
                self.fields.len()
            )));
        }
        for ((f, &c), name) in self.fields.iter().zip(&comps).zip(self.tag().members()) {
            if *f.grid() != grid {
                return Err(Error::State(format!("member {name} lives on a different grid")));
            }
            if f.components() != c {
                return Err(Error::State(format!("member {name} has {} components, expected {c}", f.components())));
            }
            if !f.is_mean_free() {
                return Err(Error::State(format!("member {name} is not mean-free")));
            }
            if !f.is_finite() {
                return Err(Error::State(format!("member {name} has non-finite coefficients")));
            }
            if f.is_vector() {
                let ratio = f.divergence_ratio()?;
                if ratio > DIV_FREE_TOL {
                    return Err(Error::State(format!("member {name} has divergence ratio {ratio:e}")));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn tag(&self) -> ModelTag {
        self.kind.tag()
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn into_fields(self) -> Vec<SpectralField> {
        self.fields
    }

    pub fn grid(&self) -> &GridSpec {
        self.fields[0].grid()
    }

    pub fn member_names(&self) -> &'static [&'static str] {
        self.tag().members()
    }

    pub fn is_hermitian(&self) -> bool {
        self.fields.iter().all(|f| f.hermitian_defect() <= 1e-14 * f.max_abs_coeff().max(1.0))
    }

    pub fn is_finite(&self) -> bool {
        self.fields.iter().all(SpectralField::is_finite)
    }

    /// The state re-expressed on a grid with the same lattice and another cutoff.
    pub fn on_grid(&self, grid: GridSpec) -> Result<Self> {
        let fields = self.fields.iter().map(|f| f.on_grid(grid)).collect::<Result<Vec<_>>>()?;
        Ok(self.with_fields(fields))
    }

    /// `self + a·x` member-wise.
    pub fn axpy(&self, a: Complex64, x: &Self) -> Result<Self> {
        let fields = self
            .fields
            .iter()
            .zip(&x.fields)
            .map(|(f, g)| {
                let mut f = f.clone();
                f.axpy(a, g)?;
                Ok(f)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.with_fields(fields))
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        self.with_fields(self.fields.iter().map(|f| f.scaled(z)).collect())
    }

    /// Largest coefficient difference over all members.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (f, g) in self.fields.iter().zip(&other.fields) {
            worst = worst.max(f.max_abs_diff(g)?);
        }
        Ok(worst)
    }

    /// Largest coefficient modulus over all members.
    pub fn max_abs_coeff(&self) -> f64 {
        self.fields.iter().map(SpectralField::max_abs_coeff).fold(0.0, f64::max)
    }
}

/// SQG velocity `u = [−R₂η, R₁η]` (axes 0 and 1 are `x` and `y`).
pub fn sqg_velocity(eta: &SpectralField) -> Result<SpectralField> {
    if eta.components() != 1 || eta.grid().dim() != 2 {
        return Err(Error::Type("sqg velocity needs a 2D scalar".into()));
    }
    let r1 = apply_multiplier(eta, &MultiplierSpec::Riesz { axis: 0 })?;
    let r2 = apply_multiplier(eta, &MultiplierSpec::Riesz { axis: 1 })?;
    let mut coeffs: Vec<Complex64> = r2.coeffs().iter().map(|c| -c).collect();
    coeffs.extend_from_slice(r1.coeffs());
    let mut u = SpectralField::from_coeffs(*eta.grid(), 2, coeffs)?;
    u.detect_flags();
    Ok(u)
}

/// `η·g·e` as a vector field.
fn buoyancy(eta: &SpectralField, g: f64, up_axis: usize) -> Result<SpectralField> {
    let grid = *eta.grid();
    let n = grid.len();
    let mut coeffs = vec![Complex64::default(); grid.dim() * n];
    for (dst, src) in coeffs[up_axis * n..(up_axis + 1) * n].iter_mut().zip(eta.coeffs()) {
        *dst = src * g;
    }
    SpectralField::from_coeffs(grid, grid.dim(), coeffs)
}

/// Fraction of `R_M` the grid maximum of `|u|` may reach before the
/// analytic right-hand side refuses to evaluate.
pub const RADIUS_SAFETY: f64 = 0.9;

/// Time derivative `d(state)/dζ` of the complexified Galerkin system.
pub fn rhs(state: &ModelState) -> Result<ModelState> {
    let neg = |f: SpectralField| f.scaled(Complex64::new(-1.0, 0.0));
    let f = state.fields();
    let out = match state.kind() {
        ModelKind::Euler => vec![neg(self_advect_solenoidal(&f[0], true)?)],
        ModelKind::Sqg => {
            let u = sqg_velocity(&f[0])?;
            vec![neg(bilinear_advect(&u, &f[0], false)?)]
        }
        ModelKind::Boussinesq { g, up_axis } => {
            let mut du = neg(self_advect_solenoidal(&f[0], false)?);
            du.axpy(Complex64::new(1.0, 0.0), &buoyancy(&f[1], *g, *up_axis)?)?;
            du.enforce_mean_free();
            let deta = neg(bilinear_advect(&f[0], &f[1], false)?);
            vec![leray_project(&du)?, deta]
        }
        ModelKind::Mhd { .. } => {
            let (dv, dw) = elsasser_advect(&f[0], &f[1])?;
            vec![neg(dv), neg(dw)]
        }
        ModelKind::Analytic { series, op } => {
            let sup = f[0].to_physical().max_abs();
            let limit = RADIUS_SAFETY * series.radius();
            if sup > limit {
                return Err(Error::ConvergenceRadius(format!(
                    "grid maximum |u| = {sup:.6} exceeds {RADIUS_SAFETY} R_M = {limit:.6}"
                )));
            }
            let fu = truncated_power_series(&f[0], series.coeffs())?;
            let mut tu = apply_multiplier(&fu, op)?;
            tu.enforce_mean_free();
            vec![tu]
        }
    };
    Ok(state.with_fields(out))
}

/// Elsässer variables `v = u + b/√S`, `w = u − b/√S`.
pub fn elsasser_from_primitive(
    u: &SpectralField,
    b: &SpectralField,
    s: f64,
) -> Result<(SpectralField, SpectralField)> {
    if !(s > 0.0) {
        return Err(Error::Parameter(format!("S = {s} must be positive")));
    }
    let c = Complex64::new(1.0 / s.sqrt(), 0.0);
    let mut v = u.clone();
    v.axpy(c, b)?;
    let mut w = u.clone();
    w.axpy(-c, b)?;
    Ok((v, w))
}

/// Inverse of [`elsasser_from_primitive`]: `u = (v+w)/2`, `b = √S(v−w)/2`.
pub fn primitive_from_elsasser(
    v: &SpectralField,
    w: &SpectralField,
    s: f64,
) -> Result<(SpectralField, SpectralField)> {
    if !(s > 0.0) {
        return Err(Error::Parameter(format!("S = {s} must be positive")));
    }
    let half = Complex64::new(0.5, 0.0);
    let u = v.add(w)?.scaled(half);
    let b = v.sub(w)?.scaled(half * s.sqrt());
    Ok((u, b))
}
