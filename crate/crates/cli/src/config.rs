//! Run configuration: a JSON file merged with command-line overrides, then
//! resolved into engine types with field-named diagnostics.

use std::path::{Path, PathBuf};

use gevrey_flow::engine::{ConstantPolicy, Integrator, RaySpec, DEFAULT_BLOWUP_FACTOR};
use gevrey_flow::models::{AnalyticSeries, CatalogEntry, ModelKind, ModelTag};
use gevrey_flow::{GevreyParams, GridSpec, MultiplierSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub name: Option<String>,
    pub g: Option<f64>,
    pub up_axis: Option<usize>,
    pub s: Option<f64>,
    pub rho0: Option<f64>,
    pub series: Option<String>,
    pub op: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub dim: Option<usize>,
    pub n: Option<usize>,
    pub cutoff: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GevreySection {
    pub r: Option<f64>,
    pub beta0: Option<f64>,
    pub constant: Option<ConstantPolicy>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RaySection {
    pub theta: Option<f64>,
    pub n_theta: Option<usize>,
    pub ds: Option<f64>,
    pub s_max: Option<f64>,
    /// `rk4_fixed` or `rk4_doubling`.
    pub integrator: Option<String>,
    pub atol: Option<f64>,
    pub rtol: Option<f64>,
    pub blowup_factor: Option<f64>,
    /// Samples per certified radius when `ds` is not given.
    pub steps_per_radius: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub name: Option<String>,
    pub seed: Option<u64>,
    pub beta_decay: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatesSection {
    pub count: Option<usize>,
    pub seed: Option<u64>,
    pub beta_decay: Option<f64>,
    /// Radius at which the ensemble is measured; defaults to `gevrey.beta0`.
    pub beta: Option<f64>,
    pub lemma_max_norm: Option<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSection {
    pub schedule: Option<PathBuf>,
    pub t_end: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub gevrey: GevreySection,
    pub ray: RaySection,
    pub data: DataSection,
    pub estimates: EstimatesSection,
    pub chain: ChainSection,
    #[serde(skip_serializing)]
    pub output: Option<PathBuf>,
}

fn required<T: Copy>(v: Option<T>, field: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Config(format!("{field} required")))
}

fn positive(v: f64, field: &str) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("{field}: expected a positive number, got {v}")))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))
    }

    pub fn model_tag(&self) -> CliResult<ModelTag> {
        let name = self.model.name.as_deref().ok_or_else(|| CliError::Config("model.name required".into()))?;
        ModelTag::parse(name).map_err(|e| CliError::Config(format!("model.name: {e}")))
    }

    pub fn dim(&self) -> CliResult<usize> {
        match self.grid.dim.unwrap_or(2) {
            d @ (2 | 3) => Ok(d),
            d => Err(CliError::Config(format!("grid.dim: expected 2 or 3, got {d}"))),
        }
    }

    pub fn grid(&self) -> CliResult<GridSpec> {
        let dim = self.dim()?;
        let n = self.grid.n.unwrap_or(if dim == 2 { 32 } else { 16 });
        let cutoff = self.grid.cutoff.unwrap_or((n / 2).saturating_sub(1));
        GridSpec::new(dim, n, cutoff).map_err(|e| CliError::Config(format!("grid: {e}")))
    }

    pub fn model_kind(&self) -> CliResult<ModelKind> {
        let grid = self.grid()?;
        let dim = grid.dim();
        let m = &self.model;
        let kind = match self.model_tag()? {
            ModelTag::Euler => ModelKind::Euler,
            ModelTag::Sqg => ModelKind::Sqg,
            ModelTag::Boussinesq => ModelKind::Boussinesq {
                g: m.g.unwrap_or(1.0),
                up_axis: m.up_axis.unwrap_or(dim - 1),
            },
            ModelTag::Mhd => ModelKind::Mhd { s: m.s.unwrap_or(1.0), rho0: m.rho0.unwrap_or(1.0) },
            ModelTag::Analytic => ModelKind::Analytic {
                series: AnalyticSeries::parse(m.series.as_deref().unwrap_or("square"))
                    .map_err(|e| CliError::Config(format!("model.series: {e}")))?,
                op: MultiplierSpec::parse(m.op.as_deref().unwrap_or("partial:0"))
                    .map_err(|e| CliError::Config(format!("model.op: {e}")))?,
            },
        };
        kind.check_params(&grid).map_err(|e| CliError::Config(format!("model: {e}")))?;
        Ok(kind)
    }

    /// Gevrey parameters with `δ = 0` and the explicit constant (1 under the
    /// empirical policy, which is resolved later).
    pub fn gevrey(&self) -> CliResult<(GevreyParams, ConstantPolicy)> {
        let dim = self.dim()?;
        let beta0 = positive(required(self.gevrey.beta0, "gevrey.beta0")?, "gevrey.beta0")?;
        let r = self.gevrey.r.unwrap_or(if dim == 2 { 2.0 } else { 2.5 });
        let policy = self.gevrey.constant.unwrap_or_default();
        let c = match policy {
            ConstantPolicy::Explicit(c) => positive(c, "gevrey.constant")?,
            ConstantPolicy::Empirical(_) => 1.0,
        };
        let p = GevreyParams::new(r, beta0, 0.0, dim).map_err(|e| CliError::Config(format!("gevrey: {e}")))?;
        Ok((p.with_constant(c), policy))
    }

    pub fn data(&self) -> CliResult<CatalogEntry> {
        let tag = self.model_tag()?;
        let dim = self.dim()?;
        let default = match tag {
            ModelTag::Euler if dim == 3 => "taylor_green_3d",
            ModelTag::Euler => "taylor_green_2d",
            ModelTag::Sqg => "sqg_two_mode",
            ModelTag::Boussinesq => "bouss_stratified",
            ModelTag::Mhd => "mhd_alfven",
            ModelTag::Analytic => "analytic_gaussian_modes",
        };
        let name = self.data.name.as_deref().unwrap_or(default);
        CatalogEntry::parse(name, self.data.seed.unwrap_or(0), self.data.beta_decay.unwrap_or(1.0))
            .map_err(|e| CliError::Config(format!("data.name: {e}")))
    }

    pub fn blowup_factor(&self) -> CliResult<f64> {
        let b = self.ray.blowup_factor.unwrap_or(DEFAULT_BLOWUP_FACTOR);
        if b > 1.0 && b.is_finite() {
            Ok(b)
        } else {
            Err(CliError::Config(format!("ray.blowup_factor: expected a number > 1, got {b}")))
        }
    }

    /// Ray template; `ds` and `s_max` default to `s_cert/steps_per_radius`
    /// and `1.5·s_cert`.
    pub fn ray(&self, s_cert: f64) -> CliResult<RaySpec> {
        let r = &self.ray;
        let steps = r.steps_per_radius.unwrap_or(200);
        if steps == 0 {
            return Err(CliError::Config("ray.steps_per_radius: expected a positive count".into()));
        }
        let ds = positive(r.ds.unwrap_or(s_cert / steps as f64), "ray.ds")?;
        let s_max = positive(r.s_max.unwrap_or(1.5 * s_cert), "ray.s_max")?;
        let integrator = match r.integrator.as_deref().unwrap_or("rk4_fixed") {
            "rk4_fixed" => Integrator::Rk4Fixed,
            "rk4_doubling" => Integrator::Rk4Doubling { atol: r.atol.unwrap_or(1e-9), rtol: r.rtol.unwrap_or(1e-9) },
            other => {
                return Err(CliError::Config(format!(
                    "ray.integrator: expected rk4_fixed or rk4_doubling, got {other:?}"
                )))
            }
        };
        let theta = r.theta.unwrap_or(0.0);
        RaySpec::new(theta, ds, s_max)
            .and_then(|s| s.with_integrator(integrator))
            .map_err(|e| CliError::Config(format!("ray: {e}")))
    }

    /// `None` for a single ray at `ray.theta`.
    pub fn n_theta(&self) -> CliResult<Option<usize>> {
        match self.ray.n_theta {
            Some(n) if n < 4 => Err(CliError::Config(format!("ray.n_theta: need at least 4 rays, got {n}"))),
            other => Ok(other),
        }
    }
}
