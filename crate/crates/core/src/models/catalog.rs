//! Named initial data.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ModelKind, ModelState, ModelTag};
use crate::error::{Error, Result};
use crate::random::{rng, random_real_gevrey_with};
use crate::spectral::{GridSpec, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum CatalogEntry {
    /// `(sin x cos y, −cos x sin y)`, a steady Euler flow.
    TaylorGreen2d,
    /// `(sin x cos y cos z, −cos x sin y cos z, 0)`.
    TaylorGreen3d,
    /// `η = sin x`, steady.
    SqgSingleMode,
    /// `η = cos x + ½ sin 2y`.
    SqgTwoMode,
    /// `u = ½·Taylor–Green`, `η = ½ sin x + ¼ cos(x+y)`.
    BoussStratified,
    /// `v = (sin y, sin x)` (3D: `(sin y, sin z, sin x)`), `w = 0`: an exact
    /// nonlinear Alfvén-wave solution.
    MhdAlfven,
    /// `û(k) = ¼ e^{−|k|²/2}` on the whole band.
    AnalyticGaussianModes,
    /// Real random field with `|û(k)| ∝ e^{−β_decay|k|}`.
    RandomGevrey { seed: u64, beta_decay: f64 },
}

impl CatalogEntry {
    pub const NAMED: [CatalogEntry; 7] = [
        Self::TaylorGreen2d,
        Self::TaylorGreen3d,
        Self::SqgSingleMode,
        Self::SqgTwoMode,
        Self::BoussStratified,
        Self::MhdAlfven,
        Self::AnalyticGaussianModes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::TaylorGreen2d => "taylor_green_2d",
            Self::TaylorGreen3d => "taylor_green_3d",
            Self::SqgSingleMode => "sqg_single_mode",
            Self::SqgTwoMode => "sqg_two_mode",
            Self::BoussStratified => "bouss_stratified",
            Self::MhdAlfven => "mhd_alfven",
            Self::AnalyticGaussianModes => "analytic_gaussian_modes",
            Self::RandomGevrey { .. } => "random_gevrey",
        }
    }

    /// Parses a catalog name; `random_gevrey` takes its seed and decay rate
    /// from the arguments.
    pub fn parse(name: &str, seed: u64, beta_decay: f64) -> Result<Self> {
        if name == "random_gevrey" {
            if !(beta_decay > 0.0) {
                return Err(Error::UnknownData(format!("random_gevrey needs beta_decay > 0, got {beta_decay}")));
            }
            return Ok(Self::RandomGevrey { seed, beta_decay });
        }
        Self::NAMED
            .into_iter()
            .find(|e| e.name() == name)
            .ok_or_else(|| Error::UnknownData(format!("unknown initial data '{name}'")))
    }

    /// Model the entry is written for; `None` for entries usable with any model.
    pub fn model(&self) -> Option<ModelTag> {
        match self {
            Self::TaylorGreen2d | Self::TaylorGreen3d => Some(ModelTag::Euler),
            Self::SqgSingleMode | Self::SqgTwoMode => Some(ModelTag::Sqg),
            Self::BoussStratified => Some(ModelTag::Boussinesq),
            Self::MhdAlfven => Some(ModelTag::Mhd),
            Self::AnalyticGaussianModes => Some(ModelTag::Analytic),
            Self::RandomGevrey { .. } => None,
        }
    }

    /// Spatial dimension the entry requires, if fixed.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::TaylorGreen2d | Self::SqgSingleMode | Self::SqgTwoMode => Some(2),
            Self::TaylorGreen3d => Some(3),
            _ => None,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Self::TaylorGreen2d => "euler, d=2: (sin x cos y, -cos x sin y), steady",
            Self::TaylorGreen3d => "euler, d=3: (sin x cos y cos z, -cos x sin y cos z, 0)",
            Self::SqgSingleMode => "sqg, d=2: eta = sin x, steady",
            Self::SqgTwoMode => "sqg, d=2: eta = cos x + 0.5 sin 2y",
            Self::BoussStratified => "boussinesq: u = 0.5 Taylor-Green, eta = 0.5 sin x + 0.25 cos(x+y)",
            Self::MhdAlfven => "mhd: v = (sin y, sin x) [3D: (sin y, sin z, sin x)], w = 0, steady",
            Self::AnalyticGaussianModes => "analytic: u^(k) = exp(-|k|^2/2)/4 on the band",
            Self::RandomGevrey { .. } => "any model: real random field, |u^(k)| ~ exp(-beta_decay |k|)",
        }
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RandomGevrey { seed, beta_decay } => write!(f, "random_gevrey(seed={seed}, beta_decay={beta_decay})"),
            other => f.write_str(other.name()),
        }
    }
}

type Mode = ([i64; 3], usize, Complex64);

fn sin_mode(k: [i64; 3], comp: usize, amp: f64) -> [Mode; 2] {
    let c = Complex64::new(0.0, -0.5 * amp);
    [(k, comp, c), ([-k[0], -k[1], -k[2]], comp, -c)]
}

fn cos_mode(k: [i64; 3], comp: usize, amp: f64) -> [Mode; 2] {
    let c = Complex64::new(0.5 * amp, 0.0);
    [(k, comp, c), ([-k[0], -k[1], -k[2]], comp, c)]
}

fn taylor_green(grid: GridSpec, amp: f64) -> Result<SpectralField> {
    let mut modes = Vec::new();
    if grid.dim() == 2 {
        let q = 0.25 * amp;
        for (sx, sy) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            modes.push(([sx, sy, 0], 0, Complex64::new(0.0, -q * sx as f64)));
            modes.push(([sx, sy, 0], 1, Complex64::new(0.0, q * sy as f64)));
        }
    } else {
        let q = 0.125 * amp;
        for sx in [1i64, -1] {
            for sy in [1i64, -1] {
                for sz in [1i64, -1] {
                    modes.push(([sx, sy, sz], 0, Complex64::new(0.0, -q * sx as f64)));
                    modes.push(([sx, sy, sz], 1, Complex64::new(0.0, q * sy as f64)));
                }
            }
        }
    }
    finish(SpectralField::from_modes(grid, grid.dim(), &modes)?)
}

fn finish(mut f: SpectralField) -> Result<SpectralField> {
    f.enforce_mean_free();
    f.detect_flags();
    Ok(f)
}

fn scalar(grid: GridSpec, modes: &[Mode]) -> Result<SpectralField> {
    finish(SpectralField::from_modes(grid, 1, modes)?)
}

/// Builds the catalog state for `kind` on `grid`.
pub fn initial_data(entry: &CatalogEntry, kind: ModelKind, grid: GridSpec) -> Result<ModelState> {
    if let Some(tag) = entry.model() {
        if tag != kind.tag() {
            return Err(Error::Config(format!("initial data {} is for the {tag} model, not {}", entry, kind.tag())));
        }
    }
    if let Some(d) = entry.dim() {
        if d != grid.dim() {
            return Err(Error::Dimension(format!("initial data {entry} needs d = {d}, grid has d = {}", grid.dim())));
        }
    }
    let fields = match entry {
        CatalogEntry::TaylorGreen2d | CatalogEntry::TaylorGreen3d => vec![taylor_green(grid, 1.0)?],
        CatalogEntry::SqgSingleMode => vec![scalar(grid, &sin_mode([1, 0, 0], 0, 1.0))?],
        CatalogEntry::SqgTwoMode => {
            let mut m = cos_mode([1, 0, 0], 0, 1.0).to_vec();
            m.extend(sin_mode([0, 2, 0], 0, 0.5));
            vec![scalar(grid, &m)?]
        }
        CatalogEntry::BoussStratified => {
            let mut m = sin_mode([1, 0, 0], 0, 0.5).to_vec();
            m.extend(cos_mode([1, 1, 0], 0, 0.25));
            vec![taylor_green(grid, 0.5)?, scalar(grid, &m)?]
        }
        CatalogEntry::MhdAlfven => {
            let d = grid.dim();
            let mut m = Vec::new();
            for c in 0..d {
                // component c varies along axis c+1 (cyclically)
                let mut k = [0i64; 3];
                k[(c + 1) % d] = 1;
                m.extend(sin_mode(k, c, 1.0));
            }
            vec![finish(SpectralField::from_modes(grid, d, &m)?)?, SpectralField::zeros(grid, d)]
        }
        CatalogEntry::AnalyticGaussianModes => {
            let band = grid.band();
            let m: Vec<Mode> = band
                .k
                .iter()
                .zip(&band.kmag)
                .filter(|(_, &r)| r > 0.0)
                .map(|(&k, &r)| (k, 0, Complex64::new(0.25 * (-0.5 * r * r).exp(), 0.0)))
                .collect();
            vec![scalar(grid, &m)?]
        }
        CatalogEntry::RandomGevrey { seed, beta_decay } => {
            let mut r = rng(*seed);
            kind.member_components(grid.dim())
                .into_iter()
                .map(|c| random_real_gevrey_with(grid, c, *beta_decay, &mut r))
                .collect()
        }
    };
    ModelState::new(kind, fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gevrey::gevrey_norm;
    use crate::models::{rhs, AnalyticSeries};
    use crate::spectral::MultiplierSpec;

    fn analytic() -> ModelKind {
        ModelKind::Analytic { series: AnalyticSeries::parse("square").unwrap(), op: MultiplierSpec::Partial { axis: 0 } }
    }

    fn kind_for(tag: ModelTag, dim: usize) -> ModelKind {
        match tag {
            ModelTag::Euler => ModelKind::Euler,
            ModelTag::Sqg => ModelKind::Sqg,
            ModelTag::Boussinesq => ModelKind::boussinesq(1.0, dim),
            ModelTag::Mhd => ModelKind::Mhd { s: 1.0, rho0: 1.0 },
            ModelTag::Analytic => analytic(),
        }
    }

    #[test]
    fn every_entry_builds_valid_hermitian_state() {
        for entry in CatalogEntry::NAMED {
            let dim = entry.dim().unwrap_or(2);
            let grid = GridSpec::new(dim, 16, 5).unwrap();
            let s = initial_data(&entry, kind_for(entry.model().unwrap(), dim), grid).unwrap();
            assert!(s.is_hermitian(), "{entry}");
            assert!(s.max_abs_coeff() > 0.0);
            assert_eq!(CatalogEntry::parse(entry.name(), 0, 1.0).unwrap(), entry);
        }
        assert!(CatalogEntry::parse("kelvin_helmholtz", 0, 1.0).is_err());
    }

    #[test]
    fn taylor_green_2d_physical_values() {
        let grid = GridSpec::new(2, 16, 5).unwrap();
        let s = initial_data(&CatalogEntry::TaylorGreen2d, ModelKind::Euler, grid).unwrap();
        let p = s.fields()[0].to_physical();
        let n = grid.n();
        for (i, j) in [(1usize, 2usize), (5, 11), (7, 3)] {
            let (x, y) = (std::f64::consts::TAU * i as f64 / n as f64, std::f64::consts::TAU * j as f64 / n as f64);
            let idx = i * n + j;
            assert!((p.component(0)[idx].re - x.sin() * y.cos()).abs() < 1e-14);
            assert!((p.component(1)[idx].re + x.cos() * y.sin()).abs() < 1e-14);
        }
        // steady
        assert!(rhs(&s).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn steady_entries() {
        let grid = GridSpec::new(2, 16, 5).unwrap();
        let sqg = initial_data(&CatalogEntry::SqgSingleMode, ModelKind::Sqg, grid).unwrap();
        assert!(rhs(&sqg).unwrap().max_abs_coeff() < 1e-15);
        let two = initial_data(&CatalogEntry::SqgTwoMode, ModelKind::Sqg, grid).unwrap();
        assert!(rhs(&two).unwrap().max_abs_coeff() > 0.1);
        for dim in [2, 3] {
            let g = GridSpec::new(dim, 8, 3).unwrap();
            let mhd = initial_data(&CatalogEntry::MhdAlfven, ModelKind::Mhd { s: 1.0, rho0: 1.0 }, g).unwrap();
            assert_eq!(mhd.fields()[1].max_abs_coeff(), 0.0);
            assert!(rhs(&mhd).unwrap().max_abs_coeff() < 1e-15);
        }
    }

    #[test]
    fn mismatches_are_rejected() {
        let g2 = GridSpec::new(2, 16, 5).unwrap();
        let g3 = GridSpec::new(3, 8, 3).unwrap();
        assert!(matches!(initial_data(&CatalogEntry::TaylorGreen2d, ModelKind::Sqg, g2), Err(Error::Config(_))));
        assert!(matches!(initial_data(&CatalogEntry::TaylorGreen2d, ModelKind::Euler, g3), Err(Error::Dimension(_))));
        assert!(CatalogEntry::parse("random_gevrey", 1, 0.0).is_err());
    }

    #[test]
    fn random_gevrey_is_reproducible_and_finite() {
        let g = GridSpec::new(2, 32, 15).unwrap();
        let e = CatalogEntry::parse("random_gevrey", 7, 1.0).unwrap();
        for tag in ModelTag::ALL {
            let a = initial_data(&e, kind_for(tag, 2), g).unwrap();
            let b = initial_data(&e, kind_for(tag, 2), g).unwrap();
            assert_eq!(a, b);
            for f in a.fields() {
                assert!(gevrey_norm(f, 2.0, 0.5).unwrap().is_finite());
            }
        }
    }
}
