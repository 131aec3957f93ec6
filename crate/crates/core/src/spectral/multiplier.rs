use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{FieldFlags, SpectralField};
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Exponents `β|k|` above this are evaluated in the log domain.
pub(crate) const LOG_DOMAIN_THRESHOLD: f64 = 300.0;

/// Fourier multiplier symbols `m(k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiplierSpec {
    /// `A^{s/2}`: `m(k) = |k|^s`.
    HalfPower { s: f64 },
    /// `e^{βA^{1/2}}`: `m(k) = e^{β|k|}`.
    ExpGevrey { beta: f64 },
    /// Riesz transform `R_j = ∂_j Λ^{-1}`: `m(k) = i k_j / |k|`.
    Riesz { axis: usize },
    /// `∂_j`: `m(k) = i k_j`.
    Partial { axis: usize },
    /// Tabulated symbol on a specific lattice.
    Custom(MultiplierTable),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierTable {
    pub grid: GridSpec,
    /// One value per flat lattice index.
    pub values: Arc<Vec<Complex64>>,
}

impl MultiplierTable {
    pub fn from_fn(grid: GridSpec, f: impl Fn([i64; 3]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.wavenumber(i))).collect();
        Self { grid, values: Arc::new(values) }
    }
}

impl MultiplierSpec {
    /// Parses `half_power:<s>`, `exp_gevrey:<beta>`, `riesz:<axis>`, `partial:<axis>`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, arg) = text
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("multiplier '{text}' must look like kind:value")))?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parameter(format!("{text}: {e}")));
        let axis = |s: &str| s.trim().parse::<usize>().map_err(|e| Error::Parameter(format!("{text}: {e}")));
        Ok(match kind.trim() {
            "half_power" => Self::HalfPower { s: num(arg)? },
            "exp_gevrey" => Self::ExpGevrey { beta: num(arg)? },
            "riesz" => Self::Riesz { axis: axis(arg)? },
            "partial" => Self::Partial { axis: axis(arg)? },
            other => return Err(Error::Parameter(format!("unknown multiplier kind '{other}'"))),
        })
    }

    /// Whether the symbol is forced to vanish at `k = 0`.
    fn kills_mean(&self) -> bool {
        !matches!(self, Self::ExpGevrey { .. })
    }

    /// Symbol value at one lattice point (not used for `ExpGevrey`).
    fn symbol(&self, grid: &GridSpec, idx: usize, k: [i64; 3], kmag: f64) -> Complex64 {
        match self {
            Self::HalfPower { s } => {
                if kmag == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(kmag.powf(*s), 0.0)
                }
            }
            Self::ExpGevrey { beta } => Complex64::new((beta * kmag).exp(), 0.0),
            Self::Riesz { axis } => {
                if kmag == 0.0 {
                    Complex64::default()
                } else {
                    Complex64::new(0.0, k[*axis] as f64 / kmag)
                }
            }
            Self::Partial { axis } => Complex64::new(0.0, k[*axis] as f64),
            Self::Custom(t) => {
                debug_assert_eq!(&t.grid.n(), &grid.n());
                t.values[idx]
            }
        }
    }

    fn check(&self, grid: &GridSpec) -> Result<()> {
        match self {
            Self::Riesz { axis } | Self::Partial { axis } if *axis >= grid.dim() => {
                Err(Error::Dimension(format!("axis {axis} out of range for d = {}", grid.dim())))
            }
            Self::ExpGevrey { beta } if *beta < 0.0 => Err(Error::Domain(format!("negative Gevrey radius {beta}"))),
            Self::Custom(t) if t.grid.n() != grid.n() || t.grid.dim() != grid.dim() => {
                Err(Error::Dimension("custom multiplier tabulated on another lattice".into()))
            }
            Self::Custom(t) if t.values[0] != Complex64::default() => {
                Err(Error::Parameter("custom multiplier must vanish at k = 0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Bound `sup_{k≠0} |m(k)| / |k|` over the band (finite for the `T` of the
    /// analytic model).
    pub fn growth_constant(&self, grid: &GridSpec) -> f64 {
        let band = grid.band();
        band.indices
            .iter()
            .enumerate()
            .filter(|(p, _)| band.kmag[*p] > 0.0)
            .map(|(p, &idx)| self.symbol(grid, idx, band.k[p], band.kmag[p]).norm() / band.kmag[p])
            .fold(0.0, f64::max)
    }
}

/// Coefficient-wise product `m(k) û(k)`; singular symbols map `k = 0` to zero.
pub fn apply_multiplier(f: &SpectralField, m: &MultiplierSpec) -> Result<SpectralField> {
    let grid = *f.grid();
    m.check(&grid)?;
    if matches!(m, MultiplierSpec::Riesz { .. }) && !f.is_mean_free() {
        return Err(Error::State("Riesz transform requires a mean-free field".into()));
    }
    let band = grid.band();
    let n = grid.len();
    let mut out = f.clone();
    let coeffs = out.coeffs_mut();
    for (p, &idx) in band.indices.iter().enumerate() {
        let kmag = band.kmag[p];
        if let MultiplierSpec::ExpGevrey { beta } = m {
            let expo = beta * kmag;
            for c in 0..f.components() {
                let v = coeffs[c * n + idx];
                if v == Complex64::default() {
                    continue;
                }
                let scaled = if expo > LOG_DOMAIN_THRESHOLD {
                    Complex64::from_polar((v.norm().ln() + expo).exp(), v.arg())
                } else {
                    v * expo.exp()
                };
                if !(scaled.re.is_finite() && scaled.im.is_finite()) {
                    return Err(Error::Overflow { k_norm: kmag });
                }
                coeffs[c * n + idx] = scaled;
            }
            continue;
        }
        let sym = m.symbol(&grid, idx, band.k[p], kmag);
        for c in 0..f.components() {
            coeffs[c * n + idx] *= sym;
        }
    }
    let mut flags = f.flags();
    if m.kills_mean() {
        out.enforce_mean_free();
        flags.mean_free = true;
    }
    // real symbols preserve Hermitian symmetry iff m(-k) = conj m(k)
    flags.hermitian = f.flags().hermitian && !matches!(m, MultiplierSpec::Custom(_));
    flags.div_free = f.flags().div_free;
    out.set_flags(flags);
    Ok(out)
}

/// Leray–Helmholtz projection `û ← û − (k·û) k/|k|²` onto mean-free,
/// divergence-free fields.
pub fn leray_project(u: &SpectralField) -> Result<SpectralField> {
    if !u.is_vector() {
        return Err(Error::Type(format!(
            "Leray projection needs a {}-component vector field, got {} components",
            u.grid().dim(),
            u.components()
        )));
    }
    let grid = *u.grid();
    let d = grid.dim();
    let band = grid.band();
    let n = grid.len();
    let mut out = u.clone();
    let coeffs = out.coeffs_mut();
    for (p, &idx) in band.indices.iter().enumerate() {
        let k = band.k[p];
        let k2 = band.kmag[p] * band.kmag[p];
        if k2 == 0.0 {
            continue;
        }
        let mut dot = Complex64::default();
        let mut mag2 = 0.0;
        for c in 0..d {
            dot += coeffs[c * n + idx] * k[c] as f64;
            mag2 += coeffs[c * n + idx].norm_sqr();
        }
        // already solenoidal up to rounding: leave the mode untouched
        if dot.norm() <= 1e-14 * band.kmag[p] * mag2.sqrt() {
            continue;
        }
        let scale = dot / k2;
        for c in 0..d {
            coeffs[c * n + idx] -= scale * k[c] as f64;
        }
    }
    out.enforce_mean_free();
    out.set_flags(FieldFlags { mean_free: true, div_free: true, hermitian: u.flags().hermitian });
    Ok(out)
}

/// Zeroes every coefficient with `|k| > cutoff`.
pub fn galerkin_truncate(f: &SpectralField, cutoff: usize) -> SpectralField {
    let mut out = f.clone();
    if cutoff < f.grid().cutoff() {
        out.truncate_in_place(cutoff);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_complexified, random_trig_polynomial};

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn half_power_on_norm_two_mode() {
        let g = GridSpec::new(2, 16, 4).unwrap();
        let f = SpectralField::from_modes(g, 1, &[([2, 0, 0], 0, one())]).unwrap();
        let out = apply_multiplier(&f, &MultiplierSpec::HalfPower { s: 1.0 }).unwrap();
        assert_eq!(out.get([2, 0, 0], 0), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn exp_gevrey_factor() {
        let g = GridSpec::new(2, 16, 4).unwrap();
        let f = SpectralField::from_modes(g, 1, &[([0, 1, 0], 0, one())]).unwrap();
        let out = apply_multiplier(&f, &MultiplierSpec::ExpGevrey { beta: 0.5 }).unwrap();
        assert!((out.get([0, 1, 0], 0).re - 1.6487212707001282).abs() < 1e-15);
    }

    #[test]
    fn exp_gevrey_overflow_is_an_error() {
        let g = GridSpec::new(2, 16, 7).unwrap();
        let f = SpectralField::from_modes(g, 1, &[([7, 0, 0], 0, one())]).unwrap();
        let err = apply_multiplier(&f, &MultiplierSpec::ExpGevrey { beta: 200.0 }).unwrap_err();
        assert!(matches!(err, Error::Overflow { k_norm } if k_norm == 7.0));
        // large exponent on a tiny coefficient stays representable
        let tiny = SpectralField::from_modes(g, 1, &[([7, 0, 0], 0, Complex64::new(1e-300, 0.0))]).unwrap();
        let out = apply_multiplier(&tiny, &MultiplierSpec::ExpGevrey { beta: 100.0 }).unwrap();
        assert!(out.get([7, 0, 0], 0).re.is_finite());
    }

    #[test]
    fn riesz_squares_sum_to_minus_identity() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        let mut f = random_trig_polynomial(g, 1, 5);
        f.enforce_mean_free();
        let r1 = MultiplierSpec::Riesz { axis: 0 };
        let r2 = MultiplierSpec::Riesz { axis: 1 };
        let a = apply_multiplier(&apply_multiplier(&f, &r1).unwrap(), &r1).unwrap();
        let b = apply_multiplier(&apply_multiplier(&f, &r2).unwrap(), &r2).unwrap();
        let sum = a.add(&b).unwrap();
        assert!(sum.add(&f).unwrap().max_abs_coeff() < 1e-14);
    }

    #[test]
    fn riesz_requires_mean_free() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        let f = SpectralField::from_modes(g, 1, &[([0, 0, 0], 0, one())]).unwrap();
        assert!(apply_multiplier(&f, &MultiplierSpec::Riesz { axis: 0 }).is_err());
    }

    #[test]
    fn leray_kills_gradients_and_fixes_solenoidal_fields() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        let mut phi = random_trig_polynomial(g, 1, 8);
        phi.enforce_mean_free();
        let gx = apply_multiplier(&phi, &MultiplierSpec::Partial { axis: 0 }).unwrap();
        let gy = apply_multiplier(&phi, &MultiplierSpec::Partial { axis: 1 }).unwrap();
        let mut coeffs = gx.coeffs().to_vec();
        coeffs.extend_from_slice(gy.coeffs());
        let grad = SpectralField::from_coeffs(g, 2, coeffs).unwrap();
        assert!(leray_project(&grad).unwrap().max_abs_coeff() < 1e-14);

        let u = random_complexified(g, 2, 0.3, true, 4);
        let pu = leray_project(&u).unwrap();
        assert_eq!(pu.coeffs(), u.coeffs());
    }

    #[test]
    fn leray_orthogonal_split() {
        let g = GridSpec::new(3, 8, 3).unwrap();
        let u = random_complexified(g, 3, 0.2, false, 9);
        let pu = leray_project(&u).unwrap();
        let qu = u.sub(&pu).unwrap();
        let total = u.l2_norm().powi(2);
        let split = pu.l2_norm().powi(2) + qu.l2_norm().powi(2);
        assert!(((total - split) / total).abs() < 1e-12);
        assert!(pu.divergence_ratio().unwrap() < 1e-14);
    }

    #[test]
    fn leray_rejects_scalars() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        assert!(matches!(leray_project(&SpectralField::zeros(g, 1)), Err(Error::Type(_))));
    }

    #[test]
    fn truncation_behaviour() {
        let g = GridSpec::new(2, 16, 6).unwrap();
        let f = random_trig_polynomial(g, 1, 2);
        assert_eq!(galerkin_truncate(&f, 6), f);
        assert_eq!(galerkin_truncate(&f, 9), f);
        let t = galerkin_truncate(&f, 3);
        assert!(t.l2_norm() <= f.l2_norm());
        assert_eq!(galerkin_truncate(&t, 3), t);
        let lone = SpectralField::from_modes(g, 1, &[([5, 0, 0], 0, one())]).unwrap();
        assert_eq!(galerkin_truncate(&lone, 4).max_abs_coeff(), 0.0);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(MultiplierSpec::parse("partial:0").unwrap(), MultiplierSpec::Partial { axis: 0 });
        assert_eq!(MultiplierSpec::parse("half_power:0.5").unwrap(), MultiplierSpec::HalfPower { s: 0.5 });
        assert!(MultiplierSpec::parse("bogus:1").is_err());
        assert!(MultiplierSpec::parse("partial").is_err());
    }
}
