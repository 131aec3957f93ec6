//! Gevrey, Wiener and Sobolev norms on spectral fields.
//!
//! Sobolev norms are defined spectrally, `‖A^{s/2}u‖² = (2π)^d Σ |k|^{2s}|û(k)|²`,
//! and the Gevrey norm of order `r` and radius `β` is
//! `‖u‖_β = ‖A^{r/2} e^{βA^{1/2}} u‖`. Coupled systems use the root-sum-square
//! of their member norms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{SpectralField, LOG_DOMAIN_THRESHOLD};

/// Sobolev order, initial radius, shrink rate and the constant standing in
/// for the unspecified absolute constant of the nonlinear estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GevreyParams {
    pub r: f64,
    pub beta0: f64,
    pub delta: f64,
    pub constant: f64,
}

impl GevreyParams {
    pub fn new(r: f64, beta0: f64, delta: f64, dim: usize) -> Result<Self> {
        let p = Self { r, beta0, delta, constant: 1.0 };
        p.validate(dim)?;
        Ok(p)
    }

    pub fn with_delta(self, delta: f64) -> Self {
        Self { delta, ..self }
    }

    pub fn with_constant(self, constant: f64) -> Self {
        Self { constant, ..self }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let min_r = (dim as f64 + 1.0) / 2.0;
        if !(self.r > min_r) {
            return Err(Error::Domain(format!("r = {} must exceed (d+1)/2 = {min_r}", self.r)));
        }
        if !(self.beta0 > 0.0) {
            return Err(Error::Domain(format!("beta0 = {} must be positive", self.beta0)));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::Domain(format!("delta = {} must be nonnegative", self.delta)));
        }
        if !(self.constant > 0.0 && self.constant.is_finite()) {
            return Err(Error::Domain(format!("constant C = {} must be positive", self.constant)));
        }
        Ok(())
    }

    /// `β₀ − δs`.
    pub fn beta_at(&self, s: f64) -> f64 {
        self.beta0 - self.delta * s
    }

    /// `β₀/δ`, the arclength at which the radius reaches zero.
    pub fn radius_limit(&self) -> f64 {
        if self.delta > 0.0 {
            self.beta0 / self.delta
        } else {
            f64::INFINITY
        }
    }
}

/// All norms of one field at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub sobolev_r: f64,
    pub gevrey: f64,
    pub gevrey_quarter: f64,
    pub wiener: f64,
    pub beta_effective: f64,
}

/// `C_W(r) = (1/(π 2^{d−1}))·(2r−d)/(2r−1−d)`, the Wiener-embedding constant
/// used with Sobolev index `s = r − 1/2`.
pub fn cwien(r: f64, dim: usize) -> Result<f64> {
    let d = dim as f64;
    let den = 2.0 * r - 1.0 - d;
    if !(den > 0.0) {
        return Err(Error::Domain(format!("C_W needs r > (d+1)/2, got r = {r}, d = {dim}")));
    }
    Ok((2.0 * r - d) / den / (std::f64::consts::PI * 2f64.powi(dim as i32 - 1)))
}

/// Natural log of `((2π)^d Σ_k |k|^{power} e^{2β|k|} |û(k)|²)^{1/2}`, along
/// with the `|k|` of the dominant term. Never overflows.
fn log_weighted_l2(f: &SpectralField, power: f64, beta: f64) -> (f64, f64) {
    let band = f.grid().band();
    let n = f.grid().len();
    let mut logs = Vec::with_capacity(band.len());
    for (p, &idx) in band.indices.iter().enumerate() {
        let kmag = band.kmag[p];
        let m2: f64 = (0..f.components()).map(|c| f.coeffs()[c * n + idx].norm_sqr()).sum();
        if m2 == 0.0 || (kmag == 0.0 && power > 0.0) {
            continue;
        }
        let lk = if kmag == 0.0 { 0.0 } else { power * kmag.ln() };
        logs.push((lk + 2.0 * beta * kmag + m2.ln(), kmag));
    }
    let Some(&(lmax, kmax)) = logs.iter().max_by(|a, b| a.0.total_cmp(&b.0)) else {
        return (f64::NEG_INFINITY, 0.0);
    };
    let sum: f64 = logs.iter().map(|(l, _)| (l - lmax).exp()).sum();
    (0.5 * (f.grid().volume().ln() + lmax + sum.ln()), kmax)
}

/// `((2π)^d Σ_k |k|^{power} e^{2β|k|} |û(k)|²)^{1/2}`; switches to the log
/// domain when `β|k|` exceeds 300 anywhere on the band.
pub fn weighted_l2(f: &SpectralField, power: f64, beta: f64) -> Result<f64> {
    if beta < 0.0 {
        return Err(Error::Domain(format!("negative Gevrey radius {beta}")));
    }
    let cutoff = f.grid().cutoff() as f64;
    if beta * cutoff > LOG_DOMAIN_THRESHOLD {
        let (ln, kmax) = log_weighted_l2(f, power, beta);
        let v = ln.exp();
        if !v.is_finite() {
            return Err(Error::Overflow { k_norm: kmax });
        }
        return Ok(v);
    }
    let band = f.grid().band();
    let n = f.grid().len();
    let mut acc = 0.0;
    for (p, &idx) in band.indices.iter().enumerate() {
        let kmag = band.kmag[p];
        let m2: f64 = (0..f.components()).map(|c| f.coeffs()[c * n + idx].norm_sqr()).sum();
        if m2 == 0.0 {
            continue;
        }
        let w = if kmag == 0.0 {
            if power > 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            kmag.powf(power) * (2.0 * beta * kmag).exp()
        };
        acc += w * m2;
    }
    let v = (f.grid().volume() * acc).sqrt();
    if !v.is_finite() {
        return Err(Error::Overflow { k_norm: cutoff });
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellEnergy {
    /// Modes with `round(|k|) = shell`.
    pub shell: usize,
    pub modes: usize,
    /// `(2π)^d Σ_shell |k|^{2r} e^{2β|k|} |û(k)|²`; shells sum to `‖f‖²_β`.
    pub energy: f64,
}

/// Gevrey-weighted energy per integer shell, `k = 0` excluded.
pub fn shell_spectrum(f: &SpectralField, r: f64, beta: f64) -> Result<Vec<ShellEnergy>> {
    if beta < 0.0 {
        return Err(Error::Domain(format!("negative Gevrey radius {beta}")));
    }
    let g = f.grid();
    let band = g.band();
    let n = g.len();
    let mut shells: Vec<ShellEnergy> =
        (0..=g.cutoff()).map(|shell| ShellEnergy { shell, modes: 0, energy: 0.0 }).collect();
    for (p, &idx) in band.indices.iter().enumerate() {
        let kmag = band.kmag[p];
        if kmag == 0.0 {
            continue;
        }
        let m2: f64 = (0..f.components()).map(|c| f.coeffs()[c * n + idx].norm_sqr()).sum();
        let e = g.volume() * kmag.powf(2.0 * r) * (2.0 * beta * kmag).exp() * m2;
        if !e.is_finite() {
            return Err(Error::Overflow { k_norm: kmag });
        }
        let s = &mut shells[kmag.round() as usize];
        s.modes += 1;
        s.energy += e;
    }
    Ok(shells.into_iter().filter(|s| s.modes > 0).collect())
}

/// `‖f‖_β = ‖A^{r/2} e^{βA^{1/2}} f‖`.
pub fn gevrey_norm(f: &SpectralField, r: f64, beta: f64) -> Result<f64> {
    weighted_l2(f, 2.0 * r, beta)
}

/// `‖A^{1/4} f‖_β`.
pub fn gevrey_quarter_norm(f: &SpectralField, r: f64, beta: f64) -> Result<f64> {
    weighted_l2(f, 2.0 * r + 1.0, beta)
}

/// `‖A^{s/2} f‖`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> Result<f64> {
    weighted_l2(f, 2.0 * s, 0.0)
}

/// Root-sum-square Gevrey norm of the members of a coupled state.
pub fn combined_gevrey_norm(fields: &[SpectralField], r: f64, beta: f64) -> Result<f64> {
    let mut acc = 0.0;
    for f in fields {
        acc += gevrey_norm(f, r, beta)?.powi(2);
    }
    Ok(acc.sqrt())
}

/// `Σ_k |k|^{power} e^{β|k|} |û(k)|`, with the Euclidean length over
/// components at each `k`. `power = 0, β = 0` is the Wiener norm.
pub fn weighted_wiener(f: &SpectralField, power: f64, beta: f64) -> Result<f64> {
    if beta < 0.0 {
        return Err(Error::Domain(format!("negative Gevrey radius {beta}")));
    }
    let band = f.grid().band();
    let n = f.grid().len();
    let mut acc = 0.0;
    for (p, &idx) in band.indices.iter().enumerate() {
        let kmag = band.kmag[p];
        let m: f64 = (0..f.components()).map(|c| f.coeffs()[c * n + idx].norm_sqr()).sum::<f64>().sqrt();
        if m == 0.0 {
            continue;
        }
        let w = if kmag == 0.0 {
            if power > 0.0 {
                0.0
            } else {
                1.0
            }
        } else {
            kmag.powf(power) * (beta * kmag).exp()
        };
        acc += w * m;
        if !acc.is_finite() {
            return Err(Error::Overflow { k_norm: kmag });
        }
    }
    Ok(acc)
}

/// `‖f‖_W = Σ_k |û(k)|`.
pub fn wiener_norm(f: &SpectralField) -> f64 {
    weighted_wiener(f, 0.0, 0.0).expect("unweighted sum cannot overflow on finite data")
}

pub fn norm_report(f: &SpectralField, r: f64, beta: f64) -> Result<NormReport> {
    Ok(NormReport {
        l2: f.l2_norm(),
        sobolev_r: sobolev_norm(f, r)?,
        gevrey: gevrey_norm(f, r, beta)?,
        gevrey_quarter: gevrey_quarter_norm(f, r, beta)?,
        wiener: wiener_norm(f),
        beta_effective: beta,
    })
}

/// Full report at the shrinking radius `β₀ − δs`.
pub fn time_varying_norm(f: &SpectralField, p: &GevreyParams, s: f64) -> Result<NormReport> {
    let limit = p.radius_limit();
    if s >= limit {
        return Err(Error::RadiusExhausted { s, limit });
    }
    norm_report(f, p.r, p.beta_at(s))
}

/// Weighted pairing `((f, g)) = (2π)^d Σ_k |k|^{2r} e^{2β|k|} f̂(k)·conj(ĝ(k))`,
/// the inner product behind `‖·‖_β`.
pub fn gevrey_pairing(f: &SpectralField, g: &SpectralField, r: f64, beta: f64) -> Result<Complex64> {
    if beta < 0.0 {
        return Err(Error::Domain(format!("negative Gevrey radius {beta}")));
    }
    if f.grid() != g.grid() || f.components() != g.components() {
        return Err(Error::Dimension("pairing of fields with different shapes".into()));
    }
    let band = f.grid().band();
    let n = f.grid().len();
    let mut acc = Complex64::default();
    for (p, &idx) in band.indices.iter().enumerate() {
        let kmag = band.kmag[p];
        if kmag == 0.0 {
            continue;
        }
        let w = kmag.powf(2.0 * r) * (2.0 * beta * kmag).exp();
        if !w.is_finite() {
            return Err(Error::Overflow { k_norm: kmag });
        }
        for c in 0..f.components() {
            acc += w * f.coeffs()[c * n + idx] * g.coeffs()[c * n + idx].conj();
        }
    }
    Ok(acc * f.grid().volume())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `‖A^{1/4} e^{βA^{1/2}} f‖_W` with `C_W(r)·‖f‖_β`.
pub fn embedding_check(f: &SpectralField, r: f64, beta: f64) -> Result<EmbeddingReport> {
    let cw = cwien(r, f.grid().dim())?;
    let lhs = weighted_wiener(f, 0.5, beta)?;
    let rhs = cw * gevrey_norm(f, r, beta)?;
    Ok(EmbeddingReport { lhs, rhs, holds: lhs <= rhs })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayEntry {
    pub n: u32,
    /// `‖A^{(r+n)/2} f‖`.
    pub lhs: f64,
    /// `(n!/βⁿ)‖f‖_β`.
    pub bound: f64,
    pub ratio: f64,
}

pub const MAX_DECAY_ORDER: u32 = 6;

/// Higher-derivative bounds `‖f‖_{H^{r+n}} <= (n!/βⁿ)‖f‖_β` for `n = 0..=n_max`.
/// Ratios are formed in the log domain.
pub fn derivative_decay_check(f: &SpectralField, r: f64, beta: f64, n_max: u32) -> Result<Vec<DecayEntry>> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("derivative bounds need beta > 0, got {beta}")));
    }
    if n_max > MAX_DECAY_ORDER {
        return Err(Error::Domain(format!("n_max = {n_max} exceeds {MAX_DECAY_ORDER}")));
    }
    let (ln_gevrey, _) = log_weighted_l2(f, 2.0 * r, beta);
    let mut ln_fact = 0.0;
    let mut out = Vec::new();
    for n in 0..=n_max {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        let (ln_lhs, _) = log_weighted_l2(f, 2.0 * (r + n as f64), 0.0);
        let ln_bound = ln_fact - n as f64 * beta.ln() + ln_gevrey;
        let ratio = if ln_lhs == f64::NEG_INFINITY { 0.0 } else { (ln_lhs - ln_bound).exp() };
        out.push(DecayEntry { n, lhs: ln_lhs.exp(), bound: ln_bound.exp(), ratio });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_complexified, random_real_gevrey};
    use crate::spectral::GridSpec;
    use std::f64::consts::PI;

    fn grid2() -> GridSpec {
        GridSpec::new(2, 16, 6).unwrap()
    }

    fn cos_x(g: GridSpec) -> SpectralField {
        let h = Complex64::new(0.5, 0.0);
        SpectralField::from_modes(g, 1, &[([1, 0, 0], 0, h), ([-1, 0, 0], 0, h)]).unwrap()
    }

    #[test]
    fn cwien_closed_forms() {
        assert!((cwien(2.0, 2).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((cwien(2.5, 3).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(matches!(cwien(1.5, 2), Err(Error::Domain(_))));
        assert!(cwien(1.0, 3).is_err());
        // decreasing towards 1/(π 2^{d-1}) from above
        let mut prev = f64::INFINITY;
        for r in [1.6, 2.0, 4.0, 10.0, 100.0, 1e6] {
            let v = cwien(r, 2).unwrap();
            assert!(v < prev && v > 1.0 / (2.0 * PI));
            prev = v;
        }
        assert!((prev - 1.0 / (2.0 * PI)).abs() < 1e-6);
    }

    #[test]
    fn cos_x_gevrey_norm() {
        let f = cos_x(grid2());
        let expect = 2.0 * PI * (0.5f64).sqrt() * 0.5f64.exp();
        let got = gevrey_norm(&f, 2.0, 0.5).unwrap();
        assert!(((got - expect) / expect).abs() < 1e-14);
        assert_eq!(gevrey_norm(&f, 2.0, 0.0).unwrap(), sobolev_norm(&f, 2.0).unwrap());
        assert!(gevrey_norm(&f, 2.0, -0.1).is_err());
    }

    #[test]
    fn wiener_basics() {
        let g = grid2();
        assert_eq!(wiener_norm(&cos_x(g)), 1.0);
        let lone = SpectralField::from_modes(g, 1, &[([2, 3, 0], 0, Complex64::new(0.0, 1.0))]).unwrap();
        assert_eq!(wiener_norm(&lone), 1.0);
        for seed in 0..20 {
            let f = random_complexified(g, 2, 0.3, true, seed);
            assert!(f.to_physical().max_abs() <= wiener_norm(&f) * (1.0 + 1e-14));
        }
    }

    #[test]
    fn log_domain_matches_direct_evaluation() {
        let g = GridSpec::new(2, 64, 30).unwrap();
        let f = random_real_gevrey(g, 1, 12.0, 3);
        // beta*K = 300 sits exactly on the threshold: direct path
        let direct = gevrey_norm(&f, 2.0, 10.0).unwrap();
        let (ln, _) = log_weighted_l2(&f, 4.0, 10.0);
        assert!(((ln.exp() - direct) / direct).abs() < 1e-12);
        // above it the log path is used and stays finite
        assert!(gevrey_norm(&f, 2.0, 11.0).unwrap().is_finite());
    }

    #[test]
    fn overflow_names_the_mode() {
        let g = GridSpec::new(2, 64, 30).unwrap();
        let f = SpectralField::from_modes(g, 1, &[([30, 0, 0], 0, Complex64::new(1.0, 0.0))]).unwrap();
        match gevrey_norm(&f, 2.0, 40.0) {
            Err(Error::Overflow { k_norm }) => assert_eq!(k_norm, 30.0),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn time_varying_norm_consistency() {
        let g = grid2();
        let f = random_real_gevrey(g, 2, 1.0, 5);
        let p = GevreyParams::new(2.0, 1.0, 2.0, 2).unwrap();
        let at0 = time_varying_norm(&f, &p, 0.0).unwrap();
        assert_eq!(at0.gevrey, gevrey_norm(&f, 2.0, 1.0).unwrap());
        let mid = time_varying_norm(&f, &p, 0.25).unwrap();
        assert_eq!(mid.gevrey, gevrey_norm(&f, 2.0, 0.5).unwrap());
        assert_eq!(mid.beta_effective, 0.5);
        assert!(matches!(time_varying_norm(&f, &p, 0.5), Err(Error::RadiusExhausted { .. })));
        let still = p.with_delta(0.0);
        assert_eq!(
            time_varying_norm(&f, &still, 0.0).unwrap(),
            time_varying_norm(&f, &still, 123.0).unwrap()
        );
        // single |k| = 1 mode: β₀ = 1, δ = 2, s = 0.25 leaves weight e^{0.5}
        let lone = SpectralField::from_modes(g, 1, &[([1, 0, 0], 0, Complex64::new(1.0, 0.0))]).unwrap();
        let rep = time_varying_norm(&lone, &p, 0.25).unwrap();
        assert!((rep.gevrey - 2.0 * PI * 0.5f64.exp()).abs() < 1e-13);
    }

    #[test]
    fn embedding_single_mode_and_zero() {
        let g = grid2();
        let lone = SpectralField::from_modes(g, 1, &[([0, 1, 0], 0, Complex64::new(1.0, 0.0))]).unwrap();
        let rep = embedding_check(&lone, 2.0, 0.4).unwrap();
        assert!((rep.lhs - 0.4f64.exp()).abs() < 1e-14);
        let expect_rhs = cwien(2.0, 2).unwrap() * 2.0 * PI * 0.4f64.exp();
        assert!((rep.rhs - expect_rhs).abs() < 1e-13);
        assert!(rep.holds);
        let zero = embedding_check(&SpectralField::zeros(g, 1), 2.0, 0.4).unwrap();
        assert_eq!((zero.lhs, zero.rhs, zero.holds), (0.0, 0.0, true));
    }

    #[test]
    fn derivative_decay_single_mode() {
        let g = grid2();
        let lone = SpectralField::from_modes(g, 1, &[([1, 0, 0], 0, Complex64::new(1.0, 0.0))]).unwrap();
        let rows = derivative_decay_check(&lone, 2.0, 1.0, 1).unwrap();
        assert!((rows[0].ratio - (-1.0f64).exp()).abs() < 1e-14);
        assert!((rows[1].ratio - (-1.0f64).exp()).abs() < 1e-14);
        assert!(derivative_decay_check(&lone, 2.0, 0.0, 1).is_err());
        assert!(derivative_decay_check(&lone, 2.0, 1.0, 7).is_err());
    }

    #[test]
    fn report_orders() {
        let g = grid2();
        let f = random_real_gevrey(g, 2, 0.8, 9);
        let rep = norm_report(&f, 2.0, 0.3).unwrap();
        assert!(rep.gevrey >= rep.sobolev_r);
        assert!(rep.gevrey_quarter >= rep.gevrey);
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.starts_with("{\"l2\":"));
        for key in ["sobolev_r", "gevrey", "gevrey_quarter", "wiener", "beta_effective"] {
            assert!(json.contains(&format!("\"{key}\":")));
        }
    }

    #[test]
    fn shell_spectrum_sums_to_the_norm() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        let f = crate::random::random_complexified(g, 2, 0.7, true, 4);
        let shells = shell_spectrum(&f, 2.0, 0.3).unwrap();
        let total: f64 = shells.iter().map(|s| s.energy).sum();
        let n = gevrey_norm(&f, 2.0, 0.3).unwrap();
        assert!((total - n * n).abs() < 1e-12 * n * n);
        assert_eq!(shells[0].shell, 1);
        // |k| = 1 and |k| = √2 both round to shell 1
        assert_eq!(shells[0].modes, 8);
    }
}
