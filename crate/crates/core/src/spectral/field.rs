use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft::{fft_nd, Direction};
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Tolerance on `max|k·û| / max|k||û|` for a field to count as divergence-free.
pub const DIV_FREE_TOL: f64 = 1e-12;
/// Tolerance on `max|û(-k) - conj û(k)|` (relative to the largest coefficient).
pub const HERMITIAN_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldFlags {
    pub mean_free: bool,
    pub div_free: bool,
    pub hermitian: bool,
}

/// Truncated Fourier coefficients of a scalar or vector field.
///
/// Storage is component-major over the full `n^d` lattice; coefficients
/// outside the band `|k| <= K` are always zero. A complexified field
/// `u₁ + i u₂` is stored as one unconstrained coefficient array with
/// `hermitian = false`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    components: usize,
    coeffs: Vec<Complex64>,
    flags: FieldFlags,
}

/// Samples of a field on the native `n^d` physical grid, `x_j = 2π j / n`.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    pub grid: GridSpec,
    pub components: usize,
    /// Component-major samples.
    pub values: Vec<Complex64>,
}

impl PhysicalField {
    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[c * n..(c + 1) * n]
    }

    /// Largest pointwise Euclidean length over the grid.
    pub fn max_abs(&self) -> f64 {
        let n = self.grid.len();
        (0..n)
            .map(|i| {
                (0..self.components)
                    .map(|c| self.values[c * n + i].norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `∫ |u|² dx` by the rectangle rule, exact for trigonometric polynomials.
    pub fn l2_norm_sqr(&self) -> f64 {
        let cell = self.grid.volume() / self.grid.len() as f64;
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * cell
    }
}

impl SpectralField {
    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        assert!(components >= 1);
        Self {
            grid,
            components,
            coeffs: vec![Complex64::default(); components * grid.len()],
            flags: FieldFlags { mean_free: true, div_free: components == grid.dim(), hermitian: true },
        }
    }

    /// Builds a field from `(k, component, value)` triples; flags are detected.
    pub fn from_modes(
        grid: GridSpec,
        components: usize,
        modes: &[([i64; 3], usize, Complex64)],
    ) -> Result<Self> {
        let mut f = Self::zeros(grid, components);
        let kc2 = (grid.cutoff() * grid.cutoff()) as i64;
        for &(k, c, v) in modes {
            if c >= components {
                return Err(Error::Dimension(format!("component {c} out of range")));
            }
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let idx = grid
                .index_of(k)
                .filter(|_| k2 <= kc2)
                .ok_or_else(|| Error::Config(format!("mode {k:?} outside the band |k| <= {}", grid.cutoff())))?;
            f.coeffs[c * grid.len() + idx] += v;
        }
        f.detect_flags();
        Ok(f)
    }

    /// Wraps raw coefficients; anything outside the band is discarded.
    pub fn from_coeffs(grid: GridSpec, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.len() {
            return Err(Error::Dimension(format!(
                "expected {} coefficients for {components} components, got {}",
                components * grid.len(),
                coeffs.len()
            )));
        }
        let mut f = Self { grid, components, coeffs, flags: FieldFlags::default() };
        f.truncate_in_place(grid.cutoff());
        f.detect_flags();
        Ok(f)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_vector(&self) -> bool {
        self.components == self.grid.dim()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn flags(&self) -> FieldFlags {
        self.flags
    }

    pub(crate) fn set_flags(&mut self, flags: FieldFlags) {
        self.flags = flags;
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn get(&self, k: [i64; 3], c: usize) -> Complex64 {
        self.grid
            .index_of(k)
            .map(|idx| self.coeffs[c * self.grid.len() + idx])
            .unwrap_or_default()
    }

    /// Same field re-expressed on a grid with identical lattice but a
    /// different cutoff; modes beyond the new cutoff are dropped.
    pub fn on_grid(&self, grid: GridSpec) -> Result<Self> {
        if grid.dim() != self.grid.dim() || grid.n() != self.grid.n() {
            return Err(Error::Dimension("lattices differ".into()));
        }
        let mut f = self.clone();
        f.grid = grid;
        f.truncate_in_place(grid.cutoff());
        Ok(f)
    }

    pub(crate) fn truncate_in_place(&mut self, cutoff: usize) {
        let n = self.grid.len();
        let kc2 = (cutoff * cutoff) as i64;
        for idx in 0..n {
            let k = self.grid.wavenumber(idx);
            if k[0] * k[0] + k[1] * k[1] + k[2] * k[2] > kc2 {
                for c in 0..self.components {
                    self.coeffs[c * n + idx] = Complex64::default();
                }
            }
        }
    }

    /// Zeroes the `k = 0` coefficient of every component.
    pub fn enforce_mean_free(&mut self) {
        let n = self.grid.len();
        for c in 0..self.components {
            self.coeffs[c * n] = Complex64::default();
        }
        self.flags.mean_free = true;
    }

    pub fn is_mean_free(&self) -> bool {
        (0..self.components).all(|c| self.coeffs[c * self.grid.len()] == Complex64::default())
    }

    /// `max_k |k·û(k)| / max_k |k||û(k)|`; zero for the zero field.
    pub fn divergence_ratio(&self) -> Result<f64> {
        if !self.is_vector() {
            return Err(Error::Type("divergence of a non-vector field".into()));
        }
        let band = self.grid.band();
        let n = self.grid.len();
        let (mut num, mut den) = (0.0f64, 0.0f64);
        for (p, &idx) in band.indices.iter().enumerate() {
            let k = band.k[p];
            let mut dot = Complex64::default();
            let mut mag = 0.0;
            for c in 0..self.components {
                let v = self.coeffs[c * n + idx];
                dot += v * k[c] as f64;
                mag += v.norm_sqr();
            }
            num = num.max(dot.norm());
            den = den.max(band.kmag[p] * mag.sqrt());
        }
        Ok(if den == 0.0 { 0.0 } else { num / den })
    }

    /// `max_k |û(-k) - conj û(k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let band = self.grid.band();
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for (p, &idx) in band.indices.iter().enumerate() {
            let q = band.indices[band.negated[p]];
            for c in 0..self.components {
                let d = self.coeffs[c * n + q] - self.coeffs[c * n + idx].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Recomputes all three flags from the coefficients.
    pub fn detect_flags(&mut self) {
        let scale = self.max_abs_coeff();
        self.flags = FieldFlags {
            mean_free: self.is_mean_free(),
            div_free: self.is_vector() && self.divergence_ratio().map(|r| r <= DIV_FREE_TOL).unwrap_or(false),
            hermitian: self.hermitian_defect() <= HERMITIAN_TOL * scale.max(1.0),
        };
    }

    /// Checks every claimed flag against the data.
    pub fn validate(&self) -> Result<()> {
        if self.flags.mean_free && !self.is_mean_free() {
            return Err(Error::State("field flagged mean-free has nonzero k = 0 coefficient".into()));
        }
        if self.flags.div_free {
            let ratio = self.divergence_ratio()?;
            if ratio > DIV_FREE_TOL {
                return Err(Error::State(format!("field flagged divergence-free has ratio {ratio:e}")));
            }
        }
        if self.flags.hermitian {
            let defect = self.hermitian_defect();
            if defect > HERMITIAN_TOL * self.max_abs_coeff().max(1.0) {
                return Err(Error::State(format!("field flagged hermitian has defect {defect:e}")));
            }
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Dimension(format!(
                "fields differ in grid or components ({:?}/{} vs {:?}/{})",
                self.grid, self.components, other.grid, other.components
            )));
        }
        Ok(())
    }

    /// Complex L² pairing `⟨f, g⟩ = (2π)^d Σ f̂ conj(ĝ)`, linear in `f`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_shape(other)?;
        let band = self.grid.band();
        let n = self.grid.len();
        let mut acc = Complex64::default();
        for c in 0..self.components {
            for &idx in &band.indices {
                acc += self.coeffs[c * n + idx] * other.coeffs[c * n + idx].conj();
            }
        }
        Ok(acc * self.grid.volume())
    }

    /// `(2π)^{d/2} (Σ|û|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (self.grid.volume() * s).sqrt()
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        let mut f = self.clone();
        f.coeffs.iter_mut().for_each(|c| *c *= z);
        if z.im != 0.0 {
            f.flags.hermitian = false;
        }
        f
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: Complex64, x: &Self) -> Result<()> {
        self.check_same_shape(x)?;
        for (y, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += a * v;
        }
        self.flags = FieldFlags {
            mean_free: self.flags.mean_free && x.flags.mean_free,
            div_free: self.flags.div_free && x.flags.div_free,
            hermitian: self.flags.hermitian && x.flags.hermitian && a.im == 0.0,
        };
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut f = self.clone();
        f.axpy(Complex64::new(1.0, 0.0), other)?;
        Ok(f)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut f = self.clone();
        f.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(f)
    }

    /// Largest coefficient-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Real part `u₁` and imaginary part `u₂` of a complexified field
    /// `u = u₁ + i u₂`, each returned as a real (hermitian) field.
    pub fn split_complexified(&self) -> (Self, Self) {
        let band = self.grid.band();
        let n = self.grid.len();
        let mut re = Self::zeros(self.grid, self.components);
        let mut im = Self::zeros(self.grid, self.components);
        for (p, &idx) in band.indices.iter().enumerate() {
            let q = band.indices[band.negated[p]];
            for c in 0..self.components {
                let a = self.coeffs[c * n + idx];
                let b = self.coeffs[c * n + q].conj();
                re.coeffs[c * n + idx] = (a + b) * 0.5;
                im.coeffs[c * n + idx] = (a - b) * Complex64::new(0.0, -0.5);
            }
        }
        for part in [&mut re, &mut im] {
            part.flags = FieldFlags { hermitian: true, ..self.flags };
        }
        (re, im)
    }

    /// Samples on the native physical grid.
    pub fn to_physical(&self) -> PhysicalField {
        let n = self.grid.len();
        let mut values = self.coeffs.clone();
        for c in 0..self.components {
            fft_nd(&mut values[c * n..(c + 1) * n], self.grid.dim(), self.grid.n(), Direction::Inverse);
        }
        PhysicalField { grid: self.grid, components: self.components, values }
    }

    /// Fourier coefficients of physical samples, truncated to the band.
    pub fn to_spectral(phys: &PhysicalField) -> Result<Self> {
        let n = phys.grid.len();
        if phys.values.len() != phys.components * n || phys.components == 0 {
            return Err(Error::Config(format!(
                "physical array has {} samples, expected {} x {n}",
                phys.values.len(),
                phys.components
            )));
        }
        let mut coeffs = phys.values.clone();
        let scale = 1.0 / n as f64;
        for c in 0..phys.components {
            let slot = &mut coeffs[c * n..(c + 1) * n];
            fft_nd(slot, phys.grid.dim(), phys.grid.n(), Direction::Forward);
            slot.iter_mut().for_each(|v| *v *= scale);
        }
        Self::from_coeffs(phys.grid, phys.components, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_trig_polynomial;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_mode_is_a_plane_wave() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        let k0 = [2i64, -3, 0];
        let f = SpectralField::from_modes(g, 1, &[(k0, 0, c(1.0, 0.0))]).unwrap();
        let phys = f.to_physical();
        let n = g.n();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (2.0 * PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64);
                let expect = Complex64::from_polar(1.0, k0[0] as f64 * x + k0[1] as f64 * y);
                assert!((phys.values[i * n + j] - expect).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for (dim, n, k) in [(2, 16, 5), (3, 8, 3)] {
            let g = GridSpec::new(dim, n, k).unwrap();
            let f = random_trig_polynomial(g, 2, 11);
            let phys = f.to_physical();
            let back = SpectralField::to_spectral(&phys).unwrap();
            let rel = back.max_abs_diff(&f).unwrap() / f.max_abs_coeff();
            assert!(rel <= 1e-13, "round trip rel err {rel:e}");
            let quad = phys.l2_norm_sqr();
            let parseval = f.l2_norm().powi(2);
            assert!(((quad - parseval) / parseval).abs() <= 1e-12);
        }
    }

    #[test]
    fn from_modes_rejects_out_of_band() {
        let g = GridSpec::new(2, 16, 3).unwrap();
        assert!(SpectralField::from_modes(g, 1, &[([3, 1, 0], 0, c(1.0, 0.0))]).is_err());
    }

    #[test]
    fn split_recombines() {
        let g = GridSpec::new(2, 16, 4).unwrap();
        let f = crate::random::random_complexified(g, 2, 0.5, false, 3);
        let (re, im) = f.split_complexified();
        assert!(re.hermitian_defect() < 1e-15 && im.hermitian_defect() < 1e-15);
        let mut back = re.clone();
        back.axpy(c(0.0, 1.0), &im).unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = GridSpec::new(2, 16, 3).unwrap();
        let phys = PhysicalField { grid: g, components: 1, values: vec![c(0.0, 0.0); 10] };
        assert!(matches!(SpectralField::to_spectral(&phys), Err(Error::Config(_))));
        let a = SpectralField::zeros(g, 1);
        let b = SpectralField::zeros(g, 2);
        assert!(matches!(a.add(&b), Err(Error::Dimension(_))));
    }
}
