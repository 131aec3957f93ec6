//! Dealiased pseudospectral products.
//!
//! Band coefficients (`|k| <= K`) are scattered onto a product grid with
//! `M >= 3K + 1` points per axis, multiplied pointwise and transformed
//! back. Any product mode that lands in the band is then free of aliasing,
//! so the truncated quadratic term equals the exact convolution.

use num_complex::Complex64;

use super::fft::{fft_nd_boxed, Direction};
use super::field::{FieldFlags, SpectralField};
use super::grid::{index_on, GridSpec};
use super::multiplier::leray_project;
use crate::error::{Error, Result};

struct ProductGrid {
    dim: usize,
    m: usize,
    /// Position on the product grid of each band mode.
    slots: Vec<usize>,
    /// Axis indices inside `[-K, K]`.
    keep: Vec<bool>,
}

impl ProductGrid {
    fn new(grid: &GridSpec) -> Result<Self> {
        grid.check_dealias()?;
        let m = grid.product_size();
        let band = grid.band();
        let slots = band
            .k
            .iter()
            .map(|&k| index_on(grid.dim(), m, k).expect("product grid holds the band"))
            .collect();
        let k = grid.cutoff();
        let keep = (0..m).map(|i| i <= k || i >= m - k).collect();
        Ok(Self { dim: grid.dim(), m, slots, keep })
    }

    fn len(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    /// Physical samples of `Σ_band sym(p)·û(k_p) e^{ik·x}` on the product grid.
    fn synthesize(&self, band_values: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
        let mut data = vec![Complex64::default(); self.len()];
        for (slot, v) in self.slots.iter().zip(band_values) {
            data[*slot] = v;
        }
        fft_nd_boxed(&mut data, self.dim, self.m, Direction::Inverse, &self.keep);
        data
    }

    /// Band coefficients of physical samples on the product grid.
    fn analyze(&self, mut data: Vec<Complex64>) -> Vec<Complex64> {
        fft_nd_boxed(&mut data, self.dim, self.m, Direction::Forward, &self.keep);
        let scale = 1.0 / self.len() as f64;
        self.slots.iter().map(|&s| data[s] * scale).collect()
    }
}

fn band_values(f: &SpectralField, c: usize) -> impl Iterator<Item = Complex64> {
    let comp = f.component(c);
    let values: Vec<Complex64> = f.grid().band().indices.iter().map(|&idx| comp[idx]).collect();
    values.into_iter()
}

/// `(u·∇)v`, optionally Leray-projected, truncated to the band with the
/// `k = 0` coefficient removed.
///
/// `u` must be a vector field; `v` may be a vector field (Euler/MHD
/// advection) or a scalar (transport). Complexified inputs are handled by
/// the same formula, which coincides with `B_ℂ` by bilinearity.
pub fn bilinear_advect(u: &SpectralField, v: &SpectralField, project: bool) -> Result<SpectralField> {
    let grid = *u.grid();
    if *v.grid() != grid {
        return Err(Error::Dimension(format!("grid mismatch: {:?} vs {:?}", grid, v.grid())));
    }
    if !u.is_vector() {
        return Err(Error::Type("advecting field must be a vector field".into()));
    }
    if project && !v.is_vector() {
        return Err(Error::Type("Leray projection of a scalar transport term".into()));
    }
    let pg = ProductGrid::new(&grid)?;
    let d = grid.dim();
    let band = grid.band();
    let n = grid.len();

    let velocity: Vec<Vec<Complex64>> = (0..d).map(|j| pg.synthesize(band_values(u, j))).collect();
    let mut out = SpectralField::zeros(grid, v.components());
    for c in 0..v.components() {
        let comp = v.component(c);
        let mut acc = vec![Complex64::default(); pg.len()];
        for (j, uj) in velocity.iter().enumerate() {
            let grad = pg.synthesize(
                band.indices
                    .iter()
                    .zip(&band.k)
                    .map(|(&idx, k)| comp[idx] * Complex64::new(0.0, k[j] as f64)),
            );
            for ((a, x), y) in acc.iter_mut().zip(uj).zip(&grad) {
                *a += x * y;
            }
        }
        let coeffs = pg.analyze(acc);
        let dst = &mut out.coeffs_mut()[c * n..(c + 1) * n];
        for (&idx, val) in band.indices.iter().zip(coeffs) {
            dst[idx] = val;
        }
    }
    out.enforce_mean_free();
    let hermitian = u.flags().hermitian && v.flags().hermitian;
    if project {
        out = leray_project(&out)?;
    }
    out.set_flags(FieldFlags { mean_free: true, div_free: project, hermitian });
    Ok(out)
}

/// Relative divergence above which the flux forms refuse a field.
pub const SOLENOIDAL_TOL: f64 = 1e-10;

fn check_solenoidal(u: &SpectralField) -> Result<()> {
    let ratio = u.divergence_ratio()?;
    if ratio > SOLENOIDAL_TOL {
        return Err(Error::Precondition(format!("flux form needs a divergence-free field (ratio {ratio:.2e})")));
    }
    Ok(())
}

/// `out_j(k) = Σ_i i k_i F[q_ij](k)` on the band, accumulated per flux.
struct FluxDivergence<'a> {
    pg: &'a ProductGrid,
    band: &'a super::grid::Band,
    out: Vec<Vec<Complex64>>,
}

impl<'a> FluxDivergence<'a> {
    fn new(pg: &'a ProductGrid, band: &'a super::grid::Band, components: usize) -> Self {
        Self { pg, band, out: vec![vec![Complex64::default(); band.len()]; components] }
    }

    /// Adds the transform of `flux` as `∂_axis` of component `j`, and as
    /// `∂_j` of component `axis` when `symmetric`.
    fn add(&mut self, flux: Vec<Complex64>, axis: usize, j: usize, symmetric: bool) {
        let hat = self.pg.analyze(flux);
        for (p, h) in hat.iter().enumerate() {
            let k = self.band.k[p];
            self.out[j][p] += Complex64::new(0.0, k[axis] as f64) * h;
            if symmetric && axis != j {
                self.out[axis][p] += Complex64::new(0.0, k[j] as f64) * h;
            }
        }
    }

    fn finish(self, grid: GridSpec, project: bool, hermitian: bool) -> Result<SpectralField> {
        let n = grid.len();
        let mut f = SpectralField::zeros(grid, self.out.len());
        for (c, vals) in self.out.iter().enumerate() {
            let dst = &mut f.coeffs_mut()[c * n..(c + 1) * n];
            for (&idx, v) in self.band.indices.iter().zip(vals) {
                dst[idx] = *v;
            }
        }
        f.enforce_mean_free();
        if project {
            f = leray_project(&f)?;
        }
        f.set_flags(FieldFlags { mean_free: true, div_free: project, hermitian });
        Ok(f)
    }
}

/// `(u·∇)u` for a divergence-free `u`, evaluated as `∇·(u⊗u)` from the
/// `d(d+1)/2` symmetric products. Mode by mode this is the same sum as
/// [`bilinear_advect`], since `k·û(k) = 0`.
pub fn self_advect_solenoidal(u: &SpectralField, project: bool) -> Result<SpectralField> {
    if !u.is_vector() {
        return Err(Error::Type("advecting field must be a vector field".into()));
    }
    check_solenoidal(u)?;
    let grid = *u.grid();
    let pg = ProductGrid::new(&grid)?;
    let band = grid.band();
    let d = grid.dim();
    let phys: Vec<Vec<Complex64>> = (0..d).map(|j| pg.synthesize(band_values(u, j))).collect();
    let mut div = FluxDivergence::new(&pg, &band, d);
    for i in 0..d {
        for j in i..d {
            let q = phys[i].iter().zip(&phys[j]).map(|(a, b)| a * b).collect();
            div.add(q, i, j, true);
        }
    }
    div.finish(grid, project, u.flags().hermitian)
}

/// `((w·∇)v, (v·∇)w)`, both Leray-projected, for divergence-free `v` and
/// `w`. The flux tensors `w⊗v` and `v⊗w` are transposes, so each product
/// is transformed once.
pub fn elsasser_advect(v: &SpectralField, w: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    let grid = *v.grid();
    if *w.grid() != grid {
        return Err(Error::Dimension(format!("grid mismatch: {:?} vs {:?}", grid, w.grid())));
    }
    if !v.is_vector() || !w.is_vector() {
        return Err(Error::Type("Elsässer fields must be vector fields".into()));
    }
    check_solenoidal(v)?;
    check_solenoidal(w)?;
    let pg = ProductGrid::new(&grid)?;
    let band = grid.band();
    let d = grid.dim();
    let pv: Vec<Vec<Complex64>> = (0..d).map(|j| pg.synthesize(band_values(v, j))).collect();
    let pw: Vec<Vec<Complex64>> = (0..d).map(|j| pg.synthesize(band_values(w, j))).collect();
    let mut for_v = FluxDivergence::new(&pg, &band, d);
    let mut for_w = FluxDivergence::new(&pg, &band, d);
    for i in 0..d {
        for j in 0..d {
            // q = w_i v_j: ∂_i for (w·∇)v_j, ∂_j for (v·∇)w_i
            let q: Vec<Complex64> = pw[i].iter().zip(&pv[j]).map(|(a, b)| a * b).collect();
            let hat = pg.analyze(q);
            for (p, h) in hat.iter().enumerate() {
                let k = band.k[p];
                for_v.out[j][p] += Complex64::new(0.0, k[i] as f64) * h;
                for_w.out[i][p] += Complex64::new(0.0, k[j] as f64) * h;
            }
        }
    }
    let hermitian = v.flags().hermitian && w.flags().hermitian;
    Ok((for_v.finish(grid, true, hermitian)?, for_w.finish(grid, true, hermitian)?))
}

/// Band-truncated pointwise product of a scalar field with each component of `b`.
pub fn pointwise_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let grid = *a.grid();
    if *b.grid() != grid {
        return Err(Error::Dimension("grid mismatch in product".into()));
    }
    if a.components() != 1 {
        return Err(Error::Type("left factor of a pointwise product must be scalar".into()));
    }
    let pg = ProductGrid::new(&grid)?;
    let band = grid.band();
    let n = grid.len();
    let lhs = pg.synthesize(band_values(a, 0));
    let mut out = SpectralField::zeros(grid, b.components());
    for c in 0..b.components() {
        let mut rhs = pg.synthesize(band_values(b, c));
        rhs.iter_mut().zip(&lhs).for_each(|(r, l)| *r *= l);
        let coeffs = pg.analyze(rhs);
        let dst = &mut out.coeffs_mut()[c * n..(c + 1) * n];
        for (&idx, val) in band.indices.iter().zip(coeffs) {
            dst[idx] = val;
        }
    }
    out.detect_flags();
    Ok(out)
}

/// `Σ_{n>=1} a_n uⁿ` for a scalar field, each power formed by multiplying
/// the previous (band-truncated) power by `u` and truncating again.
pub fn truncated_power_series(u: &SpectralField, coeffs: &[f64]) -> Result<SpectralField> {
    if u.components() != 1 {
        return Err(Error::Type("power series of a vector field".into()));
    }
    let grid = *u.grid();
    let pg = ProductGrid::new(&grid)?;
    let band = grid.band();
    let base = pg.synthesize(band_values(u, 0));
    let mut power: Vec<Complex64> = band_values(u, 0).collect();
    let mut acc: Vec<Complex64> = vec![Complex64::default(); band.len()];
    for (i, &a) in coeffs.iter().enumerate() {
        if i > 0 {
            let mut phys = pg.synthesize(power.iter().copied());
            phys.iter_mut().zip(&base).for_each(|(p, b)| *p *= b);
            power = pg.analyze(phys);
        }
        if a != 0.0 {
            acc.iter_mut().zip(&power).for_each(|(s, p)| *s += a * p);
        }
    }
    let n = grid.len();
    let mut full = vec![Complex64::default(); n];
    for (&idx, v) in band.indices.iter().zip(acc) {
        full[idx] = v;
    }
    SpectralField::from_coeffs(grid, 1, full)
}
