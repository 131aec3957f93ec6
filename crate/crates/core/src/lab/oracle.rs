//! Brute-force convolution sums over the truncated lattice.
//!
//! Nothing here touches an FFT: every product is a direct double sum over
//! pairs of band modes, so these routines serve as an independent check of
//! the pseudospectral path.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Nonzero band entries `(k, flat index)` of a field.
fn support(f: &SpectralField) -> Vec<([i64; 3], usize)> {
    let band = f.grid().band();
    let n = f.grid().len();
    band.k
        .iter()
        .zip(&band.indices)
        .filter(|(_, &idx)| (0..f.components()).any(|c| f.coeffs()[c * n + idx] != Complex64::default()))
        .map(|(&k, &idx)| (k, idx))
        .collect()
}

fn add_k(a: [i64; 3], b: [i64; 3]) -> [i64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn norm2(k: [i64; 3]) -> i64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

/// `(u·∇)v` as `Σ_{h+j=k} (û(h)·ij) v̂(j)` for `0 < |k| <= K`, optionally
/// followed by `û(k) − (k·û(k))k/|k|²`.
pub fn oracle_advect(u: &SpectralField, v: &SpectralField, project: bool) -> Result<SpectralField> {
    let grid = *u.grid();
    if *v.grid() != grid {
        return Err(Error::Dimension("oracle: grid mismatch".into()));
    }
    if !u.is_vector() {
        return Err(Error::Type("oracle: advecting field must be a vector".into()));
    }
    if project && !v.is_vector() {
        return Err(Error::Type("oracle: projection of a scalar".into()));
    }
    let d = grid.dim();
    let n = grid.len();
    let kc2 = (grid.cutoff() * grid.cutoff()) as i64;
    let su = support(u);
    let sv = support(v);
    let mut out = vec![Complex64::default(); v.components() * n];
    for &(h, ih) in &su {
        for &(j, ij) in &sv {
            let k = add_k(h, j);
            let k2 = norm2(k);
            if k2 == 0 || k2 > kc2 {
                continue;
            }
            let ik = grid.index_of(k).expect("band mode on the lattice");
            let mut udotj = Complex64::default();
            for m in 0..d {
                udotj += u.coeffs()[m * n + ih] * Complex64::new(0.0, j[m] as f64);
            }
            for c in 0..v.components() {
                out[c * n + ik] += udotj * v.coeffs()[c * n + ij];
            }
        }
    }
    if project {
        for idx in 0..n {
            let k = grid.wavenumber(idx);
            let k2 = norm2(k);
            if k2 == 0 {
                continue;
            }
            let mut dot = Complex64::default();
            for m in 0..d {
                dot += out[m * n + idx] * k[m] as f64;
            }
            for m in 0..d {
                out[m * n + idx] -= dot * (k[m] as f64 / k2 as f64);
            }
        }
    }
    SpectralField::from_coeffs(grid, v.components(), out)
}

/// Band-truncated product of scalar `a` with every component of `b`,
/// keeping the `k = 0` mode.
pub fn oracle_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let grid = *a.grid();
    if *b.grid() != grid || a.components() != 1 {
        return Err(Error::Dimension("oracle product needs a scalar and a field on one grid".into()));
    }
    let n = grid.len();
    let kc2 = (grid.cutoff() * grid.cutoff()) as i64;
    let mut out = vec![Complex64::default(); b.components() * n];
    let sb = support(b);
    for &(h, ih) in &support(a) {
        for &(j, ij) in &sb {
            let k = add_k(h, j);
            if norm2(k) > kc2 {
                continue;
            }
            let ik = grid.index_of(k).expect("band mode on the lattice");
            for c in 0..b.components() {
                out[c * n + ik] += a.coeffs()[ih] * b.coeffs()[c * n + ij];
            }
        }
    }
    SpectralField::from_coeffs(grid, b.components(), out)
}

/// `Σ_n a_n uⁿ` with each power truncated to the band before the next
/// multiplication, the Galerkin composition used by the engine.
pub fn oracle_power_series(u: &SpectralField, coeffs: &[f64]) -> Result<SpectralField> {
    let mut acc = SpectralField::zeros(*u.grid(), 1);
    let mut power = u.clone();
    for (i, &a) in coeffs.iter().enumerate() {
        if i > 0 {
            power = oracle_product(&power, u)?;
        }
        if a != 0.0 {
            acc.axpy(Complex64::new(a, 0.0), &power)?;
        }
    }
    Ok(acc)
}

/// Untruncated `uⁿ` of a scalar field as a sparse map `k ↦ coefficient`.
pub fn exact_power(u: &SpectralField, n: usize) -> Result<HashMap<[i64; 3], Complex64>> {
    if u.components() != 1 {
        return Err(Error::Type("exact power of a vector field".into()));
    }
    if n == 0 {
        return Err(Error::Parameter("power 0".into()));
    }
    let base: Vec<([i64; 3], Complex64)> = support(u).into_iter().map(|(k, i)| (k, u.coeffs()[i])).collect();
    let mut acc: HashMap<[i64; 3], Complex64> = base.iter().copied().collect();
    for _ in 1..n {
        let mut next = HashMap::with_capacity(acc.len() * 2);
        for (&h, &a) in &acc {
            for &(j, b) in &base {
                *next.entry(add_k(h, j)).or_insert_with(Complex64::default) += a * b;
            }
        }
        acc = next;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_complexified;
    use crate::spectral::{bilinear_advect, pointwise_product, truncated_power_series, GridSpec};

    #[test]
    fn matches_pseudospectral_advection() {
        let g = GridSpec::new(2, 32, 8).unwrap();
        for seed in 0..5 {
            let u = random_complexified(g, 2, 0.2, true, seed);
            let v = random_complexified(g, 2, 0.2, true, seed + 100);
            for project in [false, true] {
                let a = oracle_advect(&u, &v, project).unwrap();
                let b = bilinear_advect(&u, &v, project).unwrap();
                assert!(a.max_abs_diff(&b).unwrap() <= 1e-12 * a.max_abs_coeff());
            }
        }
        let g3 = GridSpec::new(3, 8, 3).unwrap();
        let u = random_complexified(g3, 3, 0.2, true, 9);
        let eta = random_complexified(g3, 1, 0.2, false, 10);
        let a = oracle_advect(&u, &eta, false).unwrap();
        let b = bilinear_advect(&u, &eta, false).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() <= 1e-12 * a.max_abs_coeff());
    }

    #[test]
    fn products_and_powers() {
        let g = GridSpec::new(2, 16, 5).unwrap();
        let u = random_complexified(g, 1, 0.4, false, 1);
        let a = oracle_product(&u, &u).unwrap();
        let b = pointwise_product(&u, &u).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() <= 1e-13 * a.max_abs_coeff());
        let coeffs = [0.3, -1.0, 0.5, 0.25];
        let a = oracle_power_series(&u, &coeffs).unwrap();
        let b = truncated_power_series(&u, &coeffs).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() <= 1e-12 * a.max_abs_coeff());
    }

    #[test]
    fn exact_power_agrees_when_truncation_is_inactive() {
        // support |k| <= 1, cube lands in |k| <= 3 <= K
        let g = GridSpec::new(2, 16, 5).unwrap();
        let c = Complex64::new(0.3, -0.2);
        let u = SpectralField::from_modes(
            g,
            1,
            &[([1, 0, 0], 0, c), ([-1, 0, 0], 0, c.conj()), ([0, 1, 0], 0, Complex64::new(0.0, 0.4))],
        )
        .unwrap();
        let exact = exact_power(&u, 3).unwrap();
        let trunc = truncated_power_series(&u, &[0.0, 0.0, 1.0]).unwrap();
        for (k, v) in &exact {
            assert!((trunc.get(*k, 0) - v).norm() < 1e-15);
        }
        let total: f64 = exact.values().map(|v| v.norm()).sum();
        let band_total: f64 = trunc.coeffs().iter().map(|v| v.norm()).sum();
        assert!((total - band_total).abs() < 1e-14);
    }

    #[test]
    fn exact_power_differs_once_truncation_acts() {
        let g = GridSpec::new(2, 16, 2).unwrap();
        let u = random_complexified(g, 1, 0.1, false, 3);
        let exact = exact_power(&u, 3).unwrap();
        let trunc = truncated_power_series(&u, &[0.0, 0.0, 1.0]).unwrap();
        let worst = exact
            .iter()
            .filter(|(k, _)| norm2(**k) <= 4)
            .map(|(k, v)| (trunc.get(*k, 0) - v).norm())
            .fold(0.0, f64::max);
        assert!(worst > 1e-6);
    }
}
