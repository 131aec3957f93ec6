//! Seeded random fields used by the catalog, the estimate lab and the tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{leray_project, GridSpec, SpectralField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unconstrained complex coefficients, uniform in the unit square, on the band.
pub fn random_trig_polynomial(grid: GridSpec, components: usize, seed: u64) -> SpectralField {
    let mut rng = rng(seed);
    let band = grid.band();
    let n = grid.len();
    let mut coeffs = vec![Complex64::default(); components * n];
    for c in 0..components {
        for &idx in &band.indices {
            coeffs[c * n + idx] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    SpectralField::from_coeffs(grid, components, coeffs).expect("shape is consistent")
}

/// Complexified field `û(k) = e^{-β_decay|k|}·U·e^{iφ}` with independent
/// `U ~ U(0,1)` and `φ ~ U(0,2π)`, mean-free, without Hermitian symmetry.
/// Vector fields are Leray-projected when `project` is set.
pub fn random_complexified(
    grid: GridSpec,
    components: usize,
    beta_decay: f64,
    project: bool,
    seed: u64,
) -> SpectralField {
    random_complexified_with(grid, components, beta_decay, project, &mut rng(seed))
}

pub fn random_complexified_with<R: Rng>(
    grid: GridSpec,
    components: usize,
    beta_decay: f64,
    project: bool,
    rng: &mut R,
) -> SpectralField {
    let band = grid.band();
    let n = grid.len();
    let mut coeffs = vec![Complex64::default(); components * n];
    for c in 0..components {
        for (p, &idx) in band.indices.iter().enumerate() {
            let rho = (-beta_decay * band.kmag[p]).exp() * rng.gen::<f64>();
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            coeffs[c * n + idx] = Complex64::from_polar(rho, phi);
        }
    }
    let mut f = SpectralField::from_coeffs(grid, components, coeffs).expect("shape is consistent");
    f.enforce_mean_free();
    if project && f.is_vector() {
        f = leray_project(&f).expect("vector field");
    }
    f
}

/// Real-valued Gevrey field: random phases with `|û(k)| ∝ e^{-β_decay|k|}`,
/// symmetrized so that `û(-k) = conj û(k)`, mean-free, projected for vectors.
pub fn random_real_gevrey(grid: GridSpec, components: usize, beta_decay: f64, seed: u64) -> SpectralField {
    random_real_gevrey_with(grid, components, beta_decay, &mut rng(seed))
}

pub fn random_real_gevrey_with<R: Rng>(
    grid: GridSpec,
    components: usize,
    beta_decay: f64,
    rng: &mut R,
) -> SpectralField {
    let band = grid.band();
    let n = grid.len();
    let mut coeffs = vec![Complex64::default(); components * n];
    for c in 0..components {
        for (p, &idx) in band.indices.iter().enumerate() {
            let q = band.negated[p];
            if q < p {
                continue;
            }
            let rho = (-beta_decay * band.kmag[p]).exp() * (0.5 + 0.5 * rng.gen::<f64>());
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let v = Complex64::from_polar(rho, phi);
            if q == p {
                coeffs[c * n + idx] = Complex64::new(v.re, 0.0);
            } else {
                coeffs[c * n + idx] = v;
                coeffs[c * n + band.indices[q]] = v.conj();
            }
        }
    }
    let mut f = SpectralField::from_coeffs(grid, components, coeffs).expect("shape is consistent");
    f.enforce_mean_free();
    if f.is_vector() {
        f = leray_project(&f).expect("vector field");
    }
    f.detect_flags();
    f
}
