//! Shared fixtures for the benchmarks.

use gevrey_flow::models::{initial_data, CatalogEntry};
use gevrey_flow::random::random_complexified;
use gevrey_flow::{GridSpec, ModelKind, ModelState, SpectralField};

/// A pair of complexified divergence-free fields on an `n`-point grid.
pub fn field_pair(dim: usize, n: usize) -> (SpectralField, SpectralField) {
    let grid = GridSpec::new(dim, n, n / 2 - 1).expect("valid grid");
    (random_complexified(grid, dim, 0.8, true, 1), random_complexified(grid, dim, 0.8, true, 2))
}

/// The default catalog datum of `kind` at dimension `dim`.
pub fn catalog_state(kind: ModelKind, dim: usize, n: usize) -> ModelState {
    let grid = GridSpec::new(dim, n, n / 2 - 1).expect("valid grid");
    let entry = match (kind.tag().name(), dim) {
        ("euler", 3) => CatalogEntry::TaylorGreen3d,
        ("euler", _) => CatalogEntry::TaylorGreen2d,
        ("sqg", _) => CatalogEntry::SqgTwoMode,
        ("boussinesq", _) => CatalogEntry::BoussStratified,
        ("mhd", _) => CatalogEntry::MhdAlfven,
        _ => CatalogEntry::AnalyticGaussianModes,
    };
    initial_data(&entry, kind, grid).expect("catalog datum")
}
