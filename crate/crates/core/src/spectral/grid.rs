use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How quadratic products are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    /// Products on a zero-padded grid with at least `3K + 1` points per axis.
    #[default]
    Padded,
    /// Products on the native `n`-grid; requires `3K + 1 <= n`.
    Native,
}

/// Periodic lattice on `[0, 2π]^d` with a radial Galerkin cutoff `|k| <= K`.
///
/// Wavenumbers along each axis run over `[-n/2, n/2 - 1]`; lattice storage is
/// row-major with the last axis fastest, and index `i` on an axis maps to the
/// wavenumber `i` for `i < n/2` and `i - n` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    cutoff: usize,
    #[serde(default)]
    dealias: Dealias,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, cutoff: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::Config(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n < 8 || n % 2 != 0 {
            return Err(Error::Config(format!("modes per axis must be even and >= 8, got {n}")));
        }
        if cutoff < 1 || cutoff > n / 2 - 1 {
            return Err(Error::Config(format!(
                "cutoff K = {cutoff} outside [1, n/2 - 1] = [1, {}]",
                n / 2 - 1
            )));
        }
        Ok(Self { dim, n, cutoff, dealias: Dealias::Padded })
    }

    pub fn with_dealias(mut self, dealias: Dealias) -> Result<Self> {
        self.dealias = dealias;
        self.check_dealias()?;
        Ok(self)
    }

    pub fn with_cutoff(self, cutoff: usize) -> Result<Self> {
        let g = Self::new(self.dim, self.n, cutoff)?;
        g.with_dealias(self.dealias)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dealias(&self) -> Dealias {
        self.dealias
    }

    /// Number of lattice points, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `(2π)^d`, the Parseval factor.
    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(self.dim as i32)
    }

    pub(crate) fn check_dealias(&self) -> Result<()> {
        if self.dealias == Dealias::Native && 3 * self.cutoff + 1 > self.n {
            return Err(Error::Config(format!(
                "aliasing-unsafe cutoff: K = {} needs at least {} points per axis for exact products, grid has {}",
                self.cutoff,
                3 * self.cutoff + 1,
                self.n
            )));
        }
        Ok(())
    }

    /// Points per axis of the grid on which quadratic products are formed.
    pub fn product_size(&self) -> usize {
        match self.dealias {
            Dealias::Native => self.n,
            Dealias::Padded => fft_friendly_size(3 * self.cutoff + 1),
        }
    }

    /// Wavenumber vector at a flat lattice index; unused axes are zero.
    pub fn wavenumber(&self, idx: usize) -> [i64; 3] {
        wavenumber_on(self.dim, self.n, idx)
    }

    /// Flat index of wavenumber `k`, if it lies in the stored range.
    pub fn index_of(&self, k: [i64; 3]) -> Option<usize> {
        index_on(self.dim, self.n, k)
    }

    /// Cached description of the modes with `|k| <= K`.
    pub fn band(&self) -> Arc<Band> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize, usize), Arc<Band>>>> = OnceLock::new();
        let key = (self.dim, self.n, self.cutoff);
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("band cache poisoned");
        guard.entry(key).or_insert_with(|| Arc::new(Band::build(self))).clone()
    }
}

/// Modes kept by the Galerkin truncation, in lattice order.
#[derive(Debug)]
pub struct Band {
    /// Flat lattice index of every retained mode (including `k = 0`).
    pub indices: Vec<usize>,
    pub k: Vec<[i64; 3]>,
    pub kmag: Vec<f64>,
    /// Position in `indices` of the mode `-k`.
    pub negated: Vec<usize>,
}

impl Band {
    fn build(grid: &GridSpec) -> Self {
        let kc2 = (grid.cutoff * grid.cutoff) as i64;
        let mut indices = Vec::new();
        let mut k = Vec::new();
        let mut kmag = Vec::new();
        for idx in 0..grid.len() {
            let kv = grid.wavenumber(idx);
            let k2 = kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2];
            if k2 <= kc2 {
                indices.push(idx);
                k.push(kv);
                kmag.push((k2 as f64).sqrt());
            }
        }
        let pos: HashMap<usize, usize> = indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let negated = k
            .iter()
            .map(|kv| {
                let nk = [-kv[0], -kv[1], -kv[2]];
                pos[&grid.index_of(nk).expect("band is symmetric")]
            })
            .collect();
        Self { indices, k, kmag, negated }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub(crate) fn wavenumber_on(dim: usize, n: usize, mut idx: usize) -> [i64; 3] {
    let mut k = [0i64; 3];
    for axis in (0..dim).rev() {
        let i = idx % n;
        idx /= n;
        k[axis] = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
    }
    k
}

pub(crate) fn index_on(dim: usize, n: usize, k: [i64; 3]) -> Option<usize> {
    let half = (n / 2) as i64;
    let mut idx = 0usize;
    for (axis, &ka) in k.iter().enumerate() {
        if axis >= dim {
            if ka != 0 {
                return None;
            }
            continue;
        }
        if ka < -half || ka >= half {
            return None;
        }
        let i = if ka >= 0 { ka } else { ka + n as i64 } as usize;
        idx = idx * n + i;
    }
    Some(idx)
}

/// Smallest even integer `>= min` whose only prime factors are 2, 3 and 5.
pub(crate) fn fft_friendly_size(min: usize) -> usize {
    let mut m = min.max(2);
    loop {
        if m % 2 == 0 {
            let mut r = m;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            if r == 1 {
                return m;
            }
        }
        m += 1;
    }
}
