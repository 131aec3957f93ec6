//! Elementary wavenumber inequalities behind the nonlinear estimates,
//! checked exhaustively on small lattice shells and on random tuples.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::random::rng;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaSweep {
    /// Lattice vectors with `0 < |h| <= max_norm` are enumerated.
    pub max_norm: i64,
    pub dim: usize,
    pub exponents: Vec<f64>,
    pub random_tuples: usize,
    pub max_tuple_len: usize,
    pub seed: u64,
}

impl Default for LemmaSweep {
    fn default() -> Self {
        Self {
            max_norm: 16,
            dim: 2,
            exponents: vec![1.0, 1.5, 2.0, 2.5, 3.0, 4.0],
            random_tuples: 20_000,
            max_tuple_len: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub name: String,
    pub samples: u64,
    pub violations: u64,
    /// Largest `lhs/rhs` seen.
    pub worst_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub sweep: LemmaSweep,
    pub checks: Vec<LemmaCheck>,
    pub total_violations: u64,
}

/// Relative slack for floating-point round-off in `lhs <= rhs`.
const SLACK: f64 = 1e-12;

struct Tally {
    check: LemmaCheck,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self { check: LemmaCheck { name: name.into(), samples: 0, violations: 0, worst_ratio: 0.0 } }
    }

    fn record(&mut self, lhs: f64, rhs: f64) {
        self.check.samples += 1;
        if lhs > rhs * (1.0 + SLACK) {
            self.check.violations += 1;
        }
        if rhs > 0.0 {
            self.check.worst_ratio = self.check.worst_ratio.max(lhs / rhs);
        }
    }
}

fn lattice_shell(max_norm: i64, dim: usize) -> Vec<[i64; 3]> {
    let m2 = max_norm * max_norm;
    let zr = if dim == 3 { -max_norm..=max_norm } else { 0..=0 };
    let mut out = Vec::new();
    for a in -max_norm..=max_norm {
        for b in -max_norm..=max_norm {
            for c in zr.clone() {
                let n2 = a * a + b * b + c * c;
                if n2 > 0 && n2 <= m2 {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn mag(k: [i64; 3]) -> f64 {
    ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt()
}

/// `(x₁+…+xₙ)^r <= n^r (x₁^r+…+xₙ^r)` for positive reals.
pub fn elementary_power_holds(xs: &[f64], r: f64) -> bool {
    let n = xs.len() as f64;
    let lhs = xs.iter().sum::<f64>().powf(r);
    let rhs = n.powf(r) * xs.iter().map(|x| x.powf(r)).sum::<f64>();
    lhs <= rhs * (1.0 + SLACK)
}

/// Runs every check: for lattice pairs `h + j = k` (all nonzero)
/// - `|k|^r <= 2^{r-1}(|h|^r + |j|^r)` for each `r >= 1`,
/// - `|j| <= |h| + |k| <= 2|h||k|`,
/// - `|j|^{1/2} <= √2 |h|^{1/2}|k|^{1/2}`;
///
/// and for random tuples
/// - the elementary power inequality on positive reals,
/// - `|k|^r <= n^r Σ|h_i|^r` and `|k| <= Σ|h_i| <= n Π|h_i|` for lattice
///   tuples with `k = −Σ h_i ≠ 0`.
pub fn verify_wavenumber_lemmas(sweep: &LemmaSweep) -> LemmaReport {
    let shell = lattice_shell(sweep.max_norm, sweep.dim);
    let mags: Vec<f64> = shell.iter().map(|&k| mag(k)).collect();
    let mut split: Vec<Tally> =
        sweep.exponents.iter().map(|r| Tally::new(&format!("split_power_r{r}"))).collect();
    let mut tri = Tally::new("triangle_j_le_h_plus_k");
    let mut prod = Tally::new("sum_le_twice_product");
    let mut root = Tally::new("sqrt_chain");
    for (h, &mh) in shell.iter().zip(&mags) {
        for (j, &mj) in shell.iter().zip(&mags) {
            let k = [h[0] + j[0], h[1] + j[1], h[2] + j[2]];
            if k == [0, 0, 0] {
                continue;
            }
            let mk = mag(k);
            for (t, &r) in split.iter_mut().zip(&sweep.exponents) {
                t.record(mk.powf(r), 2f64.powf(r - 1.0) * (mh.powf(r) + mj.powf(r)));
            }
            tri.record(mj, mh + mk);
            prod.record(mh + mk, 2.0 * mh * mk);
            root.record(mj.sqrt(), 2f64.sqrt() * mh.sqrt() * mk.sqrt());
        }
    }

    let mut rng = rng(sweep.seed);
    let mut elem = Tally::new("elementary_power_reals");
    let mut multi_pow = Tally::new("tuple_split_power");
    let mut multi_prod = Tally::new("tuple_sum_le_n_product");
    for _ in 0..sweep.random_tuples {
        let n = rng.gen_range(1..=sweep.max_tuple_len.max(1));
        let r = rng.gen_range(0.05..6.0);
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(1e-3..10.0)).collect();
        let lhs = xs.iter().sum::<f64>().powf(r);
        elem.record(lhs, (n as f64).powf(r) * xs.iter().map(|x| x.powf(r)).sum::<f64>());

        let hs: Vec<[i64; 3]> = (0..n).map(|_| shell[rng.gen_range(0..shell.len())]).collect();
        let mut k = [0i64; 3];
        for h in &hs {
            for a in 0..3 {
                k[a] -= h[a];
            }
        }
        if k == [0, 0, 0] {
            continue;
        }
        let mk = mag(k);
        let hm: Vec<f64> = hs.iter().map(|&h| mag(h)).collect();
        let r = sweep.exponents[rng.gen_range(0..sweep.exponents.len())];
        multi_pow.record(mk.powf(r), (n as f64).powf(r) * hm.iter().map(|m| m.powf(r)).sum::<f64>());
        multi_prod.record(mk, hm.iter().sum());
        multi_prod.record(hm.iter().sum(), n as f64 * hm.iter().product::<f64>());
    }

    let checks: Vec<LemmaCheck> = split
        .into_iter()
        .chain([tri, prod, root, elem, multi_pow, multi_prod])
        .map(|t| t.check)
        .collect();
    let total_violations = checks.iter().map(|c| c.violations).sum();
    LemmaReport { sweep: sweep.clone(), checks, total_violations }
}
