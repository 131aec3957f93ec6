//! Power series `F(z) = Σ_{n>=1} a_n zⁿ`, the majorant `F_M` and the
//! packaged estimate function `F̃`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gevrey::cwien;

/// Coefficients `a_1, …, a_{n_max}` of a real analytic nonlinearity.
///
/// Without a declared radius the coefficients are taken as an exact
/// polynomial (`R_M = ∞`, no truncation tail). With one, they are the head
/// of an infinite series whose majorant converges for `s < radius`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSeries {
    coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
}

/// A partial sum with an upper bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl SeriesValue {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

impl AnalyticSeries {
    /// Exact polynomial `Σ a_n zⁿ`, `coeffs[0] = a_1`.
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Self::check(&coeffs)?;
        Ok(Self { coeffs, radius: None })
    }

    /// Head of an infinite series with convergence radius `radius`.
    pub fn truncated(coeffs: Vec<f64>, radius: f64) -> Result<Self> {
        Self::check(&coeffs)?;
        if !(radius > 0.0) {
            return Err(Error::ConvergenceRadius(format!("R_M = {radius} must be positive")));
        }
        Ok(Self { coeffs, radius: Some(radius) })
    }

    /// Head of an infinite series, radius estimated by the root test
    /// `min_n |a_n|^{-1/n}` over the upper half of the nonzero terms.
    pub fn truncated_estimated(coeffs: Vec<f64>) -> Result<Self> {
        Self::check(&coeffs)?;
        let nz: Vec<(usize, f64)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, a)| (i + 1, a.abs()))
            .collect();
        let tail = &nz[nz.len() / 2..];
        let radius = tail.iter().map(|&(n, a)| a.powf(-1.0 / n as f64)).fold(f64::INFINITY, f64::min);
        Self::truncated(coeffs, radius)
    }

    /// Parses a comma list `a1,a2,...` (a polynomial) or a named series:
    /// `square`, `cube`, `geometric:<n_max>`, `sin:<n_max>`, `exp_minus_one:<n_max>`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let named = |name: &str| t.strip_prefix(name).map(|rest| rest.trim_start_matches(':'));
        let order = |s: &str| {
            s.parse::<usize>()
                .map_err(|e| Error::Parameter(format!("series '{t}': {e}")))
                .and_then(|n| if n == 0 { Err(Error::Parameter("series order 0".into())) } else { Ok(n) })
        };
        if t == "square" {
            return Self::polynomial(vec![0.0, 1.0]);
        }
        if t == "cube" {
            return Self::polynomial(vec![0.0, 0.0, 1.0]);
        }
        if let Some(n) = named("geometric") {
            return Self::truncated(vec![1.0; order(n)?], 1.0);
        }
        if let Some(n) = named("sin") {
            let n = order(n)?;
            let mut c = vec![0.0; n];
            let mut fact = 1.0;
            for (i, slot) in c.iter_mut().enumerate() {
                let m = i + 1;
                fact *= m as f64;
                if m % 2 == 1 {
                    *slot = if (m / 2) % 2 == 0 { 1.0 / fact } else { -1.0 / fact };
                }
            }
            return Self::polynomial(c);
        }
        if let Some(n) = named("exp_minus_one") {
            let n = order(n)?;
            let mut fact = 1.0;
            let c = (1..=n)
                .map(|m| {
                    fact *= m as f64;
                    1.0 / fact
                })
                .collect();
            return Self::polynomial(c);
        }
        let coeffs = t
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parameter(format!("series '{t}': {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::polynomial(coeffs)
    }

    fn check(coeffs: &[f64]) -> Result<()> {
        if coeffs.is_empty() {
            return Err(Error::Parameter("series needs at least a_1".into()));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::Parameter("series coefficients must be finite".into()));
        }
        if coeffs.iter().all(|a| *a == 0.0) {
            return Err(Error::Parameter("series is identically zero".into()));
        }
        Ok(())
    }

    /// `a_1, …, a_{n_max}`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    /// Highest index with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|a| *a != 0.0).map_or(0, |i| i + 1)
    }

    pub fn is_polynomial(&self) -> bool {
        self.radius.is_none()
    }

    /// `R_M`; infinite for polynomials.
    pub fn radius(&self) -> f64 {
        self.radius.unwrap_or(f64::INFINITY)
    }

    /// Sums `Σ_n c_n` where `c_n = term(n, |a_n|)`, bounding the tail of a
    /// truncated series geometrically by the largest ratio of consecutive
    /// nonzero terms in the upper half.
    fn sum_terms(&self, what: &str, s: f64, term: impl Fn(usize, f64) -> f64) -> Result<SeriesValue> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("{what} needs s >= 0, got {s}")));
        }
        let terms: Vec<f64> = self.coeffs.iter().enumerate().map(|(i, a)| term(i + 1, a.abs())).collect();
        let value: f64 = terms.iter().sum();
        if !value.is_finite() {
            return Err(Error::ConvergenceRadius(format!("{what}({s}) is not finite")));
        }
        if self.radius.is_none() {
            return Ok(SeriesValue { value, tail_bound: 0.0 });
        }
        let nz: Vec<f64> = terms.iter().copied().filter(|t| *t > 0.0).collect();
        if nz.len() < 2 || s == 0.0 {
            return Ok(SeriesValue { value, tail_bound: 0.0 });
        }
        let q = nz[nz.len() / 2..].windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        if q >= 1.0 {
            return Err(Error::ConvergenceRadius(format!(
                "{what}({s}) diverges: term ratio {q:.4} >= 1 at n_max = {} (R_M ~ {})",
                self.n_max(),
                self.radius()
            )));
        }
        let last = *nz.last().expect("two or more terms");
        Ok(SeriesValue { value, tail_bound: last * q / (1.0 - q) })
    }

    /// `F_M(s) = Σ |a_n| sⁿ`.
    pub fn majorant_eval(&self, s: f64) -> Result<SeriesValue> {
        self.sum_terms("F_M", s, |n, a| a * s.powi(n as i32))
    }

    /// `F̃(s) = Σ |a_n| n^{r+3/2} C_W^{n-1} s^{n-1}`.
    pub fn ftilde_eval(&self, r: f64, dim: usize, s: f64) -> Result<SeriesValue> {
        let cw = cwien(r, dim)?;
        self.sum_terms("F~", s, |n, a| {
            if a == 0.0 {
                0.0
            } else {
                a * (n as f64).powf(r + 1.5) * (cw * s).powi(n as i32 - 1)
            }
        })
    }
}
