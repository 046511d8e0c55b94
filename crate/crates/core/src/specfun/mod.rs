//! Scalar special-function kernels.
//!
//! Everything here is a pure function of its inputs. [`ModelParams`] carries
//! the upper/lower parameter sets `a = {a_i}`, `b = {b_j}` that fix both the
//! ₚFq series and the deformed oscillator algebra built on top of it.

mod gamma;
mod quadrature;
mod series;
mod weight;

pub use gamma::{gamma, ln_gamma, ln_gamma_complex};
pub use quadrature::{integrate, integrate_half_line, weighted_moment, weighted_moment_with, Quadrature};
pub use series::{pfq, pfq_truncated, series_regime, term_ratio, SeriesRegime, SeriesScalar};
pub use weight::{
    scaled_bessel_k, weight_catalog, weight_strategy, ClosedFormWeight, MeasureWeight, WeightEvaluator,
    WEIGHT_STRATEGIES,
};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Upper (`a`) and lower (`b`) parameter sets. All entries are finite and
/// strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    upper: Vec<f64>,
    lower: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.a, raw.b)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams { a: p.upper, b: p.lower }
    }
}

impl ModelParams {
    pub fn new(upper: Vec<f64>, lower: Vec<f64>) -> Result<Self> {
        for (name, set) in [("a", &upper), ("b", &lower)] {
            if let Some(bad) = set.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::InvalidParams(format!("{name} entries must be finite and positive, got {bad}")));
            }
        }
        Ok(Self { upper, lower })
    }

    /// p = q = 0: the undeformed oscillator, ₀F₀(x) = eˣ.
    pub fn canonical() -> Self {
        Self { upper: Vec::new(), lower: Vec::new() }
    }

    /// a = {1}, b = {3/2}: the algebra whose structure function gives
    /// e(n) = n + 1/2, i.e. the two-level harmonic oscillator case.
    pub fn half_oscillator() -> Self {
        Self { upper: vec![1.0], lower: vec![1.5] }
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    pub fn max_lower(&self) -> f64 {
        self.lower.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_lower(&self) -> Option<f64> {
        self.lower.iter().copied().reduce(f64::min)
    }
}

/// Rising factorial (c)ₙ = c(c+1)…(c+n−1).
pub fn pochhammer(c: f64, n: usize) -> Result<f64> {
    let mut acc = 1.0;
    for k in 0..n {
        let factor = c + k as f64;
        if factor == 0.0 {
            return Err(Error::Domain(format!("({c})_{n} hits a zero factor at k = {k}")));
        }
        acc *= factor;
    }
    Ok(acc)
}

/// Γ(a/b) = ∏Γ(a_i) / ∏Γ(b_j).
pub fn gamma_ratio(params: &ModelParams) -> Result<f64> {
    let num: f64 = params.upper.iter().map(|&a| gamma(a)).product();
    let den: f64 = params.lower.iter().map(|&b| gamma(b)).product();
    let direct = num / den;
    if direct.is_finite() && direct > 0.0 {
        return Ok(direct);
    }
    // individual factors overflowed; the ratio may still be representable
    let ln: f64 =
        params.upper.iter().map(|&a| ln_gamma(a)).sum::<f64>() - params.lower.iter().map(|&b| ln_gamma(b)).sum::<f64>();
    let value = ln.exp();
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("gamma ratio exp({ln}) is not representable")))
    }
}
