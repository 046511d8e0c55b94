//! Globally adaptive Gauss–Kronrod (7/15) quadrature and weighted moments.
//!
//! Half-line integrals are split at x*: the finite part [0, x*] is mapped
//! linearly onto [0, 1] and the tail onto [1, 2) through x = x*/(2 − t).
//! Both pieces live in one interval pool so the error budget is shared.

use super::weight::{weight_catalog, MeasureWeight, WeightEvaluator};
use super::ModelParams;
use crate::{Error, Result};
use std::cell::RefCell;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_INTERVALS: usize = 5000;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

fn kronrod(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod_sum = WGK[7] * fc;
    let mut gauss_sum = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        kronrod_sum += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss_sum += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod_sum;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        asc += WGK[j] * ((f(center - dx) - mean).abs() + (f(center + dx) - mean).abs());
    }
    let value = kronrod_sum * half;
    let resasc = asc * half.abs();
    let resabs = abs_sum * half.abs();
    let mut error = ((kronrod_sum - gauss_sum) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(roundoff);
    }
    Panel { lo, hi, value, error, magnitude: resabs }
}

fn adaptive(f: &impl Fn(f64) -> f64, breaks: &[f64], rel_tol: f64, abs_tol: f64) -> Result<Quadrature> {
    if !(rel_tol > 0.0 || abs_tol > 0.0) {
        return Err(Error::Domain("quadrature needs a positive tolerance".into()));
    }
    let mut panels: Vec<Panel> = breaks.windows(2).map(|w| kronrod(f, w[0], w[1])).collect();
    let mut evaluations = 15 * panels.len();
    loop {
        // summation order is the panel order, independent of refinement history
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let magnitude: f64 = panels.iter().map(|p| p.magnitude).sum();
        if !value.is_finite() {
            return Err(Error::Overflow("integrand produced a non-finite value".into()));
        }
        // the roundoff floor keeps tolerances near machine precision reachable
        if error <= abs_tol.max(rel_tol * value.abs()).max(100.0 * f64::EPSILON * magnitude) {
            return Ok(Quadrature { value, error_estimate: error, evaluations });
        }
        if panels.len() >= MAX_INTERVALS {
            return Err(Error::NonConvergence { what: "adaptive quadrature".into(), iterations: panels.len() });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let Panel { lo, hi, .. } = panels[worst];
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature (panel underflow)".into(),
                iterations: panels.len(),
            });
        }
        panels[worst] = kronrod(f, lo, mid);
        panels.insert(worst + 1, kronrod(f, mid, hi));
        evaluations += 30;
    }
}

/// ∫ₐᵇ f(x) dx to relative tolerance `rel_tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<Quadrature> {
    adaptive(&f, &[a, b], rel_tol, 0.0)
}

/// ∫₀^∞ f(x) dx with the finite/tail split at `split`.
pub fn integrate_half_line(f: impl Fn(f64) -> f64, split: f64, rel_tol: f64) -> Result<Quadrature> {
    if !(split > 0.0) {
        return Err(Error::Domain(format!("split point must be positive, got {split}")));
    }
    let mapped = |t: f64| {
        if t <= 1.0 {
            split * f(split * t)
        } else {
            let u = 2.0 - t;
            let x = split / u;
            let jac = split / (u * u);
            let v = f(x);
            // a decaying integrand times a blowing-up Jacobian
            if v == 0.0 {
                0.0
            } else {
                v * jac
            }
        }
    };
    adaptive(&mapped, &[0.0, 0.5, 1.0, 1.5, 2.0], rel_tol, 0.0)
}

/// ∫₀^∞ xⁿ G(x) dx using the closed-form weight when the catalog has one
/// and the Mellin–Barnes values otherwise.
pub fn weighted_moment(weight: &MeasureWeight, n: usize, quad_tol: f64) -> Result<f64> {
    match weight_catalog(&weight.params) {
        Some(closed) => weighted_moment_with(&closed, &weight.params, n, quad_tol),
        None => weighted_moment_with(weight, &weight.params, n, quad_tol),
    }
}

/// ∫₀^∞ xⁿ G(x) dx for an explicit evaluator.
pub fn weighted_moment_with(
    evaluator: &dyn WeightEvaluator,
    params: &ModelParams,
    n: usize,
    quad_tol: f64,
) -> Result<f64> {
    let split = n as f64 + params.max_lower() + 10.0;
    let failure = RefCell::new(None);
    let integrand = |x: f64| match evaluator.value(x) {
        Ok(w) => w * x.powi(n as i32),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let result = integrate_half_line(integrand, split, quad_tol)?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(result.value),
    }
}
