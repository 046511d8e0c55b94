//! The radial measure weight G^{q+1,0}_{p,q+1}(x | {a_i−1}; 0, {b_j−1}).
//!
//! It is the positive function on (0, ∞) whose Mellin transform is
//!
//! ```text
//! M(s) = Γ(s) ∏ Γ(b_j − 1 + s) / ∏ Γ(a_i − 1 + s)
//! ```
//!
//! so that ∫ xⁿ G(x) dx = M(n+1) = ₚρq(n) / Γ(a/b). Two evaluators are
//! available behind [`WeightEvaluator`]: the numerical inverse-Mellin
//! integral along a vertical line ([`MeasureWeight`]) and the closed forms
//! for the few parameter sets where one is known ([`ClosedFormWeight`]).

use super::gamma::ln_gamma_complex;
use super::ModelParams;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};
use std::fmt;

/// A way of evaluating the measure weight at a point.
pub trait WeightEvaluator: Send + Sync + fmt::Debug {
    /// Registry name of the evaluation strategy.
    fn name(&self) -> &'static str;

    fn value(&self, x: f64) -> Result<f64>;

    /// ln G(x). Strategies with an analytic log form override this so that
    /// ratios G(λx)/G(x) survive underflow of the individual values.
    fn ln_value(&self, x: f64) -> Result<f64> {
        let v = self.value(x)?;
        if v > 0.0 {
            Ok(v.ln())
        } else {
            Err(Error::Overflow(format!("weight {v:e} at x = {x} has no logarithm")))
        }
    }
}

/// Names accepted by [`weight_strategy`].
pub const WEIGHT_STRATEGIES: &[&str] = &["auto", "catalog", "mellin-barnes"];

/// Look up a weight evaluator by name.
///
/// `auto` picks the closed form when the catalog has one and falls back to
/// the contour integral otherwise.
pub fn weight_strategy(name: &str, params: &ModelParams) -> Result<Box<dyn WeightEvaluator>> {
    match name {
        "catalog" => weight_catalog(params)
            .map(|w| Box::new(w) as Box<dyn WeightEvaluator>)
            .ok_or_else(|| Error::InvalidParams("no closed-form weight for these parameters".into())),
        "mellin-barnes" => Ok(Box::new(MeasureWeight::new(params.clone())?)),
        "auto" => match weight_catalog(params) {
            Some(w) => Ok(Box::new(w)),
            None => Ok(Box::new(MeasureWeight::new(params.clone())?)),
        },
        other => Err(Error::Unknown { kind: "weight strategy", name: other.to_string() }),
    }
}

/// Closed forms of the weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormWeight {
    /// p = q = 0: e^{−x}.
    Exponential,
    /// p = q = 1 with a = {1}: x^{b−1} e^{−x}.
    PowerExponential { power: f64 },
    /// p = 0, q = 1: 2·x^{ν/2}·K_ν(2√x) with ν = b − 1.
    BesselK { order: f64 },
}

/// The closed form for `params`, if the catalog has one.
pub fn weight_catalog(params: &ModelParams) -> Option<ClosedFormWeight> {
    match (params.upper(), params.lower()) {
        ([], []) => Some(ClosedFormWeight::Exponential),
        ([a], [b]) if *a == 1.0 => Some(ClosedFormWeight::PowerExponential { power: b - 1.0 }),
        ([], [b]) => Some(ClosedFormWeight::BesselK { order: b - 1.0 }),
        _ => None,
    }
}

impl WeightEvaluator for ClosedFormWeight {
    fn name(&self) -> &'static str {
        "catalog"
    }

    fn value(&self, x: f64) -> Result<f64> {
        check_argument(x, true)?;
        if x == 0.0 {
            return Ok(match *self {
                ClosedFormWeight::Exponential => 1.0,
                ClosedFormWeight::PowerExponential { power } if power > 0.0 => 0.0,
                ClosedFormWeight::PowerExponential { power: 0.0 } => 1.0,
                ClosedFormWeight::BesselK { order } if order > 0.0 => super::gamma(order),
                _ => f64::INFINITY,
            });
        }
        Ok(self.ln_value(x)?.exp())
    }

    fn ln_value(&self, x: f64) -> Result<f64> {
        check_argument(x, false)?;
        Ok(match *self {
            ClosedFormWeight::Exponential => -x,
            ClosedFormWeight::PowerExponential { power } => power * x.ln() - x,
            ClosedFormWeight::BesselK { order } => {
                let y = 2.0 * x.sqrt();
                LN_2 + 0.5 * order * x.ln() - y + scaled_bessel_k(order, y)?.ln()
            }
        })
    }
}

fn check_argument(x: f64, allow_zero: bool) -> Result<()> {
    if x > 0.0 && x.is_finite() || (allow_zero && x == 0.0) {
        Ok(())
    } else {
        Err(Error::Domain(format!("weight argument must be positive, got {x}")))
    }
}

/// e^{y}·K_ν(y) for y > 0 from K_ν(y) = ∫₀^∞ e^{−y cosh t} cosh(νt) dt.
///
/// The integrand is analytic in a strip around the real axis and decays
/// doubly exponentially, so the trapezoid rule converges geometrically in the
/// step; steps are halved until two successive sums agree to 1e-15.
pub fn scaled_bessel_k(order: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("K_ν needs a positive argument, got {y}")));
    }
    let nu = order.abs();
    // e^{-y (cosh t - 1)} cosh(νt), with cosh t − 1 = 2 sinh²(t/2)
    let f = |t: f64| {
        let s = (0.5 * t).sinh();
        (-2.0 * y * s * s).exp() * (nu * t).cosh()
    };
    // log of the integrand, ignoring the e^{-νt} half of cosh
    let log_f = |t: f64| nu * t - 2.0 * y * (0.5 * t).sinh().powi(2);
    // peak where sinh t = ν/y
    let t_peak = (nu / y).asinh();
    let peak_log = log_f(t_peak).max(0.0);
    let mut upper = (2.0 * t_peak).max(1.0);
    while log_f(upper) > peak_log - 45.0 {
        upper *= 1.5;
        if upper > 1e4 {
            return Err(Error::NonConvergence { what: "Bessel K range".into(), iterations: 0 });
        }
    }

    let mut h = 0.25;
    let mut sum = trapezoid(&f, h, upper);
    for _ in 0..12 {
        h *= 0.5;
        let refined = trapezoid(&f, h, upper);
        if (refined - sum).abs() <= 1e-15 * refined.abs() {
            return Ok(refined);
        }
        sum = refined;
    }
    Err(Error::NonConvergence { what: "Bessel K trapezoid".into(), iterations: 12 })
}

fn trapezoid(f: &impl Fn(f64) -> f64, h: f64, upper: f64) -> f64 {
    let n = (upper / h).ceil() as usize;
    let interior: f64 = (1..=n).map(|k| f(k as f64 * h)).sum();
    h * (0.5 * f(0.0) + interior)
}

/// Numerical inverse Mellin transform along the line Re s = c.
///
/// ```text
/// G(x) = (1/2π) ∫ M(c+it) x^{−(c+it)} dt = (1/π) ∫₀^∞ Re[M(c+it) x^{−(c+it)}] dt
/// ```
///
/// The half-width grows by doubling until |M(c±iT)|·x^{−c} is below 1e-16 of
/// the running integral, then the step is halved until two refinements agree
/// to 1e-8. For large x the integral cancels down to a tiny value; anything
/// under 1e-13 of ∫|integrand| is returned as exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureWeight {
    pub params: ModelParams,
    pub contour_abscissa: f64,
    pub contour_halfwidth: f64,
    pub step: f64,
}

const TAIL_TOL: f64 = 1e-16;
const REFINE_TOL: f64 = 1e-8;
const MAX_HALFWIDTH: f64 = 4096.0;
const MAX_HALVINGS: usize = 10;
/// Values smaller than this fraction of ∫|integrand| are indistinguishable
/// from cancellation error and are reported as zero.
const NOISE_FLOOR: f64 = 1e-13;

impl MeasureWeight {
    pub fn new(params: ModelParams) -> Result<Self> {
        let c = Self::pole_bound(&params) + 0.5;
        Self::with_contour(params, c, 8.0, 0.05)
    }

    pub fn with_contour(params: ModelParams, abscissa: f64, halfwidth: f64, step: f64) -> Result<Self> {
        if params.q() < params.p() {
            return Err(Error::InvalidParams(format!(
                "contour integral needs q+1 > p, got p = {}, q = {}",
                params.p(),
                params.q()
            )));
        }
        let bound = Self::pole_bound(&params);
        if !(abscissa > bound) {
            return Err(Error::InvalidParams(format!(
                "contour abscissa {abscissa} must lie right of every pole (> {bound})"
            )));
        }
        if !(halfwidth > 0.0 && step > 0.0) {
            return Err(Error::InvalidParams("contour half-width and step must be positive".into()));
        }
        Ok(Self { params, contour_abscissa: abscissa, contour_halfwidth: halfwidth, step })
    }

    /// Rightmost pole of Γ(s)∏Γ(b_j−1+s) is at max(0, 1 − min b_j).
    fn pole_bound(params: &ModelParams) -> f64 {
        params.min_lower().map_or(0.0, |b| (1.0 - b).max(0.0))
    }

    /// ln M(s).
    pub fn ln_mellin(&self, s: Complex64) -> Complex64 {
        let mut acc = ln_gamma_complex(s);
        for b in self.params.lower() {
            acc += ln_gamma_complex(s + (b - 1.0));
        }
        for a in self.params.upper() {
            acc -= ln_gamma_complex(s + (a - 1.0));
        }
        acc
    }

    /// M(s) = Γ(s) ∏Γ(b_j−1+s) / ∏Γ(a_i−1+s).
    pub fn mellin(&self, s: Complex64) -> Complex64 {
        let l = self.ln_mellin(s);
        if l.re.is_nan() || l.re == f64::NEG_INFINITY {
            // a denominator pole: 1/Γ vanishes there
            return Complex64::new(0.0, 0.0);
        }
        l.exp()
    }
}

impl WeightEvaluator for MeasureWeight {
    fn name(&self) -> &'static str {
        "mellin-barnes"
    }

    fn value(&self, x: f64) -> Result<f64> {
        check_argument(x, false)?;
        let c = self.contour_abscissa;
        let ln_x = x.ln();
        let integrand = |t: f64| {
            let s = Complex64::new(c, t);
            let l = self.ln_mellin(s) - s * ln_x;
            if l.re.is_nan() || l.re == f64::NEG_INFINITY {
                0.0
            } else {
                l.exp().re
            }
        };
        let envelope = |t: f64| {
            let l = self.ln_mellin(Complex64::new(c, t)).re - c * ln_x;
            if l.is_nan() {
                0.0
            } else {
                l.exp()
            }
        };

        let mut h = self.step;
        let mut count = (self.contour_halfwidth / h).ceil() as usize;
        let mut sum = 0.5 * integrand(0.0);
        let mut abs_sum = sum.abs();
        for k in 1..=count {
            let v = integrand(k as f64 * h);
            sum += v;
            abs_sum += v.abs();
        }
        let mut doublings = 0;
        while envelope(count as f64 * h) > TAIL_TOL * (h * sum).abs().max(f64::MIN_POSITIVE) {
            if count as f64 * h >= MAX_HALFWIDTH {
                return Err(Error::NonConvergence { what: "Mellin-Barnes contour tail".into(), iterations: doublings });
            }
            for k in count + 1..=2 * count {
                let v = integrand(k as f64 * h);
                sum += v;
                abs_sum += v.abs();
            }
            count *= 2;
            doublings += 1;
        }

        let mut estimate = h * sum;
        let mut scale = h * abs_sum;
        for _ in 0..MAX_HALVINGS {
            // new nodes are the odd multiples of h/2
            let (mid, mid_abs) =
                (0..count).map(|k| integrand((k as f64 + 0.5) * h)).fold((0.0, 0.0), |(s, a), v| (s + v, a + v.abs()));
            h *= 0.5;
            count *= 2;
            let refined = 0.5 * estimate + h * mid;
            scale = 0.5 * scale + h * mid_abs;
            let diff = (refined - estimate).abs();
            estimate = refined;
            if diff <= REFINE_TOL * refined.abs() || diff <= NOISE_FLOOR * scale {
                // below the cancellation floor the sign and size are noise
                if estimate.abs() <= NOISE_FLOOR * scale {
                    return Ok(0.0);
                }
                return Ok(estimate / PI);
            }
        }
        Err(Error::NonConvergence { what: "Mellin-Barnes step refinement".into(), iterations: MAX_HALVINGS })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{gamma, ln_gamma};
    use approx::assert_relative_eq;

    /// Independent reference for K_ν: the large-argument asymptotic series,
    /// √(π/2y) e^{−y} Σ_k a_k(ν)/y^k, summed to its smallest term.
    fn bessel_k_asymptotic(nu: f64, y: f64) -> f64 {
        let mu = 4.0 * nu * nu;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            let kf = k as f64;
            let next = term * (mu - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * y);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
        }
        (PI / (2.0 * y)).sqrt() * sum
    }

    #[test]
    fn bessel_half_order_is_elementary() {
        // K_{1/2}(y) = √(π/2y) e^{−y}
        for &y in &[0.01, 0.3, 1.0, 7.0, 40.0] {
            assert_relative_eq!(scaled_bessel_k(0.5, y).unwrap(), (PI / (2.0 * y)).sqrt(), max_relative = 1e-13);
        }
    }

    #[test]
    fn bessel_matches_asymptotics_at_large_argument() {
        for &nu in &[0.0, 1.0, 2.5] {
            assert_relative_eq!(
                scaled_bessel_k(nu, 40.0).unwrap(),
                bessel_k_asymptotic(nu, 40.0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn bessel_small_argument_limit() {
        // K_ν(y) → Γ(ν)/2 · (2/y)^ν as y → 0 for ν > 0
        let (nu, y): (f64, f64) = (1.0, 1e-6);
        let expected = 0.5 * gamma(nu) * (2.0 / y).powf(nu);
        assert_relative_eq!(scaled_bessel_k(nu, y).unwrap(), expected, max_relative = 1e-5);
    }

    #[test]
    fn catalog_membership() {
        assert_eq!(weight_catalog(&ModelParams::canonical()), Some(ClosedFormWeight::Exponential));
        assert_eq!(
            weight_catalog(&ModelParams::half_oscillator()),
            Some(ClosedFormWeight::PowerExponential { power: 0.5 })
        );
        let bessel = ModelParams::new(vec![], vec![2.0]).unwrap();
        assert_eq!(weight_catalog(&bessel), Some(ClosedFormWeight::BesselK { order: 1.0 }));
        let other = ModelParams::new(vec![1.0, 2.0], vec![3.0, 4.0, 5.0]).unwrap();
        assert_eq!(weight_catalog(&other), None);
    }

    #[test]
    fn catalog_values() {
        let x = 2.0f64;
        assert_relative_eq!(ClosedFormWeight::Exponential.value(x).unwrap(), (-x).exp(), max_relative = 1e-15);
        let pe = ClosedFormWeight::PowerExponential { power: 0.5 };
        assert_relative_eq!(pe.value(x).unwrap(), x.sqrt() * (-x).exp(), max_relative = 1e-15);
        assert_eq!(pe.value(0.0).unwrap(), 0.0);
        assert_relative_eq!(ClosedFormWeight::BesselK { order: 1.0 }.value(0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert!(ClosedFormWeight::Exponential.value(-1.0).is_err());
        // the log form stays finite where the value underflows
        let far = pe.ln_value(2000.0).unwrap();
        assert_relative_eq!(far, 0.5 * 2000f64.ln() - 2000.0, max_relative = 1e-15);
    }

    #[test]
    fn mellin_transform_gives_moments() {
        let w = MeasureWeight::new(ModelParams::half_oscillator()).unwrap();
        for n in 0..6 {
            let m = w.mellin(Complex64::new(n as f64 + 1.0, 0.0));
            assert_relative_eq!(m.re, ln_gamma(n as f64 + 1.5).exp(), max_relative = 1e-13);
            assert!(m.im.abs() < 1e-12 * m.re);
        }
    }

    #[test]
    fn contour_validation() {
        let p = ModelParams::new(vec![], vec![0.25]).unwrap();
        let w = MeasureWeight::new(p.clone()).unwrap();
        assert_relative_eq!(w.contour_abscissa, 1.25);
        assert!(MeasureWeight::with_contour(p, 0.7, 8.0, 0.05).is_err());
        let too_many = ModelParams::new(vec![1.0, 2.0], vec![3.0]).unwrap();
        assert!(matches!(MeasureWeight::new(too_many), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn mellin_barnes_exponential() {
        let w = MeasureWeight::new(ModelParams::canonical()).unwrap();
        for &x in &[0.1f64, 1.0, 5.0] {
            assert_relative_eq!(w.value(x).unwrap(), (-x).exp(), max_relative = 1e-9);
        }
        assert!(w.value(0.0).is_err());
    }

    #[test]
    fn mellin_barnes_non_catalog() {
        // Γ(s)Γ(2+s)/Γ(1+s) = (1+s)Γ(s) = Γ(s) + Γ(s+1) ⇒ G(x) = (1 + x) e^{−x}
        let w = MeasureWeight::new(ModelParams::new(vec![2.0], vec![3.0]).unwrap()).unwrap();
        for &x in &[0.2f64, 1.5, 4.0] {
            assert_relative_eq!(w.value(x).unwrap(), (1.0 + x) * (-x).exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn registry_lookup() {
        let p = ModelParams::half_oscillator();
        for name in WEIGHT_STRATEGIES {
            assert!(weight_strategy(name, &p).is_ok());
        }
        assert_eq!(weight_strategy("auto", &p).unwrap().name(), "catalog");
        let other = ModelParams::new(vec![2.0], vec![3.0]).unwrap();
        assert_eq!(weight_strategy("auto", &other).unwrap().name(), "mellin-barnes");
        assert!(weight_strategy("catalog", &other).is_err());
        assert!(matches!(weight_strategy("simpson", &p), Err(Error::Unknown { .. })));
    }
}
