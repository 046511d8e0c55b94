//! The generalized hypergeometric series ₚFq(x) = Σ xⁿ / ₚρq(n).
//!
//! Terms are produced by the running ratio
//! `t(n+1)/t(n) = x·∏(a_i+n) / (∏(b_j+n)·(n+1))`, never by per-term gamma
//! calls, so the series can run well past n ≈ 170 without overflow.

use super::ModelParams;
use crate::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Mul};

/// Scalar types the series can be summed over.
pub trait SeriesScalar: Copy + Add<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self> {
    fn one() -> Self;
    fn zero() -> Self;
    fn modulus(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl SeriesScalar for f64 {
    fn one() -> Self {
        1.0
    }
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl SeriesScalar for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

/// Convergence class of ₚFq as a function of p and q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesRegime {
    /// p ≤ q: entire in x.
    Entire,
    /// p = q + 1: converges for |x| < 1.
    UnitDisk,
    /// p > q + 1: diverges for every x ≠ 0.
    Divergent,
}

pub fn series_regime(params: &ModelParams) -> SeriesRegime {
    let (p, q) = (params.p(), params.q());
    if p <= q {
        SeriesRegime::Entire
    } else if p == q + 1 {
        SeriesRegime::UnitDisk
    } else {
        SeriesRegime::Divergent
    }
}

/// Coefficient multiplying `x` in t(n+1)/t(n).
fn ratio_coefficient(params: &ModelParams, n: usize) -> f64 {
    let nf = n as f64;
    let num: f64 = params.upper().iter().map(|a| a + nf).product();
    let den: f64 = params.lower().iter().map(|b| b + nf).product();
    num / (den * (nf + 1.0))
}

/// t(n+1)/t(n) for the series at `x`.
pub fn term_ratio<T: SeriesScalar>(params: &ModelParams, x: T, n: usize) -> T {
    x * ratio_coefficient(params, n)
}

/// ₚFq(x) summed until the last added term drops below `tol·|sum|` while the
/// term ratio is contracting.
pub fn pfq<T: SeriesScalar>(params: &ModelParams, x: T, tol: f64, max_terms: usize) -> Result<T> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("series tolerance must be positive, got {tol}")));
    }
    let size = x.modulus();
    if size == 0.0 {
        return Ok(T::one());
    }
    match series_regime(params) {
        SeriesRegime::Entire => {}
        SeriesRegime::UnitDisk if size < 1.0 => {}
        SeriesRegime::UnitDisk => return Err(Error::Divergence(format!("p = q+1 requires |x| < 1, got |x| = {size}"))),
        SeriesRegime::Divergent => {
            return Err(Error::Divergence(format!(
                "p = {} > q+1 = {} has zero radius of convergence",
                params.p(),
                params.q() + 1
            )))
        }
    }

    let mut term = T::one();
    let mut sum = T::one();
    for n in 0..max_terms {
        term = term * term_ratio(params, x, n);
        sum = sum + term;
        if !sum.is_finite_value() {
            return Err(Error::Overflow(format!("pFq partial sum overflowed at n = {}", n + 1)));
        }
        let contracting = term_ratio(params, x, n + 1).modulus() < 1.0;
        if contracting && term.modulus() < tol * sum.modulus() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what: "pFq series".into(), iterations: max_terms })
}

/// Exact partial sum Σ_{n=0}^{n_max} xⁿ / ₚρq(n).
pub fn pfq_truncated<T: SeriesScalar>(params: &ModelParams, x: T, n_max: usize) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    for n in 0..n_max {
        term = term * term_ratio(params, x, n);
        sum = sum + term;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::pochhammer;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn direct_term(params: &ModelParams, x: f64, n: usize) -> f64 {
        let num: f64 = params.upper().iter().map(|&a| pochhammer(a, n).unwrap()).product();
        let den: f64 = params.lower().iter().map(|&b| pochhammer(b, n).unwrap()).product();
        let fact = pochhammer(1.0, n).unwrap();
        x.powi(n as i32) * num / (den * fact)
    }

    #[test]
    fn exponential_case() {
        let e = pfq(&ModelParams::canonical(), 1.0, 1e-16, 200).unwrap();
        assert_relative_eq!(e, std::f64::consts::E, max_relative = 1e-15);
    }

    #[test]
    fn zero_argument() {
        let p = ModelParams::new(vec![1.0, 2.0], vec![3.0]).unwrap();
        assert_eq!(pfq(&p, 0.0, 1e-12, 10).unwrap(), 1.0);
        // even a divergent parameter class is fine at the origin
        let div = ModelParams::new(vec![1.0, 2.0, 3.0], vec![]).unwrap();
        assert_eq!(pfq(&div, 0.0, 1e-12, 10).unwrap(), 1.0);
    }

    #[test]
    fn two_level_truncation() {
        let p = ModelParams::half_oscillator();
        assert_relative_eq!(pfq_truncated(&p, 2.0, 1), 7.0 / 3.0, max_relative = 1e-15);
        assert_eq!(pfq_truncated(&p, 5.0, 0), 1.0);
        assert_relative_eq!(pfq_truncated(&ModelParams::canonical(), 1.0, 3), 8.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn convergence_policy() {
        let unit = ModelParams::new(vec![1.0, 1.0], vec![2.0]).unwrap();
        // ₂F₁(1,1;2;x) = −ln(1−x)/x
        let v: f64 = pfq(&unit, 0.5, 1e-15, 10_000).unwrap();
        assert_relative_eq!(v, -(1.0f64 - 0.5).ln() / 0.5, max_relative = 1e-12);
        assert!(matches!(pfq(&unit, 1.0, 1e-12, 100), Err(Error::Divergence(_))));
        let div = ModelParams::new(vec![1.0, 1.0], vec![]).unwrap();
        assert!(matches!(pfq(&div, 0.1, 1e-12, 100), Err(Error::Divergence(_))));
    }

    #[test]
    fn non_convergence_and_overflow() {
        let p = ModelParams::canonical();
        assert!(matches!(pfq(&p, 50.0, 1e-15, 5), Err(Error::NonConvergence { .. })));
        assert!(matches!(pfq(&p, 1000.0, 1e-15, 10_000), Err(Error::Overflow(_))));
    }

    #[test]
    fn complex_argument() {
        let z = Complex64::new(0.3, 1.2);
        let v = pfq(&ModelParams::canonical(), z, 1e-16, 200).unwrap();
        let e = z.exp();
        assert_relative_eq!(v.re, e.re, max_relative = 1e-14);
        assert_relative_eq!(v.im, e.im, max_relative = 1e-14);
    }

    #[test]
    fn term_ratio_matches_pochhammer_terms() {
        let p = ModelParams::new(vec![0.7, 2.5], vec![1.5, 3.25, 0.4]).unwrap();
        let x = 1.7;
        for n in 0..25 {
            let expected = direct_term(&p, x, n + 1) / direct_term(&p, x, n);
            assert_relative_eq!(term_ratio(&p, x, n), expected, max_relative = 1e-13);
        }
    }

    proptest! {
        #[test]
        fn pfq_at_least_one_for_nonnegative_x(
            a in proptest::collection::vec(0.1f64..5.0, 0..3),
            extra in proptest::collection::vec(0.1f64..5.0, 0..2),
            x in 0.0f64..20.0,
        ) {
            let mut b = a.iter().map(|v| v + 0.3).collect::<Vec<_>>();
            b.extend(extra);
            let p = ModelParams::new(a, b).unwrap();
            let v = pfq(&p, x, 1e-14, 100_000).unwrap();
            prop_assert!(v >= 1.0);
        }

        #[test]
        fn truncations_increase_to_the_full_sum(x in 0.0f64..6.0, b in 0.2f64..4.0) {
            let p = ModelParams::new(vec![1.0], vec![b]).unwrap();
            let full = pfq(&p, x, 1e-15, 100_000).unwrap();
            let mut prev = 0.0;
            for n_max in 0..80 {
                let t = pfq_truncated(&p, x, n_max);
                prop_assert!(t >= prev);
                prop_assert!(t <= full * (1.0 + 1e-12));
                prev = t;
            }
            prop_assert!((prev - full).abs() <= 1e-10 * full);
        }
    }
}
