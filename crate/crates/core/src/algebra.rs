//! Deformed ladder algebra on a truncated Fock space.
//!
//! The structure function ₚρq(n) = ∏_{s=1}^{n} ₚe_q(s) with
//! ₚe_q(n) = n·∏(b_j−1+n)/∏(a_i−1+n) fixes everything: the matrix elements
//! of A₋ and A₊, the coherent-state coefficients and the generalized
//! binomial coefficients.

use crate::specfun::{gamma_ratio, ln_gamma, ModelParams};
use crate::states::CoherentState;
use crate::{Complex64, Error, Result};
use nalgebra::{DMatrix, DVector};
use std::ops::{Add, Mul};
use std::sync::Arc;

/// ρ(n), e(n) and Γ(a/b) tabulated for n = 0..=n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTable {
    params: ModelParams,
    n_max: usize,
    rho: Vec<f64>,
    e: Vec<f64>,
    gamma_ratio: f64,
}

/// ₚe_q(n) straight from its definition.
///
/// At n = 0 the factor n cancels against every a_i = 1, so e(0) is taken as
/// the n → 0 limit of the rational function: 0 without such a cancellation
/// (e.g. e(n) = n), finite after one (e.g. n + 1/2), infinite after several.
/// ρ is built from e(1..) only and never sees this value.
fn structure_factor(params: &ModelParams, n: usize) -> f64 {
    if n == 0 {
        let ones = params.upper().iter().filter(|&&a| a == 1.0).count();
        let num: f64 = params.lower().iter().map(|b| b - 1.0).product();
        let den: f64 = params.upper().iter().filter(|&&a| a != 1.0).map(|a| a - 1.0).product();
        return match ones {
            0 => 0.0,
            1 => num / den,
            _ => f64::INFINITY,
        };
    }
    let nf = n as f64;
    let num: f64 = params.lower().iter().map(|b| b - 1.0 + nf).product();
    let den: f64 = params.upper().iter().map(|a| a - 1.0 + nf).product();
    nf * num / den
}

/// Beyond this relative deviation from the gamma closed form the table is
/// rejected outright; the tight 1e-12 agreement is asserted in tests.
const CLOSED_FORM_GUARD: f64 = 1e-8;

impl StructureTable {
    pub fn build(params: &ModelParams, n_max: usize) -> Result<Self> {
        let mut e = Vec::with_capacity(n_max + 1);
        let mut rho = Vec::with_capacity(n_max + 1);
        e.push(structure_factor(params, 0));
        rho.push(1.0);
        for n in 1..=n_max {
            let en = structure_factor(params, n);
            let r = rho[n - 1] * en;
            if !r.is_finite() {
                return Err(Error::Overflow(format!("rho({n}) exceeds the floating range; lower n_max")));
            }
            e.push(en);
            rho.push(r);
        }
        let table = Self { params: params.clone(), n_max, rho, e, gamma_ratio: gamma_ratio(params)? };
        let deviation = table.closed_form_deviation();
        if deviation > CLOSED_FORM_GUARD {
            return Err(Error::Consistency(format!(
                "rho recurrence deviates from the gamma closed form by {deviation:e}"
            )));
        }
        Ok(table)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn e(&self) -> &[f64] {
        &self.e
    }

    pub fn gamma_ratio(&self) -> f64 {
        self.gamma_ratio
    }

    /// e(n) for any n, including past the table.
    pub fn e_at(&self, n: usize) -> f64 {
        structure_factor(&self.params, n)
    }

    /// ρ(n) = Γ(a/b)·Γ(n+1)·∏Γ(b_j+n)/∏Γ(a_i+n), evaluated in log space.
    pub fn rho_closed_form(&self, n: usize) -> f64 {
        let nf = n as f64;
        let ln = ln_gamma(nf + 1.0) + self.params.lower().iter().map(|b| ln_gamma(b + nf)).sum::<f64>()
            - self.params.upper().iter().map(|a| ln_gamma(a + nf)).sum::<f64>();
        self.gamma_ratio * ln.exp()
    }

    /// max_n |ρ(n) − closed form| / ρ(n).
    pub fn closed_form_deviation(&self) -> f64 {
        self.rho.iter().enumerate().map(|(n, r)| ((r - self.rho_closed_form(n)) / r).abs()).fold(0.0, f64::max)
    }

    /// ₚf_q(n) = √(e(n)/n) for 1 ≤ n ≤ n_max.
    pub fn deformation_value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("deformation function is only evaluated for n ≥ 1".into()));
        }
        if n > self.n_max {
            return Err(Error::Index { index: n, limit: self.n_max });
        }
        Ok((self.e[n] / n as f64).sqrt())
    }

    /// ρ(l) / (ρ(m)·ρ(l−m)).
    pub fn generalized_binomial(&self, l: usize, m: usize) -> Result<f64> {
        if l > self.n_max {
            return Err(Error::Index { index: l, limit: self.n_max });
        }
        if m > l {
            return Err(Error::Index { index: m, limit: l });
        }
        Ok(self.rho[l] / (self.rho[m] * self.rho[l - m]))
    }

    /// Newton's generalized binomial [x+y]^l = Σ_m C(l,m)·x^{l−m}·y^m.
    pub fn bracket_power<T: BinomialRing>(&self, x: T, y: T, l: usize) -> Result<T> {
        let mut acc = T::zero();
        for m in 0..=l {
            let coeff = self.generalized_binomial(l, m)?;
            acc = acc + x.power(l - m).mul(y.power(m)).scale(coeff);
        }
        Ok(acc)
    }

    pub fn ladders(&self) -> LadderOperators {
        LadderOperators::build(self)
    }
}

/// Commutative values the bracket power can expand: plain scalars and
/// slot-diagonal matrices alike.
pub trait BinomialRing: Clone + Add<Output = Self> + Mul<Output = Self> {
    fn one() -> Self;
    fn zero() -> Self;
    fn scale(&self, factor: f64) -> Self;

    fn power(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self.clone())
    }
}

impl BinomialRing for f64 {
    fn one() -> Self {
        1.0
    }
    fn zero() -> Self {
        0.0
    }
    fn scale(&self, factor: f64) -> Self {
        self * factor
    }
}

impl BinomialRing for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn scale(&self, factor: f64) -> Self {
        self * factor
    }
}

/// Matrix representations of A₋, A₊ and N on span{|0⟩ … |n_max⟩}.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderOperators {
    pub dim: usize,
    pub lowering: DMatrix<f64>,
    pub raising: DMatrix<f64>,
    pub number: DMatrix<f64>,
}

impl LadderOperators {
    pub fn build(table: &StructureTable) -> Self {
        let dim = table.n_max + 1;
        let mut lowering = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            lowering[(n - 1, n)] = table.e[n].sqrt();
        }
        let raising = lowering.transpose();
        let number = DMatrix::from_diagonal(&DVector::from_iterator(dim, (0..dim).map(|n| n as f64)));
        Self { dim, lowering, raising, number }
    }

    pub fn vacuum(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v[0] = 1.0;
        v
    }
}

/// D(z)|0⟩ = ₚFq(z·A₊)|0⟩ / √ₚFq(|z|²), built by applying the operator series
/// to the vacuum column vector.
///
/// A₊ is nilpotent on the truncated space so the operator series is finite;
/// the result is normalized with the same truncated ₚFq. The tail bound
/// |z|^{n_max+1}/√ρ(n_max+1) must not exceed `tol`.
pub fn displace_vacuum(table: &Arc<StructureTable>, z: Complex64, tol: f64) -> Result<CoherentState> {
    let rho_next = table.rho[table.n_max] * table.e_at(table.n_max + 1);
    let tail = z.norm().powi(table.n_max as i32 + 1) / rho_next.sqrt();
    if tail > tol {
        return Err(Error::Truncation { tail, tol });
    }
    let ladders = table.ladders();
    let raising = ladders.raising.map(|v| Complex64::new(v, 0.0));
    let mut power = ladders.vacuum().map(|v| Complex64::new(v, 0.0));
    let mut acc = power.clone();
    let mut z_pow = Complex64::new(1.0, 0.0);
    for k in 1..=table.n_max {
        power = &raising * &power;
        z_pow *= z;
        acc += &power * (z_pow / table.rho[k]);
    }
    let norm_sq = acc.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let coeffs = acc.iter().map(|c| c / norm_sq.sqrt()).collect();
    Ok(CoherentState::from_parts(Arc::clone(table), z, coeffs, norm_sq))
}
