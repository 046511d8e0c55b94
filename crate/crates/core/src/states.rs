//! Scalar-label coherent states
//! |z⟩ = ₚFq(|z|²)^{−1/2} Σ zⁿ/√ρ(n) |n⟩ on a truncated Fock space.
//!
//! The normalization uses the same truncation as the coefficients, so every
//! state is exactly unit-norm in its own space; how far that sits from the
//! untruncated state is the tail bound |z|^{n+1}/√ρ(n+1).

use crate::algebra::StructureTable;
use crate::specfun::pfq_truncated;
use crate::{Complex64, Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    table: Arc<StructureTable>,
    label: Complex64,
    coeffs: Vec<Complex64>,
    norm_fn: f64,
}

impl CoherentState {
    pub(crate) fn from_parts(
        table: Arc<StructureTable>,
        label: Complex64,
        coeffs: Vec<Complex64>,
        norm_fn: f64,
    ) -> Self {
        Self { table, label, coeffs, norm_fn }
    }

    pub fn table(&self) -> &Arc<StructureTable> {
        &self.table
    }

    pub fn label(&self) -> Complex64 {
        self.label
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// The (truncated) ₚFq(|z|²) the coefficients were divided by.
    pub fn norm_fn(&self) -> f64 {
        self.norm_fn
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// A(n) = Σ_j c_j nʲ, an observable diagonal in the Fock basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalObservable {
    pub poly_coeffs: Vec<f64>,
}

impl DiagonalObservable {
    pub fn new(poly_coeffs: Vec<f64>) -> Self {
        Self { poly_coeffs }
    }

    pub fn identity() -> Self {
        Self::new(vec![1.0])
    }

    pub fn number() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    pub fn eval(&self, n: f64) -> f64 {
        self.poly_coeffs.iter().rev().fold(0.0, |acc, c| acc * n + c)
    }
}

/// Coefficients zⁿ/(√F·√ρ(n)) for n = 0..=n_max, built by the ratio
/// c_n = c_{n−1}·z/√e(n).
pub fn make_state(table: &Arc<StructureTable>, z: Complex64, n_max: usize) -> Result<CoherentState> {
    if n_max > table.n_max() {
        return Err(Error::Index { index: n_max, limit: table.n_max() });
    }
    let norm_fn = pfq_truncated(table.params(), z.norm_sqr(), n_max);
    if !norm_fn.is_finite() {
        return Err(Error::Overflow(format!("normalization overflows at |z|² = {}", z.norm_sqr())));
    }
    let e = table.e();
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(Complex64::new(norm_fn.sqrt().recip(), 0.0));
    for n in 1..=n_max {
        let prev = coeffs[n - 1];
        coeffs.push(prev * z / e[n].sqrt());
    }
    Ok(CoherentState::from_parts(Arc::clone(table), z, coeffs, norm_fn))
}

fn check_compatible(s1: &CoherentState, s2: &CoherentState) -> Result<()> {
    if s1.table != s2.table || s1.coeffs.len() != s2.coeffs.len() {
        return Err(Error::TableMismatch);
    }
    Ok(())
}

/// ⟨s1|s2⟩ = Σ conj(c¹_n)·c²_n.
pub fn overlap(s1: &CoherentState, s2: &CoherentState) -> Result<Complex64> {
    check_compatible(s1, s2)?;
    Ok(s1.coeffs.iter().zip(&s2.coeffs).map(|(a, b)| a.conj() * b).sum())
}

/// The reproducing kernel ₚFq(conj(z₁)z₂)/√(ₚFq(|z₁|²)ₚFq(|z₂|²)) at the
/// states' truncation.
pub fn kernel(s1: &CoherentState, s2: &CoherentState) -> Result<Complex64> {
    check_compatible(s1, s2)?;
    let cross = pfq_truncated(s1.table.params(), s1.label.conj() * s2.label, s1.n_max());
    Ok(cross / (s1.norm_fn * s2.norm_fn).sqrt())
}

/// ‖|z⟩ − |z+δ⟩‖ at the table's full truncation.
pub fn label_continuity_probe(table: &Arc<StructureTable>, z: Complex64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let a = make_state(table, z, table.n_max())?;
    let b = make_state(table, z + delta, table.n_max())?;
    Ok(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
}

const TAIL_WARNING: f64 = 1e-10;

/// Σ_n A(n)·|c_n|².
pub fn expect_direct(state: &CoherentState, obs: &DiagonalObservable) -> f64 {
    let value: f64 = state.coeffs.iter().enumerate().map(|(n, c)| obs.eval(n as f64) * c.norm_sqr()).sum();
    let n = state.n_max();
    let next_prob = state.coeffs[n].norm_sqr() * state.label.norm_sqr() / state.table.e_at(n + 1);
    let tail = (obs.eval(n as f64 + 1.0) * next_prob).abs();
    if tail > TAIL_WARNING {
        log::warn!("expectation truncated at n = {n}; next term ≈ {tail:e}");
    }
    value
}

/// Σ_j c_j (x d/dx)ʲ ₚFq(x) / ₚFq(x) at x = |z|², with the Euler operator
/// applied termwise: (x d/dx)ʲ xⁿ = nʲ xⁿ.
pub fn expect_euler(state: &CoherentState, obs: &DiagonalObservable) -> f64 {
    let x = state.label.norm_sqr();
    let params = state.table.params();
    let mut terms = Vec::with_capacity(state.coeffs.len());
    let mut t = 1.0;
    terms.push(t);
    for n in 0..state.n_max() {
        t *= crate::specfun::term_ratio(params, x, n);
        terms.push(t);
    }
    let norm: f64 = terms.iter().sum();
    let mut total = 0.0;
    for (j, c) in obs.poly_coeffs.iter().enumerate() {
        if *c == 0.0 {
            continue;
        }
        let euler: f64 = terms.iter().enumerate().map(|(n, t)| (n as f64).powi(j as i32) * t).sum();
        total += c * euler;
    }
    total / norm
}
