//! Singular projector matrices, diagonal matrix labels and coherent states
//! with matrix argument `Z = z·u₀ + σ·u₁`.
//!
//! A matrix-label state is a pair of scalar states, one per projector slot.
//! Every cross-slot pairing carries a factor u₀u₁ = 0 and vanishes, so the
//! matrix-valued Gram reduces to u₀⟨z|z⟩ + u₁⟨σ|σ⟩ = I.

use crate::algebra::{BinomialRing, StructureTable};
use crate::states::{make_state, overlap, CoherentState};
use crate::{Complex64, Error, Result};
use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul};
use std::sync::Arc;

/// u_n: the dim×dim matrix with a single 1 at (n, n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projector {
    dim: usize,
    index: usize,
}

pub fn projector(dim: usize, n: usize) -> Result<Projector> {
    if n >= dim {
        return Err(Error::Index { index: n, limit: dim.saturating_sub(1) });
    }
    Ok(Projector { dim, index: n })
}

impl Projector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn to_matrix(&self) -> DMatrix<i64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        m[(self.index, self.index)] = 1;
        m
    }

    pub fn to_complex_matrix2(&self) -> Result<Matrix2<Complex64>> {
        if self.dim != 2 {
            return Err(Error::Index { index: self.dim, limit: 2 });
        }
        let mut m = Matrix2::zeros();
        m[(self.index, self.index)] = Complex64::new(1.0, 0.0);
        Ok(m)
    }

    pub fn trace(&self) -> i64 {
        1
    }

    /// Product of the diagonal: zero whenever dim ≥ 2.
    pub fn determinant(&self) -> i64 {
        if self.dim == 1 {
            1
        } else {
            0
        }
    }
}

/// All projectors u_0 … u_{dim−1}.
pub fn projector_basis(dim: usize) -> Vec<Projector> {
    (0..dim).map(|n| Projector { dim, index: n }).collect()
}

/// Z = z·u₀ + σ·u₁ = diag(z, σ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawLabel", into = "RawLabel")]
pub struct DiagonalLabel {
    pub z: Complex64,
    pub sigma: Complex64,
}

#[derive(Serialize, Deserialize)]
struct RawLabel {
    z: [f64; 2],
    sigma: [f64; 2],
}

impl From<RawLabel> for DiagonalLabel {
    fn from(raw: RawLabel) -> Self {
        Self::new(Complex64::new(raw.z[0], raw.z[1]), Complex64::new(raw.sigma[0], raw.sigma[1]))
    }
}

impl From<DiagonalLabel> for RawLabel {
    fn from(l: DiagonalLabel) -> Self {
        RawLabel { z: [l.z.re, l.z.im], sigma: [l.sigma.re, l.sigma.im] }
    }
}

impl DiagonalLabel {
    pub fn new(z: Complex64, sigma: Complex64) -> Self {
        Self { z, sigma }
    }

    pub fn slot(&self, i: usize) -> Complex64 {
        match i {
            0 => self.z,
            _ => self.sigma,
        }
    }

    pub fn to_matrix(&self) -> Matrix2<Complex64> {
        Matrix2::new(self.z, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), self.sigma)
    }

    pub fn pow(&self, m: u32) -> Self {
        Self::new(self.z.powu(m), self.sigma.powu(m))
    }

    /// |Z|² = diag(|z|², |σ|²).
    pub fn modulus_sq(&self) -> Self {
        Self::new(Complex64::new(self.z.norm_sqr(), 0.0), Complex64::new(self.sigma.norm_sqr(), 0.0))
    }

    pub fn max_abs_diff(&self, m: &Matrix2<Complex64>) -> f64 {
        (self.to_matrix() - m).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl Add for DiagonalLabel {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.z + rhs.z, self.sigma + rhs.sigma)
    }
}

impl Mul for DiagonalLabel {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.z * rhs.z, self.sigma * rhs.sigma)
    }
}

impl BinomialRing for DiagonalLabel {
    fn one() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    }
    fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }
    fn scale(&self, factor: f64) -> Self {
        Self::new(self.z * factor, self.sigma * factor)
    }
}

/// ℱ(z·u₀ + σ·u₁) = ℱ(z)·u₀ + ℱ(σ)·u₁.
pub fn cauchy_apply<F>(f: F, label: &DiagonalLabel) -> Result<DiagonalLabel>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    Ok(DiagonalLabel::new(f(label.z)?, f(label.sigma)?))
}

/// Σ_k c_k Mᵏ by explicit 2×2 matrix products, for any (not just diagonal) M.
pub fn matrix_power_series(coeffs: &[Complex64], m: &Matrix2<Complex64>) -> Matrix2<Complex64> {
    let mut power = Matrix2::identity();
    let mut acc = Matrix2::zeros();
    for (k, c) in coeffs.iter().enumerate() {
        if k > 0 {
            power *= m;
        }
        acc += power * *c;
    }
    acc
}

/// Slotwise ℱ(Z₁)·𝒢(Z₂), checked against the explicit matrix product.
pub fn product_rule_check<F, G>(f: F, g: G, label1: &DiagonalLabel, label2: &DiagonalLabel) -> Result<DiagonalLabel>
where
    F: Fn(Complex64) -> Result<Complex64>,
    G: Fn(Complex64) -> Result<Complex64>,
{
    let fz = cauchy_apply(&f, label1)?;
    let gz = cauchy_apply(&g, label2)?;
    let slotwise = DiagonalLabel::new(f(label1.z)? * g(label2.z)?, f(label1.sigma)? * g(label2.sigma)?);
    let explicit = fz.to_matrix() * gz.to_matrix();
    let scale = explicit.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let diff = slotwise.max_abs_diff(&explicit);
    if diff > 1e-12 * scale {
        return Err(Error::Consistency(format!("slotwise product differs from matrix product by {diff:e}")));
    }
    Ok(slotwise)
}

/// [z·u₀ + σ·u₁]ˡ = zˡ·u₀ + σˡ·u₁.
pub fn bracket_matrix_power(label: &DiagonalLabel, l: u32) -> DiagonalLabel {
    label.pow(l)
}

/// |z·u₀ + σ·u₁⟩ as one unit-norm scalar state per projector slot.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCoherentState {
    pub comp0: CoherentState,
    pub comp1: CoherentState,
}

pub fn make_matrix_state(
    table: &Arc<StructureTable>,
    label: &DiagonalLabel,
    n_max: usize,
) -> Result<MatrixCoherentState> {
    Ok(MatrixCoherentState { comp0: make_state(table, label.z, n_max)?, comp1: make_state(table, label.sigma, n_max)? })
}

impl MatrixCoherentState {
    pub fn component(&self, slot: usize) -> &CoherentState {
        match slot {
            0 => &self.comp0,
            _ => &self.comp1,
        }
    }

    pub fn label(&self) -> DiagonalLabel {
        DiagonalLabel::new(self.comp0.label(), self.comp1.label())
    }

    /// diag(√F(|z|²), √F(|σ|²)), the matrix the expansion is divided by.
    pub fn normalization_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.comp0.norm_fn().sqrt(), 0.0, 0.0, self.comp1.norm_fn().sqrt())
    }

    /// The slot weights √F(|z|²)·u₀·N⁻¹ and √F(|σ|²)·u₁·N⁻¹ with N the
    /// normalization matrix. In the matrix reading these are u₀ and u₁.
    pub fn slot_weights(&self) -> Result<[Matrix2<f64>; 2]> {
        let n = self.normalization_matrix();
        if n[(0, 0)] == 0.0 || n[(1, 1)] == 0.0 {
            return Err(Error::Domain("normalization matrix is singular".into()));
        }
        let inv = Matrix2::new(1.0 / n[(0, 0)], 0.0, 0.0, 1.0 / n[(1, 1)]);
        let u0 = Matrix2::new(1.0, 0.0, 0.0, 0.0);
        let u1 = Matrix2::new(0.0, 0.0, 0.0, 1.0);
        Ok([u0 * n[(0, 0)] * inv, u1 * n[(1, 1)] * inv])
    }
}

/// u_i·u_j·⟨s_i|t_j⟩, one slot pair of the matrix-valued inner product.
pub fn slot_inner(s: &MatrixCoherentState, i: usize, t: &MatrixCoherentState, j: usize) -> Result<Matrix2<Complex64>> {
    let ui = projector(2, i)?.to_complex_matrix2()?;
    let uj = projector(2, j)?.to_complex_matrix2()?;
    Ok(ui * uj * overlap(s.component(i), t.component(j))?)
}

/// ⟨S|T⟩ = Σ_{i,j} u_i u_j ⟨s_i|t_j⟩ = diag(⟨z|z′⟩, ⟨σ|σ′⟩).
pub fn matrix_cross_gram(s: &MatrixCoherentState, t: &MatrixCoherentState) -> Result<Matrix2<Complex64>> {
    let mut acc = Matrix2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            acc += slot_inner(s, i, t, j)?;
        }
    }
    Ok(acc)
}

/// ⟨Z|Z⟩ as a 2×2 matrix.
pub fn matrix_gram(s: &MatrixCoherentState) -> Result<Matrix2<Complex64>> {
    matrix_cross_gram(s, s)
}

/// |ψ⟩⟨ψ| on the Fock space of one slot.
pub fn rank_one_projector(state: &CoherentState) -> DMatrix<Complex64> {
    let dim = state.coeffs().len();
    DMatrix::from_fn(dim, dim, |r, c| state.coeffs()[r] * state.coeffs()[c].conj())
}

/// The slot-tagged projectors (|z⟩⟨z|, |σ⟩⟨σ|) whose u₀/u₁ combination is |Z⟩⟨Z|.
pub fn matrix_projector_decomposition(s: &MatrixCoherentState) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    (rank_one_projector(&s.comp0), rank_one_projector(&s.comp1))
}
