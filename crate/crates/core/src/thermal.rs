//! Thermal mixed states ρ = Σ wₙ|n⟩⟨n| and their coherent-state pictures:
//! Husimi Q, the P quasi-distribution of a linear spectrum, the moment
//! condition that fixes P, the two-level oscillator, the complex-matrix
//! qubit and von Neumann entropy.
//!
//! Entropies are in nats.

use crate::algebra::StructureTable;
use crate::matrixstates::{projector_basis, DiagonalLabel};
use crate::specfun::{
    gamma, integrate_half_line, pfq, weight_strategy, weighted_moment_with, ModelParams, WeightEvaluator,
};
use crate::states::DiagonalObservable;
use crate::{Complex64, Error, Result};
use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::RangeInclusive;

/// Relative tolerance for the moment identities.
pub const MOMENT_TOL: f64 = 1e-6;
/// Entrywise tolerance for the two-level oscillator reconstruction.
pub const TWO_LEVEL_TOL: f64 = 1e-8;
/// Smallest weight the log series is allowed to expand around.
pub const SERIES_WEIGHT_FLOOR: f64 = 0.05;

const SERIES_TOL: f64 = 1e-10;
const SERIES_MAX_TERMS: usize = 1_000_000;

/// A canonical density operator diagonal in the Fock basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalModel {
    pub beta: f64,
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
    pub partition: f64,
}

impl ThermalModel {
    /// Boltzmann weights e^{−βEₙ}/Z, computed relative to the lowest level
    /// so large βE neither underflows the weights nor the sum.
    pub fn new(beta: f64, energies: Vec<f64>) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta must be positive and finite, got {beta}")));
        }
        if energies.is_empty() || energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParams("energies must be a non-empty list of finite values".into()));
        }
        let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let shifted: Vec<f64> = energies.iter().map(|e| (-beta * (e - e_min)).exp()).collect();
        let sum: f64 = shifted.iter().sum();
        let weights = shifted.iter().map(|b| b / sum).collect();
        let partition = (-beta * e_min).exp() * sum;
        Ok(Self { beta, energies, weights, partition })
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    pub fn trace(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// diag(w₀, w₁, …) = Σ wₙ uₙ.
    pub fn density_matrix(&self) -> DMatrix<f64> {
        projector_basis(self.levels())
            .iter()
            .zip(&self.weights)
            .fold(DMatrix::zeros(self.levels(), self.levels()), |acc, (u, w)| {
                acc + u.to_matrix().map(|v| v as f64) * *w
            })
    }
}

pub fn thermal_two_level(beta: f64, e0: f64, e1: f64) -> Result<ThermalModel> {
    ThermalModel::new(beta, vec![e0, e1])
}

/// Eₙ = ħω·n + E₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSpectrum {
    pub hbar_omega: f64,
    pub e0: f64,
}

impl LinearSpectrum {
    pub fn new(hbar_omega: f64, e0: f64) -> Result<Self> {
        if !(hbar_omega > 0.0) || !hbar_omega.is_finite() || !e0.is_finite() {
            return Err(Error::Domain(format!("need ħω > 0 and finite E₀, got ({hbar_omega}, {e0})")));
        }
        Ok(Self { hbar_omega, e0 })
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.hbar_omega * n as f64 + self.e0
    }

    /// e^{−βEₙ}/Z for the infinite ladder: (1 − e^{−t})e^{−tn}, t = βħω.
    pub fn boltzmann_weight(&self, beta: f64, n: usize) -> f64 {
        let t = beta * self.hbar_omega;
        -(-t).exp_m1() * (-t * n as f64).exp()
    }

    /// e^{−βE₀}/(1 − e^{−βħω}).
    pub fn partition(&self, beta: f64) -> f64 {
        (-beta * self.e0).exp() / -(-beta * self.hbar_omega).exp_m1()
    }

    /// The first `levels` rungs as a finite model.
    pub fn model(&self, beta: f64, levels: usize) -> Result<ThermalModel> {
        ThermalModel::new(beta, (0..levels).map(|n| self.energy(n)).collect())
    }
}

/// Which ₚFq divides the Husimi function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Truncated at the model's level count, as in the finite-level state.
    #[default]
    Truncated,
    /// The full series.
    Full,
}

/// Q(x) = Σ wₙ xⁿ/ρ(n) / ₚFq(x) for a slot with |z|² = x.
pub fn husimi_q(model: &ThermalModel, table: &StructureTable, x: f64, norm: Normalization) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Husimi argument must be finite and ≥ 0, got {x}")));
    }
    let levels = model.levels();
    if levels - 1 > table.n_max() {
        return Err(Error::Index { index: levels - 1, limit: table.n_max() });
    }
    if x == 0.0 {
        return Ok(model.weights[0]);
    }
    // xⁿ/ρ(n) in log form, rescaled by the largest term
    let ln_terms: Vec<f64> = (0..levels).map(|n| n as f64 * x.ln() - table.rho()[n].ln()).collect();
    let peak = ln_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = ln_terms.iter().map(|l| (l - peak).exp()).collect();
    let numerator: f64 = scaled.iter().zip(&model.weights).map(|(t, w)| t * w).sum();
    let denominator = match norm {
        Normalization::Truncated => scaled.iter().sum(),
        Normalization::Full => {
            let full: f64 = pfq(table.params(), x, 1e-16, 100_000)?;
            full * (-peak).exp()
        }
    };
    if !(denominator > 0.0) || !denominator.is_finite() {
        return Err(Error::Overflow(format!("Husimi normalization not representable at x = {x}")));
    }
    if levels - 1 < table.n_max() && norm == Normalization::Truncated {
        log::debug!("Husimi Q uses the {levels}-level truncated normalization");
    }
    Ok(numerator / denominator)
}

/// P(x) = (e^{t} − 1)·G(e^{t}x)/G(x), t = βħω, with the closed-form weight
/// when one exists.
pub fn p_function_linear(spec: &LinearSpectrum, beta: f64, params: &ModelParams, x: f64) -> Result<f64> {
    let evaluator = weight_strategy("auto", params)?;
    p_function_linear_with(spec, beta, evaluator.as_ref(), x)
}

pub fn p_function_linear_with(spec: &LinearSpectrum, beta: f64, weight: &dyn WeightEvaluator, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("P function needs x > 0, got {x}")));
    }
    let t = beta * spec.hbar_omega;
    let ln_ratio = weight.ln_value(t.exp() * x)? - weight.ln_value(x)?;
    let value = t.exp_m1() * ln_ratio.exp();
    if !value.is_finite() {
        return Err(Error::Overflow(format!("P function overflows at x = {x}")));
    }
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub n: usize,
    pub quadrature: f64,
    pub expected: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub rows: Vec<MomentRow>,
    pub max_rel_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl MomentReport {
    fn from_rows(rows: Vec<MomentRow>, tolerance: f64) -> Self {
        let max_rel_error = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
        let passed = rows.iter().all(|r| r.rel_error <= tolerance);
        Self { rows, max_rel_error, tolerance, passed }
    }
}

fn moment_row(n: usize, quadrature: f64, expected: f64) -> MomentRow {
    MomentRow { n, quadrature, expected, rel_error: (quadrature - expected).abs() / expected.abs() }
}

/// ∫ P(x)G(x)xⁿ dx against (e^{−βEₙ}/Z)·ρ(n)/Γ(a/b) for each n.
pub fn verify_p_moments(
    spec: &LinearSpectrum,
    beta: f64,
    params: &ModelParams,
    n_range: RangeInclusive<usize>,
    quad_tol: f64,
) -> Result<MomentReport> {
    let weight = weight_strategy("auto", params)?;
    verify_p_moments_with(spec, beta, weight.as_ref(), params, n_range, quad_tol)
}

pub fn verify_p_moments_with(
    spec: &LinearSpectrum,
    beta: f64,
    weight: &dyn WeightEvaluator,
    params: &ModelParams,
    n_range: RangeInclusive<usize>,
    quad_tol: f64,
) -> Result<MomentReport> {
    let table = StructureTable::build(params, *n_range.end())?;
    let scale = (beta * spec.hbar_omega).exp();
    let mut rows = Vec::new();
    for n in n_range {
        let failure = std::cell::RefCell::new(None);
        let integrand = |x: f64| {
            let g = match weight.value(x) {
                Ok(g) => g,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return 0.0;
                }
            };
            // P·G = (e^t − 1)·G(e^t x): zero once either weight value is
            if g == 0.0 || matches!(weight.value(scale * x), Ok(v) if v == 0.0) {
                return 0.0;
            }
            match p_function_linear_with(spec, beta, weight, x) {
                Ok(p) => p * g * x.powi(n as i32),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let split = n as f64 + params.max_lower() + 10.0;
        let quad = integrate_half_line(integrand, split, quad_tol)?;
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let expected = spec.boltzmann_weight(beta, n) * table.rho()[n] / table.gamma_ratio();
        rows.push(moment_row(n, quad.value, expected));
    }
    Ok(MomentReport::from_rows(rows, MOMENT_TOL))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub moments: MomentReport,
    /// u₀ + u₁ = I with exact integer arithmetic.
    pub projector_sum_exact: bool,
    pub passed: bool,
}

/// Γ(a/b)·∫xⁿG(x)dx = ρ(n) per slot, and the projector sum u₀ + u₁ = I.
pub fn verify_identity_resolution(
    params: &ModelParams,
    n_range: RangeInclusive<usize>,
    quad_tol: f64,
) -> Result<IdentityReport> {
    let weight = weight_strategy("auto", params)?;
    verify_identity_resolution_with(weight.as_ref(), params, n_range, quad_tol)
}

pub fn verify_identity_resolution_with(
    weight: &dyn WeightEvaluator,
    params: &ModelParams,
    n_range: RangeInclusive<usize>,
    quad_tol: f64,
) -> Result<IdentityReport> {
    let table = StructureTable::build(params, *n_range.end())?;
    let mut rows = Vec::new();
    for n in n_range {
        let moment = weighted_moment_with(weight, params, n, quad_tol)?;
        rows.push(moment_row(n, table.gamma_ratio() * moment, table.rho()[n]));
    }
    let moments = MomentReport::from_rows(rows, MOMENT_TOL);
    let sum = projector_basis(2).iter().fold(DMatrix::<i64>::zeros(2, 2), |acc, u| acc + u.to_matrix());
    let projector_sum_exact = sum == DMatrix::identity(2, 2);
    let passed = moments.passed && projector_sum_exact;
    Ok(IdentityReport { moments, projector_sum_exact, passed })
}

/// The two-level oscillator a={1}, b={3/2}, Eₙ = ħω(n + ½), n = 0, 1,
/// reconstructed four ways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelReport {
    pub beta: f64,
    pub hbar_omega: f64,
    /// Boltzmann weights of the finite model.
    pub direct: [f64; 2],
    /// Σₙ |n⟩⟨n|/ρ(n) times the closed-form P moments.
    pub reconstructed: [f64; 2],
    /// The same with the P moments computed by quadrature.
    pub quadrature: [f64; 2],
    /// (1/(1+e^{−t}), 1/(1+e^{t})).
    pub closed_form: [f64; 2],
    /// (2/√π)(2/3)Γ(5/2), which must be 1.
    pub gamma_check: f64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn reproduce_two_level_ho(beta: f64, hbar_omega: f64, quad_tol: f64) -> Result<TwoLevelReport> {
    let spec = LinearSpectrum::new(hbar_omega, 0.5 * hbar_omega)?;
    let params = ModelParams::half_oscillator();
    let table = StructureTable::build(&params, 1)?;
    let model = spec.model(beta, 2)?;
    let t = beta * hbar_omega;

    let direct = [model.weights[0], model.weights[1]];
    let two_sqrt_pi = 2.0 / PI.sqrt();
    let mut reconstructed = [0.0; 2];
    for (n, slot) in reconstructed.iter_mut().enumerate() {
        let moment = two_sqrt_pi * (-0.5 * t).exp() / model.partition * (-t * n as f64).exp() * gamma(1.5 + n as f64);
        *slot = moment / table.rho()[n];
    }

    // the P function of the infinite ladder carries Z∞; rescale to the two levels
    let p_report = verify_p_moments(&spec, beta, &params, 0..=1, quad_tol)?;
    let rescale = table.gamma_ratio() * spec.partition(beta) / model.partition;
    let mut quadrature = [0.0; 2];
    for (n, slot) in quadrature.iter_mut().enumerate() {
        *slot = p_report.rows[n].quadrature * rescale / table.rho()[n];
    }

    let closed_form = [1.0 / (1.0 + (-t).exp()), 1.0 / (1.0 + t.exp())];
    let gamma_check = two_sqrt_pi * (2.0 / 3.0) * gamma(2.5);
    let max_deviation = [direct, reconstructed, quadrature]
        .iter()
        .flat_map(|w| w.iter().zip(&closed_form).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let passed = max_deviation <= TWO_LEVEL_TOL && (gamma_check - 1.0).abs() <= 1e-12;
    Ok(TwoLevelReport {
        beta,
        hbar_omega,
        direct,
        reconstructed,
        quadrature,
        closed_form,
        gamma_check,
        max_deviation,
        tolerance: TWO_LEVEL_TOL,
        passed,
    })
}

/// Per-slot qubit amplitudes (1, Z/√ρ(1))/√(1 + |Z|²/ρ(1)).
pub fn qubit_from_label(params: &ModelParams, label: &DiagonalLabel) -> Result<[[Complex64; 2]; 2]> {
    let rho1 = StructureTable::build(params, 1)?.rho()[1];
    if !(rho1 > 0.0) || !rho1.is_finite() {
        return Err(Error::InvalidParams(format!("qubit needs a finite non-zero ρ(1), got {rho1}")));
    }
    let amplitudes = |z: Complex64| -> Result<[Complex64; 2]> {
        let norm = (1.0 + z.norm_sqr() / rho1).sqrt();
        let pair = [Complex64::new(1.0 / norm, 0.0), z / (rho1.sqrt() * norm)];
        let total = pair[0].norm_sqr() + pair[1].norm_sqr();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Consistency(format!("qubit amplitudes have squared norm {total}")));
        }
        Ok(pair)
    };
    Ok([amplitudes(label.z)?, amplitudes(label.sigma)?])
}

/// An entropy evaluation route, chosen by name at runtime.
pub trait EntropyMethod: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;
    fn entropy(&self, model: &ThermalModel) -> Result<f64>;
}

/// Names accepted by [`entropy_method`].
pub const ENTROPY_METHODS: &[&str] = &["closed", "series"];

pub fn entropy_method(name: &str) -> Result<Box<dyn EntropyMethod>> {
    match name {
        "closed" => Ok(Box::new(ClosedEntropy)),
        "series" => Ok(Box::new(SeriesEntropy::default())),
        other => Err(Error::Unknown { kind: "entropy method", name: other.to_string() }),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedEntropy;

impl EntropyMethod for ClosedEntropy {
    fn name(&self) -> &'static str {
        "closed"
    }
    fn entropy(&self, model: &ThermalModel) -> Result<f64> {
        Ok(entropy_closed(model))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesEntropy {
    pub k_max: usize,
    pub tol: f64,
}

impl Default for SeriesEntropy {
    fn default() -> Self {
        Self { k_max: SERIES_MAX_TERMS, tol: SERIES_TOL }
    }
}

impl EntropyMethod for SeriesEntropy {
    fn name(&self) -> &'static str {
        "series"
    }
    fn entropy(&self, model: &ThermalModel) -> Result<f64> {
        entropy_series(model, self.k_max, self.tol)
    }
}

/// −Σ wₙ ln wₙ with 0·ln 0 = 0.
pub fn entropy_closed(model: &ThermalModel) -> f64 {
    -model.weights.iter().map(|&w| if w == 0.0 { 0.0 } else { w * w.ln() }).sum::<f64>()
}

/// ln w = Σ_{k≥1} (−1)^{k+1}(w − 1)ᵏ/k, stopped once the remaining tail is
/// provably below `tol`. Returns the value and the number of terms used.
pub fn log_series_slot(w: f64, k_max: usize, tol: f64) -> Result<(f64, usize)> {
    if !(w >= SERIES_WEIGHT_FLOOR) || !(w < 2.0) {
        return Err(Error::Domain(format!(
            "log series needs {SERIES_WEIGHT_FLOOR} ≤ w < 2, got {w}; use the closed form"
        )));
    }
    let x = w - 1.0;
    let r = x.abs();
    let mut power = 1.0;
    let mut sum = 0.0;
    for k in 1..=k_max {
        power *= x;
        let term = power / k as f64;
        sum += if k % 2 == 1 { term } else { -term };
        // |tail| ≤ r^{k+1}/((k+1)(1−r))
        let tail = power.abs() * r / ((k + 1) as f64 * (1.0 - r));
        if tail < tol {
            return Ok((sum, k));
        }
    }
    Err(Error::NonConvergence { what: format!("log series at w = {w}"), iterations: k_max })
}

/// S = −Σₙ wₙ·(log series of wₙ).
pub fn entropy_series(model: &ThermalModel, k_max: usize, tol: f64) -> Result<f64> {
    let mut s = 0.0;
    for &w in &model.weights {
        s -= w * log_series_slot(w, k_max, tol)?.0;
    }
    Ok(s)
}

/// log ρ = Σ_{k≥1} (−1)^{k+1}(ρ − I)ᵏ/k by explicit 2×2 matrix products.
pub fn log_series_matrix(rho: &Matrix2<f64>, k_max: usize, tol: f64) -> Result<Matrix2<f64>> {
    let shifted = rho - Matrix2::identity();
    let r = shifted.norm();
    if !(r < 1.0) {
        return Err(Error::Domain(format!("‖ρ − I‖ = {r} is outside the log series disk")));
    }
    let mut power = Matrix2::identity();
    let mut sum = Matrix2::zeros();
    for k in 1..=k_max {
        power *= shifted;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += power * (sign / k as f64);
        if r.powi(k as i32 + 1) / ((k + 1) as f64 * (1.0 - r)) < tol {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what: "matrix log series".into(), iterations: k_max })
}

/// −Tr(ρ log ρ) for a two-level model through the matrix series.
pub fn entropy_matrix_route(model: &ThermalModel, k_max: usize, tol: f64) -> Result<f64> {
    if model.levels() != 2 {
        return Err(Error::InvalidParams(format!("matrix route is two-level, got {} levels", model.levels())));
    }
    let rho = Matrix2::new(model.weights[0], 0.0, 0.0, model.weights[1]);
    let log_rho = log_series_matrix(&rho, k_max, tol)?;
    Ok(-(rho * log_rho).trace())
}

/// Tr(ρA) = Σ wₙ A(n).
pub fn thermal_expectation(model: &ThermalModel, obs: &DiagonalObservable) -> f64 {
    model.weights.iter().enumerate().map(|(n, w)| w * obs.eval(n as f64)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ln_gamma;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn two_level_weights() {
        let deg = thermal_two_level(1.3, 0.7, 0.7).unwrap();
        assert_eq!(deg.weights, vec![0.5, 0.5]);
        let m = thermal_two_level(1.0, 0.0, LN_2).unwrap();
        assert_relative_eq!(m.weights[0], 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(m.weights[1], 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(m.trace(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(m.partition, 1.5, max_relative = 1e-15);
        let rho = m.density_matrix();
        assert_eq!(rho[(0, 1)], 0.0);
        assert_eq!(rho[(0, 0)], m.weights[0]);
    }

    #[test]
    fn model_validation() {
        assert!(ThermalModel::new(0.0, vec![1.0]).is_err());
        assert!(ThermalModel::new(1.0, vec![]).is_err());
        assert!(ThermalModel::new(1.0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn extreme_beta_stays_normalized() {
        let m = thermal_two_level(1e4, 100.0, 101.0).unwrap();
        assert_eq!(m.weights[0], 1.0);
        assert_eq!(m.weights[1], 0.0);
    }

    #[test]
    fn linear_spectrum_closed_forms() {
        let spec = LinearSpectrum::new(0.8, 0.3).unwrap();
        let beta = 1.7;
        let model = spec.model(beta, 400).unwrap();
        assert_relative_eq!(model.partition, spec.partition(beta), max_relative = 1e-13);
        for n in 0..10 {
            assert_relative_eq!(model.weights[n], spec.boltzmann_weight(beta, n), max_relative = 1e-13);
        }
    }

    fn two_level_ho(beta: f64) -> ThermalModel {
        LinearSpectrum::new(1.0, 0.5).unwrap().model(beta, 2).unwrap()
    }

    #[test]
    fn husimi_examples() {
        let table = StructureTable::build(&ModelParams::half_oscillator(), 5).unwrap();
        let m = two_level_ho(1.0);
        assert_eq!(husimi_q(&m, &table, 0.0, Normalization::Truncated).unwrap(), m.weights[0]);
        for x in [0.01, 0.5, 3.0, 250.0] {
            let e = [(-0.5f64).exp(), (-1.5f64).exp()];
            let expected = (e[0] + e[1] * (2.0 / 3.0) * x) / (m.partition * (1.0 + (2.0 / 3.0) * x));
            let q = husimi_q(&m, &table, x, Normalization::Truncated).unwrap();
            assert_relative_eq!(q, expected, max_relative = 1e-14);
        }
        let q_full = husimi_q(&m, &table, 0.5, Normalization::Full).unwrap();
        let q_trunc = husimi_q(&m, &table, 0.5, Normalization::Truncated).unwrap();
        assert!(q_full < q_trunc && q_full > 0.0);
    }

    #[test]
    fn husimi_positive_on_log_grid() {
        let table = StructureTable::build(&ModelParams::half_oscillator(), 1).unwrap();
        let m = two_level_ho(2.0);
        for i in 0..200 {
            let x = 10f64.powf(-3.0 + 6.0 * i as f64 / 199.0);
            assert!(husimi_q(&m, &table, x, Normalization::Truncated).unwrap() > 0.0);
        }
    }

    #[test]
    fn husimi_needs_enough_table() {
        let table = StructureTable::build(&ModelParams::canonical(), 1).unwrap();
        let m = LinearSpectrum::new(1.0, 0.0).unwrap().model(1.0, 5).unwrap();
        assert!(matches!(husimi_q(&m, &table, 1.0, Normalization::Truncated), Err(Error::Index { .. })));
    }

    #[test]
    fn p_function_catalog_oracles() {
        let spec = LinearSpectrum::new(1.0, 0.0).unwrap();
        for beta in [0.5, 1.0, 2.0] {
            let t: f64 = beta;
            for x in [0.01, 0.7, 4.0] {
                let exp_p = (t.exp() - 1.0) * (-(t.exp() - 1.0) * x).exp();
                let p = p_function_linear(&spec, beta, &ModelParams::canonical(), x).unwrap();
                assert_relative_eq!(p, exp_p, max_relative = 1e-13);
                let p = p_function_linear(&spec, beta, &ModelParams::half_oscillator(), x).unwrap();
                assert_relative_eq!(p, exp_p * (0.5 * t).exp(), max_relative = 1e-13);
            }
        }
        assert!(p_function_linear(&spec, 1.0, &ModelParams::canonical(), 0.0).is_err());
    }

    #[test]
    fn p_function_survives_weight_underflow() {
        // G(x) = e^{−x} underflows near x ≈ 745 but the ratio is analytic
        let spec = LinearSpectrum::new(1.0, 0.0).unwrap();
        let p = p_function_linear(&spec, 0.1, &ModelParams::canonical(), 2000.0).unwrap();
        let t: f64 = 0.1;
        assert_relative_eq!(p.ln(), t.exp_m1().ln() - t.exp_m1() * 2000.0, max_relative = 1e-12);
    }

    #[test]
    fn p_moments_examples() {
        let spec = LinearSpectrum::new(1.0, 0.5).unwrap();
        let r = verify_p_moments(&spec, 1.0, &ModelParams::canonical(), 0..=0, 1e-10).unwrap();
        assert_relative_eq!(r.rows[0].quadrature, 1.0 - (-1.0f64).exp(), max_relative = 1e-9);

        let beta = 0.7;
        let r = verify_p_moments(&spec, beta, &ModelParams::half_oscillator(), 0..=8, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        for row in &r.rows {
            let n = row.n as f64;
            let oracle = (1.0 - (-beta).exp()) * (-beta * n).exp() * ln_gamma(n + 1.5).exp();
            assert_relative_eq!(row.expected, oracle, max_relative = 1e-12);
        }
    }

    #[test]
    fn p_moments_mellin_barnes_route() {
        // the same identity with G evaluated by the contour integral
        let params = ModelParams::canonical();
        let mb = crate::specfun::MeasureWeight::new(params.clone()).unwrap();
        let spec = LinearSpectrum::new(1.0, 0.0).unwrap();
        let r = verify_p_moments_with(&spec, 1.0, &mb, &params, 0..=2, 1e-8).unwrap();
        assert!(r.max_rel_error < 1e-6, "{r:?}");
    }

    #[test]
    fn identity_resolution_examples() {
        let r = verify_identity_resolution(&ModelParams::canonical(), 0..=10, 1e-10).unwrap();
        assert!(r.passed && r.projector_sum_exact);
        let mut fact = 1.0;
        for row in &r.moments.rows {
            if row.n > 0 {
                fact *= row.n as f64;
            }
            assert_eq!(row.expected, fact);
        }
        let r = verify_identity_resolution(&ModelParams::half_oscillator(), 0..=10, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        for row in &r.moments.rows {
            let oracle = 2.0 / PI.sqrt() * ln_gamma(row.n as f64 + 1.5).exp();
            assert_relative_eq!(row.expected, oracle, max_relative = 1e-12);
        }
    }

    #[test]
    fn two_level_ho_examples() {
        let r = reproduce_two_level_ho(1.0, 1.0, 1e-10).unwrap();
        assert!(r.passed, "{r:?}");
        let e = std::f64::consts::E;
        assert_relative_eq!(r.direct[0], 1.0 / (1.0 + 1.0 / e), max_relative = 1e-14);
        assert_relative_eq!(r.direct[1], 1.0 / (1.0 + e), max_relative = 1e-14);
        assert!((r.gamma_check - 1.0).abs() <= 1e-12);
        for t in [0.5, 2.0] {
            assert!(reproduce_two_level_ho(t, 1.0, 1e-10).unwrap().passed);
        }
        let cold = reproduce_two_level_ho(60.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(cold.direct[0], 1.0, epsilon = 1e-15);
        assert!(cold.direct[1] < 1e-25);
    }

    #[test]
    fn qubit_examples() {
        let params = ModelParams::half_oscillator();
        let q =
            qubit_from_label(&params, &DiagonalLabel::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))).unwrap();
        assert_eq!(q[0], [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let norm = (5.0f64 / 3.0).sqrt();
        assert_relative_eq!(q[1][0].re, 1.0 / norm, max_relative = 1e-15);
        assert_relative_eq!(q[1][1].re, (2.0f64 / 3.0).sqrt() / norm, max_relative = 1e-15);
        let far =
            qubit_from_label(&params, &DiagonalLabel::new(Complex64::new(0.0, 1e8), Complex64::new(0.0, 0.0))).unwrap();
        assert!(far[0][0].norm() < 1e-7);
        assert_relative_eq!(far[0][1].im, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let half = thermal_two_level(1.0, 0.0, 0.0).unwrap();
        assert_eq!(entropy_closed(&half), LN_2);
        let pure = thermal_two_level(1.0, 0.0, 1e6).unwrap();
        assert_eq!(entropy_closed(&pure), 0.0);
        let m = thermal_two_level(1.0, 0.0, LN_2).unwrap();
        let expected = -(2.0 / 3.0 * (2.0f64 / 3.0).ln() + 1.0 / 3.0 * (1.0f64 / 3.0).ln());
        assert_relative_eq!(entropy_closed(&m), expected, max_relative = 1e-15);
        assert!((entropy_closed(&m) - 0.6365).abs() < 1e-4);
    }

    #[test]
    fn entropy_series_examples() {
        let m = thermal_two_level(1.0, 0.0, (0.6f64 / 0.4).ln()).unwrap();
        let s = entropy_series(&m, 100_000, 1e-10).unwrap();
        assert!((s - entropy_closed(&m)).abs() <= 1e-9);
        assert!((s - 0.6730).abs() < 1e-4);
        assert_eq!(log_series_slot(1.0, 10, 1e-12).unwrap(), (0.0, 1));
        assert!(matches!(log_series_slot(0.01, 10, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(log_series_slot(0.1, 5, 1e-12), Err(Error::NonConvergence { .. })));
        assert!(entropy_series(&thermal_two_level(1.0, 0.0, 1e6).unwrap(), 100, 1e-10).is_err());
    }

    #[test]
    fn entropy_matrix_elements() {
        let m = thermal_two_level(1.0, 0.0, 0.4).unwrap();
        let rho = Matrix2::new(m.weights[0], 0.0, 0.0, m.weights[1]);
        assert_eq!(rho[(0, 0)], m.weights[0]);
        let shifted = rho - Matrix2::identity();
        let mut power = Matrix2::<f64>::identity();
        for k in 1..8 {
            power *= shifted;
            for n in 0..2 {
                assert_relative_eq!(power[(n, n)], (m.weights[n] - 1.0).powi(k), max_relative = 1e-14);
            }
            assert_eq!(power[(0, 1)], 0.0);
        }
        let via_matrix = entropy_matrix_route(&m, 100_000, 1e-12).unwrap();
        assert!((via_matrix - entropy_closed(&m)).abs() < 1e-11);
    }

    #[test]
    fn entropy_registry() {
        let m = thermal_two_level(2.0, 0.0, 0.3).unwrap();
        let closed = entropy_method("closed").unwrap().entropy(&m).unwrap();
        let series = entropy_method("series").unwrap().entropy(&m).unwrap();
        assert!((closed - series).abs() < 1e-9);
        assert_eq!(entropy_method("series").unwrap().name(), "series");
        assert!(matches!(entropy_method("renyi"), Err(Error::Unknown { .. })));
    }

    #[test]
    fn expectations() {
        let m = thermal_two_level(1.2, 0.5, 1.5).unwrap();
        assert_relative_eq!(thermal_expectation(&m, &DiagonalObservable::identity()), 1.0, epsilon = 1e-15);
        assert_eq!(thermal_expectation(&m, &DiagonalObservable::number()), m.weights[1]);
        let energy = DiagonalObservable::new(vec![0.5, 1.0]);
        let mean = m.weights[0] * 0.5 + m.weights[1] * 1.5;
        assert_relative_eq!(thermal_expectation(&m, &energy), mean, max_relative = 1e-15);
    }

    proptest! {
        #[test]
        fn entropy_bounds(beta in 0.01f64..50.0, gap in 0.0f64..10.0) {
            let m = thermal_two_level(beta, 0.0, gap).unwrap();
            let s = entropy_closed(&m);
            prop_assert!((0.0..=LN_2 + 1e-15).contains(&s));
            prop_assert!((m.trace() - 1.0).abs() <= 1e-14);
            prop_assert!(m.weights[0] >= m.weights[1]);
        }
    }
}
