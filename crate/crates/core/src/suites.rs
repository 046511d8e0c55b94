//! Named verification suites, looked up at runtime from a [`SuiteRegistry`].

use crate::specfun::ModelParams;
use crate::thermal::{
    entropy_closed, entropy_series, reproduce_two_level_ho, thermal_two_level, verify_identity_resolution,
    verify_p_moments, LinearSpectrum, MomentReport,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Named tolerances used by the suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance passed to the adaptive quadrature.
    pub quadrature: f64,
    /// Relative tolerance for moment identities.
    pub moment: f64,
    /// Entrywise tolerance for the two-level density reconstruction.
    pub two_level: f64,
    /// Absolute tolerance between entropy routes.
    pub entropy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { quadrature: 1e-10, moment: 1e-6, two_level: 1e-8, entropy: 1e-9 }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("quadrature", self.quadrature),
            ("moment", self.moment),
            ("two_level", self.two_level),
            ("entropy", self.entropy),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub params: ModelParams,
    pub beta: f64,
    pub hbar_omega: f64,
    pub e0: f64,
    pub tolerances: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::canonical(),
            beta: 1.0,
            hbar_omega: 1.0,
            e0: 0.5,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRecord {
    fn absolute(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let error = (value - expected).abs();
        Self { name: name.into(), value, expected, error, tolerance, passed: error <= tolerance }
    }

    fn relative(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let error = (value - expected).abs() / expected.abs();
        Self { name: name.into(), value, expected, error, tolerance, passed: error <= tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub max_error: f64,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    fn new(suite: &str, checks: Vec<CheckRecord>) -> Self {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        let max_error = checks.iter().map(|c| c.error).fold(0.0, f64::max);
        Self { suite: suite.to_string(), passed, max_error, checks }
    }
}

pub trait VerificationSuite: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, config: &SuiteConfig) -> Result<SuiteReport>;
}

fn moment_checks(prefix: &str, report: &MomentReport, tolerance: f64) -> Vec<CheckRecord> {
    report
        .rows
        .iter()
        .map(|r| CheckRecord::relative(format!("{prefix}[{}]", r.n), r.quadrature, r.expected, tolerance))
        .collect()
}

struct IdentitySuite;

impl VerificationSuite for IdentitySuite {
    fn name(&self) -> &'static str {
        "identity"
    }
    fn description(&self) -> &'static str {
        "Γ(a/b)·∫xⁿG(x)dx = ρ(n) for n = 0..10 and u₀ + u₁ = I"
    }
    fn run(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        let tol = &config.tolerances;
        let report = verify_identity_resolution(&config.params, 0..=10, tol.quadrature)?;
        let mut checks = moment_checks("moment", &report.moments, tol.moment);
        let exact = if report.projector_sum_exact { 1.0 } else { 0.0 };
        checks.push(CheckRecord::absolute("projector_sum", exact, 1.0, 0.0));
        Ok(SuiteReport::new(self.name(), checks))
    }
}

struct PMomentSuite;

impl VerificationSuite for PMomentSuite {
    fn name(&self) -> &'static str {
        "pmoments"
    }
    fn description(&self) -> &'static str {
        "∫P(x)G(x)xⁿdx = (e^{−βEₙ}/Z)ρ(n)/Γ(a/b) for n = 0..8"
    }
    fn run(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        let tol = &config.tolerances;
        let spec = LinearSpectrum::new(config.hbar_omega, config.e0)?;
        let report = verify_p_moments(&spec, config.beta, &config.params, 0..=8, tol.quadrature)?;
        Ok(SuiteReport::new(self.name(), moment_checks("p_moment", &report, tol.moment)))
    }
}

/// Ground-state weights on which the entropy routes are compared.
pub const ENTROPY_GRID: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];

struct EntropySuite;

impl VerificationSuite for EntropySuite {
    fn name(&self) -> &'static str {
        "entropy"
    }
    fn description(&self) -> &'static str {
        "closed-form vs log-series von Neumann entropy, plus the pure and maximally mixed limits"
    }
    fn run(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        let tol = config.tolerances.entropy;
        let series_tol = tol / 10.0;
        let mut models = Vec::new();
        for w0 in ENTROPY_GRID {
            // βΔ = ln(w₀/w₁) reproduces the requested weights
            models.push((format!("w0={w0}"), thermal_two_level(1.0, 0.0, (w0 / (1.0 - w0)).ln())?));
        }
        let e1 = config.e0 + config.hbar_omega;
        models.push(("config".to_string(), thermal_two_level(config.beta, config.e0, e1)?));

        let mut checks = Vec::new();
        for (label, model) in &models {
            let closed = entropy_closed(model);
            let series = entropy_series(model, 1_000_000, series_tol)?;
            checks.push(CheckRecord::absolute(format!("series_vs_closed[{label}]"), series, closed, tol));
        }
        let mixed = thermal_two_level(1.0, 0.0, 0.0)?;
        checks.push(CheckRecord::absolute("maximally_mixed", entropy_closed(&mixed), LN_2, 0.0));
        checks.push(CheckRecord::absolute(
            "maximally_mixed_series",
            entropy_series(&mixed, 1_000_000, series_tol)?,
            LN_2,
            tol,
        ));
        let pure = thermal_two_level(1.0, 0.0, 1e6)?;
        checks.push(CheckRecord::absolute("pure", entropy_closed(&pure), 0.0, 0.0));
        Ok(SuiteReport::new(self.name(), checks))
    }
}

struct TwoLevelSuite;

impl VerificationSuite for TwoLevelSuite {
    fn name(&self) -> &'static str {
        "twolevel"
    }
    fn description(&self) -> &'static str {
        "two-level oscillator density rebuilt from P moments equals the Boltzmann weights"
    }
    fn run(&self, config: &SuiteConfig) -> Result<SuiteReport> {
        let tol = config.tolerances.two_level;
        let r = reproduce_two_level_ho(config.beta, config.hbar_omega, config.tolerances.quadrature)?;
        let mut checks = Vec::new();
        for (route, weights) in [("direct", r.direct), ("reconstructed", r.reconstructed), ("quadrature", r.quadrature)]
        {
            for (n, (w, closed)) in weights.iter().zip(r.closed_form).enumerate() {
                checks.push(CheckRecord::absolute(format!("{route}[{n}]"), *w, closed, tol));
            }
        }
        checks.push(CheckRecord::absolute("gamma_factor", r.gamma_check, 1.0, 1e-12));
        Ok(SuiteReport::new(self.name(), checks))
    }
}

/// Suites by name; `all` runs every registered suite in order.
pub struct SuiteRegistry {
    suites: Vec<Box<dyn VerificationSuite>>,
}

impl SuiteRegistry {
    pub fn empty() -> Self {
        Self { suites: Vec::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(IdentitySuite));
        r.register(Box::new(PMomentSuite));
        r.register(Box::new(EntropySuite));
        r.register(Box::new(TwoLevelSuite));
        r
    }

    /// Adds a suite, replacing any suite already registered under its name.
    pub fn register(&mut self, suite: Box<dyn VerificationSuite>) {
        self.suites.retain(|s| s.name() != suite.name());
        self.suites.push(suite);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn VerificationSuite> {
        self.suites.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn run(&self, name: &str, config: &SuiteConfig) -> Result<Vec<SuiteReport>> {
        config.tolerances.validate()?;
        if name == "all" {
            return self.suites.iter().map(|s| s.run(config)).collect();
        }
        match self.get(name) {
            Some(s) => Ok(vec![s.run(config)?]),
            None => Err(Error::Unknown { kind: "verification suite", name: name.to_string() }),
        }
    }
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_and_lookup() {
        let r = SuiteRegistry::with_defaults();
        assert_eq!(r.names(), vec!["identity", "pmoments", "entropy", "twolevel"]);
        assert!(r.get("entropy").is_some());
        assert!(matches!(r.run("nope", &SuiteConfig::default()), Err(Error::Unknown { .. })));
    }

    #[test]
    fn identity_canonical() {
        let reports = SuiteRegistry::with_defaults().run("identity", &SuiteConfig::default()).unwrap();
        assert!(reports[0].passed);
        assert!(reports[0].max_error < 1e-6);
    }

    #[test]
    fn entropy_half_weights() {
        let report = &SuiteRegistry::with_defaults().run("entropy", &SuiteConfig::default()).unwrap()[0];
        assert!(report.passed, "{report:?}");
        let mixed = report.checks.iter().find(|c| c.name == "maximally_mixed").unwrap();
        assert_eq!(mixed.value, LN_2);
    }

    #[test]
    fn all_on_both_catalog_params() {
        for params in [ModelParams::canonical(), ModelParams::half_oscillator()] {
            let config = SuiteConfig { params, ..SuiteConfig::default() };
            let reports = SuiteRegistry::with_defaults().run("all", &config).unwrap();
            assert_eq!(reports.len(), 4);
            for r in &reports {
                assert!(r.passed, "{r:?}");
            }
        }
    }

    #[test]
    fn bad_tolerance_rejected() {
        let mut config = SuiteConfig::default();
        config.tolerances.moment = -1.0;
        assert!(matches!(SuiteRegistry::with_defaults().run("identity", &config), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn report_json_roundtrip() {
        let reports = SuiteRegistry::with_defaults().run("twolevel", &SuiteConfig::default()).unwrap();
        let text = serde_json::to_string(&reports).unwrap();
        let back: Vec<SuiteReport> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, reports);
    }

    #[test]
    fn custom_suite_registration() {
        struct Always;
        impl VerificationSuite for Always {
            fn name(&self) -> &'static str {
                "entropy"
            }
            fn description(&self) -> &'static str {
                "stub"
            }
            fn run(&self, _: &SuiteConfig) -> Result<SuiteReport> {
                Ok(SuiteReport::new("entropy", vec![CheckRecord::absolute("stub", 1.0, 1.0, 0.0)]))
            }
        }
        let mut r = SuiteRegistry::with_defaults();
        r.register(Box::new(Always));
        assert_eq!(r.names().len(), 4);
        assert_eq!(r.run("entropy", &SuiteConfig::default()).unwrap()[0].checks[0].name, "stub");
    }
}
