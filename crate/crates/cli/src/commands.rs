//! The four subcommands. Each returns a serializable report plus the
//! pass/fail verdict that decides the exit code.

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use hypercs_core::algebra::StructureTable;
use hypercs_core::specfun::{weight_strategy, ModelParams};
use hypercs_core::states::make_state;
use hypercs_core::suites::{SuiteRegistry, SuiteReport};
use hypercs_core::thermal::{husimi_q, p_function_linear_with, LinearSpectrum, Normalization};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureRow {
    pub n: usize,
    /// `None` when e(0) has no finite limit.
    pub e: Option<f64>,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub params: ModelParams,
    pub n_max: usize,
    pub gamma_ratio: f64,
    pub rows: Vec<StructureRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRow {
    pub slot: usize,
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub params: ModelParams,
    pub n_max: usize,
    /// Slot labels [re, im]; one entry for a scalar label, two for z·u₀ + σ·u₁.
    pub labels: Vec<[f64; 2]>,
    pub norm_fn: Vec<f64>,
    pub rows: Vec<StateRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub x: f64,
    pub q: f64,
    /// `None` where the weight ratio is not representable.
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub params: ModelParams,
    pub beta: f64,
    pub hbar_omega: f64,
    pub e0: f64,
    pub levels: usize,
    pub normalization: Normalization,
    pub rows: Vec<DistributionRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Anything a subcommand can emit.
pub trait Report: Serialize {
    fn passed(&self) -> bool {
        true
    }
    fn summary(&self) -> String;
    fn csv(&self) -> String;
}

/// Round-trip decimal: 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    // writing to a Vec cannot fail
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(&row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv fields are utf-8")
}

impl Report for StructureReport {
    fn summary(&self) -> String {
        format!("structure: {} rows, Γ(a/b) = {}", self.rows.len(), self.gamma_ratio)
    }
    fn csv(&self) -> String {
        let rows = self.rows.iter().map(|r| vec![r.n.to_string(), r.e.map(num).unwrap_or_default(), num(r.rho)]);
        csv_table(&["n", "e", "rho"], rows)
    }
}

impl Report for StateReport {
    fn summary(&self) -> String {
        format!("state: {} slot(s), {} non-zero coefficients", self.labels.len(), self.rows.len())
    }
    fn csv(&self) -> String {
        let rows =
            self.rows.iter().map(|r| vec![r.slot.to_string(), r.n.to_string(), num(r.re), num(r.im), num(r.prob)]);
        csv_table(&["slot", "n", "re", "im", "prob"], rows)
    }
}

impl Report for DistributionReport {
    fn summary(&self) -> String {
        let q_min = self.rows.iter().map(|r| r.q).fold(f64::INFINITY, f64::min);
        let missing = self.rows.iter().filter(|r| r.p.is_none()).count();
        format!("distributions: {} points, min Q = {q_min:e}, {missing} P values unrepresentable", self.rows.len())
    }
    fn csv(&self) -> String {
        let rows = self.rows.iter().map(|r| vec![num(r.x), num(r.q), r.p.map(num).unwrap_or_default()]);
        csv_table(&["x", "q", "p"], rows)
    }
}

impl Report for VerifyReport {
    fn passed(&self) -> bool {
        self.passed
    }
    fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let verdict = if s.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "[{verdict}] {:<9} max error {:.3e} over {} checks",
                s.suite,
                s.max_error,
                s.checks.len()
            );
            for c in s.checks.iter().filter(|c| !c.passed) {
                let _ = writeln!(
                    out,
                    "       {} = {} (expected {}, error {:e} > {:e})",
                    c.name, c.value, c.expected, c.error, c.tolerance
                );
            }
        }
        out.push_str(if self.passed { "all suites passed" } else { "verification FAILED" });
        out
    }
    fn csv(&self) -> String {
        let rows = self.suites.iter().flat_map(|s| {
            s.checks.iter().map(move |c| {
                vec![
                    s.suite.clone(),
                    c.name.clone(),
                    num(c.value),
                    num(c.expected),
                    num(c.error),
                    num(c.tolerance),
                    c.passed.to_string(),
                ]
            })
        });
        csv_table(&["suite", "check", "value", "expected", "error", "tolerance", "passed"], rows)
    }
}

pub fn render(report: &impl Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(report.csv()),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Config(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

pub fn cmd_structure(config: &RunConfig) -> Result<StructureReport, CliError> {
    let table = StructureTable::build(&config.params, config.n_max)?;
    let rows = (0..=config.n_max)
        .map(|n| {
            let e = table.e()[n];
            StructureRow { n, e: e.is_finite().then_some(e), rho: table.rho()[n] }
        })
        .collect();
    Ok(StructureReport { params: config.params.clone(), n_max: config.n_max, gamma_ratio: table.gamma_ratio(), rows })
}

pub fn cmd_state(config: &RunConfig) -> Result<StateReport, CliError> {
    let table = Arc::new(StructureTable::build(&config.params, config.n_max)?);
    let mut labels = vec![config.label.z()];
    labels.extend(config.label.sigma());
    let mut rows = Vec::new();
    let mut norm_fn = Vec::new();
    for (slot, z) in labels.iter().enumerate() {
        let state = make_state(&table, *z, config.n_max)?;
        norm_fn.push(state.norm_fn());
        for (n, c) in state.coeffs().iter().enumerate() {
            let prob = c.norm_sqr();
            if prob != 0.0 {
                rows.push(StateRow { slot, n, re: c.re, im: c.im, prob });
            }
        }
    }
    Ok(StateReport {
        params: config.params.clone(),
        n_max: config.n_max,
        labels: labels.iter().map(|z| [z.re, z.im]).collect(),
        norm_fn,
        rows,
    })
}

pub fn cmd_verify(config: &RunConfig, suite: &str) -> Result<VerifyReport, CliError> {
    let registry = SuiteRegistry::with_defaults();
    if suite != "all" && registry.get(suite).is_none() {
        return Err(CliError::Usage(format!("unknown suite '{suite}'; expected one of {:?} or all", registry.names())));
    }
    let suites = registry.run(suite, &config.suite_config())?;
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyReport { passed, suites })
}

/// Q on `n_max + 1` levels of the linear spectrum, and P of the full ladder.
pub fn cmd_distributions(config: &RunConfig) -> Result<DistributionReport, CliError> {
    let grid = config.grid.samples()?;
    let spec = LinearSpectrum::new(config.hbar_omega, config.e0)?;
    let levels = config.n_max + 1;
    let model = spec.model(config.beta, levels)?;
    let table = StructureTable::build(&config.params, config.n_max)?;
    let weight = weight_strategy("auto", &config.params)?;
    let normalization = if config.truncate_norm { Normalization::Truncated } else { Normalization::Full };
    let mut rows = Vec::with_capacity(grid.len());
    for x in grid {
        let q = husimi_q(&model, &table, x, normalization)?;
        let p = match p_function_linear_with(&spec, config.beta, weight.as_ref(), x) {
            Ok(p) => Some(p),
            Err(hypercs_core::Error::Overflow(msg)) => {
                log::debug!("P({x}) not representable: {msg}");
                None
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(DistributionRow { x, q, p });
    }
    Ok(DistributionReport {
        params: config.params.clone(),
        beta: config.beta,
        hbar_omega: config.hbar_omega,
        e0: config.e0,
        levels,
        normalization,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypercs_core::specfun::ModelParams;

    #[test]
    fn structure_canonical() {
        let c = RunConfig { n_max: 5, ..RunConfig::default() };
        let r = cmd_structure(&c).unwrap();
        let rho: Vec<f64> = r.rows.iter().map(|r| r.rho).collect();
        assert_eq!(rho, vec![1.0, 1.0, 2.0, 6.0, 24.0, 120.0]);
        assert!(r.csv().starts_with("n,e,rho\n0,"));
    }

    #[test]
    fn state_vacuum_single_row() {
        let r = cmd_state(&RunConfig::default()).unwrap();
        assert_eq!(r.rows, vec![StateRow { slot: 0, n: 0, re: 1.0, im: 0.0, prob: 1.0 }]);
    }

    #[test]
    fn state_two_level() {
        let mut c = RunConfig { params: ModelParams::half_oscillator(), n_max: 1, ..RunConfig::default() };
        c.label.z = [1.0, 0.0];
        let r = cmd_state(&c).unwrap();
        assert!((r.rows[0].prob - 0.6).abs() < 1e-15);
        assert!((r.rows[1].prob - 0.4).abs() < 1e-15);
    }

    #[test]
    fn csv_is_round_trip_decimal() {
        let v = 0.1f64 + 0.2;
        assert_eq!(num(v).parse::<f64>().unwrap(), v);
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }
}
