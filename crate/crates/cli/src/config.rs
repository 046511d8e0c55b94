//! Run configuration: a JSON file with optional command-line overrides.

use crate::error::CliError;
use hypercs_core::matrixstates::DiagonalLabel;
use hypercs_core::specfun::ModelParams;
use hypercs_core::suites::{SuiteConfig, Tolerances};
use hypercs_core::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// Label of the state: `z` alone gives a scalar state, `z` with `sigma` the
/// two-slot label z·u₀ + σ·u₁.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelConfig {
    pub z: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<[f64; 2]>,
}

impl Default for LabelConfig {
    fn default() -> Self {
        Self { z: [0.0, 0.0], sigma: None }
    }
}

impl LabelConfig {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.z[0], self.z[1])
    }

    pub fn sigma(&self) -> Option<Complex64> {
        self.sigma.map(|s| Complex64::new(s[0], s[1]))
    }

    pub fn diagonal(&self) -> DiagonalLabel {
        DiagonalLabel::new(self.z(), self.sigma().unwrap_or_default())
    }
}

/// Log-spaced sampling grid for `distributions`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { min: 1e-3, max: 1e3, points: 200 }
    }
}

impl GridConfig {
    pub fn samples(&self) -> Result<Vec<f64>, CliError> {
        if self.points == 0 {
            return Err(CliError::Usage("grid has no points".into()));
        }
        if !(self.min > 0.0 && self.max >= self.min && self.max.is_finite()) {
            return Err(CliError::Usage(format!("grid needs 0 < min ≤ max, got [{}, {}]", self.min, self.max)));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let (lo, hi) = (self.min.ln(), self.max.ln());
        let step = (hi - lo) / (self.points - 1) as f64;
        let mut xs: Vec<f64> = (0..self.points).map(|i| (lo + step * i as f64).exp()).collect();
        xs[0] = self.min;
        xs[self.points - 1] = self.max;
        Ok(xs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ModelParams,
    pub n_max: usize,
    pub beta: f64,
    pub hbar_omega: f64,
    pub e0: f64,
    pub label: LabelConfig,
    pub tolerances: Tolerances,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub truncate_norm: bool,
    pub grid: GridConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::canonical(),
            n_max: 20,
            beta: 1.0,
            hbar_omega: 1.0,
            e0: 0.5,
            label: LabelConfig::default(),
            tolerances: Tolerances::default(),
            output_path: None,
            format: Format::Json,
            truncate_norm: true,
            grid: GridConfig::default(),
        }
    }
}

/// Values given on the command line; each one that is set wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub params_a: Option<Vec<f64>>,
    pub params_b: Option<Vec<f64>>,
    pub n_max: Option<usize>,
    pub beta: Option<f64>,
    pub hbar_omega: Option<f64>,
    pub e0: Option<f64>,
    pub z: Option<[f64; 2]>,
    pub sigma: Option<[f64; 2]>,
    pub tol: Vec<(String, f64)>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub truncate_norm: Option<bool>,
    pub grid_points: Option<usize>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn resolve(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut config = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        config.apply(overrides)?;
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if o.params_a.is_some() || o.params_b.is_some() {
            let a = o.params_a.clone().unwrap_or_else(|| self.params.upper().to_vec());
            let b = o.params_b.clone().unwrap_or_else(|| self.params.lower().to_vec());
            self.params = ModelParams::new(a, b).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        if let Some(v) = o.n_max {
            self.n_max = v;
        }
        if let Some(v) = o.beta {
            self.beta = v;
        }
        if let Some(v) = o.hbar_omega {
            self.hbar_omega = v;
        }
        if let Some(v) = o.e0 {
            self.e0 = v;
        }
        if let Some(v) = o.z {
            self.label.z = v;
        }
        if let Some(v) = o.sigma {
            self.label.sigma = Some(v);
        }
        for (name, value) in &o.tol {
            let slot = match name.as_str() {
                "quadrature" => &mut self.tolerances.quadrature,
                "moment" => &mut self.tolerances.moment,
                "two_level" => &mut self.tolerances.two_level,
                "entropy" => &mut self.tolerances.entropy,
                other => return Err(CliError::Usage(format!("unknown tolerance '{other}'"))),
            };
            *slot = *value;
        }
        if let Some(v) = &o.out {
            self.output_path = Some(v.clone());
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        if let Some(v) = o.truncate_norm {
            self.truncate_norm = v;
        }
        if let Some(v) = o.grid_points {
            self.grid.points = v;
        }
        if let Some(v) = o.grid_min {
            self.grid.min = v;
        }
        if let Some(v) = o.grid_max {
            self.grid.max = v;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_max < 1 {
            return Err(CliError::Config("n_max must be at least 1".into()));
        }
        for (name, v) in [("beta", self.beta), ("hbar_omega", self.hbar_omega)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CliError::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !self.e0.is_finite() {
            return Err(CliError::Config(format!("e0 must be finite, got {}", self.e0)));
        }
        let label = self.label.z.iter().chain(self.label.sigma.iter().flatten());
        if label.into_iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config("label components must be finite".into()));
        }
        self.tolerances.validate().map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            params: self.params.clone(),
            beta: self.beta,
            hbar_omega: self.hbar_omega,
            e0: self.e0,
            tolerances: self.tolerances,
        }
    }
}

/// `1,1.5` → [1.0, 1.5]; the empty string is the empty list.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect()
}

/// `re,im` → [re, im].
pub fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    match parse_list(s)?.as_slice() {
        [re, im] => Ok([*re, *im]),
        [re] => Ok([*re, 0.0]),
        _ => Err(format!("expected 're,im', got '{s}'")),
    }
}

/// `name=value`.
pub fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let value = value.trim().parse::<f64>().map_err(|e| format!("'{value}': {e}"))?;
    Ok((name.trim().to_string(), value))
}
