//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use amendart_core::{CouplingForm, RabiParams, Scenario};

use crate::error::{CliError, Result};

/// Every key accepted in a config file or as a `--key` flag.
pub const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "coupling",
    "cutoff",
    "out",
    "seed",
    "omega",
    "g",
    "kappa",
    "lambda",
    "gamma-rate",
    "gamma-ratio",
    "nbar",
    "omega-grid",
    "gamma-grid",
    "log10-kappa",
    "log10-lambda",
    "omega-list",
    "kappa-list",
    "n-traj",
    "t-max",
    "dt",
    "initial",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(RawConfig { values })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.into());
        Ok(())
    }

    /// Entries of `other` replace entries of `self`.
    pub fn merged(mut self, other: &RawConfig) -> Self {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        self.get(key).map_or(Ok(default), |v| parse_f64(key, v))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        self.get(key).map_or(Ok(default), |v| {
            v.parse()
                .map_err(|_| CliError::Config(format!("`{key}` expects an integer, got `{v}`")))
        })
    }

    pub fn grid_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        self.get(key).map_or(Ok(default.to_vec()), |v| parse_grid(key, v))
    }

    pub fn cutoffs_or(&self, default: &[usize]) -> Result<Vec<usize>> {
        let Some(v) = self.get("cutoff") else {
            return Ok(default.to_vec());
        };
        let list = v
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| CliError::Config(format!("`cutoff` expects integers, got `{v}`")))?;
        if list.is_empty() || list.contains(&0) {
            return Err(CliError::Config("cutoffs must be positive".into()));
        }
        Ok(list)
    }

    pub fn scenario_or(&self, default: Scenario) -> Result<Scenario> {
        self.get("scenario").map_or(Ok(default), |v| {
            v.parse()
                .map_err(|e: amendart_core::Error| CliError::Config(e.to_string()))
        })
    }

    pub fn coupling(&self) -> Result<CouplingForm> {
        self.get("coupling").map_or(Ok(CouplingForm::Full), |v| {
            v.parse()
                .map_err(|e: amendart_core::Error| CliError::Config(e.to_string()))
        })
    }

    /// Model parameters; `γ` comes from `gamma-rate` if given, otherwise
    /// `gamma-ratio · λ`.
    pub fn params(&self, defaults: RabiParams, default_ratio: f64) -> Result<RabiParams> {
        let lambda = self.f64_or("lambda", defaults.lambda)?;
        let gamma = match self.opt_f64("gamma-rate")? {
            Some(g) => g,
            None => self.f64_or("gamma-ratio", default_ratio)? * lambda,
        };
        let p = RabiParams {
            omega: self.f64_or("omega", defaults.omega)?,
            g: self.f64_or("g", defaults.g)?,
            kappa: self.f64_or("kappa", defaults.kappa)?,
            lambda,
            gamma,
            nbar: self.f64_or("nbar", defaults.nbar)?,
        };
        p.validate()?;
        Ok(p)
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("`{key}` expects a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("`{key}` must be finite")));
    }
    Ok(x)
}

/// `start:stop:count` (inclusive, evenly spaced) or a comma-separated list.
pub fn parse_grid(key: &str, v: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = v.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (parse_f64(key, start)?, parse_f64(key, stop)?);
            let n: usize = count
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("`{key}`: bad point count `{count}`")))?;
            match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        [_] => v.split(',').map(|s| parse_f64(key, s)).collect::<Result<Vec<_>>>()?,
        _ => {
            return Err(CliError::Config(format!(
                "`{key}`: expected `start:stop:count` or a list"
            )))
        }
    };
    if grid.is_empty() {
        return Err(CliError::Config(format!("`{key}` is empty")));
    }
    Ok(grid)
}
