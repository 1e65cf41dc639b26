//! Flag and config-file resolution.
//!
//! Every physical flag is optional on the command line; an optional
//! `key=value` config file supplies fallback values, and built-in defaults
//! close the gaps. Command-line flags always win. The fully resolved
//! configuration is echoed into the metadata sidecar of every run.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fermitherm_core::{ModelParams, QuadConfig};
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Axis specification `min:max:points[:lin|log]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                if self.log {
                    self.min * (self.max / self.min).powf(s)
                } else {
                    self.min + (self.max - self.min) * s
                }
            })
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(err(format!("grid '{s}' must be min:max:points[:lin|log]")));
        }
        let min: f64 = parts[0]
            .parse()
            .map_err(|_| err(format!("grid '{s}': bad min")))?;
        let max: f64 = parts[1]
            .parse()
            .map_err(|_| err(format!("grid '{s}': bad max")))?;
        let points: usize = parts[2]
            .parse()
            .map_err(|_| err(format!("grid '{s}': bad point count")))?;
        let log = match parts.get(3).copied().unwrap_or("lin") {
            "lin" => false,
            "log" => true,
            other => return Err(err(format!("grid '{s}': unknown scale '{other}'"))),
        };
        if points < 2 {
            return Err(err(format!("grid '{s}': needs at least 2 points")));
        }
        if min >= max {
            return Err(err(format!("grid '{s}': min must be < max")));
        }
        if log && min <= 0.0 {
            return Err(err(format!("grid '{s}': log grids require min > 0")));
        }
        Ok(GridSpec {
            min,
            max,
            points,
            log,
        })
    }
}

/// Output format of the data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Fully resolved run configuration (flags over config file over
/// defaults); serialised verbatim into the metadata sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub epsilon: f64,
    pub epsilons: Option<Vec<f64>>,
    pub mu: f64,
    pub gamma: f64,
    pub temperature: f64,
    pub p0: f64,
    pub t_grid: Option<GridSpec>,
    pub gamma_grid: Option<GridSpec>,
    pub temperature_grid: Option<GridSpec>,
    pub steady: bool,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub jobs: usize,
}

impl RunConfig {
    pub fn quad(&self) -> QuadConfig {
        QuadConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..QuadConfig::default()
        }
    }

    /// Single-mode parameter record at the configured operating point.
    pub fn single_params(&self) -> Result<ModelParams, ConfigError> {
        ModelParams::single(self.epsilon, self.mu, self.gamma, self.temperature, self.p0)
            .map_err(|e| err(e.to_string()))
    }

    /// Like [`single_params`](Self::single_params) with coupling and
    /// temperature overridden (sweep cells).
    pub fn single_params_at(
        &self,
        gamma: f64,
        temperature: f64,
    ) -> Result<ModelParams, ConfigError> {
        ModelParams::single(self.epsilon, self.mu, gamma, temperature, self.p0)
            .map_err(|e| err(e.to_string()))
    }

    /// Two-mode record for the additivity commands. The default gap
    /// convention is `eps1 = mu`, `eps2 = mu + 1`.
    pub fn pair_params(&self) -> Result<ModelParams, ConfigError> {
        let eps = match &self.epsilons {
            Some(e) if e.len() == 2 => e.clone(),
            Some(_) => return Err(err("--epsilons must list exactly two energies")),
            None => vec![self.mu, self.mu + 1.0],
        };
        ModelParams::new(eps, self.mu, self.gamma, self.temperature, vec![self.p0; 2])
            .map_err(|e| err(e.to_string()))
    }

    pub fn pair_params_at(&self, gamma: f64, temperature: f64) -> Result<ModelParams, ConfigError> {
        let eps = match &self.epsilons {
            Some(e) if e.len() == 2 => e.clone(),
            Some(_) => return Err(err("--epsilons must list exactly two energies")),
            None => vec![self.mu, self.mu + 1.0],
        };
        ModelParams::new(eps, self.mu, gamma, temperature, vec![self.p0; 2])
            .map_err(|e| err(e.to_string()))
    }
}

/// Plain-text `key=value` fallback file ('#' starts a comment line).
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("config line {} is not key=value", lineno + 1)))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Resolves one value: flag wins, then the config file, then the default.
pub fn resolve<T: FromStr>(
    flag: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse()
            .map_err(|e| err(format!("config key '{key}': {e}"))),
        None => Ok(default),
    }
}

pub fn resolve_opt<T: FromStr>(
    flag: Option<T>,
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| err(format!("config key '{key}': {e}"))),
        None => Ok(None),
    }
}

/// Comma-separated energy list for `--epsilons`.
#[derive(Debug, Clone)]
pub struct EnergyList(pub Vec<f64>);

impl FromStr for EnergyList {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let vals: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
        vals.map(EnergyList)
            .map_err(|e| err(format!("--epsilons '{s}': {e}")))
    }
}
