//! Scenario files: a TOML document with a model name, a flat `[parameters]`
//! table, optional `[tolerances]` and, for sweeps, a `[sweep]` table of axes.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use bubblelab_core::pricing::DEFAULT_MARGIN;
use serde::Deserialize;

use crate::error::{CliError, Result};

pub const DEFAULT_HORIZON: usize = 400;
pub const DEFAULT_RESIDUAL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    LogOlg,
    Wilson,
    BewleyMoney,
    BewleyGrowth,
    SaddleFundamental,
    SaddleBubbly,
    RegimeMap,
    TwoSector,
    FirmShares,
    Detect,
}

impl Model {
    pub fn as_str(&self) -> &'static str {
        match self {
            Model::LogOlg => "log_olg",
            Model::Wilson => "wilson",
            Model::BewleyMoney => "bewley_money",
            Model::BewleyGrowth => "bewley_growth",
            Model::SaddleFundamental => "saddle_fundamental",
            Model::SaddleBubbly => "saddle_bubbly",
            Model::RegimeMap => "regime_map",
            Model::TwoSector => "two_sector",
            Model::FirmShares => "firm_shares",
            Model::Detect => "detect",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Detector margin.
    pub margin: Option<f64>,
    /// Shooting tube radius.
    pub tube: Option<f64>,
    /// Largest acceptable equilibrium residual.
    pub residual: Option<f64>,
    /// Shooting date override.
    pub start: Option<usize>,
}

impl Tolerances {
    pub fn margin(&self) -> f64 {
        self.margin.unwrap_or(DEFAULT_MARGIN)
    }

    pub fn residual(&self) -> f64 {
        self.residual.unwrap_or(DEFAULT_RESIDUAL)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: Model,
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub parameters: toml::Table,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sweep: Option<toml::Table>,
    /// Directory against which relative paths resolve.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

impl ScenarioConfig {
    pub fn parse(text: &str, base_dir: &Path, default_id: &str) -> Result<Self> {
        let mut config: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        config.base_dir = base_dir.to_path_buf();
        if config.id.is_none() {
            config.id = Some(default_id.to_string());
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
        Self::parse(&text, &base, stem).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.horizon < 2 {
            return Err(CliError::Config(format!(
                "`horizon` must be at least 2, got {}",
                self.horizon
            )));
        }
        let id = self.id();
        if id.is_empty() || id.contains(['/', '\\']) || id == "." || id == ".." {
            return Err(CliError::Config(format!("`id` must be a plain name, got {id:?}")));
        }
        let t = &self.tolerances;
        if let Some(m) = t.margin {
            if !(0.0..1.0).contains(&m) {
                return Err(CliError::Config(format!(
                    "`tolerances.margin` must lie in [0, 1), got {m}"
                )));
            }
        }
        for (key, value) in [("tolerances.tube", t.tube), ("tolerances.residual", t.residual)] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Config(format!("`{key}` must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn id(&self) -> &str {
        self.id.as_deref().unwrap_or("scenario")
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Directory receiving this run's files.
    pub fn run_dir(&self) -> PathBuf {
        let root = self.output.as_deref().unwrap_or(Path::new("out"));
        self.resolve(root).join(self.id())
    }

    pub fn params(&self) -> Params<'_> {
        Params {
            table: &self.parameters,
            used: RefCell::new(BTreeSet::new()),
        }
    }
}

/// Typed access to `[parameters]` that remembers which keys were read, so
/// that leftovers can be rejected.
pub struct Params<'a> {
    table: &'a toml::Table,
    used: RefCell<BTreeSet<String>>,
}

impl Params<'_> {
    fn get(&self, key: &str) -> Option<&toml::Value> {
        self.used.borrow_mut().insert(key.to_string());
        self.table.get(key)
    }

    pub fn number(&self, key: &str) -> Result<f64> {
        match self.get(key) {
            None => Err(CliError::Config(format!("missing parameter `{key}`"))),
            Some(v) => as_number(key, v),
        }
    }

    pub fn number_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => as_number(key, v),
        }
    }

    pub fn string(&self, key: &str) -> Result<String> {
        match self.get(key) {
            None => Err(CliError::Config(format!("missing parameter `{key}`"))),
            Some(toml::Value::String(s)) => Ok(s.clone()),
            Some(_) => Err(CliError::Config(format!("parameter `{key}` must be a string"))),
        }
    }

    pub fn optional_string(&self, key: &str) -> Result<Option<String>> {
        if self.table.contains_key(key) {
            self.string(key).map(Some)
        } else {
            self.used.borrow_mut().insert(key.to_string());
            Ok(None)
        }
    }

    /// Fails on any parameter the model did not read.
    pub fn finish(self) -> Result<()> {
        let used = self.used.into_inner();
        match self.table.keys().find(|k| !used.contains(*k)) {
            Some(k) => Err(CliError::Config(format!("unknown parameter `{k}`"))),
            None => Ok(()),
        }
    }
}

fn as_number(key: &str, v: &toml::Value) -> Result<f64> {
    let x = match v {
        toml::Value::Float(f) => *f,
        toml::Value::Integer(i) => *i as f64,
        _ => return Err(CliError::Config(format!("parameter `{key}` must be a number"))),
    };
    if !x.is_finite() {
        return Err(CliError::Config(format!("parameter `{key}` must be finite")));
    }
    Ok(x)
}
