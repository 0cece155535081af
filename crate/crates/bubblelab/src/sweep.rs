//! Cross-product sweeps. Cells run concurrently and write into their own
//! directories; aggregation happens afterwards on one thread.

use std::path::PathBuf;

use rayon::prelude::*;

use crate::config::{Model, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::scenario::{run_scenario, RunReport};
use crate::table::{num, write_csv};

pub const THREADS_VAR: &str = "BUBBLELAB_THREADS";
pub const CELLS_FILE: &str = "cells.csv";
pub const VERDICTS_FILE: &str = "verdicts.csv";
pub const VERDICTS_HEADER: [&str; 6] = ["GK", "GL", "GX", "sigma", "analytic", "numeric"];

type CellPlan = (String, Vec<(String, f64)>, ScenarioConfig);

#[derive(Debug)]
pub struct SweepCell {
    pub name: String,
    pub axes: Vec<(String, f64)>,
    pub config: ScenarioConfig,
    pub outcome: Result<RunReport>,
}

impl SweepCell {
    pub fn error(&self) -> Option<CliError> {
        match &self.outcome {
            Err(e) => Some(e.in_cell(&self.name)),
            Ok(report) if !report.passed() => Some(CliError::Residual(report.failures.join("; ")).in_cell(&self.name)),
            Ok(_) => None,
        }
    }
}

#[derive(Debug)]
pub struct SweepReport {
    pub id: String,
    pub dir: PathBuf,
    pub axes: Vec<String>,
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn failed(&self) -> usize {
        self.cells.iter().filter(|c| c.error().is_some()).count()
    }

    /// First failing cell, in grid order.
    pub fn first_error(&self) -> Option<CliError> {
        self.cells.iter().find_map(SweepCell::error)
    }
}

/// Parallelism cap from the environment, if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_VAR} must be a positive integer, got {s:?}"
            ))),
        },
        Err(e) => Err(CliError::Config(format!("{THREADS_VAR}: {e}"))),
    }
}

fn axes(config: &ScenarioConfig) -> Result<Vec<(String, Vec<f64>)>> {
    let table = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("missing `[sweep]` table".into()))?;
    if table.is_empty() {
        return Err(CliError::Config("`[sweep]` has no axes".into()));
    }
    let mut out = Vec::new();
    for (key, value) in table {
        let items = match value {
            toml::Value::Array(items) => items.clone(),
            single => vec![single.clone()],
        };
        if items.is_empty() {
            return Err(CliError::Config(format!("sweep axis `{key}` is empty")));
        }
        let mut values = Vec::with_capacity(items.len());
        for item in items {
            let x = match item {
                toml::Value::Float(f) => f,
                toml::Value::Integer(i) => i as f64,
                _ => return Err(CliError::Config(format!("sweep axis `{key}` must hold numbers"))),
            };
            if !x.is_finite() {
                return Err(CliError::Config(format!("sweep axis `{key}` holds a non-finite value")));
            }
            values.push(x);
        }
        out.push((key.clone(), values));
    }
    Ok(out)
}

/// Cross product in row-major order over the axes (sorted by name).
fn grid(axes: &[(String, Vec<f64>)]) -> Vec<Vec<(String, f64)>> {
    let mut cells = vec![Vec::new()];
    for (key, values) in axes {
        cells = cells
            .into_iter()
            .flat_map(|cell| {
                values.iter().map(move |&v| {
                    let mut next = cell.clone();
                    next.push((key.clone(), v));
                    next
                })
            })
            .collect();
    }
    cells
}

pub fn sweep(config: &ScenarioConfig, threads: Option<usize>) -> Result<SweepReport> {
    let axes = axes(config)?;
    let dir = config.run_dir();
    let cells_dir = dir.join("cells");
    let width = grid(&axes).len().saturating_sub(1).to_string().len().max(4);

    let configs: Vec<CellPlan> = grid(&axes)
        .into_iter()
        .enumerate()
        .map(|(i, point)| {
            let mut cell = config.clone();
            cell.sweep = None;
            cell.id = Some(format!("cell-{i:0width$}"));
            cell.output = Some(cells_dir.clone());
            for (key, value) in &point {
                cell.parameters.insert(key.clone(), toml::Value::Float(*value));
            }
            (cell.id().to_string(), point, cell)
        })
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<RunReport>> =
        pool.install(|| configs.par_iter().map(|(_, _, cell)| run_scenario(cell)).collect());

    let cells: Vec<SweepCell> = configs
        .into_iter()
        .zip(outcomes)
        .map(|((name, axes, config), outcome)| SweepCell {
            name,
            axes,
            config,
            outcome,
        })
        .collect();
    let report = SweepReport {
        id: config.id().to_string(),
        dir,
        axes: axes.into_iter().map(|(k, _)| k).collect(),
        cells,
    };
    aggregate(&report, config.model)?;
    Ok(report)
}

fn aggregate(report: &SweepReport, model: Model) -> Result<()> {
    let mut header: Vec<&str> = vec!["cell"];
    header.extend(report.axes.iter().map(String::as_str));
    header.extend(["status", "verdict", "error"]);
    let rows = report.cells.iter().map(|cell| {
        let mut row = vec![cell.name.clone()];
        row.extend(cell.axes.iter().map(|(_, v)| num(*v)));
        match &cell.outcome {
            Ok(r) => {
                row.push(if r.passed() { "ok" } else { "FAILED" }.to_string());
                row.push(r.verdict().unwrap_or("").to_string());
                row.push(r.failures.join("; "));
            }
            Err(e) => {
                row.push(e.category().to_string());
                row.push(String::new());
                row.push(e.to_string());
            }
        }
        row
    });
    write_csv(&report.dir.join(CELLS_FILE), &header, rows)?;

    if model == Model::TwoSector {
        let rows = report.cells.iter().map(|cell| {
            let p = &cell.config.parameters;
            let value = |k: &str| match p.get(k) {
                Some(toml::Value::Float(f)) => num(*f),
                Some(toml::Value::Integer(i)) => num(*i as f64),
                _ => String::new(),
            };
            let mut row: Vec<String> = VERDICTS_HEADER[..4].iter().map(|k| value(k)).collect();
            match &cell.outcome {
                Ok(r) => {
                    row.push(r.get("analytic").unwrap_or("").to_string());
                    row.push(r.verdict().unwrap_or("").to_string());
                }
                Err(e) => {
                    row.push("Error".to_string());
                    row.push(e.category().to_string());
                }
            }
            row
        });
        write_csv(&report.dir.join(VERDICTS_FILE), &VERDICTS_HEADER, rows)?;
    }
    Ok(())
}
