//! One scenario: dispatch to the solver for the configured model, collect
//! summary scalars and residual checks, and write the CSV artifacts.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use bubblelab_core::closed_form::{
    solve_bewley_growth, solve_bewley_money, solve_log_olg, solve_wilson, BewleySpec, OlgEquilibrium, WilsonSpec,
};
use bubblelab_core::pricing::{classify_firm_bubbles, detect_bubble, firm_accounting, ladder_from_rates};
use bubblelab_core::saddle::{regime_row, stable_path, DetrendedSystem, ShootingConfig, Variant};
use bubblelab_core::stock_land::{
    classify_simulation, decompose_bubble, simulate_aggregate, AnalyticVerdict, TwoSectorEconomy,
};
use bubblelab_core::{BubbleVerdict, CrraUtility, GrowthEconomy, TrendedPath, UtilityKernel};
use rayon::prelude::*;

use crate::config::{Model, Params, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::table::{num, read_column, write_csv, write_record};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const PRICES_FILE: &str = "prices.csv";
pub const DIVIDENDS_FILE: &str = "dividends.csv";

#[derive(Debug, Clone)]
pub struct RunReport {
    pub id: String,
    pub model: Model,
    pub dir: PathBuf,
    /// Ordered `key,value` pairs, as written to the summary file.
    pub summary: Vec<(String, String)>,
    /// Files written, relative to `dir`, summary last.
    pub files: Vec<String>,
    /// Residual checks that exceeded their tolerance.
    pub failures: Vec<String>,
    /// Not written anywhere, so that outputs stay reproducible.
    pub elapsed: Duration,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn verdict(&self) -> Option<&str> {
        self.get("verdict")
    }

    /// Exit code 4 with the failed checks, if any.
    pub fn into_result(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(CliError::Residual(format!("{}: {}", self.id, self.failures.join("; "))))
        }
    }
}

struct Table {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Accumulates everything a model produces before anything touches disk.
#[derive(Default)]
struct Collector {
    summary: Vec<(String, String)>,
    tables: Vec<Table>,
    failures: Vec<String>,
    tolerance: f64,
}

impl Collector {
    fn text(&mut self, key: &str, value: impl Display) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn num(&mut self, key: &str, value: f64) {
        self.summary.push((key.to_string(), num(value)));
    }

    fn verdict(&mut self, prefix: &str, v: &BubbleVerdict) {
        let key = |s: &str| {
            if prefix.is_empty() {
                s.to_string()
            } else {
                format!("{prefix}_{s}")
            }
        };
        self.text(&key("verdict"), v.class);
        self.num(&key("partial_sum"), v.partial_sum);
        self.num(&key("tail_ratio"), v.tail_ratio);
        self.num(&key("tail_bound"), v.tail_bound);
        self.num(&key("decay_exponent"), v.decay_exponent);
    }

    /// Records a residual and fails the run when it exceeds the tolerance.
    fn residual(&mut self, key: &str, value: f64) {
        self.num(key, value);
        if !(value <= self.tolerance) {
            self.failures
                .push(format!("{key} = {value:e} exceeds {:e}", self.tolerance));
        }
    }

    fn require(&mut self, key: &str, ok: bool) {
        self.text(key, ok);
        if !ok {
            self.failures.push(format!("{key} is false"));
        }
    }

    fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) {
        self.tables.push(Table {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        });
    }

    fn series(&mut self, name: &str, values: &[f64]) {
        let rows = values
            .iter()
            .enumerate()
            .map(|(t, v)| vec![t.to_string(), num(*v)])
            .collect();
        self.table(name, &["t", "value"], rows);
    }

    fn price_pair(&mut self, prices: &TrendedPath, dividends: &TrendedPath) {
        self.series(PRICES_FILE, &prices.values());
        self.series(DIVIDENDS_FILE, &dividends.values());
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<RunReport> {
    let started = Instant::now();
    let mut out = Collector {
        tolerance: config.tolerances.residual(),
        ..Collector::default()
    };
    out.text("model", config.model);
    out.text("horizon", config.horizon);
    let params = config.params();
    match config.model {
        Model::LogOlg => log_olg(config, &params, &mut out)?,
        Model::Wilson => wilson(config, &params, &mut out)?,
        Model::BewleyMoney => bewley_money(config, &params, &mut out)?,
        Model::BewleyGrowth => bewley_growth(config, &params, &mut out)?,
        Model::SaddleFundamental => saddle(config, &params, Variant::Fundamental, &mut out)?,
        Model::SaddleBubbly => saddle(config, &params, Variant::Bubbly, &mut out)?,
        Model::RegimeMap => regime_map(&params, &mut out)?,
        Model::TwoSector => two_sector(config, &params, &mut out)?,
        Model::FirmShares => firm_shares(config, &params, &mut out)?,
        Model::Detect => detect(config, &params, &mut out)?,
    }
    params.finish()?;

    let status = if out.failures.is_empty() { "ok" } else { "FAILED" };
    out.text("status", status);
    for (i, failure) in out.failures.clone().iter().enumerate() {
        out.text(&format!("failure_{i}"), failure);
    }

    let dir = config.run_dir();
    let mut files = Vec::new();
    for table in &out.tables {
        let header: Vec<&str> = table.header.iter().map(String::as_str).collect();
        write_csv(&dir.join(&table.name), &header, table.rows.iter().cloned())?;
        files.push(table.name.clone());
    }
    write_record(&dir.join(SUMMARY_FILE), &out.summary)?;
    files.push(SUMMARY_FILE.to_string());

    Ok(RunReport {
        id: config.id().to_string(),
        model: config.model,
        dir,
        summary: out.summary,
        files,
        failures: out.failures,
        elapsed: started.elapsed(),
    })
}

fn olg_outputs(eq: &OlgEquilibrium, out: &mut Collector) {
    out.verdict("", &eq.verdict);
    out.num("price_0", eq.prices.value(0));
    out.residual("no_arbitrage_residual", eq.no_arbitrage_residual);
    out.residual("market_clearing_residual", eq.market_clearing_residual);
    out.price_pair(&eq.prices, &eq.dividends);
    out.series("rates.csv", &eq.rates);
    let (young, old) = (eq.young.values(), eq.old.values());
    let rows = young
        .iter()
        .zip(&old)
        .enumerate()
        .map(|(t, (y, z))| vec![t.to_string(), num(*y), num(*z)])
        .collect();
    out.table("consumption.csv", &["t", "young", "old"], rows);
}

fn log_olg(config: &ScenarioConfig, p: &Params, out: &mut Collector) -> Result<()> {
    let beta = p.number("beta")?;
    let endowments = TrendedPath::geometric(p.number("a")?, p.number("G")?, config.horizon)?;
    let dividends = TrendedPath::geometric(p.number("D")?, p.number("Gd")?, config.horizon)?;
    let eq = solve_log_olg(&endowments, &dividends, beta, config.tolerances.margin())?;
    olg_outputs(&eq, out);
    Ok(())
}

fn wilson(config: &ScenarioConfig, p: &Params, out: &mut Collector) -> Result<()> {
    let spec = WilsonSpec {
        beta: p.number("beta")?,
        a: p.number("a")?,
        b: p.number_or("b", 0.0)?,
        g: p.number("G")?,
        d: p.number("D")?,
        gd: p.number("Gd")?,
    };
    let eq = solve_wilson(&spec, config.horizon, config.tolerances.margin())?;
    olg_outputs(&eq.equilibrium, out);
    out.num("min_rate_excess", eq.min_rate_excess);
    out.require("rates_above_growth", eq.min_rate_excess > 0.0);
    out.text("rates_decreasing", eq.rates_decreasing);
    Ok(())
}

fn bewley_money(config: &ScenarioConfig, p: &Params, out: &mut Collector) -> Result<()> {
    let (a, b, beta) = (p.number("a")?, p.number("b")?, p.number("beta")?);
    let u = CrraUtility::new(p.number("gamma")?)?;
    let eq = solve_bewley_money(a, b, beta, &u)?;
    out.num("price", eq.price);
    out.num("rich_consumption", eq.rich_consumption);
    out.num("poor_consumption", eq.poor_consumption);
    out.residual("rich_euler_residual", eq.rich_euler_residual);
    out.num("poor_euler_slack", eq.poor_euler_slack);
    out.require("poor_euler_holds", eq.poor_euler_slack >= -out.tolerance);
    // A constant price with no dividends: a pure bubble.
    let prices = TrendedPath::geometric(eq.price, 1.0, config.horizon)?;
    let dividends = TrendedPath::new(1.0, vec![0.0; config.horizon + 1])?;
    let verdict = detect_bubble(&prices, &dividends, config.tolerances.margin())?;
    out.verdict("", &verdict);
    out.price_pair(&prices, &dividends);
    Ok(())
}

fn bewley_growth(config: &ScenarioConfig, p: &Params, out: &mut Collector) -> Result<()> {
    let spec = BewleySpec {
        beta: p.number("beta")?,
        gamma: p.number("gamma")?,
        g: p.number("G")?,
        a: p.number("a")?,
        b: p.number("b")?,
        d: p.number("D")?,
    };
    let eq = solve_bewley_growth(&spec, config.horizon, config.tolerances.margin())?;
    out.verdict("", &eq.verdict);
    out.num("p", eq.p);
    out.num("bubble_coefficient", spec.bubble_coefficient());
    out.num("contraction_factor", eq.contraction_factor);
    out.require("contraction_below_one", eq.contraction_factor < 1.0);
    out.residual("rich_euler_residual", eq.rich_euler_residual);
    out.num("poor_euler_slack", eq.poor_euler_slack);
    out.require("poor_euler_holds", eq.poor_euler_slack >= -out.tolerance);
    out.residual("market_clearing_residual", eq.market_clearing_residual);
    out.residual("no_arbitrage_residual", eq.no_arbitrage_residual);
    out.price_pair(&eq.prices, &eq.dividends);
    out.series("rates.csv", &eq.rates);
    Ok(())
}

fn kernel(p: &Params) -> Result<UtilityKernel> {
    Ok(UtilityKernel::ces(p.number("beta")?, p.number_or("eps", 1.0)?)?)
}

fn saddle(config: &ScenarioConfig, p: &Params, variant: Variant, out: &mut Collector) -> Result<()> {
    let econ = GrowthEconomy::new(
        p.number("a")?,
        p.number("b")?,
        p.number("G")?,
        p.number("D")?,
        p.number("Gd")?,
    )?;
    let system = DetrendedSystem::new(variant, econ, kernel(p)?)?;
    let shooting = ShootingConfig {
        start: config.tolerances.start,
        tube_radius: config.tolerances.tube,
        ..ShootingConfig::default()
    };
    let path = stable_path(&system, config.horizon, &shooting)?;
    let r = &path.report;
    out.text("variant", variant);
    out.num("xi1_star", r.xi1_star);
    out.num("lambda1", r.lambda1);
    out.num("lambda2", r.lambda2);
    out.num("off_diagonal", r.off_diagonal);
    out.num("slope", r.slope);
    out.num("d", r.d_value.unwrap_or(f64::NAN));
    out.num("n", r.n_value.unwrap_or(f64::NAN));
    out.num("autarky_ratio", r.autarky_ratio);
    out.text("shooting_date", path.shooting_date);
    out.text("uniqueness_not_guaranteed", path.uniqueness_not_guaranteed);
    out.num("price_0", path.prices.value(0));
    out.num("terminal_gap", (path.states[config.horizon].price - r.xi1_star).abs());
    out.residual("euler_residual", path.euler_residual);
    let verdict = detect_bubble(&path.prices, &path.dividends, config.tolerances.margin())?;
    out.verdict("", &verdict);
    out.price_pair(&path.prices, &path.dividends);
    let rows = path
        .states
        .iter()
        .enumerate()
        .map(|(t, s)| vec![t.to_string(), num(s.price), num(s.weight)])
        .collect();
    out.table("states.csv", &["t", "xi1", "xi2"], rows);
    Ok(())
}

pub const REGIME_HEADER: [&str; 10] = [
    "w",
    "G",
    "Gd",
    "w_f_star",
    "w_b_star",
    "regime",
    "xi1_fund",
    "xi1_bub",
    "lambda1_fund",
    "lambda1_bub",
];

fn regime_map(p: &Params, out: &mut Collector) -> Result<()> {
    let kernel = kernel(p)?;
    let (g, gd, d) = (p.number("G")?, p.number("Gd")?, p.number("D")?);
    let (lo, hi, step) = (p.number("w_min")?, p.number("w_max")?, p.number("w_step")?);
    if !(lo > 0.0 && hi >= lo && step > 0.0) {
        return Err(CliError::Config(
            "`w_min`, `w_max`, `w_step` must satisfy 0 < w_min <= w_max, step > 0".into(),
        ));
    }
    let cells = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    // Rounded so that a grid like 0.80, 0.81, ... hits its decimal values.
    let grid: Vec<f64> = (0..cells)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .collect();
    let rows = grid
        .par_iter()
        .map(|&w| {
            let econ = GrowthEconomy::new(1.0, w, g, d, gd)?;
            regime_row(&econ, &kernel)
        })
        .collect::<bubblelab_core::Result<Vec<_>>>()?;
    let first = &rows[0].report;
    out.num("w_f_star", first.w_f_star);
    out.num("w_b_star", first.w_b_star);
    out.text("cells", rows.len());
    let table = rows
        .iter()
        .map(|row| {
            let r = &row.report;
            vec![
                num(r.w),
                num(row.g),
                num(row.gd),
                num(r.w_f_star),
                num(r.w_b_star),
                r.regime.to_string(),
                num(row.xi1_fund),
                num(row.xi1_bub),
                num(row.lambda1_fund),
                num(row.lambda1_bub),
            ]
        })
        .collect();
    out.table("regime.csv", &REGIME_HEADER, table);
    Ok(())
}

pub const TWO_SECTOR_HEADER: [&str; 10] = ["t", "S", "E", "R", "q", "VS", "VL", "B", "Q", "P"];

pub fn two_sector_economy(p: &Params) -> Result<TwoSectorEconomy> {
    let econ = TwoSectorEconomy {
        alpha: p.number("alpha")?,
        sigma: p.number("sigma")?,
        k0: p.number("K0")?,
        l0: p.number("L0")?,
        d0: p.number("D0")?,
        gk: p.number("GK")?,
        gl: p.number("GL")?,
        gx: p.number("GX")?,
        shares: p.number("N")?,
        land: p.number("X")?,
        beta: p.number("beta")?,
    };
    econ.validate()?;
    Ok(econ)
}

/// Analytic verdict as reported in tables: knife-edge cells read `Boundary`.
pub fn analytic_label(analytic: AnalyticVerdict, boundary: bool) -> &'static str {
    if boundary {
        "Boundary"
    } else {
        analytic.as_str()
    }
}

fn two_sector(config: &ScenarioConfig, p: &Params, out: &mut Collector) -> Result<()> {
    let econ = two_sector_economy(p)?;
    let theta = p.number_or("theta", 0.5)?;
    let margin = config.tolerances.margin();
    let sim = simulate_aggregate(&econ, config.horizon)?;
    let verdict = classify_simulation(&econ, &sim, margin)?;
    let parts = decompose_bubble(&sim, &econ, theta, margin)?;

    out.text("analytic", analytic_label(verdict.analytic, verdict.boundary));
    out.text("boundary", verdict.boundary);
    out.verdict("", &verdict.numeric);
    if !verdict.boundary && verdict.analytic != AnalyticVerdict::NotCovered {
        out.require("verdicts_agree", verdict.agrees());
    }
    out.num("theta", theta);
    out.num("bubble_0", parts.bubble.value(0));
    out.text("clamped", parts.clamped);
    out.num("terminal_adjustment", parts.terminal_adjustment);
    out.residual("euler_identity_residual", sim.euler_identity_residual);
    out.residual("adding_up_residual", parts.adding_up_residual);
    out.residual("stock_arbitrage_residual", parts.stock_arbitrage_residual);
    out.residual("land_arbitrage_residual", parts.land_arbitrage_residual);
    out.residual("bubble_growth_residual", parts.bubble_growth_residual);

    out.price_pair(&sim.asset_value, &sim.dividend);
    let rows = (0..=config.horizon)
        .map(|t| {
            let rate = sim.rates.get(t).map_or(String::new(), |r| num(*r));
            vec![
                t.to_string(),
                num(sim.asset_value.value(t)),
                num(sim.dividend.value(t)),
                rate,
                num(sim.ladder.q(t)),
                num(parts.stock_value.value(t)),
                num(parts.land_value.value(t)),
                num(parts.bubble.value(t)),
                num(parts.stock_price.value(t)),
                num(parts.land_price.value(t)),
            ]
        })
        .collect();
    out.table("scenario.csv", &TWO_SECTOR_HEADER, rows);
    Ok(())
}

fn firm_shares(config: &ScenarioConfig, p: &Params, out: &mut Collector) -> Result<()> {
    let rate = p.number("R")?;
    let cashflow = p.number("C")?;
    let share_growth = p.number("share_growth")?;
    let bubble = p.number_or("b", 0.0)?;
    if !(rate > 1.0) {
        return Err(CliError::Config(format!("parameter `R` must exceed 1, got {rate}")));
    }
    let horizon = config.horizon;
    let shares: Vec<f64> = (0..=horizon).map(|t| share_growth.powi(t as i32)).collect();
    let cashflows: Vec<f64> = (0..=horizon).map(|t| if t == 0 { 0.0 } else { cashflow }).collect();
    let rates = vec![rate; horizon];
    let p0 = cashflow / (rate - 1.0) + bubble;
    let series = firm_accounting(&shares, &cashflows, &rates, p0)?;
    let ladder = ladder_from_rates(&rates)?;
    let v = classify_firm_bubbles(&series, &ladder, config.tolerances.margin())?;

    out.verdict("", &v.stock_series);
    out.verdict("value", &v.value_series);
    out.text("share_trend", format!("{:?}", v.share_trend));
    out.text("stock", v.stock);
    out.text("firm_value", v.value);
    out.require("consistent", v.consistent);
    out.num("stock_bubble_limit", v.stock_limit.limit);
    out.num("value_bubble_limit", v.value_limit.limit);
    out.text("negative_dividends", series.negative_dividends.len());
    out.residual("accounting_residual", series.accounting_residual);

    out.series(PRICES_FILE, &series.stock_price);
    out.series(DIVIDENDS_FILE, &series.dividend_per_share);
    out.series("value.csv", &series.firm_value);
    out.series("cashflows.csv", &series.cashflows);
    let rows = (0..=horizon)
        .map(|t| {
            vec![
                t.to_string(),
                num(series.shares[t]),
                num(series.cashflows[t]),
                num(series.stock_price[t]),
                num(series.dividend_per_share[t]),
                num(series.firm_value[t]),
            ]
        })
        .collect();
    out.table(
        "firm.csv",
        &["t", "shares", "cashflow", "stock_price", "dividend", "firm_value"],
        rows,
    );
    Ok(())
}

/// Yield test on a pair of CSV series; the same routine backs the `detect`
/// subcommand.
pub fn detect_files(
    prices: &Path,
    dividends: &Path,
    price_column: Option<&str>,
    dividend_column: Option<&str>,
    margin: f64,
) -> Result<(Vec<f64>, Vec<f64>, BubbleVerdict)> {
    let p = read_column(prices, price_column)?;
    let d = read_column(dividends, dividend_column)?;
    if p.len() != d.len() {
        return Err(CliError::Config(format!(
            "{} has {} rows but {} has {}",
            prices.display(),
            p.len(),
            dividends.display(),
            d.len()
        )));
    }
    let verdict = detect_bubble(
        &TrendedPath::from_values(p.clone())?,
        &TrendedPath::from_values(d.clone())?,
        margin,
    )?;
    Ok((p, d, verdict))
}

fn detect(config: &ScenarioConfig, p: &Params, out: &mut Collector) -> Result<()> {
    let prices = config.resolve(Path::new(&p.string("prices")?));
    let dividends = config.resolve(Path::new(&p.string("dividends")?));
    let pc = p.optional_string("price_column")?;
    let dc = p.optional_string("dividend_column")?;
    let (pv, dv, verdict) = detect_files(
        &prices,
        &dividends,
        pc.as_deref(),
        dc.as_deref(),
        config.tolerances.margin(),
    )?;
    out.verdict("", &verdict);
    out.text("observations", pv.len());
    out.series(PRICES_FILE, &pv);
    out.series(DIVIDENDS_FILE, &dv);
    Ok(())
}

/// Writes a detector verdict as a summary record.
pub fn write_verdict(path: &Path, verdict: &BubbleVerdict, observations: usize) -> Result<()> {
    let mut out = Collector::default();
    out.verdict("", verdict);
    out.text("observations", observations);
    write_record(path, &out.summary)
}

/// Detector verdict as `key,value` lines.
pub fn verdict_lines(verdict: &BubbleVerdict) -> Vec<(String, String)> {
    let mut out = Collector::default();
    out.verdict("", verdict);
    out.summary
}
