//! Income-ratio thresholds and the regime classifier.

use core::fmt;
use core::str::FromStr;

use super::{steady_state, DetrendedSystem, BOUNDARY_TOLERANCE};
use crate::economy::GrowthEconomy;
use crate::error::{positive, Error, Result};
use crate::roots::bisect_increasing_expand;
use crate::utility::UtilityKernel;

/// Unique `w` with `(U_y/U_z)(1, G w) = target`.
pub fn threshold_w(kernel: &UtilityKernel, g: f64, target: f64) -> Result<f64> {
    positive("growth factor G", g)?;
    positive("threshold target", target)?;
    bisect_increasing_expand(
        |w| kernel.mrs_unchecked(1.0, g * w),
        target,
        0.5,
        2.0,
        "income-ratio threshold",
    )
    .map_err(|_| Error::ThresholdUnattainable { target })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `w > w_b*`: the unique equilibrium converging in `Gd`-detrended terms
    /// is fundamental and no bubbly steady state exists.
    FundamentalOnly,
    /// `w_f* < w < w_b*`: fundamental and bubbly equilibria coexist.
    Coexistence,
    /// `w < w_f*`: every equilibrium is bubbly.
    BubbleNecessity,
    /// Within tolerance of a threshold.
    Boundary,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::FundamentalOnly => "FundamentalOnly",
            Regime::Coexistence => "Coexistence",
            Regime::BubbleNecessity => "BubbleNecessity",
            Regime::Boundary => "Boundary",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "FundamentalOnly" => Ok(Regime::FundamentalOnly),
            "Coexistence" => Ok(Regime::Coexistence),
            "BubbleNecessity" => Ok(Regime::BubbleNecessity),
            "Boundary" => Ok(Regime::Boundary),
            _ => Err(Error::Inconsistent("unknown regime name")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub w: f64,
    pub w_f_star: f64,
    pub w_b_star: f64,
    pub regime: Regime,
    /// Counterfactual autarky rate `(U_y/U_z)(a, b)`.
    pub autarky_rate: f64,
    /// For a stationary economy (`G = 1`): whether `R < Gd < 1`, under which
    /// all equilibria are bubbly.
    pub stationary_necessity: Option<bool>,
}

pub fn classify_regime(econ: &GrowthEconomy, kernel: &UtilityKernel) -> Result<RegimeReport> {
    let w = econ.income_ratio();
    let w_f_star = threshold_w(kernel, econ.g, econ.gd)?;
    let w_b_star = threshold_w(kernel, econ.g, econ.g)?;
    let regime = if (w - w_f_star).abs() <= BOUNDARY_TOLERANCE || (w - w_b_star).abs() <= BOUNDARY_TOLERANCE {
        Regime::Boundary
    } else if w > w_b_star {
        Regime::FundamentalOnly
    } else if w > w_f_star {
        Regime::Coexistence
    } else {
        Regime::BubbleNecessity
    };
    let autarky_rate = kernel.mrs_ratio(econ.a, econ.b)?;
    let stationary_necessity = (econ.g == 1.0).then_some(autarky_rate < econ.gd && econ.gd < 1.0);
    Ok(RegimeReport {
        w,
        w_f_star,
        w_b_star,
        regime,
        autarky_rate,
        stationary_necessity,
    })
}

/// One line of a regime map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeRow {
    pub report: RegimeReport,
    pub g: f64,
    pub gd: f64,
    /// Whether the fundamental steady state exists (`Gd < (U_y/U_z)(a, G b)`).
    pub fundamental_exists: bool,
    pub xi1_fund: f64,
    pub xi1_bub: f64,
    pub lambda1_fund: f64,
    pub lambda1_bub: f64,
}

pub fn regime_row(econ: &GrowthEconomy, kernel: &UtilityKernel) -> Result<RegimeRow> {
    let report = classify_regime(econ, kernel)?;
    let fund = steady_state(&DetrendedSystem::fundamental(*econ, *kernel)?)?;
    let bub = steady_state(&DetrendedSystem::bubbly(*econ, *kernel)?)?;
    Ok(RegimeRow {
        report,
        g: econ.g,
        gd: econ.gd,
        fundamental_exists: fund.flags.exists,
        xi1_fund: fund.xi1_star,
        xi1_bub: bub.xi1_star,
        lambda1_fund: fund.lambda1,
        lambda1_bub: bub.lambda1,
    })
}
