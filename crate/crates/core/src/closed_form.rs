//! Exactly solvable economies: log-utility and linear-utility overlapping
//! generations, and the two-agent Bewley economies with alternating
//! endowments. They serve as deliverables and as oracles for the generic
//! solvers; every verdict goes through [`detect_bubble`].

use alloc::vec::Vec;

use crate::error::{non_negative, positive, Error, Result};
use crate::math::{powf, powi};
use crate::pricing::detect_bubble;
use crate::roots::bisect;
use crate::series::TrendedPath;
use crate::utility::{PeriodUtility, UtilityKernel};
use crate::verdict::BubbleVerdict;

/// Equilibrium of an overlapping-generations economy with a unit supply of
/// a long-lived asset.
#[derive(Debug, Clone, PartialEq)]
pub struct OlgEquilibrium {
    pub prices: TrendedPath,
    pub dividends: TrendedPath,
    /// Gross risk-free rates `R_t = (P_{t+1} + D_{t+1}) / P_t`.
    pub rates: Vec<f64>,
    /// Consumption of the young, against the endowment trend.
    pub young: TrendedPath,
    /// Consumption of the old, against the endowment trend.
    pub old: TrendedPath,
    pub verdict: BubbleVerdict,
    /// Largest relative no-arbitrage residual `|P_t R_t - (P_{t+1} + D_{t+1})| / P_t`.
    pub no_arbitrage_residual: f64,
    /// Largest relative residual of the goods market clearing condition.
    pub market_clearing_residual: f64,
}

/// Log-utility OLG economy: young endowment `a_t`, no old endowment,
/// dividends `D_t`. The young save a fraction `beta` of their endowment, so
/// `P_t = beta·a_t` for arbitrary positive endowment sequences.
pub fn solve_log_olg(
    endowments: &TrendedPath,
    dividends: &TrendedPath,
    beta: f64,
    margin: f64,
) -> Result<OlgEquilibrium> {
    let kernel = UtilityKernel::cobb_douglas(beta)?;
    if endowments.len() != dividends.len() {
        return Err(Error::Length {
            expected: endowments.len(),
            found: dividends.len(),
        });
    }
    for &a in endowments.levels() {
        positive("young endowment", a)?;
    }
    for &d in dividends.levels() {
        non_negative("dividend", d)?;
    }
    if dividends.levels().iter().all(|&d| d == 0.0) {
        return Err(Error::Hypothesis("dividends must not vanish identically"));
    }
    let growth = endowments.growth();
    let scale = |p: &TrendedPath, s: f64| p.levels().iter().map(|x| s * x).collect::<Vec<_>>();
    let prices = TrendedPath::new(growth, scale(endowments, beta))?;
    let young = TrendedPath::new(growth, scale(endowments, 1.0 - beta))?;
    let dividends_here = dividends.retrend(growth)?;
    let old_levels: Vec<f64> = prices
        .levels()
        .iter()
        .zip(dividends_here.levels())
        .map(|(p, d)| p + d)
        .collect();
    let old = TrendedPath::new(growth, old_levels)?;

    let horizon = prices.horizon();
    let rates: Vec<f64> = (0..horizon).map(|t| prices.gross_return(dividends, t)).collect();
    let mut market: f64 = 0.0;
    for t in 0..=horizon {
        let supply = endowments.level(t) + dividends_here.level(t);
        market = market.max((young.level(t) + old.level(t) - supply).abs() / supply);
    }
    // Euler equation at (y_t, z_{t+1}), in units of the date-t trend
    let mut euler: f64 = 0.0;
    for t in 0..horizon {
        let payoff = growth * old.level(t + 1);
        let r = kernel.euler_residual(young.level(t), payoff, prices.level(t), payoff);
        euler = euler.max(r);
    }
    if euler > 1e-10 {
        return Err(Error::Inconsistent("log-utility Euler equation violated"));
    }
    let verdict = detect_bubble(&prices, dividends, margin)?;
    Ok(OlgEquilibrium {
        no_arbitrage_residual: no_arbitrage_residual(&prices, dividends, &rates),
        prices,
        dividends: dividends.clone(),
        rates,
        young,
        old,
        verdict,
        market_clearing_residual: market,
    })
}

/// Linear-utility OLG economy `U = y + beta·z` with endowments
/// `(a G^t, b G^t)` and dividends `D Gd^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonSpec {
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub d: f64,
    pub gd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WilsonEquilibrium {
    pub equilibrium: OlgEquilibrium,
    /// `min_t R_t - 1/beta`; positive means the young strictly prefer to save
    /// their whole endowment.
    pub min_rate_excess: f64,
    /// Rates never increase and the first step is a strict decrease; far out
    /// the premium over `G` falls below f64 resolution.
    pub rates_decreasing: bool,
}

/// The unique equilibrium `P_t = a G^t` (the young consume nothing) when
/// `1/beta < Gd < G`.
pub fn solve_wilson(spec: &WilsonSpec, horizon: usize, margin: f64) -> Result<WilsonEquilibrium> {
    let WilsonSpec { beta, a, b, g, d, gd } = *spec;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain {
            what: "discount factor beta must lie in (0, 1)",
            value: beta,
        });
    }
    positive("young endowment a", a)?;
    non_negative("old endowment b", b)?;
    positive("dividend D", d)?;
    positive("growth factor G", g)?;
    positive("dividend growth Gd", gd)?;
    if !(1.0 / beta < gd && gd < g) {
        return Err(Error::Hypothesis("outside the 1/beta < Gd < G regime"));
    }
    let prices = TrendedPath::geometric(a, g, horizon)?;
    let dividends = TrendedPath::geometric(d, gd, horizon)?;
    let rates: Vec<f64> = (0..horizon).map(|t| prices.gross_return(&dividends, t)).collect();
    let young = TrendedPath::geometric(0.0, g, horizon)?;
    let rel = gd / g;
    let old_levels = (0..=horizon).map(|t| b + a + d * powi(rel, t)).collect();
    let old = TrendedPath::new(g, old_levels)?;
    let mut market: f64 = 0.0;
    for t in 0..=horizon {
        let supply = a + b + d * powi(rel, t);
        market = market.max((young.level(t) + old.level(t) - supply).abs() / supply);
    }
    let min_rate_excess = rates.iter().fold(f64::INFINITY, |m, &r| m.min(r)) - 1.0 / beta;
    let rates_decreasing =
        rates.windows(2).all(|w| w[0] >= w[1]) && rates.windows(2).next().is_none_or(|w| w[0] > w[1]);
    let verdict = detect_bubble(&prices, &dividends, margin)?;
    Ok(WilsonEquilibrium {
        equilibrium: OlgEquilibrium {
            no_arbitrage_residual: no_arbitrage_residual(&prices, &dividends, &rates),
            prices,
            dividends,
            rates,
            young,
            old,
            verdict,
            market_clearing_residual: market,
        },
        min_rate_excess,
        rates_decreasing,
    })
}

fn no_arbitrage_residual(prices: &TrendedPath, dividends: &TrendedPath, rates: &[f64]) -> f64 {
    let rel = dividends.growth() / prices.growth();
    let mut worst: f64 = 0.0;
    for (t, &r) in rates.iter().enumerate() {
        // in units of the price trend at date t
        let lhs = prices.level(t) * r;
        let rhs = prices.growth() * (prices.level(t + 1) + dividends.level(t + 1) * powi(rel, t + 1));
        worst = worst.max((lhs - rhs).abs() / prices.level(t));
    }
    worst
}

/// Constant-price equilibrium of the two-agent money economy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoneyEquilibrium {
    pub price: f64,
    /// Consumption of the agent currently rich (`a - P`) and poor (`b + P`).
    pub rich_consumption: f64,
    pub poor_consumption: f64,
    /// `|u'(a-P) - beta u'(b+P)| / u'(a-P)`.
    pub rich_euler_residual: f64,
    /// `u'(b+P) - beta u'(a-P)`, non-negative when the poor agent's
    /// short-sale constraint is consistent.
    pub poor_euler_slack: f64,
}

/// Unique `P ∈ (0, a)` with `u'(a - P) = beta u'(b + P)`, which exists when
/// `u'(a) < beta u'(b)`.
pub fn solve_bewley_money<U: PeriodUtility>(a: f64, b: f64, beta: f64, u: &U) -> Result<MoneyEquilibrium> {
    positive("rich endowment a", a)?;
    non_negative("poor endowment b", b)?;
    if b >= a {
        return Err(Error::Domain {
            what: "poor endowment b must be below a",
            value: b,
        });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain {
            what: "discount factor beta must lie in (0, 1)",
            value: beta,
        });
    }
    if !(u.marginal(a) < beta * u.marginal(b)) {
        return Err(Error::Hypothesis(
            "autarky is an equilibrium candidate: u'(a) >= beta u'(b)",
        ));
    }
    let eps = 1e-12 * a;
    let g = |p: f64| beta * u.marginal(b + p) - u.marginal(a - p);
    let price = bisect(g, eps, a - eps, "money-economy Euler equation")?;
    let rich = u.marginal(a - price);
    Ok(MoneyEquilibrium {
        price,
        rich_consumption: a - price,
        poor_consumption: b + price,
        rich_euler_residual: (rich - beta * u.marginal(b + price)).abs() / rich,
        poor_euler_slack: u.marginal(b + price) - beta * rich,
    })
}

/// Growing two-agent economy with CRRA utility and a dividend-paying asset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BewleySpec {
    pub beta: f64,
    pub gamma: f64,
    pub g: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

/// Conditions under which the bubbly equilibrium exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BewleyFlags {
    /// `beta G^{1-gamma} < 1`.
    pub tvc: bool,
    /// `beta G^{1-gamma} > (b/a)^gamma`, i.e. `p > 0`.
    pub price_positive: bool,
    /// `G D / (G - 1) < b`, i.e. the poor agent's endowment stays positive.
    pub dividend_small: bool,
}

impl BewleySpec {
    /// `(beta G^{1-gamma})^{1/gamma}`, the consumption ratio `(b+p)/(a-p)`.
    fn smoothing_ratio(&self) -> f64 {
        powf(self.beta * powf(self.g, 1.0 - self.gamma), 1.0 / self.gamma)
    }

    pub fn contraction_factor(&self) -> f64 {
        self.beta * powf(self.g, 1.0 - self.gamma)
    }

    pub fn flags(&self) -> BewleyFlags {
        BewleyFlags {
            tvc: self.contraction_factor() < 1.0,
            // strict, with a rounding guard so the boundary b = k·a is rejected
            price_positive: self.smoothing_ratio() - self.b / self.a > 1e-12,
            dividend_small: self.g > 1.0 && self.g * self.d / (self.g - 1.0) < self.b,
        }
    }

    /// Detrended bubble coefficient `p`.
    pub fn bubble_coefficient(&self) -> f64 {
        let k = self.smoothing_ratio();
        (self.a * k - self.b) / (1.0 + k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEquilibrium {
    pub p: f64,
    /// `P_t = D/(G-1) + p G^t`, against the trend `G`.
    pub prices: TrendedPath,
    pub dividends: TrendedPath,
    /// Gross risk-free rates, all equal to `G`.
    pub rates: Vec<f64>,
    pub rich_euler_residual: f64,
    pub poor_euler_slack: f64,
    pub contraction_factor: f64,
    pub market_clearing_residual: f64,
    pub no_arbitrage_residual: f64,
    pub flags: BewleyFlags,
    pub verdict: BubbleVerdict,
}

pub fn solve_bewley_growth(spec: &BewleySpec, horizon: usize, margin: f64) -> Result<GrowthEquilibrium> {
    let BewleySpec {
        beta,
        gamma,
        g,
        a,
        b,
        d,
    } = *spec;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain {
            what: "discount factor beta must lie in (0, 1)",
            value: beta,
        });
    }
    if gamma == 0.0 {
        return Err(Error::Domain {
            what: "gamma = 0 leaves the bubble coefficient undefined",
            value: gamma,
        });
    }
    positive("relative risk aversion gamma", gamma)?;
    positive("rich endowment a", a)?;
    positive("poor endowment b", b)?;
    positive("dividend D", d)?;
    if !(g > 1.0) {
        return Err(Error::Domain {
            what: "growth factor G must exceed 1",
            value: g,
        });
    }
    let flags = spec.flags();
    if !flags.tvc {
        return Err(Error::Hypothesis("flag_tvc: beta G^(1-gamma) must be below 1"));
    }
    if !flags.price_positive {
        return Err(Error::Hypothesis(
            "flag_p_pos: beta G^(1-gamma) must exceed (b/a)^gamma",
        ));
    }
    if !flags.dividend_small {
        return Err(Error::Hypothesis("flag_D_small: G D / (G - 1) must be below b"));
    }
    let p = spec.bubble_coefficient();
    let fundamental = d / (g - 1.0);
    let levels = (0..=horizon).map(|t| fundamental / powi(g, t) + p).collect();
    let prices = TrendedPath::new(g, levels)?;
    let dividends = TrendedPath::geometric(d, 1.0, horizon)?;
    let rates = alloc::vec![g; horizon];

    let (rich, poor) = (a - p, b + p);
    let rich_euler_residual = (beta * g * powf(poor / rich * g, -gamma) - 1.0).abs();
    let poor_euler_slack = 1.0 - beta * g * powf(rich / poor * g, -gamma);

    // budget-implied endowments, all in units of G^t
    let mut market: f64 = 0.0;
    for t in 0..=horizon {
        let scale = powi(g, t);
        let e_rich = a + fundamental / scale;
        let e_poor = b - g * fundamental / scale;
        let dividend = d / scale;
        let supply = e_rich + e_poor + dividend;
        market = market.max((rich + poor - supply).abs() / supply);
    }
    let verdict = detect_bubble(&prices, &dividends, margin)?;
    Ok(GrowthEquilibrium {
        p,
        no_arbitrage_residual: no_arbitrage_residual(&prices, &dividends, &rates),
        prices,
        dividends,
        rates,
        rich_euler_residual,
        poor_euler_slack,
        contraction_factor: spec.contraction_factor(),
        market_clearing_residual: market,
        flags,
        verdict,
    })
}
