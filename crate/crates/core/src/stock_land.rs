//! Two-sector economy with a stock (claim to capital rents) and land, CES
//! production and exogenous geometric factor growth. Aggregate asset value,
//! dividends and rates are determinate; the split of the aggregate bubble
//! between stock and land is indexed by `theta`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{positive, Error, Result};
use crate::math::{powf, powi};
use crate::pricing::{detect_bubble, fundamental_value, ladder_from_rates, ArrowDebreuLadder, TailPolicy};
use crate::series::TrendedPath;
use crate::verdict::{BubbleClass, BubbleVerdict};

/// Negative aggregate bubble estimates down to `-NEGATIVE_BUBBLE_TOLERANCE·S`
/// are treated as tail-estimation error and clamped to zero.
pub const NEGATIVE_BUBBLE_TOLERANCE: f64 = 1e-8;
const ARBITRAGE_TOLERANCE: f64 = 1e-8;
const EQUALITY_TOLERANCE: f64 = 1e-12;

/// Output and marginal products of `F(K, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Production {
    pub output: f64,
    pub capital_marginal: f64,
    pub labor_marginal: f64,
    /// Capital-to-labor income ratio `F_K K / (F_L L)`.
    pub factor_ratio: f64,
}

/// CES production `(alpha K^r + (1-alpha) L^r)^(1/r)` with `r = 1 - 1/sigma`;
/// Cobb-Douglas `K^alpha L^(1-alpha)` when `sigma = 1`.
pub fn ces_eval(alpha: f64, sigma: f64, capital: f64, labor: f64) -> Result<Production> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            what: "capital share alpha must lie in (0, 1)",
            value: alpha,
        });
    }
    positive("elasticity of substitution sigma", sigma)?;
    positive("capital", capital)?;
    positive("labor", labor)?;
    // evaluate at a unit scale; marginal products are homogeneous of degree 0
    let scale = capital.max(labor);
    let (k, l) = (capital / scale, labor / scale);
    let (output, capital_marginal, labor_marginal, factor_ratio) = if sigma == 1.0 {
        let f = powf(k, alpha) * powf(l, 1.0 - alpha);
        (f * scale, alpha * f / k, (1.0 - alpha) * f / l, alpha / (1.0 - alpha))
    } else {
        let r = 1.0 - 1.0 / sigma;
        let f = powf(alpha * powf(k, r) + (1.0 - alpha) * powf(l, r), 1.0 / r);
        let inner = powf(f, 1.0 / sigma);
        (
            f * scale,
            inner * alpha * powf(k, -1.0 / sigma),
            inner * (1.0 - alpha) * powf(l, -1.0 / sigma),
            alpha / (1.0 - alpha) * powf(capital / labor, r),
        )
    };
    Ok(Production {
        output,
        capital_marginal,
        labor_marginal,
        factor_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSectorEconomy {
    pub alpha: f64,
    pub sigma: f64,
    pub k0: f64,
    pub l0: f64,
    /// Initial land dividend per unit.
    pub d0: f64,
    pub gk: f64,
    pub gl: f64,
    pub gx: f64,
    /// Stock shares outstanding.
    pub shares: f64,
    /// Land supply.
    pub land: f64,
    /// Savings share of the young.
    pub beta: f64,
}

impl TwoSectorEconomy {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain {
                what: "capital share alpha must lie in (0, 1)",
                value: self.alpha,
            });
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::Domain {
                what: "savings share beta must lie in (0, 1)",
                value: self.beta,
            });
        }
        positive("elasticity of substitution sigma", self.sigma)?;
        positive("initial capital K0", self.k0)?;
        positive("initial labor L0", self.l0)?;
        positive("initial land dividend D0", self.d0)?;
        positive("capital growth GK", self.gk)?;
        positive("labor growth GL", self.gl)?;
        positive("land rent growth GX", self.gx)?;
        positive("shares outstanding N", self.shares)?;
        positive("land supply X", self.land)?;
        Ok(())
    }

    /// Capital at date `t` against the labor trend.
    fn capital_level(&self, t: usize) -> f64 {
        self.k0 * powi(self.gk / self.gl, t)
    }

    /// Land dividend per unit at date `t` against the labor trend.
    fn rent_level(&self, t: usize) -> f64 {
        self.d0 * powi(self.gx / self.gl, t)
    }
}

/// Aggregate equilibrium quantities; every path is expressed against the
/// labor trend `GL`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSim {
    /// Aggregate asset value `S_t = beta F_L L_t`.
    pub asset_value: TrendedPath,
    /// Aggregate dividend `E_t = F_K K_t + D_t X`.
    pub dividend: TrendedPath,
    /// Capital rents per share `F_K K_t / N`.
    pub stock_dividend: TrendedPath,
    /// Land dividend per unit `D_t`.
    pub land_dividend: TrendedPath,
    pub output: TrendedPath,
    /// Gross risk-free rates `R_t = (S_{t+1} + E_{t+1}) / S_t`.
    pub rates: Vec<f64>,
    pub ladder: ArrowDebreuLadder,
    /// Capital rental rate `F_K` (homogeneous of degree 0, so untrended).
    pub rental: Vec<f64>,
    /// Wage rate `F_L`.
    pub wage: Vec<f64>,
    /// Largest relative deviation from `F = F_K K + F_L L`.
    pub euler_identity_residual: f64,
}

impl AggregateSim {
    pub fn horizon(&self) -> usize {
        self.asset_value.horizon()
    }

    /// Consumption of the young, `(1 - beta) F_L L_t`, against `GL`.
    pub fn young_consumption(&self, econ: &TwoSectorEconomy) -> Vec<f64> {
        self.wage.iter().map(|w| (1.0 - econ.beta) * w * econ.l0).collect()
    }

    /// Consumption of the old, `S_t + E_t`, against `GL`.
    pub fn old_consumption(&self) -> Vec<f64> {
        self.asset_value
            .levels()
            .iter()
            .zip(self.dividend.levels())
            .map(|(s, e)| s + e)
            .collect()
    }
}

pub fn simulate_aggregate(econ: &TwoSectorEconomy, horizon: usize) -> Result<AggregateSim> {
    econ.validate()?;
    if horizon < 2 {
        return Err(Error::Domain {
            what: "horizon must be at least 2",
            value: horizon as f64,
        });
    }
    let n = horizon + 1;
    let (mut s, mut e, mut stock, mut rent, mut output) = (
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    );
    let (mut rental, mut wage) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut identity: f64 = 0.0;
    for t in 0..n {
        let capital = econ.capital_level(t);
        let p = ces_eval(econ.alpha, econ.sigma, capital, econ.l0)?;
        let rents = p.capital_marginal * capital;
        let labor_income = p.labor_marginal * econ.l0;
        identity = identity.max((p.output - rents - labor_income).abs() / p.output);
        let d = econ.rent_level(t);
        s.push(econ.beta * labor_income);
        e.push(rents + d * econ.land);
        stock.push(rents / econ.shares);
        rent.push(d);
        output.push(p.output);
        rental.push(p.capital_marginal);
        wage.push(p.labor_marginal);
    }
    let rates: Vec<f64> = (0..horizon).map(|t| econ.gl * (s[t + 1] + e[t + 1]) / s[t]).collect();
    let ladder = ladder_from_rates(&rates)?;
    let gl = econ.gl;
    Ok(AggregateSim {
        asset_value: TrendedPath::new(gl, s)?,
        dividend: TrendedPath::new(gl, e)?,
        stock_dividend: TrendedPath::new(gl, stock)?,
        land_dividend: TrendedPath::new(gl, rent)?,
        output: TrendedPath::new(gl, output)?,
        rates,
        ladder,
        rental,
        wage,
        euler_identity_residual: identity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnalyticVerdict {
    Bubbly,
    Fundamental,
    /// `sigma >= 1`, outside the scope of the closed-form rule.
    NotCovered,
}

impl AnalyticVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            AnalyticVerdict::Bubbly => "Bubbly",
            AnalyticVerdict::Fundamental => "Fundamental",
            AnalyticVerdict::NotCovered => "NotCovered",
        }
    }
}

impl fmt::Display for AnalyticVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSectorVerdict {
    /// `Bubbly` iff `GK > GL > GX` (for `sigma < 1`).
    pub analytic: AnalyticVerdict,
    /// Yield test on `(S_t, E_t)`.
    pub numeric: BubbleVerdict,
    /// `GK = GL`, or `GL = GX` with `GK > GL`: a growth-factor equality on
    /// which the rule turns.
    pub boundary: bool,
}

impl TwoSectorVerdict {
    /// Whether both verdicts are available and agree.
    pub fn agrees(&self) -> bool {
        matches!(
            (self.analytic, self.numeric.class),
            (AnalyticVerdict::Bubbly, BubbleClass::Bubbly) | (AnalyticVerdict::Fundamental, BubbleClass::Fundamental)
        )
    }
}

fn nearly_equal(x: f64, y: f64) -> bool {
    (x - y).abs() <= EQUALITY_TOLERANCE * x.abs().max(y.abs())
}

pub fn classify_two_sector(econ: &TwoSectorEconomy, horizon: usize, margin: f64) -> Result<TwoSectorVerdict> {
    let sim = simulate_aggregate(econ, horizon)?;
    classify_simulation(econ, &sim, margin)
}

pub fn classify_simulation(econ: &TwoSectorEconomy, sim: &AggregateSim, margin: f64) -> Result<TwoSectorVerdict> {
    let (gk, gl, gx) = (econ.gk, econ.gl, econ.gx);
    let boundary = nearly_equal(gk, gl) || (gk > gl && nearly_equal(gl, gx));
    let analytic = if econ.sigma >= 1.0 {
        AnalyticVerdict::NotCovered
    } else if gk > gl && gl > gx {
        AnalyticVerdict::Bubbly
    } else {
        AnalyticVerdict::Fundamental
    };
    let numeric = detect_bubble(&sim.asset_value, &sim.dividend, margin)?;
    Ok(TwoSectorVerdict {
        analytic,
        numeric,
        boundary,
    })
}

/// Stock and land prices for one split of the aggregate bubble, all against
/// the labor trend.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleDecomposition {
    pub theta: f64,
    /// Per-share fundamental value of the stock.
    pub stock_value: TrendedPath,
    /// Per-unit fundamental value of land.
    pub land_value: TrendedPath,
    /// Aggregate bubble `B_t`.
    pub bubble: TrendedPath,
    pub stock_price: TrendedPath,
    pub land_price: TrendedPath,
    /// Whether a slightly negative terminal bubble estimate was set to zero.
    pub clamped: bool,
    /// Relative rescaling applied to the terminal fundamental values so that
    /// they add up to `S_T - B_T`.
    pub terminal_adjustment: f64,
    pub adding_up_residual: f64,
    pub stock_arbitrage_residual: f64,
    pub land_arbitrage_residual: f64,
    pub bubble_growth_residual: f64,
}

/// Splits the aggregate asset value into fundamental values and a bubble,
/// placing a share `theta` of the bubble on the stock.
///
/// Terminal fundamental values come from geometric tails; the aggregate
/// bubble at the horizon is what they leave of `S_T`. When the yield test
/// finds no bubble, the tails are rescaled to exhaust `S_T` instead. Values
/// at earlier dates follow from the pricing recursions, so adding-up and
/// `B_{t+1} = R_t B_t` hold to rounding.
pub fn decompose_bubble(
    sim: &AggregateSim,
    econ: &TwoSectorEconomy,
    theta: f64,
    margin: f64,
) -> Result<BubbleDecomposition> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Domain {
            what: "theta must lie in [0, 1]",
            value: theta,
        });
    }
    let horizon = sim.horizon();
    let gl = econ.gl;
    let (n, x) = (econ.shares, econ.land);
    let s = sim.asset_value.levels();
    let stock_tail = fundamental_value(&sim.ladder, &sim.stock_dividend, TailPolicy::Geometric)?
        .values
        .level(horizon);
    let land_tail = fundamental_value(&sim.ladder, &sim.land_dividend, TailPolicy::Geometric)?
        .values
        .level(horizon);
    let tails = n * stock_tail + x * land_tail;
    let verdict = detect_bubble(&sim.asset_value, &sim.dividend, margin)?;

    let raw = s[horizon] - tails;
    let (terminal_bubble, clamped) = if verdict.class == BubbleClass::Fundamental {
        (0.0, false)
    } else if raw < -NEGATIVE_BUBBLE_TOLERANCE * s[horizon] {
        return Err(Error::Inconsistent(
            "aggregate bubble estimate negative; horizon too short",
        ));
    } else {
        (raw.max(0.0), raw < 0.0)
    };
    let adjust = (s[horizon] - terminal_bubble) / tails;

    let (mut vs, mut vl, mut b) = (vec![0.0; horizon + 1], vec![0.0; horizon + 1], vec![0.0; horizon + 1]);
    vs[horizon] = stock_tail * adjust;
    vl[horizon] = land_tail * adjust;
    b[horizon] = terminal_bubble;
    let (ds, dl) = (sim.stock_dividend.levels(), sim.land_dividend.levels());
    for t in (0..horizon).rev() {
        let r = sim.rates[t];
        vs[t] = gl * (vs[t + 1] + ds[t + 1]) / r;
        vl[t] = gl * (vl[t + 1] + dl[t + 1]) / r;
        b[t] = gl * b[t + 1] / r;
    }
    let q: Vec<f64> = vs.iter().zip(&b).map(|(v, bb)| v + theta * bb / n).collect();
    let p: Vec<f64> = vl.iter().zip(&b).map(|(v, bb)| v + (1.0 - theta) * bb / x).collect();

    let mut adding_up: f64 = 0.0;
    for t in 0..=horizon {
        adding_up = adding_up.max((n * q[t] + x * p[t] - s[t]).abs() / s[t]);
    }
    let (mut stock_arb, mut land_arb, mut growth): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for t in 0..horizon {
        let r = sim.rates[t];
        stock_arb = stock_arb.max((r * q[t] - gl * (q[t + 1] + ds[t + 1])).abs() / (r * q[t]));
        land_arb = land_arb.max((r * p[t] - gl * (p[t + 1] + dl[t + 1])).abs() / (r * p[t]));
        if b[t] > 0.0 {
            growth = growth.max((gl * b[t + 1] - r * b[t]).abs() / (r * b[t]));
        }
    }
    if adding_up > ARBITRAGE_TOLERANCE || stock_arb > ARBITRAGE_TOLERANCE || land_arb > ARBITRAGE_TOLERANCE {
        return Err(Error::Inconsistent("decomposed prices violate no-arbitrage"));
    }
    Ok(BubbleDecomposition {
        theta,
        stock_value: TrendedPath::new(gl, vs)?,
        land_value: TrendedPath::new(gl, vl)?,
        bubble: TrendedPath::new(gl, b)?,
        stock_price: TrendedPath::new(gl, q)?,
        land_price: TrendedPath::new(gl, p)?,
        clamped,
        terminal_adjustment: adjust - 1.0,
        adding_up_residual: adding_up,
        stock_arbitrage_residual: stock_arb,
        land_arbitrage_residual: land_arb,
        bubble_growth_residual: growth,
    })
}
