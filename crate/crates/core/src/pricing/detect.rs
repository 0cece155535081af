use super::fit_window_start;
use super::ladder::ArrowDebreuLadder;
use crate::error::{Error, Result};
use crate::math::{exp, ln, ln_1p};
use crate::series::TrendedPath;
use crate::verdict::{BubbleClass, BubbleVerdict};

/// Default width of the inconclusive band below a tail ratio of one.
pub const DEFAULT_MARGIN: f64 = 0.01;

/// Decides whether the dividend-yield series `Σ_{t≥1} D_t/P_t` converges,
/// which for a positive price in a deterministic economy is equivalent to
/// the price containing a bubble.
///
/// On the last third of the horizon the yields are fitted twice:
/// a geometric ratio `r` (`y_{t+1} ≈ r y_t`) and a power-law exponent `k`
/// (`y_t ≈ c t^{-k}`). The verdict is
///
/// * `Bubbly` if `r < 1 - margin` (geometric decay, summable tail),
/// * `Fundamental` if `r ≥ 1 - margin` and `k ≤ 1 - margin`, i.e. the
///   partial sums grow faster than `log T`,
/// * `Inconclusive` otherwise.
///
/// Zero dividends give zero yields; a positive price with vanishing
/// dividends on the fit window is bubbly.
pub fn detect_bubble(prices: &TrendedPath, dividends: &TrendedPath, margin: f64) -> Result<BubbleVerdict> {
    if prices.len() != dividends.len() {
        return Err(Error::Length {
            expected: prices.len(),
            found: dividends.len(),
        });
    }
    let horizon = prices.horizon();
    if horizon < 3 {
        return Err(Error::Domain {
            what: "detector horizon must be at least 3",
            value: horizon as f64,
        });
    }
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::Domain {
            what: "detector margin must lie in [0, 1)",
            value: margin,
        });
    }
    if let Some(&bad) = prices.levels().iter().find(|p| **p <= 0.0) {
        return Err(Error::Domain {
            what: "non-positive price",
            value: bad,
        });
    }
    if let Some(&bad) = dividends.levels().iter().find(|d| **d < 0.0) {
        return Err(Error::Domain {
            what: "negative dividend",
            value: bad,
        });
    }

    let rel = ln(dividends.growth()) - ln(prices.growth());
    let ln_yield = |t: usize| {
        let d = dividends.level(t);
        if d == 0.0 {
            f64::NEG_INFINITY
        } else {
            ln(d) - ln(prices.level(t)) + t as f64 * rel
        }
    };
    let partial_sum: f64 = (1..=horizon).map(|t| exp(ln_yield(t))).sum();

    let start = fit_window_start(horizon, 3);
    let first = (start..=horizon).find(|&t| dividends.level(t) > 0.0);
    let Some(first) = first else {
        return Ok(BubbleVerdict {
            class: BubbleClass::Bubbly,
            partial_sum,
            tail_ratio: 0.0,
            tail_bound: 0.0,
            decay_exponent: f64::INFINITY,
        });
    };
    let last = (first..=horizon)
        .rev()
        .find(|&t| dividends.level(t) > 0.0)
        .unwrap_or(first);
    let (tail_ratio, decay_exponent) = if last == first {
        (1.0, 0.0)
    } else {
        let rise = ln_yield(last) - ln_yield(first);
        (
            exp(rise / (last - first) as f64),
            -rise / (ln(last as f64) - ln(first as f64)),
        )
    };
    let tail_bound = if tail_ratio < 1.0 {
        exp(ln_yield(horizon)) * tail_ratio / (1.0 - tail_ratio)
    } else {
        f64::INFINITY
    };
    let class = if tail_ratio < 1.0 - margin {
        BubbleClass::Bubbly
    } else if decay_exponent <= 1.0 - margin {
        BubbleClass::Fundamental
    } else {
        BubbleClass::Inconclusive
    };
    Ok(BubbleVerdict {
        class,
        partial_sum,
        tail_ratio,
        tail_bound,
        decay_exponent,
    })
}

/// The three terms of `1 + Σ y_t ≤ q_0P_0/(q_TP_T) ≤ exp(Σ y_t)`, in logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub ln_lower: f64,
    pub ln_middle: f64,
    pub ln_upper: f64,
}

impl Sandwich {
    /// Both inequalities hold up to `slack` in the log domain.
    pub fn holds(&self, slack: f64) -> bool {
        self.ln_lower <= self.ln_middle + slack && self.ln_middle <= self.ln_upper + slack
    }
}

/// Evaluates the yield sandwich at date `horizon` for a price path, its
/// dividends and the Arrow–Debreu ladder of the same economy.
pub fn yield_sandwich(
    prices: &TrendedPath,
    dividends: &TrendedPath,
    ladder: &ArrowDebreuLadder,
    horizon: usize,
) -> Result<Sandwich> {
    check_horizon(prices, dividends, ladder, horizon)?;
    let sum: f64 = (1..=horizon).map(|t| dividends.value(t) / prices.value(t)).sum();
    Ok(Sandwich {
        ln_lower: ln_1p(sum),
        ln_middle: prices.ln_value(0) - ladder.ln_q(horizon) - prices.ln_value(horizon),
        ln_upper: sum,
    })
}

/// Relative residual of `P_0 = Σ_{t=1}^{T} q_t D_t + q_T P_T`.
pub fn pricing_identity_residual(
    prices: &TrendedPath,
    dividends: &TrendedPath,
    ladder: &ArrowDebreuLadder,
    horizon: usize,
) -> Result<f64> {
    check_horizon(prices, dividends, ladder, horizon)?;
    let discounted: f64 = (1..=horizon).map(|t| ladder.q(t) * dividends.value(t)).sum();
    let resale = exp(ladder.ln_q(horizon) + prices.ln_value(horizon));
    let p0 = prices.value(0);
    Ok((p0 - discounted - resale).abs() / p0)
}

fn check_horizon(
    prices: &TrendedPath,
    dividends: &TrendedPath,
    ladder: &ArrowDebreuLadder,
    horizon: usize,
) -> Result<()> {
    let available = prices.horizon().min(dividends.horizon()).min(ladder.horizon());
    if horizon > available || prices.is_empty() || dividends.is_empty() {
        return Err(Error::Length {
            expected: horizon,
            found: available,
        });
    }
    Ok(())
}
