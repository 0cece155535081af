use alloc::vec;

use super::fit_window_start;
use super::ladder::ArrowDebreuLadder;
use crate::error::{Error, Result};
use crate::math::{exp, ln, powi};
use crate::series::TrendedPath;
use crate::verdict::BubbleClass;

const DIVERGENCE_ROUNDING: f64 = 1e-12;

/// Treatment of the dividend stream beyond the last date of the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailPolicy {
    /// Ignore dividends after the horizon.
    Truncate,
    /// Extrapolate `q_s D_s` geometrically with the ratio fitted on the
    /// last third of the horizon.
    #[default]
    Geometric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalValue {
    /// `V_t`, expressed against the dividends' trend.
    pub values: TrendedPath,
    /// Fitted limiting ratio of `q_{s+1}D_{s+1} / (q_s D_s)`; zero when the
    /// dividends vanish on the fit window.
    pub tail_ratio: f64,
}

/// Present value of future dividends `V_t = (1/q_t) Σ_{s>t} q_s D_s`.
///
/// Evaluated backwards as `V_t = (V_{t+1} + D_{t+1}) / R_t` starting from the
/// tail estimate at `T`, which keeps every quantity in detrended units.
pub fn fundamental_value(
    ladder: &ArrowDebreuLadder,
    dividends: &TrendedPath,
    tail: TailPolicy,
) -> Result<FundamentalValue> {
    let horizon = dividends.horizon();
    if ladder.horizon() < horizon {
        return Err(Error::Length {
            expected: horizon,
            found: ladder.horizon(),
        });
    }
    if horizon == 0 {
        return Err(Error::Domain {
            what: "dividend horizon must be positive",
            value: 0.0,
        });
    }
    if let Some(&bad) = dividends.levels().iter().find(|d| **d < 0.0) {
        return Err(Error::Domain {
            what: "negative dividend",
            value: bad,
        });
    }
    let growth = dividends.growth();
    let levels = dividends.levels();

    // ln(q_s D_s) in a shared normalisation
    let ln_term = |s: usize| ln(levels[s]) + ladder.ln_q(s) + s as f64 * ln(growth);
    let start = fit_window_start(horizon, 3);
    let tail_ratio = match (start..=horizon).find(|&s| levels[s] > 0.0) {
        None => 0.0,
        Some(first) => {
            let last = (first..=horizon).rev().find(|&s| levels[s] > 0.0).unwrap_or(first);
            if last == first {
                1.0
            } else {
                exp((ln_term(last) - ln_term(first)) / (last - first) as f64)
            }
        }
    };

    let mut v = vec![0.0; horizon + 1];
    v[horizon] = match tail {
        TailPolicy::Truncate => 0.0,
        TailPolicy::Geometric if levels[horizon] == 0.0 => 0.0,
        TailPolicy::Geometric => {
            if tail_ratio >= 1.0 - DIVERGENCE_ROUNDING {
                return Err(Error::FundamentalValueDivergent { tail_ratio });
            }
            levels[horizon] * tail_ratio / (1.0 - tail_ratio)
        }
    };
    let rates = ladder.rates();
    for t in (0..horizon).rev() {
        v[t] = growth * (v[t + 1] + levels[t + 1]) / rates[t];
    }
    Ok(FundamentalValue {
        values: TrendedPath::new(growth, v)?,
        tail_ratio,
    })
}

/// Limit of the discounted resale value `q_T P_T` and the implied bubble
/// `B_t = lim_T q_T P_T / q_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleComponent {
    /// Extrapolated `lim q_T P_T`, which equals `B_0`.
    pub limit: f64,
    /// `q_T P_T` at the last date.
    pub discounted_terminal: f64,
    /// Fitted decay ratio of the decrements of `q_t P_t` (zero once the
    /// sequence has converged to machine precision).
    pub decrement_ratio: f64,
    /// `B_t`, expressed against the price trend.
    pub bubble: TrendedPath,
    /// Whether `lim q_T P_T = 0`.
    pub no_bubble_condition: bool,
    pub class: BubbleClass,
}

const LIMIT_TOLERANCE: f64 = 1e-9;

/// Estimates `lim q_T P_T` from the last quarter of the horizon.
///
/// Along a no-arbitrage path `q_t P_t` is non-increasing and its decrements
/// are `q_t D_t`. The decrements are fitted with a geometric law and the
/// remaining decline is subtracted from `q_T P_T`. A sequence that rises by
/// more than rounding inside the fit window has no geometric fit and is
/// reported as inconclusive.
pub fn bubble_component(prices: &TrendedPath, ladder: &ArrowDebreuLadder) -> Result<BubbleComponent> {
    let horizon = prices.horizon();
    if ladder.horizon() < horizon {
        return Err(Error::Length {
            expected: horizon,
            found: ladder.horizon(),
        });
    }
    if horizon < 4 {
        return Err(Error::Domain {
            what: "horizon too short for a tail fit",
            value: horizon as f64,
        });
    }
    if let Some(&bad) = prices.levels().iter().find(|p| **p <= 0.0) {
        return Err(Error::Domain {
            what: "non-positive price",
            value: bad,
        });
    }
    // q_t P_t relative to P_0, so the scale is that of q_0 P_0 = 1
    let ln_p0 = prices.ln_value(0);
    let m = |t: usize| exp(ladder.ln_q(t) + prices.ln_value(t) - ln_p0);
    let start = fit_window_start(horizon, 4);
    let noise = 64.0 * f64::EPSILON;

    let mut class = None;
    let mut converged = true;
    for t in start..=horizon {
        let (prev, cur) = (m(t - 1), m(t));
        let step = prev - cur;
        if step < -noise * prev {
            class = Some(BubbleClass::Inconclusive);
        }
        if step > noise * prev {
            converged = false;
        }
    }
    let terminal = m(horizon);
    let (limit_rel, ratio) = if class.is_some() {
        (terminal, f64::NAN)
    } else if converged {
        (terminal, 0.0)
    } else {
        let first = m(start - 1) - m(start);
        let last = m(horizon - 1) - terminal;
        if first <= 0.0 || last <= 0.0 {
            class = Some(BubbleClass::Inconclusive);
            (terminal, f64::NAN)
        } else {
            let ratio = exp((ln(last) - ln(first)) / (horizon - start) as f64);
            if ratio >= 1.0 {
                (0.0, ratio)
            } else {
                ((terminal - last * ratio / (1.0 - ratio)).max(0.0), ratio)
            }
        }
    };
    let limit = limit_rel * prices.value(0);
    let no_bubble_condition = limit_rel <= LIMIT_TOLERANCE;
    let class = class.unwrap_or(if no_bubble_condition {
        BubbleClass::Fundamental
    } else {
        BubbleClass::Bubbly
    });

    let growth = prices.growth();
    let bubble = (0..=horizon)
        .map(|t| limit / (exp(ladder.ln_q(t)) * powi(growth, t)))
        .collect();
    Ok(BubbleComponent {
        limit,
        discounted_terminal: terminal * prices.value(0),
        decrement_ratio: ratio,
        bubble: TrendedPath::new(growth, bubble)?,
        no_bubble_condition,
        class,
    })
}
