use alloc::vec;
use alloc::vec::Vec;

use super::detect::detect_bubble;
use super::fit_window_start;
use super::ladder::ArrowDebreuLadder;
use super::value::{bubble_component, BubbleComponent};
use crate::error::{positive, Error, Result};
use crate::math::{exp, ln};
use crate::series::TrendedPath;
use crate::verdict::{BubbleClass, BubbleVerdict};

const ACCOUNTING_TOLERANCE: f64 = 1e-10;
/// Largest tolerated forward error bound on a stock price, relative to it.
const PRECISION_LIMIT: f64 = 1e-8;

/// Per-share and aggregate series of a firm that issues or repurchases
/// shares. `dividend_per_share[0]` is not determined by the inputs and is
/// set to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FirmSeries {
    pub shares: Vec<f64>,
    pub cashflows: Vec<f64>,
    pub stock_price: Vec<f64>,
    pub dividend_per_share: Vec<f64>,
    pub firm_value: Vec<f64>,
    /// Dates at which the implied dividend per share is negative.
    pub negative_dividends: Vec<usize>,
    /// Largest relative residual of `p_t S_t + C_t = (p_t + d_t) S_{t-1}`.
    pub accounting_residual: f64,
}

/// Derives stock prices and dividends per share from the share path `S_t`,
/// free cash flows `C_t`, gross rates `R_t` and the initial price `p_0`.
///
/// No-arbitrage gives `p_{t+1} + d_{t+1} = R_t p_t`; substituting into the
/// accounting identity `C_{t+1} = d_{t+1} S_t + p_{t+1}(S_t - S_{t+1})`
/// pins `p_{t+1} = (R_t p_t S_t - C_{t+1}) / S_{t+1}`.
///
/// The firm value obeys `P_{t+1} = R_t P_t - C_{t+1}`, which amplifies any
/// rounding like a bubble. A running bound on that error is carried along:
/// implied dividends smaller than it are set to zero, and the computation
/// fails once it reaches `1e-8` of the price.
pub fn firm_accounting(shares: &[f64], cashflows: &[f64], rates: &[f64], p0: f64) -> Result<FirmSeries> {
    let n = shares.len();
    if n < 2 {
        return Err(Error::Length { expected: 2, found: n });
    }
    if cashflows.len() != n {
        return Err(Error::Length {
            expected: n,
            found: cashflows.len(),
        });
    }
    if rates.len() + 1 < n {
        return Err(Error::Length {
            expected: n - 1,
            found: rates.len(),
        });
    }
    for &s in shares {
        positive("shares outstanding", s)?;
    }
    for &r in &rates[..n - 1] {
        positive("gross risk-free rate", r)?;
    }
    positive("initial stock price", p0)?;

    let mut price = vec![0.0; n];
    let mut dividend = vec![0.0; n];
    price[0] = p0;
    let mut negative_dividends = Vec::new();
    let mut accounting_residual: f64 = 0.0;
    // absolute error bound on the firm value p_t S_t
    let mut value_error = f64::EPSILON * p0 * shares[0];
    for t in 0..n - 1 {
        let cum = rates[t] * price[t];
        let next = (cum * shares[t] - cashflows[t + 1]) / shares[t + 1];
        if next <= 0.0 {
            return Err(Error::Inconsistent("cash flows force a non-positive stock price"));
        }
        price[t + 1] = next;
        let carried = rates[t] * value_error;
        value_error = carried + 4.0 * f64::EPSILON * (cum * shares[t] + cashflows[t + 1].abs());
        if value_error > PRECISION_LIMIT * next * shares[t + 1] {
            return Err(Error::Inconsistent(
                "forward accounting lost precision: rounding amplified beyond 1e-8",
            ));
        }
        let noise = carried / shares[t] + value_error / shares[t + 1] + 4.0 * f64::EPSILON * cum;
        let implied = cum - next;
        dividend[t + 1] = if implied.abs() <= noise { 0.0 } else { implied };
        if dividend[t + 1] < 0.0 {
            negative_dividends.push(t + 1);
        }
        let lhs = next * shares[t + 1] + cashflows[t + 1];
        let rhs = (next + dividend[t + 1]) * shares[t];
        let scale = lhs.abs().max(rhs.abs()).max(cashflows[t + 1].abs());
        accounting_residual = accounting_residual.max((lhs - rhs).abs() / scale);
    }
    if accounting_residual > ACCOUNTING_TOLERANCE {
        return Err(Error::Inconsistent("cash-flow accounting identity violated"));
    }
    let firm_value = price.iter().zip(shares).map(|(p, s)| p * s).collect();
    Ok(FirmSeries {
        shares: shares.to_vec(),
        cashflows: cashflows.to_vec(),
        stock_price: price,
        dividend_per_share: dividend,
        firm_value,
        negative_dividends,
        accounting_residual,
    })
}

/// Long-run behaviour of the share count on the fit window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShareTrend {
    /// Shares stay bounded and bounded away from zero.
    Bounded,
    /// Shares shrink geometrically toward zero.
    Vanishing,
    /// Shares grow geometrically without bound.
    Unbounded,
    /// Share count is not monotone on the fit window.
    Unclassifiable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirmVerdicts {
    /// Yield test on `(p_t, d_t)`.
    pub stock_series: BubbleVerdict,
    /// Yield test on `(P_t, C_t)`.
    pub value_series: BubbleVerdict,
    pub share_trend: ShareTrend,
    /// Final stock verdict after the share-limit rules.
    pub stock: BubbleClass,
    /// Final firm-value verdict after the share-limit rules.
    pub value: BubbleClass,
    /// The share-limit rules agree with the yield tests.
    pub consistent: bool,
    /// `lim q_t p_t`.
    pub stock_limit: BubbleComponent,
    /// `lim q_t P_t`.
    pub value_limit: BubbleComponent,
}

/// Bubble verdicts for the stock and for the firm value.
///
/// Vanishing shares force a fundamental firm value; unbounded shares force a
/// fundamental stock; bounded shares require both tests to agree.
pub fn classify_firm_bubbles(series: &FirmSeries, ladder: &ArrowDebreuLadder, margin: f64) -> Result<FirmVerdicts> {
    let horizon = series.shares.len() - 1;
    let dividends = series.dividend_per_share.clone();
    let stock_price = TrendedPath::from_values(series.stock_price.clone())?;
    let firm_value = TrendedPath::from_values(series.firm_value.clone())?;
    let stock_series = detect_bubble(&stock_price, &TrendedPath::from_values(dividends)?, margin)?;
    let value_series = detect_bubble(
        &firm_value,
        &TrendedPath::from_values(series.cashflows.clone())?,
        margin,
    )?;

    let share_trend = share_trend(&series.shares, horizon, margin);
    let (stock, value, consistent) = match share_trend {
        ShareTrend::Vanishing => (
            stock_series.class,
            BubbleClass::Fundamental,
            value_series.class == BubbleClass::Fundamental,
        ),
        ShareTrend::Unbounded => (
            BubbleClass::Fundamental,
            value_series.class,
            stock_series.class == BubbleClass::Fundamental,
        ),
        ShareTrend::Bounded => (
            stock_series.class,
            value_series.class,
            stock_series.class == value_series.class,
        ),
        ShareTrend::Unclassifiable => (stock_series.class, value_series.class, true),
    };
    Ok(FirmVerdicts {
        stock_series,
        value_series,
        share_trend,
        stock,
        value,
        consistent,
        stock_limit: bubble_component(&stock_price, ladder)?,
        value_limit: bubble_component(&firm_value, ladder)?,
    })
}

fn share_trend(shares: &[f64], horizon: usize, margin: f64) -> ShareTrend {
    let start = fit_window_start(horizon, 3);
    let window = &shares[start..=horizon];
    let rising = window.windows(2).all(|w| w[1] >= w[0]);
    let falling = window.windows(2).all(|w| w[1] <= w[0]);
    if !rising && !falling {
        return ShareTrend::Unclassifiable;
    }
    let ratio = exp((ln(shares[horizon]) - ln(shares[start])) / (horizon - start) as f64);
    if ratio < 1.0 - margin {
        ShareTrend::Vanishing
    } else if ratio > 1.0 + margin {
        ShareTrend::Unbounded
    } else {
        ShareTrend::Bounded
    }
}
