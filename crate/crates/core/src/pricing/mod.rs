//! Arrow–Debreu prices, fundamental values, the dividend-yield bubble test
//! and variable-share firm accounting.

mod detect;
mod firm;
mod ladder;
mod value;

pub use detect::{detect_bubble, pricing_identity_residual, yield_sandwich, Sandwich, DEFAULT_MARGIN};
pub use firm::{classify_firm_bubbles, firm_accounting, FirmSeries, FirmVerdicts, ShareTrend};
pub use ladder::{ladder_from_rates, ArrowDebreuLadder};
pub use value::{bubble_component, fundamental_value, BubbleComponent, FundamentalValue, TailPolicy};

/// Fraction of the horizon used to fit limiting ratios.
pub(crate) fn fit_window_start(horizon: usize, denominator: usize) -> usize {
    let start = horizon - horizon / denominator;
    start.clamp(1, horizon.saturating_sub(1).max(1))
}
