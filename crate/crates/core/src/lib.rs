//! Numerical laboratory for deterministic rational-bubble economies.
//!
//! The crate is `no_std` (it needs `alloc` only) and contains the pure
//! numerics: utility kernels with exact derivatives, Arrow–Debreu pricing and
//! the dividend-yield bubble test, closed-form equilibria of the solvable
//! overlapping-generations and Bewley economies, saddle-path computation for
//! the detrended price dynamics, and the two-sector stock/land economy.
//!
//! File formats, scenario configuration and the command line live in the
//! `bubblelab` companion crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

mod error;
mod math;

pub mod closed_form;
pub mod economy;
pub mod pricing;
pub mod roots;
pub mod saddle;
pub mod series;
pub mod stock_land;
pub mod utility;
pub mod verdict;

pub use economy::GrowthEconomy;
pub use error::{Error, Escape, Result};
pub use series::TrendedPath;
pub use utility::{CrraUtility, Partials, PeriodUtility, UtilityKernel};
pub use verdict::{BubbleClass, BubbleVerdict};
