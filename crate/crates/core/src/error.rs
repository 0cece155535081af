use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Side on which a forward orbit left its admissible region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Escape {
    /// The next price would have to be negative.
    Below,
    /// Consumption of the young would be non-positive.
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain { what: &'static str, value: f64 },
    /// The hypothesis of a closed-form construction does not hold.
    Hypothesis(&'static str),
    /// A root could not be bracketed.
    NoBracket(&'static str),
    /// A threshold equation has no solution in the kernel's marginal-rate range.
    ThresholdUnattainable { target: f64 },
    /// The implicit one-step map has no admissible solution.
    PathInfeasible(Escape),
    /// A present-value sum does not converge.
    FundamentalValueDivergent { tail_ratio: f64 },
    /// No steady state with a positive price exists.
    NoSteadyState,
    /// The steady state is not a saddle point.
    NotSaddle { lambda1: f64, lambda2: f64 },
    /// `d = 0`: the implicit function theorem cannot be applied.
    ImplicitFunctionInapplicable,
    /// `n/d = ±1`: the stable manifold theorem cannot be applied.
    Resonant { lambda1: f64 },
    /// Shooting failed to enclose the stable manifold.
    ManifoldNotFound,
    /// Input series have inconsistent lengths.
    Length { expected: usize, found: usize },
    /// A numerical consistency check failed.
    Inconsistent(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "domain error: {what} (got {value})"),
            Error::Hypothesis(msg) => write!(f, "hypothesis violated: {msg}"),
            Error::NoBracket(what) => write!(f, "root not bracketed: {what}"),
            Error::ThresholdUnattainable { target } => {
                write!(f, "threshold unattainable: marginal-rate ratio never reaches {target}")
            }
            Error::PathInfeasible(Escape::Below) => {
                write!(f, "path infeasible: next price would be negative")
            }
            Error::PathInfeasible(Escape::Above) => {
                write!(f, "path infeasible: consumption would be non-positive")
            }
            Error::FundamentalValueDivergent { tail_ratio } => {
                write!(f, "fundamental value divergent (tail ratio {tail_ratio})")
            }
            Error::NoSteadyState => write!(f, "no steady state with positive price"),
            Error::NotSaddle { lambda1, lambda2 } => {
                write!(
                    f,
                    "steady state is not a saddle (lambda1 = {lambda1}, lambda2 = {lambda2})"
                )
            }
            Error::ImplicitFunctionInapplicable => {
                write!(f, "implicit function theorem inapplicable (d = 0)")
            }
            Error::Resonant { lambda1 } => {
                write!(f, "stable manifold theorem inapplicable (n/d = {lambda1})")
            }
            Error::ManifoldNotFound => write!(f, "stable manifold not found in bracket"),
            Error::Length { expected, found } => {
                write!(f, "series length mismatch: expected {expected}, found {found}")
            }
            Error::Inconsistent(msg) => write!(f, "inconsistent result: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn positive(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}

pub(crate) fn non_negative(what: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}
