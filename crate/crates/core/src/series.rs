//! Time series stored as detrended levels against a geometric trend.

use alloc::vec::Vec;

use crate::error::{positive, Error, Result};
use crate::math::{ln, powi};

/// `x_t · Γ^t` for `t = 0..=T`, stored as the trend factor `Γ` and the
/// detrended levels `x_t`. Keeping the trend separate lets long horizons of
/// fast-growing series stay in floating-point range.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendedPath {
    growth: f64,
    levels: Vec<f64>,
}

impl TrendedPath {
    pub fn new(growth: f64, levels: Vec<f64>) -> Result<Self> {
        positive("trend factor", growth)?;
        if let Some(&bad) = levels.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain {
                what: "non-finite series level",
                value: bad,
            });
        }
        Ok(TrendedPath { growth, levels })
    }

    /// Untrended series (`Γ = 1`).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(1.0, values)
    }

    /// `level · growth^t` for `t = 0..=horizon`.
    pub fn geometric(level: f64, growth: f64, horizon: usize) -> Result<Self> {
        Self::new(growth, alloc::vec![level; horizon + 1])
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Last date `T`; zero for an empty path.
    pub fn horizon(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn level(&self, t: usize) -> f64 {
        self.levels[t]
    }

    pub fn value(&self, t: usize) -> f64 {
        self.levels[t] * powi(self.growth, t)
    }

    pub fn ln_value(&self, t: usize) -> f64 {
        ln(self.levels[t]) + t as f64 * ln(self.growth)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|t| self.value(t)).collect()
    }

    /// Same series expressed against another trend factor.
    pub fn retrend(&self, growth: f64) -> Result<Self> {
        positive("trend factor", growth)?;
        let factor = self.growth / growth;
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(t, x)| x * powi(factor, t))
            .collect();
        Self::new(growth, levels)
    }

    /// Pointwise quotient `self_t / other_t`, trend `Γ_self / Γ_other`.
    pub fn ratio(&self, other: &TrendedPath) -> Result<Self> {
        if other.len() != self.len() {
            return Err(Error::Length {
                expected: self.len(),
                found: other.len(),
            });
        }
        let levels = self.levels.iter().zip(&other.levels).map(|(x, y)| x / y).collect();
        Self::new(self.growth / other.growth, levels)
    }

    /// First `horizon + 1` entries.
    pub fn truncate(&self, horizon: usize) -> Self {
        let n = (horizon + 1).min(self.len());
        TrendedPath {
            growth: self.growth,
            levels: self.levels[..n].to_vec(),
        }
    }

    /// Gross return `(P_{t+1} + D_{t+1}) / P_t` of an asset with these prices
    /// and the given dividends, computed without forming raw levels.
    pub fn gross_return(&self, dividends: &TrendedPath, t: usize) -> f64 {
        let rel = powi(dividends.growth / self.growth, t + 1);
        self.growth * (self.levels[t + 1] + dividends.levels[t + 1] * rel) / self.levels[t]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_applies_trend() {
        let p = TrendedPath::geometric(2.0, 1.5, 3).unwrap();
        assert_eq!(p.values(), alloc::vec![2.0, 3.0, 4.5, 6.75]);
        assert_eq!(p.horizon(), 3);
    }

    #[test]
    fn long_horizon_stays_finite() {
        let p = TrendedPath::geometric(1.0, 1.05, 20_000).unwrap();
        assert!(p.ln_value(20_000).is_finite());
        assert!((p.ln_value(20_000) - 20_000.0 * ln(1.05)).abs() < 1e-9);
    }

    #[test]
    fn ratio_of_paths() {
        let p = TrendedPath::geometric(2.0, 1.2, 5).unwrap();
        let d = TrendedPath::geometric(1.0, 0.6, 5).unwrap();
        let y = d.ratio(&p).unwrap();
        assert!((y.value(3) - 0.5 * 0.125).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TrendedPath::new(0.0, alloc::vec![1.0]).is_err());
        assert!(TrendedPath::new(1.0, alloc::vec![f64::NAN]).is_err());
        let a = TrendedPath::geometric(1.0, 1.0, 3).unwrap();
        let b = TrendedPath::geometric(1.0, 1.0, 4).unwrap();
        assert!(matches!(a.ratio(&b), Err(Error::Length { .. })));
    }

    #[test]
    fn gross_return_matches_raw_values() {
        let p = TrendedPath::new(1.1, alloc::vec![1.0, 0.9, 0.95]).unwrap();
        let d = TrendedPath::new(1.02, alloc::vec![0.1, 0.1, 0.1]).unwrap();
        let raw = (p.value(2) + d.value(2)) / p.value(1);
        assert!((p.gross_return(&d, 1) - raw).abs() < 1e-14);
    }
}
