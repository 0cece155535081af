use crate::error::{non_negative, positive, Error, Result};
use crate::math::powi;

/// Geometric endowment and dividend primitives: young endowment `a·G^t`,
/// old endowment `b·G^t`, dividend `D·Gd^t` with `0 < Gd < G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEconomy {
    pub a: f64,
    pub b: f64,
    pub g: f64,
    pub d: f64,
    pub gd: f64,
}

impl GrowthEconomy {
    pub fn new(a: f64, b: f64, g: f64, d: f64, gd: f64) -> Result<Self> {
        positive("young endowment a", a)?;
        non_negative("old endowment b", b)?;
        positive("growth factor G", g)?;
        positive("dividend D", d)?;
        positive("dividend growth Gd", gd)?;
        if gd >= g {
            return Err(Error::Domain {
                what: "dividend growth Gd must be below G",
                value: gd,
            });
        }
        Ok(GrowthEconomy { a, b, g, d, gd })
    }

    /// Old-to-young income ratio `b/a`.
    pub fn income_ratio(&self) -> f64 {
        self.b / self.a
    }

    /// `Gd/G`, the per-period factor of the auxiliary state.
    pub fn relative_dividend_growth(&self) -> f64 {
        self.gd / self.g
    }

    pub fn young_endowment(&self, t: usize) -> f64 {
        self.a * powi(self.g, t)
    }

    pub fn old_endowment(&self, t: usize) -> f64 {
        self.b * powi(self.g, t)
    }

    pub fn dividend(&self, t: usize) -> f64 {
        self.d * powi(self.gd, t)
    }
}
