//! Two-period utility kernels and period utilities.
//!
//! Kernels are homogeneous of degree one in (young, old) consumption, so
//! every marginal quantity depends on the consumption ratio only.

use crate::error::{positive, Error, Result};
use crate::math::{ln, powf};

/// Value and exact first and second partial derivatives of `U(y, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub u: f64,
    pub u_y: f64,
    pub u_z: f64,
    pub u_yy: f64,
    pub u_yz: f64,
    pub u_zz: f64,
}

/// Degree-one homogeneous utility over young consumption `y` and old
/// consumption `z`.
///
/// `CobbDouglas { beta }` is `y^(1-beta) z^beta`, the homogeneous
/// representation of `(1-beta) log y + beta log z`.
/// `Ces { beta, eps }` is `((1-beta) y^r + beta z^r)^(1/r)` with
/// `r = 1 - 1/eps`; `eps` is the intertemporal elasticity of substitution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UtilityKernel {
    CobbDouglas { beta: f64 },
    Ces { beta: f64, eps: f64 },
}

impl UtilityKernel {
    pub fn cobb_douglas(beta: f64) -> Result<Self> {
        check_weight(beta)?;
        Ok(UtilityKernel::CobbDouglas { beta })
    }

    /// CES kernel; `eps == 1` yields the Cobb–Douglas kernel directly.
    pub fn ces(beta: f64, eps: f64) -> Result<Self> {
        check_weight(beta)?;
        positive("CES elasticity eps", eps)?;
        if eps == 1.0 {
            Ok(UtilityKernel::CobbDouglas { beta })
        } else {
            Ok(UtilityKernel::Ces { beta, eps })
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            UtilityKernel::CobbDouglas { beta } | UtilityKernel::Ces { beta, .. } => beta,
        }
    }

    /// Whether `U_y(0, z) = U_z(y, 0) = ∞`. CES kernels with `eps < 1` have
    /// finite marginal utility at zero consumption.
    pub fn inada_satisfied(&self) -> bool {
        match *self {
            UtilityKernel::CobbDouglas { .. } => true,
            UtilityKernel::Ces { eps, .. } => eps >= 1.0,
        }
    }

    pub fn eval(&self, y: f64, z: f64) -> Result<Partials> {
        check_consumption(y, z)?;
        Ok(self.eval_unchecked(y, z))
    }

    pub(crate) fn eval_unchecked(&self, y: f64, z: f64) -> Partials {
        match *self {
            UtilityKernel::CobbDouglas { beta } => {
                let u = powf(y, 1.0 - beta) * powf(z, beta);
                let u_y = (1.0 - beta) * u / y;
                let u_z = beta * u / z;
                let u_yz = (1.0 - beta) * beta * u / (y * z);
                Partials {
                    u,
                    u_y,
                    u_z,
                    u_yy: -(z / y) * u_yz,
                    u_yz,
                    u_zz: -(y / z) * u_yz,
                }
            }
            UtilityKernel::Ces { beta, eps } => {
                let r = 1.0 - 1.0 / eps;
                // factor out max(y, z) so the power sum stays in range
                let scale = if y > z { y } else { z };
                let (ys, zs) = (y / scale, z / scale);
                let u = scale * powf((1.0 - beta) * powf(ys, r) + beta * powf(zs, r), 1.0 / r);
                let u_y = (1.0 - beta) * powf(u / y, 1.0 / eps);
                let u_z = beta * powf(u / z, 1.0 / eps);
                let u_yz = u_y * u_z / (eps * u);
                Partials {
                    u,
                    u_y,
                    u_z,
                    u_yy: -(z / y) * u_yz,
                    u_yz,
                    u_zz: -(y / z) * u_yz,
                }
            }
        }
    }

    /// Marginal-rate ratio `U_y / U_z` at `(y, z)`.
    pub fn mrs_ratio(&self, y: f64, z: f64) -> Result<f64> {
        check_consumption(y, z)?;
        Ok(self.mrs_unchecked(y, z))
    }

    #[inline]
    pub(crate) fn mrs_unchecked(&self, y: f64, z: f64) -> f64 {
        match *self {
            UtilityKernel::CobbDouglas { beta } => (1.0 - beta) / beta * (z / y),
            UtilityKernel::Ces { beta, eps } => (1.0 - beta) / beta * powf(z / y, 1.0 / eps),
        }
    }
}

impl UtilityKernel {
    /// Relative residual of the Euler equation `U_y·price = U_z·payoff` at
    /// consumption `(y, z)`.
    pub fn euler_residual(&self, y: f64, z: f64, price: f64, payoff: f64) -> f64 {
        let lhs = self.mrs_unchecked(y, z) * price;
        (lhs - payoff).abs() / lhs.abs().max(payoff.abs())
    }
}

fn check_weight(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "utility weight beta must lie in (0, 1)",
            value: beta,
        })
    }
}

fn check_consumption(y: f64, z: f64) -> Result<()> {
    positive("young consumption", y)?;
    positive("old consumption", z)?;
    Ok(())
}

/// Period utility `u(c)` of an infinitely lived agent.
pub trait PeriodUtility {
    fn value(&self, c: f64) -> f64;
    fn marginal(&self, c: f64) -> f64;
    fn marginal_slope(&self, c: f64) -> f64;
}

/// Constant relative risk aversion; `gamma = 1` is logarithmic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrraUtility {
    gamma: f64,
}

impl CrraUtility {
    pub fn new(gamma: f64) -> Result<Self> {
        positive("relative risk aversion gamma", gamma)?;
        Ok(CrraUtility { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl PeriodUtility for CrraUtility {
    fn value(&self, c: f64) -> f64 {
        if self.gamma == 1.0 {
            ln(c)
        } else {
            powf(c, 1.0 - self.gamma) / (1.0 - self.gamma)
        }
    }

    fn marginal(&self, c: f64) -> f64 {
        if self.gamma == 1.0 {
            1.0 / c
        } else {
            powf(c, -self.gamma)
        }
    }

    fn marginal_slope(&self, c: f64) -> f64 {
        -self.gamma * self.marginal(c) / c
    }
}
