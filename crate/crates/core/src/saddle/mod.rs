//! Detrended autonomous systems for the two long-run regimes of the growing
//! overlapping-generations economy: steady states, analytic Jacobians,
//! stable-manifold shooting, backward extension and regime classification.
//!
//! The state is `(price, weight)` where `price` is the asset price divided by
//! its trend (`Gd^t` in the fundamental variant, `G^t` in the bubbly one) and
//! `weight = (Gd/G)^t`.

mod dynamics;
mod path;
mod regime;

pub use dynamics::extend_backward;
pub use path::{bubbly_witnesses, shoot, stable_path, ShootingConfig, StablePath};
pub use regime::{classify_regime, regime_row, threshold_w, Regime, RegimeReport, RegimeRow};

use core::fmt;

use crate::economy::GrowthEconomy;
use crate::error::{Error, Result};
use crate::math::powi;
use crate::utility::UtilityKernel;

/// Relative tolerance below which `d` counts as zero.
const SINGULAR_TOLERANCE: f64 = 1e-10;
/// Distance of `lambda1` from `±1` below which the steady state is resonant.
const RESONANCE_TOLERANCE: f64 = 1e-8;
/// Knife-edge tolerance on existence conditions.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Price detrended by dividend growth `Gd`.
    Fundamental,
    /// Price detrended by endowment growth `G`.
    Bubbly,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Fundamental => "fundamental",
            Variant::Bubbly => "bubbly",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Point of the detrended system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub price: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetrendedSystem {
    variant: Variant,
    econ: GrowthEconomy,
    kernel: UtilityKernel,
}

impl DetrendedSystem {
    /// Requires a positive old endowment so that the old always consume.
    pub fn new(variant: Variant, econ: GrowthEconomy, kernel: UtilityKernel) -> Result<Self> {
        if !(econ.b > 0.0) {
            return Err(Error::Domain {
                what: "old endowment b must be positive",
                value: econ.b,
            });
        }
        Ok(DetrendedSystem { variant, econ, kernel })
    }

    pub fn fundamental(econ: GrowthEconomy, kernel: UtilityKernel) -> Result<Self> {
        Self::new(Variant::Fundamental, econ, kernel)
    }

    pub fn bubbly(econ: GrowthEconomy, kernel: UtilityKernel) -> Result<Self> {
        Self::new(Variant::Bubbly, econ, kernel)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn economy(&self) -> &GrowthEconomy {
        &self.econ
    }

    pub fn kernel(&self) -> &UtilityKernel {
        &self.kernel
    }

    /// Growth factor used to detrend the price.
    pub fn trend(&self) -> f64 {
        match self.variant {
            Variant::Fundamental => self.econ.gd,
            Variant::Bubbly => self.econ.g,
        }
    }

    /// `Gd/G`, the exact growth factor of the weight.
    pub fn decay(&self) -> f64 {
        self.econ.gd / self.econ.g
    }

    pub fn weight_at(&self, t: usize) -> f64 {
        powi(self.decay(), t)
    }

    /// Young consumption, old consumption and asset payoff at the next date,
    /// all in units of `G^t`, given today's state and tomorrow's price.
    /// The Euler equation reads `(U_y/U_z)(y, z)·price = payoff`.
    pub(crate) fn allocation(&self, state: State, next_price: f64) -> (f64, f64, f64) {
        let GrowthEconomy { a, b, g, d, gd } = self.econ;
        match self.variant {
            Variant::Fundamental => {
                let payoff = gd * (next_price + d);
                (a - state.price * state.weight, g * b + payoff * state.weight, payoff)
            }
            Variant::Bubbly => {
                let payoff = g * (next_price + d * self.decay() * state.weight);
                (a - state.price, g * b + payoff, payoff)
            }
        }
    }

    /// First component of the implicit system, `payoff·U_z - price·U_y`.
    pub fn phi(&self, state: State, next: State) -> Result<[f64; 2]> {
        let (y, z, payoff) = self.allocation(state, next.price);
        let p = self.kernel.eval(y, z)?;
        Ok([
            payoff * p.u_z - state.price * p.u_y,
            next.weight - self.decay() * state.weight,
        ])
    }

    /// Relative Euler residual between `state` and a next-period price.
    pub fn euler_residual(&self, state: State, next_price: f64) -> f64 {
        let (y, z, payoff) = self.allocation(state, next_price);
        self.kernel.euler_residual(y, z, state.price, payoff)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SteadyStateFlags {
    pub exists: bool,
    pub saddle: bool,
    pub singular_d: bool,
    pub resonant: bool,
    pub boundary: bool,
    /// Bubbly variant with `d < 0`: a converging path exists but need not be
    /// unique.
    pub uniqueness_not_guaranteed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateReport {
    pub variant: Variant,
    /// Detrended steady-state price; `NaN` when no steady state exists in the
    /// fundamental variant, `0` at the corner of the bubbly variant.
    pub xi1_star: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Upper-right entry of the Jacobian of the one-step map.
    pub off_diagonal: f64,
    /// Slope `d price / d weight` of the stable eigenvector.
    pub slope: f64,
    pub d_value: Option<f64>,
    pub n_value: Option<f64>,
    /// `(U_y/U_z)(a, G b)`.
    pub autarky_ratio: f64,
    pub flags: SteadyStateFlags,
}

impl SteadyStateReport {
    /// Jacobian of the one-step map at the steady state.
    pub fn jacobian(&self) -> [[f64; 2]; 2] {
        [[self.lambda1, self.off_diagonal], [0.0, self.lambda2]]
    }

    /// Steady state as a point of the system.
    pub fn state(&self) -> State {
        State {
            price: self.xi1_star,
            weight: 0.0,
        }
    }
}

fn resonant(lambda1: f64) -> bool {
    (lambda1 - 1.0).abs() <= RESONANCE_TOLERANCE || (lambda1 + 1.0).abs() <= RESONANCE_TOLERANCE
}

/// Steady state and its linearization. Non-existence, singularity and
/// resonance are reported as flags.
pub fn steady_state(system: &DetrendedSystem) -> Result<SteadyStateReport> {
    let GrowthEconomy { a, b, g, d, gd } = system.econ;
    let kernel = &system.kernel;
    let autarky_ratio = kernel.mrs_ratio(a, g * b)?;
    let lambda2 = gd / g;
    match system.variant {
        Variant::Fundamental => {
            let gap = autarky_ratio - gd;
            let boundary = gap.abs() <= BOUNDARY_TOLERANCE * gd;
            let exists = gap > 0.0 && !boundary;
            let lambda1 = autarky_ratio / gd;
            let (xi1_star, off_diagonal) = if exists {
                let xi = gd * d / gap;
                let p = kernel.eval(a, g * b)?;
                let payoff = gd * (xi + d);
                let cross = xi * xi * p.u_yy - 2.0 * xi * payoff * p.u_yz + payoff * payoff * p.u_zz;
                (xi, -cross / (gd * p.u_z))
            } else {
                (f64::NAN, f64::NAN)
            };
            let resonant = resonant(lambda1);
            Ok(SteadyStateReport {
                variant: Variant::Fundamental,
                xi1_star,
                lambda1,
                lambda2,
                off_diagonal,
                slope: off_diagonal / (lambda2 - lambda1),
                d_value: None,
                n_value: None,
                autarky_ratio,
                flags: SteadyStateFlags {
                    exists,
                    saddle: exists && !resonant && lambda1.abs() > 1.0,
                    singular_d: false,
                    resonant,
                    boundary,
                    uniqueness_not_guaranteed: false,
                },
            })
        }
        Variant::Bubbly => {
            let w = b / a;
            let w_b = threshold_w(kernel, g, g)?;
            let boundary = (w - w_b).abs() <= BOUNDARY_TOLERANCE;
            let exists = w < w_b && !boundary;
            let xi = if exists { (w_b * a - b) / (1.0 + w_b) } else { 0.0 };
            let p = kernel.eval(a - xi, g * (b + xi))?;
            let d_value = g * (p.u_z + g * xi * p.u_zz - xi * p.u_yz);
            let n_value = g * xi * p.u_yz + p.u_y - xi * p.u_yy;
            let singular_d = d_value.abs() <= SINGULAR_TOLERANCE * n_value.abs();
            let lambda1 = if singular_d { f64::NAN } else { n_value / d_value };
            let off_diagonal = -d * gd / g;
            let resonant = !singular_d && resonant(lambda1);
            Ok(SteadyStateReport {
                variant: Variant::Bubbly,
                xi1_star: xi,
                lambda1,
                lambda2,
                off_diagonal,
                slope: off_diagonal / (lambda2 - lambda1),
                d_value: Some(d_value),
                n_value: Some(n_value),
                autarky_ratio,
                flags: SteadyStateFlags {
                    exists,
                    saddle: exists && !singular_d && !resonant && lambda1.abs() > 1.0,
                    singular_d,
                    resonant,
                    boundary,
                    uniqueness_not_guaranteed: exists && d_value < 0.0,
                },
            })
        }
    }
}

/// Steady state with its eigen-structure, failing when the implicit function
/// theorem does not apply.
pub fn linearize(system: &DetrendedSystem) -> Result<SteadyStateReport> {
    let report = steady_state(system)?;
    if !report.flags.exists {
        return Err(Error::NoSteadyState);
    }
    if report.flags.singular_d {
        return Err(Error::ImplicitFunctionInapplicable);
    }
    Ok(report)
}
