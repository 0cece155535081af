//! One-step maps of the detrended systems.

use super::{DetrendedSystem, State, Variant};
use crate::error::{non_negative, positive, Error, Escape, Result};
use crate::roots::bisect;
use crate::utility::UtilityKernel;

const MAX_DOUBLINGS: usize = 2_000;

/// Unique `P ∈ (0, young)` solving the Euler equation
/// `(U_z/U_y)(young - P, old_next + payoff)·payoff = P` with
/// `payoff = price_next + dividend_next`. All quantities share one unit.
pub fn extend_backward(
    kernel: &UtilityKernel,
    young: f64,
    old_next: f64,
    price_next: f64,
    dividend_next: f64,
) -> Result<f64> {
    positive("young endowment", young)?;
    non_negative("old endowment", old_next)?;
    positive("next-period price", price_next)?;
    non_negative("next-period dividend", dividend_next)?;
    let payoff = price_next + dividend_next;
    let z = old_next + payoff;
    bisect(
        |p| payoff / kernel.mrs_unchecked(young - p, z) - p,
        0.0,
        young,
        "backward extension",
    )
}

/// Payoff `x ≥ 0` with `x / ρ(y, base + scale·x) = price`.
fn solve_payoff(kernel: &UtilityKernel, y: f64, base: f64, scale: f64, price: f64) -> Result<f64> {
    let h = |x: f64| x / kernel.mrs_unchecked(y, base + scale * x) - price;
    let mut hi = (2.0 * price * kernel.mrs_unchecked(y, base)).max(f64::MIN_POSITIVE);
    let mut doublings = 0;
    while h(hi) <= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::PathInfeasible(Escape::Above));
        }
    }
    bisect(h, 0.0, hi, "forward step")
}

impl DetrendedSystem {
    /// Next state on the equilibrium map. Fails with the escape direction
    /// when the price would turn negative or no price clears the market.
    pub fn forward_step(&self, state: State) -> Result<State> {
        if !(state.price.is_finite() && state.weight.is_finite()) {
            return Err(Error::Domain {
                what: "state must be finite",
                value: state.price,
            });
        }
        non_negative("weight", state.weight)?;
        if state.price < 0.0 {
            return Err(Error::PathInfeasible(Escape::Below));
        }
        let econ = &self.econ;
        let next_weight = self.decay() * state.weight;
        let price = match self.variant {
            Variant::Fundamental => {
                let y = econ.a - state.price * state.weight;
                if y <= 0.0 {
                    return Err(Error::PathInfeasible(Escape::Above));
                }
                let x = solve_payoff(&self.kernel, y, econ.g * econ.b, state.weight, state.price)?;
                x / econ.gd - econ.d
            }
            Variant::Bubbly => {
                let y = econ.a - state.price;
                if y <= 0.0 {
                    return Err(Error::PathInfeasible(Escape::Above));
                }
                let x = solve_payoff(&self.kernel, y, econ.g * econ.b, 1.0, state.price)?;
                x / econ.g - econ.d * next_weight
            }
        };
        if price < 0.0 {
            return Err(Error::PathInfeasible(Escape::Below));
        }
        Ok(State {
            price,
            weight: next_weight,
        })
    }

    /// Price at the date with weight `weight`, given next period's price.
    pub fn step_back(&self, next_price: f64, weight: f64) -> Result<f64> {
        non_negative("weight", weight)?;
        let econ = &self.econ;
        match self.variant {
            Variant::Fundamental => {
                if weight == 0.0 {
                    let rho = self.kernel.mrs_ratio(econ.a, econ.g * econ.b)?;
                    return Ok(econ.gd * (next_price + econ.d) / rho);
                }
                let scale = econ.gd * weight;
                let level = extend_backward(
                    &self.kernel,
                    econ.a,
                    econ.g * econ.b,
                    scale * next_price,
                    scale * econ.d,
                )?;
                Ok(level / weight)
            }
            Variant::Bubbly => {
                let next_weight = self.decay() * weight;
                extend_backward(
                    &self.kernel,
                    econ.a,
                    econ.g * econ.b,
                    econ.g * next_price,
                    econ.g * econ.d * next_weight,
                )
            }
        }
    }
}
