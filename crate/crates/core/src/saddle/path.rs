//! Stable-manifold shooting and equilibrium paths.

use alloc::vec;
use alloc::vec::Vec;

use super::{linearize, DetrendedSystem, State, SteadyStateReport, Variant};
use crate::economy::GrowthEconomy;
use crate::error::{Error, Escape, Result};
use crate::math::powi;
use crate::series::TrendedPath;
use crate::utility::UtilityKernel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    /// Date at which the linearization is trusted; derived from the steady
    /// state when `None`.
    pub start: Option<usize>,
    /// Half-width of the tube around the steady state; `None` uses half the
    /// steady-state price (floored at `1e-3·a` in the bubbly variant).
    pub tube_radius: Option<f64>,
    /// Forward steps after which an orbit that stayed in the tube counts as
    /// converging.
    pub max_steps: usize,
    pub max_bisections: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            start: None,
            tube_radius: None,
            max_steps: 20_000,
            max_bisections: 200,
        }
    }
}

impl ShootingConfig {
    pub fn start_date(&self, system: &DetrendedSystem, report: &SteadyStateReport) -> usize {
        if let Some(t) = self.start {
            return t;
        }
        let bound = 0.05 * (report.xi1_star / system.econ.d.max(1.0)).min(1.0);
        let decay = system.decay();
        let mut t = 0;
        let mut weight = 1.0;
        while weight > bound {
            t += 1;
            weight = powi(decay, t);
        }
        t
    }

    pub fn radius(&self, system: &DetrendedSystem, report: &SteadyStateReport) -> f64 {
        self.tube_radius.unwrap_or_else(|| match system.variant {
            Variant::Fundamental => 0.5 * report.xi1_star,
            Variant::Bubbly => (0.5 * report.xi1_star).max(1e-3 * system.econ.a),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StablePath {
    pub report: SteadyStateReport,
    /// Date at which the path was shot onto the stable manifold.
    pub shooting_date: usize,
    pub states: Vec<State>,
    pub prices: TrendedPath,
    pub dividends: TrendedPath,
    /// Largest relative Euler residual along the emitted path.
    pub euler_residual: f64,
    pub uniqueness_not_guaranteed: bool,
}

/// Sign of the deviation that makes the orbit from `start` leave the tube,
/// or 0 if it stays for `max_steps` steps.
fn escape_sign(
    system: &DetrendedSystem,
    start: State,
    center: f64,
    radius: f64,
    max_steps: usize,
    flip: bool,
) -> Result<i8> {
    let mut state = start;
    for step in 0..=max_steps {
        let dev = state.price - center;
        let escape = if dev > radius {
            Some(Escape::Above)
        } else if dev < -radius {
            Some(Escape::Below)
        } else if step == max_steps {
            None
        } else {
            match system.forward_step(state) {
                Ok(next) => {
                    state = next;
                    continue;
                }
                Err(Error::PathInfeasible(dir)) => Some(dir),
                Err(e) => return Err(e),
            }
        };
        let steps = match escape {
            // a failed step escapes one period later
            Some(_) if dev.abs() <= radius => step + 1,
            _ => step,
        };
        let sign = match escape {
            Some(Escape::Above) => 1,
            Some(Escape::Below) => -1,
            None => 0,
        };
        // with an oscillating unstable direction the deviation flips each step
        return Ok(if flip && steps % 2 == 1 { -sign } else { sign });
    }
    Ok(0)
}

/// Price on the stable manifold at the given weight, by bisection on the
/// escape direction of forward orbits.
pub fn shoot(
    system: &DetrendedSystem,
    report: &SteadyStateReport,
    weight: f64,
    config: &ShootingConfig,
) -> Result<f64> {
    if weight == 0.0 {
        return Ok(report.xi1_star);
    }
    let center = report.xi1_star;
    let radius = config.radius(system, report);
    let flip = report.lambda1 < 0.0;
    let sign = |price: f64| escape_sign(system, State { price, weight }, center, radius, config.max_steps, flip);
    let guess = center + report.slope * weight;
    let (mut lo, mut hi) = (guess - 0.9 * radius, guess + 0.9 * radius);
    let s_lo = sign(lo)?;
    if s_lo == 0 {
        return Ok(lo);
    }
    let s_hi = sign(hi)?;
    if s_hi == 0 {
        return Ok(hi);
    }
    if !(s_lo < 0 && s_hi > 0) {
        return Err(Error::ManifoldNotFound);
    }
    for _ in 0..config.max_bisections {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        match sign(mid)? {
            0 => return Ok(mid),
            s if s < 0 => lo = mid,
            _ => hi = mid,
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Equilibrium path converging to the steady state of `system`, for dates
/// `0..=horizon`. The path is shot onto the stable manifold at a late date
/// and extended backward, where the unstable direction contracts.
pub fn stable_path(system: &DetrendedSystem, horizon: usize, config: &ShootingConfig) -> Result<StablePath> {
    if horizon == 0 {
        return Err(Error::Domain {
            what: "horizon must be positive",
            value: 0.0,
        });
    }
    let report = linearize(system)?;
    if report.flags.resonant {
        return Err(Error::Resonant {
            lambda1: report.lambda1,
        });
    }
    if !report.flags.saddle {
        return Err(Error::NotSaddle {
            lambda1: report.lambda1,
            lambda2: report.lambda2,
        });
    }
    let shooting_date = config.start_date(system, &report).max(horizon);
    let mut prices = vec![0.0; shooting_date + 1];
    prices[shooting_date] = shoot(system, &report, system.weight_at(shooting_date), config)?;
    for t in (0..shooting_date).rev() {
        prices[t] = system.step_back(prices[t + 1], system.weight_at(t))?;
    }
    prices.truncate(horizon + 1);
    let states: Vec<State> = prices
        .iter()
        .enumerate()
        .map(|(t, &price)| State {
            price,
            weight: system.weight_at(t),
        })
        .collect();
    let euler_residual = states
        .windows(2)
        .map(|w| system.euler_residual(w[0], w[1].price))
        .fold(0.0, f64::max);
    let econ = system.econ;
    Ok(StablePath {
        report,
        shooting_date,
        states,
        prices: TrendedPath::new(system.trend(), prices)?,
        dividends: TrendedPath::geometric(econ.d, econ.gd, horizon)?,
        euler_residual,
        uniqueness_not_guaranteed: report.flags.uniqueness_not_guaranteed,
    })
}

/// Finitely many members of the continuum of bubbly equilibria that exists
/// between the two thresholds: forward orbits of the bubbly system started
/// between the fundamental and the bubbly saddle-path prices.
pub fn bubbly_witnesses(
    econ: GrowthEconomy,
    kernel: UtilityKernel,
    count: usize,
    horizon: usize,
    config: &ShootingConfig,
) -> Result<Vec<TrendedPath>> {
    let fundamental = stable_path(&DetrendedSystem::fundamental(econ, kernel)?, horizon, config)?;
    let bubbly_system = DetrendedSystem::bubbly(econ, kernel)?;
    let bubbly = stable_path(&bubbly_system, horizon, config)?;
    let (low, high) = (fundamental.prices.value(0), bubbly.prices.value(0));
    let mut witnesses = Vec::with_capacity(count);
    for k in 1..=count {
        let mut state = State {
            price: low + (high - low) * k as f64 / (count + 1) as f64,
            weight: 1.0,
        };
        let mut levels = Vec::with_capacity(horizon + 1);
        levels.push(state.price);
        for _ in 0..horizon {
            state = bubbly_system.forward_step(state)?;
            levels.push(state.price);
        }
        witnesses.push(TrendedPath::new(econ.g, levels)?);
    }
    Ok(witnesses)
}
