use alloc::vec::Vec;

use crate::error::{positive, Result};
use crate::math::{exp, ln};

/// Date-0 prices `q_t` of date-`t` goods, built from gross risk-free rates
/// via `q_0 = 1`, `q_{t+1} = q_t / R_t`. Log prices are kept alongside so
/// long horizons do not underflow.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowDebreuLadder {
    rates: Vec<f64>,
    ln_q: Vec<f64>,
}

pub fn ladder_from_rates(rates: &[f64]) -> Result<ArrowDebreuLadder> {
    let mut ln_q = Vec::with_capacity(rates.len() + 1);
    ln_q.push(0.0);
    let mut acc = 0.0;
    for &r in rates {
        positive("gross risk-free rate", r)?;
        acc -= ln(r);
        ln_q.push(acc);
    }
    Ok(ArrowDebreuLadder {
        rates: rates.to_vec(),
        ln_q,
    })
}

impl ArrowDebreuLadder {
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn horizon(&self) -> usize {
        self.rates.len()
    }

    pub fn q(&self, t: usize) -> f64 {
        exp(self.ln_q[t])
    }

    pub fn ln_q(&self, t: usize) -> f64 {
        self.ln_q[t]
    }

    pub fn prices(&self) -> Vec<f64> {
        self.ln_q.iter().map(|&l| exp(l)).collect()
    }
}
