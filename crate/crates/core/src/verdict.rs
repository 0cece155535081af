#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BubbleClass {
    Fundamental,
    Bubbly,
    Inconclusive,
}

impl BubbleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            BubbleClass::Fundamental => "Fundamental",
            BubbleClass::Bubbly => "Bubbly",
            BubbleClass::Inconclusive => "Inconclusive",
        }
    }
}

impl core::fmt::Display for BubbleClass {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for BubbleClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "Fundamental" => Ok(BubbleClass::Fundamental),
            "Bubbly" => Ok(BubbleClass::Bubbly),
            "Inconclusive" => Ok(BubbleClass::Inconclusive),
            _ => Err(()),
        }
    }
}

/// Finite-horizon decision on whether `Σ D_t/P_t` converges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleVerdict {
    pub class: BubbleClass,
    /// `Σ_{t=1}^{T} D_t/P_t`.
    pub partial_sum: f64,
    /// Fitted limiting ratio of successive dividend yields.
    pub tail_ratio: f64,
    /// Geometric bound on the neglected tail; infinite when `tail_ratio ≥ 1`.
    pub tail_bound: f64,
    /// Fitted power-law decay exponent `k` of the yields, `y_t ~ t^{-k}`.
    pub decay_exponent: f64,
}
