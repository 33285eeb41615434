use serde::{Deserialize, Serialize};

/// Slope limiter for piecewise-linear reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Limiter {
    #[default]
    Minmod,
    MonotonizedCentral,
    /// Unlimited central slope; second order on smooth data only.
    Central,
}

impl Limiter {
    /// Limited slope from backward and forward differences.
    #[inline]
    pub fn slope(self, back: f64, fwd: f64) -> f64 {
        match self {
            Limiter::Minmod => minmod(back, fwd),
            Limiter::MonotonizedCentral => {
                minmod(0.5 * (back + fwd), minmod(2.0 * back, 2.0 * fwd))
            }
            Limiter::Central => 0.5 * (back + fwd),
        }
    }
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}
