use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `amplitude · e · exp(-1 / (1 - x²))`, `x = (v - center) / radius`:
/// smooth, even about `center`, supported on `|x| < 1`, peak `amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn new(center: f64, radius: f64, amplitude: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && center.is_finite() && amplitude.is_finite()) {
            return Err(Error::Parameter(format!("bad bump radius {radius}")));
        }
        Ok(Self { center, radius, amplitude })
    }

    /// Value and first two derivatives.
    pub fn eval(&self, v: f64) -> [f64; 3] {
        let x = (v - self.center) / self.radius;
        let q = 1.0 - x * x;
        if q <= 0.0 {
            return [0.0; 3];
        }
        let b = self.amplitude * (1.0 - 1.0 / q).exp();
        let r = self.radius;
        let d1 = b * (-2.0 * x / (q * q));
        let d2 = b * (4.0 * x * x / q.powi(4) - 2.0 / (q * q) - 8.0 * x * x / q.powi(3));
        [b, d1 / r, d2 / (r * r)]
    }

    pub fn value(&self, v: f64) -> f64 {
        self.eval(v)[0]
    }

    /// `max |s'|` of the unit-amplitude shape, for admissibility bounds.
    pub fn max_slope_unit(&self) -> f64 {
        let unit = Bump { amplitude: 1.0, ..*self };
        (0..4000)
            .map(|i| unit.eval(self.center + self.radius * (i as f64 / 4000.0)).map(f64::abs)[1])
            .fold(0.0, f64::max)
    }
}
