//! The destabilizing function `χ(v; h, d, ε)` and its Cauchy transform.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Odd, piecewise-linear `χ`: a core of slope `h/ε` on `|v| < ε`, a plateau
/// of height `±h` of width `d`, and ramps of slope `-1/2` down to zero at
/// `|v| = 2h + d + ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiParams {
    pub h: f64,
    pub d: f64,
    pub eps: f64,
    pub center: f64,
}

impl ChiParams {
    pub fn new(h: f64, d: f64, eps: f64, center: f64) -> Result<Self> {
        if !(h > 0.0 && d > 0.0 && eps > 0.0 && h.is_finite() && d.is_finite() && center.is_finite()) {
            return Err(Error::Parameter(format!("chi needs h, d, eps > 0, got ({h}, {d}, {eps})")));
        }
        Ok(Self { h, d, eps, center })
    }

    /// `d = h`, `ε = e^{-1/h}` (clamped to the smallest normal double).
    pub fn with_defaults(h: f64, center: f64) -> Result<Self> {
        Self::new(h, h, (-1.0 / h).exp().max(f64::MIN_POSITIVE), center)
    }

    /// Same shape with the core widened to at least `min_eps`.
    pub fn floored(&self, min_eps: f64) -> Self {
        Self { eps: self.eps.max(min_eps), ..*self }
    }

    pub fn half_width(&self) -> f64 {
        2.0 * self.h + self.d + self.eps
    }

    /// Breakpoints (relative to the center) and slope jumps.
    fn kinks(&self) -> [(f64, f64); 6] {
        let (h, d, e) = (self.h, self.d, self.eps);
        let c = self.half_width();
        [(-c, -0.5), (-(d + e), 0.5), (-e, h / e), (e, -h / e), (d + e, -0.5), (c, 0.5)]
    }
}

pub fn chi(v: f64, p: &ChiParams) -> f64 {
    let x = v - p.center;
    let a = x.abs();
    let (h, d, e) = (p.h, p.d, p.eps);
    let y = if a <= e {
        return h * x / e;
    } else if a <= d + e {
        h
    } else if a <= p.half_width() {
        h + 0.5 * d + 0.5 * e - 0.5 * a
    } else {
        0.0
    };
    y.copysign(x)
}

/// Slope of `χ`, taking the right-hand value at breakpoints.
pub fn chi_deriv(v: f64, p: &ChiParams) -> f64 {
    let a = (v - p.center).abs();
    if a < p.eps {
        p.h / p.eps
    } else if a < p.d + p.eps {
        0.0
    } else if a < p.half_width() {
        -0.5
    } else {
        0.0
    }
}

/// `∫_{-∞}^{v} χ`, an even bump of depth `-(hε/2 + hd + h²)`.
pub fn chi_antiderivative(v: f64, p: &ChiParams) -> f64 {
    let a = (v - p.center).abs();
    let (h, d, e) = (p.h, p.d, p.eps);
    let area = 0.5 * h * e + h * d + h * h;
    let partial = if a <= e {
        0.5 * h * a * a / e
    } else if a <= d + e {
        0.5 * h * e + h * (a - e)
    } else if a <= p.half_width() {
        let s = a - d - e;
        0.5 * h * e + h * d + h * s - 0.25 * s * s
    } else {
        return 0.0;
    };
    partial - area
}

/// `2h² + 2hd + hε + 4h`.
pub fn chi_norm_w11(p: &ChiParams) -> f64 {
    2.0 * p.h * p.h + 2.0 * p.h * p.d + p.h * p.eps + 4.0 * p.h
}

/// Logarithm with negative reals sent to `ln|x| - iπ`, the boundary value
/// from below that `b - (u + i0)` takes.
fn log_lower(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        Complex64::new((-z.re).ln(), -std::f64::consts::PI)
    } else {
        z.ln()
    }
}

fn xlogx(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        z
    } else {
        z * log_lower(z)
    }
}

const CORE_SERIES: f64 = 1e3;

/// `∫ χ(v) / (v - u)^order dv` for `Im u ≥ 0` (boundary value from above
/// on the real axis). `order` 1 is `Σ Δⱼ (bⱼ - u) Log(bⱼ - u)`, order 2 its
/// `u`-derivative. The steep core pair is evaluated in the scaled variable
/// `t = (u - center)/ε` so that sub-ulp cores neither cancel nor overflow.
pub fn chi_cauchy(u: Complex64, p: &ChiParams, order: u8) -> Complex64 {
    let w = u - p.center;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &(b, jump)) in p.kinks().iter().enumerate() {
        if j == 2 || j == 3 {
            continue;
        }
        let z = b - w;
        acc += match order {
            1 => jump * xlogx(z),
            _ => -jump * log_lower(z),
        };
    }
    let h = p.h;
    let t = w / p.eps;
    let one = Complex64::new(1.0, 0.0);
    acc += if t.norm() > CORE_SERIES {
        let lt = log_lower(-t);
        match order {
            1 => -2.0 * h * (p.eps.ln() + lt + 1.0) + h / (3.0 * t * t),
            _ => (h / p.eps) * (-2.0 / t - 2.0 / (3.0 * t * t * t)),
        }
    } else {
        match order {
            1 => -2.0 * h * p.eps.ln() + h * (xlogx(-one - t) - xlogx(one - t)),
            _ => (h / p.eps) * (log_lower(one - t) - log_lower(-one - t)),
        }
    };
    acc
}

/// `PV ∫ χ(v) / (v - u) dv` (no `1/π`).
pub fn chi_hilbert(u: f64, p: &ChiParams) -> f64 {
    chi_cauchy(Complex64::new(u, 0.0), p, 1).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(h: f64) -> ChiParams {
        ChiParams::new(h, h, 0.02, 0.3).unwrap()
    }

    #[test]
    fn piecewise_values_and_continuity() {
        let p = params(0.1);
        assert_eq!(chi(0.3, &p), 0.0);
        assert!((chi(0.3 + p.eps, &p) - p.h).abs() < 1e-15);
        assert!(chi(0.3 + p.half_width(), &p).abs() < 1e-15);
        for (b, _) in p.kinks() {
            let v = 0.3 + b;
            let l = chi(v - 1e-12, &p);
            let r = chi(v + 1e-12, &p);
            assert!((l - r).abs() < 1e-9, "jump at {b}");
        }
        assert!((chi(0.2, &p) + chi(0.4, &p)).abs() < 1e-15);
    }

    #[test]
    fn antiderivative_matches_quadrature() {
        let p = params(0.1);
        let n = 200_000;
        let lo = p.center - p.half_width() - 0.01;
        let dx = 0.3 / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let v = lo + (i as f64 + 0.5) * dx;
            acc += chi(v, &p) * dx;
            if i % 20_000 == 0 {
                assert!((chi_antiderivative(v + 0.5 * dx, &p) - acc).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn norm_formula() {
        let p = ChiParams::new(0.1, 0.1, (-10f64).exp(), 0.0).unwrap();
        assert!((chi_norm_w11(&p) - 0.4400045399929762).abs() < 1e-12);
    }

    #[test]
    fn imaginary_part_is_pi_chi() {
        let p = params(0.1);
        for u in [0.0, 0.29, 0.31, 0.35, 0.45, 0.7] {
            let z = chi_cauchy(Complex64::new(u, 0.0), &p, 1);
            assert!((z.im - PI * chi(u, &p)).abs() < 1e-12, "{u}");
        }
    }

    #[test]
    fn closed_form_at_center() {
        // -2h ln ε + c ln c - (d+ε) ln(d+ε)
        let (h, eps) = (0.05, 1e-6);
        let p = ChiParams::new(h, h, eps, 0.0).unwrap();
        let c = p.half_width();
        let expect = -2.0 * h * eps.ln() + c * c.ln() - (h + eps) * (h + eps).ln();
        assert!((chi_hilbert(0.0, &p) - expect).abs() < 1e-12);
    }

    #[test]
    fn series_joins_exact_form() {
        let p = ChiParams::new(0.05, 0.05, 1e-7, 0.0).unwrap();
        // the series takes over at |u| = ε / 1e-3
        let below = chi_hilbert(1e-4 * (1.0 - 1e-9), &p);
        let above = chi_hilbert(1e-4 * (1.0 + 1e-9), &p);
        assert!((below - above).abs() < 1e-9);
        for u in [Complex64::new(0.01, 0.0), Complex64::new(-0.02, 0.003)] {
            let d = 1e-7;
            let fd = (chi_cauchy(u + d, &p, 1) - chi_cauchy(u - d, &p, 1)) / (2.0 * d);
            assert!((fd - chi_cauchy(u, &p, 2)).norm() < 1e-5 * fd.norm());
        }
    }
}
