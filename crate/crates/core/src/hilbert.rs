//! Principal-value Hilbert transform and Cauchy integrals on a velocity grid.
//!
//! Both use the composite trapezoid rule after subtracting the local Taylor
//! polynomial of the density, so the remaining integrand is smooth. The
//! subtracted piece is integrated in closed form over `[-v_max, v_max]`, and
//! an Euler-Maclaurin term removes the `O(h²)` end error.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::interp;
use crate::equilibrium::VelocityGrid;
use crate::error::{domain, Error, Result};

/// Real samples of a function on a [`VelocityGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    grid: VelocityGrid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: VelocityGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "{} samples for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Parameter("samples must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: VelocityGrid, f: F) -> Self {
        let values = grid.sample(f);
        Self { grid, values }
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cubic interpolant; zero off the grid.
    pub fn value_at(&self, u: f64) -> f64 {
        interp::cubic(&self.grid, &self.values, u)
    }

    pub fn deriv_at(&self, u: f64) -> f64 {
        interp::cubic_deriv(&self.grid, &self.values, u)
    }

    /// Value and slope at `u`; at a node, the sample and a centered
    /// fourth-order difference so mirror-image nodes are treated alike.
    fn local(&self, u: f64) -> (f64, f64) {
        let x = self.grid.position(u);
        let i = x.round();
        let n = self.grid.len();
        if (x - i).abs() < 1e-7 && i >= 2.0 && (i as usize) + 2 < n {
            let i = i as usize;
            let f = &self.values;
            let d = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * self.grid.spacing());
            (f[i], d)
        } else {
            (self.value_at(u), self.deriv_at(u))
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn integral(&self) -> f64 {
        self.grid.trapezoid(&self.values)
    }

    /// `a·self + b·other` on the same grid.
    pub fn combine(&self, a: f64, other: &SampledFunction, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Parameter("sampled functions live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { grid: self.grid, values })
    }
}

/// Second-order one-sided derivative at the two grid ends.
fn end_slopes(grid: &VelocityGrid, g: &[f64]) -> (f64, f64) {
    let n = g.len();
    let h = grid.spacing();
    (
        (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h),
        (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * h),
    )
}

/// `PV ∫ g(v) / (v - u) dv` over the grid given `g(u)` and `g'(u)`.
pub fn pv_integral(grid: &VelocityGrid, g: &[f64], u: f64, g_u: f64, gp_u: f64) -> f64 {
    let n = grid.len();
    let h = grid.spacing();
    let v_max = grid.v_max();
    let near = 1e-7 * h;
    let mut sum = 0.0;
    for (i, &gi) in g.iter().enumerate() {
        let d = grid.node(i) - u;
        let term = if d.abs() < near { gp_u } else { (gi - g_u) / d };
        sum += grid.weight(i) * term;
    }
    // Euler-Maclaurin end correction for F(v) = (g(v) - g(u)) / (v - u)
    let (s0, s1) = end_slopes(grid, g);
    let slope = |v: f64, gv: f64, gpv: f64| {
        let d = v - u;
        if d.abs() < near {
            0.0
        } else {
            gpv / d - (gv - g_u) / (d * d)
        }
    };
    let fa = slope(grid.node(0), g[0], s0);
    let fb = slope(grid.node(n - 1), g[n - 1], s1);
    sum -= h * h / 12.0 * (fb - fa);
    sum + g_u * ((v_max - u) / (v_max + u)).abs().ln()
}

/// `∫ g(v) / (v - u)^order dv` for complex `u` off the real axis.
///
/// `g_x`, `gp_x` are `g` and `g'` at `x = Re u` clamped to the grid; the
/// linear Taylor part is integrated exactly, which keeps the rule accurate
/// when `Im u` is comparable to the spacing.
pub fn cauchy_integral(
    grid: &VelocityGrid,
    g: &[f64],
    u: Complex64,
    order: u8,
    g_x: f64,
    gp_x: f64,
) -> Complex64 {
    let n = grid.len();
    let h = grid.spacing();
    let v_max = grid.v_max();
    let x = u.re.clamp(-v_max, v_max);
    let m = order as i32;
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, &gi) in g.iter().enumerate() {
        let v = grid.node(i);
        let r = gi - g_x - gp_x * (v - x);
        // the remainder vanishes at the expansion point; dividing a rounding
        // residue by (iIm u)^m would swamp the sum when Im u is tiny
        if v == x || r == 0.0 {
            continue;
        }
        sum += grid.weight(i) * r / (v - u).powi(m);
    }
    let (s0, s1) = end_slopes(grid, g);
    let slope = |v: f64, gv: f64, gpv: f64| {
        let r = gv - g_x - gp_x * (v - x);
        let rp = gpv - gp_x;
        let d = v - u;
        rp / d.powi(m) - m as f64 * r / d.powi(m + 1)
    };
    let fa = slope(grid.node(0), g[0], s0);
    let fb = slope(grid.node(n - 1), g[n - 1], s1);
    sum -= h * h / 12.0 * (fb - fa);

    let a = Complex64::new(v_max, 0.0) - u;
    let b = Complex64::new(-v_max, 0.0) - u;
    let l1 = a.ln() - b.ln();
    let l2 = -1.0 / a + 1.0 / b;
    let ux = u - x;
    match order {
        1 => sum + g_x * l1 + gp_x * (2.0 * v_max + ux * l1),
        _ => sum + g_x * l2 + gp_x * (l1 + ux * l2),
    }
}

/// Hilbert transform `(1/π) PV ∫ g(v) / (v - u) dv`.
pub fn pv_hilbert(g: &SampledFunction, u: f64) -> Result<f64> {
    if !(u.abs() < g.grid.v_max()) {
        return domain(format!("u = {u} must lie strictly inside the grid"));
    }
    let (g_u, gp_u) = g.local(u);
    Ok(pv_integral(&g.grid, &g.values, u, g_u, gp_u) / PI)
}

/// `∫ g(v) / (v - u)^order dv` for `Im u > 0`.
pub fn cauchy_uhp(g: &SampledFunction, u: Complex64, order: u8) -> Result<Complex64> {
    if !(u.im > 0.0) {
        return domain(format!("Im u = {} must be positive; use pv_hilbert on the axis", u.im));
    }
    if order != 1 && order != 2 {
        return domain(format!("kernel order {order} not supported"));
    }
    let x = u.re.clamp(-g.grid.v_max(), g.grid.v_max());
    Ok(cauchy_integral(&g.grid, &g.values, u, order, g.value_at(x), g.deriv_at(x)))
}
