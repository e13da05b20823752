//! Homogeneous equilibria `f0(v)`, their derivatives and critical points.

mod config;
mod critical;
mod grid;
pub(crate) mod interp;
mod profile;

pub use config::{load_config, load_csv, ProfileConfig, ProfileSpec};
pub use critical::{find_critical_points, CriticalKind, CriticalPoint};
pub use grid::VelocityGrid;
pub use profile::{shift_frame, Component, EquilibriumProfile, Family};

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::hilbert;

/// Anything that can play the role of `f0` in the dispersion relation.
///
/// `pv` and `cauchy` default to quadrature over the cached grid samples of
/// `f0'`; implementors with closed-form pieces override them.
pub trait Profile: Send + Sync {
    fn grid(&self) -> &VelocityGrid;
    fn f0(&self, v: f64) -> f64;
    fn df(&self, v: f64) -> f64;
    fn d2f(&self, v: f64) -> f64;
    /// `f0'` on the grid nodes.
    fn df_samples(&self) -> &[f64];

    /// `PV ∫ f0'(v) / (v - u) dv`, without the `1/π` of the Hilbert transform.
    fn pv(&self, u: f64) -> f64 {
        hilbert::pv_integral(self.grid(), self.df_samples(), u, self.df(u), self.d2f(u))
    }

    /// `∫ f0'(v) / (v - u)^order dv` for `Im u > 0`, `order` 1 or 2.
    fn cauchy(&self, u: Complex64, order: u8) -> Complex64 {
        let v_max = self.grid().v_max();
        let x = u.re.clamp(-v_max, v_max);
        hilbert::cauchy_integral(self.grid(), self.df_samples(), u, order, self.df(x), self.d2f(x))
    }

    /// Lab-frame velocity of this profile's `v = 0`.
    fn frame_offset(&self) -> f64 {
        0.0
    }

    /// Interval searched for critical points.
    fn search_interval(&self) -> (f64, f64) {
        let v = self.grid().v_max();
        (-v, v)
    }
}

/// `f0`, `f0'` or `f0''` at `u`.
pub fn eval<P: Profile + ?Sized>(profile: &P, u: f64, order: u8) -> Result<f64> {
    if !profile.grid().contains(u) {
        return domain(format!("u = {u} outside [-v_max, v_max]"));
    }
    match order {
        0 => Ok(profile.f0(u)),
        1 => Ok(profile.df(u)),
        2 => Ok(profile.d2f(u)),
        _ => domain(format!("derivative order {order} not supported")),
    }
}

/// Largest `|f0'|` over the grid samples.
pub fn max_abs_df<P: Profile + ?Sized>(profile: &P) -> f64 {
    profile.df_samples().iter().fold(0.0, |m, x| m.max(x.abs()))
}
