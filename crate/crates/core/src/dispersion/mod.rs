//! The dispersion function `ε(k, u)`, Penrose contours and winding numbers.
//!
//! Sign convention: the boundary value from the upper half-plane is
//! `ε(k, u + i0) = 1 - (π H[f0'](u) + iπ f0'(u)) / k²`.

mod classify;
mod penrose;
mod roots;

pub use classify::{classify_lambda, SpectralClass, SpectrumClass};
pub use penrose::{
    critical_separation, critical_separation_in, embedded_mode_scan, k0_critical_scan,
    penrose_test, penrose_test_with, unstable_bands, CriticalInfo, CriticalSeparation,
    EmbeddedMode, KBand, KSample, KScan, PenroseOptions, RootInfo, StabilityReport, Verdict,
    Violation,
};
pub use roots::{find_roots_seeded, find_roots_uhp, find_roots_with_count};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{find_critical_points, CriticalPoint, Profile};
use crate::error::{domain, Error, Result};
use crate::exec::{self, Execution};

/// Origin proximity that declares a contour critical.
pub const ORIGIN_TOL: f64 = 1e-12;
/// Largest admissible distance of the accumulated winding from an integer.
pub const WINDING_TOL: f64 = 0.1;
const MAX_ARG_STEP: f64 = PI / 8.0;

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        domain(format!("wavenumber must be positive, got {k}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    pub u: f64,
    pub eps_re: f64,
    pub eps_im: f64,
}

impl DispersionSample {
    pub fn eps(&self) -> Complex64 {
        Complex64::new(self.eps_re, self.eps_im)
    }
}

#[inline]
fn eps_from(pv: f64, df: f64, k: f64) -> Complex64 {
    let k2 = k * k;
    Complex64::new(1.0 - pv / k2, -PI * df / k2)
}

/// Boundary value `ε(k, u + i0)`.
pub fn epsilon_boundary<P: Profile + ?Sized>(p: &P, k: f64, u: f64) -> Result<Complex64> {
    check_k(k)?;
    if !(u.abs() < p.grid().v_max()) {
        return domain(format!("u = {u} must lie strictly inside the grid"));
    }
    Ok(eps_from(p.pv(u), p.df(u), k))
}

/// `ε(k, u)` and `∂ε/∂u` for `Im u > 0`.
pub fn epsilon_uhp<P: Profile + ?Sized>(p: &P, k: f64, u: Complex64) -> (Complex64, Complex64) {
    let k2 = k * k;
    (1.0 - p.cauchy(u, 1) / k2, -p.cauchy(u, 2) / k2)
}

/// `k`-independent data for contours: `PV ∫ f0'/(v-u)` and `f0'` at every
/// interior node plus the critical points.
#[derive(Debug, Clone)]
pub struct PvTable {
    pub u: Vec<f64>,
    pub pv: Vec<f64>,
    pub df: Vec<f64>,
}

impl PvTable {
    pub fn new<P: Profile + ?Sized>(p: &P, exec: Execution) -> Self {
        let grid = p.grid();
        let mut u: Vec<f64> = (1..grid.len() - 1).map(|i| grid.node(i)).collect();
        let crit = find_critical_points(p);
        let df_scale = u.iter().fold(0.0f64, |m, &x| m.max(p.df(x).abs()));
        let ladders = exec::map(exec, &crit, |c| ladder(p, c.u, 0.5 * grid.spacing(), df_scale));
        for (c, l) in crit.iter().zip(ladders) {
            u.push(c.u);
            u.extend(l.iter().map(|x| x.0));
        }
        u.sort_by(f64::total_cmp);
        u.dedup();
        let pv = exec::map(exec, &u, |&x| p.pv(x));
        let df = u.iter().map(|&x| p.df(x)).collect();
        Self { u, pv, df }
    }

    /// Largest `|H[f0']|` on the table.
    pub fn max_abs_hilbert(&self) -> f64 {
        self.pv.iter().fold(0.0f64, |m, x| m.max(x.abs())) / PI
    }
}

/// Geometric ladder `c ± s·2^{-j}` into a zero of `f0'`, continued until
/// `pv` and `f0'` have settled to their values at `c`. Resolves profiles
/// whose Hilbert transform varies logarithmically down to scales far below
/// the grid spacing.
fn ladder<P: Profile + ?Sized>(p: &P, c: f64, start: f64, df_scale: f64) -> Vec<(f64, f64)> {
    let pv_c = p.pv(c);
    let (pv_tol, df_tol) = (1e-13 * pv_c.abs().max(1.0), 1e-13 * df_scale);
    let floor = (8.0 * f64::EPSILON * c.abs()).max(1e-300);
    let mut out = Vec::new();
    let mut d = start;
    while d > floor {
        let mut settled = true;
        for x in [c - d, c + d] {
            let pv = p.pv(x);
            settled &= (pv - pv_c).abs() <= pv_tol && (p.df(x) - p.df(c)).abs() <= df_tol;
            out.push((x, pv));
        }
        if settled {
            break;
        }
        d *= 0.5;
    }
    out
}

/// Image of the real line under `ε(k, ·)`, closed through `ε = 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PenroseContour {
    pub k: f64,
    pub samples: Vec<DispersionSample>,
    /// Added to every `u` when exporting lab-frame coordinates.
    pub frame_offset: f64,
}

impl PenroseContour {
    pub fn from_samples(k: f64, samples: Vec<DispersionSample>) -> Self {
        Self { k, samples, frame_offset: 0.0 }
    }

    pub fn min_distance_to_origin(&self) -> (f64, f64) {
        self.samples
            .iter()
            .map(|s| (s.eps().norm(), s.u))
            .fold((f64::INFINITY, f64::NAN), |a, b| if b.0 < a.0 { b } else { a })
    }
}

pub fn penrose_contour<P: Profile + ?Sized>(p: &P, k: f64) -> Result<PenroseContour> {
    check_k(k)?;
    let table = PvTable::new(p, Execution::default());
    Ok(contour_from_table(p, &table, k))
}

fn needs_refinement(a: Complex64, b: Complex64) -> bool {
    let crosses = a.im == 0.0 || b.im == 0.0 || (a.im > 0.0) != (b.im > 0.0);
    crosses && arg_step(a, b).abs() >= MAX_ARG_STEP
}

/// Principal-value increment of the argument from `a` to `b`.
fn arg_step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

/// Builds the contour at `k` from a precomputed table, bisecting in `u`
/// wherever the curve crosses the real axis with an argument step of at
/// least π/8.
pub fn contour_from_table<P: Profile + ?Sized>(p: &P, table: &PvTable, k: f64) -> PenroseContour {
    let mut samples: Vec<DispersionSample> = Vec::with_capacity(table.u.len());
    let sample = |u: f64| {
        let e = eps_from(p.pv(u), p.df(u), k);
        DispersionSample { u, eps_re: e.re, eps_im: e.im }
    };
    for i in 0..table.u.len() {
        let e = eps_from(table.pv[i], table.df[i], k);
        let s = DispersionSample { u: table.u[i], eps_re: e.re, eps_im: e.im };
        if let Some(prev) = samples.last().copied() {
            // refine (prev, s) with an explicit stack, emitting in order
            let mut stack = vec![(prev, s)];
            let mut emitted = Vec::new();
            while let Some((a, b)) = stack.pop() {
                let mid = 0.5 * (a.u + b.u);
                if needs_refinement(a.eps(), b.eps()) && mid > a.u && mid < b.u {
                    let m = sample(mid);
                    stack.push((m, b));
                    stack.push((a, m));
                } else {
                    emitted.push(b);
                }
            }
            samples.extend(emitted);
        } else {
            samples.push(s);
        }
    }
    PenroseContour { k, samples, frame_offset: p.frame_offset() }
}

/// Accumulated argument of the closed contour in turns.
pub fn winding_turns(contour: &PenroseContour) -> Result<f64> {
    let s = &contour.samples;
    if s.is_empty() {
        return Ok(0.0);
    }
    let (dist, u) = contour.min_distance_to_origin();
    if dist < ORIGIN_TOL {
        return Err(Error::CriticalState { u: u + contour.frame_offset, distance: dist });
    }
    // Closure through ε = 1: the tails keep the sign of f0', so a sample on
    // the negative axis is reached from below on the left and left from
    // above on the right.
    let first = s[0].eps();
    let last = s[s.len() - 1].eps();
    let arg_first = if first.im == 0.0 && first.re < 0.0 { -PI } else { first.arg() };
    let arg_last = if last.im == 0.0 && last.re < 0.0 { PI } else { last.arg() };
    let mut total = arg_first - arg_last;
    for w in s.windows(2) {
        total += arg_step(w[0].eps(), w[1].eps());
    }
    Ok(total / (2.0 * PI))
}

/// Winding number of the contour about the origin.
pub fn winding_number(contour: &PenroseContour) -> Result<i32> {
    let turns = winding_turns(contour)?;
    let n = turns.round();
    if (turns - n).abs() > WINDING_TOL {
        return Err(Error::Unresolved { turns });
    }
    Ok(n as i32)
}

/// Crossing points with their `PV ∫ f0'/(v-u)` values.
pub fn crossings_with_pv<P: Profile + ?Sized>(p: &P) -> Vec<(CriticalPoint, f64)> {
    find_critical_points(p).into_iter().map(|c| (c, p.pv(c.u))).collect()
}

/// Winding from the crossing structure: each zero of `f0'` landing on the
/// negative real axis (`ε_R < 0`) contributes its orientation.
pub fn winding_from_crossings(crossings: &[(CriticalPoint, f64)], k: f64) -> i32 {
    let k2 = k * k;
    crossings
        .iter()
        .filter(|(_, pv)| *pv > k2)
        .map(|(c, _)| c.kind.orientation())
        .sum()
}

pub fn winding_by_crossings<P: Profile + ?Sized>(p: &P, k: f64) -> Result<i32> {
    check_k(k)?;
    Ok(winding_from_crossings(&crossings_with_pv(p), k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::EquilibriumProfile;

    #[test]
    fn maxwellian_boundary_value_at_origin() {
        let p = EquilibriumProfile::maxwellian(0.0, 1.0).unwrap();
        let e = epsilon_boundary(&p, 1.0, 0.0).unwrap();
        assert!((e.re - (1.0 + 2.0 * PI.sqrt())).abs() < 1e-10);
        assert_eq!(e.im, 0.0);
        assert!(epsilon_boundary(&p, 0.0, 0.0).is_err());
        assert!(epsilon_boundary(&p, 1.0, 9.0).is_err());
    }

    #[test]
    fn bimaxwellian_valley_is_on_negative_axis() {
        let p = EquilibriumProfile::bi_maxwellian(1.0, 1.0).unwrap();
        let e = epsilon_boundary(&p, 0.4, 0.0).unwrap();
        assert_eq!(e.im, 0.0);
        // oracle: scipy quad of PV ∫ f0'/v dv = 0.539953349344968
        assert!((e.re - (1.0 - 0.539953349344968 / 0.16)).abs() < 1e-9, "{}", e.re);
    }

    #[test]
    fn synthetic_circle_does_not_wind() {
        let samples = (0..=200)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 200.0 - PI;
                let z = Complex64::new(1.0, 0.0) + 0.5 * Complex64::from_polar(1.0, t);
                DispersionSample { u: t, eps_re: z.re, eps_im: z.im }
            })
            .collect();
        let c = PenroseContour::from_samples(1.0, samples);
        assert_eq!(winding_number(&c).unwrap(), 0);
    }

    #[test]
    fn zero_profile_gives_constant_contour() {
        let p = EquilibriumProfile::weighted_sum(vec![crate::equilibrium::Component {
            weight: 0.0,
            center: 0.0,
            width: 1.0,
        }])
        .unwrap();
        let c = penrose_contour(&p, 1.0).unwrap();
        assert!(c.samples.iter().all(|s| s.eps_re == 1.0 && s.eps_im == 0.0));
        assert_eq!(winding_number(&c).unwrap(), 0);
    }

    #[test]
    fn windings_agree_on_reference_profiles() {
        for (p, k, expect) in [
            (EquilibriumProfile::maxwellian(0.0, 1.0).unwrap(), 0.2, 0),
            (EquilibriumProfile::maxwellian(0.0, 1.0).unwrap(), 2.0, 0),
            (EquilibriumProfile::bi_maxwellian(1.0, 1.0).unwrap(), 0.4, 1),
            (EquilibriumProfile::bi_maxwellian(1.0, 1.0).unwrap(), 1.0, 0),
        ] {
            let c = penrose_contour(&p, k).unwrap();
            assert_eq!(winding_number(&c).unwrap(), expect);
            assert_eq!(winding_by_crossings(&p, k).unwrap(), expect);
        }
    }
}
