//! Time integration of a single linearized Fourier mode,
//! `∂f/∂t = -ikv f + (i f0'/k) ∫ f dv`, on the velocity grid.
//!
//! Dynamically accessible data `f = f0'·q` keep that factored form under
//! the flow (`∂q/∂t = -ikv q + i n/k`), so the state carries `q` and the
//! `1/f0'` weights of the energy and momentum never divide by zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{Profile, VelocityGrid};
use crate::error::{domain, Error, Result};

/// Runs whose norm exceeds this stop early.
pub const BLOW_UP: f64 = 1e12;
/// Growth rates below this are reported as stable.
pub const STABLE_GAMMA: f64 = 1e-2;
/// Largest admissible `k·v_max·dt`.
pub const MAX_ADVECTION_STEP: f64 = 0.2;
/// Default `k·v_max·dt`.
pub const DEFAULT_ADVECTION_STEP: f64 = 0.1;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `f` itself.
    Plain,
    /// The generator `q` with `f = f0'·q`.
    Accessible(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    pub k: f64,
    pub t: f64,
    grid: VelocityGrid,
    y: Vec<Complex64>,
    repr: Repr,
}

impl ModeState {
    /// Arbitrary data `f`; energy and momentum are then undefined.
    pub fn new(k: f64, grid: VelocityGrid, f: Vec<Complex64>) -> Result<Self> {
        check_k(k)?;
        if f.len() != grid.len() || f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parameter("f must have one finite sample per grid node".into()));
        }
        Ok(Self { k, t: 0.0, grid, y: f, repr: Repr::Plain })
    }

    /// Dynamically accessible data `f = i k g(v) f0'(v)`.
    pub fn accessible<P: Profile + ?Sized, G: Fn(f64) -> f64>(profile: &P, k: f64, g: G) -> Result<Self> {
        check_k(k)?;
        let grid = *profile.grid();
        let y = grid.nodes().iter().map(|&v| I * k * g(v)).collect();
        Ok(Self { k, t: 0.0, grid, y, repr: Repr::Accessible(profile.df_samples().to_vec()) })
    }

    /// Default initial data: `g` a unit Gaussian centred at `v = 0.5`, off
    /// the symmetry point so that even profiles still get a density
    /// perturbation.
    pub fn default_accessible<P: Profile + ?Sized>(profile: &P, k: f64) -> Result<Self> {
        Self::accessible(profile, k, |v| (-(v - 0.5) * (v - 0.5)).exp())
    }

    pub fn grid(&self) -> &VelocityGrid {
        &self.grid
    }

    pub fn is_accessible(&self) -> bool {
        matches!(self.repr, Repr::Accessible(_))
    }

    /// Samples of `f_k(v, t)`.
    pub fn f(&self) -> Vec<Complex64> {
        match &self.repr {
            Repr::Plain => self.y.clone(),
            Repr::Accessible(fp) => self.y.iter().zip(fp).map(|(q, d)| q * d).collect(),
        }
    }

    /// `∫ f dv`.
    pub fn density(&self) -> Complex64 {
        let g = &self.grid;
        match &self.repr {
            Repr::Plain => self.y.iter().enumerate().map(|(i, z)| g.weight(i) * z).sum(),
            Repr::Accessible(fp) => self.y.iter().enumerate().map(|(i, z)| g.weight(i) * fp[i] * z).sum(),
        }
    }

    /// `(∫ |f|² dv)^{1/2}`.
    pub fn norm(&self) -> f64 {
        let g = &self.grid;
        let s: f64 = match &self.repr {
            Repr::Plain => self.y.iter().enumerate().map(|(i, z)| g.weight(i) * z.norm_sqr()).sum(),
            Repr::Accessible(fp) => {
                self.y.iter().enumerate().map(|(i, z)| g.weight(i) * fp[i] * fp[i] * z.norm_sqr()).sum()
            }
        };
        s.sqrt()
    }

    /// Linear energy and momentum; `None` unless the data are accessible.
    pub fn conserved(&self) -> Option<ConservedQuantities> {
        let Repr::Accessible(fp) = &self.repr else {
            return None;
        };
        let g = &self.grid;
        let (mut vw, mut w) = (0.0, 0.0);
        for (i, q) in self.y.iter().enumerate() {
            // |f|²/f0' = f0'|q|²
            let a = g.weight(i) * fp[i] * q.norm_sqr();
            vw += g.node(i) * a;
            w += a;
        }
        let n = self.density();
        Some(ConservedQuantities {
            h_l: 0.5 * (-vw + n.norm_sqr() / (self.k * self.k)),
            p_l: 0.5 * self.k * w,
        })
    }
}

/// Linear energy `H_L` and momentum `P_L` of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    pub h_l: f64,
    pub p_l: f64,
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        domain(format!("wavenumber must be positive, got {k}"))
    }
}

fn check_grid<P: Profile + ?Sized>(state: &ModeState, profile: &P) -> Result<()> {
    if state.grid != *profile.grid() {
        return Err(Error::Parameter("state and profile live on different grids".into()));
    }
    Ok(())
}

/// `-ikv f + (i f0'/k) ∫ f dv`.
pub fn rhs<P: Profile + ?Sized>(state: &ModeState, profile: &P) -> Result<Vec<Complex64>> {
    check_k(state.k)?;
    check_grid(state, profile)?;
    let f = state.f();
    let n = state.density();
    let fp = profile.df_samples();
    let k = state.k;
    Ok(f.iter()
        .enumerate()
        .map(|(i, z)| -I * k * state.grid.node(i) * z + I * fp[i] * n / k)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    /// Negative steps integrate backwards in time.
    pub dt: f64,
    pub t_end: f64,
    /// Steps between recorded samples.
    pub record_every: usize,
}

impl IntegrateOptions {
    /// `dt = 0.1/(k v_max)`, `t_end = 20/k`.
    pub fn defaults(k: f64, grid: &VelocityGrid) -> Self {
        Self {
            dt: DEFAULT_ADVECTION_STEP / (k * grid.v_max()),
            t_end: 20.0 / k,
            record_every: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub norm: f64,
    pub conserved: Option<ConservedQuantities>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub k: f64,
    pub points: Vec<TrajectoryPoint>,
    /// Set when the run stopped because the norm passed [`BLOW_UP`].
    pub overflow: bool,
    /// `2π/(k·spacing)`, after which the discrete free streaming recurs.
    pub recurrence_time: f64,
}

impl Trajectory {
    /// Largest `|X(t) - X(0)| / |X(0)|` over the run for `H_L` and `P_L`.
    pub fn relative_drift(&self) -> Option<(f64, f64)> {
        let c0 = self.points.first()?.conserved?;
        let mut drift = (0.0f64, 0.0f64);
        for p in &self.points {
            let c = p.conserved?;
            drift.0 = drift.0.max(((c.h_l - c0.h_l) / c0.h_l).abs());
            drift.1 = drift.1.max(((c.p_l - c0.p_l) / c0.p_l).abs());
        }
        Some(drift)
    }

    /// Whether the run outlasted the recurrence time.
    pub fn past_recurrence(&self) -> bool {
        self.points.last().is_some_and(|p| p.t.abs() >= self.recurrence_time)
    }
}

/// Classical fourth-order Runge-Kutta from `state.t` over `t_end`,
/// advancing `state` in place.
pub fn integrate<P: Profile + ?Sized>(
    state: &mut ModeState,
    profile: &P,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    check_k(state.k)?;
    check_grid(state, profile)?;
    if let Repr::Accessible(fp) = &state.repr {
        if fp.as_slice() != profile.df_samples() {
            return Err(Error::Parameter("state was prepared for a different profile".into()));
        }
    }
    let k = state.k;
    let limit = MAX_ADVECTION_STEP / (k * state.grid.v_max());
    if !(opts.dt != 0.0 && opts.dt.abs() <= limit * (1.0 + 1e-12)) {
        return Err(Error::Parameter(format!(
            "|dt| = {} must be positive and at most 0.2/(k v_max) = {limit}",
            opts.dt.abs()
        )));
    }
    if !(opts.t_end > 0.0) || opts.record_every == 0 {
        return Err(Error::Parameter("t_end must be positive and record_every at least 1".into()));
    }
    // n = Σ w·weight·y and ∂y/∂t = -ikv y + (i n/k)·coupling
    let fp = profile.df_samples().to_vec();
    let (weight, coupling) = match state.repr {
        Repr::Plain => (None, Some(fp.as_slice())),
        Repr::Accessible(_) => (Some(fp.as_slice()), None),
    };
    let steps = (opts.t_end / opts.dt.abs()).round().max(1.0) as usize;
    let dt = opts.dt.signum() * opts.t_end / steps as f64;
    let n = state.y.len();
    let mut k1 = vec![Complex64::default(); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    let record = |s: &ModeState| TrajectoryPoint { t: s.t, norm: s.norm(), conserved: s.conserved() };
    let mut points = vec![record(state)];
    let mut overflow = false;
    let grid = state.grid;
    let eval = |y: &[Complex64], out: &mut [Complex64]| derivative(&grid, k, weight, coupling, y, out);
    for step in 1..=steps {
        eval(&state.y, &mut k1);
        for i in 0..n {
            tmp[i] = state.y[i] + 0.5 * dt * k1[i];
        }
        eval(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = state.y[i] + 0.5 * dt * k2[i];
        }
        eval(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = state.y[i] + dt * k3[i];
        }
        eval(&tmp, &mut k4);
        for i in 0..n {
            state.y[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        state.t += dt;
        let norm = state.norm();
        if !(norm <= BLOW_UP) {
            overflow = true;
            points.push(record(state));
            break;
        }
        if step % opts.record_every == 0 || step == steps {
            points.push(record(state));
        }
    }
    Ok(Trajectory {
        k,
        points,
        overflow,
        recurrence_time: 2.0 * std::f64::consts::PI / (k * state.grid.spacing()),
    })
}

fn derivative(
    grid: &VelocityGrid,
    k: f64,
    weight: Option<&[f64]>,
    coupling: Option<&[f64]>,
    y: &[Complex64],
    out: &mut [Complex64],
) {
    let n: Complex64 = y
        .iter()
        .enumerate()
        .map(|(i, z)| grid.weight(i) * weight.map_or(1.0, |w| w[i]) * z)
        .sum();
    let drive = I * n / k;
    for (i, (o, z)) in out.iter_mut().zip(y).enumerate() {
        *o = -I * k * grid.node(i) * z + drive * coupling.map_or(1.0, |c| c[i]);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRate {
    /// `None` for identically zero data.
    pub gamma: Option<f64>,
    pub stable: bool,
}

/// Least-squares slope of `ln‖f‖` against `t` over `points`.
pub fn log_slope(points: &[TrajectoryPoint]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.norm > 0.0).map(|p| (p.t, p.norm.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (tb, yb) = (st / m, sy / m);
    let (mut num, mut den) = (0.0, 0.0);
    for (t, y) in &pts {
        num += (t - tb) * (y - yb);
        den += (t - tb) * (t - tb);
    }
    (den > 0.0).then(|| num / den)
}

/// Exponential growth rate over the final half of the run.
pub fn growth_rate(traj: &Trajectory) -> GrowthRate {
    let pts = &traj.points;
    if pts.iter().all(|p| p.norm == 0.0) {
        return GrowthRate { gamma: None, stable: true };
    }
    let t0 = pts[0].t;
    let t1 = pts[pts.len() - 1].t;
    let mid = 0.5 * (t0 + t1);
    let tail: Vec<TrajectoryPoint> = pts.iter().copied().filter(|p| (p.t - mid) * (t1 - t0) >= 0.0).collect();
    // slope against elapsed time so backward runs report growth as positive
    let gamma = log_slope(&tail).map(|s| s * (t1 - t0).signum());
    let stable = !gamma.is_some_and(|g| g >= STABLE_GAMMA);
    GrowthRate { gamma, stable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::EquilibriumProfile;

    #[test]
    fn zero_data_has_zero_rhs() {
        let p = EquilibriumProfile::maxwellian(0.0, 1.0).unwrap();
        let s = ModeState::new(1.0, *p.grid(), vec![Complex64::default(); p.grid().len()]).unwrap();
        assert!(rhs(&s, &p).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn zero_density_is_pure_advection() {
        let p = EquilibriumProfile::maxwellian(0.0, 1.0).unwrap();
        // odd data have no density on the symmetric grid
        let f: Vec<Complex64> = p.grid().nodes().iter().map(|&v| Complex64::new(v * (-v * v).exp(), 0.0)).collect();
        let s = ModeState::new(0.7, *p.grid(), f.clone()).unwrap();
        let r = rhs(&s, &p).unwrap();
        for (i, v) in p.grid().nodes().iter().enumerate() {
            assert!((r[i] - (-I * 0.7 * v * f[i])).norm() < 1e-13);
        }
    }

    #[test]
    fn accessible_and_plain_agree() {
        let p = EquilibriumProfile::bi_maxwellian(1.0, 1.0).unwrap();
        let a = ModeState::default_accessible(&p, 0.4).unwrap();
        let b = ModeState::new(0.4, *p.grid(), a.f()).unwrap();
        let opts = IntegrateOptions { dt: 0.02, t_end: 2.0, record_every: 10 };
        let (mut a, mut b) = (a, b);
        integrate(&mut a, &p, &opts).unwrap();
        integrate(&mut b, &p, &opts).unwrap();
        let (fa, fb) = (a.f(), b.f());
        let err = fa.iter().zip(&fb).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
        assert!(b.conserved().is_none());
    }

    #[test]
    fn oversized_step_rejected() {
        let p = EquilibriumProfile::maxwellian(0.0, 1.0).unwrap();
        let mut s = ModeState::default_accessible(&p, 1.0).unwrap();
        let opts = IntegrateOptions { dt: 0.1, t_end: 1.0, record_every: 1 };
        assert!(matches!(integrate(&mut s, &p, &opts), Err(Error::Parameter(_))));
    }

    #[test]
    fn zero_data_growth_undefined() {
        let p = EquilibriumProfile::maxwellian(0.0, 1.0).unwrap();
        let mut s = ModeState::accessible(&p, 1.0, |_| 0.0).unwrap();
        let t = integrate(&mut s, &p, &IntegrateOptions { dt: 0.02, t_end: 1.0, record_every: 5 }).unwrap();
        let g = growth_rate(&t);
        assert_eq!(g.gamma, None);
        assert!(g.stable);
    }
}
