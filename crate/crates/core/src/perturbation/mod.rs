//! Destabilizing perturbations of stable equilibria.

mod bump;
mod chi;
mod destabilize;
mod synthetic;

pub use bump::Bump;
pub use chi::{chi, chi_antiderivative, chi_cauchy, chi_deriv, chi_hilbert, chi_norm_w11, ChiParams};
pub use destabilize::{
    destabilize_embedded, destabilize_k0, destabilize_rearrangement, destabilize_w11,
    Destabilization, DestabilizationSummary, DEFAULT_MARGIN,
};
pub use synthetic::make_synthetic_tangency;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{interp, EquilibriumProfile, Profile, VelocityGrid};
use crate::error::{Error, Result};
use crate::hilbert::SampledFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    AdditiveW11,
    Rearrangement,
    K0Pair,
    Embedded,
}

/// `V(v) = v + a·s(v)` with `s` a unit-amplitude bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RearrangementMap {
    pub shape: Bump,
    pub amplitude: f64,
}

impl RearrangementMap {
    /// Checks `1 + a·s' > 0` everywhere.
    pub fn new(center: f64, radius: f64, amplitude: f64) -> Result<Self> {
        let shape = Bump::new(center, radius, 1.0)?;
        let m = Self { shape, amplitude };
        let min = 1.0 - amplitude.abs() * shape.max_slope_unit();
        if !(min > 0.0) {
            return Err(Error::Diffeomorphism(min));
        }
        Ok(m)
    }

    /// `|a|` below which the map is a diffeomorphism.
    pub fn max_amplitude(radius: f64) -> f64 {
        1.0 / Bump { center: 0.0, radius, amplitude: 1.0 }.max_slope_unit()
    }

    #[inline]
    pub fn map(&self, v: f64) -> [f64; 3] {
        let [s, s1, s2] = self.shape.eval(v);
        [v + self.amplitude * s, 1.0 + self.amplitude * s1, self.amplitude * s2]
    }
}

#[derive(Debug, Clone)]
enum Delta {
    Chi(ChiParams),
    Sampled { fp: SampledFunction, antiderivative: Vec<f64> },
    Rearrangement(RearrangementMap),
}

/// `f0` plus a perturbation of `f0'`, held in a frame where the
/// perturbation's feature sits near `v = 0`; `frame_offset` maps back to
/// lab velocities.
#[derive(Debug, Clone)]
pub struct PerturbedProfile {
    base: EquilibriumProfile,
    delta: Delta,
    kind: PerturbationKind,
    norm_w11: f64,
    frame_offset: f64,
    df: Vec<f64>,
}

impl PerturbedProfile {
    fn build(base: EquilibriumProfile, delta: Delta, kind: PerturbationKind, frame_offset: f64) -> Self {
        let mut p = Self { base, delta, kind, norm_w11: 0.0, frame_offset, df: Vec::new() };
        p.df = p.base.grid().sample(|v| p.df(v));
        p.norm_w11 = match &p.delta {
            Delta::Chi(c) => chi_norm_w11(c),
            _ => sampled_w11(&p.delta_fp()),
        };
        p
    }

    /// Additive `χ` centred at the local origin.
    pub fn with_chi(base: EquilibriumProfile, chi: ChiParams, kind: PerturbationKind, frame_offset: f64) -> Self {
        Self::build(base, Delta::Chi(ChiParams { center: 0.0, ..chi }), kind, frame_offset)
    }

    /// Additive sampled `δf0'` on the base grid.
    pub fn with_sampled(base: EquilibriumProfile, fp: SampledFunction, kind: PerturbationKind) -> Result<Self> {
        if fp.grid() != base.grid() {
            return Err(Error::Parameter("perturbation sampled on a different grid".into()));
        }
        let grid = *base.grid();
        let mut antiderivative = vec![0.0; grid.len()];
        let h = grid.spacing();
        let g = fp.values();
        for i in 1..grid.len() {
            antiderivative[i] = antiderivative[i - 1] + 0.5 * h * (g[i] + g[i - 1]);
        }
        Ok(Self::build(base, Delta::Sampled { fp, antiderivative }, kind, 0.0))
    }

    pub fn base(&self) -> &EquilibriumProfile {
        &self.base
    }

    pub fn kind(&self) -> PerturbationKind {
        self.kind
    }

    pub fn norm_w11(&self) -> f64 {
        self.norm_w11
    }

    pub fn chi_params(&self) -> Option<ChiParams> {
        match self.delta {
            Delta::Chi(c) => Some(c),
            _ => None,
        }
    }

    /// `δf0'` on the grid.
    pub fn delta_fp(&self) -> SampledFunction {
        let base = self.base.df_samples();
        let values = self.df.iter().zip(base).map(|(a, b)| a - b).collect();
        SampledFunction::new(*self.base.grid(), values).expect("grid-sized samples")
    }
}

/// `∫|δ| dv` plus the total variation of `δ`.
fn sampled_w11(delta: &SampledFunction) -> f64 {
    let abs: Vec<f64> = delta.values().iter().map(|x| x.abs()).collect();
    let tv: f64 = delta.values().windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    delta.grid().trapezoid(&abs) + tv
}

impl Profile for PerturbedProfile {
    fn grid(&self) -> &VelocityGrid {
        self.base.grid()
    }

    fn f0(&self, v: f64) -> f64 {
        match &self.delta {
            Delta::Chi(c) => self.base.f0(v) + chi_antiderivative(v, c),
            Delta::Sampled { antiderivative, .. } => {
                self.base.f0(v) + interp::cubic(self.base.grid(), antiderivative, v)
            }
            Delta::Rearrangement(m) => self.base.f0(m.map(v)[0]),
        }
    }

    fn df(&self, v: f64) -> f64 {
        match &self.delta {
            Delta::Chi(c) => self.base.df(v) + chi(v, c),
            Delta::Sampled { fp, .. } => self.base.df(v) + fp.value_at(v),
            Delta::Rearrangement(m) => {
                let [x, dx, _] = m.map(v);
                dx * self.base.df(x)
            }
        }
    }

    fn d2f(&self, v: f64) -> f64 {
        match &self.delta {
            Delta::Chi(c) => self.base.d2f(v) + chi_deriv(v, c),
            Delta::Sampled { fp, .. } => self.base.d2f(v) + fp.deriv_at(v),
            Delta::Rearrangement(m) => {
                let [x, dx, ddx] = m.map(v);
                ddx * self.base.df(x) + dx * dx * self.base.d2f(x)
            }
        }
    }

    fn df_samples(&self) -> &[f64] {
        &self.df
    }

    fn pv(&self, u: f64) -> f64 {
        match &self.delta {
            Delta::Chi(c) => self.base.pv(u) + chi_hilbert(u, c),
            _ => crate::hilbert::pv_integral(self.grid(), &self.df, u, self.df(u), self.d2f(u)),
        }
    }

    fn cauchy(&self, u: Complex64, order: u8) -> Complex64 {
        match &self.delta {
            Delta::Chi(c) => self.base.cauchy(u, order) + chi_cauchy(u, c, order),
            _ => {
                let v_max = self.grid().v_max();
                let x = u.re.clamp(-v_max, v_max);
                crate::hilbert::cauchy_integral(self.grid(), &self.df, u, order, self.df(x), self.d2f(x))
            }
        }
    }

    fn frame_offset(&self) -> f64 {
        self.frame_offset
    }

    fn search_interval(&self) -> (f64, f64) {
        self.base.search_interval()
    }
}

/// `f0 ∘ V`: an area-preserving relabelling of velocities.
pub fn rearrange(profile: &EquilibriumProfile, map: RearrangementMap) -> Result<PerturbedProfile> {
    let min = 1.0 - map.amplitude.abs() * map.shape.max_slope_unit();
    if !(min > 0.0) {
        return Err(Error::Diffeomorphism(min));
    }
    Ok(PerturbedProfile::build(
        profile.clone(),
        Delta::Rearrangement(map),
        PerturbationKind::Rearrangement,
        0.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::find_critical_points;

    #[test]
    fn identity_rearrangement() {
        let p = EquilibriumProfile::maxwellian(0.0, 1.0).unwrap();
        let q = rearrange(&p, RearrangementMap::new(0.3, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(q.df_samples(), p.df_samples());
        assert_eq!(q.norm_w11(), 0.0);
    }

    #[test]
    fn rearrangement_keeps_zero_count() {
        let p = EquilibriumProfile::bi_maxwellian(1.0, 1.0).unwrap();
        let m = RearrangementMap::new(0.4, 1.2, 0.8 * RearrangementMap::max_amplitude(1.2)).unwrap();
        let q = rearrange(&p, m).unwrap();
        assert_eq!(find_critical_points(&q).len(), 3);
        assert!(q.norm_w11() > 0.0);
    }

    #[test]
    fn non_diffeomorphism_rejected() {
        let a = 1.01 * RearrangementMap::max_amplitude(0.5);
        assert!(matches!(RearrangementMap::new(0.0, 0.5, a), Err(Error::Diffeomorphism(_))));
    }

    #[test]
    fn chi_profile_adds_two_zeros() {
        let p = EquilibriumProfile::maxwellian(0.0, 1.0).unwrap();
        let c = ChiParams::with_defaults(0.05, 0.0).unwrap();
        let q = PerturbedProfile::with_chi(p, c, PerturbationKind::AdditiveW11, 0.0);
        assert_eq!(find_critical_points(&q).len(), 3);
        assert!((q.norm_w11() - 0.21).abs() < 1e-9);
    }
}
