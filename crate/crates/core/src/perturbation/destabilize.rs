use serde::{Deserialize, Serialize};

use super::{Bump, ChiParams, PerturbationKind, PerturbedProfile};
use crate::dispersion::{
    embedded_mode_scan, k0_critical_scan, penrose_test, KBand, StabilityReport, Verdict,
};
use crate::equilibrium::{find_critical_points, shift_frame, CriticalKind, EquilibriumProfile, Profile};
use crate::error::{domain, Error, Result};
use crate::exec::{self, Execution};
use crate::hilbert::{pv_integral, SampledFunction};

/// Target value of `PV ∫ f0'/(v-u0)` after adding `χ`; the unstable band
/// is then `0 < k < sqrt(margin)`.
pub const DEFAULT_MARGIN: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DestabilizationSummary {
    pub kind: PerturbationKind,
    pub norm_w11: f64,
    pub winding_before: i32,
    pub winding_after: i32,
    pub unstable_k_band: Option<KBand>,
    pub zero_count_delta: i64,
    /// `sup |δf0'|` on the grid.
    pub sup_delta_fp: f64,
    pub chi: Option<ChiParams>,
    /// Jump left in `δf0'` where the `k = 0` pair is cut off.
    pub truncation_jump: Option<f64>,
    /// Measured change of `H[f0']` at the critical point.
    pub hilbert_shift: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Destabilization {
    pub profile: PerturbedProfile,
    pub before: StabilityReport,
    pub after: StabilityReport,
    pub summary: DestabilizationSummary,
}

fn finish(
    profile: PerturbedProfile,
    before: StabilityReport,
    extra: (Option<f64>, Option<f64>),
) -> Result<Destabilization> {
    let after = penrose_test(&profile)?;
    let summary = DestabilizationSummary {
        kind: profile.kind(),
        norm_w11: profile.norm_w11(),
        winding_before: before.max_winding(),
        winding_after: after.max_winding(),
        unstable_k_band: after.unstable_bands.last().copied(),
        zero_count_delta: after.critical_points.len() as i64 - before.critical_points.len() as i64,
        sup_delta_fp: profile.delta_fp().sup_norm(),
        chi: profile.chi_params(),
        truncation_jump: extra.0,
        hilbert_shift: extra.1,
    };
    Ok(Destabilization { profile, before, after, summary })
}

fn require_stable(report: &StabilityReport) -> Result<()> {
    if report.verdict == Verdict::Stable {
        Ok(())
    } else {
        Err(Error::Precondition("profile is already spectrally unstable".into()))
    }
}

/// Core width `ε` for which `χ` lifts `PV ∫ f0'/(v-u0)` from `pv_base` to
/// `margin`, never wider than `e^{-1/h}`.
fn core_width(h: f64, pv_base: f64, margin: f64) -> f64 {
    let (c, d) = (3.0 * h, h);
    let rest = c * c.ln() - d * d.ln();
    let target = ((rest + pv_base - margin) / (2.0 * h)).exp();
    target.min((-1.0 / h).exp()).max(f64::MIN_POSITIVE)
}

fn chi_destabilize(
    profile: &EquilibriumProfile,
    u0: f64,
    h: f64,
    kind: PerturbationKind,
) -> Result<Destabilization> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("plateau height must be positive, got {h}")));
    }
    let before = penrose_test(profile)?;
    require_stable(&before)?;
    let crit = find_critical_points(profile);
    if kind == PerturbationKind::Rearrangement && crit.len() < 2 {
        return domain(
            "no admissible valley: a single zero of f0' is structurally stable under rearrangements",
        );
    }
    let Some(target) = crit
        .iter()
        .filter(|c| (c.u - u0).abs() < 1e-3)
        .min_by(|a, b| (a.u - u0).abs().total_cmp(&(b.u - u0).abs()))
    else {
        return domain(format!("no admissible u0: f0' has no zero near {u0}"));
    };
    let pv_base = profile.pv(target.u);
    if target.kind != CriticalKind::CrossingDown || !(pv_base < 0.0) {
        return domain(format!(
            "no admissible u0 at {}: needs f0'' < 0 and H[f0'] < 0 (f0'' = {}, pv = {pv_base})",
            target.u, target.f0pp
        ));
    }
    let eps = core_width(h, pv_base, DEFAULT_MARGIN);
    let chi = ChiParams::new(h, h, eps, 0.0)?;
    if let Some(other) = crit.iter().find(|c| c.u != target.u && (c.u - target.u).abs() <= chi.half_width()) {
        return Err(Error::Parameter(format!(
            "h = {h} too large: support of chi reaches the zero at {}",
            other.u
        )));
    }
    // work in the frame of the zero so the sub-ulp core stays representable
    let mut u_c = target.u;
    if u_c.abs() < 1e-12 && profile.df(0.0).abs() <= profile.df(u_c).abs() {
        u_c = 0.0;
    }
    let local = if u_c == 0.0 { profile.clone() } else { shift_frame(profile, u_c)? };
    let perturbed = PerturbedProfile::with_chi(local, chi, kind, u_c);
    finish(perturbed, before, (None, None))
}

/// Adds `χ(· - u0)` at a maximum of `f0` with `H[f0'] < 0`.
pub fn destabilize_w11(profile: &EquilibriumProfile, u0: f64, h: f64) -> Result<Destabilization> {
    chi_destabilize(profile, u0, h, PerturbationKind::AdditiveW11)
}

/// First-order rearrangement at a valley-side maximum `vc` of a stable
/// profile with several zeros of `f0'`.
pub fn destabilize_rearrangement(profile: &EquilibriumProfile, vc: f64, h: f64) -> Result<Destabilization> {
    chi_destabilize(profile, vc, h, PerturbationKind::Rearrangement)
}

/// `δf0' = -H[δh]` for a bump `δh` centred on a `k = 0` critical point,
/// cut off beyond three bump radii.
pub fn destabilize_k0(
    profile: &EquilibriumProfile,
    u: f64,
    amplitude: f64,
    radius: f64,
) -> Result<Destabilization> {
    let scan = k0_critical_scan(profile);
    let Some(&uc) = scan.iter().find(|x| (*x - u).abs() < 1e-6) else {
        return domain(format!("u = {u} is not a k = 0 critical point (found {scan:?})"));
    };
    let bump = Bump::new(uc, radius, amplitude)?;
    let grid = *profile.grid();
    let samples = grid.sample(|v| bump.value(v));
    let cut = 3.0 * radius;
    let hilbert: Vec<f64> = exec::map_range(Execution::default(), grid.len(), |i| {
        let v = grid.node(i);
        if (v - uc).abs() > cut || i == 0 || i + 1 == grid.len() {
            return 0.0;
        }
        let [b, b1, _] = bump.eval(v);
        pv_integral(&grid, &samples, v, b, b1) / std::f64::consts::PI
    });
    let fp = SampledFunction::new(grid, hilbert.iter().map(|x| -x).collect())?;
    let jump = (0..grid.len())
        .filter(|&i| (grid.node(i) - uc).abs() <= cut)
        .map(|i| (grid.node(i), hilbert[i]))
        .fold((0.0f64, 0.0f64), |a, (v, x)| if (v - uc).abs() >= a.0 { ((v - uc).abs(), x.abs()) } else { a })
        .1;
    let before = penrose_test(profile)?;
    let perturbed = PerturbedProfile::with_sampled(profile.clone(), fp, PerturbationKind::K0Pair)?;
    let shift = (perturbed.pv(uc) - profile.pv(uc)) / std::f64::consts::PI;
    finish(perturbed, before, (Some(jump), Some(shift)))
}

/// `δf0' = (h f0')'`, the linearly accessible perturbation `δf0 = h f0'`,
/// applied to a profile hosting an embedded mode.
pub fn destabilize_embedded(profile: &EquilibriumProfile, hfunc: Bump) -> Result<Destabilization> {
    let modes = embedded_mode_scan(profile);
    let Some(mode) = modes.iter().min_by(|a, b| {
        (a.u - hfunc.center).abs().total_cmp(&(b.u - hfunc.center).abs())
    }) else {
        return domain("profile hosts no embedded mode");
    };
    if hfunc.value(mode.u) == 0.0 {
        return Err(Error::Parameter(format!("h vanishes at the embedded mode u = {}", mode.u)));
    }
    let grid = *profile.grid();
    let fp = SampledFunction::from_fn(grid, |v| {
        let [h, h1, _] = hfunc.eval(v);
        h1 * profile.df(v) + h * profile.d2f(v)
    });
    let before = penrose_test(profile)?;
    let perturbed = PerturbedProfile::with_sampled(profile.clone(), fp, PerturbationKind::Embedded)?;
    finish(perturbed, before, (None, None))
}
