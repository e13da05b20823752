use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use super::{contour_from_table, crossings_with_pv, find_roots_seeded, winding_from_crossings};
use super::{winding_number, PvTable};
use crate::equilibrium::{CriticalKind, CriticalPoint, EquilibriumProfile, Profile, VelocityGrid};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Relative threshold on `|H[f0']|` for a `k = 0` critical crossing.
pub const K0_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Stable,
    Unstable,
}

/// Log-spaced wavenumbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KScan {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Default for KScan {
    fn default() -> Self {
        Self { min: 0.05, max: 5.0, count: 60 }
    }
}

impl KScan {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min > 0.0 && max >= min && count >= 1) {
            return Err(Error::Parameter(format!("bad k scan {min}:{max}:{count}")));
        }
        Ok(Self { min, max, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let r = (self.max / self.min).ln() / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min * (r * i as f64).exp()).collect()
    }
}

impl std::str::FromStr for KScan {
    type Err = Error;

    /// `min:max:count`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("k scan `{s}` is not min:max:count"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [a, b, n] = parts[..] else {
            return Err(bad());
        };
        let (a, b, n) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?, n.parse().map_err(|_| bad())?);
        KScan::new(a, b, n)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PenroseOptions {
    pub scan: KScan,
    pub exec: Execution,
    /// Locate the unstable roots at every `k` with positive winding.
    pub roots: bool,
}

impl Default for PenroseOptions {
    fn default() -> Self {
        Self { scan: KScan::default(), exec: Execution::default(), roots: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalInfo {
    pub u: f64,
    pub kind: CriticalKind,
    pub f0pp: f64,
    /// `PV ∫ f0'/(v-u) dv`.
    pub pv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub u: f64,
    pub pv_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KBand {
    pub k_lo: f64,
    pub k_hi: f64,
}

impl KBand {
    pub fn contains(&self, k: f64) -> bool {
        k > self.k_lo && k < self.k_hi
    }

    /// A wavenumber well inside the band.
    pub fn representative(&self) -> f64 {
        if self.k_lo > 0.0 {
            (self.k_lo * self.k_hi).sqrt()
        } else {
            0.5 * self.k_hi
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedMode {
    pub u: f64,
    pub k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootInfo {
    pub re: f64,
    pub im: f64,
    /// `k · Im u`.
    pub growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSample {
    pub k: f64,
    /// `None` when the contour touches the origin.
    pub winding: Option<i32>,
    pub winding_crossings: i32,
    pub roots: Vec<RootInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// A critical state (`k = 0` pair, embedded mode or origin-touching
    /// contour) was found.
    pub critical: bool,
    pub frame_offset: f64,
    pub critical_points: Vec<CriticalInfo>,
    pub violations: Vec<Violation>,
    pub unstable_bands: Vec<KBand>,
    pub k0_critical: Vec<f64>,
    pub embedded_modes: Vec<EmbeddedMode>,
    pub per_k: Vec<KSample>,
}

impl StabilityReport {
    pub fn max_winding(&self) -> i32 {
        self.per_k.iter().filter_map(|s| s.winding).max().unwrap_or(0)
    }

    /// Upper edge of the highest unstable band.
    pub fn k_max(&self) -> Option<f64> {
        self.unstable_bands.iter().map(|b| b.k_hi).reduce(f64::max)
    }
}

/// Exact unstable `k`-bands from the crossing structure: the winding is a
/// step function of `k²` with a jump of `orientation` at each positive `pv`.
pub fn unstable_bands(crossings: &[(CriticalPoint, f64)]) -> Vec<KBand> {
    let mut steps: Vec<(f64, i32)> = crossings
        .iter()
        .filter(|(c, pv)| c.kind.is_crossing() && *pv > 0.0)
        .map(|(c, pv)| (*pv, c.kind.orientation()))
        .collect();
    steps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut bands: Vec<KBand> = Vec::new();
    let mut w = 0;
    for (j, &(s_hi, o)) in steps.iter().enumerate() {
        w += o;
        let s_lo = steps.get(j + 1).map_or(0.0, |x| x.0);
        if w > 0 && s_hi > s_lo {
            let band = KBand { k_lo: s_lo.sqrt(), k_hi: s_hi.sqrt() };
            match bands.last_mut() {
                Some(prev) if prev.k_lo == band.k_hi => prev.k_lo = band.k_lo,
                _ => bands.push(band),
            }
        }
    }
    bands.reverse();
    bands
}

fn is_k0_critical(pv: f64, max_h: f64) -> bool {
    (pv / PI).abs() < K0_REL_TOL * max_h
}

/// Tangencies where the contour passes through the origin at
/// `k = sqrt(π H[f0'](u))`.
pub fn embedded_mode_scan<P: Profile + ?Sized>(p: &P) -> Vec<EmbeddedMode> {
    crossings_with_pv(p)
        .into_iter()
        .filter(|(c, pv)| c.kind == CriticalKind::Tangency && *pv > 0.0)
        .map(|(c, pv)| EmbeddedMode { u: c.u, k: pv.sqrt() })
        .collect()
}

/// Crossings where `f0'` and `H[f0']` vanish together.
pub fn k0_critical_scan<P: Profile + ?Sized>(p: &P) -> Vec<f64> {
    let table = PvTable::new(p, Execution::default());
    k0_from(&crossings_with_pv(p), table.max_abs_hilbert())
}

fn k0_from(crossings: &[(CriticalPoint, f64)], max_h: f64) -> Vec<f64> {
    crossings
        .iter()
        .filter(|(c, pv)| c.kind.is_crossing() && is_k0_critical(*pv, max_h))
        .map(|(c, _)| c.u)
        .collect()
}

pub fn penrose_test<P: Profile + ?Sized>(p: &P) -> Result<StabilityReport> {
    penrose_test_with(p, &PenroseOptions::default())
}

pub fn penrose_test_with<P: Profile + ?Sized>(p: &P, opts: &PenroseOptions) -> Result<StabilityReport> {
    let offset = p.frame_offset();
    let table = PvTable::new(p, opts.exec);
    let max_h = table.max_abs_hilbert();
    let crossings = crossings_with_pv(p);

    let k0 = k0_from(&crossings, max_h);
    let regular: Vec<(CriticalPoint, f64)> = crossings
        .iter()
        .copied()
        .filter(|(c, pv)| !(c.kind.is_crossing() && is_k0_critical(*pv, max_h)))
        .collect();
    let violations: Vec<Violation> = regular
        .iter()
        .filter(|(c, pv)| c.kind.is_crossing() && *pv > 0.0)
        .map(|(c, pv)| Violation { u: c.u + offset, pv_value: *pv })
        .collect();
    let bands = unstable_bands(&regular);
    let embedded: Vec<EmbeddedMode> = crossings
        .iter()
        .filter(|(c, pv)| c.kind == CriticalKind::Tangency && *pv > 0.0)
        .map(|(c, pv)| EmbeddedMode { u: c.u + offset, k: pv.sqrt() })
        .collect();

    let mut ks = opts.scan.values();
    for b in &bands {
        let k = b.representative();
        if !ks.iter().any(|&x| b.contains(x)) && k > 0.0 {
            ks.push(k);
        }
    }
    ks.sort_by(f64::total_cmp);

    let windings = exec::map(opts.exec, &ks, |&k| -> Result<(Option<i32>, i32)> {
        let contour = contour_from_table(p, &table, k);
        let winding = match winding_number(&contour) {
            Ok(w) => Some(w),
            Err(Error::CriticalState { .. }) => None,
            Err(e) => return Err(e),
        };
        let winding_crossings = winding_from_crossings(&crossings, k);
        if let Some(w) = winding {
            if w != winding_crossings {
                return Err(Error::Invariant(format!(
                    "winding {w} from the contour but {winding_crossings} from crossings at k = {k}"
                )));
            }
        }
        Ok((winding, winding_crossings))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    // roots are continued along k, seeding each solve with the previous one
    let mut per_k = Vec::with_capacity(ks.len());
    let mut hints: Vec<Complex64> = Vec::new();
    for (&k, &(winding, winding_crossings)) in ks.iter().zip(&windings) {
        let roots = match winding {
            Some(w) if w > 0 && opts.roots => {
                let r = find_roots_seeded(p, k, w as usize, opts.exec, &hints)?;
                hints = r.clone();
                r
            }
            _ => {
                hints.clear();
                Vec::new()
            }
        };
        let roots = roots
            .into_iter()
            .map(|u| RootInfo { re: u.re + offset, im: u.im, growth: k * u.im })
            .collect();
        per_k.push(KSample { k, winding, winding_crossings, roots });
    }

    let verdict = if violations.is_empty() { Verdict::Stable } else { Verdict::Unstable };
    let any_positive = per_k.iter().any(|s| s.winding.unwrap_or(s.winding_crossings) > 0);
    if (verdict == Verdict::Unstable) != any_positive || bands.is_empty() == !violations.is_empty() {
        return Err(Error::Invariant(format!(
            "verdict {verdict:?} disagrees with the winding scan (positive winding: {any_positive}, bands: {})",
            bands.len()
        )));
    }
    let critical = !k0.is_empty() || !embedded.is_empty() || per_k.iter().any(|s| s.winding.is_none());

    Ok(StabilityReport {
        verdict,
        critical,
        frame_offset: offset,
        critical_points: crossings
            .iter()
            .map(|(c, pv)| CriticalInfo { u: c.u + offset, kind: c.kind, f0pp: c.f0pp, pv: *pv })
            .collect(),
        violations,
        unstable_bands: bands,
        k0_critical: k0.iter().map(|u| u + offset).collect(),
        embedded_modes: embedded,
        per_k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionStep {
    pub c: f64,
    pub pv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalSeparation {
    pub width: f64,
    pub c_star: f64,
    pub pv_at_c_star: f64,
    pub log: Vec<BisectionStep>,
}

/// Separation `c*` at which the valley of `bi_maxwellian(c, width)` has
/// zero principal value, bracketed by `[0.75, 1.0] · width`.
pub fn critical_separation(width: f64) -> Result<CriticalSeparation> {
    critical_separation_in(width, 0.75 * width, width)
}

pub fn critical_separation_in(width: f64, lo: f64, hi: f64) -> Result<CriticalSeparation> {
    if !(width > 0.0 && lo > 0.0 && hi > lo) {
        return Err(Error::Parameter(format!("bad bracket [{lo}, {hi}] for width {width}")));
    }
    // one grid for every c keeps pv(c) smooth in c
    let grid = VelocityGrid::with_default_nodes(hi + 8.0 * width)?;
    let pv_at = |c: f64| -> Result<f64> {
        let p = EquilibriumProfile::on_grid(
            crate::equilibrium::Family::BiMaxwellian { separation: c, width },
            grid,
        )?;
        Ok(p.pv(0.0))
    };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (pv_at(a)?, pv_at(b)?);
    let mut log = vec![BisectionStep { c: a, pv: fa }, BisectionStep { c: b, pv: fb }];
    if fa.signum() == fb.signum() {
        return Err(Error::Solver(format!(
            "pv does not change sign on [{lo}, {hi}]: {fa:e}, {fb:e}"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b || b - a < 1e-13 * width {
            break;
        }
        let fm = pv_at(m)?;
        log.push(BisectionStep { c: m, pv: fm });
        if fm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let c = 0.5 * (a + b);
    let pv = pv_at(c)?;
    Ok(CriticalSeparation { width, c_star: c, pv_at_c_star: pv, log })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_verdicts() {
        let m = penrose_test(&EquilibriumProfile::maxwellian(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(m.verdict, Verdict::Stable);
        assert!(m.violations.is_empty());
        assert!(m.per_k.iter().all(|s| s.winding == Some(0)));

        let b = penrose_test(&EquilibriumProfile::bi_maxwellian(0.75, 1.0).unwrap()).unwrap();
        assert_eq!(b.verdict, Verdict::Stable);

        let b = penrose_test(&EquilibriumProfile::bi_maxwellian(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(b.verdict, Verdict::Unstable);
        assert_eq!(b.violations.len(), 1);
        assert!(b.violations[0].u.abs() < 1e-10);
        assert_eq!(b.unstable_bands.len(), 1);
        assert!((b.unstable_bands[0].k_hi - 0.539953349344968f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn bands_follow_step_function() {
        let cp = |kind| CriticalPoint { u: 0.0, kind, f0pp: 0.0 };
        let crossings = [
            (cp(CriticalKind::CrossingUp), 4.0),
            (cp(CriticalKind::CrossingDown), 1.0),
            (cp(CriticalKind::CrossingDown), -2.0),
        ];
        assert_eq!(unstable_bands(&crossings), vec![KBand { k_lo: 1.0, k_hi: 2.0 }]);
    }

    #[test]
    fn log_scan_endpoints() {
        let v = KScan::default().values();
        assert_eq!(v.len(), 60);
        assert!((v[0] - 0.05).abs() < 1e-15 && (v[59] - 5.0).abs() < 1e-12);
    }
}
