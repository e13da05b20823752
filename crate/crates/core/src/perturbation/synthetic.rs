use crate::dispersion::{embedded_mode_scan, epsilon_boundary};
use crate::equilibrium::{Component, EquilibriumProfile, Profile};
use crate::error::{Error, Result};

/// A Maxwellian of the given width plus a narrower satellite placed so that
/// `f0'` touches zero without changing sign at `u_star`, where the contour
/// then passes through the origin.
pub fn make_synthetic_tangency(width: f64, u_star: f64) -> Result<EquilibriumProfile> {
    let w = width;
    let s = 0.5 * w;
    if !(w > 0.0) || u_star == 0.0 || (2.0 * u_star * u_star - w * w).abs() < 1e-9 {
        return Err(Error::Fixture(format!("no tangency construction at u* = {u_star} for width {w}")));
    }
    let e = (-(u_star / w).powi(2)).exp();
    let g1 = -2.0 * u_star / (w * w) * e;
    // S'/S'' = G'/G'' at u*, with S centred at u* - x
    let r = -u_star * w * w / (2.0 * u_star * u_star - w * w);
    let disc = (s.powi(4) + 8.0 * r * r * s * s).sqrt();
    let candidates = [(-s * s + disc) / (4.0 * r), (-s * s - disc) / (4.0 * r)];
    let (x, a) = candidates
        .iter()
        .map(|&x| {
            let sp = -2.0 * x / (s * s) * (-(x / s).powi(2)).exp();
            (x, -g1 / sp)
        })
        .filter(|(_, a)| *a > 0.0 && a.is_finite())
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .ok_or_else(|| Error::Fixture("no positive satellite weight".into()))?;
    let profile = EquilibriumProfile::weighted_sum(vec![
        Component { weight: 1.0, center: 0.0, width: w },
        Component { weight: a, center: u_star - x, width: s },
    ])?;
    if !profile.grid().contains(u_star) {
        return Err(Error::Fixture(format!("u* = {u_star} outside the grid")));
    }
    let modes = embedded_mode_scan(&profile);
    match modes.as_slice() {
        [m] if (m.u - u_star).abs() < 1e-6 => {
            let eps = epsilon_boundary(&profile, m.k, m.u)?;
            if eps.norm() < 1e-8 {
                Ok(profile)
            } else {
                Err(Error::Fixture(format!("|ε(k*, u*)| = {:e}", eps.norm())))
            }
        }
        other => Err(Error::Fixture(format!("expected one embedded mode at {u_star}, found {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{find_critical_points, CriticalKind};

    #[test]
    fn fixture_has_one_tangency() {
        let p = make_synthetic_tangency(1.0, -2.0).unwrap();
        let modes = embedded_mode_scan(&p);
        assert_eq!(modes.len(), 1);
        // oracle: π H[f0'](u*) from scipy quad on the same two-Gaussian profile
        assert!((modes[0].k * modes[0].k - 0.4509).abs() < 1e-3, "{:?}", modes[0]);
        assert!(p.f0_samples().iter().all(|x| *x >= 0.0));
        let kinds: Vec<_> = find_critical_points(&p).iter().map(|c| c.kind).collect();
        assert_eq!(kinds, [CriticalKind::Tangency, CriticalKind::CrossingDown]);
    }
}
