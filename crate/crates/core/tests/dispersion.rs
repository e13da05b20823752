use penrose_core::dispersion::{
    epsilon_boundary, find_roots_uhp, penrose_contour, penrose_test, winding_by_crossings, winding_number, Verdict,
};
use penrose_core::equilibrium::ProfileSpec;
use penrose_core::{EquilibriumProfile, Error, Profile};
use proptest::prelude::*;

fn suite() -> Vec<(&'static str, EquilibriumProfile)> {
    let spec = |s: &str| s.parse::<ProfileSpec>().unwrap().load().unwrap();
    vec![
        ("maxwellian", EquilibriumProfile::maxwellian(0.0, 1.0).unwrap()),
        ("bimax 0.75", EquilibriumProfile::bi_maxwellian(0.75, 1.0).unwrap()),
        ("bimax 1", EquilibriumProfile::bi_maxwellian(1.0, 1.0).unwrap()),
        ("bimax 1.5", EquilibriumProfile::bi_maxwellian(1.5, 1.0).unwrap()),
        ("bump on tail", spec("sum:1,0,1;0.3,3,0.5")),
    ]
}

fn winding_or_critical<P: Profile>(p: &P, k: f64) -> Option<i32> {
    match winding_number(&penrose_contour(p, k).unwrap()) {
        Ok(w) => Some(w),
        Err(Error::CriticalState { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn verdict_matches_root_search() {
    for (name, p) in suite() {
        let r = penrose_test(&p).unwrap();
        let any_root = r.per_k.iter().any(|s| !s.roots.is_empty());
        assert_eq!(r.verdict == Verdict::Unstable, any_root, "{name}");
        for s in &r.per_k {
            assert_eq!(s.roots.len() as i32, s.winding.unwrap_or(0).max(0), "{name} k = {}", s.k);
        }
    }
}

#[test]
fn even_profiles_have_purely_growing_roots() {
    for c in [1.0, 1.5] {
        let r = penrose_test(&EquilibriumProfile::bi_maxwellian(c, 1.0).unwrap()).unwrap();
        let roots: Vec<_> = r.per_k.iter().flat_map(|s| s.roots.iter()).collect();
        assert!(!roots.is_empty());
        assert!(roots.iter().all(|u| u.re.abs() < 1e-8), "{roots:?}");
        // the smallest k must not settle on the neutral Langmuir root
        assert!(roots[0].im > 0.1, "{:?}", roots[0]);
    }
}

#[test]
fn band_edge_is_where_roots_reach_the_axis() {
    let p = EquilibriumProfile::bi_maxwellian(1.0, 1.0).unwrap();
    let r = penrose_test(&p).unwrap();
    let edge = r.unstable_bands[0].k_hi;
    assert!((edge * edge - p.pv(0.0)).abs() < 1e-12);
    let inside = find_roots_uhp(&p, 0.98 * edge).unwrap();
    assert_eq!(inside.len(), 1);
    assert!(inside[0].im < 0.05);
    assert!(find_roots_uhp(&p, 1.02 * edge).unwrap().is_empty());
}

#[test]
fn far_field_follows_the_moments() {
    // ε → 1 only like 1 - N/(k²u²): at the grid ends (1 - ε_R)k²u² must
    // match Σ (j+1) m_j / u^j, m_j the velocity moments of f0
    for (name, p) in suite() {
        let g = *p.grid();
        let moment = |j: i32| g.trapezoid(&g.sample(|v| v.powi(j) * p.f0(v)));
        let edge = g.v_max() - g.spacing();
        for u in [-edge, edge] {
            let series: f64 = (0..=4).map(|j| (j + 1) as f64 * moment(j) / u.powi(j)).sum();
            let e = epsilon_boundary(&p, 1.0, u).unwrap();
            let got = (1.0 - e.re) * u * u;
            assert!((got / series - 1.0).abs() < 1e-2, "{name} at {u}: {got} vs {series}");
            assert!(e.im.abs() < 1e-3, "{name}: Im ε = {}", e.im);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn contour_and_crossing_windings_agree(c in 0.3f64..1.8, k in 0.05f64..3.0) {
        let p = EquilibriumProfile::bi_maxwellian(c, 1.0).unwrap();
        let w = winding_or_critical(&p, k);
        prop_assume!(w.is_some());
        prop_assert_eq!(w.unwrap(), winding_by_crossings(&p, k).unwrap());
    }

    #[test]
    fn scaling_rescales_k(c in 0.3f64..1.8, k in 0.1f64..2.0, alpha in 0.5f64..2.0) {
        let p = EquilibriumProfile::bi_maxwellian(c, 1.0).unwrap();
        let q = p.scaled(alpha).unwrap();
        prop_assert_eq!(
            winding_by_crossings(&p, k).unwrap(),
            winding_by_crossings(&q, k * alpha.sqrt()).unwrap()
        );
        let w = winding_or_critical(&q, k * alpha.sqrt());
        prop_assume!(w.is_some());
        prop_assert_eq!(w.unwrap(), winding_by_crossings(&p, k).unwrap());
    }
}

#[test]
fn verdict_is_scale_invariant() {
    for (name, p) in suite() {
        let base = penrose_test(&p).unwrap().verdict;
        for alpha in [0.5, 0.8, 1.25, 2.0] {
            let v = penrose_test(&p.scaled(alpha).unwrap()).unwrap().verdict;
            assert_eq!(v, base, "{name} alpha = {alpha}");
        }
    }
}
