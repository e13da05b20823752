use penrose_core::dispersion::{embedded_mode_scan, penrose_test, Verdict};
use penrose_core::perturbation::make_synthetic_tangency;
use penrose_core::signature::{
    continuum_signature, embedded_signature, little_big_man, signature_map, ModeTriplet,
};
use penrose_core::{EquilibriumProfile, Profile};
use proptest::prelude::*;

#[test]
fn all_triplets_classified() {
    let expect = [
        ("+++", Some(0)),
        ("++-", Some(2)),
        ("+-+", None),
        ("+--", Some(1)),
        ("-++", Some(1)),
        ("-+-", None),
        ("--+", Some(2)),
        ("---", Some(0)),
    ];
    for (s, witness) in expect {
        let t: ModeTriplet = s.parse().unwrap();
        let r = little_big_man(&t);
        assert_eq!(r.witness, witness, "{s}");
        assert_eq!(r.definite_achievable, witness.is_some(), "{s}");
    }
}

#[test]
fn full_flip_is_an_involution() {
    for s in ["+++", "+-+", "--+", "-+-", "+--"] {
        let t: ModeTriplet = s.parse().unwrap();
        let once = ModeTriplet::new(t.frequencies(), t.flipped(3)).unwrap();
        assert_eq!(once.flipped(3), t.signs(), "{s}");
    }
}

#[test]
fn bimaxwellian_changes_sign_at_the_peaks() {
    let p = EquilibriumProfile::bi_maxwellian(1.0, 1.0).unwrap();
    let cp = signature_map(&p).change_points();
    assert_eq!(cp.len(), 2);
    assert!((cp[0] + cp[1]).abs() < 1e-10 && cp[1] > 0.5);
    assert!((cp[1] - 0.9575040240772688).abs() < 1e-9);
}

#[test]
fn fixture_mode_signature_matches_the_continuum() {
    // with the Plemelj sign of Im ε a stable tangency has f0' and H[f0'']
    // of one sign, so the mode carries the signature of the continuum
    // around it; u ∂ε_R/∂u is even under v → -v, so the mirror image agrees
    for u_star in [-2.0, 2.0] {
        let p = make_synthetic_tangency(1.0, u_star).unwrap();
        assert_eq!(penrose_test(&p).unwrap().verdict, Verdict::Stable);
        let m = embedded_mode_scan(&p)[0];
        let s = embedded_signature(&p, m.k, m.u).unwrap();
        assert_eq!(s, 1, "u* = {u_star}");
        for side in [-0.05, 0.05] {
            assert_eq!(continuum_signature(&p, m.u + side), s);
        }
    }
}

#[test]
fn embedded_signature_rejects_non_modes() {
    let p = make_synthetic_tangency(1.0, -2.0).unwrap();
    let m = embedded_mode_scan(&p)[0];
    assert!(embedded_signature(&p, m.k, m.u + 0.3).is_err());
    assert!(embedded_signature(&p, 1.5 * m.k, m.u).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn signature_ignores_normalization(c in 0.2f64..2.0, alpha in 0.05f64..20.0, u in -4.0f64..4.0) {
        let p = EquilibriumProfile::bi_maxwellian(c, 1.0).unwrap();
        let q = p.scaled(alpha).unwrap();
        prop_assert_eq!(continuum_signature(&p, u), continuum_signature(&q, u));
        prop_assert_eq!(signature_map(&p).zeros.len(), signature_map(&q).zeros.len());
        prop_assert!(p.grid() == q.grid());
    }
}
