use std::f64::consts::PI;

use num_complex::Complex64;
use penrose_core::hilbert::{cauchy_uhp, pv_hilbert, SampledFunction};
use penrose_core::{EquilibriumProfile, Profile, VelocityGrid};
use proptest::prelude::*;

fn maxwellian_fp(grid: VelocityGrid) -> SampledFunction {
    let p = EquilibriumProfile::maxwellian(0.0, 1.0).unwrap();
    SampledFunction::from_fn(grid, |v| p.df(v))
}

fn default_grid() -> VelocityGrid {
    *EquilibriumProfile::maxwellian(0.0, 1.0).unwrap().grid()
}

#[test]
fn plemelj_limit_is_approached_monotonically() {
    let g = maxwellian_fp(default_grid());
    for u in [-1.4, -0.3, 0.0, 0.8, 2.1] {
        let limit = PI * Complex64::new(pv_hilbert(&g, u).unwrap(), g.value_at(u));
        let gaps: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&d| (cauchy_uhp(&g, Complex64::new(u, d), 1).unwrap() - limit).norm())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{u}: {gaps:?}");
        assert!(gaps[3] < 1e-3, "{u}: {gaps:?}");
    }
}

#[test]
fn second_order_kernel_is_the_derivative() {
    let g = maxwellian_fp(default_grid());
    let d = 1e-5;
    for u in [Complex64::new(0.3, 0.2), Complex64::new(-1.1, 0.05), Complex64::new(2.0, 1.0)] {
        let fd = (cauchy_uhp(&g, u + d, 1).unwrap() - cauchy_uhp(&g, u - d, 1).unwrap()) / (2.0 * d);
        let exact = cauchy_uhp(&g, u, 2).unwrap();
        assert!((fd - exact).norm() < 1e-6 * exact.norm(), "{u}: {fd} vs {exact}");
    }
}

#[test]
fn grid_doubling_moves_hilbert_transform_little() {
    let coarse = default_grid();
    let (a, b) = (maxwellian_fp(coarse), maxwellian_fp(coarse.refined()));
    for u in [-2.5, -1.0, -0.2, 0.0, 0.6, 1.7, 3.0] {
        let diff = (pv_hilbert(&a, u).unwrap() - pv_hilbert(&b, u).unwrap()).abs();
        assert!(diff < 1e-6, "{u}: {diff:e}");
    }
}

#[test]
fn maxwellian_hilbert_matches_dawson() {
    // H[f0'] for f0 = e^{-v²} is (2/√π)(2u D(u) - 1), D the Dawson function;
    // reference values from scipy.special.dawsn
    let g = maxwellian_fp(default_grid());
    let dawson = [(0.5, 0.4244363835020223), (1.0, 0.5380795069127684), (2.0, 0.301_340_388_923_792)];
    for (u, d) in dawson {
        let want = 2.0 / PI.sqrt() * (2.0 * u * d - 1.0);
        let got = pv_hilbert(&g, u).unwrap();
        assert!((got - want).abs() < 1e-9, "{u}: {got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hilbert_is_linear(a in -5.0f64..5.0, b in -5.0f64..5.0, s in 0.3f64..2.0, u in -3.0f64..3.0) {
        let grid = VelocityGrid::new(12.0, 2001).unwrap();
        let g1 = SampledFunction::from_fn(grid, |v| (-v * v).exp());
        let g2 = SampledFunction::from_fn(grid, move |v| v * (-(v - 0.5) * (v - 0.5) / (s * s)).exp());
        let mix = g1.combine(a, &g2, b).unwrap();
        let lhs = pv_hilbert(&mix, u).unwrap();
        let rhs = a * pv_hilbert(&g1, u).unwrap() + b * pv_hilbert(&g2, u).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12, "{} vs {}", lhs, rhs);
    }
}
