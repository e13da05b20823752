use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_k, epsilon_boundary, epsilon_uhp};
use crate::equilibrium::{max_abs_df, Profile};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralClass {
    Point,
    Continuous,
    Residual,
    Resolvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumClass {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub class: SpectralClass,
}

const MODE_TOL: f64 = 1e-8;

/// Classifies `λ` for the operator at wavenumber `k`, with `u = λ / (ik)`.
pub fn classify_lambda<P: Profile + ?Sized>(p: &P, k: f64, lambda: Complex64) -> Result<SpectrumClass> {
    check_k(k)?;
    let u = lambda / Complex64::new(0.0, k);
    let scale = 1.0 + u.norm();
    let class = if u.im.abs() > 1e-12 * scale {
        // eigenvalues come in quartets, so probe the upper half-plane image
        let w = if u.im > 0.0 { u } else { u.conj() };
        if epsilon_uhp(p, k, w).0.norm() < MODE_TOL {
            SpectralClass::Point
        } else {
            SpectralClass::Resolvent
        }
    } else if !(u.re.abs() < p.grid().v_max()) {
        SpectralClass::Continuous
    } else {
        let flat = p.df(u.re).abs() <= 1e-9 * max_abs_df(p);
        if !flat {
            SpectralClass::Continuous
        } else if epsilon_boundary(p, k, u.re)?.norm() < MODE_TOL {
            SpectralClass::Point
        } else {
            SpectralClass::Residual
        }
    };
    Ok(SpectrumClass { lambda_re: lambda.re, lambda_im: lambda.im, class })
}
