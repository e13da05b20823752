//! Krein signatures of the continuum and of embedded modes, and the
//! little-big-man classification of mode triplets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dispersion::{epsilon_boundary, penrose_test, StabilityReport, Verdict};
use crate::equilibrium::{find_critical_points, max_abs_df, CriticalKind, Profile};
use crate::error::{domain, Error, Result};

const ZERO_REL: f64 = 1e-9;
const MODE_TOL: f64 = 1e-6;

fn sgn(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Velocity of the frame in which signatures are measured: the origin when
/// `f0'(0)` vanishes there, otherwise the global maximum of `f0`.
pub fn reference_frame<P: Profile + ?Sized>(p: &P) -> f64 {
    let scale = max_abs_df(p);
    if p.df(0.0).abs() <= ZERO_REL * scale {
        return 0.0;
    }
    find_critical_points(p)
        .into_iter()
        .filter(|c| c.kind == CriticalKind::CrossingDown)
        .map(|c| (p.f0(c.u), c.u))
        .fold((f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 { b } else { a })
        .1
}

fn signature_in_frame<P: Profile + ?Sized>(p: &P, frame: f64, u: f64) -> i8 {
    let d = p.df(u);
    let x = u - frame;
    if x == 0.0 || d.abs() <= ZERO_REL * max_abs_df(p) {
        return 0;
    }
    -sgn(x * d)
}

/// `-sgn((u - U) f0'(u))` with `U` from [`reference_frame`].
pub fn continuum_signature<P: Profile + ?Sized>(p: &P, u: f64) -> i8 {
    signature_in_frame(p, reference_frame(p), u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignInterval {
    pub u_lo: f64,
    pub u_hi: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureMap {
    pub frame: f64,
    pub intervals: Vec<SignInterval>,
    pub zeros: Vec<f64>,
}

impl SignatureMap {
    /// Boundaries between adjacent intervals of opposite sign.
    pub fn change_points(&self) -> Vec<f64> {
        self.intervals
            .windows(2)
            .filter(|w| w[0].sign * w[1].sign < 0)
            .map(|w| w[0].u_hi)
            .collect()
    }
}

/// Sign on `(lo, hi)`, read where `|(u - U) f0'(u)|` is largest so that
/// negligible tails do not masquerade as zeros.
fn interval_sign<P: Profile + ?Sized>(p: &P, frame: f64, lo: f64, hi: f64) -> i8 {
    let n = 64;
    let u = (1..n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .max_by(|a, b| ((a - frame) * p.df(*a)).abs().total_cmp(&((b - frame) * p.df(*b)).abs()))
        .unwrap_or(0.5 * (lo + hi));
    signature_in_frame(p, frame, u)
}

pub fn signature_map<P: Profile + ?Sized>(p: &P) -> SignatureMap {
    let frame = reference_frame(p);
    let v_max = p.grid().v_max();
    let mut zeros: Vec<f64> = find_critical_points(p).into_iter().map(|c| c.u).collect();
    if !zeros.iter().any(|z| (z - frame).abs() < 1e-9) {
        zeros.push(frame);
    }
    zeros.sort_by(f64::total_cmp);
    let mut edges = vec![-v_max];
    edges.extend(zeros.iter().copied());
    edges.push(v_max);
    let intervals = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| SignInterval {
            u_lo: w[0],
            u_hi: w[1],
            sign: interval_sign(p, frame, w[0], w[1]),
        })
        .collect();
    SignatureMap { frame, intervals, zeros }
}

pub fn signature_change_points<P: Profile + ?Sized>(p: &P) -> Vec<f64> {
    signature_map(p).change_points()
}

/// `sgn((u - U) ∂ε_R/∂u)` at an embedded mode `(u, k)`, by a centered
/// difference with step `4 · spacing`.
pub fn embedded_signature<P: Profile + ?Sized>(p: &P, k: f64, u: f64) -> Result<i8> {
    let e = epsilon_boundary(p, k, u)?;
    let scale = max_abs_df(p);
    if e.norm() > MODE_TOL || p.df(u).abs() > ZERO_REL * scale {
        return domain(format!("(u, k) = ({u}, {k}) is not an embedded mode: |ε| = {:e}", e.norm()));
    }
    let h = 4.0 * p.grid().spacing();
    let de = epsilon_boundary(p, k, u + h)?.re - epsilon_boundary(p, k, u - h)?.re;
    let s = sgn((u - reference_frame(p)) * de);
    if s == 0 {
        return domain(format!("embedded signature undefined at u = {u}"));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckedPoint {
    pub u: f64,
    pub f0pp: f64,
    pub hilbert: f64,
}

/// On a stable profile no zero of `f0'` may have `f0'' < 0` and
/// `H[f0'] > 0` together.
pub fn opposite_signature_check<P: Profile + ?Sized>(p: &P) -> Result<Vec<CheckedPoint>> {
    opposite_signature_check_with(p, &penrose_test(p)?)
}

pub fn opposite_signature_check_with<P: Profile + ?Sized>(
    p: &P,
    report: &StabilityReport,
) -> Result<Vec<CheckedPoint>> {
    if report.verdict != Verdict::Stable {
        return Err(Error::Precondition("profile is not spectrally stable".into()));
    }
    let checked: Vec<CheckedPoint> = report
        .critical_points
        .iter()
        .map(|c| CheckedPoint { u: c.u, f0pp: c.f0pp, hilbert: c.pv / std::f64::consts::PI })
        .collect();
    let _ = p;
    if let Some(bad) = checked.iter().find(|c| c.f0pp < 0.0 && c.hilbert > 0.0) {
        return Err(Error::Invariant(format!(
            "stable profile has f0'' = {} < 0 and H = {} > 0 at u = {}",
            bad.f0pp, bad.hilbert, bad.u
        )));
    }
    Ok(checked)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Three modes ordered by positive frequency with their signatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTriplet {
    frequencies: [f64; 3],
    signs: [Sign; 3],
}

impl ModeTriplet {
    pub fn new(frequencies: [f64; 3], signs: [Sign; 3]) -> Result<Self> {
        let [a, b, c] = frequencies;
        if !(a > 0.0 && a < b && b < c) {
            return Err(Error::Parameter(format!(
                "frequencies must be positive and strictly increasing, got {frequencies:?}"
            )));
        }
        Ok(Self { frequencies, signs })
    }

    pub fn signs(&self) -> [Sign; 3] {
        self.signs
    }

    pub fn frequencies(&self) -> [f64; 3] {
        self.frequencies
    }

    /// Signs after a frame shift that pushes the `g` lowest modes to
    /// negative frequency.
    pub fn flipped(&self, g: usize) -> [Sign; 3] {
        let mut s = self.signs;
        for x in s.iter_mut().take(g) {
            *x = x.flip();
        }
        s
    }

    /// The sequence of sign patterns met while the frame speed increases,
    /// `0` marking a mode at zero frequency.
    pub fn frame_sequence(&self) -> Vec<String> {
        let mut out = Vec::new();
        for g in 1..=3 {
            let mut zero: Vec<char> = self.flipped(g - 1).iter().map(|s| s.symbol()).collect();
            zero[g - 1] = '0';
            out.push(zero.into_iter().collect());
            out.push(pattern(&self.flipped(g)));
        }
        out
    }
}

fn pattern(s: &[Sign; 3]) -> String {
    s.iter().map(|x| x.symbol()).collect()
}

impl fmt::Display for ModeTriplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", pattern(&self.signs))
    }
}

impl FromStr for ModeTriplet {
    type Err = Error;

    /// Three `+`/`-` characters; frequencies default to `1, 2, 3`.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.trim().trim_matches(|c| c == '(' || c == ')').chars().collect();
        if chars.len() != 3 {
            return Err(Error::Parameter(format!("triplet `{s}` must have three signs")));
        }
        let mut signs = [Sign::Plus; 3];
        for (slot, c) in signs.iter_mut().zip(chars) {
            *slot = match c {
                '+' => Sign::Plus,
                '-' | '−' => Sign::Minus,
                other => return Err(Error::Parameter(format!("bad sign `{other}` in triplet"))),
            };
        }
        ModeTriplet::new([1.0, 2.0, 3.0], signs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LittleBigMan {
    pub definite_achievable: bool,
    /// Number of modes pushed to negative frequency.
    pub witness: Option<usize>,
}

pub fn little_big_man(t: &ModeTriplet) -> LittleBigMan {
    let witness = (0..=3).find(|&g| {
        let s = t.flipped(g);
        s[0] == s[1] && s[1] == s[2]
    });
    LittleBigMan { definite_achievable: witness.is_some(), witness }
}
