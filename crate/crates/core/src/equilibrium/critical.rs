use serde::{Deserialize, Serialize};

use super::{max_abs_df, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    /// `f0'` goes from positive to negative: a local maximum of `f0`.
    CrossingDown,
    /// `f0'` goes from negative to positive: a local minimum of `f0`.
    CrossingUp,
    /// `f0'` touches zero without changing sign.
    Tangency,
}

impl CriticalKind {
    /// Orientation used by the crossing count: `+1` minimum, `-1` maximum.
    pub fn orientation(self) -> i32 {
        match self {
            CriticalKind::CrossingUp => 1,
            CriticalKind::CrossingDown => -1,
            CriticalKind::Tangency => 0,
        }
    }

    pub fn is_crossing(self) -> bool {
        self != CriticalKind::Tangency
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub u: f64,
    pub kind: CriticalKind,
    pub f0pp: f64,
}

const ROOT_TOL: f64 = 1e-10;
const TANGENCY_REL: f64 = 1e-9;
const SUPPORT_REL: f64 = 1e-12;

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Bisection on `f0'`, run down to `ROOT_TOL` and then on to the last
/// representable midpoint so the root is as sharp as the arithmetic allows.
fn bisect<P: Profile + ?Sized>(p: &P, mut lo: f64, mut hi: f64, s_lo: i8) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = sign(p.df(mid));
        if s == 0 {
            return mid;
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < ROOT_TOL * 1e-6 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section minimum of `|f0'|` on `[a, b]`.
fn golden_min<P: Profile + ?Sized>(p: &P, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (p.df(c).abs(), p.df(d).abs());
    while b - a > ROOT_TOL * 1e-2 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = p.df(c).abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = p.df(d).abs();
        }
    }
    0.5 * (a + b)
}

/// Zeros of `f0'`: sign changes bracketed on the grid and refined by
/// bisection, plus tangencies where `|f0'|` dips below `1e-9 · max|f0'|`.
/// Points where `f0` is negligible (below `1e-12` of its peak) are skipped.
pub fn find_critical_points<P: Profile + ?Sized>(p: &P) -> Vec<CriticalPoint> {
    let grid = *p.grid();
    let (lo, hi) = p.search_interval();
    let idx: Vec<usize> = (1..grid.len() - 1)
        .filter(|&i| {
            let v = grid.node(i);
            v >= lo && v <= hi
        })
        .collect();
    if idx.len() < 3 {
        return Vec::new();
    }
    let df = p.df_samples();
    let scale = max_abs_df(p);
    if scale == 0.0 {
        return Vec::new();
    }
    let peak = idx.iter().map(|&i| p.f0(grid.node(i))).fold(0.0, f64::max);
    let in_support = |u: f64| p.f0(u) > SUPPORT_REL * peak;

    let mut out = Vec::new();
    let mut push = |u: f64, kind: CriticalKind| {
        if in_support(u) {
            out.push(CriticalPoint { u, kind, f0pp: p.d2f(u) });
        }
    };

    // sign changes, with runs of exact zeros collapsed to their middle
    let mut k = 0;
    while k + 1 < idx.len() {
        let i = idx[k];
        let si = sign(df[i]);
        if si == 0 {
            k += 1;
            continue;
        }
        let mut m = k + 1;
        while m < idx.len() && sign(df[idx[m]]) == 0 {
            m += 1;
        }
        if m == idx.len() {
            break;
        }
        let j = idx[m];
        let sj = sign(df[j]);
        let kind = if si < 0 { CriticalKind::CrossingUp } else { CriticalKind::CrossingDown };
        if m == k + 1 {
            if si != sj {
                push(bisect(p, grid.node(i), grid.node(j), si), kind);
            }
        } else {
            let u = grid.node(idx[(k + m) / 2]);
            if si != sj {
                push(u, kind);
            } else {
                push(u, CriticalKind::Tangency);
            }
        }
        k = m;
    }

    // tangencies: interior local minima of |f0'| without a sign change
    for w in idx.windows(3) {
        let (a, b, c) = (df[w[0]], df[w[1]], df[w[2]]);
        let s = sign(b);
        if s == 0 || sign(a) != s || sign(c) != s {
            continue;
        }
        if !(b.abs() <= a.abs() && b.abs() < c.abs()) {
            continue;
        }
        let u = golden_min(p, grid.node(w[0]), grid.node(w[2]));
        if p.df(u).abs() < TANGENCY_REL * scale {
            push(u, CriticalKind::Tangency);
        }
    }

    out.sort_by(|a, b| a.u.total_cmp(&b.u));
    out
}
