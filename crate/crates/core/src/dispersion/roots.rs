use num_complex::Complex64;

use super::{check_k, epsilon_uhp, penrose_contour, winding_number};
use crate::equilibrium::{find_critical_points, Profile};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

const MAX_ITER: usize = 50;
const RESIDUAL_TOL: f64 = 1e-10;
const MAX_STARTS: usize = 40;
/// Quarter-decades scanned down from `Im u = 1`.
const RAY_DEPTH: usize = 1200;

/// Unstable roots `Im u > 0` of `ε(k, u)`, as many as the Nyquist count.
pub fn find_roots_uhp<P: Profile + ?Sized>(p: &P, k: f64) -> Result<Vec<Complex64>> {
    check_k(k)?;
    let n = winding_number(&penrose_contour(p, k)?)?;
    if n <= 0 {
        return Ok(Vec::new());
    }
    find_roots_with_count(p, k, n as usize, Execution::default())
}

/// Newton with deflation from the smallest-`|ε|` points of a coarse
/// upper-half-plane lattice, stopping once `count` roots are found.
pub fn find_roots_with_count<P: Profile + ?Sized>(
    p: &P,
    k: f64,
    count: usize,
    exec: Execution,
) -> Result<Vec<Complex64>> {
    find_roots_seeded(p, k, count, exec, &[])
}

/// As [`find_roots_with_count`], trying `hints` (typically the roots at a
/// neighbouring `k`) before any search.
pub fn find_roots_seeded<P: Profile + ?Sized>(
    p: &P,
    k: f64,
    count: usize,
    exec: Execution,
    hints: &[Complex64],
) -> Result<Vec<Complex64>> {
    check_k(k)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut roots: Vec<Complex64> = Vec::new();
    for &start in hints {
        if roots.len() == count {
            break;
        }
        if let Some(r) = newton(p, k, start, &roots) {
            if is_new(&roots, r) {
                roots.push(r);
            }
        }
    }
    if roots.len() == count {
        return Ok(sorted(roots));
    }
    let (lo, hi) = p.search_interval();
    let v_max = p.grid().v_max();
    let (lo, hi) = (lo.max(-0.75 * v_max), hi.min(0.75 * v_max));
    let nre = 121;
    let ims: Vec<f64> = (0..12).map(|j| 0.004 * 2f64.powf(j as f64 * 0.85)).collect();
    let lattice: Vec<Complex64> = (0..nre)
        .flat_map(|i| {
            let re = lo + (hi - lo) * i as f64 / (nre - 1) as f64;
            ims.iter().map(move |&im| Complex64::new(re, im))
        })
        .collect();
    let score: Vec<f64> = exec::map(exec, &lattice, |&u| epsilon_uhp(p, k, u).0.norm());
    let nim = ims.len();
    let at = |i: usize, j: usize| score[i * nim + j];
    // local minima of |ε| first, best first, then everything else
    let mut minima = Vec::new();
    for i in 0..nre {
        for j in 0..nim {
            let s = at(i, j);
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) != (0, 0) && a >= 0 && b >= 0 && (a as usize) < nre && (b as usize) < nim {
                        is_min &= s <= at(a as usize, b as usize);
                    }
                }
            }
            if is_min {
                minima.push((s, lattice[i * nim + j]));
            }
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rest: Vec<(f64, Complex64)> = score.iter().copied().zip(lattice.iter().copied()).collect();
    rest.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scored: Vec<(f64, Complex64)> =
        minima.into_iter().chain(rest.into_iter().take(MAX_STARTS)).collect();

    for &(_, start) in scored.iter().take(3 * MAX_STARTS) {
        if roots.len() == count {
            break;
        }
        if let Some(r) = newton(p, k, start, &roots) {
            if is_new(&roots, r) {
                roots.push(r);
            }
        }
    }
    if roots.len() < count {
        // roots pinned exponentially close to a crossing of f0' are invisible
        // on the lattice; walk down the vertical ray above each crossing
        for start in ray_starts(p, k, exec) {
            if roots.len() == count {
                break;
            }
            if let Some(r) = newton(p, k, start, &roots) {
                if is_new(&roots, r) {
                    roots.push(r);
                }
            }
        }
    }
    if roots.len() < count {
        return Err(Error::Solver(format!(
            "found {} of {count} roots predicted by the Nyquist count at k = {k}",
            roots.len()
        )));
    }
    Ok(sorted(roots))
}

fn is_new(roots: &[Complex64], r: Complex64) -> bool {
    roots.iter().all(|q| (q - r).norm() > 1e-8 * r.norm().min(1.0 + r.norm()).max(r.im))
}

fn sorted(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(b.im.total_cmp(&a.im)));
    roots
}

fn ray_starts<P: Profile + ?Sized>(p: &P, k: f64, exec: Execution) -> Vec<Complex64> {
    let (lo, hi) = p.search_interval();
    let ys: Vec<f64> = (0..RAY_DEPTH).map(|j| 10f64.powf(-(j as f64) / 4.0)).collect();
    let mut starts = Vec::new();
    for c in find_critical_points(p).iter().filter(|c| c.kind.is_crossing() && c.u > lo && c.u < hi) {
        let score: Vec<f64> = exec::map(exec, &ys, |&y| epsilon_uhp(p, k, Complex64::new(c.u, y)).0.norm());
        let mut minima: Vec<(f64, Complex64)> = (0..ys.len())
            .filter(|&j| (j == 0 || score[j] <= score[j - 1]) && (j + 1 == ys.len() || score[j] <= score[j + 1]))
            .map(|j| (score[j], Complex64::new(c.u, ys[j])))
            .collect();
        minima.sort_by(|a, b| a.0.total_cmp(&b.0));
        starts.extend(minima.into_iter().map(|m| m.1));
    }
    starts
}

fn newton<P: Profile + ?Sized>(p: &P, k: f64, start: Complex64, found: &[Complex64]) -> Option<Complex64> {
    let mut u = start;
    for _ in 0..MAX_ITER {
        let (e, de) = epsilon_uhp(p, k, u);
        if e.norm() < 1e-14 {
            break;
        }
        let mut logd = de / e;
        for r in found {
            logd -= 1.0 / (u - r);
        }
        let mut step = 1.0 / logd;
        let cap = 0.5 * (1.0 + u.norm());
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        let mut next = u - step;
        if next.im <= 0.0 {
            next.im = 0.5 * u.im;
        }
        if next.im < f64::MIN_POSITIVE || !next.re.is_finite() {
            return None;
        }
        let done = (next - u).norm() <= 4.0 * f64::EPSILON * next.norm();
        u = next;
        if done {
            break;
        }
    }
    // unstable phase velocities lie over the support; beyond it the
    // truncated profile only has neutral Langmuir roots
    let residual = epsilon_uhp(p, k, u).0.norm();
    (residual < RESIDUAL_TOL && u.im > 0.0 && u.re.abs() < p.grid().v_max()).then_some(u)
}
