//! Local cubic interpolation on uniform and non-uniform nodes.

use super::VelocityGrid;

/// Four-point Lagrange weights for fractional offset `t` in `[0, 1]` between
/// nodes 1 and 2 of the stencil `{-1, 0, 1, 2}`.
#[inline]
fn weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

#[inline]
fn weights_deriv(t: f64) -> [f64; 4] {
    [
        -(3.0 * t * t - 6.0 * t + 2.0) / 6.0,
        (3.0 * t * t - 4.0 * t - 1.0) / 2.0,
        -(3.0 * t * t - 2.0 * t - 2.0) / 2.0,
        (3.0 * t * t - 1.0) / 6.0,
    ]
}

fn stencil(grid: &VelocityGrid, u: f64) -> Option<(usize, f64)> {
    let n = grid.len();
    let x = grid.position(u);
    if !(x >= 0.0 && x <= (n - 1) as f64) {
        return None;
    }
    let i = (x.floor() as usize).clamp(1, n - 3);
    Some((i - 1, x - i as f64))
}

/// Cubic interpolation of grid samples; zero outside the grid.
pub fn cubic(grid: &VelocityGrid, values: &[f64], u: f64) -> f64 {
    match stencil(grid, u) {
        None => 0.0,
        Some((s, t)) => {
            let w = weights(t);
            (0..4).map(|j| w[j] * values[s + j]).sum()
        }
    }
}

/// Derivative of the cubic interpolant.
pub fn cubic_deriv(grid: &VelocityGrid, values: &[f64], u: f64) -> f64 {
    match stencil(grid, u) {
        None => 0.0,
        Some((s, t)) => {
            let w = weights_deriv(t);
            (0..4).map(|j| w[j] * values[s + j]).sum::<f64>() / grid.spacing()
        }
    }
}

/// Cubic Lagrange interpolation on sorted, possibly non-uniform abscissae.
/// Returns zero outside `[xs[0], xs[last]]`.
pub fn cubic_nonuniform(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    if n < 4 {
        // linear fallback for tiny tables
        let k = xs.partition_point(|&a| a <= x).clamp(1, n - 1);
        let (x0, x1) = (xs[k - 1], xs[k]);
        if x1 == x0 {
            return ys[k];
        }
        let t = (x - x0) / (x1 - x0);
        return ys[k - 1] * (1.0 - t) + ys[k] * t;
    }
    let k = xs.partition_point(|&a| a <= x).clamp(2, n - 2);
    let s = k - 2;
    let mut acc = 0.0;
    for j in 0..4 {
        let mut l = 1.0;
        for m in 0..4 {
            if m != j {
                l *= (x - xs[s + m]) / (xs[s + j] - xs[s + m]);
            }
        }
        acc += l * ys[s + j];
    }
    acc
}

/// Centered first differences, second-order one-sided at the ends.
pub fn centered_first(grid: &VelocityGrid, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let h = grid.spacing();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

/// Centered second differences, copied from the neighbour at the ends.
pub fn centered_second(grid: &VelocityGrid, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let h2 = grid.spacing() * grid.spacing();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    d
}
