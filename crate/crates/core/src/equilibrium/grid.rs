use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform velocity grid on `[-v_max, v_max]` with an odd number of nodes,
/// so that `v = 0` is always a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityGrid {
    v_max: f64,
    n: usize,
}

impl VelocityGrid {
    pub const MIN_NODES: usize = 101;
    pub const DEFAULT_NODES: usize = 4001;

    pub fn new(v_max: f64, n: usize) -> Result<Self> {
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(Error::Parameter(format!("v_max must be positive, got {v_max}")));
        }
        if n < Self::MIN_NODES || n.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "grid needs an odd node count >= {}, got {n}",
                Self::MIN_NODES
            )));
        }
        Ok(Self { v_max, n })
    }

    pub fn with_default_nodes(v_max: f64) -> Result<Self> {
        Self::new(v_max, Self::DEFAULT_NODES)
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn mid(&self) -> usize {
        self.n / 2
    }

    pub fn spacing(&self) -> f64 {
        self.v_max / self.mid() as f64
    }

    /// Node `i`; exactly antisymmetric about the middle node.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.mid() as f64) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    pub fn contains(&self, u: f64) -> bool {
        u.abs() <= self.v_max
    }

    /// Fractional node coordinate of `u`.
    #[inline]
    pub fn position(&self, u: f64) -> f64 {
        u / self.spacing() + self.mid() as f64
    }

    /// Same extent, twice the resolution.
    pub fn refined(&self) -> Self {
        Self { v_max: self.v_max, n: 2 * self.n - 1 }
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.n).map(|i| f(self.node(i))).collect()
    }

    /// Composite trapezoid rule over the whole grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n);
        let inner: f64 = values[1..self.n - 1].iter().sum();
        self.spacing() * (inner + 0.5 * (values[0] + values[self.n - 1]))
    }

    /// Trapezoid weight of node `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.spacing()
        } else {
            self.spacing()
        }
    }
}
