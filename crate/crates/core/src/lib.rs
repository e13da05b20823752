//! Spectral and structural stability of homogeneous Vlasov-Poisson equilibria.
// `!(x < y)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dispersion;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod exec;
pub mod export;
pub mod hilbert;
pub mod perturbation;
pub mod signature;

pub use equilibrium::{EquilibriumProfile, Profile, VelocityGrid};
pub use error::{Error, Result};
pub use exec::Execution;
