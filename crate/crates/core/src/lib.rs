//! Higher-order Hamilton–Cartan calculus on jet bundles of `R^n x R^m`.
//!
//! Given a Lagrangian of order `r`, the crate derives momenta, Euler–Lagrange
//! expressions, Poincaré–Cartan and other Lepagean equivalents, the Hamilton
//! form, Legendre coordinates with the Hamilton–de Donder system, regularity
//! and definiteness tests, extremal (geodesic) fields, Hilbert integrals and
//! the Weierstrass excess, and checks each of them numerically.

pub mod cli;
pub mod error;
pub mod fields;
pub mod forms;
pub mod legendre;
pub mod numerics;
pub mod symcore;
pub mod varcalc;

pub use error::{Error, Result};
