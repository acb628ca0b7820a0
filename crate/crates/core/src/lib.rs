//! Quaternionic pluripotential calculus on the Heisenberg group.
//!
//! Exact polynomial operators (`d0`, `d1`, the quaternionic Laplacian and Hessian),
//! Moore determinants, positivity tests for forms, quaternionic Heisenberg lines
//! and grid quadrature for Monge-Ampère measures.

pub mod calculus;
pub mod config;
pub mod error;
pub mod exterior;
pub mod heisenberg;
pub mod measures;
pub mod poly;
pub mod qma;
pub mod quadrature;
pub mod quaternion;
pub mod random;
pub mod report;
pub mod scalar;
pub mod suites;

pub use error::{Error, Result};
pub use scalar::{Mode, Rational, Real};
