//! Exact exterior calculus on the bundle of torsion-free connections.
//!
//! The chart model has coordinates `x^i` on the base and `Γ^k_ij` (with
//! `i <= j`) on the fiber. On it live the tautological connection matrix
//! `θ̂ = (Γ^α_iβ dx^i)`, its curvature `Θ̂ = dθ̂ + θ̂∧θ̂`, and the forms
//! `ω_k`, the degree-`2k` parts of `det(E + (i/2π)Θ̂)`. Everything symbolic
//! is exact: coefficients are rational functions over the Gaussian
//! rationals, and "zero" always means the canonical empty form.

pub mod charforms;
pub mod chernweil;
pub mod connspace;
pub mod error;
pub mod forms;
pub mod matrix;
pub mod numeric;
pub mod symkernel;

pub use error::{Error, Result};
