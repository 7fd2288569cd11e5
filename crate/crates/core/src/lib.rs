//! Magnetic Steklov (Dirichlet-to-Neumann) eigenvalues of the unit disk in a
//! constant magnetic field of strength `2b`.
//!
//! The spectrum splits by Fourier mode into explicit branches
//! `λ_n(b) = n - b + 2b M'(1/2, n+1, b) / M(1/2, n+1, b)`, with `M` the Kummer
//! function. This crate evaluates the branches and the ground-state envelope
//! `λ^DN(b) = min_n λ_n(b)`, locates the crossing points `z_n` of consecutive
//! branches (the zeros of `M(-1/2, n+1, ·)`), and computes the model constants
//! that govern the large-field behaviour
//! `λ^DN(b) = α √b - (α² + 2)/6 + O(b^{-1/2})`.
//!
//! Modules:
//! - [`numerics`]: scaled reals, Gamma, quadrature, root finding, finite differences
//! - [`specfun`]: Kummer `M`, generalized Laguerre, parabolic cylinder `D_ν`
//! - [`disk`]: branch eigenvalues, derivatives, ground-state envelope
//! - [`intersect`]: crossing points and their asymptotic fit
//! - [`models`]: `α`, `ξ₀`, `Θ₀`, the half-plane multiplier and limit functions
//! - [`verify`]: named invariant suites selectable at runtime

pub mod disk;
pub mod error;
pub mod intersect;
pub mod models;
pub mod numerics;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{ScaledReal, Tolerances};
