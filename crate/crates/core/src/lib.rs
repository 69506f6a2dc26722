//! Spectral solver and verification harness for linear and semilinear wave
//! equations `u_tt - Δu + A u = F(u)` on a periodic box, with initial data
//! coupled to interior times through multipoint conditions
//!
//! ```text
//! u(0)   = φ + Σ α_k u(λ_k)
//! u_t(0) = ψ + Σ β_k u_t(λ_k)
//! ```
//!
//! The fiber operator `A` is a Hermitian positive-definite matrix. Every
//! Fourier mode then carries its own shifted operator `A_ξ = A + |ξ|²`, and
//! the solver works mode by mode with the cosine and sine families of
//! `A_ξ`.
//!
//! Modules, bottom-up:
//!
//! - [`spectral`]: grids, fields, unitary transforms, multipliers and norms.
//! - [`operator`]: validated operators, fractional powers, cosine/sine families.
//! - [`multipoint`]: the per-mode block system and the full linear solve.
//! - [`nonlinear`]: power nonlinearities and the Picard fixed-point solver.
//! - [`strichartz`]: exponent algebra and numerical estimate checks.
//! - [`oracle`]: RK4 and shooting references that avoid the closed forms.
//! - [`scenario`]: config parsing, data generation and CSV emission.

pub mod error;
pub mod multipoint;
pub mod nonlinear;
pub mod operator;
pub mod oracle;
pub mod scenario;
pub mod spectral;
pub mod strichartz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
