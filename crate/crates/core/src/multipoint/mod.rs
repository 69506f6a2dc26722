//! The constructive linear solver.
//!
//! Each Fourier mode `ξ` carries a 2×2 block system for the initial pair
//! `(û(0,ξ), ∂_t û(0,ξ))`, whose blocks are cosine and sine families of
//! `A_ξ` evaluated at the interior times `λ_k`. After solving it by block
//! Cramer, the mode is propagated exactly, with the Duhamel term computed
//! by Gauss–Legendre quadrature on the source's time grid.

mod duhamel;
mod solve;
mod spec;
mod system;
mod verify;

pub(crate) use duhamel::advance;
pub use duhamel::{assemble_rhs, duhamel_integral, duhamel_rate_integral, propagate, ModeSource};
pub use solve::{initial_pair, solve_linear, LinearProblem, LinearSolution, SolveReport, SolverOptions, Source};
pub use spec::MultipointSpec;
pub use system::{
    assemble_mode_system, closed_form_determinant, determinant, mode_determinant, solve_initial_pair, ModeBlocks,
    ModeDeterminant, DEFAULT_CONDITION_CAP,
};
pub use verify::{energy, evaluate_at, verify_solution, ResidualReport};
