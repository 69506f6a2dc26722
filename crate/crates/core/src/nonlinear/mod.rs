//! Semilinear problems `u_tt − Δu + Au = F(u)` by Picard iteration on the
//! linear multipoint solver, with contraction windows, continuation and the
//! exact exponents of the local existence theorem.

mod constants;
mod nonlinearity;
mod picard;

pub use constants::{theorem_constants, TheoremConstants};
pub use nonlinearity::{eval_nonlinearity, Nonlinearity, NonlinearityKind};
pub use picard::{
    continue_solution, holder_exponent, nonlinear_source, picard_map, select_window, solve_nonlinear, verify_nonlinear,
    ContinuationResult, ConvergenceReport, InitialGuess, NonlinearSolution, PicardConfig,
};
