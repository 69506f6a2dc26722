//! Reference solvers that share the spatial discretization but none of the
//! closed-form time machinery: a method-of-lines RK4 integrator and a
//! shooting assembly of the multipoint conditions.

mod compare;
mod rk4;
mod shooting;

pub use compare::{compare, relative_difference, CompareReport};
pub use rk4::{rk4_integrate, rk4_step_bound};
pub use shooting::{shooting_multipoint, ShootingOptions, ShootingResult};
