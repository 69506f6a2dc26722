//! Periodic grids, fields, unitary Fourier transforms, multipliers and the
//! norms used by the estimates.
//!
//! The physical domain is the torus `[0, L_1) × … × [0, L_n)`. Transforms
//! are unitary per axis, so Plancherel holds exactly and the `L²` norm of a
//! field is `(ΔV · Σ_k |û_k|²)^{1/2}` with `ΔV` the cell volume.

mod field;
mod grid;
mod norms;
pub mod snapshot;
mod trajectory;
mod transform;

pub use field::{Field, SpectralField};
pub use grid::{GridSpec, DEFAULT_POINT_CAP};
pub use norms::{l2s_norm, lebesgue_norm, mixed_norm, sobolev_norm, spectral_sobolev_norm, SobolevSpec};
pub(crate) use trajectory::steps_for;
pub use trajectory::{SpectralTrajectory, TimeGrid};
pub use transform::{apply_multiplier, apply_scalar_multiplier, forward_transform, inverse_transform};
