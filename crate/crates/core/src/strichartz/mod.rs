//! Exponent algebra for wave Strichartz estimates and numerical checks of
//! the dispersive, Strichartz and bilinear bounds.

mod dispersive;
mod estimates;
mod exponents;

pub use dispersive::{dispersive_ratio, fit_decay, free_evolution, DecayFit, DecayModel, DispersiveReport};
pub use estimates::{
    bilinear_form, default_norm_pairs, strichartz_norm, strichartz_report, BilinearReport, EstimateReport,
};
pub use exponents::{
    beta_claim_contradicted, beta_exponent, classify_pair, default_pair, endpoint_pair, gamma_for, gap_check,
    parse_rational, standard_exponents, AdmissibilityVerdict, Exponent, GapRelation, GapVerdict, Rational,
};
