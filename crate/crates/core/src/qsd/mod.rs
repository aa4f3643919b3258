//! The order/carrying-cost relation and the conditions behind quasi
//! self-duality.
//!
//! - [`lambda_of_alpha`] / [`lambda_of_alpha_quadrature`]: `λ(α)` in closed
//!   form and from the triplet
//! - [`alpha_of_lambda_closed`] / [`alpha_of_lambda_root`]: the inverse,
//!   including the two Meixner branches
//! - [`full_report`]: every symmetry, drift and martingale residual at once

mod conditions;
mod forward;
mod inverse;
mod report;

pub use conditions::{
    check_measure_symmetry, chi, cumulant_reflection_error, default_log_intervals, default_reflection_grid,
    default_symmetry_grid, gamma_drift, log_jump_mass, log_jump_mirror, log_jump_mirror_mellin, martingale_drift,
    power_triplet, stochastic_log_symmetry, vanishing_integral,
};
pub use forward::{lambda_of_alpha, lambda_of_alpha_quadrature, lambda_of_alpha_quadrature_with, meixner_alpha0_lambda};
pub use inverse::{
    alpha_of_lambda, alpha_of_lambda_closed, alpha_of_lambda_root, lambda_image, Branch, InversionResult,
    LambdaImage, Solution, CLOSED_FORM_TOL,
};
pub use report::{full_report, DualityReport};
