//! Quasi self-dual exponential Lévy models.
//!
//! A price `S_t = S₀ e^{λt + X_t}` with `X` Lévy is quasi self-dual of order `α`
//! when `E[f(S_T/S_τ)] = E[(S_T/S_τ)^α f(S_τ/S_T)]` for every non-negative
//! payoff `f`. This crate builds such models for the NIG, VG, Meixner and CGMY
//! families (plus the Black–Scholes limit), maps the order `α` to the
//! carrying cost `λ` and back, checks every symmetry and martingale condition
//! with independent quadrature routes, and verifies the duality and the
//! resulting semi-static barrier hedge by Monte Carlo.
//!
//! Modules, bottom-up:
//! - [`numerics`]: `K₁`, Lévy-integral quadrature, root finding, random streams
//! - [`models`]: parameter sets, Lévy densities, cumulants, triplets
//! - [`qsd`]: the `λ ↔ α` maps and all duality/martingale checks
//! - [`mc`]: exact increment samplers, duality and martingale estimators
//! - [`hedge`]: the down-and-in semi-static hedge experiment

pub mod error;
pub mod hedge;
pub mod mc;
pub mod models;
pub mod numerics;
pub mod qsd;

pub use error::{Error, Result};
