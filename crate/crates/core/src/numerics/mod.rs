//! Numerical kernel: Bessel `K₁`, quadrature of Lévy integrals, bracketed root
//! finding and reproducible random streams.

pub mod bessel;
pub mod quad;
pub mod rng;
pub mod roots;

pub use bessel::{bessel_k1, bessel_k1_scaled};
pub use quad::{integrate, integrate_levy, integrate_levy_detailed, QuadResult, QuadSpec};
pub use rng::{GammaSampler, InverseGaussianSampler, RngStream, GENERATOR_NAME};
pub use roots::{find_root, DEFAULT_ROOT_TOL};

/// `e^z - 1 - z` without cancellation near `z = 0`.
pub fn exp_m1_minus_x(z: f64) -> f64 {
    if z.abs() < 0.1 {
        // z²/2! + z³/3! + …
        let mut term = 0.5 * z * z;
        let mut sum = term;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= z / k;
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        z.exp_m1() - z
    }
}
