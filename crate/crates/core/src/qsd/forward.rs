use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::{gamma_fn, LevyDensity, LevyTriplet, SymmetricBase};
use crate::numerics::{exp_m1_minus_x, QuadSpec};

/// Whether the closed-form forward map accepts `α`.
///
/// The admissible intervals are open. NIG is the exception: its forward map
/// extends continuously to both end points (`b = ±a` is the limit of an
/// inverse-Gaussian time change with vanishing tilt), so the closed interval
/// is accepted there.
pub(crate) fn forward_domain(base: &SymmetricBase, alpha: f64) -> Result<()> {
    base.validate()?;
    if let SymmetricBase::Nig { .. } = base {
        let (lo, hi) = base.alpha_interval();
        if alpha >= lo && alpha <= hi {
            return Ok(());
        }
    }
    base.check_alpha(alpha)
}

/// The carrying cost `λ(α)` that makes both `e^X` and `S^α` martingales.
///
/// Closed form per family; CGMY uses the symmetric-base cumulant difference
/// `κ₀(1 − α/2) − κ₀(−α/2)`.
pub fn lambda_of_alpha(base: &SymmetricBase, alpha: f64) -> Result<f64> {
    forward_domain(base, alpha)?;
    let lambda = lambda_of_alpha_unchecked(base, alpha);
    if lambda.is_finite() {
        Ok(lambda)
    } else {
        Err(Error::Domain(format!("{base}: λ(α) not finite at α = {alpha}")))
    }
}

pub(crate) fn lambda_of_alpha_unchecked(base: &SymmetricBase, alpha: f64) -> f64 {
    match *base {
        SymmetricBase::Nig { a, d } => {
            let hi = (a * a - 0.25 * (2.0 - alpha) * (2.0 - alpha)).max(0.0).sqrt();
            let lo = (a * a - 0.25 * alpha * alpha).max(0.0).sqrt();
            -d * (hi - lo)
        }
        SymmetricBase::Vg { c, beta } => {
            -c * ((-1.0 / (beta + 0.5 * alpha)).ln_1p() + (1.0 / (beta - 0.5 * alpha)).ln_1p())
        }
        SymmetricBase::Cgmy { c, beta, y } => {
            let k0 = |t: f64| c * gamma_fn(-y) * ((beta - t).powf(y) + (beta + t).powf(y) - 2.0 * beta.powf(y));
            k0(1.0 - 0.5 * alpha) - k0(-0.5 * alpha)
        }
        SymmetricBase::Meixner { b, d } => {
            2.0 * d * ((0.5 * b).cos() / (0.5 * b - b / alpha).cos()).ln()
        }
        SymmetricBase::MeixnerEven { a, d } => meixner_even_lambda(a, d),
        SymmetricBase::BlackScholes { sigma } => 0.5 * (1.0 - alpha) * sigma * sigma,
    }
}

/// `−2d log cos(a/2)` written as `−2d log1p(−2 sin²(a/4))`.
fn meixner_even_lambda(a: f64, d: f64) -> f64 {
    let s = (0.25 * a).sin();
    -2.0 * d * (-2.0 * s * s).ln_1p()
}

/// Carrying cost of the order-zero Meixner model (`b = 0`): `−2d log cos(a/2)`.
pub fn meixner_alpha0_lambda(a: f64, d: f64) -> Result<f64> {
    let mut v = crate::error::Violations::new();
    v.check(a > 0.0 && a < PI, || format!("Meixner: a in (0, π) required, got {a}"));
    v.check(d > 0.0 && d.is_finite(), || format!("Meixner: d > 0 required, got {d}"));
    v.finish()?;
    Ok(meixner_even_lambda(a, d))
}

/// `(1−α)σ²/2 + ∫(e^x − x e^{αx/2} 1_{|x|≤1} − 1) ν(dx)` by quadrature.
pub fn lambda_of_alpha_quadrature(triplet: &LevyTriplet, alpha: f64) -> Result<f64> {
    lambda_of_alpha_quadrature_with(triplet, alpha, &QuadSpec::default())
}

pub fn lambda_of_alpha_quadrature_with(triplet: &LevyTriplet, alpha: f64, quad: &QuadSpec) -> Result<f64> {
    let diffusion = 0.5 * (1.0 - alpha) * triplet.sigma2;
    if triplet.density == LevyDensity::Zero {
        return Ok(diffusion);
    }
    let jump = triplet.density.exp_tail_integral(
        1.0,
        |x| exp_m1_minus_x(x) - x * (0.5 * alpha * x).exp_m1(),
        quad,
    )?;
    Ok(diffusion + jump)
}
