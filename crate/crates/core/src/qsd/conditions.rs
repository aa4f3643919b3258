//! Symmetry, drift and martingale conditions, each computed by its own route.

use crate::error::{Error, Result};
use crate::models::{LevyDensity, LevyTriplet, QsdSpec};
use crate::numerics::{exp_m1_minus_x, integrate, integrate_levy, QuadSpec};

fn jump_integral<I: Fn(f64) -> f64>(integrand: I, density: &LevyDensity, quad: &QuadSpec) -> Result<f64> {
    if *density == LevyDensity::Zero {
        return Ok(0.0);
    }
    let quad = quad.clone().with_splits(&density.kinks());
    integrate_levy(integrand, |x| density.eval(x), &quad)
}

/// Drift required of the triplet by the symmetry condition:
/// `∫_{|x|≤1} x(1 − e^{αx/2}) ν(dx) − ασ²/2 − λ`.
pub fn gamma_drift(alpha: f64, lambda: f64, sigma2: f64, density: &LevyDensity) -> Result<f64> {
    let jump = if alpha == 0.0 {
        0.0
    } else {
        jump_integral(
            |x| if x.abs() <= 1.0 { -x * (0.5 * alpha * x).exp_m1() } else { 0.0 },
            density,
            &QuadSpec::default(),
        )?
    };
    Ok(jump - 0.5 * alpha * sigma2 - lambda)
}

/// Drift making `e^X` a martingale: `−σ²/2 + ∫(x 1_{|x|≤1} + 1 − e^x) ν(dx)`.
pub fn martingale_drift(sigma2: f64, density: &LevyDensity) -> Result<f64> {
    let jump = density.exp_tail_integral(1.0, exp_m1_minus_x, &QuadSpec::default())?;
    Ok(-0.5 * sigma2 - jump)
}

/// Default grid for [`check_measure_symmetry`]: `±{0.01, …, 8}`.
pub fn default_symmetry_grid() -> Vec<f64> {
    let mut g = Vec::new();
    for k in 0..=80 {
        let x = 0.01 * 800f64.powf(k as f64 / 80.0);
        g.push(x);
        g.push(-x);
    }
    g
}

/// Largest relative deviation of `e^{αx/2}ν(x)` from `e^{−αx/2}ν(−x)` on the
/// grid. Points where both sides underflow count as symmetric.
pub fn check_measure_symmetry(density: &LevyDensity, alpha: f64, grid: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &x in grid {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::validation(format!("symmetry grid must avoid 0, got {x}")));
        }
        let left = (0.5 * alpha * x).exp() * density.eval(x);
        let right = (-0.5 * alpha * x).exp() * density.eval(-x);
        if left == right {
            continue;
        }
        worst = worst.max((left - right).abs() / (left + f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// `∫(e^{αx} − 1 − αx e^{αx/2} 1_{|x|≤1}) ν(dx)`; zero under the symmetry
/// condition.
pub fn vanishing_integral(density: &LevyDensity, alpha: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Ok(0.0);
    }
    density.exp_tail_integral(
        alpha,
        |x| {
            let z = alpha * x;
            exp_m1_minus_x(z) - z * (0.5 * z).exp_m1()
        },
        &QuadSpec::default(),
    )
}

/// Triplet of `Z = α(λt + X)`.
pub fn power_triplet(triplet: &LevyTriplet, alpha: f64, lambda: f64) -> Result<LevyTriplet> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::validation(format!("power transform needs a finite α ≠ 0, got {alpha}")));
    }
    // ∫ x (1_{|αx|≤1} − 1_{|x|≤1}) ν(dx) lives on |x| between 1/|α| and 1.
    let correction = if triplet.density == LevyDensity::Zero || alpha.abs() == 1.0 {
        0.0
    } else {
        let r = 1.0 / alpha.abs();
        let (lo, hi, sign) = if r < 1.0 { (r, 1.0, -1.0) } else { (1.0, r, 1.0) };
        let f = |x: f64| x * (triplet.density.eval(x) - triplet.density.eval(-x));
        sign * integrate(f, lo, hi, 1e-13, 1e-12, 400)?.value
    };
    let density = match &triplet.density {
        LevyDensity::Zero => LevyDensity::Zero,
        d if alpha == 1.0 => d.clone(),
        d => LevyDensity::Scaled { base: Box::new(d.clone()), scale: alpha },
    };
    LevyTriplet::new(
        alpha * (lambda + triplet.gamma + correction),
        alpha * alpha * triplet.sigma2,
        density,
    )
}

/// Default grid in `(0, 1)` for [`cumulant_reflection_error`].
pub fn default_reflection_grid() -> Vec<f64> {
    (1..20).map(|k| k as f64 / 20.0).collect()
}

/// `max |κ_Z(z) − κ_Z(1−z)|` for `Z = α(λt + X)`, with
/// `κ_Z(z) = αλz + κ_X(αz)`. At `α = 0` the condition is that `λt + X` is
/// symmetric, tested as `max |κ(z) − κ(−z)|` with `κ(z) = λz + κ_X(z)`.
pub fn cumulant_reflection_error(spec: &QsdSpec, z_grid: &[f64]) -> Result<f64> {
    let x = spec.native();
    let (alpha, lambda) = (spec.alpha(), spec.lambda());
    let mut worst: f64 = 0.0;
    for &z in z_grid {
        if !(z > 0.0 && z < 1.0) {
            return Err(Error::validation(format!("reflection grid must lie in (0, 1), got {z}")));
        }
        let dev = if alpha == 0.0 {
            (lambda * z + x.cumulant(z)?) - (-lambda * z + x.cumulant(-z)?)
        } else {
            let kz = |t: f64| -> Result<f64> { Ok(alpha * lambda * t + x.cumulant(alpha * t)?) };
            kz(z)? - kz(1.0 - z)?
        };
        worst = worst.max(dev.abs());
    }
    Ok(worst)
}

/// `χ(y) = −y/(1+y)`, the self-inverse map of `(−1, ∞)`.
pub fn chi(y: f64) -> f64 {
    -y / (1.0 + y)
}

/// Default intervals for [`stochastic_log_symmetry`].
pub fn default_log_intervals() -> Vec<(f64, f64)> {
    vec![(0.1, 0.5), (-0.5, -0.1), (0.5, 2.0), (-0.9, -0.5), (2.0, 10.0), (0.01, 0.1)]
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if lo > -1.0 && lo < hi && hi.is_finite() && (hi <= 0.0 || lo >= 0.0) {
        Ok(())
    } else {
        Err(Error::validation(format!(
            "interval ({lo}, {hi}) must lie in (−1, ∞) on one side of 0"
        )))
    }
}

// Interval masses span dozens of decades (tiny Meixner scales put ~1e-26 on
// (2, 10)), so the tolerance is purely relative.
const LOG_ABS_TOL: f64 = 0.0;
const LOG_REL_TOL: f64 = 1e-12;

fn rel_dev(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Mass `ν^Y(B)` of the jump measure of the stochastic logarithm `Y` of
/// `e^X`, with `ν^Y(B) = ν^X({x : e^x − 1 ∈ B})`.
pub fn log_jump_mass(density: &LevyDensity, lo: f64, hi: f64) -> Result<f64> {
    check_interval(lo, hi)?;
    if *density == LevyDensity::Zero {
        return Ok(0.0);
    }
    let f = |x: f64| density.eval(x);
    Ok(integrate(f, lo.ln_1p(), hi.ln_1p(), LOG_ABS_TOL, LOG_REL_TOL, 400)?.value)
}

/// `∫_{χ(B)} (1+y)^α ν^Y(dy)`, evaluated in log-price coordinates.
pub fn log_jump_mirror(density: &LevyDensity, alpha: f64, lo: f64, hi: f64) -> Result<f64> {
    check_interval(lo, hi)?;
    if *density == LevyDensity::Zero {
        return Ok(0.0);
    }
    // y ∈ χ(B) ⇔ x = log(1+y) ∈ (−log(1+hi), −log(1+lo)); (1+y)^α = e^{αx}.
    let f = |x: f64| (alpha * x).exp() * density.eval(x);
    Ok(integrate(f, -hi.ln_1p(), -lo.ln_1p(), LOG_ABS_TOL, LOG_REL_TOL, 400)?.value)
}

/// The same mirror integral computed directly in `y` with the pointwise
/// density `ν^Y(y) = ν^X(log(1+y))/(1+y)`: substituting `y ↦ χ(y)` gives
/// `∫_B (1+y)^{−α} ν^Y(χ(y)) (1+y)^{−2} dy`.
pub fn log_jump_mirror_mellin(density: &LevyDensity, alpha: f64, lo: f64, hi: f64) -> Result<f64> {
    check_interval(lo, hi)?;
    if *density == LevyDensity::Zero {
        return Ok(0.0);
    }
    let nu_y = |y: f64| density.eval(y.ln_1p()) / (1.0 + y);
    let f = |y: f64| (1.0 + y).powf(-alpha - 2.0) * nu_y(chi(y));
    Ok(integrate(f, lo, hi, LOG_ABS_TOL, LOG_REL_TOL, 400)?.value)
}

/// Largest relative deviation between `ν^Y(B)` and `∫_{χ(B)} (1+y)^α ν^Y(dy)`
/// over the intervals, using both evaluation routes for the right side.
pub fn stochastic_log_symmetry(density: &LevyDensity, alpha: f64, intervals: &[(f64, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(lo, hi) in intervals {
        let mass = log_jump_mass(density, lo, hi)?;
        let mirror = log_jump_mirror(density, alpha, lo, hi)?;
        let mellin = log_jump_mirror_mellin(density, alpha, lo, hi)?;
        worst = worst.max(rel_dev(mass, mirror)).max(rel_dev(mass, mellin));
    }
    Ok(worst)
}
