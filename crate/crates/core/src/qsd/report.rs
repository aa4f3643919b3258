use std::fmt;

use serde::{Deserialize, Serialize};

use super::conditions::*;
use super::forward::{lambda_of_alpha, lambda_of_alpha_quadrature};
use crate::error::{Error, Result};
use crate::models::{triplet_of, QsdSpec, SymmetricBase};

/// Residuals of every quasi-self-duality condition for one spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// Relative asymmetry of `e^{αx/2}ν(x)`.
    pub measure_symmetry_error: f64,
    /// `γ − gamma_drift(α, λ, σ², ν)`.
    pub drift_condition_residual: f64,
    /// `λ − ((1−α)σ²/2 + ∫(e^x − x e^{αx/2}1_{|x|≤1} − 1)ν(dx))`.
    pub lambda_alpha_residual: f64,
    /// `(κ_X(1), κ_Z(1))` with `Z = α(λt + X)`.
    pub martingale_residuals: (f64, f64),
    pub vanishing_integral: f64,
    pub cumulant_reflection_error: f64,
    /// Relative deviation in the stochastic-logarithm interval test.
    pub stochastic_log_error: f64,
}

impl DualityReport {
    /// Largest absolute residual.
    pub fn max_residual(&self) -> f64 {
        [
            self.measure_symmetry_error,
            self.drift_condition_residual.abs(),
            self.lambda_alpha_residual.abs(),
            self.martingale_residuals.0.abs(),
            self.martingale_residuals.1.abs(),
            self.vanishing_integral.abs(),
            self.cumulant_reflection_error,
            self.stochastic_log_error,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub const CSV_HEADER: &'static str = "measure_symmetry_error,drift_condition_residual,lambda_alpha_residual,\
kappa_x_1,kappa_z_1,vanishing_integral,cumulant_reflection_error,stochastic_log_error";

    pub fn csv_record(&self, fmt_num: impl Fn(f64) -> String) -> String {
        [
            self.measure_symmetry_error,
            self.drift_condition_residual,
            self.lambda_alpha_residual,
            self.martingale_residuals.0,
            self.martingale_residuals.1,
            self.vanishing_integral,
            self.cumulant_reflection_error,
            self.stochastic_log_error,
        ]
        .iter()
        .map(|&v| fmt_num(v))
        .collect::<Vec<_>>()
        .join(",")
    }
}

impl fmt::Display for DualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "measure symmetry error     {:e}", self.measure_symmetry_error)?;
        writeln!(f, "drift condition residual   {:e}", self.drift_condition_residual)?;
        writeln!(f, "lambda-alpha residual      {:e}", self.lambda_alpha_residual)?;
        writeln!(f, "kappa_X(1)                 {:e}", self.martingale_residuals.0)?;
        writeln!(f, "kappa_Z(1)                 {:e}", self.martingale_residuals.1)?;
        writeln!(f, "vanishing integral         {:e}", self.vanishing_integral)?;
        writeln!(f, "cumulant reflection error  {:e}", self.cumulant_reflection_error)?;
        writeln!(f, "stochastic-log error       {:e}", self.stochastic_log_error)
    }
}

impl QsdSpec {
    /// Spec at order `α` with `λ = λ(α)`.
    pub fn calibrated(base: SymmetricBase, alpha: f64) -> Result<QsdSpec> {
        base.check_alpha(alpha)?;
        QsdSpec::new(base, alpha, lambda_of_alpha(&base, alpha)?)
    }
}

/// Evaluates every condition on `spec`, each by an independent route.
pub fn full_report(spec: &QsdSpec) -> Result<DualityReport> {
    let native = spec.native();
    let triplet = triplet_of(&native)?;
    let (alpha, lambda) = (spec.alpha(), spec.lambda());

    let measure_symmetry_error = check_measure_symmetry(&triplet.density, alpha, &default_symmetry_grid())?;
    let drift_condition_residual = triplet.gamma - gamma_drift(alpha, lambda, triplet.sigma2, &triplet.density)?;
    let lambda_alpha_residual = lambda - lambda_of_alpha_quadrature(&triplet, alpha)?;
    let kx = native.cumulant(1.0)?;
    let kz = alpha * lambda + native.cumulant(alpha)?;
    let report = DualityReport {
        measure_symmetry_error,
        drift_condition_residual,
        lambda_alpha_residual,
        martingale_residuals: (kx, kz),
        vanishing_integral: vanishing_integral(&triplet.density, alpha)?,
        cumulant_reflection_error: cumulant_reflection_error(spec, &default_reflection_grid())?,
        stochastic_log_error: stochastic_log_symmetry(&triplet.density, alpha, &default_log_intervals())?,
    };
    if report.max_residual().is_finite() {
        Ok(report)
    } else {
        Err(Error::Domain(format!("non-finite residual for {spec}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bases() -> Vec<(SymmetricBase, f64)> {
        vec![
            (SymmetricBase::Nig { a: 1.0, d: 1.0 }, 0.5),
            (SymmetricBase::Vg { c: 1.0, beta: 1.5 }, 1.4),
            (SymmetricBase::Meixner { b: -PI / 2.0, d: 1.0 }, 2.5),
            (SymmetricBase::Meixner { b: 1.0, d: 0.6 }, -1.5),
            (SymmetricBase::MeixnerEven { a: 1.2, d: 0.6 }, 0.0),
            (SymmetricBase::Cgmy { c: 1.0, beta: 1.5, y: 0.5 }, 0.3),
            (SymmetricBase::Cgmy { c: 0.4, beta: 2.5, y: 1.5 }, 1.2),
            (SymmetricBase::BlackScholes { sigma: 0.2 }, 0.5),
            (SymmetricBase::Vg { c: 1.0, beta: 1.5 }, 0.0),
        ]
    }

    #[test]
    fn calibrated_specs_pass() {
        for (base, alpha) in bases() {
            let s = QsdSpec::calibrated(base, alpha).unwrap();
            let r = full_report(&s).unwrap();
            assert!(r.max_residual() <= 1e-8, "{s}\n{r}");
            assert!(r.martingale_residuals.0.abs() <= 1e-10 && r.martingale_residuals.1.abs() <= 1e-10);
        }
    }

    #[test]
    fn perturbed_lambda_shows_in_residual() {
        let s = QsdSpec::calibrated(SymmetricBase::Nig { a: 1.0, d: 1.0 }, 0.5).unwrap();
        let r = full_report(&s.with_lambda_shift(0.01)).unwrap();
        assert!((r.lambda_alpha_residual - 0.01).abs() < 1e-8);
    }

    #[test]
    fn jensen_rejection() {
        let base = SymmetricBase::Nig { a: 1.0, d: 1.0 };
        assert!(QsdSpec::new(base, 1.5, 0.1).unwrap_err().is_validation());
    }

    #[test]
    fn csv_and_text() {
        let s = QsdSpec::calibrated(SymmetricBase::Vg { c: 1.0, beta: 1.5 }, 0.5).unwrap();
        let r = full_report(&s).unwrap();
        let rec = r.csv_record(|x| format!("{x:e}"));
        assert_eq!(rec.split(',').count(), DualityReport::CSV_HEADER.split(',').count());
        assert!(r.to_string().contains("kappa_Z(1)"));
    }
}
