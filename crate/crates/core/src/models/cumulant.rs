//! Closed-form cumulants, moments and triplets of the catalog families.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{bessel_k1, integrate, integrate_levy, QuadSpec};

use super::density::{LevyDensity, LevyTriplet};
use super::params::ModelParams;

/// `Γ(x)` for the CGMY prefactor `Γ(−Y)`.
pub(crate) fn gamma_fn(x: f64) -> f64 {
    libm::tgamma(x)
}

impl ModelParams {
    /// `κ(θ) = log E[e^{θX₁}]` on the strip of regularity.
    pub fn cumulant(&self, theta: f64) -> Result<f64> {
        self.check_strip(theta)?;
        Ok(self.cumulant_unchecked(theta))
    }

    pub(crate) fn cumulant_unchecked(&self, theta: f64) -> f64 {
        match *self {
            ModelParams::Nig(p) => {
                let g = (p.a * p.a - p.b * p.b).sqrt();
                let bt = p.b + theta;
                p.m * theta + p.d * (g - (p.a * p.a - bt * bt).sqrt())
            }
            ModelParams::Vg(p) => p.m * theta - p.C * ((-theta / p.M).ln_1p() + (theta / p.G).ln_1p()),
            ModelParams::Meixner(p) => {
                let c0 = (0.5 * p.b).cos();
                let c1 = (0.5 * (p.b + p.a * theta)).cos();
                p.m * theta + 2.0 * p.d * (c0 / c1).ln()
            }
            ModelParams::Cgmy(p) => {
                let y = p.Y;
                p.m * theta
                    + p.C
                        * gamma_fn(-y)
                        * ((p.M - theta).powf(y) - p.M.powf(y) + (p.G + theta).powf(y) - p.G.powf(y))
            }
            ModelParams::BlackScholes(p) => p.m * theta + 0.5 * p.sigma * p.sigma * theta * theta,
        }
    }

    /// `E[X₁] = κ'(0)`.
    pub fn mean(&self) -> f64 {
        match *self {
            ModelParams::Nig(p) => p.m + p.d * p.b / (p.a * p.a - p.b * p.b).sqrt(),
            ModelParams::Vg(p) => p.m + p.C / p.M - p.C / p.G,
            ModelParams::Meixner(p) => p.m + p.a * p.d * (0.5 * p.b).tan(),
            ModelParams::Cgmy(p) => {
                let y = p.Y;
                p.m + p.C * gamma_fn(-y) * y * (p.G.powf(y - 1.0) - p.M.powf(y - 1.0))
            }
            ModelParams::BlackScholes(p) => p.m,
        }
    }

    /// `Var[X₁] = κ''(0)`.
    pub fn variance(&self) -> f64 {
        match *self {
            ModelParams::Nig(p) => p.d * p.a * p.a / (p.a * p.a - p.b * p.b).powf(1.5),
            ModelParams::Vg(p) => p.C / (p.M * p.M) + p.C / (p.G * p.G),
            ModelParams::Meixner(p) => {
                let c = (0.5 * p.b).cos();
                p.a * p.a * p.d / (2.0 * c * c)
            }
            ModelParams::Cgmy(p) => {
                let y = p.Y;
                p.C * gamma_fn(2.0 - y) * (p.M.powf(y - 2.0) + p.G.powf(y - 2.0))
            }
            ModelParams::BlackScholes(p) => p.sigma * p.sigma,
        }
    }

    /// Lévy density descriptor (`Zero` for Black–Scholes).
    pub fn density(&self) -> LevyDensity {
        match *self {
            ModelParams::Nig(p) => LevyDensity::Nig { a: p.a, b: p.b, d: p.d },
            ModelParams::Vg(p) => LevyDensity::Vg { C: p.C, G: p.G, M: p.M },
            ModelParams::Meixner(p) => LevyDensity::Meixner { a: p.a, b: p.b, d: p.d },
            ModelParams::Cgmy(p) => LevyDensity::Cgmy { C: p.C, G: p.G, M: p.M, Y: p.Y },
            ModelParams::BlackScholes(_) => LevyDensity::Zero,
        }
    }

    /// Gaussian coefficient `σ²` of the triplet.
    pub fn sigma2(&self) -> f64 {
        match *self {
            ModelParams::BlackScholes(p) => p.sigma * p.sigma,
            _ => 0.0,
        }
    }
}

/// Pointwise Lévy density; domain error at `x = 0`.
pub fn levy_density(params: &ModelParams, x: f64) -> Result<f64> {
    params.validate()?;
    params.density().value(x)
}

/// Triplet under the truncation `1_{|x|≤1}`.
///
/// NIG uses the Bessel integral for `γ`, VG its closed form. Meixner and CGMY
/// match the first moment: `γ = κ'(0) − ∫_{|x|>1} x ν(dx)`.
pub fn triplet_of(params: &ModelParams) -> Result<LevyTriplet> {
    params.validate()?;
    let quad = QuadSpec::default();
    let gamma = match *params {
        ModelParams::Nig(p) => {
            let r = integrate(
                |x| (p.b * x).sinh() * bessel_k1(p.a * x).unwrap_or(0.0),
                0.0,
                1.0,
                1e-13,
                1e-12,
                200,
            )?;
            p.m + 2.0 * p.d * p.a / PI * r.value
        }
        ModelParams::Vg(p) => p.m + p.C * (-(-p.M).exp_m1()) / p.M - p.C * (-(-p.G).exp_m1()) / p.G,
        ModelParams::Meixner(_) | ModelParams::Cgmy(_) => {
            let dens = params.density();
            let outer = integrate_levy(|x| if x.abs() > 1.0 { x } else { 0.0 }, |x| dens.eval(x), &quad)?;
            params.mean() - outer
        }
        ModelParams::BlackScholes(p) => p.m,
    };
    if !gamma.is_finite() {
        return Err(Error::Domain(format!("non-finite drift for {params}")));
    }
    LevyTriplet::new(gamma, params.sigma2(), params.density())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::params::*;

    fn nig(a: f64, b: f64, d: f64, m: f64) -> ModelParams {
        ModelParams::Nig(NigParams { a, b, d, m })
    }

    fn vg(c: f64, g: f64, mm: f64, m: f64) -> ModelParams {
        ModelParams::Vg(VgParams { C: c, G: g, M: mm, m })
    }

    #[test]
    fn cumulant_hand_values() {
        let k = nig(1.0, 0.0, 1.0, 0.0).cumulant(0.5).unwrap();
        assert!((k - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!((k - 0.133_974_596_2).abs() < 1e-10);
        let k = vg(1.0, 1.5, 1.5, 0.0).cumulant(1.0).unwrap();
        assert!((k - (9.0f64 / 5.0).ln()).abs() < 1e-15);
        let k = nig(1.0, -0.5, 1.0, 0.0).cumulant(1.0).unwrap();
        assert!(k.abs() < 1e-15);
    }

    #[test]
    fn cumulant_zero_at_origin_and_strip_errors() {
        let all = [
            nig(2.0, -0.3, 1.0, 0.2),
            vg(1.0, 2.0, 3.0, -0.1),
            ModelParams::Meixner(MeixnerParams { a: 1.0, b: -0.4, d: 0.7, m: 0.0 }),
            ModelParams::Cgmy(CgmyParams { C: 1.0, G: 2.0, M: 3.0, Y: 0.5, m: 0.1 }),
            ModelParams::BlackScholes(BlackScholesParams { sigma: 0.2, m: -0.02 }),
        ];
        for p in all {
            assert_eq!(p.cumulant(0.0).unwrap(), 0.0, "{p}");
        }
        assert!(nig(2.0, -0.3, 1.0, 0.0).cumulant(2.3).is_err());
        assert!(vg(1.0, 2.0, 3.0, 0.0).cumulant(-2.0).is_err());
    }

    #[test]
    fn moments_match_finite_differences() {
        let all = [
            nig(2.0, -0.3, 1.3, 0.2),
            vg(0.8, 2.0, 3.0, -0.1),
            ModelParams::Meixner(MeixnerParams { a: 1.0, b: -0.4, d: 0.7, m: 0.05 }),
            ModelParams::Cgmy(CgmyParams { C: 0.7, G: 2.0, M: 3.0, Y: 0.5, m: 0.1 }),
            ModelParams::Cgmy(CgmyParams { C: 0.3, G: 2.0, M: 3.0, Y: 1.4, m: 0.1 }),
            ModelParams::Cgmy(CgmyParams { C: 0.7, G: 2.0, M: 3.0, Y: -0.5, m: 0.1 }),
        ];
        let h = 1e-4;
        for p in all {
            let kp = p.cumulant(h).unwrap();
            let km = p.cumulant(-h).unwrap();
            let d1 = (kp - km) / (2.0 * h);
            let d2 = (kp + km) / (h * h);
            assert!((d1 - p.mean()).abs() < 1e-7, "{p}: {d1} vs {}", p.mean());
            assert!((d2 / p.variance() - 1.0).abs() < 1e-5, "{p}: {d2} vs {}", p.variance());
        }
    }

    #[test]
    fn triplet_hand_values() {
        let t = triplet_of(&nig(1.3, 0.0, 0.8, 0.25)).unwrap();
        assert_eq!(t.gamma, 0.25);
        let t = triplet_of(&vg(1.0, 1.5, 1.5, 0.0)).unwrap();
        assert!(t.gamma.abs() < 1e-16);
    }

    #[test]
    fn nig_gamma_matches_reference() {
        // 30-digit evaluation of m + (2da/π)∫₀¹ sinh(bx)K₁(ax)dx
        let t = triplet_of(&nig(2.0, -0.4, 1.3, 0.1)).unwrap();
        assert!((t.gamma - -0.107_493_008_226_909_71).abs() < 1e-13, "{}", t.gamma);
    }

    #[test]
    fn levy_density_rejects_origin() {
        assert!(levy_density(&vg(1.0, 1.5, 1.5, 0.0), 0.0).is_err());
        let v = levy_density(&vg(1.0, 1.5, 1.5, 0.0), 1.0).unwrap();
        assert!((v - (-1.5f64).exp()).abs() < 1e-16);
    }
}
