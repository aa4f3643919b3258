use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bessel::k1_scaled_positive;
use crate::numerics::{exp_m1_minus_x, integrate_levy, QuadSpec};

/// Evaluable Lévy density `ν(x)` on `ℝ∖{0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub enum LevyDensity {
    /// `ν ≡ 0`.
    Zero,
    /// `(da/π) e^{bx} K₁(a|x|) / |x|`
    Nig { a: f64, b: f64, d: f64 },
    /// `C e^{-G|x|}/|x|` for `x < 0`, `C e^{-Mx}/x` for `x > 0`
    Vg { C: f64, G: f64, M: f64 },
    /// `d e^{(b/a)x} / (x sinh(πx/a))`
    Meixner { a: f64, b: f64, d: f64 },
    /// `C e^{-G|x|}/|x|^{1+Y}` for `x < 0`, `C e^{-Mx}/x^{1+Y}` for `x > 0`
    Cgmy { C: f64, G: f64, M: f64, Y: f64 },
    /// Image of `base` under `x ↦ scale·x`: `ν_base(y/scale)/|scale|`.
    Scaled { base: Box<LevyDensity>, scale: f64 },
}

impl LevyDensity {
    /// Density at `x`. The caller guarantees `x ≠ 0`; see [`LevyDensity::value`]
    /// for the checked version.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            LevyDensity::Zero => 0.0,
            &LevyDensity::Nig { a, b, d } => {
                let ax = a * x.abs();
                d * a / PI * (b * x - ax).exp() * k1_scaled_positive(ax) / x.abs()
            }
            &LevyDensity::Vg { C, G, M } => {
                let rate = if x < 0.0 { G } else { M };
                C * (-rate * x.abs()).exp() / x.abs()
            }
            &LevyDensity::Meixner { a, b, d } => {
                // 1/(x sinh(πx/a)) = 2 e^{-π|x|/a} / (|x| (1 - e^{-2π|x|/a}))
                let ax = x.abs();
                let decay = PI * ax / a;
                2.0 * d * (b * x / a - decay).exp() / (ax * -(-2.0 * decay).exp_m1())
            }
            &LevyDensity::Cgmy { C, G, M, Y } => {
                let rate = if x < 0.0 { G } else { M };
                C * (-rate * x.abs()).exp() / x.abs().powf(1.0 + Y)
            }
            LevyDensity::Scaled { base, scale } => base.eval(x / scale) / scale.abs(),
        }
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        if x == 0.0 || !x.is_finite() {
            return Err(Error::Domain(format!("Lévy density is defined on ℝ∖{{0}}, got x = {x}")));
        }
        Ok(self.eval(x))
    }

    /// The exponentially tilted density `e^{θx}ν(x)`, in closed form.
    pub fn tilted(&self, theta: f64) -> LevyDensity {
        match self {
            LevyDensity::Zero => LevyDensity::Zero,
            &LevyDensity::Nig { a, b, d } => LevyDensity::Nig { a, b: b + theta, d },
            &LevyDensity::Vg { C, G, M } => LevyDensity::Vg { C, G: G + theta, M: M - theta },
            &LevyDensity::Meixner { a, b, d } => LevyDensity::Meixner { a, b: b + theta * a, d },
            &LevyDensity::Cgmy { C, G, M, Y } => LevyDensity::Cgmy { C, G: G + theta, M: M - theta, Y },
            LevyDensity::Scaled { base, scale } => {
                LevyDensity::Scaled { base: Box::new(base.tilted(theta * scale)), scale: *scale }
            }
        }
    }

    /// `∫ near(x) ν(dx)` over `|x| ≤ 1` plus `∫ (e^{θx} − 1) ν(dx)` over
    /// `|x| > 1`. Where `θx > 0` the tail is integrated against the tilted
    /// density, so `e^{θx}` is never formed and slowly decaying tilts near
    /// the edge of the strip do not overflow.
    pub fn exp_tail_integral(&self, theta: f64, near: impl Fn(f64) -> f64, quad: &QuadSpec) -> Result<f64> {
        if *self == LevyDensity::Zero {
            return Ok(0.0);
        }
        let tilted = self.tilted(theta);
        let up = |x: f64| x.abs() > 1.0 && theta * x > 0.0;
        integrate_levy(
            |x| {
                if x.abs() <= 1.0 {
                    near(x)
                } else if up(x) {
                    -(-theta * x).exp_m1()
                } else {
                    (theta * x).exp_m1()
                }
            },
            |x| if up(x) { tilted.eval(x) } else { self.eval(x) },
            &quad.clone().with_splits(&self.kinks()),
        )
    }

    /// Multiplicative kinks of the density's integrals beyond `±1`, used as extra
    /// quadrature split points.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            LevyDensity::Scaled { base, scale } => {
                let mut k: Vec<f64> = base.kinks().into_iter().map(|x| x * scale).collect();
                k.extend([scale.abs(), -scale.abs()]);
                k
            }
            _ => Vec::new(),
        }
    }
}

/// Lévy–Khintchine triplet `(γ, σ², ν)` with truncation `c(x) = 1_{|x|≤1}`:
/// `κ(θ) = γθ + σ²θ²/2 + ∫(e^{θx} − 1 − θx 1_{|x|≤1}) ν(dx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub gamma: f64,
    pub sigma2: f64,
    pub density: LevyDensity,
}

impl LevyTriplet {
    pub fn new(gamma: f64, sigma2: f64, density: LevyDensity) -> Result<Self> {
        let mut v = crate::error::Violations::new();
        v.check(gamma.is_finite(), || format!("gamma must be finite, got {gamma}"));
        v.check(sigma2 >= 0.0 && sigma2.is_finite(), || format!("sigma2 must be >= 0, got {sigma2}"));
        v.finish()?;
        Ok(Self { gamma, sigma2, density })
    }

    /// Degenerate Brownian triplet `(γ, σ², 0)`.
    pub fn gaussian(gamma: f64, sigma2: f64) -> Result<Self> {
        Self::new(gamma, sigma2, LevyDensity::Zero)
    }

    pub(crate) fn quad_spec(&self, base: &QuadSpec) -> QuadSpec {
        base.clone().with_splits(&self.density.kinks())
    }

    /// `∫ min(x², 1) ν(dx)`, finite for every Lévy measure.
    pub fn activity_integral(&self, quad: &QuadSpec) -> Result<f64> {
        if self.density == LevyDensity::Zero {
            return Ok(0.0);
        }
        integrate_levy(|x| (x * x).min(1.0), |x| self.density.eval(x), &self.quad_spec(quad))
    }

    /// `κ(θ)` reconstructed from the triplet by quadrature.
    pub fn cumulant_by_quadrature(&self, theta: f64, quad: &QuadSpec) -> Result<f64> {
        let jump = self.density.exp_tail_integral(theta, |x| exp_m1_minus_x(theta * x), quad)?;
        Ok(self.gamma * theta + 0.5 * self.sigma2 * theta * theta + jump)
    }
}
