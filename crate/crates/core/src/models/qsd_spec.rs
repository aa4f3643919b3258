use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::params::{
    BlackScholesParams, CgmyParams, Family, KeyValues, MeixnerParams, ModelParams, NigParams, VgParams,
};
use crate::error::{Error, Result, Violations};

/// Margin kept from the ends of an admissible order interval.
pub const ALPHA_MARGIN: f64 = 1e-9;

/// The symmetric part of a quasi-self-dual model: everything except the order
/// `α` and the carrying cost `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SymmetricBase {
    /// NIG with `b = −α/2`.
    Nig { a: f64, d: f64 },
    /// VG with `M = β + α/2`, `G = β − α/2`.
    Vg { c: f64, beta: f64 },
    /// CGMY with `M = β + α/2`, `G = β − α/2`.
    Cgmy { c: f64, beta: f64, y: f64 },
    /// Meixner with `a = −2b/α`, `b ≠ 0`.
    Meixner { b: f64, d: f64 },
    /// Meixner of order zero: `b = 0` and `a` free.
    MeixnerEven { a: f64, d: f64 },
    /// Degenerate model `ν ≡ 0`.
    BlackScholes { sigma: f64 },
}

/// Which half of the Meixner parameter set a base belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeixnerCase {
    /// `b ∈ (0, π)`, `α < −2b/(π−b)`.
    M1,
    /// `b ∈ (−π, 0)`, `α > −2b/(π−b)`.
    M2,
}

impl SymmetricBase {
    pub fn family(&self) -> Family {
        match self {
            SymmetricBase::Nig { .. } => Family::Nig,
            SymmetricBase::Vg { .. } => Family::Vg,
            SymmetricBase::Cgmy { .. } => Family::Cgmy,
            SymmetricBase::Meixner { .. } | SymmetricBase::MeixnerEven { .. } => Family::Meixner,
            SymmetricBase::BlackScholes { .. } => Family::BlackScholes,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Violations::new();
        match *self {
            SymmetricBase::Nig { a, d } => {
                v.check(a > 0.5, || format!("NIG: a > 1/2 required, got {a}"));
                v.check(d > 0.0, || format!("NIG: d > 0 required, got {d}"));
            }
            SymmetricBase::Vg { c, beta } => {
                v.check(c > 0.0, || format!("VG: C > 0 required, got {c}"));
                v.check(beta > 0.5, || format!("VG: beta > 1/2 required, got {beta}"));
            }
            SymmetricBase::Cgmy { c, beta, y } => {
                v.check(c > 0.0, || format!("CGMY: C > 0 required, got {c}"));
                v.check(beta > 0.5, || format!("CGMY: beta > 1/2 required, got {beta}"));
                v.check(y < 2.0, || format!("CGMY: Y < 2 required, got {y}"));
                v.check(y != 0.0, || "CGMY: Y = 0 is the VG family".into());
                v.check(y != 1.0, || "CGMY: Y = 1 is not supported".into());
            }
            SymmetricBase::Meixner { b, d } => {
                v.check(b > -PI && b < PI, || format!("Meixner: b in (-π, π) required, got {b}"));
                v.check(b != 0.0, || "Meixner: b = 0 forces order 0; use the even base with a".into());
                v.check(d > 0.0, || format!("Meixner: d > 0 required, got {d}"));
            }
            SymmetricBase::MeixnerEven { a, d } => {
                v.check(a > 0.0 && a < PI, || format!("Meixner: a in (0, π) required, got {a}"));
                v.check(d > 0.0, || format!("Meixner: d > 0 required, got {d}"));
            }
            SymmetricBase::BlackScholes { sigma } => {
                v.check(sigma > 0.0, || format!("BS: sigma > 0 required, got {sigma}"));
            }
        }
        v.check(self.all_finite(), || "base parameters must be finite".into());
        v.finish()
    }

    fn all_finite(&self) -> bool {
        match *self {
            SymmetricBase::Nig { a, d } => a.is_finite() && d.is_finite(),
            SymmetricBase::Vg { c, beta } => c.is_finite() && beta.is_finite(),
            SymmetricBase::Cgmy { c, beta, y } => c.is_finite() && beta.is_finite() && y.is_finite(),
            SymmetricBase::Meixner { b, d } => b.is_finite() && d.is_finite(),
            SymmetricBase::MeixnerEven { a, d } => a.is_finite() && d.is_finite(),
            SymmetricBase::BlackScholes { sigma } => sigma.is_finite(),
        }
    }

    pub fn meixner_case(&self) -> Option<MeixnerCase> {
        match *self {
            SymmetricBase::Meixner { b, .. } if b > 0.0 => Some(MeixnerCase::M1),
            SymmetricBase::Meixner { .. } => Some(MeixnerCase::M2),
            _ => None,
        }
    }

    /// Open interval of admissible orders `α` (possibly unbounded). The
    /// even Meixner base admits only `α = 0`, reported as `(0, 0)`.
    pub fn alpha_interval(&self) -> (f64, f64) {
        match *self {
            SymmetricBase::Nig { a, .. } => (-2.0 * (a - 1.0), 2.0 * a),
            SymmetricBase::Vg { beta, .. } | SymmetricBase::Cgmy { beta, .. } => (-2.0 * (beta - 1.0), 2.0 * beta),
            SymmetricBase::Meixner { b, .. } => {
                let edge = -2.0 * b / (PI - b);
                if b > 0.0 {
                    (f64::NEG_INFINITY, edge)
                } else {
                    (edge, f64::INFINITY)
                }
            }
            SymmetricBase::MeixnerEven { .. } => (0.0, 0.0),
            SymmetricBase::BlackScholes { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `α` lies in the admissible interval with [`ALPHA_MARGIN`] to spare.
    pub fn admits(&self, alpha: f64) -> bool {
        if !alpha.is_finite() {
            return false;
        }
        if let SymmetricBase::MeixnerEven { .. } = self {
            return alpha == 0.0;
        }
        let (lo, hi) = self.alpha_interval();
        alpha >= lo + ALPHA_MARGIN && alpha <= hi - ALPHA_MARGIN
    }

    pub(crate) fn check_alpha(&self, alpha: f64) -> Result<()> {
        if self.admits(alpha) {
            return Ok(());
        }
        if let SymmetricBase::MeixnerEven { .. } = self {
            return Err(Error::validation(format!(
                "Meixner with b = 0 admits only order α = 0, got {alpha}"
            )));
        }
        let (lo, hi) = self.alpha_interval();
        Err(Error::validation(format!(
            "{}: order α = {alpha} outside the admissible interval ({lo}, {hi})",
            self.family()
        )))
    }

    /// Native parameters at order `α` with drift `m`.
    pub fn native(&self, alpha: f64, m: f64) -> ModelParams {
        match *self {
            SymmetricBase::Nig { a, d } => ModelParams::Nig(NigParams { a, b: -0.5 * alpha, d, m }),
            SymmetricBase::Vg { c, beta } => {
                ModelParams::Vg(VgParams { C: c, G: beta - 0.5 * alpha, M: beta + 0.5 * alpha, m })
            }
            SymmetricBase::Cgmy { c, beta, y } => {
                ModelParams::Cgmy(CgmyParams { C: c, G: beta - 0.5 * alpha, M: beta + 0.5 * alpha, Y: y, m })
            }
            SymmetricBase::Meixner { b, d } => ModelParams::Meixner(MeixnerParams { a: -2.0 * b / alpha, b, d, m }),
            SymmetricBase::MeixnerEven { a, d } => ModelParams::Meixner(MeixnerParams { a, b: 0.0, d, m }),
            SymmetricBase::BlackScholes { sigma } => ModelParams::BlackScholes(BlackScholesParams { sigma, m }),
        }
    }
}

impl fmt::Display for SymmetricBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SymmetricBase::Nig { a, d } => write!(f, "family=NIG a={a} d={d}"),
            SymmetricBase::Vg { c, beta } => write!(f, "family=VG C={c} beta={beta}"),
            SymmetricBase::Cgmy { c, beta, y } => write!(f, "family=CGMY C={c} beta={beta} Y={y}"),
            SymmetricBase::Meixner { b, d } => write!(f, "family=Meixner b={b} d={d}"),
            SymmetricBase::MeixnerEven { a, d } => write!(f, "family=Meixner a={a} b=0 d={d}"),
            SymmetricBase::BlackScholes { sigma } => write!(f, "family=BS sigma={sigma}"),
        }
    }
}

impl SymmetricBase {
    fn from_key_values(kv: &KeyValues, extra: &[&str]) -> Result<Self> {
        fn with<'a>(keys: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
            keys.iter().chain(extra).copied().collect()
        }
        let base = match kv.family()? {
            Family::Nig => {
                kv.ensure_only(&with(&["a", "d"], extra))?;
                SymmetricBase::Nig { a: kv.get("a")?, d: kv.get("d")? }
            }
            Family::Vg => {
                kv.ensure_only(&with(&["C", "beta"], extra))?;
                SymmetricBase::Vg { c: kv.get("C")?, beta: kv.get("beta")? }
            }
            Family::Cgmy => {
                kv.ensure_only(&with(&["C", "beta", "Y"], extra))?;
                SymmetricBase::Cgmy { c: kv.get("C")?, beta: kv.get("beta")?, y: kv.get("Y")? }
            }
            Family::Meixner => {
                kv.ensure_only(&with(&["a", "b", "d"], extra))?;
                let b = kv.get("b")?;
                if b == 0.0 {
                    SymmetricBase::MeixnerEven { a: kv.get("a")?, d: kv.get("d")? }
                } else {
                    SymmetricBase::Meixner { b, d: kv.get("d")? }
                }
            }
            Family::BlackScholes => {
                kv.ensure_only(&with(&["sigma"], extra))?;
                SymmetricBase::BlackScholes { sigma: kv.get("sigma")? }
            }
        };
        base.validate()?;
        Ok(base)
    }
}

impl FromStr for SymmetricBase {
    type Err = Error;

    /// Flat form, e.g. `family=VG C=1 beta=1.5`.
    fn from_str(s: &str) -> Result<Self> {
        SymmetricBase::from_key_values(&KeyValues::parse(s)?, &[])
    }
}

/// A quasi-self-dual model: symmetric base, order `α`, carrying cost `λ` and
/// the drift `m` of `X`.
///
/// [`QsdSpec::new`] enforces the admissible order interval, the sign
/// exclusions `¬(λ > 0 ∧ α > 1)` and `¬(λ < 0 ∧ α < 1 ∧ α ≠ 0)`, and sets
/// `m = −λ` (`m = −σ²/2` in the Black–Scholes case). It does not require `λ`
/// to match the order; see `qsd::full_report` for that residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QsdSpec {
    base: SymmetricBase,
    alpha: f64,
    lambda: f64,
    m: f64,
}

impl QsdSpec {
    pub fn new(base: SymmetricBase, alpha: f64, lambda: f64) -> Result<Self> {
        let mut v = Violations::new();
        if let Err(Error::Validation(msgs)) = base.validate() {
            for m in msgs {
                v.check(false, || m.clone());
            }
        }
        if let Err(Error::Validation(msgs)) = base.check_alpha(alpha) {
            for m in msgs {
                v.check(false, || m.clone());
            }
        }
        v.check(lambda.is_finite(), || format!("carrying cost λ must be finite, got {lambda}"));
        v.check(!(lambda > 0.0 && alpha > 1.0), || {
            format!("no quasi self-dual model has λ = {lambda} > 0 together with α = {alpha} > 1")
        });
        v.check(!(lambda < 0.0 && alpha < 1.0 && alpha != 0.0), || {
            format!("no quasi self-dual model has λ = {lambda} < 0 together with α = {alpha} < 1, α ≠ 0")
        });
        v.finish()?;
        let m = match base {
            SymmetricBase::BlackScholes { sigma } => -0.5 * sigma * sigma,
            _ => -lambda,
        };
        Ok(Self { base, alpha, lambda, m })
    }

    pub fn base(&self) -> SymmetricBase {
        self.base
    }

    pub fn family(&self) -> Family {
        self.base.family()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Drift `m` of `X` in the native parameterisation.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Copy with `λ` shifted by `delta` while the law of `X` (and hence `m`)
    /// is kept. Breaks the order relation on purpose; used for power checks.
    pub fn with_lambda_shift(&self, delta: f64) -> Self {
        Self { lambda: self.lambda + delta, ..*self }
    }

    /// Copy with the order replaced but `λ` and the law of `X` kept. The
    /// result is generally not quasi self-dual; used for power checks.
    pub fn with_alpha_override(&self, alpha: f64) -> Self {
        Self { alpha, ..*self }
    }

    /// Native parameters of `X`.
    pub fn native(&self) -> ModelParams {
        self.base.native(self.alpha, self.m)
    }
}

/// Native parameters of a quasi-self-dual spec.
pub fn qsd_to_native(spec: &QsdSpec) -> ModelParams {
    spec.native()
}

impl fmt::Display for QsdSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} alpha={} lambda={}", self.base, self.alpha, self.lambda)
    }
}

impl FromStr for QsdSpec {
    type Err = Error;

    /// Flat form, e.g. `family=NIG a=1 d=1 alpha=0.5 lambda=0.2`.
    fn from_str(s: &str) -> Result<Self> {
        let kv = KeyValues::parse(s)?;
        let base = SymmetricBase::from_key_values(&kv, &["alpha", "lambda"])?;
        QsdSpec::new(base, kv.get("alpha")?, kv.get("lambda")?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn native_substitution() {
        let s = QsdSpec::new(SymmetricBase::Nig { a: 1.0, d: 1.0 }, 1.0, 0.0).unwrap();
        assert_eq!(qsd_to_native(&s), ModelParams::Nig(NigParams { a: 1.0, b: -0.5, d: 1.0, m: 0.0 }));

        let lam = -(2.0f64.ln());
        let s = QsdSpec::new(SymmetricBase::Meixner { b: -PI / 2.0, d: 1.0 }, 2.0, lam).unwrap();
        match s.native() {
            ModelParams::Meixner(p) => {
                assert!((p.a - PI / 2.0).abs() < 1e-15);
                assert_eq!(p.m, -lam);
            }
            other => panic!("{other:?}"),
        }

        let lam = (9.0f64 / 5.0).ln();
        let s = QsdSpec::new(SymmetricBase::Vg { c: 1.0, beta: 1.5 }, 0.0, lam).unwrap();
        assert_eq!(s.native(), ModelParams::Vg(VgParams { C: 1.0, G: 1.5, M: 1.5, m: -lam }));
    }

    #[test]
    fn native_params_are_valid_across_interval() {
        let bases = [
            SymmetricBase::Nig { a: 0.8, d: 1.0 },
            SymmetricBase::Vg { c: 1.0, beta: 0.7 },
            SymmetricBase::Cgmy { c: 1.0, beta: 1.5, y: 1.5 },
            SymmetricBase::Meixner { b: 2.0, d: 1.0 },
            SymmetricBase::Meixner { b: -2.0, d: 1.0 },
        ];
        for base in bases {
            let (lo, hi) = base.alpha_interval();
            let (lo, hi) = (lo.max(-50.0), hi.min(50.0));
            for k in 0..=100 {
                let alpha = lo + ALPHA_MARGIN + (hi - lo - 2.0 * ALPHA_MARGIN) * k as f64 / 100.0;
                let p = base.native(alpha, 0.0);
                p.validate().unwrap_or_else(|e| panic!("{base} α={alpha}: {e}"));
                assert!(p.in_strip(1.0) || (alpha - lo).abs() < 1e-6 || (alpha - hi).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn jensen_exclusions() {
        let base = SymmetricBase::Nig { a: 1.0, d: 1.0 };
        assert!(QsdSpec::new(base, 1.5, 0.1).is_err());
        assert!(QsdSpec::new(base, 0.5, -0.1).is_err());
        assert!(QsdSpec::new(base, 0.5, 0.1).is_ok());
        assert!(QsdSpec::new(base, 1.5, -0.1).is_ok());
    }

    #[test]
    fn interval_and_margin() {
        let base = SymmetricBase::Nig { a: 1.0, d: 1.0 };
        assert_eq!(base.alpha_interval(), (0.0, 2.0));
        assert!(!base.admits(0.0));
        assert!(base.admits(1e-8));
        assert!(QsdSpec::new(base, 2.5, -1.0).is_err());
        let even = SymmetricBase::MeixnerEven { a: 1.0, d: 1.0 };
        assert!(even.admits(0.0));
        assert!(!even.admits(0.1));
    }

    #[test]
    fn errors_are_collected() {
        match QsdSpec::new(SymmetricBase::Nig { a: 0.2, d: -1.0 }, 5.0, 0.1) {
            Err(Error::Validation(v)) => assert!(v.len() >= 4, "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn text_form() {
        let s: QsdSpec = "family=VG C=1 beta=1.5 alpha=0.5 lambda=0.2".parse().unwrap();
        assert_eq!(s.to_string().parse::<QsdSpec>().unwrap(), s);
        let b: SymmetricBase = "family=Meixner a=1 b=0 d=2".parse().unwrap();
        assert_eq!(b, SymmetricBase::MeixnerEven { a: 1.0, d: 2.0 });
        assert!("family=VG C=1 beta=1.5 alpha=0.5".parse::<QsdSpec>().is_err());
    }

    #[test]
    fn lambda_shift_keeps_law() {
        let s = QsdSpec::new(SymmetricBase::Vg { c: 1.0, beta: 1.5 }, 0.5, 0.2).unwrap();
        let t = s.with_lambda_shift(0.05);
        assert_eq!(t.native(), s.native());
        assert!((t.lambda() - 0.25).abs() < 1e-15);
    }
}
