use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violations};

/// Distance kept from the boundary of a strip of regularity.
pub const STRIP_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Nig,
    Vg,
    Meixner,
    Cgmy,
    /// Pure diffusion, `ν ≡ 0`.
    BlackScholes,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Nig => "NIG",
            Family::Vg => "VG",
            Family::Meixner => "Meixner",
            Family::Cgmy => "CGMY",
            Family::BlackScholes => "BS",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nig" => Ok(Family::Nig),
            "vg" => Ok(Family::Vg),
            "meixner" => Ok(Family::Meixner),
            "cgmy" => Ok(Family::Cgmy),
            "bs" | "black-scholes" | "blackscholes" => Ok(Family::BlackScholes),
            _ => Err(Error::validation(format!(
                "unknown family '{s}' (expected nig, vg, meixner, cgmy or bs)"
            ))),
        }
    }
}

/// Normal inverse Gaussian: `κ(θ) = mθ + d(√(a²−b²) − √(a²−(b+θ)²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NigParams {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub m: f64,
}

/// Variance gamma in CGM form: `κ(θ) = mθ − C(log(1 − θ/M) + log(1 + θ/G))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct VgParams {
    pub C: f64,
    pub G: f64,
    pub M: f64,
    pub m: f64,
}

/// Meixner: `κ(θ) = mθ + 2d log(cos(b/2) / cos((b + aθ)/2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeixnerParams {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub m: f64,
}

/// CGMY with `Y ∉ {0, 1}`; `m` is the drift in the fully compensated
/// (`c(x) = 1`) representation `κ(θ) = mθ + CΓ(−Y)[(M−θ)^Y − M^Y + (G+θ)^Y − G^Y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct CgmyParams {
    pub C: f64,
    pub G: f64,
    pub M: f64,
    pub Y: f64,
    pub m: f64,
}

/// Brownian motion with drift: `κ(θ) = mθ + σ²θ²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlackScholesParams {
    pub sigma: f64,
    pub m: f64,
}

/// A Lévy model in its native parameterisation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Nig(NigParams),
    Vg(VgParams),
    Meixner(MeixnerParams),
    Cgmy(CgmyParams),
    BlackScholes(BlackScholesParams),
}

impl ModelParams {
    pub fn family(&self) -> Family {
        match self {
            ModelParams::Nig(_) => Family::Nig,
            ModelParams::Vg(_) => Family::Vg,
            ModelParams::Meixner(_) => Family::Meixner,
            ModelParams::Cgmy(_) => Family::Cgmy,
            ModelParams::BlackScholes(_) => Family::BlackScholes,
        }
    }

    /// Drift parameter `m` of the native parameterisation.
    pub fn drift(&self) -> f64 {
        match *self {
            ModelParams::Nig(p) => p.m,
            ModelParams::Vg(p) => p.m,
            ModelParams::Meixner(p) => p.m,
            ModelParams::Cgmy(p) => p.m,
            ModelParams::BlackScholes(p) => p.m,
        }
    }

    pub fn with_drift(mut self, m: f64) -> Self {
        match &mut self {
            ModelParams::Nig(p) => p.m = m,
            ModelParams::Vg(p) => p.m = m,
            ModelParams::Meixner(p) => p.m = m,
            ModelParams::Cgmy(p) => p.m = m,
            ModelParams::BlackScholes(p) => p.m = m,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Violations::new();
        v.check(self.drift().is_finite(), || "drift m must be finite".into());
        match *self {
            ModelParams::Nig(p) => {
                v.check(p.a > 0.0, || format!("NIG: a > 0 required, got {}", p.a));
                v.check(p.d > 0.0, || format!("NIG: d > 0 required, got {}", p.d));
                v.check(p.b.abs() < p.a, || format!("NIG: |b| < a required, got b = {}, a = {}", p.b, p.a));
            }
            ModelParams::Vg(p) => {
                v.check(p.C > 0.0, || format!("VG: C > 0 required, got {}", p.C));
                v.check(p.G > 0.0, || format!("VG: G > 0 required, got {}", p.G));
                v.check(p.M > 1.0, || format!("VG: M > 1 required, got {}", p.M));
            }
            ModelParams::Meixner(p) => {
                v.check(p.a > 0.0 && p.a < 2.0 * PI, || format!("Meixner: a in (0, 2π) required, got {}", p.a));
                v.check(p.b > -PI && p.b < PI - p.a, || {
                    format!("Meixner: b in (-π, π - a) required, got b = {}, a = {}", p.b, p.a)
                });
                v.check(p.d > 0.0, || format!("Meixner: d > 0 required, got {}", p.d));
            }
            ModelParams::Cgmy(p) => {
                v.check(p.C > 0.0, || format!("CGMY: C > 0 required, got {}", p.C));
                v.check(p.G > 0.0, || format!("CGMY: G > 0 required, got {}", p.G));
                v.check(p.M > 1.0, || format!("CGMY: M > 1 required, got {}", p.M));
                v.check(p.Y < 2.0, || format!("CGMY: Y < 2 required, got {}", p.Y));
                v.check(p.Y != 0.0, || "CGMY: Y = 0 is the VG family; use VgParams".into());
                v.check(p.Y != 1.0, || "CGMY: Y = 1 is not supported".into());
            }
            ModelParams::BlackScholes(p) => {
                v.check(p.sigma > 0.0, || format!("BS: sigma > 0 required, got {}", p.sigma));
            }
        }
        v.finish()
    }

    /// Open interval of real `θ` on which `E[e^{θX₁}]` is finite.
    pub fn strip(&self) -> (f64, f64) {
        match *self {
            ModelParams::Nig(p) => (-p.a - p.b, p.a - p.b),
            ModelParams::Vg(p) => (-p.G, p.M),
            ModelParams::Meixner(p) => (-(PI + p.b) / p.a, (PI - p.b) / p.a),
            ModelParams::Cgmy(p) => (-p.G, p.M),
            ModelParams::BlackScholes(_) => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `θ` lies inside the strip with [`STRIP_MARGIN`] to spare.
    pub fn in_strip(&self, theta: f64) -> bool {
        let (lo, hi) = self.strip();
        theta.is_finite() && theta >= lo + STRIP_MARGIN && theta <= hi - STRIP_MARGIN
    }

    pub(crate) fn check_strip(&self, theta: f64) -> Result<()> {
        if self.in_strip(theta) {
            Ok(())
        } else {
            let (lo, hi) = self.strip();
            Err(Error::Domain(format!(
                "θ = {theta} outside the {} strip of regularity ({lo}, {hi})",
                self.family()
            )))
        }
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ModelParams::Nig(p) => write!(f, "family=NIG a={} b={} d={} m={}", p.a, p.b, p.d, p.m),
            ModelParams::Vg(p) => write!(f, "family=VG C={} G={} M={} m={}", p.C, p.G, p.M, p.m),
            ModelParams::Meixner(p) => write!(f, "family=Meixner a={} b={} d={} m={}", p.a, p.b, p.d, p.m),
            ModelParams::Cgmy(p) => write!(f, "family=CGMY C={} G={} M={} Y={} m={}", p.C, p.G, p.M, p.Y, p.m),
            ModelParams::BlackScholes(p) => write!(f, "family=BS sigma={} m={}", p.sigma, p.m),
        }
    }
}

/// Parses whitespace-separated `key=value` pairs.
pub(crate) fn parse_key_values(s: &str) -> Result<Vec<(String, String)>> {
    s.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::validation(format!("expected key=value, got '{tok}'")))
        })
        .collect()
}

pub(crate) struct KeyValues(Vec<(String, String)>);

impl KeyValues {
    pub(crate) fn parse(s: &str) -> Result<Self> {
        parse_key_values(s).map(KeyValues)
    }

    pub(crate) fn family(&self) -> Result<Family> {
        self.raw("family")
            .ok_or_else(|| Error::validation("missing key 'family'"))?
            .parse()
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub(crate) fn get(&self, key: &str) -> Result<f64> {
        let raw = self
            .raw(key)
            .ok_or_else(|| Error::validation(format!("missing key '{key}'")))?;
        raw.parse::<f64>()
            .map_err(|_| Error::validation(format!("key '{key}': cannot parse '{raw}' as a number")))
    }

    pub(crate) fn get_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.raw(key).is_some() {
            self.get(key)
        } else {
            Ok(default)
        }
    }

    pub(crate) fn ensure_only(&self, allowed: &[&str]) -> Result<()> {
        let unknown: Vec<String> = self
            .0
            .iter()
            .filter(|(k, _)| k != "family" && !allowed.contains(&k.as_str()))
            .map(|(k, _)| format!("unknown key '{k}'"))
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(unknown))
        }
    }
}

impl FromStr for ModelParams {
    type Err = Error;

    /// Flat form, e.g. `family=NIG a=1 b=-0.5 d=1 m=0`. A missing `m` defaults to 0.
    fn from_str(s: &str) -> Result<Self> {
        let kv = KeyValues::parse(s)?;
        let p = match kv.family()? {
            Family::Nig => {
                kv.ensure_only(&["a", "b", "d", "m"])?;
                ModelParams::Nig(NigParams { a: kv.get("a")?, b: kv.get("b")?, d: kv.get("d")?, m: kv.get_or("m", 0.0)? })
            }
            Family::Vg => {
                kv.ensure_only(&["C", "G", "M", "m"])?;
                ModelParams::Vg(VgParams { C: kv.get("C")?, G: kv.get("G")?, M: kv.get("M")?, m: kv.get_or("m", 0.0)? })
            }
            Family::Meixner => {
                kv.ensure_only(&["a", "b", "d", "m"])?;
                ModelParams::Meixner(MeixnerParams {
                    a: kv.get("a")?,
                    b: kv.get("b")?,
                    d: kv.get("d")?,
                    m: kv.get_or("m", 0.0)?,
                })
            }
            Family::Cgmy => {
                kv.ensure_only(&["C", "G", "M", "Y", "m"])?;
                ModelParams::Cgmy(CgmyParams {
                    C: kv.get("C")?,
                    G: kv.get("G")?,
                    M: kv.get("M")?,
                    Y: kv.get("Y")?,
                    m: kv.get_or("m", 0.0)?,
                })
            }
            Family::BlackScholes => {
                kv.ensure_only(&["sigma", "m"])?;
                ModelParams::BlackScholes(BlackScholesParams { sigma: kv.get("sigma")?, m: kv.get_or("m", 0.0)? })
            }
        };
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form() {
        let p: ModelParams = "family=NIG a=1 b=-0.5 d=1 m=0".parse().unwrap();
        assert_eq!(p, ModelParams::Nig(NigParams { a: 1.0, b: -0.5, d: 1.0, m: 0.0 }));
        assert_eq!(p.to_string(), "family=NIG a=1 b=-0.5 d=1 m=0");
        let q: ModelParams = "family=cgmy C=1 G=1.2 M=1.8 Y=0.5".parse().unwrap();
        assert_eq!(q.to_string().parse::<ModelParams>().unwrap(), q);
    }

    #[test]
    fn text_form_errors() {
        assert!("family=NIG a=1 d=1".parse::<ModelParams>().is_err());
        assert!("family=XYZ a=1".parse::<ModelParams>().is_err());
        assert!("family=VG C=1 G=1 M=2 Q=3".parse::<ModelParams>().is_err());
        assert!("family=VG C=1 G=1 M=abc".parse::<ModelParams>().is_err());
        // validation lists every failing constraint
        match "family=NIG a=-1 b=3 d=0".parse::<ModelParams>() {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strips() {
        let p = ModelParams::Meixner(MeixnerParams { a: PI, b: 0.0, d: 1.0, m: 0.0 });
        assert_eq!(p.strip(), (-1.0, 1.0));
        assert!(p.in_strip(0.999));
        assert!(!p.in_strip(1.0 - 1e-10));
    }
}
