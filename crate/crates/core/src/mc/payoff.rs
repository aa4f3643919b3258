use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-negative payoff `f` of a price or price ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PayoffDescriptor {
    Call { strike: f64 },
    Put { strike: f64 },
    /// `1_{x > K}`.
    Digital { strike: f64 },
    Identity,
    /// `f ≡ 1`.
    Constant,
}

impl PayoffDescriptor {
    pub fn validate(&self) -> Result<()> {
        match self.strike() {
            Some(k) if !(k > 0.0 && k.is_finite()) => {
                Err(Error::validation(format!("strike must be positive, got {k}")))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            PayoffDescriptor::Call { strike } => (x - strike).max(0.0),
            PayoffDescriptor::Put { strike } => (strike - x).max(0.0),
            PayoffDescriptor::Digital { strike } => {
                if x > strike {
                    1.0
                } else {
                    0.0
                }
            }
            PayoffDescriptor::Identity => x,
            PayoffDescriptor::Constant => 1.0,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PayoffDescriptor::Call { .. } => "call",
            PayoffDescriptor::Put { .. } => "put",
            PayoffDescriptor::Digital { .. } => "digital",
            PayoffDescriptor::Identity => "identity",
            PayoffDescriptor::Constant => "constant",
        }
    }

    pub fn strike(&self) -> Option<f64> {
        match *self {
            PayoffDescriptor::Call { strike } | PayoffDescriptor::Put { strike } | PayoffDescriptor::Digital { strike } => {
                Some(strike)
            }
            _ => None,
        }
    }

    /// Builds a descriptor from a kind name and an optional strike.
    pub fn from_kind(kind: &str, strike: Option<f64>) -> Result<Self> {
        let need = |k: Option<f64>| k.ok_or_else(|| Error::validation(format!("payoff '{kind}' needs a strike")));
        let p = match kind.to_ascii_lowercase().as_str() {
            "call" => PayoffDescriptor::Call { strike: need(strike)? },
            "put" => PayoffDescriptor::Put { strike: need(strike)? },
            "digital" => PayoffDescriptor::Digital { strike: need(strike)? },
            "identity" => PayoffDescriptor::Identity,
            "constant" | "one" => PayoffDescriptor::Constant,
            _ => {
                return Err(Error::validation(format!(
                    "unknown payoff '{kind}' (expected call, put, digital, identity or constant)"
                )))
            }
        };
        p.validate()?;
        Ok(p)
    }

    /// Exponents `θ` for which `E[R^θ]` must be finite so that both
    /// `E[f(R)]` and `E[R^α f(1/R)]` are.
    pub(crate) fn duality_moments(&self, alpha: f64) -> Vec<f64> {
        let mut v = Vec::new();
        match self {
            PayoffDescriptor::Call { .. } => {
                // f(R) ≤ R; R^α (1/R − K)^+ ≤ R^{α−1} on {R < 1/K}.
                v.push(1.0);
                if alpha < 1.0 {
                    v.push(alpha - 1.0);
                }
            }
            PayoffDescriptor::Put { .. } | PayoffDescriptor::Digital { .. } => {
                // bounded f; R^α f(1/R) vanishes unless R > 1/K (put: ≤ K R^α).
                if alpha > 0.0 {
                    v.push(alpha);
                }
            }
            PayoffDescriptor::Identity => {
                v.push(1.0);
                v.push(alpha - 1.0);
            }
            PayoffDescriptor::Constant => v.push(alpha),
        }
        v
    }
}

impl fmt::Display for PayoffDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.strike() {
            Some(k) => write!(f, "{}({k})", self.kind()),
            None => f.write_str(self.kind()),
        }
    }
}

impl FromStr for PayoffDescriptor {
    type Err = Error;

    /// `call(1.1)`, `put(1)`, `digital(0.9)`, `identity`, `constant`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.split_once('(') {
            Some((kind, rest)) => {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::validation(format!("malformed payoff '{s}'")))?;
                let k = inner
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::validation(format!("cannot parse strike in '{s}'")))?;
                PayoffDescriptor::from_kind(kind.trim(), Some(k))
            }
            None => PayoffDescriptor::from_kind(s, None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(PayoffDescriptor::Call { strike: 1.0 }.eval(1.5), 0.5);
        assert_eq!(PayoffDescriptor::Put { strike: 1.0 }.eval(1.5), 0.0);
        assert_eq!(PayoffDescriptor::Digital { strike: 1.0 }.eval(1.0), 0.0);
        assert_eq!(PayoffDescriptor::Digital { strike: 1.0 }.eval(1.01), 1.0);
        assert_eq!(PayoffDescriptor::Constant.eval(7.0), 1.0);
        assert_eq!(PayoffDescriptor::Identity.eval(7.0), 7.0);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["call(1.1)", "put(1)", "digital(0.9)", "identity", "constant"] {
            let p: PayoffDescriptor = s.parse().unwrap();
            assert_eq!(p.to_string().parse::<PayoffDescriptor>().unwrap(), p);
        }
        assert!("call(-1)".parse::<PayoffDescriptor>().is_err());
        assert!("call".parse::<PayoffDescriptor>().is_err());
        assert!("swap(1)".parse::<PayoffDescriptor>().is_err());
    }
}
