use crate::error::{Error, Result};
use crate::models::ModelParams;
use crate::numerics::{GammaSampler, InverseGaussianSampler, RngStream};

use super::meixner::MeixnerTable;

/// Exact sampler of `X_{t+dt} − X_t` for fixed parameters and step.
#[derive(Debug, Clone)]
pub enum IncrementSampler {
    /// `m·dt + bτ + √τ·N`, `τ ~ IG(d·dt, √(a²−b²))`.
    Nig { drift: f64, b: f64, tau: InverseGaussianSampler },
    /// `m·dt + Γ(C·dt, M) − Γ(C·dt, G)`.
    Vg { drift: f64, up: GammaSampler, down: GammaSampler, g_over_m: f64 },
    Meixner(Box<MeixnerTable>),
    /// `m·dt + σ√dt·N`.
    Normal { drift: f64, sd: f64 },
}

impl IncrementSampler {
    pub fn new(params: &ModelParams, dt: f64) -> Result<Self> {
        params.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::validation(format!("time step must be positive, got {dt}")));
        }
        Ok(match *params {
            ModelParams::Nig(p) => IncrementSampler::Nig {
                drift: p.m * dt,
                b: p.b,
                tau: InverseGaussianSampler::new(p.d * dt, (p.a * p.a - p.b * p.b).sqrt())?,
            },
            ModelParams::Vg(p) => IncrementSampler::Vg {
                drift: p.m * dt,
                up: GammaSampler::new(p.C * dt, p.M)?,
                down: GammaSampler::new(p.C * dt, p.G)?,
                g_over_m: p.G / p.M,
            },
            ModelParams::Meixner(p) => IncrementSampler::Meixner(Box::new(MeixnerTable::new(&p, dt)?)),
            ModelParams::BlackScholes(p) => IncrementSampler::Normal { drift: p.m * dt, sd: p.sigma * dt.sqrt() },
            ModelParams::Cgmy(_) => {
                return Err(Error::Unsupported("no increment sampler for CGMY".into()));
            }
        })
    }

    #[inline]
    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        match self {
            IncrementSampler::Nig { drift, b, tau } => {
                let t = tau.sample(stream);
                drift + b * t + t.sqrt() * stream.standard_normal()
            }
            IncrementSampler::Vg { drift, up, down, .. } => drift + up.sample(stream) - down.sample(stream),
            IncrementSampler::Meixner(t) => t.sample(stream),
            IncrementSampler::Normal { drift, sd } => drift + sd * stream.standard_normal(),
        }
    }

    /// A draw and an antithetic partner with the same law.
    #[inline]
    pub fn sample_pair(&self, stream: &mut RngStream) -> (f64, f64) {
        match self {
            IncrementSampler::Nig { drift, b, tau } => {
                let t = tau.sample(stream);
                let z = t.sqrt() * stream.standard_normal();
                (drift + b * t + z, drift + b * t - z)
            }
            IncrementSampler::Vg { drift, up, down, g_over_m } => {
                // Γ(k, M)·M/G ~ Γ(k, G) and vice versa: swap the two legs.
                let (u, d) = (up.sample(stream), down.sample(stream));
                (drift + u - d, drift + d * g_over_m - u / g_over_m)
            }
            IncrementSampler::Meixner(t) => t.sample_pair(stream),
            IncrementSampler::Normal { drift, sd } => {
                let z = sd * stream.standard_normal();
                (drift + z, drift - z)
            }
        }
    }
}

/// One draw of `X_{t+dt} − X_t`. Builds the sampler on every call; reuse an
/// [`IncrementSampler`] in loops.
pub fn sample_increment(params: &ModelParams, dt: f64, stream: &mut RngStream) -> Result<f64> {
    Ok(IncrementSampler::new(params, dt)?.sample(stream))
}
