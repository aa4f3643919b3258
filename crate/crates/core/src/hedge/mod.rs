//! Semi-static hedge of a down-and-in claim.
//!
//! A claim paying `f(S_T)` if the price ever touches `H < S₀` is matched by
//! the European claim
//!
//! ```text
//! g(s) = f(s)·1{s ≤ H} + (s/H)^α f(H²/s)·1{s < H}
//! ```
//!
//! which, under quasi self-duality of order `α`, is worth the same as
//! `f(S_T)` at the moment the barrier is hit and nothing if it is never hit.
//! The experiment compares `E[f(S_T)·1{hit}]` with `E[g(S_T)]` on common
//! paths. With discrete monitoring and jumps the barrier is crossed with an
//! overshoot, so equality is approximate; the bias and the mean overshoot
//! are reported, not corrected.
//!
//! In practice `g` would be built from a strip of vanilla options; that
//! static replication is not modelled here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violations};
use crate::mc::{run_blocks_dyn, z_score, Estimate, Stats, IncrementSampler, McConfig, PayoffDescriptor};
use crate::models::QsdSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgeSpec {
    pub s0: f64,
    /// Barrier `H`, strictly below `s0`.
    pub barrier: f64,
    pub payoff: PayoffDescriptor,
    /// Order used in the hedge claim; normally the model's.
    pub alpha: f64,
    /// Number of equally spaced barrier checks on `(0, T]`.
    pub monitoring_steps: u32,
}

impl HedgeSpec {
    pub fn new(s0: f64, barrier: f64, payoff: PayoffDescriptor, alpha: f64, monitoring_steps: u32) -> Result<Self> {
        let spec = Self { s0, barrier, payoff, alpha, monitoring_steps };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Violations::new();
        v.check(self.s0 > 0.0 && self.s0.is_finite(), || format!("S0 must be positive, got {}", self.s0));
        v.check(self.barrier > 0.0 && self.barrier < self.s0, || {
            format!("barrier must satisfy 0 < H < S0, got H = {} with S0 = {}", self.barrier, self.s0)
        });
        v.check(self.alpha != 0.0 && self.alpha.is_finite(), || {
            format!("hedge order must be finite and non-zero, got {}", self.alpha)
        });
        v.check(self.monitoring_steps >= 1, || "monitoring_steps must be at least 1".into());
        if let Err(Error::Validation(msgs)) = self.payoff.validate() {
            for m in msgs {
                v.check(false, || m.clone());
            }
        }
        v.finish()
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn with_steps(self, monitoring_steps: u32) -> Self {
        Self { monitoring_steps, ..self }
    }

    /// Exponents `θ` that must lie in the moment strip for `E[g(S_T)]` to
    /// be finite; `g` is bounded above `H`, so only small prices matter.
    fn required_moments(&self) -> Vec<f64> {
        let a = self.alpha;
        match self.payoff {
            // (s/H)^α (H²/s − K)^+ ~ s^{α−1} as s → 0
            PayoffDescriptor::Call { .. } | PayoffDescriptor::Identity if a < 1.0 => vec![a - 1.0],
            PayoffDescriptor::Put { .. } | PayoffDescriptor::Digital { .. } | PayoffDescriptor::Constant if a < 0.0 => {
                vec![a]
            }
            _ => Vec::new(),
        }
    }
}

/// The hedge claim `g(s_T)`; non-negative for non-negative `f`.
#[inline]
pub fn hedge_payoff(s_t: f64, spec: &HedgeSpec) -> f64 {
    let h = spec.barrier;
    let mut v = 0.0;
    if s_t <= h {
        v += spec.payoff.eval(s_t);
    }
    if s_t < h {
        v += (s_t / h).powf(spec.alpha) * spec.payoff.eval(h * h / s_t);
    }
    v
}

/// `f(S_T)` if any monitored price is `≤ H`, else 0. The path is a grid of
/// `(t, S_t)` starting at `t = 0`; the initial point is not monitored.
pub fn knockin_payoff(path: &[(f64, f64)], spec: &HedgeSpec) -> f64 {
    match path.last() {
        Some(&(_, s_t)) if path.iter().skip(1).any(|&(_, s)| s <= spec.barrier) => spec.payoff.eval(s_t),
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HedgeResult {
    pub knockin_value: Estimate,
    pub hedge_value: Estimate,
    /// Paired z-score of `knockin − hedge`.
    pub z_score: f64,
    /// Mean of `knockin − hedge` with its standard error.
    pub gap: Estimate,
    pub hit_fraction: f64,
    /// Mean of `H − S_τ` at the first monitored hit; 0 if nothing hit.
    pub overshoot_mean: f64,
    pub monitoring_steps: u32,
}

impl HedgeResult {
    pub const CSV_HEADER: &'static str =
        "family,alpha,lambda,H_over_S0,payoff_kind,K,steps,knockin,knockin_se,hedge,hedge_se,z,hit_frac,overshoot";

    /// One CSV row; `K` is empty for strike-free payoffs.
    pub fn csv_record(&self, spec: &HedgeSpec, model: &QsdSpec, fmt_num: impl Fn(f64) -> String) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            model.family(),
            fmt_num(spec.alpha),
            fmt_num(model.lambda()),
            fmt_num(spec.barrier / spec.s0),
            spec.payoff.kind(),
            spec.payoff.strike().map(&fmt_num).unwrap_or_default(),
            self.monitoring_steps,
            fmt_num(self.knockin_value.mean),
            fmt_num(self.knockin_value.std_error),
            fmt_num(self.hedge_value.mean),
            fmt_num(self.hedge_value.std_error),
            fmt_num(self.z_score),
            fmt_num(self.hit_fraction),
            fmt_num(self.overshoot_mean),
        )
    }
}

/// Runs one experiment; the path grid has `spec.monitoring_steps` steps and
/// `cfg.n_steps` is ignored.
pub fn run_hedge_experiment(spec: &HedgeSpec, model: &QsdSpec, cfg: &McConfig) -> Result<HedgeResult> {
    Ok(run_hedge_experiments(std::slice::from_ref(spec), model, cfg)?.remove(0))
}

// Statistics kept per hedge spec.
const KNOCKIN: usize = 0;
const HEDGE: usize = 1;
const GAP: usize = 2;
const HIT: usize = 3;
const OVERSHOOT: usize = 4;
const PER_SPEC: usize = 5;

/// Runs several experiments on one set of paths. Paths are simulated on the
/// finest monitoring grid; every spec's `monitoring_steps` must divide it,
/// so coarser grids are exact subsamples. All specs must share `S₀` and `H`.
pub fn run_hedge_experiments(specs: &[HedgeSpec], model: &QsdSpec, cfg: &McConfig) -> Result<Vec<HedgeResult>> {
    let first = specs.first().ok_or_else(|| Error::validation("no hedge specs given"))?;
    let mut v = Violations::new();
    for s in specs {
        if let Err(Error::Validation(msgs)) = s.validate() {
            for m in msgs {
                v.check(false, || m.clone());
            }
        }
        v.check(s.s0 == first.s0 && s.barrier == first.barrier, || {
            "hedge specs in one run must share S0 and H".into()
        });
    }
    let fine = specs.iter().map(|s| s.monitoring_steps).max().unwrap_or(1);
    for s in specs {
        v.check(s.monitoring_steps >= 1 && fine % s.monitoring_steps.max(1) == 0, || {
            format!("monitoring_steps {} does not divide the finest grid {fine}", s.monitoring_steps)
        });
    }
    let native = model.native();
    for s in specs {
        for th in s.required_moments() {
            v.check(native.in_strip(th), || {
                let (lo, hi) = native.strip();
                format!("hedge claim with α = {} needs E[S_T^{th}], outside the moment strip ({lo}, {hi})", s.alpha)
            });
        }
    }
    v.finish()?;
    let cfg = McConfig { n_steps: fine, s0: first.s0, ..*cfg };
    cfg.validate()?;

    let sampler = IncrementSampler::new(&native, cfg.dt())?;
    let lambda_dt = model.lambda() * cfg.dt();
    let log_barrier = (first.barrier / first.s0).ln();
    let strides: Vec<u32> = specs.iter().map(|s| fine / s.monitoring_steps).collect();
    let n = specs.len();

    // Log-price path on the fine grid, then per-spec outcomes:
    // (knock-in payoff, hedge payoff, hit?, overshoot at first hit).
    let outcome = |r: &[f64], out: &mut Vec<(f64, f64, bool, f64)>| {
        out.clear();
        let s_t = first.s0 * r[r.len() - 1].exp();
        for (spec, &stride) in specs.iter().zip(&strides) {
            let hit = r
                .iter()
                .skip(stride as usize - 1)
                .step_by(stride as usize)
                .find(|&&x| x <= log_barrier);
            let (ki, over) = match hit {
                Some(&x) => (spec.payoff.eval(s_t), first.barrier - first.s0 * x.exp()),
                None => (0.0, 0.0),
            };
            out.push((ki, hedge_payoff(s_t, spec), hit.is_some(), over));
        }
    };

    let stats = run_blocks_dyn(&cfg, n * PER_SPEC, |stream, count, stats| {
        let steps = fine as usize;
        let (mut r1, mut r2) = (vec![0.0; steps], vec![0.0; steps]);
        let (mut o1, mut o2) = (Vec::with_capacity(n), Vec::with_capacity(n));
        let push = |stats: &mut [Stats], j: usize, ki: f64, hv: f64, hit: f64| {
            stats[j * PER_SPEC + KNOCKIN].push(ki);
            stats[j * PER_SPEC + HEDGE].push(hv);
            stats[j * PER_SPEC + GAP].push(ki - hv);
            stats[j * PER_SPEC + HIT].push(hit);
        };
        let hit_f = |h: bool| if h { 1.0 } else { 0.0 };
        if cfg.antithetic {
            for _ in 0..count.div_ceil(2) {
                let (mut x, mut y) = (0.0, 0.0);
                for k in 0..steps {
                    let (a, b) = sampler.sample_pair(stream);
                    let drift = lambda_dt * (k + 1) as f64;
                    x += a;
                    y += b;
                    r1[k] = drift + x;
                    r2[k] = drift + y;
                }
                outcome(&r1, &mut o1);
                outcome(&r2, &mut o2);
                for j in 0..n {
                    let (a, b) = (o1[j], o2[j]);
                    push(stats, j, 0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1), 0.5 * (hit_f(a.2) + hit_f(b.2)));
                    for o in [a, b] {
                        if o.2 {
                            stats[j * PER_SPEC + OVERSHOOT].push(o.3);
                        }
                    }
                }
            }
        } else {
            for _ in 0..count {
                let mut x = 0.0;
                for (k, slot) in r1.iter_mut().enumerate() {
                    x += sampler.sample(stream);
                    *slot = lambda_dt * (k + 1) as f64 + x;
                }
                outcome(&r1, &mut o1);
                for (j, o) in o1.iter().enumerate() {
                    push(stats, j, o.0, o.1, hit_f(o.2));
                    if o.2 {
                        stats[j * PER_SPEC + OVERSHOOT].push(o.3);
                    }
                }
            }
        }
    });

    Ok(specs
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let st = &stats[j * PER_SPEC..(j + 1) * PER_SPEC];
            let gap = st[GAP].estimate();
            HedgeResult {
                knockin_value: st[KNOCKIN].estimate(),
                hedge_value: st[HEDGE].estimate(),
                z_score: z_score(gap.mean, gap.std_error),
                gap,
                hit_fraction: st[HIT].estimate().mean,
                overshoot_mean: st[OVERSHOOT].estimate().mean,
                monitoring_steps: s.monitoring_steps,
            }
        })
        .collect())
}
