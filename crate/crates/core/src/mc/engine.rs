use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::QsdSpec;
use crate::numerics::RngStream;

use super::payoff::PayoffDescriptor;
use super::sampler::IncrementSampler;
use super::stats::{z_score, Estimate, Stats};

/// Paths per work unit. Block `k` draws from stream `k`, so results depend
/// on the seed and path count only, never on scheduling.
pub const BLOCK_PATHS: u64 = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: u64,
    pub n_steps: u32,
    /// Horizon `T` in years.
    pub horizon: f64,
    pub seed: u64,
    /// Antithetic pairs; each pair counts as one sample in the estimates.
    pub antithetic: bool,
    pub s0: f64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { n_paths: 1_000_000, n_steps: 1, horizon: 1.0, seed: 42, antithetic: false, s0: 1.0 }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        let mut v = crate::error::Violations::new();
        v.check(self.n_paths >= 1, || "n_paths must be at least 1".into());
        v.check(self.n_steps >= 1, || "n_steps must be at least 1".into());
        v.check(self.horizon > 0.0 && self.horizon.is_finite(), || {
            format!("horizon must be positive, got {}", self.horizon)
        });
        v.check(self.s0 > 0.0 && self.s0.is_finite(), || format!("s0 must be positive, got {}", self.s0));
        v.finish()
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn with_paths(self, n_paths: u64) -> Self {
        Self { n_paths, ..self }
    }

    pub fn with_steps(self, n_steps: u32) -> Self {
        Self { n_steps, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Runs `body(stream, count, stats)` over all blocks in parallel and merges
/// the per-block statistics in block order.
pub(crate) fn run_blocks<const K: usize, F>(cfg: &McConfig, body: F) -> [Stats; K]
where
    F: Fn(&mut RngStream, u64, &mut [Stats; K]) + Sync,
{
    let v = run_blocks_dyn(cfg, K, |stream, count, stats| {
        let arr: &mut [Stats; K] = stats.try_into().expect("block statistics length");
        body(stream, count, arr)
    });
    v.try_into().expect("block statistics length")
}

/// [`run_blocks`] with a run-time number of statistics.
pub(crate) fn run_blocks_dyn<F>(cfg: &McConfig, k: usize, body: F) -> Vec<Stats>
where
    F: Fn(&mut RngStream, u64, &mut [Stats]) + Sync,
{
    let n_blocks = cfg.n_paths.div_ceil(BLOCK_PATHS);
    let parts: Vec<Vec<Stats>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK_PATHS.min(cfg.n_paths - b * BLOCK_PATHS);
            let mut stream = RngStream::new(cfg.seed, b);
            let mut stats = vec![Stats::default(); k];
            body(&mut stream, count, &mut stats);
            stats
        })
        .collect();
    let mut total = vec![Stats::default(); k];
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    total
}

/// Log-return `λT + X_T` sampler for a spec.
pub(crate) struct Terminal {
    sampler: IncrementSampler,
    steps: u32,
    carry: f64,
}

impl Terminal {
    pub(crate) fn new(spec: &QsdSpec, cfg: &McConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            sampler: IncrementSampler::new(&spec.native(), cfg.dt())?,
            steps: cfg.n_steps,
            carry: spec.lambda() * cfg.horizon,
        })
    }

    #[inline]
    fn draw(&self, stream: &mut RngStream) -> f64 {
        let mut x = 0.0;
        for _ in 0..self.steps {
            x += self.sampler.sample(stream);
        }
        self.carry + x
    }

    #[inline]
    fn draw_pair(&self, stream: &mut RngStream) -> (f64, f64) {
        let (mut x, mut y) = (0.0, 0.0);
        for _ in 0..self.steps {
            let (a, b) = self.sampler.sample_pair(stream);
            x += a;
            y += b;
        }
        (self.carry + x, self.carry + y)
    }

    /// Feeds `f(log return)` for every sample (antithetic pairs averaged).
    pub(crate) fn for_each<const K: usize>(
        &self,
        cfg: &McConfig,
        stream: &mut RngStream,
        count: u64,
        stats: &mut [Stats; K],
        f: &(impl Fn(f64) -> [f64; K] + Sync),
    ) {
        if cfg.antithetic {
            for _ in 0..count.div_ceil(2) {
                let (x, y) = self.draw_pair(stream);
                let (a, b) = (f(x), f(y));
                for i in 0..K {
                    stats[i].push(0.5 * (a[i] + b[i]));
                }
            }
        } else {
            for _ in 0..count {
                let v = f(self.draw(stream));
                for i in 0..K {
                    stats[i].push(v[i]);
                }
            }
        }
    }
}

fn terminal_stats<const K: usize>(
    spec: &QsdSpec,
    cfg: &McConfig,
    f: impl Fn(f64) -> [f64; K] + Sync,
) -> Result<[Stats; K]> {
    let term = Terminal::new(spec, cfg)?;
    Ok(run_blocks(cfg, |stream, count, stats| term.for_each(cfg, stream, count, stats, &f)))
}

/// `E[g(S_T)]` with `S_T = S₀ e^{λT + X_T}`.
pub fn mc_expectation(spec: &QsdSpec, g: impl Fn(f64) -> f64 + Sync, cfg: &McConfig) -> Result<Estimate> {
    let s0 = cfg.s0;
    let [s] = terminal_stats(spec, cfg, |r| [g(s0 * r.exp())])?;
    Ok(s.estimate())
}

/// Both sides of the duality identity on common random numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityOutcome {
    /// `E[f(S_T/S₀)]`.
    pub lhs: Estimate,
    /// `E[(S_T/S₀)^α f(S₀/S_T)]`.
    pub rhs: Estimate,
    /// Mean gap over the standard error of the pathwise difference.
    pub z_score: f64,
}

/// Refuses payoffs whose duality expectations need moments outside the
/// strip of regularity.
pub fn check_duality_moments(spec: &QsdSpec, f: &PayoffDescriptor) -> Result<()> {
    f.validate()?;
    let native = spec.native();
    let missing: Vec<String> = f
        .duality_moments(spec.alpha())
        .into_iter()
        .filter(|&th| !native.in_strip(th))
        .map(|th| {
            let (lo, hi) = native.strip();
            format!("payoff {f} needs E[e^({th}·X)], outside the moment strip ({lo}, {hi})")
        })
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(missing))
    }
}

/// Monte Carlo test of `E[f(R)] = E[R^α f(1/R)]`, `R = S_T/S₀`.
pub fn duality_test(spec: &QsdSpec, f: &PayoffDescriptor, cfg: &McConfig) -> Result<DualityOutcome> {
    check_duality_moments(spec, f)?;
    let alpha = spec.alpha();
    let [l, r, d] = terminal_stats(spec, cfg, |x| {
        let lhs = f.eval(x.exp());
        let rhs = (alpha * x).exp() * f.eval((-x).exp());
        [lhs, rhs, lhs - rhs]
    })?;
    let (lhs, rhs, diff) = (l.estimate(), r.estimate(), d.estimate());
    Ok(DualityOutcome { lhs, rhs, z_score: z_score(diff.mean, diff.std_error) })
}

/// `Ê[e^{X_T}]` and `Ê[(S_T/S₀)^α]`, both equal to 1 for a calibrated spec.
pub fn martingale_test(spec: &QsdSpec, cfg: &McConfig) -> Result<(Estimate, Estimate)> {
    let carry = spec.lambda() * cfg.horizon;
    let alpha = spec.alpha();
    let [a, b] = terminal_stats(spec, cfg, |r| [(r - carry).exp(), (alpha * r).exp()])?;
    Ok((a.estimate(), b.estimate()))
}

/// `Ê[e^{θX_T}]` for several `θ` on the same draws.
pub fn mgf_estimates(spec: &QsdSpec, thetas: &[f64], cfg: &McConfig) -> Result<Vec<Estimate>> {
    let carry = spec.lambda() * cfg.horizon;
    let mut out = Vec::with_capacity(thetas.len());
    for chunk in thetas.chunks(4) {
        let th: [f64; 4] = std::array::from_fn(|i| chunk.get(i).copied().unwrap_or(0.0));
        let stats = terminal_stats(spec, cfg, |r| {
            let x = r - carry;
            [(th[0] * x).exp(), (th[1] * x).exp(), (th[2] * x).exp(), (th[3] * x).exp()]
        })?;
        out.extend(stats.iter().take(chunk.len()).map(|s| s.estimate()));
    }
    Ok(out)
}

/// Sample mean, variance and skewness of `X_T` (the first three central
/// statistics, as plain estimates of `X`, `(X−x̄)²`, `(X−x̄)³` about the
/// model mean `x̄`).
pub fn terminal_moments(spec: &QsdSpec, cfg: &McConfig) -> Result<[Estimate; 3]> {
    let carry = spec.lambda() * cfg.horizon;
    let mean = spec.native().mean() * cfg.horizon;
    let [a, b, c] = terminal_stats(spec, cfg, |r| {
        let x = r - carry;
        let c = x - mean;
        [x, c * c, c * c * c]
    })?;
    Ok([a.estimate(), b.estimate(), c.estimate()])
}

/// Price path on the grid `t_k = kT/n_steps`, `S_{t₀} = S₀`.
pub fn simulate_path(spec: &QsdSpec, cfg: &McConfig, stream: &mut RngStream) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    let sampler = IncrementSampler::new(&spec.native(), cfg.dt())?;
    let dt = cfg.dt();
    let mut path = Vec::with_capacity(cfg.n_steps as usize + 1);
    path.push((0.0, cfg.s0));
    let mut x = 0.0;
    for k in 1..=cfg.n_steps {
        x += sampler.sample(stream);
        let t = if k == cfg.n_steps { cfg.horizon } else { k as f64 * dt };
        path.push((t, cfg.s0 * (spec.lambda() * t + x).exp()));
    }
    Ok(path)
}

/// One CSV row of a Monte Carlo test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub test_name: String,
    pub family: String,
    pub alpha: f64,
    pub lambda: f64,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub z: f64,
    pub n_paths: u64,
    pub seed: u64,
}

impl McRow {
    pub const CSV_HEADER: &'static str = "test_name,family,alpha,lambda,lhs,lhs_se,rhs,rhs_se,z,n_paths,seed";

    pub fn new(test_name: &str, spec: &QsdSpec, lhs: Estimate, rhs: Estimate, z: f64, cfg: &McConfig) -> Self {
        Self {
            test_name: test_name.to_string(),
            family: spec.family().to_string(),
            alpha: spec.alpha(),
            lambda: spec.lambda(),
            lhs,
            rhs,
            z,
            n_paths: cfg.n_paths,
            seed: cfg.seed,
        }
    }

    /// Martingale row: estimate against the exact value 1.
    pub fn martingale(test_name: &str, spec: &QsdSpec, est: Estimate, cfg: &McConfig) -> Self {
        let one = Estimate { mean: 1.0, std_error: 0.0, n: est.n };
        Self::new(test_name, spec, est, one, est.z_against(1.0), cfg)
    }

    pub fn csv(&self, fmt_num: impl Fn(f64) -> String) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.test_name,
            self.family,
            fmt_num(self.alpha),
            fmt_num(self.lambda),
            fmt_num(self.lhs.mean),
            fmt_num(self.lhs.std_error),
            fmt_num(self.rhs.mean),
            fmt_num(self.rhs.std_error),
            fmt_num(self.z),
            self.n_paths,
            self.seed
        )
    }
}
