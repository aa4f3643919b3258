use serde::{Deserialize, Serialize};

/// Sample mean with its standard error `sd/√n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

impl Estimate {
    /// `(mean − target)/std_error`; 0 when both the gap and the error vanish.
    pub fn z_against(&self, target: f64) -> f64 {
        z_score(self.mean - target, self.std_error)
    }
}

pub(crate) fn z_score(gap: f64, se: f64) -> f64 {
    if gap == 0.0 {
        0.0
    } else if se == 0.0 {
        gap.signum() * f64::INFINITY
    } else {
        gap / se
    }
}

/// Running mean and centred sum of squares (Welford), mergeable with Chan's
/// update. Merging blocks in a fixed order makes results independent of how
/// blocks were scheduled.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Stats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Stats {
    #[inline]
    pub(crate) fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub(crate) fn merge(&mut self, other: &Stats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        self.mean += delta * w;
        self.m2 += other.m2 + delta * delta * self.n as f64 * w;
        self.n = n;
    }

    pub(crate) fn estimate(&self) -> Estimate {
        let se = if self.n > 1 {
            (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        Estimate { mean: self.mean, std_error: se, n: self.n }
    }
}
