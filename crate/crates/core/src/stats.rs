//! Timing summaries and the execution-time ratio.
//!
//! `tau = T_vector / T_plain`, and its uncertainty assumes the two timings
//! are uncorrelated:
//!
//! ```text
//! sigma(tau) = |tau| * sqrt((s_v / T_v)^2 + (s_p / T_p)^2)
//! ```
//!
//! Ratios are fractions here; percentages only appear in human-readable
//! output.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least 2 timing samples, got {0}")]
    TooFewSamples(usize),
    #[error("mean execution time must be positive, got {0} ns")]
    NonPositiveMean(f64),
    #[error("timing sample must be positive")]
    ZeroDuration,
}

/// One measured kernel execution, in nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct TimingSample(u64);

impl TimingSample {
    pub fn from_nanos(nanos: u64) -> Result<Self, StatsError> {
        if nanos == 0 {
            return Err(StatsError::ZeroDuration);
        }
        Ok(TimingSample(nanos))
    }

    pub fn nanos(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for TimingSample {
    type Error = StatsError;

    fn try_from(nanos: u64) -> Result<Self, Self::Error> {
        TimingSample::from_nanos(nanos)
    }
}

impl From<TimingSample> for u64 {
    fn from(s: TimingSample) -> u64 {
        s.0
    }
}

/// Mean and sample (n - 1) standard deviation of a set of timings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub mean_ns: f64,
    pub std_dev_ns: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioResult {
    pub tau: f64,
    pub sigma_tau: f64,
}

impl RatioResult {
    pub fn percent(&self) -> (f64, f64) {
        (self.tau * 100.0, self.sigma_tau * 100.0)
    }
}

/// Summarises timings with a single-pass (Welford) update.
pub fn summarise(samples: &[TimingSample]) -> Result<RunStats, StatsError> {
    summarise_nanos(samples.iter().map(|s| s.0 as f64))
}

/// [`summarise`] over raw nanosecond values.
pub fn summarise_nanos(values: impl IntoIterator<Item = f64>) -> Result<RunStats, StatsError> {
    let mut count = 0usize;
    let mut mean = 0.0f64;
    let mut m2 = 0.0f64;
    for x in values {
        count += 1;
        let delta = x - mean;
        mean += delta / count as f64;
        m2 += delta * (x - mean);
    }
    if count < 2 {
        return Err(StatsError::TooFewSamples(count));
    }
    let variance = (m2 / (count - 1) as f64).max(0.0);
    Ok(RunStats {
        mean_ns: mean,
        std_dev_ns: variance.sqrt(),
        count,
    })
}

/// Execution-time ratio of the vector variant over the plain variant.
pub fn ratio(vector: &RunStats, plain: &RunStats) -> Result<RatioResult, StatsError> {
    for m in [vector.mean_ns, plain.mean_ns] {
        if m.is_nan() || m <= 0.0 {
            return Err(StatsError::NonPositiveMean(m));
        }
    }
    let tau = vector.mean_ns / plain.mean_ns;
    let rel_v = vector.std_dev_ns / vector.mean_ns;
    let rel_p = plain.std_dev_ns / plain.mean_ns;
    Ok(RatioResult {
        tau,
        sigma_tau: tau.abs() * rel_v.hypot(rel_p),
    })
}
