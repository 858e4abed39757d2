//! Measurement protocol.
//!
//! For one scenario: generate data once, run each variant once untimed
//! (warmup), check the two outputs agree, then time `repeats` executions of
//! each variant. The interleaved scheme alternates `[plain, vector]` pairs;
//! the blocked scheme runs every plain repeat before every vector repeat.
//! Only the kernel call sits between the two clock reads. After each timed
//! call the output is folded into a checksum so the work stays observable.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::{self, SizingError, WorkloadData};
use crate::kernels::{self, Backend, KernelError, ScenarioId, ScenarioSpec, Variant};
use crate::stats::{self, RatioResult, RunStats, StatsError, TimingSample};

pub const DEFAULT_REPEATS: usize = 50;

/// Default relative tolerance for scenarios that only use `+ - * /`.
pub const EXACT_TOLERANCE: f64 = 0.0;
/// Default relative tolerance for scenarios with `sqrt`, `cos`, `pow`, `ceil`.
pub const TRANSCENDENTAL_TOLERANCE: f64 = 1e-5;

/// A timer resolution above this fraction of one execution raises a warning.
const RESOLUTION_WARN_FRACTION: f64 = 0.01;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Sizing(#[from] SizingError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("at least 2 repeats are needed for a standard deviation, got {0}")]
    TooFewRepeats(usize),
    #[error("output buffers differ in length (plain {plain}, vector {vector})")]
    LengthMismatch { plain: usize, vector: usize },
    #[error("scenario {scenario}: {verification}")]
    VerificationFailed {
        scenario: u8,
        verification: Box<Verification>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    /// `[[plain, vector], [plain, vector], ...]`
    Interleaved,
    /// `[[plain, plain, ...], [vector, vector, ...]]`
    Blocked,
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "interleaved" => Ok(SchemeKind::Interleaved),
            "blocked" => Ok(SchemeKind::Blocked),
            other => Err(format!(
                "unknown scheme '{other}' (expected interleaved or blocked)"
            )),
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Interleaved => "interleaved",
            SchemeKind::Blocked => "blocked",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchedulingScheme {
    pub kind: SchemeKind,
    pub repeats: usize,
}

impl Default for SchedulingScheme {
    fn default() -> Self {
        SchedulingScheme {
            kind: SchemeKind::Interleaved,
            repeats: DEFAULT_REPEATS,
        }
    }
}

impl SchedulingScheme {
    pub fn new(kind: SchemeKind, repeats: usize) -> Self {
        SchedulingScheme { kind, repeats }
    }

    /// Order in which timed executions happen.
    pub fn order(&self) -> Vec<Variant> {
        match self.kind {
            SchemeKind::Interleaved => (0..self.repeats)
                .flat_map(|_| [Variant::Plain, Variant::Vector])
                .collect(),
            SchemeKind::Blocked => std::iter::repeat_n(Variant::Plain, self.repeats)
                .chain(std::iter::repeat_n(Variant::Vector, self.repeats))
                .collect(),
        }
    }
}

/// Per-scenario relative tolerances for plain / vector agreement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances([f64; 8]);

impl Default for Tolerances {
    fn default() -> Self {
        let mut t = [EXACT_TOLERANCE; 8];
        for spec in ScenarioSpec::catalogue() {
            if spec.uses_transcendentals {
                t[usize::from(spec.id().get() - 1)] = TRANSCENDENTAL_TOLERANCE;
            }
        }
        Tolerances(t)
    }
}

impl Tolerances {
    pub fn get(&self, id: ScenarioId) -> f64 {
        self.0[usize::from(id.get() - 1)]
    }

    pub fn set(&mut self, id: ScenarioId, tolerance: f64) {
        self.0[usize::from(id.get() - 1)] = tolerance;
    }

    pub fn apply(&mut self, o: &ToleranceOverride) {
        match o.scenario {
            Some(id) => self.set(id, o.tolerance),
            None => self.0 = [o.tolerance; 8],
        }
    }
}

/// Command-line tolerance override: `VALUE` for every scenario or
/// `ID=VALUE` for one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceOverride {
    pub scenario: Option<ScenarioId>,
    pub tolerance: f64,
}

impl FromStr for ToleranceOverride {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (scenario, value) = match s.split_once('=') {
            Some((id, v)) => (
                Some(id.parse::<ScenarioId>().map_err(|e| e.to_string())?),
                v,
            ),
            None => (None, s),
        };
        let tolerance: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("'{value}' is not a number"))?;
        if !tolerance.is_finite() || tolerance < 0.0 {
            return Err(format!(
                "tolerance must be finite and non-negative, got {value}"
            ));
        }
        Ok(ToleranceOverride {
            scenario,
            tolerance,
        })
    }
}

/// Outcome of comparing the plain and vector outputs element by element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub tolerance: f64,
    #[serde(with = "crate::report::lossless_f64")]
    pub max_abs_diff: f64,
    #[serde(with = "crate::report::lossless_f64")]
    pub max_rel_diff: f64,
    /// Element with the largest relative difference, if any element differs.
    pub worst_index: Option<usize>,
    #[serde(with = "crate::report::lossless_f64::option")]
    pub worst_plain: Option<f64>,
    #[serde(with = "crate::report::lossless_f64::option")]
    pub worst_vector: Option<f64>,
    pub mismatches: usize,
    pub passed: bool,
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            return write!(
                f,
                "outputs agree (max relative difference {:e})",
                self.max_rel_diff
            );
        }
        write!(
            f,
            "{} element(s) differ beyond relative tolerance {:e}; worst at index {} (plain {}, vector {}, relative difference {:e})",
            self.mismatches,
            self.tolerance,
            self.worst_index.map_or_else(|| "?".to_string(), |i| i.to_string()),
            self.worst_plain.unwrap_or(f64::NAN),
            self.worst_vector.unwrap_or(f64::NAN),
            self.max_rel_diff,
        )
    }
}

/// Compares two output buffers.
///
/// An element passes when both values are bit-identical or
/// `|p - v| <= tolerance * max(|p|, |v|)`. NaN against anything else fails
/// with an infinite difference.
pub fn compare_outputs(
    plain: &[f32],
    vector: &[f32],
    tolerance: f64,
) -> Result<Verification, HarnessError> {
    if plain.len() != vector.len() {
        return Err(HarnessError::LengthMismatch {
            plain: plain.len(),
            vector: vector.len(),
        });
    }
    let mut v = Verification {
        tolerance,
        max_abs_diff: 0.0,
        max_rel_diff: 0.0,
        worst_index: None,
        worst_plain: None,
        worst_vector: None,
        mismatches: 0,
        passed: true,
    };
    for (i, (&p, &q)) in plain.iter().zip(vector).enumerate() {
        if p.to_bits() == q.to_bits() {
            continue;
        }
        let (p, q) = (f64::from(p), f64::from(q));
        let scale = p.abs().max(q.abs());
        let abs = (p - q).abs();
        let (abs, rel) = if abs.is_nan() {
            (f64::INFINITY, f64::INFINITY)
        } else if scale == 0.0 {
            (abs, 0.0)
        } else {
            (abs, abs / scale)
        };
        let ok = abs <= tolerance * scale;
        if !ok {
            v.mismatches += 1;
        }
        v.max_abs_diff = v.max_abs_diff.max(abs);
        if v.worst_index.is_none() || rel > v.max_rel_diff {
            v.max_rel_diff = rel;
            v.worst_index = Some(i);
            v.worst_plain = Some(p);
            v.worst_vector = Some(q);
        }
    }
    v.passed = v.mismatches == 0;
    Ok(v)
}

/// Compares `data.d_plain` with `data.d_vector` after both variants ran.
pub fn verify(
    _spec: &ScenarioSpec,
    data: &WorkloadData,
    tolerance: f64,
) -> Result<Verification, HarnessError> {
    compare_outputs(&data.d_plain, &data.d_vector, tolerance)
}

/// Something the harness can run in both variants and check.
pub trait Workload {
    /// Runs one full execution of `variant`. This is the only work inside
    /// the timed region.
    fn execute(&mut self, variant: Variant);
    /// Compares the outputs of the most recent executions.
    fn verify(&mut self) -> Result<Verification, HarnessError>;
    /// Folds the current output of `variant` into a number.
    fn checksum(&self, variant: Variant) -> f64;
}

/// Monotonic time source in nanoseconds.
pub trait Clock {
    fn now_ns(&mut self) -> u64;
    /// Smallest observable tick.
    fn resolution_ns(&mut self) -> u64;
}

#[derive(Debug, Clone)]
pub struct MonotonicClock {
    origin: Instant,
}

impl Default for MonotonicClock {
    fn default() -> Self {
        MonotonicClock {
            origin: Instant::now(),
        }
    }
}

impl Clock for MonotonicClock {
    #[inline]
    fn now_ns(&mut self) -> u64 {
        self.origin.elapsed().as_nanos() as u64
    }

    fn resolution_ns(&mut self) -> u64 {
        let mut best = u64::MAX;
        let mut last = self.now_ns();
        for _ in 0..10_000 {
            let t = self.now_ns();
            if t > last {
                best = best.min(t - last);
                last = t;
            }
        }
        if best == u64::MAX {
            1
        } else {
            best
        }
    }
}

/// Raw output of [`measure`].
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub verification: Verification,
    pub plain: Vec<TimingSample>,
    pub vector: Vec<TimingSample>,
    pub plain_checksum: f64,
    pub vector_checksum: f64,
    pub warnings: Vec<String>,
}

/// Warmup, verification, then timed executions in `scheme` order.
///
/// Nothing is timed if verification fails.
pub fn measure<W: Workload, C: Clock>(
    workload: &mut W,
    scheme: SchedulingScheme,
    clock: &mut C,
    scenario: u8,
) -> Result<Measurement, HarnessError> {
    if scheme.repeats < 2 {
        return Err(HarnessError::TooFewRepeats(scheme.repeats));
    }
    for variant in Variant::BOTH {
        workload.execute(variant);
    }
    let verification = workload.verify()?;
    if !verification.passed {
        return Err(HarnessError::VerificationFailed {
            scenario,
            verification: Box::new(verification),
        });
    }

    let mut warnings = Vec::new();
    let mut plain = Vec::with_capacity(scheme.repeats);
    let mut vector = Vec::with_capacity(scheme.repeats);
    let mut sums = [0.0f64; 2];
    let mut clamped = 0usize;
    for variant in scheme.order() {
        let start = clock.now_ns();
        workload.execute(black_box(variant));
        let end = clock.now_ns();
        let elapsed = end.saturating_sub(start);
        let sample = TimingSample::from_nanos(elapsed.max(1))?;
        if elapsed == 0 {
            clamped += 1;
        }
        let slot = match variant {
            Variant::Plain => {
                plain.push(sample);
                0
            }
            Variant::Vector => {
                vector.push(sample);
                1
            }
        };
        sums[slot] += black_box(workload.checksum(variant));
    }
    if clamped > 0 {
        warnings.push(format!(
            "{clamped} execution(s) measured 0 ns and were recorded as 1 ns"
        ));
    }

    let resolution = clock.resolution_ns() as f64;
    let fastest = [&plain, &vector]
        .into_iter()
        .flat_map(|s| s.iter())
        .map(|s| s.nanos())
        .min()
        .unwrap_or(1) as f64;
    if resolution > RESOLUTION_WARN_FRACTION * fastest {
        warnings.push(format!(
            "timer resolution {resolution} ns exceeds 1% of the fastest execution ({fastest} ns)"
        ));
    }

    Ok(Measurement {
        verification,
        plain,
        vector,
        plain_checksum: sums[0],
        vector_checksum: sums[1],
        warnings,
    })
}

/// A scenario bound to generated data and a vector backend.
#[derive(Debug)]
pub struct ScenarioWorkload {
    spec: &'static ScenarioSpec,
    backend: Backend,
    tolerance: f64,
    pub data: WorkloadData,
}

impl ScenarioWorkload {
    pub fn new(
        spec: &'static ScenarioSpec,
        data: WorkloadData,
        backend: Backend,
        tolerance: f64,
    ) -> Result<Self, HarnessError> {
        spec.check_length(data.len())?;
        if !backend.is_available() {
            return Err(KernelError::BackendUnavailable { backend }.into());
        }
        Ok(ScenarioWorkload {
            spec,
            backend,
            tolerance,
            data,
        })
    }
}

impl Workload for ScenarioWorkload {
    #[inline]
    fn execute(&mut self, variant: Variant) {
        let result = match variant {
            Variant::Plain => kernels::run_plain(self.spec, &mut self.data),
            Variant::Vector => kernels::run_vector_with(self.backend, self.spec, &mut self.data),
        };
        result.expect("length and backend validated in ScenarioWorkload::new");
    }

    fn verify(&mut self) -> Result<Verification, HarnessError> {
        verify(self.spec, &self.data, self.tolerance)
    }

    fn checksum(&self, variant: Variant) -> f64 {
        let out = match variant {
            Variant::Plain => &self.data.d_plain,
            Variant::Vector => &self.data.d_vector,
        };
        out.iter().map(|&x| f64::from(x)).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawSamples {
    pub plain: Vec<TimingSample>,
    pub vector: Vec<TimingSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checksums {
    pub plain: f64,
    pub vector: f64,
}

/// Everything recorded for one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario_id: ScenarioId,
    pub length: usize,
    pub seed: u64,
    pub scheme: SchedulingScheme,
    pub backend: String,
    /// Math functions the vector variant computed lane by lane.
    pub emulated_ops: Vec<String>,
    pub sequence_emulated: bool,
    pub plain_stats: RunStats,
    pub vector_stats: RunStats,
    pub ratio: RatioResult,
    pub verification: Verification,
    pub raw_samples: RawSamples,
    pub checksums: Checksums,
    pub warnings: Vec<String>,
}

/// Options for [`run_scenario`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub length: usize,
    pub seed: u64,
    pub scheme: SchedulingScheme,
    pub tolerances: Tolerances,
    pub backend: Backend,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            length: datagen::DEFAULT_LENGTH,
            seed: datagen::DEFAULT_SEED,
            scheme: SchedulingScheme::default(),
            tolerances: Tolerances::default(),
            backend: Backend::detect(),
        }
    }
}

/// Generates data, verifies, measures and summarises one scenario.
pub fn run_scenario(
    spec: &'static ScenarioSpec,
    options: &RunOptions,
) -> Result<ScenarioResult, HarnessError> {
    run_scenario_with_clock(spec, options, &mut MonotonicClock::default())
}

pub fn run_scenario_with_clock<C: Clock>(
    spec: &'static ScenarioSpec,
    options: &RunOptions,
    clock: &mut C,
) -> Result<ScenarioResult, HarnessError> {
    if options.scheme.repeats < 2 {
        return Err(HarnessError::TooFewRepeats(options.scheme.repeats));
    }
    spec.check_length(options.length)?;
    let data = datagen::generate(options.length, options.seed)?;
    let mut workload = ScenarioWorkload::new(
        spec,
        data,
        options.backend,
        options.tolerances.get(spec.id()),
    )?;
    let m = measure(&mut workload, options.scheme, clock, spec.id().get())?;
    assemble(spec, options, m)
}

fn assemble(
    spec: &ScenarioSpec,
    options: &RunOptions,
    m: Measurement,
) -> Result<ScenarioResult, HarnessError> {
    let plain_stats = stats::summarise(&m.plain)?;
    let vector_stats = stats::summarise(&m.vector)?;
    let ratio = stats::ratio(&vector_stats, &plain_stats)?;
    let emulated_ops = spec.emulated_ops(options.backend);
    Ok(ScenarioResult {
        scenario_id: spec.id(),
        length: options.length,
        seed: options.seed,
        scheme: options.scheme,
        backend: options.backend.name().to_string(),
        sequence_emulated: !emulated_ops.is_empty(),
        emulated_ops,
        plain_stats,
        vector_stats,
        ratio,
        verification: m.verification,
        raw_samples: RawSamples {
            plain: m.plain,
            vector: m.vector,
        },
        checksums: Checksums {
            plain: m.plain_checksum,
            vector: m.vector_checksum,
        },
        warnings: m.warnings,
    })
}
