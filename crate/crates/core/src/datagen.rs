//! Seeded input generation.
//!
//! Every scenario reads from the same three input arrays `a`, `b`, `c`, each
//! filled i.i.d. uniform on `[1, 10]`. Keeping every value at or above 1
//! means the branchless kernels can evaluate every branch on every lane
//! without producing NaN or infinity (square roots, `pow` bases and divisors
//! are all positive).
//!
//! Values are drawn as `1 + 9 * (u / 2^32)` where `u` is a 32-bit output of
//! ChaCha8 seeded through `SeedableRng::seed_from_u64`, computed in `f64`
//! and rounded once to `f32`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Element count used by the reference protocol (`5e7`).
pub const DEFAULT_LENGTH: usize = 50_000_000;

/// Seed used when none is supplied on the command line.
pub const DEFAULT_SEED: u64 = 0x05EE_D0FF_10A7;

/// Human-readable identity of the generator, recorded in every report.
pub const GENERATOR_NAME: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

/// Exact fill rule, recorded in every report.
pub const FILL_FORMULA: &str =
    "f32(1.0 + 9.0 * (next_u32 / 2^32)) computed in f64, arrays a, b, c drawn in order";

pub const FILL_MIN: f32 = 1.0;
pub const FILL_MAX: f32 = 10.0;

/// Number of `f32` buffers a workload allocates.
const BUFFERS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SizingError {
    #[error("workload length must be at least 1")]
    Empty,
    #[error("workload length {0} does not fit in addressable memory")]
    TooLarge(usize),
    #[error("could not allocate {bytes} bytes for a workload of length {length}")]
    Allocation { length: usize, bytes: usize },
    #[error("input arrays have different lengths (a={a}, b={b}, c={c})")]
    Mismatch { a: usize, b: usize, c: usize },
}

/// Generator and seed identity as serialised into reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub name: String,
    pub seed: u64,
    pub fill: String,
}

impl GeneratorInfo {
    pub fn new(seed: u64) -> Self {
        GeneratorInfo {
            name: GENERATOR_NAME.to_string(),
            seed,
            fill: FILL_FORMULA.to_string(),
        }
    }
}

/// Input arrays plus one output buffer per kernel variant.
///
/// The plain and vector variants write to `d_plain` and `d_vector`
/// respectively and never share an output buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadData {
    length: usize,
    seed: u64,
    pub a: Vec<f32>,
    pub b: Vec<f32>,
    pub c: Vec<f32>,
    pub d_plain: Vec<f32>,
    pub d_vector: Vec<f32>,
}

/// Draws one value on `[1, 10]` from a 32-bit uniform integer.
#[inline]
pub fn scale_draw(u: u32) -> f32 {
    (1.0f64 + 9.0f64 * (f64::from(u) / 4_294_967_296.0f64)) as f32
}

fn zeroed(length: usize) -> Result<Vec<f32>, SizingError> {
    let mut v = Vec::new();
    v.try_reserve_exact(length)
        .map_err(|_| SizingError::Allocation {
            length,
            bytes: length.saturating_mul(std::mem::size_of::<f32>()),
        })?;
    v.resize(length, 0.0);
    Ok(v)
}

fn check_length(length: usize) -> Result<(), SizingError> {
    if length == 0 {
        return Err(SizingError::Empty);
    }
    let total = length
        .checked_mul(BUFFERS * std::mem::size_of::<f32>())
        .ok_or(SizingError::TooLarge(length))?;
    if total > isize::MAX as usize {
        return Err(SizingError::TooLarge(length));
    }
    Ok(())
}

/// Builds a workload of `length` elements from `seed`.
///
/// Arrays `a`, `b` and `c` are drawn in that order from a single stream;
/// output buffers start zeroed. The same `(length, seed)` always gives
/// bit-identical arrays.
pub fn generate(length: usize, seed: u64) -> Result<WorkloadData, SizingError> {
    check_length(length)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fill = |rng: &mut ChaCha8Rng| -> Result<Vec<f32>, SizingError> {
        let mut v = zeroed(length)?;
        for x in v.iter_mut() {
            *x = scale_draw(rng.next_u32());
        }
        Ok(v)
    };
    let a = fill(&mut rng)?;
    let b = fill(&mut rng)?;
    let c = fill(&mut rng)?;
    Ok(WorkloadData {
        length,
        seed,
        a,
        b,
        c,
        d_plain: zeroed(length)?,
        d_vector: zeroed(length)?,
    })
}

impl WorkloadData {
    /// Wraps caller-provided inputs, mainly for fixed test vectors.
    ///
    /// No range check is applied; values outside `[1, 10]` are accepted but
    /// lose the trap-free guarantee of generated data. The recorded seed is 0.
    pub fn from_inputs(a: Vec<f32>, b: Vec<f32>, c: Vec<f32>) -> Result<Self, SizingError> {
        if a.len() != b.len() || a.len() != c.len() {
            return Err(SizingError::Mismatch {
                a: a.len(),
                b: b.len(),
                c: c.len(),
            });
        }
        let length = a.len();
        check_length(length)?;
        Ok(WorkloadData {
            length,
            seed: 0,
            a,
            b,
            c,
            d_plain: zeroed(length)?,
            d_vector: zeroed(length)?,
        })
    }

    pub fn len(&self) -> usize {
        self.length
    }

    pub fn is_empty(&self) -> bool {
        self.length == 0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Resets both output buffers to `value`.
    pub fn fill_outputs(&mut self, value: f32) {
        self.d_plain.fill(value);
        self.d_vector.fill(value);
    }

    pub fn inputs(&self) -> (&[f32], &[f32], &[f32]) {
        (&self.a, &self.b, &self.c)
    }
}
