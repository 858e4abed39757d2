//! The eight benchmark scenarios.
//!
//! | id | kernel                                              | output |
//! |----|-----------------------------------------------------|--------|
//! | 1  | `d = a*b + c`                                       | d      |
//! | 2  | `d[i] = a[i-1]*b[i] + c[i] + b[i+1]`, ends zeroed   | d      |
//! | 3  | `a*sqrt(b) + |c| - cos(a)/c + b^2.5`                | d      |
//! | 4  | scenario 3 with `a[i-1]` and `b[i+1]`, ends zeroed  | d      |
//! | 5  | even index: `a+b`, odd: `a-b`                       | c      |
//! | 6  | `a > 5`: `a+b`, else `a-b`                          | c      |
//! | 7  | `a > 5` then `b >= 8`: `a*b`, `b <= 5`: `a/b`, else `a+b`; else `a-b` | c |
//! | 8  | as 7 with `sqrt(a)`, `a^b`, `cos(a)`; else `ceil(a)` | c     |
//!
//! In this crate every scenario writes its result into the variant's output
//! buffer of [`WorkloadData`] (`d_plain` / `d_vector`); the `c` column above
//! only records which array the kernel conceptually overwrites.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::datagen::WorkloadData;

pub mod lanes;
mod plain;
mod vector;

pub use lanes::{
    compare_gt, lanewise_transcendental, nested_branch_masks, select_lanes, F32x8, Mask8,
    Transcendental, LANES,
};
pub use vector::Backend;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("scenario {scenario} needs at least {min} elements, got {length}")]
    TooShort {
        scenario: u8,
        length: usize,
        min: usize,
    },
    #[error("{backend} backend is not supported on this machine")]
    BackendUnavailable { backend: Backend },
    #[error("input arrays have {inputs} elements but the output has {output}")]
    LengthMismatch { inputs: usize, output: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseScenarioError {
    #[error("empty scenario list")]
    Empty,
    #[error("'{0}' is not a scenario id (expected 1-8, a range like 2-5, or 'all')")]
    Invalid(String),
}

/// Scenario identifier, always in `1..=8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ScenarioId(u8);

impl ScenarioId {
    pub const COUNT: u8 = 8;

    pub fn new(id: u8) -> Option<ScenarioId> {
        (1..=Self::COUNT).contains(&id).then_some(ScenarioId(id))
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = ScenarioId> {
        (1..=Self::COUNT).map(ScenarioId)
    }

    pub fn spec(self) -> &'static ScenarioSpec {
        &CATALOGUE[usize::from(self.0 - 1)]
    }
}

impl TryFrom<u8> for ScenarioId {
    type Error = ParseScenarioError;

    fn try_from(id: u8) -> Result<Self, Self::Error> {
        ScenarioId::new(id).ok_or_else(|| ParseScenarioError::Invalid(id.to_string()))
    }
}

impl From<ScenarioId> for u8 {
    fn from(id: ScenarioId) -> u8 {
        id.0
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for ScenarioId {
    type Err = ParseScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .parse::<u8>()
            .ok()
            .and_then(ScenarioId::new)
            .ok_or_else(|| ParseScenarioError::Invalid(s.to_string()))
    }
}

/// Parses a scenario selection such as `all`, `6`, `1,3` or `2-5,8`.
///
/// The result is sorted and free of duplicates.
pub fn parse_scenario_list(s: &str) -> Result<Vec<ScenarioId>, ParseScenarioError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseScenarioError::Empty);
    }
    if s.eq_ignore_ascii_case("all") {
        return Ok(ScenarioId::all().collect());
    }
    let mut ids = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.eq_ignore_ascii_case("all") {
            ids.extend(ScenarioId::all());
        } else if let Some((lo, hi)) = part.split_once('-') {
            let lo: ScenarioId = lo
                .parse()
                .map_err(|_| ParseScenarioError::Invalid(part.into()))?;
            let hi: ScenarioId = hi
                .parse()
                .map_err(|_| ParseScenarioError::Invalid(part.into()))?;
            if lo > hi {
                return Err(ParseScenarioError::Invalid(part.into()));
            }
            ids.extend((lo.0..=hi.0).map(ScenarioId));
        } else {
            ids.push(part.parse()?);
        }
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionalKind {
    None,
    Index,
    Data,
    NestedData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plain,
    Vector,
}

impl Variant {
    pub const BOTH: [Variant; 2] = [Variant::Plain, Variant::Vector];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Vector => "vector",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Static description of one scenario. Only the catalogue constructs these.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSpec {
    id: ScenarioId,
    pub description: &'static str,
    pub uses_offsets: bool,
    pub uses_transcendentals: bool,
    pub conditional_kind: ConditionalKind,
    /// Math functions applied per lane, in kernel order.
    pub math_ops: &'static [&'static str],
}

const fn spec(
    id: u8,
    description: &'static str,
    uses_offsets: bool,
    conditional_kind: ConditionalKind,
    math_ops: &'static [&'static str],
) -> ScenarioSpec {
    ScenarioSpec {
        id: ScenarioId(id),
        description,
        uses_offsets,
        uses_transcendentals: !math_ops.is_empty(),
        conditional_kind,
        math_ops,
    }
}

static CATALOGUE: [ScenarioSpec; 8] = [
    spec(1, "Basic operations.", false, ConditionalKind::None, &[]),
    spec(
        2,
        "Basic operations with index offset.",
        true,
        ConditionalKind::None,
        &[],
    ),
    spec(
        3,
        "Advanced operations.",
        false,
        ConditionalKind::None,
        &["sqrt", "abs", "cos", "pow"],
    ),
    spec(
        4,
        "Advanced operations with index offset.",
        true,
        ConditionalKind::None,
        &["sqrt", "abs", "cos", "pow"],
    ),
    spec(
        5,
        "Simple condition on index with basic operations.",
        false,
        ConditionalKind::Index,
        &[],
    ),
    spec(
        6,
        "Simple condition on random data with basic operations.",
        false,
        ConditionalKind::Data,
        &[],
    ),
    spec(
        7,
        "Simple condition on random data with sub-branches and basic operations.",
        false,
        ConditionalKind::NestedData,
        &[],
    ),
    spec(
        8,
        "Simple condition on random data with sub-branches and advanced operations.",
        false,
        ConditionalKind::NestedData,
        &["sqrt", "pow", "cos", "ceil"],
    ),
];

impl ScenarioSpec {
    pub fn catalogue() -> &'static [ScenarioSpec; 8] {
        &CATALOGUE
    }

    pub fn id(&self) -> ScenarioId {
        self.id
    }

    pub fn min_length(&self) -> usize {
        if self.uses_offsets {
            3
        } else {
            1
        }
    }

    pub fn check_length(&self, length: usize) -> Result<(), KernelError> {
        if length < self.min_length() {
            return Err(KernelError::TooShort {
                scenario: self.id.0,
                length,
                min: self.min_length(),
            });
        }
        Ok(())
    }

    /// Math functions this scenario's vector variant computes lane by lane
    /// on `backend` rather than with a vector instruction.
    pub fn emulated_ops(&self, backend: Backend) -> Vec<String> {
        self.math_ops
            .iter()
            .filter(|op| backend.emulates(op))
            .map(|op| op.to_string())
            .collect()
    }
}

fn check_inputs(
    spec: &ScenarioSpec,
    a: &[f32],
    b: &[f32],
    c: &[f32],
    out: &[f32],
) -> Result<(), KernelError> {
    let n = out.len();
    if a.len() != n || b.len() != n || c.len() != n {
        return Err(KernelError::LengthMismatch {
            inputs: a.len().min(b.len()).min(c.len()),
            output: n,
        });
    }
    spec.check_length(n)
}

/// Plain scalar variant; writes `data.d_plain`.
pub fn run_plain(spec: &ScenarioSpec, data: &mut WorkloadData) -> Result<(), KernelError> {
    let WorkloadData {
        a, b, c, d_plain, ..
    } = data;
    run_plain_slices(spec, a, b, c, d_plain)
}

/// Vector variant on the widest available backend; writes `data.d_vector`.
pub fn run_vector(spec: &ScenarioSpec, data: &mut WorkloadData) -> Result<(), KernelError> {
    run_vector_with(Backend::detect(), spec, data)
}

pub fn run_vector_with(
    backend: Backend,
    spec: &ScenarioSpec,
    data: &mut WorkloadData,
) -> Result<(), KernelError> {
    let WorkloadData {
        a, b, c, d_vector, ..
    } = data;
    run_vector_slices(backend, spec, a, b, c, d_vector)
}

/// Slice form of [`run_plain`]. Nothing is written on error.
pub fn run_plain_slices(
    spec: &ScenarioSpec,
    a: &[f32],
    b: &[f32],
    c: &[f32],
    out: &mut [f32],
) -> Result<(), KernelError> {
    check_inputs(spec, a, b, c, out)?;
    vector::plain_run(spec.id, a, b, c, out);
    Ok(())
}

/// Slice form of [`run_vector_with`]. Nothing is written on error.
pub fn run_vector_slices(
    backend: Backend,
    spec: &ScenarioSpec,
    a: &[f32],
    b: &[f32],
    c: &[f32],
    out: &mut [f32],
) -> Result<(), KernelError> {
    check_inputs(spec, a, b, c, out)?;
    if !backend.is_available() {
        return Err(KernelError::BackendUnavailable { backend });
    }
    vector::run(backend, spec.id, a, b, c, out);
    Ok(())
}
