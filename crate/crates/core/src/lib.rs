//! Scalar versus explicit 8-lane vector benchmark harness.
//!
//! Eight loop kernels, from plain arithmetic to nested data-dependent
//! branches, are implemented twice: once as straightforward scalar loops and
//! once with explicit 256-bit (8 x `f32`) vector operations using the
//! load / compute / store pattern, with compare-and-blend in place of
//! branches and a scalar tail loop for the remainder.
//!
//! The harness times both variants alternately, checks their outputs agree,
//! and reduces the samples to mean / standard deviation pairs and the
//! execution-time ratio `tau = T_vector / T_plain` with its propagated
//! uncertainty.
//!
//! Module map:
//!
//! * [`datagen`]: seeded input arrays in `[1, 10]`.
//! * [`kernels`]: scenario catalogue, plain and vector variants, lane API.
//! * [`stats`]: sample summaries and the ratio statistic.
//! * [`harness`]: verification and the interleaved / blocked measurement loop.
//! * [`configmeta`]: host and toolchain description.
//! * [`advisor`]: toolchain and intrinsics-usage recommendation.
//! * [`report`]: versioned JSON report and CSV export.
//! * [`cli`]: the `vecbench` command line.

pub mod advisor;
pub mod cli;
pub mod configmeta;
pub mod datagen;
pub mod harness;
pub mod kernels;
pub mod report;
pub mod stats;
