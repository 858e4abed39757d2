//! Acceptance suite. Runs as a plain binary (`harness = false`) so that each
//! criterion prints exactly one PASS/FAIL line regardless of capture settings.

use std::cell::Cell;
use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::rc::Rc;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use vecbench::advisor::{self, DeviceClass, IntrinsicsPolicy, Toolchain};
use vecbench::cli;
use vecbench::configmeta::{Architecture, ConfigMetadata, OptLevel, OsFamily, Probed};
use vecbench::datagen::{self, GeneratorInfo};
use vecbench::harness::{
    self, compare_outputs, Checksums, Clock, HarnessError, MonotonicClock, RawSamples,
    ScenarioResult, SchedulingScheme, SchemeKind, Verification, Workload,
};
use vecbench::kernels::{self, Backend, ScenarioId, Variant};
use vecbench::report::{self, FailureRecord, Report, TABLE_HEADER};
use vecbench::stats::{self, RunStats, TimingSample};

type Outcome = Result<String, String>;

/// Name, whether the outcome is asserted, and the check itself.
type Criterion = (&'static str, bool, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

const LENGTHS: [usize; 7] = [1, 7, 8, 9, 64, 1000, 12345];
const SEEDS: [u64; 5] = [1, 2, 3, 0xDEAD_BEEF, datagen::DEFAULT_SEED];

/// Per-element scalar reference, written from the kernel definitions and
/// independent of the crate's own loops.
fn reference(id: u8, a: &[f32], b: &[f32], c: &[f32]) -> Vec<f32> {
    let n = a.len();
    let mut d = vec![f32::NAN; n];
    match id {
        1 => (0..n).for_each(|i| d[i] = a[i] * b[i] + c[i]),
        2 => {
            for i in 1..n - 1 {
                d[i] = a[i - 1] * b[i] + c[i] + b[i + 1];
            }
            d[0] = 0.0;
            d[n - 1] = 0.0;
        }
        3 => (0..n).for_each(|i| {
            d[i] = a[i] * b[i].sqrt() + c[i].abs() - a[i].cos() / c[i] + b[i].powf(2.5)
        }),
        4 => {
            for i in 1..n - 1 {
                d[i] = a[i - 1] * b[i].sqrt() + c[i].abs() - a[i].cos() / c[i] + b[i + 1].powf(2.5);
            }
            d[0] = 0.0;
            d[n - 1] = 0.0;
        }
        5 => (0..n).for_each(|i| {
            d[i] = if i.is_multiple_of(2) {
                a[i] + b[i]
            } else {
                a[i] - b[i]
            }
        }),
        6 => (0..n).for_each(|i| d[i] = if a[i] > 5.0 { a[i] + b[i] } else { a[i] - b[i] }),
        7 => (0..n).for_each(|i| {
            d[i] = if a[i] > 5.0 {
                if b[i] >= 8.0 {
                    a[i] * b[i]
                } else if b[i] <= 5.0 {
                    a[i] / b[i]
                } else {
                    a[i] + b[i]
                }
            } else {
                a[i] - b[i]
            }
        }),
        8 => (0..n).for_each(|i| {
            d[i] = if a[i] > 5.0 {
                if b[i] >= 8.0 {
                    a[i].sqrt()
                } else if b[i] <= 5.0 {
                    a[i].powf(b[i])
                } else {
                    a[i].cos()
                }
            } else {
                a[i].ceil()
            }
        }),
        _ => unreachable!(),
    }
    d
}

fn bits_equal(x: &[f32], y: &[f32]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits())
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let backends = Backend::available();
    let mut checks = 0usize;
    let mut worst_rel = 0.0f64;
    for id in ScenarioId::all() {
        let spec = id.spec();
        let exact = !spec.uses_transcendentals;
        let tol = if exact { 0.0 } else { 1e-5 };
        for &n in &LENGTHS {
            if n < spec.min_length() {
                ensure!(
                    datagen::generate(n, 1)
                        .map(|mut d| kernels::run_plain(spec, &mut d).is_err())
                        .unwrap_or(false),
                    "scenario {id} accepted length {n}"
                );
                continue;
            }
            for &seed in &SEEDS {
                let mut data = datagen::generate(n, seed).map_err(|e| e.to_string())?;
                data.fill_outputs(f32::NAN);
                kernels::run_plain(spec, &mut data).map_err(|e| e.to_string())?;
                let expected = reference(id.get(), &data.a, &data.b, &data.c);
                ensure!(
                    bits_equal(&data.d_plain, &expected),
                    "scenario {id} plain differs from reference at n={n} seed={seed}"
                );
                for &backend in &backends {
                    data.d_vector.fill(f32::NAN);
                    kernels::run_vector_with(backend, spec, &mut data)
                        .map_err(|e| e.to_string())?;
                    let v = compare_outputs(&data.d_plain, &data.d_vector, tol)
                        .map_err(|e| e.to_string())?;
                    ensure!(v.passed, "scenario {id} [{backend}] n={n} seed={seed}: {v}");
                    if exact {
                        ensure!(
                            bits_equal(&data.d_plain, &data.d_vector),
                            "scenario {id} [{backend}] not bit-exact at n={n} seed={seed}"
                        );
                    }
                    worst_rel = worst_rel.max(v.max_rel_diff);
                    checks += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!(
        "{checks} comparisons over {} backend(s), max relative difference {worst_rel:e}, {:.2} s",
        backends.len(),
        elapsed.as_secs_f64()
    ))
}

fn boundary_zeroing() -> Outcome {
    let mut checked = 0;
    for id in [2u8, 4] {
        let spec = ScenarioId::new(id).unwrap().spec();
        for &n in LENGTHS.iter().chain(&[3, 5]) {
            if n < 3 {
                continue;
            }
            for &seed in &SEEDS {
                let mut data = datagen::generate(n, seed).map_err(|e| e.to_string())?;
                data.fill_outputs(f32::NAN);
                kernels::run_plain(spec, &mut data).map_err(|e| e.to_string())?;
                for backend in Backend::available() {
                    data.d_vector.fill(f32::NAN);
                    kernels::run_vector_with(backend, spec, &mut data)
                        .map_err(|e| e.to_string())?;
                    for out in [&data.d_plain, &data.d_vector] {
                        for idx in [0, n - 1] {
                            ensure!(
                                out[idx].to_bits() == 0.0f32.to_bits(),
                                "scenario {id} [{backend}] n={n}: index {idx} holds {}",
                                out[idx]
                            );
                        }
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} runs, both ends exactly +0.0"))
}

fn rel(x: f64, y: f64) -> f64 {
    if x == y {
        0.0
    } else {
        (x - y).abs() / x.abs().max(y.abs())
    }
}

fn statistics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x57A7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let len = 2 + (rng.next_u32() % 199) as usize;
        let scale = 1u64 << (rng.next_u32() % 30);
        let ns: Vec<u64> = (0..len)
            .map(|_| 1 + rng.next_u64() % (scale * 1000))
            .collect();
        let samples: Vec<TimingSample> = ns
            .iter()
            .map(|&n| TimingSample::from_nanos(n).unwrap())
            .collect();
        let s = stats::summarise(&samples).map_err(|e| e.to_string())?;
        // two-pass brute force
        let mean = ns.iter().map(|&n| n as f64).sum::<f64>() / len as f64;
        let var = ns.iter().map(|&n| (n as f64 - mean).powi(2)).sum::<f64>() / (len - 1) as f64;
        ensure!(s.count == len, "count {} != {len}", s.count);
        worst = worst
            .max(rel(s.mean_ns, mean))
            .max(rel(s.std_dev_ns, var.sqrt()));
    }
    ensure!(
        worst <= 1e-12,
        "summarise deviates from oracle by {worst:e}"
    );

    let r = stats::ratio(
        &RunStats {
            mean_ns: 33.3,
            std_dev_ns: 0.5,
            count: 50,
        },
        &RunStats {
            mean_ns: 221.4,
            std_dev_ns: 0.6,
            count: 50,
        },
    )
    .map_err(|e| e.to_string())?;
    let (tau_pct, sigma_pct) = r.percent();
    ensure!(
        (r.tau - 0.150_406_504_065_040_65).abs() < 1e-12,
        "tau {}",
        r.tau
    );
    ensure!(format!("{tau_pct:.1}") == "15.0", "tau percent {tau_pct}");
    ensure!(
        format!("{sigma_pct:.1}") == "0.2",
        "sigma percent {sigma_pct}"
    );

    let mut worst_scale = 0.0f64;
    for _ in 0..100 {
        let mut draw =
            |lo: f64, hi: f64| lo + (hi - lo) * (rng.next_u64() as f64 / u64::MAX as f64);
        let v = RunStats {
            mean_ns: draw(1.0, 1e9),
            std_dev_ns: draw(0.0, 1e7),
            count: 50,
        };
        let p = RunStats {
            mean_ns: draw(1.0, 1e9),
            std_dev_ns: draw(0.0, 1e7),
            count: 50,
        };
        let k = 10f64.powf(draw(-3.0, 3.0));
        let scaled = |s: &RunStats| RunStats {
            mean_ns: s.mean_ns * k,
            std_dev_ns: s.std_dev_ns * k,
            count: s.count,
        };
        let a = stats::ratio(&v, &p).map_err(|e| e.to_string())?;
        let b = stats::ratio(&scaled(&v), &scaled(&p)).map_err(|e| e.to_string())?;
        worst_scale = worst_scale
            .max(rel(a.tau, b.tau))
            .max(rel(a.sigma_tau, b.sigma_tau));
    }
    ensure!(
        worst_scale <= 1e-12,
        "scale invariance violated by {worst_scale:e}"
    );
    Ok(format!(
        "summarise max rel err {worst:e}; tau = {tau_pct:.1} +/- {sigma_pct:.1} %; scale invariance max rel err {worst_scale:e}"
    ))
}

fn protocol_constants() -> Outcome {
    let d = cli::defaults();
    ensure!(d.length == 50_000_000, "default length {}", d.length);
    ensure!(d.repeats == 50, "default repeats {}", d.repeats);
    ensure!(
        d.lanes == 8 && kernels::LANES == 256 / (8 * 4),
        "lane width {}",
        d.lanes
    );
    ensure!(d.scheme == SchemeKind::Interleaved, "scheme {}", d.scheme);
    ensure!(
        d.pair_order == [Variant::Plain, Variant::Vector],
        "pair order {:?}",
        d.pair_order
    );

    let order = SchedulingScheme::default().order();
    ensure!(
        order.len() == 100,
        "default scheme has {} executions",
        order.len()
    );
    ensure!(
        order
            .chunks(2)
            .all(|p| p == [Variant::Plain, Variant::Vector]),
        "default order is not plain-first pairs"
    );

    let cli::Command::Run(args) = <cli::Cli as clap::Parser>::try_parse_from(["vecbench", "run"])
        .map_err(|e| e.to_string())?
        .command
    else {
        return Err("run did not parse".into());
    };
    ensure!(
        args.length == d.length && args.repeats == d.repeats,
        "run flag defaults disagree"
    );
    ensure!(
        args.scheme == SchemeKind::Interleaved,
        "run flag scheme {}",
        args.scheme
    );
    Ok("length 5e7, repeats 50, 8 lanes, interleaved plain-first".into())
}

/// Workload whose executions spin for a fixed wall-clock duration, and whose
/// verification and checksum steps sleep so any leak into the timed region
/// would show up in the means.
struct FakeKernels {
    plain: Duration,
    vector: Duration,
    side_cost: Duration,
    passes: bool,
    log: Vec<&'static str>,
}

fn spin(d: Duration) {
    let start = Instant::now();
    while start.elapsed() < d {
        std::hint::spin_loop();
    }
}

impl Workload for FakeKernels {
    fn execute(&mut self, variant: Variant) {
        self.log.push(variant.name());
        spin(match variant {
            Variant::Plain => self.plain,
            Variant::Vector => self.vector,
        });
    }
    fn verify(&mut self) -> Result<Verification, HarnessError> {
        self.log.push("verify");
        std::thread::sleep(self.side_cost);
        let vector = if self.passes { 1.0 } else { 2.0 };
        compare_outputs(&[1.0], &[vector], 0.0)
    }
    fn checksum(&self, _variant: Variant) -> f64 {
        std::thread::sleep(self.side_cost);
        0.0
    }
}

/// Clock shared with [`SteppedKernels`], advanced only by the workload.
#[derive(Clone, Default)]
struct ManualClock(Rc<Cell<u64>>);

impl Clock for ManualClock {
    fn now_ns(&mut self) -> u64 {
        self.0.get()
    }
    fn resolution_ns(&mut self) -> u64 {
        1
    }
}

struct SteppedKernels {
    clock: ManualClock,
    plain: u64,
    vector: u64,
    side_cost: u64,
}

impl Workload for SteppedKernels {
    fn execute(&mut self, variant: Variant) {
        let cost = match variant {
            Variant::Plain => self.plain,
            Variant::Vector => self.vector,
        };
        self.clock.0.set(self.clock.0.get() + cost);
    }
    fn verify(&mut self) -> Result<Verification, HarnessError> {
        self.clock.0.set(self.clock.0.get() + self.side_cost);
        compare_outputs(&[1.0], &[1.0], 0.0)
    }
    fn checksum(&self, _variant: Variant) -> f64 {
        self.clock.0.set(self.clock.0.get() + self.side_cost);
        0.0
    }
}

fn timing_integrity() -> Outcome {
    let mut summary = Vec::new();
    for kind in [SchemeKind::Interleaved, SchemeKind::Blocked] {
        // injected clock: exact accounting
        let clock = ManualClock::default();
        let mut w = SteppedKernels {
            clock: clock.clone(),
            plain: 7_919,
            vector: 1_013,
            side_cost: 1_000_000,
        };
        let m = harness::measure(
            &mut w,
            SchedulingScheme::new(kind, 50),
            &mut clock.clone(),
            1,
        )
        .map_err(|e| e.to_string())?;
        let p = stats::summarise(&m.plain).map_err(|e| e.to_string())?;
        let v = stats::summarise(&m.vector).map_err(|e| e.to_string())?;
        ensure!(
            p.mean_ns == 7_919.0
                && v.mean_ns == 1_013.0
                && p.std_dev_ns == 0.0
                && v.std_dev_ns == 0.0,
            "{kind}: injected clock gave {p:?} / {v:?}"
        );

        // wall clock: spinning kernels, sleeping verification and checksum.
        // Durations are long relative to hypervisor scheduling slices, which
        // would otherwise dominate the error on shared virtual CPUs.
        let mut w = FakeKernels {
            plain: Duration::from_millis(100),
            vector: Duration::from_millis(25),
            side_cost: Duration::from_millis(5),
            passes: true,
            log: Vec::new(),
        };
        let m = harness::measure(
            &mut w,
            SchedulingScheme::new(kind, 12),
            &mut MonotonicClock::default(),
            1,
        )
        .map_err(|e| e.to_string())?;
        let p = stats::summarise(&m.plain).map_err(|e| e.to_string())?;
        let v = stats::summarise(&m.vector).map_err(|e| e.to_string())?;
        let r = stats::ratio(&v, &p).map_err(|e| e.to_string())?;
        ensure!(
            rel(p.mean_ns, 100e6) <= 0.05,
            "{kind}: plain mean {} ns vs 100e6",
            p.mean_ns
        );
        ensure!(
            rel(v.mean_ns, 25e6) <= 0.05,
            "{kind}: vector mean {} ns vs 25e6",
            v.mean_ns
        );
        ensure!(rel(r.tau, 0.25) <= 0.05, "{kind}: tau {}", r.tau);
        summary.push(format!(
            "{kind} {:.3}/{:.3} ms",
            p.mean_ns / 1e6,
            v.mean_ns / 1e6
        ));
    }

    // failing verification must stop before any timed execution
    let mut rng = ChaCha8Rng::seed_from_u64(0xAB0A7);
    for _ in 0..50 {
        let kind = if rng.next_u32().is_multiple_of(2) {
            SchemeKind::Interleaved
        } else {
            SchemeKind::Blocked
        };
        let repeats = 2 + (rng.next_u32() % 100) as usize;
        let mut w = FakeKernels {
            plain: Duration::ZERO,
            vector: Duration::ZERO,
            side_cost: Duration::ZERO,
            passes: false,
            log: Vec::new(),
        };
        let mut clock = CountingClock(0);
        let r = harness::measure(&mut w, SchedulingScheme::new(kind, repeats), &mut clock, 3);
        ensure!(
            matches!(r, Err(HarnessError::VerificationFailed { scenario: 3, .. })),
            "failed verification did not abort"
        );
        ensure!(
            w.log.last() == Some(&"verify"),
            "executions after failed verification: {:?}",
            w.log
        );
        ensure!(
            clock.0 == 0,
            "clock read {} times after failed verification",
            clock.0
        );
    }
    Ok(format!(
        "injected clock exact; wall clock {}; failed verification aborts (50 randomized schemes)",
        summary.join(", ")
    ))
}

struct CountingClock(usize);

impl Clock for CountingClock {
    fn now_ns(&mut self) -> u64 {
        self.0 += 1;
        self.0 as u64
    }
    fn resolution_ns(&mut self) -> u64 {
        1
    }
}

fn set(ts: &[Toolchain]) -> BTreeSet<Toolchain> {
    ts.iter().copied().collect()
}

fn advisor_paths() -> Outcome {
    use DeviceClass::*;
    use IntrinsicsPolicy as P;
    use Toolchain::*;
    let paths: [(DeviceClass, &[Toolchain], Option<Toolchain>, P); 10] = [
        (WindowsX86_64, &[Icc, Msvc, Gcc], Some(Icc), P::None),
        (WindowsX86_64, &[Msvc, Gcc], Some(Msvc), P::WhereverNeeded),
        (WindowsX86_64, &[Gcc], Some(Gcc), P::ConditionBranchesOnly),
        (WindowsX86_64, &[Clang], None, P::Unknown),
        (LinuxX86_64, &[Gcc, Clang], Some(Gcc), P::None),
        (LinuxX86_64, &[Icc, Msvc, Clang], None, P::Unknown),
        (MacosArm64, &[Clang, Gcc], Some(Clang), P::None),
        (MacosArm64, &[Gcc], Some(Gcc), P::ConditionBranchesOnly),
        (MacosArm64, &[Icc, Msvc], None, P::Unknown),
        (Other, &[Icc, Msvc, Gcc, Clang], None, P::Unknown),
    ];
    for (device, avail, toolchain, policy) in paths {
        let r = advisor::advise(device, &set(avail));
        ensure!(
            r.toolchain == toolchain && r.intrinsics_policy == policy,
            "{device} with {avail:?}: got {:?}/{:?}",
            r.toolchain,
            r.intrinsics_policy
        );
    }
    let texts = [
        (
            WindowsX86_64,
            &[Icc, Msvc][..],
            "Use ICC, without intrinsic.",
        ),
        (LinuxX86_64, &[Gcc][..], "Use GCC, without intrinsic."),
        (Other, &[][..], "unknown"),
    ];
    for (device, avail, text) in texts {
        let got = advisor::advise(device, &set(avail)).node_text();
        ensure!(
            got == text,
            "{device}: node text '{got}', expected '{text}'"
        );
    }

    // monotonicity: the pick is always the highest-priority available
    // toolchain, and adding a toolchain can only keep it or move it up
    let mut subsets = 0;
    for device in DeviceClass::ALL {
        let rank = |t: Toolchain| device.priority().iter().position(|&p| p == t);
        for bits in 0u32..16 {
            let avail: BTreeSet<_> = Toolchain::ALL
                .iter()
                .enumerate()
                .filter(|(k, _)| bits & (1 << k) != 0)
                .map(|(_, &t)| t)
                .collect();
            let r = advisor::advise(device, &avail);
            let best = device
                .priority()
                .iter()
                .copied()
                .find(|t| avail.contains(t));
            ensure!(
                r.toolchain == best,
                "{device} {avail:?}: picked {:?}, best {best:?}",
                r.toolchain
            );
            for extra in Toolchain::ALL {
                if avail.contains(&extra) {
                    continue;
                }
                let mut bigger = avail.clone();
                bigger.insert(extra);
                let r2 = advisor::advise(device, &bigger);
                let ok = match (r.toolchain, r2.toolchain) {
                    (a, b) if a == b => true,
                    (None, Some(b)) => b == extra,
                    (Some(a), Some(b)) => b == extra && rank(b) < rank(a),
                    _ => false,
                };
                ensure!(
                    ok,
                    "{device}: adding {extra} to {avail:?} moved {:?} -> {:?}",
                    r.toolchain,
                    r2.toolchain
                );
            }
            subsets += 1;
        }
    }
    Ok(format!(
        "10 paths, 3 node texts, {subsets} availability subsets"
    ))
}

fn random_string(rng: &mut ChaCha8Rng) -> String {
    const POOL: &[&str] = &[
        "a", "Z", "9", " ", "\"", "\\", ",", "\n", "é", "ß", "✓", "-", "_", "/",
    ];
    let len = rng.next_u32() % 12;
    (0..len)
        .map(|_| POOL[rng.next_u32() as usize % POOL.len()])
        .collect()
}

fn random_f64(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let x = f64::from_bits(rng.next_u64());
        if x.is_finite() {
            return x.abs();
        }
    }
}

fn random_report(rng: &mut ChaCha8Rng) -> Report {
    let os = [
        OsFamily::Linux,
        OsFamily::Macos,
        OsFamily::Windows,
        OsFamily::Other,
    ][rng.next_u32() as usize % 4];
    let arch = [
        Architecture::X86_64,
        Architecture::Arm64,
        Architecture::Other,
    ][rng.next_u32() as usize % 3];
    let opt = match rng.next_u32() % 5 {
        0 => OptLevel::O0,
        1 => OptLevel::O1,
        2 => OptLevel::O2,
        3 => OptLevel::O3,
        _ => OptLevel::Other(format!("s{}", rng.next_u32() % 10)),
    };
    let probe = |rng: &mut ChaCha8Rng| {
        if rng.next_u32().is_multiple_of(3) {
            Probed::Unknown
        } else {
            Probed::Known(1 + rng.next_u64() % (1 << 40))
        }
    };
    let cores = probe(rng);
    let memory = probe(rng);
    let toolchain = ["gcc", "clang", "msvc", "icc", "rustc"][rng.next_u32() as usize % 5];
    let config = ConfigMetadata::new(
        os,
        random_string(rng),
        arch,
        random_string(rng),
        cores,
        memory,
        toolchain,
        random_string(rng),
        opt,
    );
    let seed = rng.next_u64();
    let mut report = Report::new(config, GeneratorInfo::new(seed));
    let count = 1 + rng.next_u32() % 8;
    let ids: BTreeSet<u8> = (0..count).map(|_| 1 + (rng.next_u32() % 8) as u8).collect();
    for id in ids {
        let repeats = 2 + (rng.next_u32() % 20) as usize;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<TimingSample> {
            (0..repeats)
                .map(|_| TimingSample::from_nanos(1 + rng.next_u64() % 1_000_000_000_000).unwrap())
                .collect()
        };
        let plain = draw(rng);
        let vector = draw(rng);
        let plain_stats = stats::summarise(&plain).unwrap();
        let vector_stats = stats::summarise(&vector).unwrap();
        let values: Vec<f32> = (0..4).map(|_| rng.next_u32() as f32 / 7.0).collect();
        let kind = if rng.next_u32().is_multiple_of(2) {
            SchemeKind::Interleaved
        } else {
            SchemeKind::Blocked
        };
        report.results.push(ScenarioResult {
            scenario_id: ScenarioId::new(id).unwrap(),
            length: 1 + (rng.next_u64() % 100_000_000) as usize,
            seed: rng.next_u64(),
            scheme: SchedulingScheme::new(kind, repeats),
            backend: ["avx", "sse2", "portable"][rng.next_u32() as usize % 3].into(),
            emulated_ops: (0..rng.next_u32() % 3)
                .map(|_| random_string(rng))
                .collect(),
            sequence_emulated: rng.next_u32().is_multiple_of(2),
            plain_stats,
            vector_stats,
            ratio: stats::ratio(&vector_stats, &plain_stats).unwrap(),
            verification: compare_outputs(&values, &values, 1e-5).unwrap(),
            raw_samples: RawSamples { plain, vector },
            checksums: Checksums {
                plain: random_f64(rng),
                vector: -random_f64(rng),
            },
            warnings: (0..rng.next_u32() % 2)
                .map(|_| random_string(rng))
                .collect(),
        });
    }
    if rng.next_u32().is_multiple_of(4) {
        let bad = compare_outputs(&[1.0, f32::INFINITY, 3.0], &[1.0, 2.0, f32::NAN], 0.0).unwrap();
        report.failure = Some(FailureRecord {
            scenario_id: ScenarioId::new(1 + (rng.next_u32() % 8) as u8).unwrap(),
            message: random_string(rng),
            verification: bad,
        });
    }
    report
}

/// Structural equality, with the failure record's floats compared by bit
/// pattern and every NaN treated as equal to every other NaN.
fn same_report(x: &Report, y: &Report) -> bool {
    let key = |v: f64| {
        if v.is_nan() {
            f64::NAN.to_bits()
        } else {
            v.to_bits()
        }
    };
    let strip = |r: &Report| Report {
        failure: None,
        ..r.clone()
    };
    let bits = |r: &Report| {
        r.failure.as_ref().map(|f| {
            let v = &f.verification;
            (
                f.scenario_id,
                f.message.clone(),
                key(v.tolerance),
                key(v.max_abs_diff),
                key(v.max_rel_diff),
                v.worst_index,
                v.worst_plain.map(key),
                v.worst_vector.map(key),
                v.mismatches,
                v.passed,
            )
        })
    };
    strip(x) == strip(y) && bits(x) == bits(y)
}

fn report_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2E9_0A7);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rows_total = 0;
    for k in 0..200 {
        let r = random_report(&mut rng);
        let text = r.to_json().map_err(|e| e.to_string())?;
        let back = Report::from_json(&text).map_err(|e| format!("report {k}: {e}"))?;
        ensure!(
            same_report(&back, &r),
            "report {k} differs after JSON round trip"
        );

        let path = dir.path().join(format!("r{k}.json"));
        r.write_json(&path).map_err(|e| e.to_string())?;
        let from_disk = Report::read_json(&path).map_err(|e| e.to_string())?;
        ensure!(
            same_report(&from_disk, &r),
            "report {k} differs after file round trip"
        );

        let mut csv = Vec::new();
        r.write_table(&mut csv).map_err(|e| e.to_string())?;
        let csv_text = String::from_utf8(csv).map_err(|e| e.to_string())?;
        let header = csv_text.lines().next().unwrap_or_default();
        ensure!(header == TABLE_HEADER.join(","), "header '{header}'");
        ensure!(
            TABLE_HEADER
                == [
                    "config_name",
                    "opt_level",
                    "scenario",
                    "variant",
                    "mean_ns",
                    "std_ns",
                    "tau",
                    "sigma_tau"
                ],
            "column contract changed"
        );
        let rows = report::read_table(csv_text.as_bytes()).map_err(|e| e.to_string())?;
        ensure!(
            rows.len() == 2 * r.results.len(),
            "{} rows for {} results",
            rows.len(),
            r.results.len()
        );
        for (res, pair) in r.results.iter().zip(rows.chunks(2)) {
            for (row, (variant, s)) in pair.iter().zip([
                (Variant::Plain, &res.plain_stats),
                (Variant::Vector, &res.vector_stats),
            ]) {
                ensure!(
                    row.config_name == r.config.config_name
                        && row.opt_level == r.config.opt_level.to_string()
                        && row.scenario == res.scenario_id
                        && row.variant == variant
                        && row.mean_ns == s.mean_ns
                        && row.std_ns == s.std_dev_ns
                        && row.tau == res.ratio.tau
                        && row.sigma_tau == res.ratio.sigma_tau,
                    "report {k}: row {row:?} does not mirror scenario {}",
                    res.scenario_id
                );
            }
        }
        let keys: BTreeSet<_> = rows
            .iter()
            .map(|r| (r.scenario, r.variant.name()))
            .collect();
        ensure!(
            keys.len() == rows.len(),
            "duplicate (scenario, variant) rows"
        );
        rows_total += rows.len();
    }
    Ok(format!("200 randomized reports, {rows_total} table rows"))
}

fn informational_scenario6() -> Outcome {
    let length = 200_000;
    let options = harness::RunOptions {
        length,
        scheme: SchedulingScheme::default(),
        ..Default::default()
    };
    let spec = ScenarioId::new(6).unwrap().spec();
    let r = harness::run_scenario(spec, &options).map_err(|e| e.to_string())?;
    let (tau, sigma) = r.ratio.percent();
    Ok(format!(
        "scenario 6 on {} at length {length}, 50 interleaved repeats, opt-level {}: tau = {tau:.1} +/- {sigma:.1} %",
        r.backend,
        OptLevel::build_default()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", true, oracle_equivalence),
        ("boundary zeroing", true, boundary_zeroing),
        ("statistics", true, statistics),
        ("protocol constants", true, protocol_constants),
        ("harness timing integrity", true, timing_integrity),
        ("advisor", true, advisor_paths),
        ("report round-trip", true, report_round_trip),
        (
            "informational: scenario 6 ratio",
            false,
            informational_scenario6,
        ),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, asserted, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match (outcome, asserted) {
            (Ok(detail), true) => println!("PASS  {name}: {detail}"),
            (Ok(detail), false) => println!("INFO  {name}: {detail}"),
            (Err(why), true) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
            (Err(why), false) => println!("INFO  {name}: not recorded ({why})"),
        }
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
