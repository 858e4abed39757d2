//! Explicit 8-lane kernels.
//!
//! Each kernel body is written once in [`vector_kernels!`] against a small
//! register vocabulary (`V` for eight `f32` lanes, `M` for a lane mask) and
//! instantiated per backend:
//!
//! * `avx`: one `__m256` per vector, compiled with `avx` enabled and selected
//!   by runtime detection.
//! * `sse2`: a pair of `__m128`, the x86-64 baseline.
//! * `portable`: the plain arrays from [`super::lanes`].
//!
//! All kernels follow the same shape: unaligned load, compute, unaligned
//! store over full 8-lane blocks, then a scalar tail using the plain
//! element bodies. Branches become compare + blend with every branch
//! evaluated on every lane. `cos` and `pow` have no hardware instruction and
//! are applied lane by lane inside the vector loop.

use super::lanes::LANES;
use super::plain;
use super::ScenarioId;

#[inline(always)]
fn block(s: &[f32], at: usize) -> &[f32; LANES] {
    s[at..][..LANES].try_into().unwrap()
}

#[inline(always)]
fn block_mut(s: &mut [f32], at: usize) -> &mut [f32; LANES] {
    (&mut s[at..][..LANES]).try_into().unwrap()
}

macro_rules! vector_kernels {
    ($(#[$attr:meta])*) => {
        $(#[$attr])*
        pub(crate) fn scenario1(a: &[f32], b: &[f32], c: &[f32], d: &mut [f32]) {
            let n = d.len();
            let body = n - n % LANES;
            for i in (0..body).step_by(LANES) {
                let va = V::load(block(a, i));
                let vb = V::load(block(b, i));
                let vc = V::load(block(c, i));
                va.mul(vb).add(vc).store(block_mut(d, i));
            }
            for i in body..n {
                d[i] = plain::basic(a[i], b[i], c[i]);
            }
        }

        $(#[$attr])*
        pub(crate) fn scenario2(a: &[f32], b: &[f32], c: &[f32], d: &mut [f32]) {
            let n = d.len();
            let inner = n - 2;
            let full = inner - inner % LANES;
            for k in (0..full).step_by(LANES) {
                let i = k + 1;
                let a_prev = V::load(block(a, i - 1));
                let vb = V::load(block(b, i));
                let vc = V::load(block(c, i));
                let b_next = V::load(block(b, i + 1));
                a_prev.mul(vb).add(vc).add(b_next).store(block_mut(d, i));
            }
            for i in 1 + full..n - 1 {
                d[i] = plain::basic_offset(a[i - 1], b[i], c[i], b[i + 1]);
            }
            d[0] = 0.0;
            d[n - 1] = 0.0;
        }

        $(#[$attr])*
        pub(crate) fn scenario3(a: &[f32], b: &[f32], c: &[f32], d: &mut [f32]) {
            let n = d.len();
            let body = n - n % LANES;
            for i in (0..body).step_by(LANES) {
                let va = V::load(block(a, i));
                let vb = V::load(block(b, i));
                let vc = V::load(block(c, i));
                va.mul(vb.sqrt())
                    .add(vc.abs())
                    .sub(va.cos().div(vc))
                    .add(vb.powf(2.5))
                    .store(block_mut(d, i));
            }
            for i in body..n {
                d[i] = plain::advanced(a[i], b[i], c[i]);
            }
        }

        $(#[$attr])*
        pub(crate) fn scenario4(a: &[f32], b: &[f32], c: &[f32], d: &mut [f32]) {
            let n = d.len();
            let inner = n - 2;
            let full = inner - inner % LANES;
            for k in (0..full).step_by(LANES) {
                let i = k + 1;
                let a_prev = V::load(block(a, i - 1));
                let va = V::load(block(a, i));
                let vb = V::load(block(b, i));
                let vc = V::load(block(c, i));
                let b_next = V::load(block(b, i + 1));
                a_prev
                    .mul(vb.sqrt())
                    .add(vc.abs())
                    .sub(va.cos().div(vc))
                    .add(b_next.powf(2.5))
                    .store(block_mut(d, i));
            }
            for i in 1 + full..n - 1 {
                d[i] = plain::advanced_offset(a[i - 1], a[i], b[i], c[i], b[i + 1]);
            }
            d[0] = 0.0;
            d[n - 1] = 0.0;
        }

        $(#[$attr])*
        pub(crate) fn scenario5(a: &[f32], b: &[f32], out: &mut [f32]) {
            let n = out.len();
            let body = n - n % LANES;
            let even = M::even();
            for i in (0..body).step_by(LANES) {
                let va = V::load(block(a, i));
                let vb = V::load(block(b, i));
                V::select(even, va.add(vb), va.sub(vb)).store(block_mut(out, i));
            }
            for i in body..n {
                out[i] = plain::index_branch(i, a[i], b[i]);
            }
        }

        $(#[$attr])*
        pub(crate) fn scenario6(a: &[f32], b: &[f32], out: &mut [f32]) {
            let n = out.len();
            let body = n - n % LANES;
            let five = V::splat(5.0);
            for i in (0..body).step_by(LANES) {
                let va = V::load(block(a, i));
                let vb = V::load(block(b, i));
                let mask = va.gt(five);
                V::select(mask, va.add(vb), va.sub(vb)).store(block_mut(out, i));
            }
            for i in body..n {
                out[i] = plain::data_branch(a[i], b[i]);
            }
        }

        $(#[$attr])*
        pub(crate) fn scenario7(a: &[f32], b: &[f32], out: &mut [f32]) {
            let n = out.len();
            let body = n - n % LANES;
            let five = V::splat(5.0);
            let eight = V::splat(8.0);
            for i in (0..body).step_by(LANES) {
                let va = V::load(block(a, i));
                let vb = V::load(block(b, i));
                let outer = va.gt(five);
                let high = vb.ge(eight);
                let low = vb.le(five);
                let inner = V::select(high, va.mul(vb), V::select(low, va.div(vb), va.add(vb)));
                V::select(outer, inner, va.sub(vb)).store(block_mut(out, i));
            }
            for i in body..n {
                out[i] = plain::nested_basic(a[i], b[i]);
            }
        }

        $(#[$attr])*
        pub(crate) fn scenario8(a: &[f32], b: &[f32], out: &mut [f32]) {
            let n = out.len();
            let body = n - n % LANES;
            let five = V::splat(5.0);
            let eight = V::splat(8.0);
            for i in (0..body).step_by(LANES) {
                let va = V::load(block(a, i));
                let vb = V::load(block(b, i));
                let outer = va.gt(five);
                let high = vb.ge(eight);
                let low = vb.le(five);
                let inner = V::select(high, va.sqrt(), V::select(low, va.pow(vb), va.cos()));
                V::select(outer, inner, va.ceil()).store(block_mut(out, i));
            }
            for i in body..n {
                out[i] = plain::nested_advanced(a[i], b[i]);
            }
        }
    };
}

pub(crate) mod portable {
    use super::{block, block_mut, plain, LANES};
    use crate::kernels::lanes::{
        lanewise_transcendental, select_lanes, F32x8, Mask8, Transcendental,
    };

    #[derive(Clone, Copy)]
    pub(crate) struct V(pub(crate) F32x8);

    #[derive(Clone, Copy)]
    pub(crate) struct M(pub(crate) Mask8);

    impl M {
        #[inline(always)]
        pub(crate) fn even() -> M {
            M(Mask8::EVEN)
        }
    }

    impl V {
        #[inline(always)]
        pub(crate) fn load(src: &[f32; LANES]) -> V {
            V(F32x8::load(src))
        }
        #[inline(always)]
        pub(crate) fn store(self, dst: &mut [f32; LANES]) {
            self.0.store(dst)
        }
        #[inline(always)]
        pub(crate) fn splat(x: f32) -> V {
            V(F32x8::splat(x))
        }
        #[inline(always)]
        pub(crate) fn add(self, o: V) -> V {
            V(self.0 + o.0)
        }
        #[inline(always)]
        pub(crate) fn sub(self, o: V) -> V {
            V(self.0 - o.0)
        }
        #[inline(always)]
        pub(crate) fn mul(self, o: V) -> V {
            V(self.0 * o.0)
        }
        #[inline(always)]
        pub(crate) fn div(self, o: V) -> V {
            V(self.0 / o.0)
        }
        #[inline(always)]
        pub(crate) fn sqrt(self) -> V {
            V(lanewise_transcendental(Transcendental::Sqrt, self.0))
        }
        #[inline(always)]
        pub(crate) fn abs(self) -> V {
            V(lanewise_transcendental(Transcendental::Abs, self.0))
        }
        #[inline(always)]
        pub(crate) fn ceil(self) -> V {
            V(lanewise_transcendental(Transcendental::Ceil, self.0))
        }
        #[inline(always)]
        pub(crate) fn cos(self) -> V {
            V(lanewise_transcendental(Transcendental::Cos, self.0))
        }
        #[inline(always)]
        pub(crate) fn pow(self, e: V) -> V {
            V(lanewise_transcendental(Transcendental::Pow(e.0), self.0))
        }
        #[inline(always)]
        pub(crate) fn powf(self, e: f32) -> V {
            self.pow(V::splat(e))
        }
        #[inline(always)]
        pub(crate) fn gt(self, o: V) -> M {
            M(self.0.gt(o.0))
        }
        #[inline(always)]
        pub(crate) fn ge(self, o: V) -> M {
            M(self.0.ge(o.0))
        }
        #[inline(always)]
        pub(crate) fn le(self, o: V) -> M {
            M(self.0.le(o.0))
        }
        #[inline(always)]
        pub(crate) fn select(m: M, t: V, f: V) -> V {
            V(select_lanes(m.0, t.0, f.0))
        }
    }

    vector_kernels!();
}

#[cfg(target_arch = "x86_64")]
pub(crate) mod sse2 {
    use super::{block, block_mut, plain, LANES};
    use std::arch::x86_64::*;

    // SSE2 is part of the x86-64 baseline, so its intrinsics are always
    // available; they only need `unsafe` because they carry `#[target_feature]`.
    macro_rules! sse {
        ($e:expr) => {
            unsafe { $e }
        };
    }

    /// Eight lanes as a low / high pair of 128-bit registers.
    #[derive(Clone, Copy)]
    pub(crate) struct V(__m128, __m128);

    #[derive(Clone, Copy)]
    pub(crate) struct M(__m128, __m128);

    impl M {
        #[inline(always)]
        pub(crate) fn even() -> M {
            let half = sse!(_mm_castsi128_ps(_mm_setr_epi32(-1, 0, -1, 0)));
            M(half, half)
        }
    }

    impl V {
        #[inline(always)]
        pub(crate) fn load(src: &[f32; LANES]) -> V {
            // SAFETY: [f32; 8] and [__m128; 2] have the same size and every bit pattern is valid
            // for both. A by-value copy compiles to unaligned moves.
            let [lo, hi] = unsafe { std::mem::transmute::<[f32; LANES], [__m128; 2]>(*src) };
            V(lo, hi)
        }
        #[inline(always)]
        pub(crate) fn store(self, dst: &mut [f32; LANES]) {
            // SAFETY: as in `load`.
            *dst = unsafe { std::mem::transmute::<[__m128; 2], [f32; LANES]>([self.0, self.1]) };
        }
        #[inline(always)]
        fn to_array(self) -> [f32; LANES] {
            let mut out = [0.0; LANES];
            self.store(&mut out);
            out
        }
        #[inline(always)]
        pub(crate) fn splat(x: f32) -> V {
            sse!(V(_mm_set1_ps(x), _mm_set1_ps(x)))
        }
        #[inline(always)]
        pub(crate) fn add(self, o: V) -> V {
            sse!(V(_mm_add_ps(self.0, o.0), _mm_add_ps(self.1, o.1)))
        }
        #[inline(always)]
        pub(crate) fn sub(self, o: V) -> V {
            sse!(V(_mm_sub_ps(self.0, o.0), _mm_sub_ps(self.1, o.1)))
        }
        #[inline(always)]
        pub(crate) fn mul(self, o: V) -> V {
            sse!(V(_mm_mul_ps(self.0, o.0), _mm_mul_ps(self.1, o.1)))
        }
        #[inline(always)]
        pub(crate) fn div(self, o: V) -> V {
            sse!(V(_mm_div_ps(self.0, o.0), _mm_div_ps(self.1, o.1)))
        }
        #[inline(always)]
        pub(crate) fn sqrt(self) -> V {
            sse!(V(_mm_sqrt_ps(self.0), _mm_sqrt_ps(self.1)))
        }
        #[inline(always)]
        pub(crate) fn abs(self) -> V {
            let sign = sse!(_mm_set1_ps(-0.0));
            sse!(V(_mm_andnot_ps(sign, self.0), _mm_andnot_ps(sign, self.1)))
        }
        // no SSE2 rounding instruction; per lane
        #[inline(always)]
        pub(crate) fn ceil(self) -> V {
            V::load(&self.to_array().map(f32::ceil))
        }
        #[inline(always)]
        pub(crate) fn cos(self) -> V {
            V::load(&self.to_array().map(f32::cos))
        }
        #[inline(always)]
        pub(crate) fn pow(self, e: V) -> V {
            let (x, e) = (self.to_array(), e.to_array());
            V::load(&std::array::from_fn(|i| x[i].powf(e[i])))
        }
        #[inline(always)]
        pub(crate) fn powf(self, e: f32) -> V {
            V::load(&self.to_array().map(|x| x.powf(e)))
        }
        #[inline(always)]
        pub(crate) fn gt(self, o: V) -> M {
            sse!(M(_mm_cmpgt_ps(self.0, o.0), _mm_cmpgt_ps(self.1, o.1)))
        }
        #[inline(always)]
        pub(crate) fn ge(self, o: V) -> M {
            sse!(M(_mm_cmpge_ps(self.0, o.0), _mm_cmpge_ps(self.1, o.1)))
        }
        #[inline(always)]
        pub(crate) fn le(self, o: V) -> M {
            sse!(M(_mm_cmple_ps(self.0, o.0), _mm_cmple_ps(self.1, o.1)))
        }
        #[inline(always)]
        pub(crate) fn select(m: M, t: V, f: V) -> V {
            sse!(V(
                _mm_or_ps(_mm_and_ps(m.0, t.0), _mm_andnot_ps(m.0, f.0)),
                _mm_or_ps(_mm_and_ps(m.1, t.1), _mm_andnot_ps(m.1, f.1)),
            ))
        }
    }

    vector_kernels!();
}

#[cfg(target_arch = "x86_64")]
pub(crate) mod avx {
    use super::{block, block_mut, plain, LANES};
    use std::arch::x86_64::*;

    #[derive(Clone, Copy)]
    pub(crate) struct V(__m256);

    #[derive(Clone, Copy)]
    pub(crate) struct M(__m256);

    impl M {
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn even() -> M {
            M(_mm256_castsi256_ps(_mm256_setr_epi32(
                -1, 0, -1, 0, -1, 0, -1, 0,
            )))
        }
    }

    impl V {
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn load(src: &[f32; LANES]) -> V {
            // SAFETY: [f32; 8] and __m256 have the same size and every bit pattern is valid for
            // both. Unlike `_mm256_loadu_ps`, the by-value copy carries no pointer precondition
            // checks in builds with debug assertions.
            V(unsafe { std::mem::transmute::<[f32; LANES], __m256>(*src) })
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn store(self, dst: &mut [f32; LANES]) {
            // SAFETY: as in `load`.
            *dst = unsafe { std::mem::transmute::<__m256, [f32; LANES]>(self.0) };
        }
        #[inline]
        #[target_feature(enable = "avx")]
        fn to_array(self) -> [f32; LANES] {
            let mut out = [0.0; LANES];
            self.store(&mut out);
            out
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn splat(x: f32) -> V {
            V(_mm256_set1_ps(x))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn add(self, o: V) -> V {
            V(_mm256_add_ps(self.0, o.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn sub(self, o: V) -> V {
            V(_mm256_sub_ps(self.0, o.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn mul(self, o: V) -> V {
            V(_mm256_mul_ps(self.0, o.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn div(self, o: V) -> V {
            V(_mm256_div_ps(self.0, o.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn sqrt(self) -> V {
            V(_mm256_sqrt_ps(self.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn abs(self) -> V {
            V(_mm256_andnot_ps(_mm256_set1_ps(-0.0), self.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn ceil(self) -> V {
            V(_mm256_ceil_ps(self.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn cos(self) -> V {
            V::load(&self.to_array().map(f32::cos))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn pow(self, e: V) -> V {
            let (x, e) = (self.to_array(), e.to_array());
            V::load(&std::array::from_fn(|i| x[i].powf(e[i])))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn powf(self, e: f32) -> V {
            V::load(&self.to_array().map(|x| x.powf(e)))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn gt(self, o: V) -> M {
            M(_mm256_cmp_ps::<_CMP_GT_OS>(self.0, o.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn ge(self, o: V) -> M {
            M(_mm256_cmp_ps::<_CMP_GE_OS>(self.0, o.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn le(self, o: V) -> M {
            M(_mm256_cmp_ps::<_CMP_LE_OS>(self.0, o.0))
        }
        #[inline]
        #[target_feature(enable = "avx")]
        pub(crate) fn select(m: M, t: V, f: V) -> V {
            V(_mm256_blendv_ps(f.0, t.0, m.0))
        }
    }

    vector_kernels!(#[target_feature(enable = "avx")]);
}

/// Register implementation used by the vector variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// 256-bit AVX registers (x86-64, detected at run time).
    Avx,
    /// Two 128-bit SSE2 registers per vector (x86-64 baseline).
    Sse2,
    /// `[f32; 8]` arrays; the compiler chooses the instructions.
    Portable,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Avx, Backend::Sse2, Backend::Portable];

    /// Widest backend the running CPU supports.
    pub fn detect() -> Backend {
        Backend::ALL
            .into_iter()
            .find(|b| b.is_available())
            .unwrap_or(Backend::Portable)
    }

    pub fn is_available(self) -> bool {
        match self {
            #[cfg(target_arch = "x86_64")]
            Backend::Avx => std::arch::is_x86_feature_detected!("avx"),
            #[cfg(target_arch = "x86_64")]
            Backend::Sse2 => true,
            #[cfg(not(target_arch = "x86_64"))]
            Backend::Avx | Backend::Sse2 => false,
            Backend::Portable => true,
        }
    }

    pub fn available() -> Vec<Backend> {
        Backend::ALL
            .into_iter()
            .filter(|b| b.is_available())
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Avx => "avx",
            Backend::Sse2 => "sse2",
            Backend::Portable => "portable",
        }
    }

    /// Whether `op` is computed lane by lane in scalar code rather than by a
    /// single vector instruction on this backend.
    pub fn emulates(self, op: &str) -> bool {
        match self {
            Backend::Avx => matches!(op, "cos" | "pow"),
            Backend::Sse2 => matches!(op, "cos" | "pow" | "ceil"),
            Backend::Portable => true,
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Backend::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown backend '{s}' (expected avx, sse2 or portable)"))
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

macro_rules! dispatch {
    ($module:ident, $id:expr, $a:expr, $b:expr, $c:expr, $out:expr) => {
        match $id.get() {
            1 => $module::scenario1($a, $b, $c, $out),
            2 => $module::scenario2($a, $b, $c, $out),
            3 => $module::scenario3($a, $b, $c, $out),
            4 => $module::scenario4($a, $b, $c, $out),
            5 => $module::scenario5($a, $b, $out),
            6 => $module::scenario6($a, $b, $out),
            7 => $module::scenario7($a, $b, $out),
            8 => $module::scenario8($a, $b, $out),
            _ => unreachable!("scenario ids are validated on construction"),
        }
    };
}

/// Runs the vector kernel for `id`. Lengths are validated by the caller and
/// `backend` must be available.
pub(crate) fn run(
    backend: Backend,
    id: ScenarioId,
    a: &[f32],
    b: &[f32],
    c: &[f32],
    out: &mut [f32],
) {
    match backend {
        #[cfg(target_arch = "x86_64")]
        Backend::Avx => {
            assert!(backend.is_available(), "AVX is not supported by this CPU");
            // SAFETY: AVX support was checked at run time just above.
            unsafe { dispatch!(avx, id, a, b, c, out) }
        }
        #[cfg(target_arch = "x86_64")]
        Backend::Sse2 => dispatch!(sse2, id, a, b, c, out),
        #[cfg(not(target_arch = "x86_64"))]
        Backend::Avx | Backend::Sse2 => {
            panic!("{backend} backend is not available on this architecture")
        }
        Backend::Portable => dispatch!(portable, id, a, b, c, out),
    }
}

pub(crate) fn plain_run(id: ScenarioId, a: &[f32], b: &[f32], c: &[f32], out: &mut [f32]) {
    match id.get() {
        1 => plain::scenario1(a, b, c, out),
        2 => plain::scenario2(a, b, c, out),
        3 => plain::scenario3(a, b, c, out),
        4 => plain::scenario4(a, b, c, out),
        5 => plain::scenario5(a, b, out),
        6 => plain::scenario6(a, b, out),
        7 => plain::scenario7(a, b, out),
        8 => plain::scenario8(a, b, out),
        _ => unreachable!("scenario ids are validated on construction"),
    }
}
