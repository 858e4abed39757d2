//! Portable 8-lane `f32` values and the lane operations the vector kernels
//! are written in: compare, select (blend) and per-lane math.
//!
//! These are plain arrays. The native backends in [`super::vector`] provide
//! the same operations on machine registers and are checked against this
//! module lane by lane.

use std::ops::{Add, BitAnd, Div, Mul, Not, Sub};

/// Number of `f32` lanes in a 256-bit register: `256 / (8 * 4)`.
pub const LANES: usize = 256 / (8 * std::mem::size_of::<f32>());

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct F32x8(pub [f32; LANES]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Mask8(pub [bool; LANES]);

impl F32x8 {
    #[inline]
    pub fn splat(x: f32) -> Self {
        F32x8([x; LANES])
    }

    #[inline]
    pub fn load(src: &[f32; LANES]) -> Self {
        F32x8(*src)
    }

    #[inline]
    pub fn store(self, dst: &mut [f32; LANES]) {
        *dst = self.0;
    }

    #[inline]
    pub fn to_array(self) -> [f32; LANES] {
        self.0
    }

    #[inline]
    pub fn map(self, f: impl Fn(f32) -> f32) -> Self {
        F32x8(self.0.map(f))
    }

    #[inline]
    pub fn zip_map(self, other: Self, f: impl Fn(f32, f32) -> f32) -> Self {
        let mut out = [0.0; LANES];
        for (o, (x, y)) in out.iter_mut().zip(self.0.into_iter().zip(other.0)) {
            *o = f(x, y);
        }
        F32x8(out)
    }

    #[inline]
    fn compare(self, other: Self, f: impl Fn(f32, f32) -> bool) -> Mask8 {
        let mut out = [false; LANES];
        for (o, (x, y)) in out.iter_mut().zip(self.0.into_iter().zip(other.0)) {
            *o = f(x, y);
        }
        Mask8(out)
    }

    /// Ordered `>`: NaN lanes compare false.
    #[inline]
    pub fn gt(self, other: Self) -> Mask8 {
        self.compare(other, |x, y| x > y)
    }

    #[inline]
    pub fn ge(self, other: Self) -> Mask8 {
        self.compare(other, |x, y| x >= y)
    }

    #[inline]
    pub fn le(self, other: Self) -> Mask8 {
        self.compare(other, |x, y| x <= y)
    }
}

impl Add for F32x8 {
    type Output = F32x8;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        self.zip_map(rhs, |x, y| x + y)
    }
}

impl Sub for F32x8 {
    type Output = F32x8;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self.zip_map(rhs, |x, y| x - y)
    }
}

impl Mul for F32x8 {
    type Output = F32x8;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        self.zip_map(rhs, |x, y| x * y)
    }
}

impl Div for F32x8 {
    type Output = F32x8;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        self.zip_map(rhs, |x, y| x / y)
    }
}

impl Mask8 {
    pub const ALL: Mask8 = Mask8([true; LANES]);
    pub const NONE: Mask8 = Mask8([false; LANES]);
    /// `true` on even lanes. Vector blocks start at multiples of 8, so lane
    /// parity equals element-index parity.
    pub const EVEN: Mask8 = Mask8([true, false, true, false, true, false, true, false]);

    #[inline]
    pub fn and_not(self, other: Mask8) -> Mask8 {
        self & !other
    }

    pub fn count(self) -> usize {
        self.0.iter().filter(|&&m| m).count()
    }
}

impl BitAnd for Mask8 {
    type Output = Mask8;
    #[inline]
    fn bitand(self, rhs: Self) -> Mask8 {
        let mut out = [false; LANES];
        for (o, (x, y)) in out.iter_mut().zip(self.0.into_iter().zip(rhs.0)) {
            *o = x && y;
        }
        Mask8(out)
    }
}

impl Not for Mask8 {
    type Output = Mask8;
    #[inline]
    fn not(self) -> Mask8 {
        Mask8(self.0.map(|m| !m))
    }
}

/// Per-lane blend: `mask[i] ? if_true[i] : if_false[i]`.
#[inline]
pub fn select_lanes(mask: Mask8, if_true: F32x8, if_false: F32x8) -> F32x8 {
    let mut out = if_false.0;
    for ((o, m), t) in out.iter_mut().zip(mask.0).zip(if_true.0) {
        if m {
            *o = t;
        }
    }
    F32x8(out)
}

/// Ordered greater-than against a broadcast scalar.
#[inline]
pub fn compare_gt(a: F32x8, threshold: f32) -> Mask8 {
    a.gt(F32x8::splat(threshold))
}

/// Math operations the kernels apply lane by lane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transcendental {
    Sqrt,
    Abs,
    Cos,
    Ceil,
    /// Raise each lane to the matching exponent lane.
    Pow(F32x8),
}

impl Transcendental {
    pub fn name(&self) -> &'static str {
        match self {
            Transcendental::Sqrt => "sqrt",
            Transcendental::Abs => "abs",
            Transcendental::Cos => "cos",
            Transcendental::Ceil => "ceil",
            Transcendental::Pow(_) => "pow",
        }
    }
}

pub fn lanewise_transcendental(op: Transcendental, x: F32x8) -> F32x8 {
    match op {
        Transcendental::Sqrt => x.map(f32::sqrt),
        Transcendental::Abs => x.map(f32::abs),
        Transcendental::Cos => x.map(f32::cos),
        Transcendental::Ceil => x.map(f32::ceil),
        Transcendental::Pow(e) => x.zip_map(e, f32::powf),
    }
}

/// The four routing masks of the nested conditional
/// `a > 5 { b >= 8 | b <= 5 | otherwise } else`, in that order.
///
/// For finite inputs every lane is set in exactly one mask.
pub fn nested_branch_masks(a: F32x8, b: F32x8) -> [Mask8; 4] {
    let outer = compare_gt(a, 5.0);
    let high = b.ge(F32x8::splat(8.0));
    let low = b.le(F32x8::splat(5.0));
    let inner_high = outer & high;
    let inner_low = outer.and_not(high) & low;
    let inner_mid = outer.and_not(high).and_not(low);
    [inner_high, inner_low, inner_mid, !outer]
}
