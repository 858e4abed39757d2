//! Scalar loops. The per-element bodies are shared with the vector tail
//! loops so both variants run identical code on remainder elements.
//!
//! Multiply and add are kept as separate operations (no `mul_add`), which
//! matches the vector kernels and makes the arithmetic scenarios
//! bit-comparable.

#[inline(always)]
pub(crate) fn basic(a: f32, b: f32, c: f32) -> f32 {
    a * b + c
}

#[inline(always)]
pub(crate) fn basic_offset(a_prev: f32, b: f32, c: f32, b_next: f32) -> f32 {
    a_prev * b + c + b_next
}

#[inline(always)]
pub(crate) fn advanced(a: f32, b: f32, c: f32) -> f32 {
    a * b.sqrt() + c.abs() - a.cos() / c + b.powf(2.5)
}

#[inline(always)]
pub(crate) fn advanced_offset(a_prev: f32, a: f32, b: f32, c: f32, b_next: f32) -> f32 {
    a_prev * b.sqrt() + c.abs() - a.cos() / c + b_next.powf(2.5)
}

#[inline(always)]
pub(crate) fn index_branch(i: usize, a: f32, b: f32) -> f32 {
    if i.is_multiple_of(2) {
        a + b
    } else {
        a - b
    }
}

#[inline(always)]
pub(crate) fn data_branch(a: f32, b: f32) -> f32 {
    if a > 5.0 {
        a + b
    } else {
        a - b
    }
}

#[inline(always)]
pub(crate) fn nested_basic(a: f32, b: f32) -> f32 {
    if a > 5.0 {
        if b >= 8.0 {
            a * b
        } else if b <= 5.0 {
            a / b
        } else {
            a + b
        }
    } else {
        a - b
    }
}

#[inline(always)]
pub(crate) fn nested_advanced(a: f32, b: f32) -> f32 {
    if a > 5.0 {
        if b >= 8.0 {
            a.sqrt()
        } else if b <= 5.0 {
            a.powf(b)
        } else {
            a.cos()
        }
    } else {
        a.ceil()
    }
}

// Callers guarantee equal slice lengths (and >= 3 for the offset loops).

pub(crate) fn scenario1(a: &[f32], b: &[f32], c: &[f32], d: &mut [f32]) {
    let n = d.len();
    let (a, b, c) = (&a[..n], &b[..n], &c[..n]);
    for i in 0..n {
        d[i] = basic(a[i], b[i], c[i]);
    }
}

pub(crate) fn scenario2(a: &[f32], b: &[f32], c: &[f32], d: &mut [f32]) {
    let n = d.len();
    let (a, b, c) = (&a[..n], &b[..n], &c[..n]);
    for i in 1..n - 1 {
        d[i] = basic_offset(a[i - 1], b[i], c[i], b[i + 1]);
    }
    d[0] = 0.0;
    d[n - 1] = 0.0;
}

pub(crate) fn scenario3(a: &[f32], b: &[f32], c: &[f32], d: &mut [f32]) {
    let n = d.len();
    let (a, b, c) = (&a[..n], &b[..n], &c[..n]);
    for i in 0..n {
        d[i] = advanced(a[i], b[i], c[i]);
    }
}

pub(crate) fn scenario4(a: &[f32], b: &[f32], c: &[f32], d: &mut [f32]) {
    let n = d.len();
    let (a, b, c) = (&a[..n], &b[..n], &c[..n]);
    for i in 1..n - 1 {
        d[i] = advanced_offset(a[i - 1], a[i], b[i], c[i], b[i + 1]);
    }
    d[0] = 0.0;
    d[n - 1] = 0.0;
}

pub(crate) fn scenario5(a: &[f32], b: &[f32], out: &mut [f32]) {
    let n = out.len();
    let (a, b) = (&a[..n], &b[..n]);
    for i in 0..n {
        out[i] = index_branch(i, a[i], b[i]);
    }
}

pub(crate) fn scenario6(a: &[f32], b: &[f32], out: &mut [f32]) {
    let n = out.len();
    let (a, b) = (&a[..n], &b[..n]);
    for i in 0..n {
        out[i] = data_branch(a[i], b[i]);
    }
}

pub(crate) fn scenario7(a: &[f32], b: &[f32], out: &mut [f32]) {
    let n = out.len();
    let (a, b) = (&a[..n], &b[..n]);
    for i in 0..n {
        out[i] = nested_basic(a[i], b[i]);
    }
}

pub(crate) fn scenario8(a: &[f32], b: &[f32], out: &mut [f32]) {
    let n = out.len();
    let (a, b) = (&a[..n], &b[..n]);
    for i in 0..n {
        out[i] = nested_advanced(a[i], b[i]);
    }
}
