// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Cancellation-free building blocks for integrals of complex exponentials.

use num_complex::Complex64 as C64;

/// `sin(x)/x`, exact at the removable singularity.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `∫₀¹ e^{ixu} du = (e^{ix} − 1)/(ix)`, written so that no subtraction of
/// nearly equal numbers occurs for small `x`.
pub(crate) fn phase_mean(x: f64) -> C64 {
    let s = sinc(0.5 * x);
    C64::new(sinc(x), 0.5 * x * s * s)
}

/// `∫₀ᵗ e^{i a s} ds`.
pub(crate) fn exp_integral(a: f64, t: f64) -> C64 {
    t * phase_mean(a * t)
}

/// Ordered double integral `∫₀ᵀ e^{i a t} ∫₀ᵗ e^{i b s} ds dt`.
///
/// The divided difference is always taken with respect to the larger of the
/// two (scaled) frequencies; when both are small a double power series is
/// used instead.
pub(crate) fn ordered_exp_integral(a: f64, b: f64, t_end: f64) -> C64 {
    let x = a * t_end;
    let y = b * t_end;
    if x.abs().max(y.abs()) < 0.5 {
        return t_end * t_end * ordered_series(x, y);
    }
    let i = C64::i();
    if b.abs() >= a.abs() {
        (exp_integral(a + b, t_end) - exp_integral(a, t_end)) / (i * b)
    } else {
        exp_integral(a, t_end) * exp_integral(b, t_end)
            - (exp_integral(a + b, t_end) - exp_integral(b, t_end)) / (i * a)
    }
}

/// `Σ_{m,n} (ix)^m (iy)^n / (m! n! (n+1) (m+n+2))`.
fn ordered_series(x: f64, y: f64) -> C64 {
    const TERMS: usize = 24;
    let i = C64::i();
    let mut xs = [C64::new(0.0, 0.0); TERMS];
    let mut ys = [C64::new(0.0, 0.0); TERMS];
    xs[0] = C64::new(1.0, 0.0);
    ys[0] = C64::new(1.0, 0.0);
    for k in 1..TERMS {
        xs[k] = xs[k - 1] * i * x / k as f64;
        ys[k] = ys[k - 1] * i * y / k as f64;
    }
    let mut acc = C64::new(0.0, 0.0);
    for (m, xm) in xs.iter().enumerate() {
        for (n, yn) in ys.iter().enumerate() {
            acc += xm * yn / (((n + 1) * (m + n + 2)) as f64);
        }
    }
    acc
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
