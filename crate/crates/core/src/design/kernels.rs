// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form tone/mode integrals over `[0, τ]`.
//!
//! Every kernel is a finite sum of `∫e^{iat}` and ordered `∫e^{iat}∫e^{ibs}`
//! terms, so exact resonances need no special casing.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::numerics::{exp_integral, ordered_exp_integral};

/// Which sinusoid a tone contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quadrature {
    Sin,
    Cos,
}

impl Quadrature {
    /// Coefficients `(c₊, c₋)` of `e^{+iνt}` and `e^{−iνt}`.
    fn exponential_weights(self) -> [C64; 2] {
        match self {
            Quadrature::Sin => [C64::new(0.0, -0.5), C64::new(0.0, 0.5)],
            Quadrature::Cos => [C64::new(0.5, 0.0), C64::new(0.5, 0.0)],
        }
    }
}

/// `ν_k = 2πk/τ`, `k = 1..=K`.
pub fn tone_frequencies(tau: f64, harmonics: usize) -> Vec<f64> {
    (1..=harmonics)
        .map(|k| std::f64::consts::TAU * k as f64 / tau)
        .collect()
}

/// `∫₀^τ sin(νt) e^{iωt} dt`.
pub fn linear_sin(omega: f64, nu: f64, tau: f64) -> C64 {
    (exp_integral(omega + nu, tau) - exp_integral(omega - nu, tau)) / C64::new(0.0, 2.0)
}

/// `∫₀^τ cos(νt) e^{iωt} dt`.
pub fn linear_cos(omega: f64, nu: f64, tau: f64) -> C64 {
    0.5 * (exp_integral(omega + nu, tau) + exp_integral(omega - nu, tau))
}

pub fn linear(q: Quadrature, omega: f64, nu: f64, tau: f64) -> C64 {
    match q {
        Quadrature::Sin => linear_sin(omega, nu, tau),
        Quadrature::Cos => linear_cos(omega, nu, tau),
    }
}

/// `∫₀^τ x(ν_k t') ∫₀^{t'} y(ν_l t'') sin(ω(t'−t'')) dt'' dt'` for
/// `x, y ∈ {sin, cos}`.
pub fn phase_kernel(x: Quadrature, nu_k: f64, y: Quadrature, nu_l: f64, omega: f64, tau: f64) -> f64 {
    let cx = x.exponential_weights();
    let cy = y.exponential_weights();
    let signs = [1.0, -1.0];
    let mut acc = C64::new(0.0, 0.0);
    for (p, wx) in signs.iter().zip(cx) {
        for (q, wy) in signs.iter().zip(cy) {
            acc += wx * wy * ordered_exp_integral(p * nu_k + omega, q * nu_l - omega, tau);
        }
    }
    acc.im
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for k in 1..n {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn resonant_linear_entry() {
        let tau = 7.0;
        let nu = TAU * 3.0 / tau;
        let l = linear_sin(nu, nu, tau);
        assert!((l - C64::new(0.0, tau / 2.0)).norm() < 1e-13);
        let c = linear_cos(nu, nu, tau);
        assert!((c - C64::new(tau / 2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn linear_entries_match_simpson() {
        let (omega, nu, tau) = (1.37, 2.9, 5.3);
        let re = simpson(|t| (nu * t).sin() * (omega * t).cos(), 0.0, tau, 20_000);
        let im = simpson(|t| (nu * t).sin() * (omega * t).sin(), 0.0, tau, 20_000);
        assert!((linear_sin(omega, nu, tau) - C64::new(re, im)).norm() < 1e-12);
        let re = simpson(|t| (nu * t).cos() * (omega * t).cos(), 0.0, tau, 20_000);
        let im = simpson(|t| (nu * t).cos() * (omega * t).sin(), 0.0, tau, 20_000);
        assert!((linear_cos(omega, nu, tau) - C64::new(re, im)).norm() < 1e-12);
    }

    #[test]
    fn phase_kernel_matches_iterated_simpson() {
        let (omega, tau) = (1.0, 4.0);
        let (nk, nl) = (TAU / tau, 2.0 * TAU / tau);
        for (x, y) in [
            (Quadrature::Sin, Quadrature::Sin),
            (Quadrature::Sin, Quadrature::Cos),
            (Quadrature::Cos, Quadrature::Sin),
            (Quadrature::Cos, Quadrature::Cos),
        ] {
            let f = |q: Quadrature, t: f64| match q {
                Quadrature::Sin => t.sin(),
                Quadrature::Cos => t.cos(),
            };
            let outer = |tp: f64| {
                let inner = simpson(|s| f(y, nl * s) * (omega * (tp - s)).sin(), 0.0, tp, 400);
                f(x, nk * tp) * inner
            };
            let quad = simpson(outer, 0.0, tau, 400);
            let exact = phase_kernel(x, nk, y, nl, omega, tau);
            assert!((quad - exact).abs() < 1e-8, "{x:?}{y:?}: {quad} vs {exact}");
        }
    }

    #[test]
    fn tones_scale_with_duration() {
        let a = tone_frequencies(3.0, 4);
        let b = tone_frequencies(6.0, 8);
        for k in 0..4 {
            assert!((a[k] - b[2 * k + 1]).abs() < 1e-15);
        }
        assert!(tone_frequencies(3.0, 0).is_empty());
    }
}
