// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Magnus quantities by direct numerical quadrature.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, nested, QuadratureOptions};
use crate::chain::ModeData;
use crate::design::{tone_frequencies, MagnusQuantities, ModulationScheme};
use crate::error::{Error, Result};

/// Sampled phase-space path of one mode; `mode` is 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub mode: usize,
    pub phi0: f64,
    pub times_s: Vec<f64>,
    pub alpha: Vec<C64>,
}

impl Trajectory {
    pub fn endpoint(&self) -> C64 {
        self.alpha.last().copied().unwrap_or_default()
    }
}

/// Per-ion drive `f_i(t) = Σ_k a_k sin ν_k t + c_k cos ν_k t` (units of `ω_z`).
#[derive(Debug, Clone)]
pub(crate) struct Drive {
    pub tones: Vec<f64>,
    pub sin: Vec<Vec<f64>>,
    pub cos: Vec<Vec<f64>>,
}

impl Drive {
    pub fn new(scheme: &ModulationScheme, phi0: f64) -> Self {
        let (sin, cos) = scheme.tone_coefficients(phi0);
        Drive {
            tones: tone_frequencies(scheme.tau(), scheme.harmonics),
            sin,
            cos,
        }
    }

    pub fn eval(&self, ion: usize, t: f64) -> f64 {
        let mut s = 0.0;
        for (k, nu) in self.tones.iter().enumerate() {
            let (sn, cs) = (nu * t).sin_cos();
            s += self.sin[ion][k] * sn + self.cos[ion][k] * cs;
        }
        s
    }

    pub fn is_zero(&self, ion: usize) -> bool {
        self.sin[ion].iter().chain(&self.cos[ion]).all(|v| *v == 0.0)
    }
}

fn quad_options(scheme: &ModulationScheme, modes: &ModeData) -> QuadratureOptions {
    let fastest = scheme.harmonics as f64 * std::f64::consts::TAU / scheme.tau() + modes.max_frequency();
    let periods = (fastest * scheme.tau() / std::f64::consts::TAU).ceil() as usize;
    // Thousands of panels put the summed round-off floor near 1e-13.
    QuadratureOptions {
        abs_tol: 1e-12,
        initial_panels: (2 * periods).max(4),
        ..Default::default()
    }
}

fn validate(scheme: &ModulationScheme, modes: &ModeData) -> Result<()> {
    scheme.validate()?;
    scheme.check_modes(modes)
}

/// `β_{i,m}(τ) = η_{i,m} ∫₀^τ f_i e^{iω_m t}` by adaptive quadrature and
/// `Θ_{i,j}(τ) = Σ_m η_{i,m}η_{j,m} [Q(f_i,f_j) + Q(f_j,f_i)]` by nested quadrature.
pub fn magnus_evaluate(scheme: &ModulationScheme, modes: &ModeData, phi0: f64) -> Result<MagnusQuantities> {
    validate(scheme, modes)?;
    let n = scheme.n_ions();
    let m_count = modes.n_modes();
    let tau = scheme.tau();
    let drive = Drive::new(scheme, phi0);
    let opts = quad_options(scheme, modes);
    let eta = &modes.lamb_dicke;

    let mut beta = DMatrix::from_element(n, m_count, C64::new(0.0, 0.0));
    for i in 0..n {
        if drive.is_zero(i) {
            continue;
        }
        for m in 0..m_count {
            if eta[(i, m)] == 0.0 {
                continue;
            }
            let w = modes.frequencies[m];
            let r = integrate(|t| C64::from_polar(drive.eval(i, t), w * t), 0.0, tau, &opts)?;
            beta[(i, m)] = r.value * eta[(i, m)];
        }
    }

    let mut theta = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            if drive.is_zero(i) || drive.is_zero(j) {
                continue;
            }
            let mut acc = 0.0;
            for m in 0..m_count {
                let weight = eta[(i, m)] * eta[(j, m)];
                if weight == 0.0 {
                    continue;
                }
                let w = modes.frequencies[m];
                let q = |a: usize, b: usize| -> Result<f64> {
                    let v = nested(
                        |t| C64::from_polar(drive.eval(a, t), w * t),
                        |t| C64::from_polar(drive.eval(b, t), -w * t),
                        tau,
                        opts.initial_panels,
                        &opts,
                    )?;
                    Ok(v.im)
                };
                let pair = if i == j { 2.0 * q(i, i)? } else { q(i, j)? + q(j, i)? };
                acc += weight * pair;
            }
            theta[(i, j)] = acc;
            theta[(j, i)] = acc;
        }
    }
    Ok(MagnusQuantities { beta, theta })
}

/// `β_{i,m}(t_j)` on `n_samples` uniform points over `[0, τ]` (endpoints included).
pub fn partial_displacements(
    scheme: &ModulationScheme,
    modes: &ModeData,
    phi0: f64,
    n_samples: usize,
) -> Result<Vec<DMatrix<C64>>> {
    validate(scheme, modes)?;
    if n_samples < 2 {
        return Err(Error::invalid("need at least two trajectory samples"));
    }
    let n = scheme.n_ions();
    let m_count = modes.n_modes();
    let tau = scheme.tau();
    let drive = Drive::new(scheme, phi0);
    let h = tau / (n_samples - 1) as f64;
    let opts = QuadratureOptions::default();
    let mut out = vec![DMatrix::from_element(n, m_count, C64::new(0.0, 0.0)); n_samples];
    for i in 0..n {
        if drive.is_zero(i) {
            continue;
        }
        for m in 0..m_count {
            let e = modes.lamb_dicke[(i, m)];
            if e == 0.0 {
                continue;
            }
            let w = modes.frequencies[m];
            let mut acc = C64::new(0.0, 0.0);
            for (j, slot) in out.iter_mut().enumerate().skip(1) {
                let lo = (j - 1) as f64 * h;
                let hi = if j + 1 == n_samples { tau } else { j as f64 * h };
                acc += integrate(|t| C64::from_polar(drive.eval(i, t), w * t), lo, hi, &opts)?.value;
                slot[(i, m)] = acc * e;
            }
        }
    }
    Ok(out)
}

/// Mode trajectories `α_m(t) = Σ_i b_{i,m} β_{i,m}(t)`; for global schemes
/// this is `η_m Ω ∫₀ᵗ f e^{iω_m t'}`.
pub fn trajectory_sample(
    scheme: &ModulationScheme,
    modes: &ModeData,
    phi0: f64,
    n_samples: usize,
) -> Result<Vec<Trajectory>> {
    let partial = partial_displacements(scheme, modes, phi0, n_samples)?;
    let tau_s = scheme.tau_s;
    let times_s: Vec<f64> = (0..n_samples)
        .map(|j| {
            if j + 1 == n_samples {
                tau_s
            } else {
                tau_s * j as f64 / (n_samples - 1) as f64
            }
        })
        .collect();
    Ok((0..modes.n_modes())
        .map(|m| Trajectory {
            mode: m,
            phi0,
            times_s: times_s.clone(),
            alpha: partial
                .iter()
                .map(|beta| scheme.mode_displacements(beta, modes)[m])
                .collect(),
        })
        .collect())
}

/// Fock dimension per mode: `n_max = ⌈4·max_t (Σ_i |β_{i,m}(t)|)² + 10⌉`,
/// returned as `n_max + 1` levels.
pub fn auto_cutoffs(scheme: &ModulationScheme, modes: &ModeData, phi0: f64) -> Result<Vec<usize>> {
    let samples = (8 * scheme.harmonics + 4 * (modes.max_frequency() * scheme.tau()).ceil() as usize).max(64);
    let partial = partial_displacements(scheme, modes, phi0, samples)?;
    Ok((0..modes.n_modes())
        .map(|m| {
            let peak = partial
                .iter()
                .map(|b| (0..scheme.n_ions()).map(|i| b[(i, m)].norm()).sum::<f64>())
                .fold(0.0, f64::max);
            (4.0 * peak * peak + 10.0).ceil() as usize + 1
        })
        .collect())
}
