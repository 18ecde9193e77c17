// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form single-mode spin-dependent-force primitives.
//!
//! Two phase conventions coexist:
//!
//! - the two-ion phase `θ` of [`two_ion_geometric_phase`] enters as
//!   `U = exp(−iθ/2 σσ)`, so a maximally entangling gate has `θ = π/2`;
//! - the multichromatic per-mode phase `Θ` enters as `U = exp(+iΘ σσ)`, where
//!   the maximally entangling gate has `|Θ| = π/4`.
//!
//! [`theta_to_coupling`] converts between them.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::phase_mean;
use crate::simulator::hamiltonian::{Coefficient, Mat2, Motion, Term};

/// Below this value of `|δ|·t` the resonant limit is used.
pub const RESONANT_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceBasis {
    /// `σ^{φ_S}`, the Mølmer–Sørensen family.
    SigmaPhi,
    /// `σ_z`, the light-shift family.
    SigmaZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonochromaticDrive {
    pub rabi: f64,
    pub lamb_dicke: f64,
    pub detuning: f64,
    pub motional_phase: f64,
    pub spin_phase: f64,
    pub basis: ForceBasis,
}

fn reduce_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl MonochromaticDrive {
    pub fn new(
        rabi: f64,
        lamb_dicke: f64,
        detuning: f64,
        motional_phase: f64,
        spin_phase: f64,
        basis: ForceBasis,
    ) -> Result<Self> {
        if !(lamb_dicke >= 0.0) || !lamb_dicke.is_finite() {
            return Err(Error::invalid("Lamb-Dicke parameter must be non-negative"));
        }
        if !rabi.is_finite() || !detuning.is_finite() {
            return Err(Error::invalid("Rabi frequency and detuning must be finite"));
        }
        Ok(MonochromaticDrive {
            rabi,
            lamb_dicke,
            detuning,
            motional_phase: reduce_phase(motional_phase),
            spin_phase: reduce_phase(spin_phase),
            basis,
        })
    }

    /// Force amplitude `γ(t) = (Ωη/2) e^{iφ_m} e^{−iδt}`.
    pub fn force(&self, t: f64) -> C64 {
        0.5 * self.rabi * self.lamb_dicke * C64::from_polar(1.0, self.motional_phase - self.detuning * t)
    }

    pub fn spin_operator(&self) -> Mat2 {
        match self.basis {
            ForceBasis::SigmaPhi => Mat2::sigma_phi(self.spin_phase),
            ForceBasis::SigmaZ => Mat2::SIGMA_Z,
        }
    }
}

/// `α(t) = −i∫₀ᵗ γ = (Ωη e^{iφ_m}/2δ)(e^{−iδt} − 1)`, continuous through `δ = 0`.
pub fn sdf_displacement(drive: &MonochromaticDrive, t: f64) -> C64 {
    let pre = 0.5 * drive.rabi * drive.lamb_dicke * C64::from_polar(1.0, drive.motional_phase);
    let x = drive.detuning * t;
    let shape = if x.abs() < RESONANT_THRESHOLD {
        C64::new(1.0, 0.0)
    } else {
        phase_mean(-x)
    };
    pre * C64::new(0.0, -t) * shape
}

/// Single-ion geometric phase `Φ(t) = Im ∫₀ᵗ α* dα = −(Ω²η²/4δ²)(δt − sin δt)`.
pub fn single_ion_geometric_phase(drive: &MonochromaticDrive, t: f64) -> f64 {
    let g = 0.5 * drive.rabi * drive.lamb_dicke;
    let x = drive.detuning * t;
    if x.abs() < RESONANT_THRESHOLD {
        return 0.0;
    }
    -g * g * t * t * cycloid(x)
}

/// `(x − sin x)/x²`, accurate near zero.
fn cycloid(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        x / 6.0 - x * x2 / 120.0 + x * x2 * x2 / 5040.0
    } else {
        (x - x.sin()) / (x * x)
    }
}

/// `θ(t) = η₁η₂Ω²(t/δ − sin(δt)/δ²)`.
pub fn two_ion_geometric_phase(rabi: f64, eta1: f64, eta2: f64, detuning: f64, t: f64) -> Result<f64> {
    if detuning == 0.0 {
        return Err(Error::domain(
            "two-ion phase is undefined at zero detuning; use the resonant displacement",
        ));
    }
    Ok(eta1 * eta2 * rabi * rabi * t * t * cycloid(detuning * t))
}

/// Detuning and Rabi frequency that close `loops` phase-space circles in `tau`
/// while accumulating the two-ion phase `target_phase`.
pub fn ms_gate_params(tau: f64, eta1: f64, eta2: f64, loops: u32, target_phase: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::invalid("gate duration must be positive"));
    }
    if loops == 0 {
        return Err(Error::invalid("loop count must be at least 1"));
    }
    if !(eta1 * eta2 > 0.0) {
        return Err(Error::domain("η₁η₂ must be positive"));
    }
    if !(target_phase >= 0.0) {
        return Err(Error::domain("target phase must be non-negative"));
    }
    let n = loops as f64;
    let delta = TAU * n / tau;
    let rabi = delta * (target_phase / (TAU * n * eta1 * eta2)).sqrt();
    Ok((delta, rabi))
}

/// Multichromatic coupling `J` equivalent to a two-ion phase `θ`.
pub fn theta_to_coupling(theta: f64) -> f64 {
    -0.5 * theta
}

/// `θ` equivalent to a multichromatic coupling `J`.
pub fn coupling_to_theta(j: f64) -> f64 {
    -2.0 * j
}

/// Phase of the maximally entangling monochromatic gate.
pub const MAXIMALLY_ENTANGLING_THETA: f64 = PI / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SidebandKind {
    Carrier,
    Red,
    Blue,
}

/// Interaction-picture term for one transition on ion 0 and mode 0.
///
/// - carrier: `(Ω/2) e^{iφ} σ⁺ + h.c.`
/// - blue: `i(ηΩ/2) e^{iφ} e^{−iδt} σ⁺a† + h.c.`
/// - red: `i(ηΩ/2) e^{iφ} e^{+iδt} σ⁺a + h.c.`
pub fn sideband_terms(kind: SidebandKind, rabi: f64, eta: f64, detuning: f64, phase: f64) -> Term {
    let phase_factor = C64::from_polar(1.0, phase);
    let (motion, coeff) = match kind {
        SidebandKind::Carrier => (Motion::Identity, Coefficient::Constant(0.5 * rabi * phase_factor)),
        SidebandKind::Blue => (
            Motion::Raise(0),
            Coefficient::Rotating {
                amp: C64::i() * 0.5 * eta * rabi * phase_factor,
                freq: -detuning,
            },
        ),
        SidebandKind::Red => (
            Motion::Lower(0),
            Coefficient::Rotating {
                amp: C64::i() * 0.5 * eta * rabi * phase_factor,
                freq: detuning,
            },
        ),
    };
    Term {
        ion: 0,
        spin: Mat2::SIGMA_PLUS,
        motion,
        coeff,
    }
}

impl Term {
    /// Same term acting on another ion and mode.
    pub fn relabel(mut self, ion: usize, mode: usize) -> Term {
        self.ion = ion;
        self.motion = match self.motion {
            Motion::Identity => Motion::Identity,
            Motion::Lower(_) => Motion::Lower(mode),
            Motion::Raise(_) => Motion::Raise(mode),
        };
        self
    }
}
