// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::constraints::ConstraintSystem;
use crate::chain::ModeData;
use crate::error::{Error, Result};
use crate::numerics::norm;

/// Spin operator of the force, `σ^α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinBasis {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlMode {
    Global,
    Individual,
}

/// A synthesised modulation: per ion `f_i(t) = Ω_i Σ_k r_{i,k} sin(ν_k t − φ_{i,k} + φ₀)`.
///
/// Stored in SI units so that files round-trip exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulationScheme {
    pub tau_s: f64,
    #[serde(rename = "K")]
    pub harmonics: usize,
    pub basis: SpinBasis,
    pub robust: bool,
    pub control: ControlMode,
    /// `ω_z` the scheme was designed against.
    pub trap_freq_rad_s: f64,
    /// One unit vector per ion.
    #[serde(rename = "r")]
    pub amplitudes: Vec<Vec<f64>>,
    #[serde(rename = "Omega_rad_s")]
    pub rabi_rad_s: Vec<f64>,
    #[serde(rename = "phases")]
    pub tone_phases: Vec<Vec<f64>>,
    pub drive_phase: f64,
}

/// Magnus quantities at the end of a gate: `β[i,m]` and symmetric `Θ[i,j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnusQuantities {
    pub beta: DMatrix<C64>,
    pub theta: DMatrix<f64>,
}

impl MagnusQuantities {
    pub fn max_beta(&self) -> f64 {
        self.beta.iter().fold(0.0, |m, b| m.max(b.norm()))
    }
}

impl ModulationScheme {
    pub fn n_ions(&self) -> usize {
        self.amplitudes.len()
    }

    /// Duration in units of `1/ω_z`.
    pub fn tau(&self) -> f64 {
        self.tau_s * self.trap_freq_rad_s
    }

    /// Rabi frequencies in units of `ω_z`.
    pub fn rabi(&self) -> Vec<f64> {
        self.rabi_rad_s.iter().map(|o| o / self.trap_freq_rad_s).collect()
    }

    pub fn max_rabi_over_trapfreq(&self) -> f64 {
        self.rabi().iter().fold(0.0, |m, o| m.max(o.abs()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_s > 0.0) || !self.tau_s.is_finite() {
            return Err(Error::invalid("tau_s must be positive"));
        }
        if !(self.trap_freq_rad_s > 0.0) {
            return Err(Error::invalid("trap_freq_rad_s must be positive"));
        }
        if self.harmonics == 0 {
            return Err(Error::invalid("K must be at least 1"));
        }
        let n = self.n_ions();
        if n == 0 {
            return Err(Error::invalid("scheme has no ions"));
        }
        for (what, len) in [
            ("Omega_rad_s", self.rabi_rad_s.len()),
            ("phases", self.tone_phases.len()),
        ] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    what: if what == "phases" {
                        "tone phase rows"
                    } else {
                        "Rabi frequencies"
                    },
                    expected: n,
                    found: len,
                });
            }
        }
        for i in 0..n {
            if self.amplitudes[i].len() != self.harmonics {
                return Err(Error::DimensionMismatch {
                    what: "amplitude entries",
                    expected: self.harmonics,
                    found: self.amplitudes[i].len(),
                });
            }
            if self.tone_phases[i].len() != self.harmonics {
                return Err(Error::DimensionMismatch {
                    what: "tone phase entries",
                    expected: self.harmonics,
                    found: self.tone_phases[i].len(),
                });
            }
            let r = norm(&self.amplitudes[i]);
            if (r - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!(
                    "amplitude vector of ion {} has norm {r}",
                    i + 1
                )));
            }
            if !self.rabi_rad_s[i].is_finite() {
                return Err(Error::invalid("non-finite Rabi frequency"));
            }
        }
        Ok(())
    }

    /// Dimensionless sine/cosine coefficients of `f_i` at drive phase `phi0`:
    /// `f_i = Σ_k a_{ik} sin ν_k t + c_{ik} cos ν_k t`.
    pub fn tone_coefficients(&self, phi0: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let rabi = self.rabi();
        let mut a = Vec::with_capacity(self.n_ions());
        let mut c = Vec::with_capacity(self.n_ions());
        for ((amps, phases), omega) in self.amplitudes.iter().zip(&self.tone_phases).zip(&rabi) {
            let (ai, ci): (Vec<f64>, Vec<f64>) = amps
                .iter()
                .zip(phases)
                .map(|(r, phi)| {
                    let (s, cs) = (phi0 - phi).sin_cos();
                    (omega * r * cs, omega * r * s)
                })
                .unzip();
            a.push(ai);
            c.push(ci);
        }
        (a, c)
    }

    pub fn check_modes(&self, modes: &ModeData) -> Result<()> {
        if modes.n_ions() != self.n_ions() {
            return Err(Error::DimensionMismatch {
                what: "ions in scheme versus chain",
                expected: modes.n_ions(),
                found: self.n_ions(),
            });
        }
        let rel = (modes.trap_freq - self.trap_freq_rad_s).abs() / self.trap_freq_rad_s;
        if rel > 1e-12 {
            return Err(Error::invalid(format!(
                "scheme was designed for ω_z = {} rad/s but the chain has {}",
                self.trap_freq_rad_s, modes.trap_freq
            )));
        }
        Ok(())
    }

    pub fn constraint_system(&self, modes: &ModeData) -> Result<ConstraintSystem> {
        ConstraintSystem::build(modes, self.tau(), self.harmonics, self.robust)
    }

    /// Closed-form `β(τ)` and `Θ(τ)` at drive phase `phi0`.
    pub fn closed_form(&self, modes: &ModeData, phi0: f64) -> Result<MagnusQuantities> {
        self.validate()?;
        self.check_modes(modes)?;
        let system = self.constraint_system(modes)?;
        Ok(self.closed_form_with(&system, modes, phi0))
    }

    pub fn closed_form_with(&self, system: &ConstraintSystem, modes: &ModeData, phi0: f64) -> MagnusQuantities {
        let n = self.n_ions();
        let m_count = modes.n_modes();
        let (a, c) = self.tone_coefficients(phi0);
        let eta = &modes.lamb_dicke;
        let beta = DMatrix::from_fn(n, m_count, |i, m| eta[(i, m)] * system.displacement(m, &a[i], &c[i]));
        let mut theta = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for m in 0..m_count {
                    let w = eta[(i, m)] * eta[(j, m)];
                    if w == 0.0 {
                        continue;
                    }
                    let q = system.ordered_phase(m, &a[i], &c[i], &a[j], &c[j])
                        + system.ordered_phase(m, &a[j], &c[j], &a[i], &c[i]);
                    acc += w * q;
                }
                theta[(i, j)] = acc;
                theta[(j, i)] = acc;
            }
        }
        MagnusQuantities { beta, theta }
    }

    /// Per-mode phases `Θ_m = η_m² Ω² Q_m(f, f)` of a global scheme.
    pub fn mode_phases(&self, modes: &ModeData, phi0: f64) -> Result<Vec<f64>> {
        self.validate()?;
        self.check_modes(modes)?;
        if self.control != ControlMode::Global {
            return Err(Error::invalid("per-mode phases are defined for global schemes only"));
        }
        let system = self.constraint_system(modes)?;
        let (a, c) = self.tone_coefficients(phi0);
        Ok((0..modes.n_modes())
            .map(|m| {
                let e = modes.mode_lamb_dicke[m];
                e * e * system.ordered_phase(m, &a[0], &c[0], &a[0], &c[0])
            })
            .collect())
    }

    /// Phase-space trajectory coordinate `α_m = Σ_i b_{i,m} β_{i,m} / η_m`
    /// (equal to `η_m Ω ∫ f e^{iωt}` for global schemes).
    pub fn mode_displacements(&self, beta: &DMatrix<C64>, modes: &ModeData) -> Vec<C64> {
        (0..modes.n_modes())
            .map(|m| {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..self.n_ions() {
                    acc += beta[(i, m)] * modes.mode_matrix[(i, m)];
                }
                acc
            })
            .collect()
    }

    /// A scheme with no drive at all.
    pub fn zero(tau_s: f64, harmonics: usize, n_ions: usize, trap_freq_rad_s: f64, control: ControlMode) -> Self {
        let mut e1 = vec![0.0; harmonics];
        if harmonics > 0 {
            e1[0] = 1.0;
        }
        ModulationScheme {
            tau_s,
            harmonics,
            basis: SpinBasis::X,
            robust: false,
            control,
            trap_freq_rad_s,
            amplitudes: vec![e1; n_ions],
            rabi_rad_s: vec![0.0; n_ions],
            tone_phases: vec![vec![0.0; harmonics]; n_ions],
            drive_phase: 0.0,
        }
    }
}

/// `J_{ij}` realised by a scheme at its drive phase (zero diagonal).
///
/// Global schemes use `2Σ_m Θ_m b_{im} b_{jm}`; individual schemes use the
/// pairwise Magnus phase directly.
pub fn effective_couplings(scheme: &ModulationScheme, modes: &ModeData) -> Result<DMatrix<f64>> {
    let n = scheme.n_ions();
    let mut j = match scheme.control {
        ControlMode::Global => {
            let theta = scheme.mode_phases(modes, scheme.drive_phase)?;
            let b = &modes.mode_matrix;
            DMatrix::from_fn(n, n, |i, k| {
                2.0 * (0..modes.n_modes())
                    .map(|m| theta[m] * b[(i, m)] * b[(k, m)])
                    .sum::<f64>()
            })
        }
        ControlMode::Individual => scheme.closed_form(modes, scheme.drive_phase)?.theta,
    };
    for i in 0..n {
        j[(i, i)] = 0.0;
    }
    Ok(j)
}
