// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Effective laser–ion Hamiltonians in the interaction picture of the modes.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{Coefficient, Hamiltonian, Mat2, Motion, Term};
use crate::chain::ModeData;
use crate::design::{tone_frequencies, ModulationScheme, SpinBasis};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianKind {
    /// `Ω cos μt [σ^φ + Σ η (a†e^{iωt} + h.c.) σ^{φ−π/2}]`.
    PhaseSensitive,
    /// `Ω [cos(μt−φ) − sin(μt−φ) Σ η (a†e^{iωt} + h.c.)] σ^x`.
    PhaseInsensitiveX,
    /// As [`HamiltonianKind::PhaseInsensitiveX`] with `σ^z`.
    LightShiftZ,
    /// Rotating-wave bichromatic force `(Ωη/2) σ^φ a† e^{−i(μ−ω)t} + h.c.`.
    MsMonochromatic,
    /// As [`HamiltonianKind::MsMonochromatic`] with `σ^z`.
    LsMonochromatic,
}

impl HamiltonianKind {
    /// The carrier of the phase-sensitive configuration never commutes with
    /// the force, so it cannot be used for fast-gate synthesis.
    pub fn non_cancelable_carrier(self) -> bool {
        self == HamiltonianKind::PhaseSensitive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modulation {
    /// Single Raman detuning `μ` (rad/s).
    Tone { detuning_rad_s: f64 },
    /// Multichromatic scheme evaluated at drive phase `phi0`; carries its own
    /// Rabi frequencies.
    Scheme { scheme: ModulationScheme, phi0: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveHamiltonian {
    pub kind: HamiltonianKind,
    /// Per-ion Rabi frequencies (rad/s).
    pub rabi_rad_s: Vec<f64>,
    /// Per-ion spin phases `φ_i` (rad).
    pub spin_phase: Vec<f64>,
    pub modulation: Modulation,
    pub include_carrier: bool,
}

/// `(Ω, φ) = (g_A g_Br / 2Δ, φ_A − φ_Br − δk x̄)`, with `φ` reduced to `[0, 2π)`.
pub fn raman_reduce(
    g_a: f64,
    g_br: f64,
    detuning: f64,
    phase_a: f64,
    phase_br: f64,
    delta_k: f64,
    position: f64,
) -> Result<(f64, f64)> {
    if detuning == 0.0 {
        return Err(Error::domain("Raman detuning Δ must be nonzero"));
    }
    let values = [g_a, g_br, detuning, phase_a, phase_br, delta_k, position];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("Raman parameters must be finite"));
    }
    let phi = (phase_a - phase_br - delta_k * position).rem_euclid(TAU);
    Ok((g_a * g_br / (2.0 * detuning), if phi >= TAU { 0.0 } else { phi }))
}

impl EffectiveHamiltonian {
    /// Multichromatic Hamiltonian of a designed scheme in its spin basis.
    pub fn from_scheme(scheme: &ModulationScheme, phi0: f64, include_carrier: bool) -> Self {
        let n = scheme.n_ions();
        EffectiveHamiltonian {
            kind: match scheme.basis {
                SpinBasis::X => HamiltonianKind::PhaseInsensitiveX,
                SpinBasis::Z => HamiltonianKind::LightShiftZ,
            },
            rabi_rad_s: scheme.rabi_rad_s.clone(),
            spin_phase: vec![0.0; n],
            modulation: Modulation::Scheme {
                scheme: scheme.clone(),
                phi0,
            },
            include_carrier,
        }
    }

    pub fn monochromatic(
        kind: HamiltonianKind,
        rabi_rad_s: Vec<f64>,
        spin_phase: Vec<f64>,
        detuning_rad_s: f64,
        include_carrier: bool,
    ) -> Self {
        EffectiveHamiltonian {
            kind,
            rabi_rad_s,
            spin_phase,
            modulation: Modulation::Tone { detuning_rad_s },
            include_carrier,
        }
    }

    pub fn n_ions(&self) -> usize {
        match &self.modulation {
            Modulation::Scheme { scheme, .. } => scheme.n_ions(),
            Modulation::Tone { .. } => self.rabi_rad_s.len(),
        }
    }

    fn validate(&self, modes: &ModeData) -> Result<()> {
        let n = self.n_ions();
        if modes.n_ions() != n {
            return Err(Error::DimensionMismatch {
                what: "ions in Hamiltonian versus chain",
                expected: modes.n_ions(),
                found: n,
            });
        }
        if self.spin_phase.len() != n {
            return Err(Error::DimensionMismatch {
                what: "spin phases",
                expected: n,
                found: self.spin_phase.len(),
            });
        }
        match &self.modulation {
            Modulation::Scheme { scheme, phi0 } => {
                scheme.validate()?;
                scheme.check_modes(modes)?;
                if !phi0.is_finite() {
                    return Err(Error::invalid("drive phase must be finite"));
                }
                if !matches!(
                    self.kind,
                    HamiltonianKind::PhaseInsensitiveX | HamiltonianKind::LightShiftZ
                ) {
                    return Err(Error::invalid(
                        "multichromatic schemes drive the phase-insensitive or light-shift Hamiltonian",
                    ));
                }
            }
            Modulation::Tone { detuning_rad_s } => {
                if self.rabi_rad_s.len() != n {
                    return Err(Error::DimensionMismatch {
                        what: "Rabi frequencies",
                        expected: n,
                        found: self.rabi_rad_s.len(),
                    });
                }
                if !detuning_rad_s.is_finite() || self.rabi_rad_s.iter().any(|o| !o.is_finite()) {
                    return Err(Error::invalid("detuning and Rabi frequencies must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Spin frames in which the Hamiltonian is diagonal, when such frames exist.
    pub fn frames(&self) -> Option<Vec<Mat2>> {
        let n = self.n_ions();
        match self.kind {
            HamiltonianKind::PhaseInsensitiveX => Some(vec![Mat2::hadamard(); n]),
            HamiltonianKind::MsMonochromatic => Some(
                self.spin_phase
                    .iter()
                    .map(|phi| Mat2::z_rotation(*phi).mul(&Mat2::hadamard()))
                    .collect(),
            ),
            HamiltonianKind::LightShiftZ | HamiltonianKind::LsMonochromatic => Some(vec![Mat2::IDENTITY; n]),
            HamiltonianKind::PhaseSensitive => None,
        }
    }

    /// Dimensionless operator-term form (`ω_z = 1`).
    pub fn build(&self, modes: &ModeData) -> Result<Hamiltonian> {
        self.validate(modes)?;
        let n = self.n_ions();
        let wz = modes.trap_freq;
        let mut h = Hamiltonian::new(n, modes.n_modes());
        let eta = &modes.lamb_dicke;

        let (freqs, sin, cos): (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) = match &self.modulation {
            Modulation::Scheme { scheme, phi0 } => {
                let (a, c) = scheme.tone_coefficients(*phi0);
                (tone_frequencies(scheme.tau(), scheme.harmonics), a, c)
            }
            Modulation::Tone { detuning_rad_s } => {
                let mu = detuning_rad_s / wz;
                let sin = self.rabi_rad_s.iter().map(|o| vec![o / wz]).collect();
                (vec![mu], sin, vec![vec![0.0]; n])
            }
        };

        match self.kind {
            HamiltonianKind::PhaseSensitive => {
                for i in 0..n {
                    let rabi = self.rabi_rad_s[i] / wz;
                    let phi = self.spin_phase[i];
                    let carrier = Coefficient::Tones {
                        amp: C64::new(0.5 * rabi, 0.0),
                        rot: 0.0,
                        sin: vec![0.0],
                        cos: vec![1.0],
                        freqs: freqs.clone(),
                    };
                    h.push(Term {
                        ion: i,
                        spin: Mat2::sigma_phi(phi),
                        motion: Motion::Identity,
                        coeff: carrier,
                    })?;
                    for m in 0..modes.n_modes() {
                        if eta[(i, m)] == 0.0 || rabi == 0.0 {
                            continue;
                        }
                        h.push(Term {
                            ion: i,
                            spin: Mat2::sigma_phi(phi - FRAC_PI_2),
                            motion: Motion::Raise(m),
                            coeff: Coefficient::Tones {
                                amp: C64::new(eta[(i, m)] * rabi, 0.0),
                                rot: modes.frequencies[m],
                                sin: vec![0.0],
                                cos: vec![1.0],
                                freqs: freqs.clone(),
                            },
                        })?;
                    }
                }
            }
            HamiltonianKind::PhaseInsensitiveX | HamiltonianKind::LightShiftZ => {
                let spin = if self.kind == HamiltonianKind::LightShiftZ {
                    Mat2::SIGMA_Z
                } else {
                    Mat2::SIGMA_X
                };
                for i in 0..n {
                    // Force `Σ a sin + c cos`, carrier `Σ a' sin + c' cos`.
                    let (a, c, car_sin, car_cos) = match &self.modulation {
                        Modulation::Scheme { .. } => {
                            let (a, c) = (sin[i].clone(), cos[i].clone());
                            let car_sin = c.iter().map(|v| -v).collect();
                            (a.clone(), c, car_sin, a)
                        }
                        Modulation::Tone { .. } => {
                            let w = sin[i][0];
                            let (s, co) = self.spin_phase[i].sin_cos();
                            (vec![-w * co], vec![w * s], vec![w * s], vec![w * co])
                        }
                    };
                    if self.include_carrier {
                        h.push(Term {
                            ion: i,
                            spin,
                            motion: Motion::Identity,
                            coeff: Coefficient::Tones {
                                amp: C64::new(0.5, 0.0),
                                rot: 0.0,
                                sin: car_sin,
                                cos: car_cos,
                                freqs: freqs.clone(),
                            },
                        })?;
                    }
                    if a.iter().chain(&c).all(|v| *v == 0.0) {
                        continue;
                    }
                    for m in 0..modes.n_modes() {
                        if eta[(i, m)] == 0.0 {
                            continue;
                        }
                        h.push(Term {
                            ion: i,
                            spin,
                            motion: Motion::Raise(m),
                            coeff: Coefficient::Tones {
                                amp: C64::new(eta[(i, m)], 0.0),
                                rot: modes.frequencies[m],
                                sin: a.clone(),
                                cos: c.clone(),
                                freqs: freqs.clone(),
                            },
                        })?;
                    }
                }
            }
            HamiltonianKind::MsMonochromatic | HamiltonianKind::LsMonochromatic => {
                let mu = freqs[0];
                for i in 0..n {
                    let rabi = self.rabi_rad_s[i] / wz;
                    let (spin, motional_phase) = if self.kind == HamiltonianKind::MsMonochromatic {
                        (Mat2::sigma_phi(self.spin_phase[i]), 0.0)
                    } else {
                        (Mat2::SIGMA_Z, self.spin_phase[i])
                    };
                    for m in 0..modes.n_modes() {
                        if eta[(i, m)] == 0.0 || rabi == 0.0 {
                            continue;
                        }
                        h.push(Term {
                            ion: i,
                            spin,
                            motion: Motion::Raise(m),
                            coeff: Coefficient::Rotating {
                                amp: C64::from_polar(0.5 * rabi * eta[(i, m)], motional_phase),
                                freq: -(mu - modes.frequencies[m]),
                            },
                        })?;
                    }
                }
            }
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{normal_modes, Axis, IonChainSpec};

    fn modes() -> ModeData {
        let spec = IonChainSpec {
            n_ions: 2,
            axial_freq: TAU * 1e6,
            transverse_freq: None,
            ion_mass: 171.0 * crate::units::ATOMIC_MASS_UNIT,
            wavevector: 2.0 * TAU / 355e-9,
            coupled_axis: Axis::Axial,
        };
        normal_modes(&spec).unwrap()
    }

    #[test]
    fn raman_reduction() {
        let (o, phi) = raman_reduce(3.0, 3.0, 2.0, 0.5, 0.2, 0.0, 7.0).unwrap();
        assert_eq!(o, 9.0 / 4.0);
        assert!((phi - 0.3).abs() < 1e-15);
        let (o2, _) = raman_reduce(3.0, 3.0, 4.0, 0.5, 0.2, 0.0, 7.0).unwrap();
        assert_eq!(o2, o / 2.0);
        let (_, phi_far) = raman_reduce(3.0, 3.0, 2.0, 0.5, 0.2, 0.0, -100.0).unwrap();
        assert_eq!(phi, phi_far);
        let (_, wrapped) = raman_reduce(1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert!((wrapped - (TAU - 1.0)).abs() < 1e-15);
        assert!(matches!(
            raman_reduce(1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn phase_sensitive_is_flagged_and_not_diagonal() {
        let m = modes();
        let h = EffectiveHamiltonian::monochromatic(
            HamiltonianKind::PhaseSensitive,
            vec![1e5, 1e5],
            vec![0.0, 0.0],
            TAU * 1.1e6,
            true,
        );
        assert!(h.kind.non_cancelable_carrier());
        assert!(!HamiltonianKind::PhaseInsensitiveX.non_cancelable_carrier());
        assert!(h.frames().is_none());
        let built = h.build(&m).unwrap();
        assert!(!built.is_spin_diagonal());
        assert_eq!(built.terms.len(), 2 * (1 + 2));
    }

    #[test]
    fn frames_diagonalise_each_kind() {
        let m = modes();
        for kind in [
            HamiltonianKind::PhaseInsensitiveX,
            HamiltonianKind::LightShiftZ,
            HamiltonianKind::MsMonochromatic,
            HamiltonianKind::LsMonochromatic,
        ] {
            let h = EffectiveHamiltonian::monochromatic(kind, vec![1e5, 2e5], vec![0.4, 1.1], TAU * 1.1e6, true);
            let built = h.build(&m).unwrap();
            assert!(built.conjugated(&h.frames().unwrap()).is_spin_diagonal(), "{kind:?}");
        }
    }

    #[test]
    fn single_tone_matches_written_form() {
        // Ω[cos(μt−φ) − sin(μt−φ) η(...)]: check both coefficients at one time.
        let m = modes();
        let (rabi, phi, mu) = (0.3 * m.trap_freq, 0.7, 1.4 * m.trap_freq);
        let h = EffectiveHamiltonian::monochromatic(
            HamiltonianKind::PhaseInsensitiveX,
            vec![rabi, 0.0],
            vec![phi, 0.0],
            mu,
            true,
        )
        .build(&m)
        .unwrap();
        let t = 0.37;
        let (r, u) = (rabi / m.trap_freq, mu / m.trap_freq);
        let carrier = &h.terms[0];
        assert_eq!(carrier.motion, Motion::Identity);
        assert!((2.0 * carrier.coeff.eval(t).re - r * (u * t - phi).cos()).abs() < 1e-14);
        let sdf = &h.terms[1];
        let expect = -r * (u * t - phi).sin() * m.lamb_dicke[(0, 0)];
        let got = sdf.coeff.eval(t) * C64::from_polar(1.0, -m.frequencies[0] * t);
        assert!((got.re - expect).abs() < 1e-14 && got.im.abs() < 1e-14);
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let h = EffectiveHamiltonian::monochromatic(HamiltonianKind::MsMonochromatic, vec![1.0], vec![0.0], 1.0, false);
        assert!(h.build(&modes()).is_err());
        let scheme = ModulationScheme::zero(1e-6, 3, 2, modes().trap_freq, crate::design::ControlMode::Global);
        let mut h = EffectiveHamiltonian::from_scheme(&scheme, 0.0, false);
        h.kind = HamiltonianKind::MsMonochromatic;
        assert!(h.build(&modes()).is_err());
    }
}
