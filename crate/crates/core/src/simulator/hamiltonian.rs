// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Operator-term representation of spin–motion Hamiltonians.
//!
//! A Hamiltonian is a list of [`Term`]s `T_k(t) = c_k(t) σ_k ⊗ O_k` and
//! stands for `H(t) = Σ_k (T_k(t) + T_k(t)†)`. Self-adjoint pieces are
//! therefore written with half their coefficient.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// A 2×2 complex matrix acting on one qubit, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const SIGMA_X: Mat2 = Mat2([[ZERO, ONE], [ONE, ZERO]]);
    pub const SIGMA_Y: Mat2 = Mat2([[ZERO, C64::new(0.0, -1.0)], [I, ZERO]]);
    pub const SIGMA_Z: Mat2 = Mat2([[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]]);
    /// `σ⁺ = |1⟩⟨0|`, raising `|0⟩` to `|1⟩`.
    pub const SIGMA_PLUS: Mat2 = Mat2([[ZERO, ZERO], [ONE, ZERO]]);
    pub const SIGMA_MINUS: Mat2 = Mat2([[ZERO, ONE], [ZERO, ZERO]]);

    /// `σ^φ = cos φ σ_x + sin φ σ_y`.
    pub fn sigma_phi(phi: f64) -> Mat2 {
        let e = C64::from_polar(1.0, phi);
        Mat2([[ZERO, e.conj()], [e, ZERO]])
    }

    pub fn hadamard() -> Mat2 {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Mat2([[s, s], [s, -s]])
    }

    /// `e^{−iφZ/2}`.
    pub fn z_rotation(phi: f64) -> Mat2 {
        Mat2([
            [C64::from_polar(1.0, -0.5 * phi), ZERO],
            [ZERO, C64::from_polar(1.0, 0.5 * phi)],
        ])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        let mut c = [[ZERO; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(c)
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn adjoint(&self) -> Mat2 {
        let a = &self.0;
        Mat2([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let a = &self.0;
        Mat2([[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]])
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.0[0][1].norm() <= tol && self.0[1][0].norm() <= tol
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|v| *v == ZERO)
    }
}

/// Motional factor of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Motion {
    Identity,
    Lower(usize),
    Raise(usize),
}

/// Time dependence of a term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Coefficient {
    Constant(C64),
    /// `amp·e^{i freq t}`.
    Rotating {
        amp: C64,
        freq: f64,
    },
    /// `amp·e^{i rot t}·Σ_k (sin_k sin(ν_k t) + cos_k cos(ν_k t))`.
    Tones {
        amp: C64,
        rot: f64,
        sin: Vec<f64>,
        cos: Vec<f64>,
        freqs: Vec<f64>,
    },
}

impl Coefficient {
    pub fn eval(&self, t: f64) -> C64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Rotating { amp, freq } => amp * C64::from_polar(1.0, freq * t),
            Coefficient::Tones {
                amp,
                rot,
                sin,
                cos,
                freqs,
            } => {
                let mut s = 0.0;
                for ((a, c), nu) in sin.iter().zip(cos).zip(freqs) {
                    let (sn, cs) = (nu * t).sin_cos();
                    s += a * sn + c * cs;
                }
                amp * C64::from_polar(s, rot * t)
            }
        }
    }

    /// Largest angular frequency present; used to choose step sizes.
    pub fn max_frequency(&self) -> f64 {
        match self {
            Coefficient::Constant(_) => 0.0,
            Coefficient::Rotating { freq, .. } => freq.abs(),
            Coefficient::Tones { rot, freqs, .. } => rot.abs() + freqs.iter().fold(0.0f64, |m, f| m.max(f.abs())),
        }
    }

    /// Upper bound on `|c(t)|`.
    pub fn bound(&self) -> f64 {
        match self {
            Coefficient::Constant(c) => c.norm(),
            Coefficient::Rotating { amp, .. } => amp.norm(),
            Coefficient::Tones { amp, sin, cos, .. } => {
                amp.norm() * sin.iter().chain(cos).map(|v| v.abs()).sum::<f64>()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub ion: usize,
    pub spin: Mat2,
    pub motion: Motion,
    pub coeff: Coefficient,
}

/// `H(t) = Σ_k (T_k(t) + T_k(t)†)` on `n_ions` qubits and `n_modes` oscillators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    pub n_ions: usize,
    pub n_modes: usize,
    pub terms: Vec<Term>,
}

impl Hamiltonian {
    pub fn new(n_ions: usize, n_modes: usize) -> Self {
        Hamiltonian {
            n_ions,
            n_modes,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, term: Term) -> Result<()> {
        if term.ion >= self.n_ions {
            return Err(Error::invalid(format!(
                "term acts on ion {} of {}",
                term.ion, self.n_ions
            )));
        }
        match term.motion {
            Motion::Lower(m) | Motion::Raise(m) if m >= self.n_modes => {
                return Err(Error::invalid(format!("term acts on mode {m} of {}", self.n_modes)))
            }
            _ => {}
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn extend(&mut self, terms: impl IntoIterator<Item = Term>) -> Result<()> {
        for t in terms {
            self.push(t)?;
        }
        Ok(())
    }

    /// Conjugate every spin operator by `V`: `σ → V† σ V`, per ion.
    pub fn conjugated(&self, frames: &[Mat2]) -> Hamiltonian {
        let mut h = self.clone();
        for t in &mut h.terms {
            let v = frames[t.ion];
            t.spin = v.adjoint().mul(&t.spin).mul(&v);
        }
        h
    }

    pub fn is_spin_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.spin.is_diagonal(1e-14))
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, t| m.max(t.coeff.max_frequency()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat2, b: &Mat2) -> bool {
        a.0.iter()
            .flatten()
            .zip(b.0.iter().flatten())
            .all(|(x, y)| (x - y).norm() < 1e-14)
    }

    #[test]
    fn pauli_algebra() {
        let xy = Mat2::SIGMA_X.mul(&Mat2::SIGMA_Y);
        assert!(close(&xy, &Mat2::SIGMA_Z.scale(I)));
        let lower = Mat2::SIGMA_X.add(&Mat2::SIGMA_Y.scale(-I)).scale(C64::new(0.5, 0.0));
        // (σx − iσy)/2 = |1⟩⟨0|
        assert!(close(&lower, &Mat2::SIGMA_PLUS));
        assert!(close(&Mat2::SIGMA_PLUS.adjoint(), &Mat2::SIGMA_MINUS));
        assert!(close(&Mat2::sigma_phi(0.0), &Mat2::SIGMA_X));
        assert!(close(&Mat2::sigma_phi(std::f64::consts::FRAC_PI_2), &Mat2::SIGMA_Y));
    }

    #[test]
    fn frame_rotations_diagonalise() {
        let h = Mat2::hadamard();
        assert!(close(&h.adjoint().mul(&Mat2::SIGMA_X).mul(&h), &Mat2::SIGMA_Z));
        let phi = 0.7;
        let v = Mat2::z_rotation(phi).mul(&h);
        assert!(close(&v.adjoint().mul(&Mat2::sigma_phi(phi)).mul(&v), &Mat2::SIGMA_Z));
    }

    #[test]
    fn tone_coefficient() {
        let c = Coefficient::Tones {
            amp: C64::new(2.0, 0.0),
            rot: 0.0,
            sin: vec![1.0, 0.0],
            cos: vec![0.0, 0.5],
            freqs: vec![1.0, 2.0],
        };
        let t = 0.3f64;
        let expect = 2.0 * (t.sin() + 0.5 * (2.0 * t).cos());
        assert!((c.eval(t).re - expect).abs() < 1e-15);
        assert_eq!(c.max_frequency(), 2.0);
        assert_eq!(c.bound(), 3.0);
    }

    #[test]
    fn push_rejects_out_of_range() {
        let mut h = Hamiltonian::new(1, 1);
        let t = Term {
            ion: 0,
            spin: Mat2::SIGMA_Z,
            motion: Motion::Raise(1),
            coeff: Coefficient::Constant(ONE),
        };
        assert!(h.push(t).is_err());
    }
}
