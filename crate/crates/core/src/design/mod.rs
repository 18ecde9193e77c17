// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Multichromatic constraint assembly and scheme synthesis.
//!
//! A scheme drives every ion with `f_i(t) = Ω_i Σ_k r_{i,k} sin(ν_k t − φ_{i,k} + φ₀)`
//! on the commensurate tones `ν_k = 2πk/τ`. Closure (`β_{i,m}(τ) = 0`) is
//! linear in `r`; the geometric phases are quadratic. Synthesis restricts to
//! the null space of the linear rows and then solves the quadratic conditions
//! at the smallest peak Rabi frequency.

pub mod constraints;
mod global;
mod individual;
pub mod kernels;
mod optimize;
pub mod scheme;
mod waveform;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use constraints::{ConstraintSystem, NullSpace, PhaseKernels, NULL_SPACE_THRESHOLD};
pub use global::{design_global, design_global_targets, global_mode_targets, PHASE_TOLERANCE};
pub use individual::design_individual;
pub use kernels::{tone_frequencies, Quadrature};
pub use scheme::{effective_couplings, ControlMode, MagnusQuantities, ModulationScheme, SpinBasis};
pub use waveform::{import_samples, import_waveform, WaveformImport, RESIDUAL_WARNING};

use crate::chain::ModeData;
use crate::error::{Error, Result};

/// Restart schedule of the non-convex phase search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    pub basis: SpinBasis,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            restarts: 32,
            seed: 0,
            basis: SpinBasis::X,
        }
    }
}

/// What to synthesise.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignProblem {
    /// Target `J` (radians, symmetric, zero diagonal). Global problems
    /// without `J` use `theta1_target` on the first mode.
    pub couplings: Option<DMatrix<f64>>,
    pub control: ControlMode,
    /// 1-based ion labels; `None` means every ion.
    pub active_ions: Option<Vec<usize>>,
    pub robust: bool,
    pub theta1_target: f64,
    pub search: SearchOptions,
}

impl Default for DesignProblem {
    fn default() -> Self {
        DesignProblem {
            couplings: None,
            control: ControlMode::Global,
            active_ions: None,
            robust: false,
            theta1_target: std::f64::consts::FRAC_PI_4,
            search: SearchOptions::default(),
        }
    }
}

impl DesignProblem {
    pub fn global(robust: bool) -> Self {
        DesignProblem {
            robust,
            ..Default::default()
        }
    }

    pub fn individual(couplings: DMatrix<f64>, robust: bool) -> Self {
        DesignProblem {
            couplings: Some(couplings),
            control: ControlMode::Individual,
            robust,
            ..Default::default()
        }
    }

    /// Membership mask over `0..n`.
    pub fn active_set(&self, n: usize) -> Result<Vec<bool>> {
        let Some(list) = &self.active_ions else {
            return Ok(vec![true; n]);
        };
        let mut mask = vec![false; n];
        for &ion in list {
            if ion == 0 || ion > n {
                return Err(Error::invalid(format!("active ion {ion} is outside 1..{n}")));
            }
            mask[ion - 1] = true;
        }
        Ok(mask)
    }
}

/// Dispatch on [`DesignProblem::control`].
pub fn design(modes: &ModeData, tau_s: f64, harmonics: usize, problem: &DesignProblem) -> Result<ModulationScheme> {
    if !(tau_s > 0.0) || !tau_s.is_finite() {
        return Err(Error::invalid("tau_s must be positive"));
    }
    match problem.control {
        ControlMode::Individual => design_individual(modes, tau_s, harmonics, problem),
        ControlMode::Global => {
            if problem.active_set(modes.n_ions())?.iter().any(|a| !a) {
                return Err(Error::invalid(
                    "global control drives every ion; use individual control",
                ));
            }
            let targets = match &problem.couplings {
                Some(j) => global_mode_targets(modes, j)?,
                None => {
                    let mut t = vec![0.0; modes.n_modes()];
                    if let Some(first) = t.first_mut() {
                        *first = problem.theta1_target;
                    }
                    t
                }
            };
            design_global_targets(modes, tau_s, harmonics, problem.robust, &targets, &problem.search)
        }
    }
}

/// Flip `v` so that its first significant entry is positive.
pub(crate) fn normalise_sign(mut v: Vec<f64>) -> Vec<f64> {
    let scale = v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * scale) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

pub(crate) fn lexicographic_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x < y;
        }
    }
    a.len() < b.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_normalisation() {
        assert_eq!(normalise_sign(vec![0.0, -2.0, 1.0]), vec![-0.0, 2.0, -1.0]);
        assert_eq!(normalise_sign(vec![1e-12, -1.0]), vec![-1e-12, 1.0]);
        assert_eq!(normalise_sign(vec![0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn lexicographic_order() {
        assert!(lexicographic_less(&[0.1, 0.5], &[0.1, 0.6]));
        assert!(!lexicographic_less(&[0.2, 0.0], &[0.1, 0.9]));
        assert!(!lexicographic_less(&[0.2, 0.0], &[0.2, 0.0]));
    }

    #[test]
    fn active_set_uses_one_based_labels() {
        let p = DesignProblem {
            active_ions: Some(vec![2, 3]),
            ..Default::default()
        };
        assert_eq!(p.active_set(4).unwrap(), vec![false, true, true, false]);
        let bad = DesignProblem {
            active_ions: Some(vec![0]),
            ..Default::default()
        };
        assert!(bad.active_set(2).is_err());
    }
}
