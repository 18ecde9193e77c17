// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Gate reports and drive-phase scans.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::effective::EffectiveHamiltonian;
use super::evolve::{evolve_statevector, EvolveOptions, FockSpace};
use super::fidelity::{default_initial_spin, gate_fidelity, magnus_fidelity};
use super::magnus::{auto_cutoffs, magnus_evaluate, trajectory_sample, Trajectory};
use crate::chain::ModeData;
use crate::design::{effective_couplings, MagnusQuantities, ModulationScheme};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMethod {
    /// Exact Magnus evolution of the Lamb-Dicke Hamiltonian (no truncation).
    Magnus,
    /// Direct integration in a truncated Fock space.
    StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// `None` targets the couplings the scheme realises at its drive phase.
    pub target: Option<DMatrix<f64>>,
    pub method: FidelityMethod,
    /// Fock levels per mode; `None` uses [`auto_cutoffs`].
    pub cutoffs: Option<Vec<usize>>,
    pub steps: Option<usize>,
    pub include_carrier: bool,
    pub trajectory_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            target: None,
            method: FidelityMethod::Magnus,
            cutoffs: None,
            steps: None,
            include_carrier: false,
            trajectory_samples: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub phi0: f64,
    pub beta: DMatrix<C64>,
    pub theta: DMatrix<f64>,
    pub j_effective: DMatrix<f64>,
    pub fidelity: f64,
    pub trajectories: Vec<Trajectory>,
    pub max_rabi_over_trapfreq: f64,
    pub max_beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub phi0: f64,
    pub fidelity: f64,
    pub max_beta: f64,
}

fn target(scheme: &ModulationScheme, modes: &ModeData, opts: &VerifyOptions) -> Result<DMatrix<f64>> {
    match &opts.target {
        Some(j) => Ok(j.clone()),
        None => effective_couplings(scheme, modes),
    }
}

/// Direct integration of the scheme's Hamiltonian from `ψ₀ ⊗ |vac⟩`.
pub fn simulate_scheme(
    scheme: &ModulationScheme,
    modes: &ModeData,
    phi0: f64,
    opts: &VerifyOptions,
) -> Result<(FockSpace, Vec<C64>)> {
    let cutoffs = match &opts.cutoffs {
        Some(c) => c.clone(),
        None => auto_cutoffs(scheme, modes, phi0)?,
    };
    let space = FockSpace::new(scheme.n_ions(), cutoffs)?;
    let eff = EffectiveHamiltonian::from_scheme(scheme, phi0, opts.include_carrier);
    let h = eff.build(modes)?;
    let psi0 = space.product_vacuum(&default_initial_spin(scheme.basis, scheme.n_ions()))?;
    let evolve = EvolveOptions {
        steps: opts.steps,
        frames: eff.frames(),
        check_leakage: true,
    };
    let psi = evolve_statevector(&h, &space, scheme.tau(), &psi0, &evolve)?;
    Ok((space, psi))
}

fn fidelity_at(
    scheme: &ModulationScheme,
    modes: &ModeData,
    phi0: f64,
    j: &DMatrix<f64>,
    opts: &VerifyOptions,
) -> Result<(f64, f64, MagnusQuantities)> {
    let q = magnus_evaluate(scheme, modes, phi0)?;
    let psi0 = default_initial_spin(scheme.basis, scheme.n_ions());
    let f = match opts.method {
        FidelityMethod::Magnus => magnus_fidelity(&q, j, scheme.basis, &psi0)?,
        FidelityMethod::StateVector => {
            let (space, psi) = simulate_scheme(scheme, modes, phi0, opts)?;
            gate_fidelity(&psi, &space, j, scheme.basis, &psi0)?
        }
    };
    Ok((f, q.max_beta(), q))
}

/// Full verification of `scheme` at drive phase `phi0`.
pub fn gate_report(scheme: &ModulationScheme, modes: &ModeData, phi0: f64, opts: &VerifyOptions) -> Result<GateReport> {
    let j = target(scheme, modes, opts)?;
    let j_effective = effective_couplings(scheme, modes)?;
    let (fidelity, max_beta, q) = fidelity_at(scheme, modes, phi0, &j, opts)?;
    let trajectories = trajectory_sample(scheme, modes, phi0, opts.trajectory_samples)?;
    Ok(GateReport {
        phi0,
        beta: q.beta,
        theta: q.theta,
        j_effective,
        fidelity,
        trajectories,
        max_rabi_over_trapfreq: scheme.max_rabi_over_trapfreq(),
        max_beta,
    })
}

/// Fidelity and residual displacement on each grid phase, in grid order.
pub fn phase_scan(
    scheme: &ModulationScheme,
    modes: &ModeData,
    grid: &[f64],
    opts: &VerifyOptions,
) -> Result<Vec<ScanPoint>> {
    if grid.is_empty() {
        return Err(Error::invalid("phase grid is empty"));
    }
    let j = target(scheme, modes, opts)?;
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(grid.len());
    let chunk = grid.len().div_ceil(workers);
    let results: Vec<Result<Vec<ScanPoint>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|phases| {
                let j = &j;
                scope.spawn(move || {
                    phases
                        .iter()
                        .map(|&phi0| {
                            let (fidelity, max_beta, _) = fidelity_at(scheme, modes, phi0, j, opts)?;
                            Ok(ScanPoint {
                                phi0,
                                fidelity,
                                max_beta,
                            })
                        })
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scan worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(grid.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// `n` equally spaced phases over `[0, 2π)`.
pub fn uniform_phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{normal_modes, Axis, IonChainSpec};
    use crate::design::ControlMode;
    use std::f64::consts::TAU;

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
    fn zero_scheme_report() {
        let m = modes();
        let s = ModulationScheme::zero(2e-6, 4, 2, m.trap_freq, ControlMode::Global);
        let r = gate_report(&s, &m, 0.0, &VerifyOptions::default()).unwrap();
        assert_eq!(r.fidelity, 1.0);
        assert_eq!(r.max_beta, 0.0);
        assert_eq!(r.trajectories.len(), 2);
        assert_eq!(r.max_rabi_over_trapfreq, 0.0);
        let sv = VerifyOptions {
            method: FidelityMethod::StateVector,
            ..Default::default()
        };
        assert!((gate_report(&s, &m, 0.0, &sv).unwrap().fidelity - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scan_preserves_order_and_rejects_empty() {
        let m = modes();
        let s = ModulationScheme::zero(2e-6, 4, 2, m.trap_freq, ControlMode::Global);
        let grid = [3.0, 1.0, 2.0];
        let pts = phase_scan(&s, &m, &grid, &VerifyOptions::default()).unwrap();
        assert_eq!(pts.iter().map(|p| p.phi0).collect::<Vec<_>>(), grid.to_vec());
        assert!(phase_scan(&s, &m, &[], &VerifyOptions::default()).is_err());
    }

    #[test]
    fn uniform_grid() {
        let g = uniform_phase_grid(4);
        assert_eq!(g, vec![0.0, TAU / 4.0, TAU / 2.0, 3.0 * TAU / 4.0]);
    }
}
