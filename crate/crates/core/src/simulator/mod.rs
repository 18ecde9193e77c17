// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Independent verification of designed schemes.

pub mod effective;
pub mod evolve;
pub mod fidelity;
pub mod hamiltonian;
pub mod magnus;
pub mod quadrature;
pub mod report;

pub use effective::{raman_reduce, EffectiveHamiltonian, HamiltonianKind, Modulation};
pub use evolve::{auto_steps, evolve_statevector, EvolveOptions, FockSpace, LEAKAGE_TOLERANCE};
pub use fidelity::{
    default_initial_spin, gate_fidelity, magnus_fidelity, magnus_final_state, overlap, state_fidelity, target_state,
};
pub use magnus::{auto_cutoffs, magnus_evaluate, partial_displacements, trajectory_sample, Trajectory};
pub use report::{
    gate_report, phase_scan, simulate_scheme, uniform_phase_grid, FidelityMethod, GateReport, ScanPoint, VerifyOptions,
};
