// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use std::f64::consts::TAU;

use multitone::chain::{normal_modes, Axis, IonChainSpec, ModeData};
use multitone::design::{design, DesignProblem, ModulationScheme};
use multitone::units::ATOMIC_MASS_UNIT;

pub const BENCH_TAU_S: f64 = 3.2e-6;
pub const BENCH_HARMONICS: usize = 30;

pub fn axial_chain(n_ions: usize) -> IonChainSpec {
    IonChainSpec {
        n_ions,
        axial_freq: TAU * 1e6,
        transverse_freq: None,
        ion_mass: 171.0 * ATOMIC_MASS_UNIT,
        wavevector: 2.0 * TAU / 355e-9,
        coupled_axis: Axis::Axial,
    }
}

pub fn benchmark_modes() -> ModeData {
    let mut spec = axial_chain(2);
    spec.wavevector = spec.wavevector_for_com_lamb_dicke(0.1416);
    normal_modes(&spec).unwrap()
}

pub fn benchmark_design(modes: &ModeData, harmonics: usize, robust: bool) -> ModulationScheme {
    design(modes, BENCH_TAU_S, harmonics, &DesignProblem::global(robust)).unwrap()
}
