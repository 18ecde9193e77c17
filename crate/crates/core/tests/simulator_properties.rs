// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use common::{benchmark_design, benchmark_modes, BENCH_HARMONICS};
use multitone::analytic::{ms_gate_params, MAXIMALLY_ENTANGLING_THETA};
use multitone::chain::normal_modes;
use multitone::design::SpinBasis;
use multitone::simulator::{
    auto_cutoffs, default_initial_spin, evolve_statevector, gate_report, phase_scan, simulate_scheme, state_fidelity,
    EffectiveHamiltonian, EvolveOptions, FidelityMethod, FockSpace, HamiltonianKind, VerifyOptions,
};

fn state_vector() -> VerifyOptions {
    VerifyOptions {
        method: FidelityMethod::StateVector,
        ..Default::default()
    }
}

#[test]
fn benchmark_fidelity_properties() {
    let modes = benchmark_modes();
    let scheme = benchmark_design(&modes, BENCH_HARMONICS, false);

    let grid: Vec<f64> = (0..8).map(|k| k as f64 * PI / 8.0).collect();
    let shifted: Vec<f64> = grid.iter().map(|p| p + PI).collect();
    let a = phase_scan(&scheme, &modes, &grid, &VerifyOptions::default()).unwrap();
    let b = phase_scan(&scheme, &modes, &shifted, &VerifyOptions::default()).unwrap();
    for (p, q) in a.iter().zip(&b) {
        assert!((p.fidelity - q.fidelity).abs() < 1e-12, "{p:?} {q:?}");
        assert!((p.max_beta - q.max_beta).abs() < 1e-12);
    }
    for w in a.windows(2).take(4) {
        assert!(w[1].fidelity < w[0].fidelity);
    }

    let at_design = gate_report(&scheme, &modes, 0.0, &state_vector()).unwrap();
    assert!(at_design.fidelity > 1.0 - 1e-6, "{}", at_design.fidelity);

    let auto = auto_cutoffs(&scheme, &modes, FRAC_PI_2).unwrap();
    let base = gate_report(&scheme, &modes, FRAC_PI_2, &state_vector())
        .unwrap()
        .fidelity;
    let larger = VerifyOptions {
        cutoffs: Some(auto.iter().map(|c| c + 4).collect()),
        ..state_vector()
    };
    let more = gate_report(&scheme, &modes, FRAC_PI_2, &larger).unwrap().fidelity;
    assert!((base - more).abs() < 1e-8, "{base} vs {more}");
    let magnus = gate_report(&scheme, &modes, FRAC_PI_2, &VerifyOptions::default())
        .unwrap()
        .fidelity;
    assert!((base - magnus).abs() < 1e-8);

    let (_, psi) = simulate_scheme(&scheme, &modes, FRAC_PI_2, &state_vector()).unwrap();
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-9);
}

#[test]
fn monochromatic_ms_gate_makes_a_bell_state() {
    let modes = normal_modes(&common::axial_chain(2))
        .unwrap()
        .select_modes(&[0])
        .unwrap();
    let tau_s = 50e-6;
    let eta = modes.lamb_dicke[(0, 0)];
    for loops in [1, 2] {
        let (delta, rabi) = ms_gate_params(tau_s, eta, eta, loops, MAXIMALLY_ENTANGLING_THETA).unwrap();
        let mu = modes.trap_freq * modes.frequencies[0] + delta;
        let h = EffectiveHamiltonian::monochromatic(
            HamiltonianKind::MsMonochromatic,
            vec![rabi; 2],
            vec![0.0; 2],
            mu,
            false,
        );
        let space = FockSpace::new(2, vec![14]).unwrap();
        let psi0 = space.product_vacuum(&default_initial_spin(SpinBasis::X, 2)).unwrap();
        let opts = EvolveOptions {
            frames: h.frames(),
            ..Default::default()
        };
        let psi = evolve_statevector(&h.build(&modes).unwrap(), &space, tau_s * modes.trap_freq, &psi0, &opts).unwrap();
        let zero = C64::new(0.0, 0.0);
        let bell = [C64::new(FRAC_1_SQRT_2, 0.0), zero, zero, C64::new(0.0, -FRAC_1_SQRT_2)];
        let f = state_fidelity(&psi, &space, &bell).unwrap();
        assert!(f > 1.0 - 1e-9, "loops {loops}: 1 − F = {:e}", 1.0 - f);
    }
}
