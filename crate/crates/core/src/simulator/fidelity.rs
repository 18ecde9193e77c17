// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Target states and spin-reduced fidelities.
//!
//! In the eigenbasis of `σ^α` a computational bit 0 carries eigenvalue
//! `s = +1` and bit 1 carries `s = −1`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::evolve::{apply_spin_frames, FockSpace};
use super::hamiltonian::Mat2;
use crate::design::{MagnusQuantities, SpinBasis};
use crate::error::{Error, Result};

/// Frame `V` with `V† σ^α V = σ^z`.
pub fn basis_frame(basis: SpinBasis) -> Mat2 {
    match basis {
        SpinBasis::X => Mat2::hadamard(),
        SpinBasis::Z => Mat2::IDENTITY,
    }
}

/// Eigenvalue of `σ^α_ion` on diagonal-frame basis state `s`.
fn eigenvalue(s: usize, ion: usize, n: usize) -> f64 {
    if s >> (n - 1 - ion) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `|0…0⟩` for the `x` basis and `|+…+⟩` for the `z` basis, so the input is
/// never an eigenstate of the interaction.
pub fn default_initial_spin(basis: SpinBasis, n_ions: usize) -> Vec<C64> {
    let dim = 1usize << n_ions;
    match basis {
        SpinBasis::X => {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[0] = C64::new(1.0, 0.0);
            v
        }
        SpinBasis::Z => vec![C64::new((dim as f64).sqrt().recip(), 0.0); dim],
    }
}

/// Pair phase `Σ_{i<j} J_{ij} s_i s_j` on every diagonal-frame basis state.
fn pair_phases(j: &DMatrix<f64>) -> Vec<f64> {
    let n = j.nrows();
    (0..1usize << n)
        .map(|s| {
            let mut acc = 0.0;
            for a in 0..n {
                for b in a + 1..n {
                    acc += j[(a, b)] * eigenvalue(s, a, n) * eigenvalue(s, b, n);
                }
            }
            acc
        })
        .collect()
}

fn check_square(j: &DMatrix<f64>, n: usize) -> Result<()> {
    if j.nrows() != n || j.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "coupling matrix size",
            expected: n,
            found: j.nrows(),
        });
    }
    Ok(())
}

fn spin_frame(spin: &[C64], n: usize, v: Mat2) -> Vec<C64> {
    let space = FockSpace {
        n_ions: n,
        cutoffs: vec![1],
    };
    let mut out = spin.to_vec();
    apply_spin_frames(&space, &vec![v; n], &mut out);
    out
}

/// `U_tar ψ₀` with `U_tar = exp(+i Σ_{i<j} J_{ij} σ^α_i σ^α_j)`.
pub fn target_state(j: &DMatrix<f64>, basis: SpinBasis, initial: &[C64]) -> Result<Vec<C64>> {
    let n = j.nrows();
    check_square(j, n)?;
    if initial.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            what: "spin state length",
            expected: 1 << n,
            found: initial.len(),
        });
    }
    let v = basis_frame(basis);
    let mut diag = spin_frame(initial, n, v.adjoint());
    for (a, phase) in diag.iter_mut().zip(pair_phases(j)) {
        *a *= C64::from_polar(1.0, phase);
    }
    Ok(spin_frame(&diag, n, v))
}

/// `⟨ψ_t| Tr_motion |Ψ⟩⟨Ψ| |ψ_t⟩` for `Ψ` in `space`.
pub fn state_fidelity(state: &[C64], space: &FockSpace, target: &[C64]) -> Result<f64> {
    if state.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            what: "state length",
            expected: space.dim(),
            found: state.len(),
        });
    }
    if target.len() != space.spin_dim() {
        return Err(Error::DimensionMismatch {
            what: "target spin state length",
            expected: space.spin_dim(),
            found: target.len(),
        });
    }
    let d = space.motion_dim();
    let mut f = 0.0;
    for n in 0..d {
        let amp: C64 = target
            .iter()
            .enumerate()
            .map(|(s, t)| t.conj() * state[s * d + n])
            .sum();
        f += amp.norm_sqr();
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Fidelity of a final state against the ideal coupling `J` from `initial`.
pub fn gate_fidelity(
    state: &[C64],
    space: &FockSpace,
    j: &DMatrix<f64>,
    basis: SpinBasis,
    initial: &[C64],
) -> Result<f64> {
    check_square(j, space.n_ions)?;
    state_fidelity(state, space, &target_state(j, basis, initial)?)
}

/// Per-basis-state data of the Magnus unitary
/// `U = Σ_s |s⟩⟨s| e^{iΣ_{i<j}Θ_{ij}s_i s_j} D(γ_s)`, `γ_{m,s} = −iΣ_i s_i β_{im}`.
fn magnus_branches(q: &MagnusQuantities) -> (Vec<f64>, Vec<Vec<C64>>) {
    let n = q.theta.nrows();
    let phases = pair_phases(&q.theta);
    let gamma = (0..1usize << n)
        .map(|s| {
            (0..q.beta.ncols())
                .map(|m| {
                    let sum: C64 = (0..n).map(|i| q.beta[(i, m)] * eigenvalue(s, i, n)).sum();
                    C64::new(0.0, -1.0) * sum
                })
                .collect()
        })
        .collect();
    (phases, gamma)
}

fn check_magnus(q: &MagnusQuantities, initial: &[C64]) -> Result<usize> {
    let n = q.theta.nrows();
    if q.beta.nrows() != n {
        return Err(Error::DimensionMismatch {
            what: "β rows versus Θ size",
            expected: n,
            found: q.beta.nrows(),
        });
    }
    if initial.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            what: "spin state length",
            expected: 1 << n,
            found: initial.len(),
        });
    }
    Ok(n)
}

/// Spin-reduced fidelity of the exact Magnus evolution from `initial ⊗ |vac⟩`,
/// with no Fock truncation: `F = Σ_{s,s'} A_s A_{s'}* Π_m ⟨γ_{s'}|γ_s⟩`.
pub fn magnus_fidelity(q: &MagnusQuantities, j: &DMatrix<f64>, basis: SpinBasis, initial: &[C64]) -> Result<f64> {
    let n = check_magnus(q, initial)?;
    check_square(j, n)?;
    let v = basis_frame(basis);
    let c = spin_frame(initial, n, v.adjoint());
    let t = spin_frame(&target_state(j, basis, initial)?, n, v.adjoint());
    let (phases, gamma) = magnus_branches(q);
    let amps: Vec<C64> = (0..1usize << n)
        .map(|s| t[s].conj() * c[s] * C64::from_polar(1.0, phases[s]))
        .collect();
    let mut f = C64::new(0.0, 0.0);
    for (s, a) in amps.iter().enumerate() {
        if a.norm() == 0.0 {
            continue;
        }
        for (s2, b) in amps.iter().enumerate() {
            if b.norm() == 0.0 {
                continue;
            }
            let mut overlap = 0.0_f64;
            let mut phase = 0.0_f64;
            for (x, y) in gamma[s].iter().zip(&gamma[s2]) {
                // ⟨y|x⟩ = exp(−|x|²/2 − |y|²/2 + y* x)
                let e = -0.5 * x.norm_sqr() - 0.5 * y.norm_sqr() + (y.conj() * x).re;
                overlap += e;
                phase += (y.conj() * x).im;
            }
            f += a * b.conj() * C64::from_polar(overlap.exp(), phase);
        }
    }
    Ok(f.re.clamp(0.0, 1.0))
}

/// Magnus final state `U ψ₀ ⊗ |vac⟩` projected onto `space`.
pub fn magnus_final_state(
    q: &MagnusQuantities,
    space: &FockSpace,
    basis: SpinBasis,
    initial: &[C64],
) -> Result<Vec<C64>> {
    let n = check_magnus(q, initial)?;
    if space.n_ions != n || space.cutoffs.len() != q.beta.ncols() {
        return Err(Error::DimensionMismatch {
            what: "Fock space versus Magnus quantities",
            expected: q.beta.ncols(),
            found: space.cutoffs.len(),
        });
    }
    let v = basis_frame(basis);
    let c = spin_frame(initial, n, v.adjoint());
    let (phases, gamma) = magnus_branches(q);
    let d = space.motion_dim();
    let strides: Vec<usize> = (0..space.cutoffs.len()).map(|m| space.stride(m)).collect();
    let mut psi = vec![C64::new(0.0, 0.0); space.dim()];
    for s in 0..space.spin_dim() {
        if c[s].norm() == 0.0 {
            continue;
        }
        let tables: Vec<Vec<C64>> = gamma[s]
            .iter()
            .zip(&space.cutoffs)
            .map(|(g, &cut)| coherent_amplitudes(*g, cut))
            .collect();
        let pre = c[s] * C64::from_polar(1.0, phases[s]);
        for k in 0..d {
            let mut a = pre;
            for (m, table) in tables.iter().enumerate() {
                a *= table[(k / strides[m]) % space.cutoffs[m]];
            }
            psi[s * d + k] = a;
        }
    }
    let mut framed = psi;
    apply_spin_frames(space, &vec![v; n], &mut framed);
    Ok(framed)
}

/// `e^{−|γ|²/2} γⁿ/√n!` for `n < cutoff`.
pub fn coherent_amplitudes(gamma: C64, cutoff: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(cutoff);
    let mut a = C64::new((-0.5 * gamma.norm_sqr()).exp(), 0.0);
    for n in 0..cutoff {
        out.push(a);
        a *= gamma / ((n + 1) as f64).sqrt();
    }
    out
}

/// `|⟨a|b⟩|²`.
pub fn overlap(a: &[C64], b: &[C64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "state lengths",
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn pair(j12: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, j12, j12, 0.0])
    }

    #[test]
    fn maximally_entangling_target_is_bell_state() {
        // exp(−iπ/4 σxσx)|00⟩ = (|00⟩ − i|11⟩)/√2, i.e. J = −π/4.
        let t = target_state(&pair(-FRAC_PI_4), SpinBasis::X, &default_initial_spin(SpinBasis::X, 2)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [
            C64::new(r, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, -r),
        ];
        for (a, b) in t.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn z_basis_target_is_phase_gate() {
        let psi0 = default_initial_spin(SpinBasis::Z, 2);
        let t = target_state(&pair(0.3), SpinBasis::Z, &psi0).unwrap();
        let signs = [1.0, -1.0, -1.0, 1.0];
        for (a, s) in t.iter().zip(signs) {
            assert!((a - C64::from_polar(0.5, 0.3 * s)).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_scheme_has_unit_fidelity() {
        let q = MagnusQuantities {
            beta: DMatrix::from_element(2, 2, C64::new(0.0, 0.0)),
            theta: DMatrix::zeros(2, 2),
        };
        for basis in [SpinBasis::X, SpinBasis::Z] {
            let psi0 = default_initial_spin(basis, 2);
            assert_eq!(magnus_fidelity(&q, &DMatrix::zeros(2, 2), basis, &psi0).unwrap(), 1.0);
            let space = FockSpace::new(2, vec![3, 3]).unwrap();
            let psi = space.product_vacuum(&psi0).unwrap();
            let f = gate_fidelity(&psi, &space, &DMatrix::zeros(2, 2), basis, &psi0).unwrap();
            assert!((f - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn analytic_and_truncated_fidelities_agree() {
        let q = MagnusQuantities {
            beta: DMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(0.2, -0.1),
                    C64::new(0.05, 0.0),
                    C64::new(0.2, -0.1),
                    C64::new(-0.05, 0.0),
                ],
            ),
            theta: pair(0.7),
        };
        let psi0 = default_initial_spin(SpinBasis::X, 2);
        let space = FockSpace::new(2, vec![14, 10]).unwrap();
        let state = magnus_final_state(&q, &space, SpinBasis::X, &psi0).unwrap();
        let norm: f64 = state.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        let j = pair(0.65);
        let truncated = gate_fidelity(&state, &space, &j, SpinBasis::X, &psi0).unwrap();
        let exact = magnus_fidelity(&q, &j, SpinBasis::X, &psi0).unwrap();
        assert!((truncated - exact).abs() < 1e-12, "{truncated} {exact}");
        assert!(exact < 1.0);
    }

    #[test]
    fn displaced_branches_lose_coherence() {
        // Single ion: F = |⟨+|ψ⟩|²-type dephasing e^{−2|β|²} factor on the coherence.
        let beta = 0.3;
        let q = MagnusQuantities {
            beta: DMatrix::from_element(1, 1, C64::new(beta, 0.0)),
            theta: DMatrix::zeros(1, 1),
        };
        let psi0 = default_initial_spin(SpinBasis::X, 1);
        let f = magnus_fidelity(&q, &DMatrix::zeros(1, 1), SpinBasis::X, &psi0).unwrap();
        let expect = 0.5 * (1.0 + (-2.0 * beta * beta).exp());
        assert!((f - expect).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_dimensions() {
        let space = FockSpace::new(2, vec![2, 2]).unwrap();
        let psi = vec![C64::new(0.0, 0.0); 15];
        assert!(state_fidelity(&psi, &space, &[C64::new(1.0, 0.0); 4]).is_err());
        assert!(target_state(&DMatrix::zeros(2, 3), SpinBasis::X, &[C64::new(1.0, 0.0); 4]).is_err());
    }
}
