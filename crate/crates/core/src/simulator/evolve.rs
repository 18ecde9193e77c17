// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixed-step state-vector integration in a truncated Fock space.
//!
//! Basis ordering: `index = spin·D + motion`, where qubit 0 is the most
//! significant spin bit and mode 0 the most significant motional digit.

use num_complex::Complex64 as C64;

use super::hamiltonian::{Hamiltonian, Mat2, Motion};
use crate::error::{Error, Result};

/// Largest `ω·dt` allowed by [`auto_steps`].
pub const MAX_PHASE_PER_STEP: f64 = 0.1;

/// Population allowed in the top two Fock levels of any mode.
pub const LEAKAGE_TOLERANCE: f64 = 1e-7;

const TAYLOR_TOLERANCE: f64 = 1e-15;
const TAYLOR_MAX_TERMS: usize = 200;

/// Truncated Hilbert space of `n_ions` qubits and one oscillator per cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    pub n_ions: usize,
    /// Fock levels per mode (`n = 0..cutoff`).
    pub cutoffs: Vec<usize>,
}

impl FockSpace {
    pub fn new(n_ions: usize, cutoffs: Vec<usize>) -> Result<Self> {
        if cutoffs.contains(&0) {
            return Err(Error::invalid("Fock cutoffs must be at least 1"));
        }
        if n_ions > 20 {
            return Err(Error::invalid("at most 20 qubits are supported"));
        }
        Ok(FockSpace { n_ions, cutoffs })
    }

    pub fn spin_dim(&self) -> usize {
        1 << self.n_ions
    }

    pub fn motion_dim(&self) -> usize {
        self.cutoffs.iter().product()
    }

    pub fn dim(&self) -> usize {
        self.spin_dim() * self.motion_dim()
    }

    /// Stride of mode `m` inside the motional index.
    pub fn stride(&self, m: usize) -> usize {
        self.cutoffs[m + 1..].iter().product()
    }

    /// `spin ⊗ |0…0⟩` for a spin vector of length `2^N`.
    pub fn product_vacuum(&self, spin: &[C64]) -> Result<Vec<C64>> {
        if spin.len() != self.spin_dim() {
            return Err(Error::DimensionMismatch {
                what: "spin state length",
                expected: self.spin_dim(),
                found: spin.len(),
            });
        }
        let d = self.motion_dim();
        let mut psi = vec![C64::new(0.0, 0.0); self.dim()];
        for (s, a) in spin.iter().enumerate() {
            psi[s * d] = *a;
        }
        Ok(psi)
    }

    /// Occupation of each mode's digit for every motional index.
    fn digits(&self) -> Vec<Vec<usize>> {
        let d = self.motion_dim();
        (0..self.cutoffs.len())
            .map(|m| {
                let stride = self.stride(m);
                (0..d).map(|n| (n / stride) % self.cutoffs[m]).collect()
            })
            .collect()
    }

    /// Largest population found in the top two levels of any mode (never
    /// counting the vacuum), with the mode.
    pub fn edge_population(&self, psi: &[C64]) -> (usize, f64) {
        let d = self.motion_dim();
        let digits = self.digits();
        let mut worst = (0, 0.0);
        for (m, digit) in digits.iter().enumerate() {
            let cut = self.cutoffs[m];
            let lo = cut.saturating_sub(2).max(1);
            let mut p = 0.0;
            for (idx, a) in psi.iter().enumerate() {
                if digit[idx % d] >= lo {
                    p += a.norm_sqr();
                }
            }
            if p > worst.1 {
                worst = (m, p);
            }
        }
        worst
    }
}

/// Apply the tensor product `⊗_i V_i` to the spin factor of `psi`.
pub fn apply_spin_frames(space: &FockSpace, frames: &[Mat2], psi: &mut [C64]) {
    let n = space.n_ions;
    let d = space.motion_dim();
    for (ion, v) in frames.iter().enumerate() {
        let bit = 1usize << (n - 1 - ion);
        for s in 0..space.spin_dim() {
            if s & bit != 0 {
                continue;
            }
            let (s0, s1) = (s, s | bit);
            for k in 0..d {
                let a0 = psi[s0 * d + k];
                let a1 = psi[s1 * d + k];
                psi[s0 * d + k] = v.0[0][0] * a0 + v.0[0][1] * a1;
                psi[s1 * d + k] = v.0[1][0] * a0 + v.0[1][1] * a1;
            }
        }
    }
}

/// Static operator `Σ_k (c_k O_k + h.c.)` with the coefficients frozen.
trait Generator {
    fn apply(&self, psi: &[C64], out: &mut [C64]);
}

struct Ladder {
    /// `sqrt(n)` for `n < cutoff`, per mode.
    roots: Vec<Vec<f64>>,
    digits: Vec<Vec<usize>>,
    strides: Vec<usize>,
    cutoffs: Vec<usize>,
    d: usize,
}

impl Ladder {
    fn new(space: &FockSpace) -> Self {
        Ladder {
            roots: space
                .cutoffs
                .iter()
                .map(|&c| (0..c).map(|n| (n as f64).sqrt()).collect())
                .collect(),
            digits: space.digits(),
            strides: (0..space.cutoffs.len()).map(|m| space.stride(m)).collect(),
            cutoffs: space.cutoffs.clone(),
            d: space.motion_dim(),
        }
    }

    /// `out += c·a†_m x` on one motional block.
    fn raise(&self, m: usize, c: C64, x: &[C64], out: &mut [C64]) {
        let stride = self.strides[m];
        let top = self.cutoffs[m] - 1;
        for n in 0..self.d {
            let k = self.digits[m][n];
            if k < top {
                out[n + stride] += c * self.roots[m][k + 1] * x[n];
            }
        }
    }

    /// `out += c·a_m x` on one motional block.
    fn lower(&self, m: usize, c: C64, x: &[C64], out: &mut [C64]) {
        let stride = self.strides[m];
        for n in 0..self.d {
            let k = self.digits[m][n];
            if k > 0 {
                out[n - stride] += c * self.roots[m][k] * x[n];
            }
        }
    }
}

/// Spin-diagonal generator: every spin block evolves under its own
/// `Σ_m (R_m a†_m + R_m* a_m) + E`.
struct DiagonalGenerator<'a> {
    ladder: &'a Ladder,
    raise: Vec<Vec<C64>>,
    energy: Vec<f64>,
}

impl Generator for DiagonalGenerator<'_> {
    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        let d = self.ladder.d;
        for (s, (r, e)) in self.raise.iter().zip(&self.energy).enumerate() {
            let x = &psi[s * d..(s + 1) * d];
            let o = &mut out[s * d..(s + 1) * d];
            for (oi, xi) in o.iter_mut().zip(x) {
                *oi = xi * *e;
            }
            for (m, rm) in r.iter().enumerate() {
                if *rm != C64::new(0.0, 0.0) {
                    self.ladder.raise(m, *rm, x, o);
                    self.ladder.lower(m, rm.conj(), x, o);
                }
            }
        }
    }
}

/// General generator acting term by term.
struct TermGenerator<'a> {
    ladder: &'a Ladder,
    n_ions: usize,
    /// `(ion, spin, motion, coefficient)`, both `T` and `T†` listed.
    ops: Vec<(usize, Mat2, Motion, C64)>,
}

impl Generator for TermGenerator<'_> {
    fn apply(&self, psi: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        let d = self.ladder.d;
        let spin_dim = 1usize << self.n_ions;
        for (ion, spin, motion, c) in &self.ops {
            let bit = 1usize << (self.n_ions - 1 - ion);
            for s in 0..spin_dim {
                let b = usize::from(s & bit != 0);
                for b2 in 0..2 {
                    let entry = spin.0[b2][b];
                    if entry == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let s2 = if b2 == 1 { s | bit } else { s & !bit };
                    let w = c * entry;
                    let x = &psi[s * d..(s + 1) * d];
                    let o = &mut out[s2 * d..(s2 + 1) * d];
                    match motion {
                        Motion::Identity => {
                            for (oi, xi) in o.iter_mut().zip(x) {
                                *oi += w * xi;
                            }
                        }
                        Motion::Raise(m) => self.ladder.raise(*m, w, x, o),
                        Motion::Lower(m) => self.ladder.lower(*m, w, x, o),
                    }
                }
            }
        }
    }
}

fn adjoint_motion(m: Motion) -> Motion {
    match m {
        Motion::Identity => Motion::Identity,
        Motion::Lower(k) => Motion::Raise(k),
        Motion::Raise(k) => Motion::Lower(k),
    }
}

/// `psi ← exp(−i h G) psi` by Taylor series.
fn exp_apply<G: Generator>(g: &G, h: f64, psi: &mut [C64], scratch: &mut [C64]) -> Result<()> {
    let mut term = psi.to_vec();
    let factor = C64::new(0.0, -h);
    for k in 1..=TAYLOR_MAX_TERMS {
        g.apply(&term, scratch);
        let scale = factor / k as f64;
        let mut tn = 0.0;
        let mut sn = 0.0;
        for ((t, s), p) in term.iter_mut().zip(scratch.iter()).zip(psi.iter_mut()) {
            *t = s * scale;
            *p += *t;
            tn += t.norm_sqr();
            sn += p.norm_sqr();
        }
        if tn.sqrt() <= TAYLOR_TOLERANCE * sn.sqrt() {
            return Ok(());
        }
    }
    Err(Error::NonConvergence {
        what: "Taylor propagator",
        residual: term.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt(),
    })
}

/// Step count with `ω_max·dt < 0.1`, `ω_max` the fastest rotation in `h`.
pub fn auto_steps(h: &Hamiltonian, tau: f64) -> usize {
    ((h.max_frequency() * tau / MAX_PHASE_PER_STEP).floor() as usize + 1).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// `None` uses [`auto_steps`].
    pub steps: Option<usize>,
    /// Spin frames `V_i` in which the Hamiltonian is integrated; a
    /// spin-diagonal conjugated Hamiltonian enables the block fast path.
    pub frames: Option<Vec<Mat2>>,
    /// Fail with [`Error::Truncation`] above [`LEAKAGE_TOLERANCE`].
    pub check_leakage: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            steps: None,
            frames: None,
            check_leakage: true,
        }
    }
}

/// Integrate `i dψ/dt = H(t) ψ` over `[0, tau]` with the fourth-order
/// commutator-free Magnus scheme on Gauss nodes.
pub fn evolve_statevector(
    h: &Hamiltonian,
    space: &FockSpace,
    tau: f64,
    initial: &[C64],
    opts: &EvolveOptions,
) -> Result<Vec<C64>> {
    if h.n_ions != space.n_ions || h.n_modes != space.cutoffs.len() {
        return Err(Error::DimensionMismatch {
            what: "Hamiltonian versus Fock space modes",
            expected: space.cutoffs.len(),
            found: h.n_modes,
        });
    }
    if initial.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            what: "initial state length",
            expected: space.dim(),
            found: initial.len(),
        });
    }
    let norm0 = initial.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm0 - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("initial state has norm {norm0}")));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::invalid("evolution time must be non-negative"));
    }
    let steps = opts.steps.unwrap_or_else(|| auto_steps(h, tau));
    if steps == 0 {
        return Err(Error::invalid("step count must be positive"));
    }

    let mut psi = initial.to_vec();
    let h_frame = match &opts.frames {
        Some(frames) => {
            if frames.len() != space.n_ions {
                return Err(Error::DimensionMismatch {
                    what: "spin frames",
                    expected: space.n_ions,
                    found: frames.len(),
                });
            }
            let inverse: Vec<Mat2> = frames.iter().map(|v| v.adjoint()).collect();
            apply_spin_frames(space, &inverse, &mut psi);
            h.conjugated(frames)
        }
        None => h.clone(),
    };

    let ladder = Ladder::new(space);
    let diagonal = h_frame.is_spin_diagonal();
    let mut scratch = vec![C64::new(0.0, 0.0); space.dim()];
    let dt = tau / steps as f64;
    let r3 = 3f64.sqrt();
    let (c1, c2) = (0.5 - r3 / 6.0, 0.5 + r3 / 6.0);
    let (a1, a2) = (0.25 - r3 / 6.0, 0.25 + r3 / 6.0);
    let mut coeff = vec![C64::new(0.0, 0.0); h_frame.terms.len()];
    for step in 0..steps {
        let t0 = step as f64 * dt;
        let (t1, t2) = (t0 + c1 * dt, t0 + c2 * dt);
        let v1: Vec<C64> = h_frame.terms.iter().map(|t| t.coeff.eval(t1)).collect();
        let v2: Vec<C64> = h_frame.terms.iter().map(|t| t.coeff.eval(t2)).collect();
        for (w1, w2) in [(a2, a1), (a1, a2)] {
            for (c, (x, y)) in coeff.iter_mut().zip(v1.iter().zip(&v2)) {
                *c = x * w1 + y * w2;
            }
            if diagonal {
                let g = diagonal_generator(&h_frame, space, &ladder, &coeff);
                exp_apply(&g, dt, &mut psi, &mut scratch)?;
            } else {
                let g = term_generator(&h_frame, &ladder, &coeff);
                exp_apply(&g, dt, &mut psi, &mut scratch)?;
            }
        }
    }

    if let Some(frames) = &opts.frames {
        apply_spin_frames(space, frames, &mut psi);
    }
    let n = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NonConvergence {
            what: "norm conservation",
            residual: (n - 1.0).abs(),
        });
    }
    if opts.check_leakage {
        let (mode, population) = space.edge_population(&psi);
        if population > LEAKAGE_TOLERANCE {
            return Err(Error::Truncation {
                mode,
                population,
                cutoff: space.cutoffs[mode],
            });
        }
    }
    Ok(psi)
}

fn diagonal_generator<'a>(
    h: &Hamiltonian,
    space: &FockSpace,
    ladder: &'a Ladder,
    coeff: &[C64],
) -> DiagonalGenerator<'a> {
    let n = space.n_ions;
    let spin_dim = space.spin_dim();
    let mut raise = vec![vec![C64::new(0.0, 0.0); h.n_modes]; spin_dim];
    let mut energy = vec![0.0; spin_dim];
    for (term, c) in h.terms.iter().zip(coeff) {
        let bit = 1usize << (n - 1 - term.ion);
        for s in 0..spin_dim {
            let b = usize::from(s & bit != 0);
            let v = c * term.spin.0[b][b];
            match term.motion {
                Motion::Raise(m) => raise[s][m] += v,
                Motion::Lower(m) => raise[s][m] += v.conj(),
                Motion::Identity => energy[s] += 2.0 * v.re,
            }
        }
    }
    DiagonalGenerator { ladder, raise, energy }
}

fn term_generator<'a>(h: &Hamiltonian, ladder: &'a Ladder, coeff: &[C64]) -> TermGenerator<'a> {
    let mut ops = Vec::with_capacity(2 * h.terms.len());
    for (term, c) in h.terms.iter().zip(coeff) {
        if *c == C64::new(0.0, 0.0) {
            continue;
        }
        ops.push((term.ion, term.spin, term.motion, *c));
        ops.push((term.ion, term.spin.adjoint(), adjoint_motion(term.motion), c.conj()));
    }
    TermGenerator {
        ladder,
        n_ions: h.n_ions,
        ops,
    }
}
