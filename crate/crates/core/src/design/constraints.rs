// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! The multichromatic constraint system: linear closure maps and quadratic
//! phase kernels for every mode.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::kernels::{linear_cos, linear_sin, phase_kernel, tone_frequencies, Quadrature};
use crate::chain::ModeData;
use crate::error::{Error, Result};

/// Phase kernels of one mode. `xy[k][l]` pairs quadrature `x` of tone `k` at
/// the later time with quadrature `y` of tone `l` at the earlier time.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseKernels {
    pub ss: DMatrix<f64>,
    pub sc: DMatrix<f64>,
    pub cs: DMatrix<f64>,
    pub cc: DMatrix<f64>,
}

impl PhaseKernels {
    pub fn get(&self, x: Quadrature, y: Quadrature) -> &DMatrix<f64> {
        match (x, y) {
            (Quadrature::Sin, Quadrature::Sin) => &self.ss,
            (Quadrature::Sin, Quadrature::Cos) => &self.sc,
            (Quadrature::Cos, Quadrature::Sin) => &self.cs,
            (Quadrature::Cos, Quadrature::Cos) => &self.cc,
        }
    }

    /// `Q(f, g) = ∫∫_{t''<t'} f(t') g(t'') sin ω(t'−t'')` for
    /// `f = Σ a_f sin + c_f cos`, `g = Σ a_g sin + c_g cos`.
    pub fn ordered_phase(&self, a_f: &[f64], c_f: &[f64], a_g: &[f64], c_g: &[f64]) -> f64 {
        bilinear(&self.ss, a_f, a_g)
            + bilinear(&self.sc, a_f, c_g)
            + bilinear(&self.cs, c_f, a_g)
            + bilinear(&self.cc, c_f, c_g)
    }
}

pub(crate) fn bilinear(m: &DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (k, xk) in x.iter().enumerate() {
        if *xk == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for (l, yl) in y.iter().enumerate() {
            row += m[(k, l)] * yl;
        }
        acc += xk * row;
    }
    acc
}

/// Orthonormal basis of the joint kernel of the linear closure rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSpace {
    /// `K × d`, orthonormal columns.
    pub basis: DMatrix<f64>,
    pub rank: usize,
    pub rows: usize,
    pub singular_values: Vec<f64>,
}

impl NullSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Relative threshold below which a singular value counts as zero.
pub const NULL_SPACE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSystem {
    /// Gate duration in units of `1/ω_z`.
    pub tau: f64,
    pub harmonics: usize,
    pub robust: bool,
    pub mode_frequencies: Vec<f64>,
    pub tones: Vec<f64>,
    /// `L[m,k] = ∫₀^τ sin(ν_k t) e^{iω_m t} dt`.
    pub linear_sin: DMatrix<C64>,
    /// `L̃[m,k] = ∫₀^τ cos(ν_k t) e^{iω_m t} dt`.
    pub linear_cos: DMatrix<C64>,
    pub kernels: Vec<PhaseKernels>,
}

impl ConstraintSystem {
    /// Assemble every closed-form entry for the given modes, duration
    /// (units of `1/ω_z`) and harmonic count.
    pub fn build(modes: &ModeData, tau: f64, harmonics: usize, robust: bool) -> Result<Self> {
        Self::from_frequencies(&modes.frequencies, tau, harmonics, robust)
    }

    pub fn from_frequencies(frequencies: &[f64], tau: f64, harmonics: usize, robust: bool) -> Result<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::invalid("gate duration must be positive"));
        }
        let tones = tone_frequencies(tau, harmonics);
        let m = frequencies.len();
        let k = harmonics;
        let linear_sin = DMatrix::from_fn(m, k, |i, j| linear_sin(frequencies[i], tones[j], tau));
        let linear_cos = DMatrix::from_fn(m, k, |i, j| linear_cos(frequencies[i], tones[j], tau));
        let kernels = frequencies
            .iter()
            .map(|&w| {
                let g = |x, y| DMatrix::from_fn(k, k, |a, b| phase_kernel(x, tones[a], y, tones[b], w, tau));
                PhaseKernels {
                    ss: g(Quadrature::Sin, Quadrature::Sin),
                    sc: g(Quadrature::Sin, Quadrature::Cos),
                    cs: g(Quadrature::Cos, Quadrature::Sin),
                    cc: g(Quadrature::Cos, Quadrature::Cos),
                }
            })
            .collect();
        let system = ConstraintSystem {
            tau,
            harmonics,
            robust,
            mode_frequencies: frequencies.to_vec(),
            tones,
            linear_sin,
            linear_cos,
            kernels,
        };
        if !system.all_finite() {
            return Err(Error::domain("non-finite constraint entry"));
        }
        Ok(system)
    }

    fn all_finite(&self) -> bool {
        self.linear_sin
            .iter()
            .chain(self.linear_cos.iter())
            .all(|v| v.re.is_finite() && v.im.is_finite())
            && self.kernels.iter().all(|g| {
                [&g.ss, &g.sc, &g.cs, &g.cc]
                    .iter()
                    .all(|m| m.iter().all(|v| v.is_finite()))
            })
    }

    pub fn n_modes(&self) -> usize {
        self.mode_frequencies.len()
    }

    /// Real closure rows: `Re L`, `Im L` per mode, followed by the cosine
    /// branch when robust.
    pub fn linear_rows(&self) -> DMatrix<f64> {
        let m = self.n_modes();
        let k = self.harmonics;
        let blocks = if self.robust { 4 } else { 2 };
        let mut rows = DMatrix::zeros(blocks * m, k);
        for i in 0..m {
            for j in 0..k {
                rows[(2 * i, j)] = self.linear_sin[(i, j)].re;
                rows[(2 * i + 1, j)] = self.linear_sin[(i, j)].im;
                if self.robust {
                    rows[(2 * m + 2 * i, j)] = self.linear_cos[(i, j)].re;
                    rows[(2 * m + 2 * i + 1, j)] = self.linear_cos[(i, j)].im;
                }
            }
        }
        rows
    }

    /// Null space of [`ConstraintSystem::linear_rows`] by SVD.
    pub fn null_space(&self) -> NullSpace {
        let rows = self.linear_rows();
        let k = self.harmonics;
        let n_rows = rows.nrows();
        if k == 0 {
            return NullSpace {
                basis: DMatrix::zeros(0, 0),
                rank: 0,
                rows: n_rows,
                singular_values: Vec::new(),
            };
        }
        // Pad to square so the SVD returns a complete right basis.
        let size = n_rows.max(k);
        let mut padded = DMatrix::zeros(size, k);
        padded.view_mut((0, 0), (n_rows, k)).copy_from(&rows);
        let svd = padded.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let sigma: Vec<f64> = svd.singular_values.iter().cloned().collect();
        let smax = sigma.iter().cloned().fold(0.0, f64::max);
        let cut = NULL_SPACE_THRESHOLD * smax;
        let mut order: Vec<usize> = (0..sigma.len()).collect();
        order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
        let rank = if smax == 0.0 {
            0
        } else {
            sigma.iter().filter(|&&s| s > cut).count()
        };
        let null_idx: Vec<usize> = order[rank..].to_vec();
        let mut basis = DMatrix::zeros(k, null_idx.len());
        for (c, &i) in null_idx.iter().enumerate() {
            for j in 0..k {
                basis[(j, c)] = v_t[(i, j)];
            }
        }
        let mut sorted = sigma;
        sorted.sort_by(|a, b| b.total_cmp(a));
        NullSpace {
            basis,
            rank,
            rows: n_rows,
            singular_values: sorted,
        }
    }

    /// `∫₀^τ f(t) e^{iω_m t}` for `f = Σ a_k sin ν_k t + c_k cos ν_k t`.
    pub fn displacement(&self, mode: usize, a: &[f64], c: &[f64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.harmonics {
            acc += self.linear_sin[(mode, k)] * a[k] + self.linear_cos[(mode, k)] * c[k];
        }
        acc
    }

    /// `Q_m(f, g)`; see [`PhaseKernels::ordered_phase`].
    pub fn ordered_phase(&self, mode: usize, a_f: &[f64], c_f: &[f64], a_g: &[f64], c_g: &[f64]) -> f64 {
        self.kernels[mode].ordered_phase(a_f, c_f, a_g, c_g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn null_space_dimension_counts_rows() {
        let tau = 3.2 * TAU;
        let plain = ConstraintSystem::from_frequencies(&[1.0, 3f64.sqrt()], tau, 30, false).unwrap();
        let ns = plain.null_space();
        // Re and Im rows of each mode are collinear for commensurate tones.
        assert_eq!(ns.rank, 2);
        assert_eq!(ns.dim(), 28);
        let rows = plain.linear_rows();
        assert!((rows * &ns.basis).abs().max() < 1e-12);
        let gram = ns.basis.transpose() * &ns.basis;
        assert!((gram - DMatrix::identity(28, 28)).abs().max() < 1e-12);

        let robust = ConstraintSystem::from_frequencies(&[1.0, 3f64.sqrt()], tau, 30, true).unwrap();
        assert_eq!(robust.null_space().dim(), 26);
    }

    #[test]
    fn too_few_harmonics_leave_no_null_space() {
        let s = ConstraintSystem::from_frequencies(&[1.0, 3f64.sqrt()], 20.0, 2, false).unwrap();
        assert_eq!(s.null_space().dim(), 0);
        let empty = ConstraintSystem::from_frequencies(&[1.0], 20.0, 0, false).unwrap();
        assert_eq!(empty.null_space().dim(), 0);
    }

    #[test]
    fn robust_closure_forces_equal_phase_branches() {
        let tau = 2.0 * TAU;
        let s = ConstraintSystem::from_frequencies(&[1.0, 3f64.sqrt()], tau, 20, true).unwrap();
        let ns = s.null_space();
        let r: Vec<f64> = ns.basis.column(3).iter().cloned().collect();
        let zero = vec![0.0; 20];
        for m in 0..2 {
            let ss = s.ordered_phase(m, &r, &zero, &r, &zero);
            let cc = s.ordered_phase(m, &zero, &r, &zero, &r);
            let cross = s.ordered_phase(m, &r, &zero, &zero, &r) + s.ordered_phase(m, &zero, &r, &r, &zero);
            assert!((ss - cc).abs() < 1e-12 * (1.0 + ss.abs()));
            assert!(cross.abs() < 1e-12 * (1.0 + ss.abs()));
        }
    }

    #[test]
    fn rejects_bad_duration() {
        assert!(ConstraintSystem::from_frequencies(&[1.0], 0.0, 3, false).is_err());
    }
}
