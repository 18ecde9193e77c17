// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Linear Coulomb crystals: equilibrium positions, normal modes and
//! site/mode-resolved Lamb-Dicke parameters.
//!
//! Positions are measured in units of `ℓ = (e²/(4πε₀ M ω_z²))^{1/3}` and
//! frequencies in units of `ω_z`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{ELEMENTARY_CHARGE, HBAR, VACUUM_PERMITTIVITY};

/// Motional axis that the net Raman wave vector couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Axial,
    Transverse,
}

/// Physical parameters of a chain, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IonChainSpec {
    pub n_ions: usize,
    /// Axial trap frequency `ω_z` (rad/s).
    pub axial_freq: f64,
    /// Transverse trap frequency `ω_x` (rad/s); required for transverse coupling.
    pub transverse_freq: Option<f64>,
    /// Ion mass (kg).
    pub ion_mass: f64,
    /// Net transferred wave vector `δk` (1/m).
    pub wavevector: f64,
    pub coupled_axis: Axis,
}

impl IonChainSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_ions == 0 {
            return Err(Error::invalid("n_ions must be at least 1"));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.axial_freq) {
            return Err(Error::invalid("axial frequency must be positive"));
        }
        if !positive(self.ion_mass) {
            return Err(Error::invalid("ion mass must be positive"));
        }
        if !positive(self.wavevector) {
            return Err(Error::invalid("wave vector must be positive"));
        }
        if self.coupled_axis == Axis::Transverse {
            match self.transverse_freq {
                Some(w) if positive(w) => {}
                _ => {
                    return Err(Error::invalid(
                        "transverse coupling requires a positive transverse frequency",
                    ))
                }
            }
        }
        Ok(())
    }

    /// Coulomb length scale `ℓ` in metres.
    pub fn length_scale(&self) -> f64 {
        let k = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY);
        (k / (self.ion_mass * self.axial_freq * self.axial_freq)).cbrt()
    }

    /// Zero-point extent `sqrt(ħ/(2Mω))` for an angular frequency in rad/s.
    pub fn zero_point_length(&self, omega_rad_s: f64) -> f64 {
        (HBAR / (2.0 * self.ion_mass * omega_rad_s)).sqrt()
    }

    /// Wave vector that gives the centre-of-mass mode of the coupled axis the
    /// Lamb-Dicke parameter `eta_com`.
    pub fn wavevector_for_com_lamb_dicke(&self, eta_com: f64) -> f64 {
        let com = match self.coupled_axis {
            Axis::Axial => self.axial_freq,
            Axis::Transverse => self.transverse_freq.unwrap_or(self.axial_freq),
        };
        eta_com / self.zero_point_length(com)
    }
}

/// Normal modes of the coupled axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeData {
    pub axis: Axis,
    /// `ω_z` in rad/s; the unit of [`ModeData::frequencies`].
    pub trap_freq: f64,
    /// Equilibrium positions in units of `ℓ`.
    pub positions: Vec<f64>,
    /// Mode frequencies in units of `ω_z`. Axial modes ascend (centre of mass
    /// first), transverse modes descend (centre of mass first).
    pub frequencies: Vec<f64>,
    /// `b_{i,m}`: rows are ions, columns are modes.
    pub mode_matrix: DMatrix<f64>,
    /// `η_m = δk sqrt(ħ/(2Mω_m))`.
    pub mode_lamb_dicke: Vec<f64>,
    /// `η_{i,m} = η_m b_{i,m}`.
    pub lamb_dicke: DMatrix<f64>,
}

impl ModeData {
    pub fn n_ions(&self) -> usize {
        self.mode_matrix.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies_rad_s(&self) -> Vec<f64> {
        self.frequencies.iter().map(|w| w * self.trap_freq).collect()
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequencies.iter().cloned().fold(0.0, f64::max)
    }

    /// Copy restricted to a subset of modes, in the given order.
    pub fn select_modes(&self, modes: &[usize]) -> Result<ModeData> {
        let n = self.n_ions();
        for &m in modes {
            if m >= self.n_modes() {
                return Err(Error::invalid(format!("mode index {m} out of range")));
            }
        }
        let pick = |src: &DMatrix<f64>| DMatrix::from_fn(n, modes.len(), |i, j| src[(i, modes[j])]);
        Ok(ModeData {
            axis: self.axis,
            trap_freq: self.trap_freq,
            positions: self.positions.clone(),
            frequencies: modes.iter().map(|&m| self.frequencies[m]).collect(),
            mode_matrix: pick(&self.mode_matrix),
            mode_lamb_dicke: modes.iter().map(|&m| self.mode_lamb_dicke[m]).collect(),
            lamb_dicke: pick(&self.lamb_dicke),
        })
    }
}

/// Net force on each ion (harmonic + Coulomb), dimensionless.
fn forces(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let mut f = -u[i];
            for j in 0..n {
                if j != i {
                    let d = u[i] - u[j];
                    f += d.signum() / (d * d);
                }
            }
            f
        })
        .collect()
}

/// Axial Hessian: `A_ii = 1 + 2Σ 1/|u_i−u_j|³`, `A_ij = −2/|u_i−u_j|³`.
fn axial_hessian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = 1.0;
        for j in 0..n {
            if j != i {
                let c = 1.0 / (u[i] - u[j]).abs().powi(3);
                a[(i, i)] += 2.0 * c;
                a[(i, j)] = -2.0 * c;
            }
        }
    }
    a
}

/// Coulomb part of the transverse Hessian: `C_ii = Σ 1/|u_i−u_j|³`,
/// `C_ij = −1/|u_i−u_j|³`; the transverse Hessian is `β² I − C`.
fn transverse_coupling(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if j != i {
                let k = 1.0 / (u[i] - u[j]).abs().powi(3);
                c[(i, i)] += k;
                c[(i, j)] = -k;
            }
        }
    }
    c
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

const FORCE_TOLERANCE: f64 = 1e-12;

/// Dimensionless equilibrium positions, ascending and symmetric about zero.
pub fn equilibrium_positions(spec: &IonChainSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    solve_equilibrium(spec.n_ions)
}

pub(crate) fn solve_equilibrium(n: usize) -> Result<Vec<f64>> {
    if n == 1 {
        return Ok(vec![0.0]);
    }
    // Uniform seed with the empirical spacing of large chains.
    let spacing = 2.0 * (n as f64).powf(-0.56);
    let mut u: Vec<f64> = (0..n).map(|i| (i as f64 - 0.5 * (n - 1) as f64) * spacing).collect();
    let mut f = forces(&u);
    for _ in 0..200 {
        let res = max_abs(&f);
        if res < FORCE_TOLERANCE {
            break;
        }
        // Jacobian of the force is minus the axial Hessian.
        let hess = axial_hessian(&u);
        let step = hess
            .lu()
            .solve(&DVector::from_column_slice(&f))
            .ok_or(Error::NonConvergence {
                what: "equilibrium Newton step",
                residual: res,
            })?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x + lambda * s).collect();
            let ordered = trial.windows(2).all(|w| w[1] > w[0]);
            if ordered {
                let ft = forces(&trial);
                if max_abs(&ft) < res || lambda < 1e-4 {
                    u = trial;
                    f = ft;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return Err(Error::NonConvergence {
                    what: "equilibrium line search",
                    residual: res,
                });
            }
        }
    }
    // Remove the roundoff asymmetry, then confirm the balance still holds.
    let sym: Vec<f64> = (0..n).map(|i| 0.5 * (u[i] - u[n - 1 - i])).collect();
    let res = max_abs(&forces(&sym));
    if res >= FORCE_TOLERANCE {
        return Err(Error::NonConvergence {
            what: "equilibrium positions",
            residual: res,
        });
    }
    Ok(sym)
}

/// Flip each column so that its first non-negligible entry is positive.
fn fix_signs(b: &mut DMatrix<f64>) {
    for mut col in b.column_iter_mut() {
        if let Some(&first) = col.iter().find(|v| v.abs() > 1e-8) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
}

/// Collective modes of the coupled axis, with Lamb-Dicke parameters.
pub fn normal_modes(spec: &IonChainSpec) -> Result<ModeData> {
    spec.validate()?;
    let u = solve_equilibrium(spec.n_ions)?;
    let n = spec.n_ions;

    let (hessian, ascending) = match spec.coupled_axis {
        Axis::Axial => (axial_hessian(&u), true),
        Axis::Transverse => {
            let beta = spec.transverse_freq.unwrap_or_default() / spec.axial_freq;
            let c = transverse_coupling(&u);
            let critical = if n > 1 {
                SymmetricEigen::new(c.clone())
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::MIN, f64::max)
                    .max(0.0)
                    .sqrt()
            } else {
                0.0
            };
            if beta <= critical {
                return Err(Error::Unstable {
                    ratio: beta,
                    critical_ratio: critical,
                });
            }
            (DMatrix::identity(n, n) * (beta * beta) - c, false)
        }
    };

    let eig = SymmetricEigen::new(hessian);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        if ascending {
            x.total_cmp(&y)
        } else {
            y.total_cmp(&x)
        }
    });

    let mut frequencies = Vec::with_capacity(n);
    let mut b = DMatrix::zeros(n, n);
    for (m, &k) in order.iter().enumerate() {
        let lam = eig.eigenvalues[k];
        if !(lam > 0.0) {
            let ratio = spec.transverse_freq.unwrap_or_default() / spec.axial_freq;
            return Err(Error::Unstable {
                ratio,
                critical_ratio: f64::NAN,
            });
        }
        frequencies.push(lam.sqrt());
        b.set_column(m, &eig.eigenvectors.column(k));
    }
    fix_signs(&mut b);

    let (mode_lamb_dicke, lamb_dicke) = lamb_dicke_from(spec, &frequencies, &b);
    Ok(ModeData {
        axis: spec.coupled_axis,
        trap_freq: spec.axial_freq,
        positions: u,
        frequencies,
        mode_matrix: b,
        mode_lamb_dicke,
        lamb_dicke,
    })
}

fn lamb_dicke_from(spec: &IonChainSpec, frequencies: &[f64], b: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eta_m: Vec<f64> = frequencies
        .iter()
        .map(|w| spec.wavevector * spec.zero_point_length(w * spec.axial_freq))
        .collect();
    let eta = DMatrix::from_fn(b.nrows(), b.ncols(), |i, m| eta_m[m] * b[(i, m)]);
    (eta_m, eta)
}

/// `η_{i,m} = δk·sqrt(ħ/(2Mω_m))·b_{i,m}` for the given modes.
pub fn lamb_dicke(spec: &IonChainSpec, modes: &ModeData) -> Result<DMatrix<f64>> {
    spec.validate()?;
    if modes.n_ions() != spec.n_ions {
        return Err(Error::DimensionMismatch {
            what: "ions in mode data",
            expected: spec.n_ions,
            found: modes.n_ions(),
        });
    }
    Ok(lamb_dicke_from(spec, &modes.frequencies, &modes.mode_matrix).1)
}
