// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Shared-amplitude (global) scheme synthesis.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::constraints::{ConstraintSystem, NullSpace};
use super::optimize::{augmented_lagrangian, lstsq, AlOptions, ConstrainedProblem};
use super::scheme::{ControlMode, ModulationScheme, SpinBasis};
use super::{lexicographic_less, normalise_sign, SearchOptions};
use crate::chain::ModeData;
use crate::error::{Error, RankReport, Result};

/// Accepted mismatch between a realised and a requested phase (radians).
pub const PHASE_TOLERANCE: f64 = 1e-9;

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn restrict(z: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    sym(&(z.transpose() * m * z))
}

/// Relative size below which an assembled constraint matrix is treated as
/// identically zero (it is implied by the closure conditions).
const IMPLIED_THRESHOLD: f64 = 1e-10;

fn normalised(m: DMatrix<f64>, reference: f64) -> Option<DMatrix<f64>> {
    let s = m.abs().max();
    if s > IMPLIED_THRESHOLD * reference {
        Some(m / s)
    } else {
        None
    }
}

/// Homogeneous quadratic programme on null-space coordinates:
/// maximise `yᵀPy/yᵀy` subject to `yᵀC_j y/yᵀy = 0`.
struct SphereProgram {
    objective: DMatrix<f64>,
    constraints: Vec<DMatrix<f64>>,
}

impl SphereProgram {
    fn quotient(a: &DMatrix<f64>, y: &DVector<f64>, n2: f64) -> (f64, DVector<f64>) {
        let ay = a * y;
        let q = y.dot(&ay) / n2;
        let grad = (ay - y * q) * (2.0 / n2);
        (q, grad)
    }
}

impl ConstrainedProblem for SphereProgram {
    fn dim(&self) -> usize {
        self.objective.nrows()
    }

    fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    fn objective(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let y = DVector::from_column_slice(x);
        let n2 = y.norm_squared().max(f64::MIN_POSITIVE);
        let (q, g) = Self::quotient(&self.objective, &y, n2);
        for (o, v) in grad.iter_mut().zip(g.iter()) {
            *o = -v;
        }
        -q
    }

    fn constraints(&self, x: &[f64], values: &mut [f64], jac: &mut DMatrix<f64>) {
        let y = DVector::from_column_slice(x);
        let n2 = y.norm_squared().max(f64::MIN_POSITIVE);
        for (j, c) in self.constraints.iter().enumerate() {
            let (q, g) = Self::quotient(c, &y, n2);
            values[j] = q;
            for k in 0..g.len() {
                jac[(j, k)] = g[k];
            }
        }
    }
}

impl SphereProgram {
    /// Newton iteration on the KKT system of the unit-sphere programme.
    fn polish(&self, y0: &DVector<f64>) -> DVector<f64> {
        let d = self.dim();
        let nc = self.n_constraints();
        let mut y = y0.normalize();
        let residual = |y: &DVector<f64>, lam: &DVector<f64>, nu: f64| -> (DVector<f64>, DMatrix<f64>) {
            let mut a = -&self.objective - DMatrix::identity(d, d) * nu;
            for (j, c) in self.constraints.iter().enumerate() {
                a += c * lam[j];
            }
            let mut f = DVector::zeros(d + nc + 1);
            f.rows_mut(0, d).copy_from(&(&a * y));
            let mut jac = DMatrix::zeros(d + nc + 1, d + nc + 1);
            jac.view_mut((0, 0), (d, d)).copy_from(&a);
            for (j, c) in self.constraints.iter().enumerate() {
                let cy = c * y;
                f[d + j] = 0.5 * y.dot(&cy);
                jac.view_mut((0, d + j), (d, 1)).copy_from(&cy);
                jac.view_mut((d + j, 0), (1, d)).copy_from(&cy.transpose());
            }
            f[d + nc] = 0.5 * (y.norm_squared() - 1.0);
            jac.view_mut((0, d + nc), (d, 1)).copy_from(&(-y));
            jac.view_mut((d + nc, 0), (1, d)).copy_from(&y.transpose());
            (f, jac)
        };
        // Multipliers that best explain stationarity at the starting point.
        let mut basis = DMatrix::zeros(d, nc + 1);
        for (j, c) in self.constraints.iter().enumerate() {
            basis.set_column(j, &(c * &y));
        }
        basis.set_column(nc, &(-&y));
        let fit = lstsq(&basis, &(&self.objective * &y), 1e-12);
        let mut lam = fit.rows(0, nc).into_owned();
        let mut nu = fit[nc];
        let (mut f, mut jac) = residual(&y, &lam, nu);
        let mut best = f.norm();
        for _ in 0..25 {
            if best < 1e-15 {
                break;
            }
            let step = lstsq(&jac, &f, 1e-13);
            let y_t = &y - step.rows(0, d);
            let lam_t = &lam - step.rows(d, nc);
            let nu_t = nu - step[d + nc];
            let (f_t, jac_t) = residual(&y_t, &lam_t, nu_t);
            if !(f_t.norm() < best) {
                break;
            }
            y = y_t;
            lam = lam_t;
            nu = nu_t;
            f = f_t;
            jac = jac_t;
            best = f.norm();
        }
        y.normalize()
    }
}

struct Candidate {
    objective: f64,
    r: Vec<f64>,
    rabi: f64,
}

/// Mode phases `Θ_m = η_m² Ω² rᵀ G_m r` (dimensionless `Ω`).
fn mode_phases(system: &ConstraintSystem, modes: &ModeData, r: &[f64], rabi: f64) -> Vec<f64> {
    let zero = vec![0.0; r.len()];
    (0..modes.n_modes())
        .map(|m| {
            let e = modes.mode_lamb_dicke[m];
            e * e * rabi * rabi * system.ordered_phase(m, r, &zero, r, &zero)
        })
        .collect()
}

fn rank_report(system: &ConstraintSystem, ns: &NullSpace, quadratic: usize, feasible: usize) -> RankReport {
    RankReport {
        harmonics: system.harmonics,
        linear_rows: ns.rows,
        linear_rank: ns.rank,
        null_dim: ns.dim(),
        quadratic_constraints: quadratic,
        feasible_restarts: feasible,
    }
}

/// Per-mode targets `Θ_m` reproducing the couplings `J` under global control.
///
/// `J_{ij} = 2Σ_m Θ_m b_{im} b_{jm}` only fixes `Θ` up to a common shift (it
/// changes the diagonal alone); the shift is chosen so that the last listed
/// mode carries no phase.
pub fn global_mode_targets(modes: &ModeData, couplings: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = modes.n_ions();
    let m = modes.n_modes();
    if couplings.nrows() != n || couplings.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "coupling matrix size",
            expected: n,
            found: couplings.nrows(),
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    if pairs.is_empty() {
        return Ok(vec![0.0; m]);
    }
    let b = &modes.mode_matrix;
    let a = DMatrix::from_fn(pairs.len(), m, |p, k| 2.0 * b[(pairs[p].0, k)] * b[(pairs[p].1, k)]);
    let rhs = DVector::from_iterator(pairs.len(), pairs.iter().map(|&(i, j)| couplings[(i, j)]));
    let theta = lstsq(&a, &rhs, 1e-12);
    let shift = theta[m - 1];
    let theta: DVector<f64> = theta.map(|t| t - shift);
    let residual = (&a * &theta - &rhs).abs().max();
    if residual > PHASE_TOLERANCE {
        return Err(Error::Infeasible {
            reason: format!(
                "couplings are outside the span of the mode projectors (residual {residual:e}); use individual control"
            ),
            report: RankReport {
                harmonics: 0,
                linear_rows: pairs.len(),
                linear_rank: m,
                null_dim: 0,
                quadratic_constraints: 0,
                feasible_restarts: 0,
            },
        });
    }
    Ok(theta.iter().cloned().collect())
}

/// Global scheme with `Θ₁ = theta1_target` and `Θ_{m>1} = 0`, default search.
pub fn design_global(
    modes: &ModeData,
    tau_s: f64,
    harmonics: usize,
    robust: bool,
    theta1_target: f64,
) -> Result<ModulationScheme> {
    let mut targets = vec![0.0; modes.n_modes()];
    if let Some(t) = targets.first_mut() {
        *t = theta1_target;
    }
    design_global_targets(modes, tau_s, harmonics, robust, &targets, &SearchOptions::default())
}

/// Global scheme realising the per-mode phases `targets` at minimal `|Ω|`.
pub fn design_global_targets(
    modes: &ModeData,
    tau_s: f64,
    harmonics: usize,
    robust: bool,
    targets: &[f64],
    opts: &SearchOptions,
) -> Result<ModulationScheme> {
    let n_modes = modes.n_modes();
    if targets.len() != n_modes {
        return Err(Error::DimensionMismatch {
            what: "per-mode phase targets",
            expected: n_modes,
            found: targets.len(),
        });
    }
    let tau = tau_s * modes.trap_freq;
    let system = ConstraintSystem::build(modes, tau, harmonics, robust)?;
    let ns = system.null_space();
    let d = ns.dim();
    let quadratic = if robust { 3 * n_modes } else { n_modes };
    let base = |opts_basis: SpinBasis| {
        let mut s = ModulationScheme::zero(tau_s, harmonics, modes.n_ions(), modes.trap_freq, ControlMode::Global);
        s.basis = opts_basis;
        s.robust = robust;
        s
    };
    // Each complex closure condition is counted as two real rows.
    let nominal_rows = if robust { 4 } else { 2 } * n_modes;
    if harmonics <= nominal_rows || d == 0 {
        return Err(Error::Infeasible {
            reason: "the closure constraints leave no admissible amplitude vector".into(),
            report: rank_report(&system, &ns, quadratic, 0),
        });
    }
    let p = (0..n_modes)
        .max_by(|&a, &b| targets[a].abs().total_cmp(&targets[b].abs()))
        .unwrap_or(0);
    let tp = targets[p];
    if tp == 0.0 {
        let mut s = base(opts.basis);
        s.amplitudes = vec![normalise_sign(ns.basis.column(0).iter().cloned().collect()); modes.n_ions()];
        return Ok(s);
    }
    if d < n_modes {
        return Err(Error::Infeasible {
            reason: format!("null-space dimension {d} is below the {n_modes} phase conditions"),
            report: rank_report(&system, &ns, quadratic, 0),
        });
    }

    let z = &ns.basis;
    let eta = &modes.mode_lamb_dicke;
    let sign = tp.signum();
    let g_ss: Vec<DMatrix<f64>> = system.kernels.iter().map(|k| restrict(z, &k.ss)).collect();
    let objective_raw = &g_ss[p] * (sign * eta[p] * eta[p]);
    let reference = g_ss
        .iter()
        .zip(eta.iter())
        .map(|(g, e)| g.abs().max() * e * e * tp.abs())
        .fold(0.0, f64::max);
    let mut constraints = Vec::new();
    for m in 0..n_modes {
        if m != p {
            let c = &g_ss[m] * (eta[m] * eta[m] * tp) - &g_ss[p] * (eta[p] * eta[p] * targets[m]);
            constraints.extend(normalised(c, reference));
        }
    }
    if robust {
        for m in 0..n_modes {
            let k = &system.kernels[m];
            let cc = restrict(z, &k.cc) * (eta[m] * eta[m] * tp) - &g_ss[p] * (eta[p] * eta[p] * targets[m]);
            constraints.extend(normalised(cc, reference));
            constraints.extend(normalised(
                restrict(z, &(&k.sc + &k.cs)) * (eta[m] * eta[m] * tp),
                reference,
            ));
        }
    }
    let program = SphereProgram {
        objective: normalised(objective_raw.clone(), 0.0).unwrap_or_else(|| objective_raw.clone()),
        constraints,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let al = AlOptions::default();
    let mut best: Option<Candidate> = None;
    for _ in 0..opts.restarts.max(1) {
        let y0: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let sol = augmented_lagrangian(&program, y0, &al);
        let y = program.polish(&DVector::from_vec(sol.x));
        let g = y.dot(&(&objective_raw * &y));
        if !(g > 0.0) {
            continue;
        }
        let r = normalise_sign((z * &y).iter().cloned().collect());
        let rabi = (tp.abs() / g).sqrt();
        let achieved = mode_phases(&system, modes, &r, rabi);
        let ok = achieved
            .iter()
            .zip(targets)
            .all(|(a, t)| (a - t).abs() < PHASE_TOLERANCE);
        if !ok {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => {
                let tie = (g - b.objective).abs() <= 1e-9 * b.objective;
                if tie {
                    lexicographic_less(&r, &b.r)
                } else {
                    g > b.objective
                }
            }
        };
        if better {
            best = Some(Candidate { objective: g, r, rabi });
        }
    }
    let best = best.ok_or_else(|| Error::Infeasible {
        reason: "no restart satisfied the phase conditions".into(),
        report: rank_report(&system, &ns, quadratic, 0),
    })?;
    let mut s = base(opts.basis);
    s.amplitudes = vec![best.r; modes.n_ions()];
    s.rabi_rad_s = vec![best.rabi * modes.trap_freq; modes.n_ions()];
    Ok(s)
}
