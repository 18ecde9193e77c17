// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Individually addressed scheme synthesis.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::constraints::ConstraintSystem;
use super::global::PHASE_TOLERANCE;
use super::optimize::{augmented_lagrangian, project_onto_constraints, AlOptions, ConstrainedProblem};
use super::scheme::{ControlMode, ModulationScheme};
use super::{lexicographic_less, DesignProblem, SearchOptions};
use crate::chain::ModeData;
use crate::error::{Error, RankReport, Result};
use crate::numerics::norm;

/// Relative size below which a pair matrix counts as identically zero.
const IMPLIED_THRESHOLD: f64 = 1e-10;

/// Exponent of the smooth surrogate for `max_i ‖x_i‖²`.
const SURROGATE_POWER: i32 = 4;

/// Bilinear pair condition `y_aᵀ S y_b = target`, stored pre-scaled.
struct PairCondition {
    a: usize,
    b: usize,
    matrix: DMatrix<f64>,
    target: f64,
}

struct PairProgram {
    d: usize,
    ions: usize,
    conditions: Vec<PairCondition>,
}

impl PairProgram {
    fn block<'a>(&self, x: &'a [f64], a: usize) -> &'a [f64] {
        &x[a * self.d..(a + 1) * self.d]
    }
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

fn mat_t_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| m[(i, j)] * v[i]).sum())
        .collect()
}

impl ConstrainedProblem for PairProgram {
    fn dim(&self) -> usize {
        self.d * self.ions
    }

    fn n_constraints(&self) -> usize {
        self.conditions.len()
    }

    fn objective(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let p = SURROGATE_POWER;
        let u: Vec<f64> = (0..self.ions)
            .map(|a| self.block(x, a).iter().map(|v| v * v).sum())
            .collect();
        let umax = u.iter().cloned().fold(0.0, f64::max);
        if umax == 0.0 {
            grad.iter_mut().for_each(|g| *g = 0.0);
            return 0.0;
        }
        // F = umax·(Σ (u/umax)^p)^{1/p}, scaled to avoid overflow.
        let s: f64 = u.iter().map(|v| (v / umax).powi(p)).sum();
        let f = umax * s.powf(1.0 / p as f64);
        for a in 0..self.ions {
            let w = (u[a] / f).powi(p - 1);
            for k in 0..self.d {
                grad[a * self.d + k] = 2.0 * w * x[a * self.d + k];
            }
        }
        f
    }

    fn constraints(&self, x: &[f64], values: &mut [f64], jac: &mut DMatrix<f64>) {
        jac.fill(0.0);
        for (j, c) in self.conditions.iter().enumerate() {
            let ya = self.block(x, c.a);
            let yb = self.block(x, c.b);
            let syb = mat_vec(&c.matrix, yb);
            let sya = mat_t_vec(&c.matrix, ya);
            values[j] = ya.iter().zip(&syb).map(|(p, q)| p * q).sum::<f64>() - c.target;
            for k in 0..self.d {
                jac[(j, c.a * self.d + k)] += syb[k];
                jac[(j, c.b * self.d + k)] += sya[k];
            }
        }
    }
}

fn validate_couplings(problem: &DesignProblem, n: usize) -> Result<DMatrix<f64>> {
    let j = match &problem.couplings {
        Some(j) => j.clone(),
        None => {
            return Err(Error::invalid("individual control requires a coupling matrix"));
        }
    };
    if j.nrows() != n || j.ncols() != n {
        return Err(Error::DimensionMismatch {
            what: "coupling matrix size",
            expected: n,
            found: j.nrows(),
        });
    }
    for a in 0..n {
        if j[(a, a)] != 0.0 {
            return Err(Error::invalid("coupling matrix must have a zero diagonal"));
        }
        for b in 0..n {
            if (j[(a, b)] - j[(b, a)]).abs() > 1e-12 * (1.0 + j[(a, b)].abs()) {
                return Err(Error::invalid("coupling matrix must be symmetric"));
            }
            if !j[(a, b)].is_finite() {
                return Err(Error::invalid("coupling matrix has non-finite entries"));
            }
        }
    }
    Ok(j)
}

/// Per-ion scheme meeting `β_{i,m}(τ) = 0` and `Θ_{i,j}(τ) = J_{i,j}` with the
/// smallest peak Rabi frequency found.
pub fn design_individual(
    modes: &ModeData,
    tau_s: f64,
    harmonics: usize,
    problem: &DesignProblem,
) -> Result<ModulationScheme> {
    let n = modes.n_ions();
    let n_modes = modes.n_modes();
    let couplings = validate_couplings(problem, n)?;
    let active = problem.active_set(n)?;
    for a in 0..n {
        for b in 0..n {
            if couplings[(a, b)] != 0.0 && !(active[a] && active[b]) {
                return Err(Error::invalid(format!(
                    "coupling between ions {} and {} involves an inactive ion",
                    a + 1,
                    b + 1
                )));
            }
        }
    }
    let ions: Vec<usize> = (0..n).filter(|&a| active[a]).collect();
    let mut scheme = ModulationScheme::zero(tau_s, harmonics, n, modes.trap_freq, ControlMode::Individual);
    scheme.robust = problem.robust;
    scheme.basis = problem.search.basis;
    if harmonics == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    let pairs: Vec<(usize, usize)> = (0..ions.len())
        .flat_map(|a| (a + 1..ions.len()).map(move |b| (a, b)))
        .collect();
    if pairs.iter().all(|&(a, b)| couplings[(ions[a], ions[b])] == 0.0) {
        return Ok(scheme);
    }

    let tau = tau_s * modes.trap_freq;
    let system = ConstraintSystem::build(modes, tau, harmonics, problem.robust)?;
    let ns = system.null_space();
    let d = ns.dim();
    let linear_rows = if problem.robust { 4 } else { 2 } * n_modes * ions.len();
    let quadratic = pairs.len() * if problem.robust { 3 } else { 1 };
    let report = |feasible| RankReport {
        harmonics,
        linear_rows,
        linear_rank: ns.rank * ions.len(),
        null_dim: d * ions.len(),
        quadratic_constraints: quadratic,
        feasible_restarts: feasible,
    };
    if harmonics * ions.len() <= linear_rows + quadratic || d == 0 {
        return Err(Error::Infeasible {
            reason: "constraints outnumber the available amplitudes".into(),
            report: report(0),
        });
    }

    let z = &ns.basis;
    let eta = &modes.lamb_dicke;
    let restrict = |m: DMatrix<f64>| z.transpose() * m * z;
    let mut conditions = Vec::new();
    for &(a, b) in &pairs {
        let (ia, ib) = (ions[a], ions[b]);
        let target = couplings[(ia, ib)];
        let mut ss = DMatrix::zeros(harmonics, harmonics);
        let mut cc = DMatrix::zeros(harmonics, harmonics);
        let mut cross = DMatrix::zeros(harmonics, harmonics);
        for m in 0..n_modes {
            let w = eta[(ia, m)] * eta[(ib, m)];
            let k = &system.kernels[m];
            ss += (&k.ss + k.ss.transpose()) * w;
            cc += (&k.cc + k.cc.transpose()) * w;
            cross += (&k.sc + &k.cs + k.sc.transpose() + k.cs.transpose()) * w;
        }
        let mut sets = vec![(restrict(ss), target)];
        if problem.robust {
            sets.push((restrict(cc), target));
            sets.push((restrict(cross), 0.0));
        }
        let reference = sets[0].0.abs().max();
        for (matrix, target) in sets {
            let mut scale = matrix.abs().max();
            if scale <= IMPLIED_THRESHOLD * reference {
                scale = 0.0;
            }
            if scale == 0.0 {
                if target != 0.0 {
                    return Err(Error::Infeasible {
                        reason: format!("ions {} and {} share no driven mode", ia + 1, ib + 1),
                        report: report(0),
                    });
                }
                continue;
            }
            conditions.push(PairCondition {
                a,
                b,
                matrix: matrix / scale,
                target: target / scale,
            });
        }
    }
    let program = PairProgram {
        d,
        ions: ions.len(),
        conditions,
    };

    let opts: &SearchOptions = &problem.search;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let al = AlOptions::default();
    let target_scale = program.conditions.iter().fold(0.0, |m: f64, c| m.max(c.target.abs()));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..opts.restarts.max(1) {
        let mut x0: Vec<f64> = (0..program.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        // Rescale so the start has the right order of magnitude.
        let mut c = vec![0.0; program.n_constraints()];
        let mut jac = DMatrix::zeros(program.n_constraints(), program.dim());
        let zero_targets: Vec<f64> = program.conditions.iter().map(|c| c.target).collect();
        program.constraints(&x0, &mut c, &mut jac);
        let typical = c
            .iter()
            .zip(&zero_targets)
            .map(|(v, t)| (v + t).abs())
            .fold(0.0, f64::max);
        if typical > 0.0 {
            let s = (target_scale / typical).sqrt();
            x0.iter_mut().for_each(|v| *v *= s);
        }
        let sol = augmented_lagrangian(&program, x0, &al);
        let (x, _) = project_onto_constraints(&program, sol.x, 30);
        let cost = (0..ions.len()).map(|a| norm(program.block(&x, a))).fold(0.0, f64::max);
        let candidate = assemble(&scheme, z, &x, d, &ions);
        let achieved = candidate.closed_form_with(&system, modes, 0.0);
        let mut ok = achieved.theta.iter().all(|v| v.is_finite());
        for &(a, b) in &pairs {
            let (ia, ib) = (ions[a], ions[b]);
            ok &= (achieved.theta[(ia, ib)] - couplings[(ia, ib)]).abs() < PHASE_TOLERANCE;
        }
        if !ok {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bc, bx)) => {
                if (cost - bc).abs() <= 1e-9 * bc {
                    lexicographic_less(&x, bx)
                } else {
                    cost < *bc
                }
            }
        };
        if better {
            best = Some((cost, x));
        }
    }
    let (_, x) = best.ok_or_else(|| Error::Infeasible {
        reason: "no restart satisfied the pairwise phase conditions".into(),
        report: report(0),
    })?;
    Ok(assemble(&scheme, z, &x, d, &ions))
}

fn assemble(base: &ModulationScheme, z: &DMatrix<f64>, x: &[f64], d: usize, ions: &[usize]) -> ModulationScheme {
    let mut s = base.clone();
    for (a, &ion) in ions.iter().enumerate() {
        let y = nalgebra::DVector::from_column_slice(&x[a * d..(a + 1) * d]);
        let amp: Vec<f64> = (z * y).iter().cloned().collect();
        let rabi = norm(&amp);
        if rabi > 0.0 {
            s.amplitudes[ion] = amp.iter().map(|v| v / rabi).collect();
            s.rabi_rad_s[ion] = rabi * base.trap_freq_rad_s;
        }
    }
    s
}
