// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Augmented-Lagrangian driver around L-BFGS, plus least-squares polishing.

use std::cell::{Cell, RefCell};

use argmin::core::{CostFunction, Executor, Gradient, State};
use argmin::solver::linesearch::MoreThuenteLineSearch;
use argmin::solver::quasinewton::LBFGS;

use nalgebra::{DMatrix, DVector};

/// Smooth objective with equality constraints `c(x) = 0`.
pub(crate) trait ConstrainedProblem {
    fn dim(&self) -> usize;
    fn n_constraints(&self) -> usize;
    /// Objective value; writes `∇f` into `grad`.
    fn objective(&self, x: &[f64], grad: &mut [f64]) -> f64;
    /// Constraint values and Jacobian (`n_constraints × dim`).
    fn constraints(&self, x: &[f64], values: &mut [f64], jac: &mut DMatrix<f64>);
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AlOptions {
    pub max_outer: usize,
    pub inner_iters: u64,
    pub tolerance: f64,
    pub initial_penalty: f64,
}

impl Default for AlOptions {
    fn default() -> Self {
        AlOptions {
            max_outer: 30,
            inner_iters: 400,
            tolerance: 1e-12,
            initial_penalty: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct AlResult {
    pub x: Vec<f64>,
    pub violation: f64,
    pub multipliers: Vec<f64>,
}

struct Lagrangian<'a, P> {
    problem: &'a P,
    lambda: &'a [f64],
    mu: f64,
    /// Evaluation budget; the line search is otherwise unbounded.
    budget: u64,
    evals: Cell<u64>,
    best: RefCell<Option<(f64, Vec<f64>)>>,
}

impl<P: ConstrainedProblem> Lagrangian<'_, P> {
    fn eval(&self, x: &[f64], want_grad: bool) -> (f64, Vec<f64>) {
        let n = self.problem.dim();
        let nc = self.problem.n_constraints();
        let mut grad = vec![0.0; n];
        let mut value = self.problem.objective(x, &mut grad);
        let mut c = vec![0.0; nc];
        let mut jac = DMatrix::zeros(nc, n);
        self.problem.constraints(x, &mut c, &mut jac);
        for j in 0..nc {
            value += self.lambda[j] * c[j] + 0.5 * self.mu * c[j] * c[j];
            if want_grad {
                let w = self.lambda[j] + self.mu * c[j];
                for k in 0..n {
                    grad[k] += w * jac[(j, k)];
                }
            }
        }
        (value, grad)
    }
}

impl<P: ConstrainedProblem> CostFunction for Lagrangian<'_, P> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> Result<f64, argmin::core::Error> {
        let n = self.evals.get() + 1;
        self.evals.set(n);
        if n > self.budget {
            return Err(argmin::core::Error::msg("evaluation budget exhausted"));
        }
        let value = self.eval(x, false).0;
        let mut best = self.best.borrow_mut();
        if value.is_finite() && best.as_ref().is_none_or(|(b, _)| value < *b) {
            *best = Some((value, x.clone()));
        }
        Ok(value)
    }
}

impl<P: ConstrainedProblem> Gradient for Lagrangian<'_, P> {
    type Param = Vec<f64>;
    type Gradient = Vec<f64>;

    fn gradient(&self, x: &Self::Param) -> Result<Vec<f64>, argmin::core::Error> {
        Ok(self.eval(x, true).1)
    }
}

fn violation<P: ConstrainedProblem>(p: &P, x: &[f64]) -> (f64, Vec<f64>) {
    let nc = p.n_constraints();
    let mut c = vec![0.0; nc];
    let mut jac = DMatrix::zeros(nc, p.dim());
    p.constraints(x, &mut c, &mut jac);
    (c.iter().fold(0.0_f64, |m, v| m.max(v.abs())), c)
}

/// Unconstrained L-BFGS minimisation; returns the best point found.
fn lbfgs<P: ConstrainedProblem>(problem: &P, lambda: &[f64], mu: f64, x0: Vec<f64>, iters: u64) -> Vec<f64> {
    let lag = Lagrangian {
        problem,
        lambda,
        mu,
        budget: 25 * iters,
        evals: Cell::new(0),
        best: RefCell::new(None),
    };
    let start = lag.eval(&x0, false).0;
    let fallback = x0.clone();
    let solver = match LBFGS::new(MoreThuenteLineSearch::new(), 10)
        .with_tolerance_grad(1e-13)
        .and_then(|s| s.with_tolerance_cost(0.0))
    {
        Ok(s) => s,
        Err(_) => return fallback,
    };
    let best = lag.best.clone();
    let result = Executor::new(lag, solver)
        .configure(|s| s.param(x0).max_iters(iters))
        .run();
    let seen = best.into_inner().filter(|(v, _)| *v < start).map(|(_, x)| x);
    match result {
        Ok(res) => res.state().get_best_param().cloned().or(seen).unwrap_or(fallback),
        Err(_) => seen.unwrap_or(fallback),
    }
}

pub(crate) fn augmented_lagrangian<P: ConstrainedProblem>(p: &P, x0: Vec<f64>, opts: &AlOptions) -> AlResult {
    let nc = p.n_constraints();
    let mut lambda = vec![0.0; nc];
    let mut mu = opts.initial_penalty;
    let mut x = x0;
    let (mut viol, _) = violation(p, &x);
    for _ in 0..opts.max_outer {
        x = lbfgs(p, &lambda, mu, x, opts.inner_iters);
        let (v, c) = violation(p, &x);
        for j in 0..nc {
            lambda[j] += mu * c[j];
        }
        if v > 0.25 * viol {
            mu = (mu * 10.0).min(1e12);
        }
        viol = v;
        if viol < opts.tolerance {
            break;
        }
    }
    AlResult {
        x,
        violation: viol,
        multipliers: lambda,
    }
}

/// Minimum-norm least-squares solve `A x ≈ b` with a relative singular-value cut.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    match svd.solve(b, rcond * smax.max(f64::MIN_POSITIVE)) {
        Ok(x) => x,
        Err(_) => DVector::zeros(a.ncols()),
    }
}

/// Gauss–Newton projection onto `c(x) = 0` using minimum-norm steps.
pub(crate) fn project_onto_constraints<P: ConstrainedProblem>(p: &P, mut x: Vec<f64>, iters: usize) -> (Vec<f64>, f64) {
    let n = p.dim();
    let nc = p.n_constraints();
    let mut c = vec![0.0; nc];
    let mut jac = DMatrix::zeros(nc, n);
    p.constraints(&x, &mut c, &mut jac);
    let mut viol = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for _ in 0..iters {
        if viol < 1e-15 || nc == 0 {
            break;
        }
        let step = lstsq(&jac, &DVector::from_column_slice(&c), 1e-12);
        let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - s).collect();
        let mut ct = vec![0.0; nc];
        let mut jt = DMatrix::zeros(nc, n);
        p.constraints(&trial, &mut ct, &mut jt);
        let vt = ct.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(vt < viol) {
            break;
        }
        x = trial;
        c = ct;
        jac = jt;
        viol = vt;
    }
    (x, viol)
}
