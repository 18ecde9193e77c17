// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Rank bookkeeping attached to a design failure.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub harmonics: usize,
    pub linear_rows: usize,
    pub linear_rank: usize,
    pub null_dim: usize,
    pub quadratic_constraints: usize,
    pub feasible_restarts: usize,
}

impl std::fmt::Display for RankReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "K={} linear rows={} rank={} null dim={} quadratic constraints={} feasible restarts={}",
            self.harmonics,
            self.linear_rows,
            self.linear_rank,
            self.null_dim,
            self.quadratic_constraints,
            self.feasible_restarts
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge (residual {residual:e})")]
    NonConvergence { what: &'static str, residual: f64 },

    #[error("transverse chain unstable: ω_x/ω_z = {ratio:.6} is below the critical ratio {critical_ratio:.6}")]
    Unstable { ratio: f64, critical_ratio: f64 },

    #[error("design infeasible: {reason} ({report})")]
    Infeasible { reason: String, report: RankReport },

    #[error("quadrature did not reach tolerance {requested:e} (achieved {achieved:e})")]
    Quadrature { requested: f64, achieved: f64 },

    #[error(
        "Fock truncation: mode {mode} has population {population:e} in its top two levels (cutoff {cutoff}); increase the cutoff"
    )]
    Truncation {
        mode: usize,
        population: f64,
        cutoff: usize,
    },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("serialization: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
