// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Synthesis and verification of multichromatic entangling gates for
//! trapped-ion chains.
//!
//! The crate is organised bottom-up:
//!
//! - [`chain`]: equilibrium positions, normal modes and Lamb-Dicke couplings
//!   of a linear Coulomb crystal.
//! - [`analytic`]: closed-form single-mode spin-dependent-force primitives
//!   (displacements, geometric phases, monochromatic gate parameters).
//! - [`design`]: the multichromatic constraint system and the optimisers that
//!   turn it into modulation schemes.
//! - [`simulator`]: independent verification by quadrature and by brute-force
//!   state-vector integration in a truncated Fock space.
//! - [`export`]: JSON/CSV writers with lossless float formatting.
//!
//! Internally every quantity is dimensionless: frequencies are measured in
//! units of the axial trap frequency `ω_z` and times in units of `1/ω_z`.
//! SI values only appear at the boundary ([`chain::IonChainSpec`],
//! [`design::ModulationScheme`] and the exported files).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod chain;
pub mod design;
pub mod error;
pub mod export;
pub mod simulator;
pub mod units;

mod numerics;

pub use error::{Error, Result};
