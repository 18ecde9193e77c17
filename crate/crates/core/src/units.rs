// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! CODATA 2018 constants (SI).

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

pub const TWO_PI: f64 = std::f64::consts::TAU;

/// Angular frequency in rad/s for a frequency given in Hz.
pub fn hz_to_rad_s(hz: f64) -> f64 {
    TWO_PI * hz
}
