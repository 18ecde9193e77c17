// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Projection of sampled time-domain drives onto the commensurate tone basis.

use super::kernels::tone_frequencies;
use super::scheme::{ControlMode, ModulationScheme};
use crate::error::{Error, Result};

/// Relative reconstruction residual above which an import is flagged.
pub const RESIDUAL_WARNING: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveformImport {
    /// Global scheme with the projected amplitudes and phases.
    pub scheme: ModulationScheme,
    /// Dimensionless sine and cosine coefficients (units of `ω_z`).
    pub sin_coefficients: Vec<f64>,
    pub cos_coefficients: Vec<f64>,
    /// `‖w − ŵ‖₂ / ‖w‖₂` on the sample grid.
    pub residual: f64,
    pub warning: bool,
}

/// Samples `w(t)` (rad/s) at `n_samples` uniform points over `[0, τ]` and
/// projects them; see [`import_samples`].
pub fn import_waveform<F: Fn(f64) -> f64>(
    waveform: F,
    tau_s: f64,
    harmonics: usize,
    trap_freq_rad_s: f64,
    n_ions: usize,
    n_samples: usize,
) -> Result<WaveformImport> {
    if n_samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let h = tau_s / (n_samples - 1) as f64;
    let samples: Vec<f64> = (0..n_samples).map(|j| waveform(j as f64 * h)).collect();
    import_samples(&samples, tau_s, harmonics, trap_freq_rad_s, n_ions)
}

/// Projects uniformly spaced samples (endpoints included, rad/s) onto
/// `{sin ν_k t, cos ν_k t}` by the trapezoid rule.
pub fn import_samples(
    samples: &[f64],
    tau_s: f64,
    harmonics: usize,
    trap_freq_rad_s: f64,
    n_ions: usize,
) -> Result<WaveformImport> {
    if !(tau_s > 0.0) || !(trap_freq_rad_s > 0.0) {
        return Err(Error::invalid("tau_s and the trap frequency must be positive"));
    }
    if harmonics == 0 || n_ions == 0 {
        return Err(Error::invalid("K and the ion count must be at least 1"));
    }
    let n = samples.len();
    if n < 2 * harmonics + 2 {
        return Err(Error::invalid(format!(
            "{n} samples cannot resolve {harmonics} harmonics (need at least {})",
            2 * harmonics + 2
        )));
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("waveform samples must be finite"));
    }
    let tau = tau_s * trap_freq_rad_s;
    let h = tau / (n - 1) as f64;
    let w: Vec<f64> = samples.iter().map(|s| s / trap_freq_rad_s).collect();
    let weight = |j: usize| if j == 0 || j == n - 1 { 0.5 * h } else { h };
    let tones = tone_frequencies(tau, harmonics);
    let mut a = vec![0.0; harmonics];
    let mut c = vec![0.0; harmonics];
    for (k, nu) in tones.iter().enumerate() {
        let (mut sa, mut sc) = (0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            let (s, co) = (nu * j as f64 * h).sin_cos();
            sa += weight(j) * wj * s;
            sc += weight(j) * wj * co;
        }
        a[k] = 2.0 * sa / tau;
        c[k] = 2.0 * sc / tau;
    }

    let (mut err2, mut ref2) = (0.0, 0.0);
    for (j, wj) in w.iter().enumerate() {
        let t = j as f64 * h;
        let rec: f64 = tones
            .iter()
            .enumerate()
            .map(|(k, nu)| {
                let (s, co) = (nu * t).sin_cos();
                a[k] * s + c[k] * co
            })
            .sum();
        err2 += weight(j) * (wj - rec).powi(2);
        ref2 += weight(j) * wj * wj;
    }
    let residual = if ref2 > 0.0 { (err2 / ref2).sqrt() } else { 0.0 };

    let mut scheme = ModulationScheme::zero(tau_s, harmonics, n_ions, trap_freq_rad_s, ControlMode::Global);
    let mags: Vec<f64> = a.iter().zip(&c).map(|(x, y)| x.hypot(*y)).collect();
    let rabi = mags.iter().map(|m| m * m).sum::<f64>().sqrt();
    if rabi > 0.0 {
        let r: Vec<f64> = mags.iter().map(|m| m / rabi).collect();
        let phases: Vec<f64> = a
            .iter()
            .zip(&c)
            .map(|(x, y)| if x.hypot(*y) > 0.0 { (-y).atan2(*x) } else { 0.0 })
            .collect();
        scheme.amplitudes = vec![r; n_ions];
        scheme.tone_phases = vec![phases; n_ions];
        scheme.rabi_rad_s = vec![rabi * trap_freq_rad_s; n_ions];
    }
    Ok(WaveformImport {
        scheme,
        sin_coefficients: a,
        cos_coefficients: c,
        residual,
        warning: residual > RESIDUAL_WARNING,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TRAP: f64 = 2.0 * PI * 1e6;

    #[test]
    fn monochromatic_sine_is_a_unit_vector() {
        let tau_s = 3.2e-6;
        let nu = 2.0 * PI * 5.0 / tau_s;
        let omega = 0.7 * TRAP;
        let imp = import_waveform(|t| omega * (nu * t).sin(), tau_s, 12, TRAP, 2, 2001).unwrap();
        let r = &imp.scheme.amplitudes[0];
        for (k, rk) in r.iter().enumerate() {
            let expect = if k == 4 { 1.0 } else { 0.0 };
            assert!((rk - expect).abs() < 1e-12, "k={k} r={rk}");
        }
        assert!((imp.scheme.rabi_rad_s[0] - omega).abs() < 1e-9 * omega);
        assert!(imp.scheme.tone_phases[0][4].abs() < 1e-12);
        assert!(imp.residual < 1e-12);
        assert!(!imp.warning);
        imp.scheme.validate().unwrap();
    }

    #[test]
    fn phase_of_shifted_tone() {
        let tau_s = 2e-6;
        let nu = 2.0 * PI * 3.0 / tau_s;
        let imp = import_waveform(|t| TRAP * (nu * t - 0.4).sin(), tau_s, 6, TRAP, 1, 501).unwrap();
        assert!((imp.scheme.tone_phases[0][2] - 0.4).abs() < 1e-12);
        let (a, c) = imp.scheme.tone_coefficients(0.0);
        assert!((a[0][2] - imp.sin_coefficients[2]).abs() < 1e-12);
        assert!((c[0][2] - imp.cos_coefficients[2]).abs() < 1e-12);
    }

    #[test]
    fn walsh_flip_selects_parity_harmonics() {
        let tau_s = 1.0 / TRAP * 20.0;
        let tau = 20.0;
        let j = 3usize;
        let nu = 2.0 * PI * j as f64 / tau;
        let w = |t: f64| {
            let td = t * TRAP;
            TRAP * (nu * td).sin() * (tau / 2.0 - td).signum()
        };
        let imp = import_waveform(w, tau_s, 10, TRAP, 1, 40001).unwrap();
        for k in 1..=10usize {
            let a = imp.sin_coefficients[k - 1];
            let c = imp.cos_coefficients[k - 1];
            assert!(a.abs() < 1e-7, "k={k} a={a}");
            let expect = if (j + k) % 2 == 1 {
                4.0 * j as f64 / (PI * (j * j) as f64 - PI * (k * k) as f64)
            } else {
                0.0
            };
            assert!((c - expect).abs() < 1e-7, "k={k} c={c} expect={expect}");
        }
        // The waveform carries a DC part the tone basis cannot hold.
        assert!(imp.warning);
    }

    #[test]
    fn zero_waveform() {
        let imp = import_samples(&vec![0.0; 101], 1e-6, 5, TRAP, 3).unwrap();
        assert_eq!(imp.residual, 0.0);
        assert!(imp.scheme.rabi_rad_s.iter().all(|o| *o == 0.0));
        assert_eq!(imp.scheme.amplitudes[2][0], 1.0);
        imp.scheme.validate().unwrap();
    }

    #[test]
    fn rejects_undersampling() {
        assert!(import_samples(&[0.0; 10], 1e-6, 5, TRAP, 1).is_err());
    }
}
