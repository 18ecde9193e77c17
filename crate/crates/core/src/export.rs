// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON and CSV documents with lossless float formatting.
//!
//! Every float is written as a 17-significant-digit decimal (`{:.16e}`), so a
//! double survives a write/read cycle bit for bit. Non-finite values are
//! rejected rather than silently turned into `null`.

use std::io;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::chain::{Axis, ModeData};
use crate::design::{effective_couplings, ControlMode, ModulationScheme};
use crate::error::{Error, Result};
use crate::simulator::{magnus_evaluate, GateReport, ScanPoint, Trajectory};

pub const SCHEMA_VERSION: u32 = 1;

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::Serialization(format!("non-finite value {x}")));
    }
    Ok(format!("{x:.16e}"))
}

struct LosslessFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for LosslessFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format!("{value:.16e}").as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// A document body tagged with [`SCHEMA_VERSION`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versioned<T> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Versioned<T> {
    pub fn new(body: T) -> Self {
        Versioned {
            schema_version: SCHEMA_VERSION,
            body,
        }
    }
}

/// Pretty JSON with lossless floats.
///
/// Documents never carry `null` (optional fields are omitted), so any `null`
/// produced by `serde_json` stands for a non-finite float and is an error.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let probe = NonFiniteProbe::default();
    value
        .serialize(&mut serde_json::Serializer::with_formatter(io::sink(), probe.clone()))
        .map_err(|e| Error::Serialization(e.to_string()))?;
    if probe.found.get() {
        return Err(Error::Serialization("document contains a non-finite number".into()));
    }
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, LosslessFormatter(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Serialization(e.to_string()))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| Error::Serialization(e.to_string()))
}

/// Records whether `serde_json` replaced a float by `null`.
#[derive(Default, Clone)]
struct NonFiniteProbe {
    found: std::rc::Rc<std::cell::Cell<bool>>,
}

impl Formatter for NonFiniteProbe {
    fn write_null<W: ?Sized + io::Write>(&mut self, _: &mut W) -> io::Result<()> {
        self.found.set(true);
        Ok(())
    }
}

/// Parse a versioned document, rejecting unknown schema versions.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let doc: Versioned<T> = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::Serialization(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    Ok(doc.body)
}

pub fn real_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

/// Complex matrix as rows of `[re, im]` pairs.
pub fn complex_rows(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn scheme_to_json(scheme: &ModulationScheme) -> Result<String> {
    to_json(&Versioned::new(scheme))
}

pub fn scheme_from_json(text: &str) -> Result<ModulationScheme> {
    let scheme: ModulationScheme = from_json(text)?;
    scheme.validate()?;
    Ok(scheme)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModesDocument {
    pub n_ions: usize,
    pub axis: Axis,
    pub trap_freq_rad_s: f64,
    pub frequencies_rad_s: Vec<f64>,
    pub frequencies_over_trap: Vec<f64>,
    /// Units of `ℓ`.
    pub positions: Vec<f64>,
    /// `b[i][m]`, rows are ions.
    pub mode_matrix: Vec<Vec<f64>>,
    pub mode_lamb_dicke: Vec<f64>,
    pub lamb_dicke: Vec<Vec<f64>>,
}

impl From<&ModeData> for ModesDocument {
    fn from(m: &ModeData) -> Self {
        ModesDocument {
            n_ions: m.n_ions(),
            axis: m.axis,
            trap_freq_rad_s: m.trap_freq,
            frequencies_rad_s: m.frequencies_rad_s(),
            frequencies_over_trap: m.frequencies.clone(),
            positions: m.positions.clone(),
            mode_matrix: real_rows(&m.mode_matrix),
            mode_lamb_dicke: m.mode_lamb_dicke.clone(),
            lamb_dicke: real_rows(&m.lamb_dicke),
        }
    }
}

/// Residuals of a freshly designed scheme at its drive phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub control: ControlMode,
    pub robust: bool,
    #[serde(rename = "K")]
    pub harmonics: usize,
    pub tau_s: f64,
    pub max_rabi_over_trapfreq: f64,
    /// Closed-form `max|β_{i,m}(τ)|`.
    pub max_beta: f64,
    /// Same residual by adaptive quadrature.
    pub max_beta_quadrature: f64,
    /// Robust schemes: largest quadrature residual over a 16-point `φ₀` grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_beta_phase_grid: Option<f64>,
    pub beta: Vec<Vec<[f64; 2]>>,
    pub theta: Vec<Vec<f64>>,
    /// Global schemes only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_phases: Option<Vec<f64>>,
    pub j_effective: Vec<Vec<f64>>,
}

impl DesignReport {
    pub fn new(scheme: &ModulationScheme, modes: &ModeData) -> Result<Self> {
        let phi0 = scheme.drive_phase;
        let closed = scheme.closed_form(modes, phi0)?;
        let quad = magnus_evaluate(scheme, modes, phi0)?;
        let max_beta_phase_grid = if scheme.robust {
            let mut worst = 0.0_f64;
            for phi in crate::simulator::uniform_phase_grid(16) {
                worst = worst.max(magnus_evaluate(scheme, modes, phi)?.max_beta());
            }
            Some(worst)
        } else {
            None
        };
        Ok(DesignReport {
            control: scheme.control,
            robust: scheme.robust,
            harmonics: scheme.harmonics,
            tau_s: scheme.tau_s,
            max_rabi_over_trapfreq: scheme.max_rabi_over_trapfreq(),
            max_beta: closed.max_beta(),
            max_beta_quadrature: quad.max_beta(),
            max_beta_phase_grid,
            beta: complex_rows(&closed.beta),
            theta: real_rows(&closed.theta),
            mode_phases: match scheme.control {
                ControlMode::Global => Some(scheme.mode_phases(modes, phi0)?),
                ControlMode::Individual => None,
            },
            j_effective: real_rows(&effective_couplings(scheme, modes)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEndpoint {
    /// 1-based.
    pub mode: usize,
    pub alpha: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReportDocument {
    pub phi0: f64,
    pub fidelity: f64,
    pub max_beta: f64,
    pub max_rabi_over_trapfreq: f64,
    pub beta: Vec<Vec<[f64; 2]>>,
    pub theta: Vec<Vec<f64>>,
    pub j_effective: Vec<Vec<f64>>,
    pub trajectory_endpoints: Vec<TrajectoryEndpoint>,
}

impl From<&GateReport> for GateReportDocument {
    fn from(r: &GateReport) -> Self {
        GateReportDocument {
            phi0: r.phi0,
            fidelity: r.fidelity,
            max_beta: r.max_beta,
            max_rabi_over_trapfreq: r.max_rabi_over_trapfreq,
            beta: complex_rows(&r.beta),
            theta: real_rows(&r.theta),
            j_effective: real_rows(&r.j_effective),
            trajectory_endpoints: r
                .trajectories
                .iter()
                .map(|t| {
                    let a = t.endpoint();
                    TrajectoryEndpoint {
                        mode: t.mode + 1,
                        alpha: [a.re, a.im],
                    }
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDocument {
    pub points: Vec<ScanPoint>,
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Serialization(e.to_string())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

pub const TRAJECTORY_COLUMNS: [&str; 5] = ["t_s", "mode", "re_alpha", "im_alpha", "phi0"];
pub const SCAN_COLUMNS: [&str; 3] = ["phi0", "fidelity", "max_beta"];

/// One row per sample; `mode` is 1-based.
pub fn trajectories_csv(trajectories: &[Trajectory]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRAJECTORY_COLUMNS).map_err(csv_error)?;
    for tr in trajectories {
        let mode = (tr.mode + 1).to_string();
        let phi0 = format_float(tr.phi0)?;
        for (t, a) in tr.times_s.iter().zip(&tr.alpha) {
            w.write_record([
                format_float(*t)?,
                mode.clone(),
                format_float(a.re)?,
                format_float(a.im)?,
                phi0.clone(),
            ])
            .map_err(csv_error)?;
        }
    }
    finish_csv(w)
}

pub fn scan_csv(points: &[ScanPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCAN_COLUMNS).map_err(csv_error)?;
    for p in points {
        w.write_record([
            format_float(p.phi0)?,
            format_float(p.fidelity)?,
            format_float(p.max_beta)?,
        ])
        .map_err(csv_error)?;
    }
    finish_csv(w)
}
