// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use multitone::chain::{normal_modes, ModeData};
use multitone::design::{design as synthesize, import_samples, ModulationScheme};
use multitone::export::{
    scan_csv, scheme_from_json, scheme_to_json, to_json, trajectories_csv, DesignReport, GateReportDocument,
    ModesDocument, ScanDocument, Versioned,
};
use multitone::simulator::{gate_report, phase_scan};

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, Serialize)]
struct GateReportsDocument {
    reports: Vec<GateReportDocument>,
}

#[derive(Debug, Serialize)]
struct ImportReport {
    residual: f64,
    warning: bool,
    sin_coefficients: Vec<f64>,
    cos_coefficients: Vec<f64>,
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(config: &RunConfig) -> Result<Self, CliError> {
        let dir = config.output_dir();
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Output { dir })
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, body: &T) -> Result<(), CliError> {
        self.write(name, &to_json(&Versioned::new(body))?)
    }
}

fn chain_modes(config: &RunConfig) -> Result<ModeData, CliError> {
    Ok(normal_modes(&config.chain_spec())?)
}

fn load_scheme(config: &RunConfig, explicit: Option<&Path>) -> Result<ModulationScheme, CliError> {
    let path = match explicit {
        Some(p) => p.to_path_buf(),
        None => config.output_dir().join("scheme.json"),
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    Ok(scheme_from_json(&text)?)
}

pub fn modes(config: &RunConfig) -> Result<(), CliError> {
    let modes = chain_modes(config)?;
    Output::new(config)?.json("modes.json", &ModesDocument::from(&modes))
}

pub fn design(config: &RunConfig) -> Result<(), CliError> {
    let modes = chain_modes(config)?;
    let d = config.design_section()?;
    let scheme = synthesize(&modes, d.tau_s, d.harmonics, &config.design_problem()?)?;
    let report = DesignReport::new(&scheme, &modes)?;
    let out = Output::new(config)?;
    out.write("scheme.json", &scheme_to_json(&scheme)?)?;
    out.json("design_report.json", &report)?;
    println!(
        "max |Omega|/omega_z = {:.6}, max |beta| = {:.3e}",
        report.max_rabi_over_trapfreq, report.max_beta_quadrature
    );
    Ok(())
}

pub fn verify(config: &RunConfig, scheme_path: Option<&Path>) -> Result<(), CliError> {
    let modes = chain_modes(config)?;
    let scheme = load_scheme(config, scheme_path)?;
    let phases = config.phase_grid().unwrap_or_else(|| vec![scheme.drive_phase]);
    if phases.is_empty() {
        return Err(CliError::Config("simulate.phi0_grid is empty".into()));
    }
    let opts = config.verify_options(modes.n_modes());
    let reports = phases
        .iter()
        .map(|&phi0| gate_report(&scheme, &modes, phi0, &opts))
        .collect::<multitone::Result<Vec<_>>>()?;
    let out = Output::new(config)?;
    if config.wants(Format::Json) {
        out.json(
            "gate_report.json",
            &GateReportsDocument {
                reports: reports.iter().map(GateReportDocument::from).collect(),
            },
        )?;
    }
    if config.wants(Format::Csv) {
        let trajectories: Vec<_> = reports.iter().flat_map(|r| r.trajectories.iter().cloned()).collect();
        out.write("trajectories.csv", &trajectories_csv(&trajectories)?)?;
    }
    for r in &reports {
        println!(
            "phi0 = {:.6}: fidelity = {:.10}, max |beta| = {:.3e}",
            r.phi0, r.fidelity, r.max_beta
        );
    }
    Ok(())
}

pub fn scan(config: &RunConfig, scheme_path: Option<&Path>) -> Result<(), CliError> {
    let modes = chain_modes(config)?;
    let scheme = load_scheme(config, scheme_path)?;
    let grid = config
        .phase_grid()
        .ok_or_else(|| CliError::Config("scan needs simulate.phi0_grid or simulate.phi0_points".into()))?;
    if grid.is_empty() {
        return Err(CliError::Config("simulate.phi0_grid is empty".into()));
    }
    let points = phase_scan(&scheme, &modes, &grid, &config.verify_options(modes.n_modes()))?;
    let out = Output::new(config)?;
    if config.wants(Format::Csv) {
        out.write("scan.csv", &scan_csv(&points)?)?;
    }
    if config.wants(Format::Json) {
        out.json("scan.json", &ScanDocument { points: points.clone() })?;
    }
    let worst = points.iter().map(|p| p.fidelity).fold(f64::INFINITY, f64::min);
    println!("{} phases, min fidelity = {:.10}", points.len(), worst);
    Ok(())
}

/// Reads `t_s,rabi_hz` rows and checks they sample `[0, tau_s]` uniformly.
fn read_samples(path: &Path, tau_s: f64) -> Result<Vec<f64>, CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => bad(format!("{other:?}")),
    })?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "t_s" || &headers[1] != "rabi_hz" {
        return Err(bad("expected header `t_s,rabi_hz`".into()));
    }
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let parse = |k: usize| -> Result<f64, CliError> {
            record[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("row {}: {e}", line + 2)))
        };
        times.push(parse(0)?);
        samples.push(std::f64::consts::TAU * parse(1)?);
    }
    let n = times.len();
    if n < 2 {
        return Err(bad("need at least two samples".into()));
    }
    let h = tau_s / (n - 1) as f64;
    for (k, t) in times.iter().enumerate() {
        if (t - k as f64 * h).abs() > 1e-9 * tau_s {
            return Err(bad(format!(
                "sample {} at t = {t:e} s is not on the uniform grid over [0, {tau_s:e}]",
                k + 1
            )));
        }
    }
    Ok(samples)
}

pub fn import(config: &RunConfig) -> Result<(), CliError> {
    let section = config
        .import
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [import] section".into()))?;
    let d = config.design_section()?;
    let spec = config.chain_spec();
    let samples = read_samples(&config.resolve(&section.samples_file), d.tau_s)?;
    let imported = import_samples(&samples, d.tau_s, d.harmonics, spec.axial_freq, config.chain.n_ions)?;
    if imported.warning {
        eprintln!(
            "warning: waveform is poorly represented by {} harmonics (residual {:.3e})",
            d.harmonics, imported.residual
        );
    }
    let out = Output::new(config)?;
    out.write("scheme.json", &scheme_to_json(&imported.scheme)?)?;
    out.json(
        "import_report.json",
        &ImportReport {
            residual: imported.residual,
            warning: imported.warning,
            sin_coefficients: imported.sin_coefficients.clone(),
            cos_coefficients: imported.cos_coefficients.clone(),
        },
    )?;
    println!("residual = {:.3e}", imported.residual);
    Ok(())
}
