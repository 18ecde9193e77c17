// Copyright 2026 The Multitone Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a TOML document with `[chain]`, `[design]`,
//! `[simulate]`, `[output]` and `[import]` sections.
//!
//! Frequencies are given in Hz and converted to rad/s here. Relative paths
//! are resolved against the directory holding the config file.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::Deserialize;

use multitone::chain::{Axis, IonChainSpec};
use multitone::design::{ControlMode, DesignProblem, SearchOptions, SpinBasis};
use multitone::simulator::{uniform_phase_grid, FidelityMethod, VerifyOptions};
use multitone::units::ATOMIC_MASS_UNIT;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chain: ChainSection,
    #[serde(default)]
    pub design: Option<DesignSection>,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub import: Option<ImportSection>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSection {
    pub n_ions: usize,
    pub axial_freq_hz: f64,
    pub transverse_freq_hz: Option<f64>,
    pub ion_mass_amu: Option<f64>,
    pub ion_mass_kg: Option<f64>,
    /// Net Raman wavevector `|Δk|`.
    pub wavevector_per_m: Option<f64>,
    /// Alternative to `wavevector_per_m`: the centre-of-mass Lamb-Dicke parameter.
    pub lamb_dicke_com: Option<f64>,
    #[serde(default = "default_axis")]
    pub coupled_axis: Axis,
}

fn default_axis() -> Axis {
    Axis::Axial
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Global,
    Individual,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    pub tau_s: f64,
    #[serde(rename = "K")]
    pub harmonics: usize,
    #[serde(default = "default_mode")]
    pub mode: ModeName,
    #[serde(default)]
    pub robust: bool,
    /// `[i, j, J_ij]` triples with 1-based ion labels.
    #[serde(default)]
    pub couplings: Vec<(usize, usize, f64)>,
    pub theta1_target: Option<f64>,
    pub active_ions: Option<Vec<usize>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_basis")]
    pub basis: SpinBasis,
}

fn default_mode() -> ModeName {
    ModeName::Global
}

fn default_restarts() -> usize {
    SearchOptions::default().restarts
}

fn default_basis() -> SpinBasis {
    SpinBasis::X
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Cutoff {
    Uniform(usize),
    PerMode(Vec<usize>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    /// Explicit drive phases (radians).
    pub phi0_grid: Option<Vec<f64>>,
    /// Uniform grid over `[0, 2π)`; ignored when `phi0_grid` is set.
    pub phi0_points: Option<usize>,
    pub fock_cutoff: Option<Cutoff>,
    pub steps: Option<usize>,
    #[serde(default)]
    pub include_carrier: bool,
    #[serde(default = "default_method")]
    pub method: FidelityMethod,
    #[serde(default = "default_samples")]
    pub trajectory_samples: usize,
}

fn default_method() -> FidelityMethod {
    FidelityMethod::Magnus
}

fn default_samples() -> usize {
    201
}

impl Default for SimulateSection {
    fn default() -> Self {
        SimulateSection {
            phi0_grid: None,
            phi0_points: None,
            fock_cutoff: None,
            steps: None,
            include_carrier: false,
            method: default_method(),
            trajectory_samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImportSection {
    /// CSV with columns `t_s,rabi_hz`, uniformly spaced over `[0, tau_s]`.
    pub samples_file: PathBuf,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parse `value` as a TOML value, falling back to a bare string.
fn override_value(value: &str) -> toml::Value {
    match format!("v = {value}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(value.into())),
        Err(_) => toml::Value::String(value.into()),
    }
}

/// Apply `section.key=value` overrides to a parsed document.
pub fn apply_overrides(table: &mut toml::Table, overrides: &[String]) -> Result<(), CliError> {
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| config_error(format!("override `{item}` is not of the form section.key=value")))?;
        let path: Vec<&str> = key.trim().split('.').collect();
        if path.len() != 2 || path.iter().any(|p| p.is_empty()) {
            return Err(config_error(format!("override key `{key}` must be section.key")));
        }
        let section = table
            .entry(path[0].to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let toml::Value::Table(section) = section else {
            return Err(config_error(format!("`{}` is not a section", path[0])));
        };
        section.insert(path[1].to_string(), override_value(value.trim()));
    }
    Ok(())
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = Self::parse(&text, overrides).map_err(|e| match e {
            CliError::Config(msg) => config_error(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let config: RunConfig = if overrides.is_empty() {
            toml::from_str(text).map_err(|e| config_error(e.to_string()))?
        } else {
            let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| config_error(e.to_string()))?;
            apply_overrides(&mut table, overrides)?;
            toml::Value::Table(table)
                .try_into()
                .map_err(|e: toml::de::Error| config_error(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        let c = &self.chain;
        if c.n_ions == 0 {
            return Err(config_error("chain.n_ions must be at least 1"));
        }
        if c.ion_mass_amu.is_some() == c.ion_mass_kg.is_some() {
            return Err(config_error("chain: set exactly one of ion_mass_amu and ion_mass_kg"));
        }
        if c.wavevector_per_m.is_some() == c.lamb_dicke_com.is_some() {
            return Err(config_error(
                "chain: set exactly one of wavevector_per_m and lamb_dicke_com",
            ));
        }
        if let Some(d) = &self.design {
            if !(d.tau_s.is_finite() && d.tau_s > 0.0) {
                return Err(config_error("design.tau_s must be positive"));
            }
            if d.harmonics == 0 {
                return Err(config_error("design.K must be at least 1"));
            }
            if d.restarts == 0 {
                return Err(config_error("design.restarts must be at least 1"));
            }
            for &(i, j, v) in &d.couplings {
                for ion in [i, j] {
                    if ion == 0 || ion > c.n_ions {
                        return Err(config_error(format!(
                            "design.couplings: ion {ion} is outside 1..{}",
                            c.n_ions
                        )));
                    }
                }
                if i == j {
                    return Err(config_error(format!("design.couplings: diagonal entry ({i}, {j})")));
                }
                if !v.is_finite() {
                    return Err(config_error("design.couplings: non-finite coupling"));
                }
            }
            for &ion in d.active_ions.iter().flatten() {
                if ion == 0 || ion > c.n_ions {
                    return Err(config_error(format!(
                        "design.active_ions: ion {ion} is outside 1..{}",
                        c.n_ions
                    )));
                }
            }
        }
        if self.simulate.trajectory_samples < 2 {
            return Err(config_error("simulate.trajectory_samples must be at least 2"));
        }
        if let Some(grid) = &self.simulate.phi0_grid {
            if grid.iter().any(|p| !p.is_finite()) {
                return Err(config_error("simulate.phi0_grid entries must be finite"));
            }
        }
        if self.output.formats.is_empty() {
            return Err(config_error("output.formats is empty"));
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output.directory)
    }

    pub fn wants(&self, format: Format) -> bool {
        self.output.formats.contains(&format)
    }

    pub fn chain_spec(&self) -> IonChainSpec {
        let c = &self.chain;
        let mass = c
            .ion_mass_kg
            .unwrap_or_else(|| c.ion_mass_amu.unwrap_or(0.0) * ATOMIC_MASS_UNIT);
        let mut spec = IonChainSpec {
            n_ions: c.n_ions,
            axial_freq: TAU * c.axial_freq_hz,
            transverse_freq: c.transverse_freq_hz.map(|f| TAU * f),
            ion_mass: mass,
            wavevector: c.wavevector_per_m.unwrap_or(0.0),
            coupled_axis: c.coupled_axis,
        };
        if let Some(eta) = c.lamb_dicke_com {
            spec.wavevector = spec.wavevector_for_com_lamb_dicke(eta);
        }
        spec
    }

    pub fn design_section(&self) -> Result<&DesignSection, CliError> {
        self.design
            .as_ref()
            .ok_or_else(|| config_error("missing [design] section"))
    }

    /// Requested `J` as a symmetric matrix, when any entries are given.
    pub fn couplings(&self) -> Option<DMatrix<f64>> {
        let d = self.design.as_ref()?;
        if d.couplings.is_empty() {
            return None;
        }
        let n = self.chain.n_ions;
        let mut j = DMatrix::zeros(n, n);
        for &(a, b, v) in &d.couplings {
            j[(a - 1, b - 1)] = v;
            j[(b - 1, a - 1)] = v;
        }
        Some(j)
    }

    pub fn design_problem(&self) -> Result<DesignProblem, CliError> {
        let d = self.design_section()?;
        let defaults = DesignProblem::default();
        Ok(DesignProblem {
            couplings: self.couplings(),
            control: match d.mode {
                ModeName::Global => ControlMode::Global,
                ModeName::Individual => ControlMode::Individual,
            },
            active_ions: d.active_ions.clone(),
            robust: d.robust,
            theta1_target: d.theta1_target.unwrap_or(defaults.theta1_target),
            search: SearchOptions {
                restarts: d.restarts,
                seed: d.seed,
                basis: d.basis,
            },
        })
    }

    /// Phases requested in `[simulate]`, if any.
    pub fn phase_grid(&self) -> Option<Vec<f64>> {
        let s = &self.simulate;
        s.phi0_grid.clone().or_else(|| s.phi0_points.map(uniform_phase_grid))
    }

    pub fn verify_options(&self, n_modes: usize) -> VerifyOptions {
        let s = &self.simulate;
        VerifyOptions {
            target: self.couplings(),
            method: s.method,
            cutoffs: s.fock_cutoff.as_ref().map(|c| match c {
                Cutoff::Uniform(n) => vec![*n; n_modes],
                Cutoff::PerMode(v) => v.clone(),
            }),
            steps: s.steps,
            include_carrier: s.include_carrier,
            trajectory_samples: s.trajectory_samples,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[chain]
n_ions = 2
axial_freq_hz = 1e6
ion_mass_amu = 171
lamb_dicke_com = 0.1

[design]
tau_s = 3.2e-6
K = 30
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::parse(MINIMAL, &[]).unwrap();
        let d = c.design_section().unwrap();
        assert_eq!(d.mode, ModeName::Global);
        assert_eq!(d.restarts, 32);
        assert_eq!(c.output.formats, vec![Format::Json, Format::Csv]);
        assert!(c.phase_grid().is_none());
        let spec = c.chain_spec();
        assert!((spec.axial_freq - TAU * 1e6).abs() < 1e-6);
        assert!(spec.wavevector > 0.0);
    }

    #[test]
    fn overrides_replace_and_add_keys() {
        let c = RunConfig::parse(
            MINIMAL,
            &[
                "design.robust=true".into(),
                "simulate.phi0_points=4".into(),
                "output.directory=runs/a".into(),
            ],
        )
        .unwrap();
        assert!(c.design_section().unwrap().robust);
        assert_eq!(c.phase_grid().unwrap().len(), 4);
        assert_eq!(c.output.directory, PathBuf::from("runs/a"));
    }

    #[test]
    fn couplings_are_symmetric_and_one_based() {
        let text = format!("{MINIMAL}couplings = [[1, 2, 0.5]]\nmode = \"individual\"\n");
        let c = RunConfig::parse(&text, &[]).unwrap();
        let j = c.couplings().unwrap();
        assert_eq!((j[(0, 1)], j[(1, 0)], j[(0, 0)]), (0.5, 0.5, 0.0));
        assert_eq!(c.design_problem().unwrap().control, ControlMode::Individual);
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            MINIMAL.replace("K = 30", "K = 0"),
            MINIMAL.replace("tau_s = 3.2e-6", "tau_s = -1.0"),
            MINIMAL.replace("lamb_dicke_com = 0.1", ""),
            format!("{MINIMAL}couplings = [[1, 3, 0.5]]\n"),
            format!("{MINIMAL}typo = 1\n"),
            MINIMAL.replace("n_ions = 2", "n_ions = \"two\""),
        ];
        for text in cases {
            assert!(
                matches!(RunConfig::parse(&text, &[]), Err(CliError::Config(_))),
                "{text}"
            );
        }
        assert!(RunConfig::parse(MINIMAL, &["robust".into()]).is_err());
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let Err(CliError::Config(msg)) = RunConfig::parse("[chain]\nn_ions = = 2\n", &[]) else {
            panic!("expected a config error");
        };
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn override_values_fall_back_to_strings() {
        assert_eq!(override_value("3"), toml::Value::Integer(3));
        assert_eq!(override_value("[1.0, 2.0]").as_array().unwrap().len(), 2);
        assert_eq!(override_value("out/dir"), toml::Value::String("out/dir".into()));
    }
}
