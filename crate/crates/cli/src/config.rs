//! Run configuration: a human-editable TOML file that fully determines a
//! run. Every field round-trips losslessly through serialize/parse, and
//! validation reports the offending field by name.

use crate::error::CliError;
use chaoswork_core::{
    BoxSystem1D, GaussianBump1D, GaussianPotential, HarmonicRampSystem, ProcessSpec, QuantumModel,
    Schedule, StadiumGeometry, StadiumSystem, WorkProtocol,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    /// Quarter hard-wall stadium billiard (2D, chaotic).
    Stadium,
    /// Particle in a 1D box.
    Box,
    /// 1D harmonic oscillator with a stiffness ramp.
    Harmonic,
    /// Two-level system (quantum reference only).
    TwoLevel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    Linear,
    Smoothstep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    /// Finite-duration drive integrated step by step.
    Driven,
    /// Instantaneous switch.
    Quench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    Gaussian,
    Hann,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

/// The unperturbed system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSpec {
    pub kind: SystemKind,
    /// Stadium: quarter-circle radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Stadium: straight-segment length. Box: box length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// Harmonic: base stiffness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    /// Two-level: level splitting.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

impl Default for SystemSpec {
    fn default() -> Self {
        Self {
            kind: SystemKind::Stadium,
            radius: Some(1.0),
            length: Some(1.0),
            k0: None,
            gap: None,
        }
    }
}

/// The drive: perturbation shape, switching duration, and ramp schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProcessSection {
    pub tau: f64,
    pub schedule: ScheduleKind,
    pub protocol: ProtocolKind,
    /// Gaussian perturbation strength (total weight per well); 0 disables
    /// the drive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength: Option<f64>,
    /// Gaussian perturbation width.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    /// Well centers: pairs for 2D systems, single-element rows for 1D.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<Vec<f64>>>,
    /// Harmonic: stiffness increment switched on by the drive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dk: Option<f64>,
    /// Two-level: diagonal perturbation entries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_diag: Option<[f64; 2]>,
    /// Two-level: off-diagonal perturbation as [re, im].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_off: Option<[f64; 2]>,
}

impl Default for ProcessSection {
    fn default() -> Self {
        Self {
            tau: 0.1,
            schedule: ScheduleKind::Linear,
            protocol: ProtocolKind::Driven,
            strength: Some(180.0),
            width: Some(0.1),
            centers: Some(vec![
                vec![0.2, 0.4],
                vec![0.67, 0.5],
                vec![0.5, 0.15],
                vec![0.3, 0.75],
            ]),
            dk: None,
            v_diag: None,
            v_off: None,
        }
    }
}

/// Thermal preparation: sweep lists over inverse temperature and effective
/// Planck constant, plus the particle mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalSection {
    pub beta: Vec<f64>,
    pub hbar_eff: Vec<f64>,
    pub mass: f64,
}

impl Default for ThermalSection {
    fn default() -> Self {
        Self {
            beta: vec![1.0 / 256.0],
            hbar_eff: vec![1.0],
            mass: 0.5,
        }
    }
}

/// Numerical engine knobs shared by the estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EngineSection {
    pub n_samples: usize,
    pub seed: u64,
    /// Characteristic-function grid: maximum argument and point count on
    /// the half grid [0, u_max].
    pub u_max: f64,
    pub n_points: usize,
    /// Step bound for the driven integrator.
    pub dt: f64,
    pub window: WindowKind,
    /// Gaussian window width in units of the inverted grid's bin spacing.
    pub window_bins: f64,
    /// Histogram bins for sampled distributions; 0 selects the
    /// Freedman-Diaconis rule.
    pub bins: usize,
}

impl Default for EngineSection {
    fn default() -> Self {
        Self {
            n_samples: 10_000,
            seed: 1,
            u_max: 0.5,
            n_points: 2048,
            dt: 1e-3,
            window: WindowKind::Gaussian,
            window_bins: 2.0,
            bins: 0,
        }
    }
}

/// Resolution of the exact quantum reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantumSection {
    pub n_basis: usize,
    /// Integrator steps for the amplitude evolution; 0 selects an
    /// automatic count from the spectral spread.
    pub n_steps: usize,
}

impl Default for QuantumSection {
    fn default() -> Self {
        Self {
            n_basis: 32,
            n_steps: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    pub formats: Vec<OutputFormat>,
    pub plot: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            formats: vec![OutputFormat::Csv, OutputFormat::Json],
            plot: false,
        }
    }
}

/// Complete description of a run. `(config, seed)` determines every output
/// byte.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub process: ProcessSection,
    pub thermal: ThermalSection,
    pub engine: EngineSection,
    pub quantum: QuantumSection,
    pub output: OutputSection,
}

fn field_err(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn require_positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(field_err(field, format!("must be finite and positive, got {v}")))
    }
}

fn require(field: &str, v: Option<f64>) -> Result<f64, CliError> {
    v.ok_or_else(|| field_err(field, "required for this system kind"))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse {
            reason: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Field-by-field validation; the first offence is reported with its
    /// fully qualified field name.
    pub fn validate(&self) -> Result<(), CliError> {
        // Process.
        require_positive("process.tau", self.process.tau)?;

        // Thermal sweeps.
        if self.thermal.beta.is_empty() {
            return Err(field_err("thermal.beta", "list must be non-empty"));
        }
        for &b in &self.thermal.beta {
            require_positive("thermal.beta", b)?;
        }
        if self.thermal.hbar_eff.is_empty() {
            return Err(field_err("thermal.hbar_eff", "list must be non-empty"));
        }
        for &h in &self.thermal.hbar_eff {
            require_positive("thermal.hbar_eff", h)?;
        }
        require_positive("thermal.mass", self.thermal.mass)?;

        // Engine.
        if self.engine.n_samples < 2 {
            return Err(field_err("engine.n_samples", "need at least 2 samples"));
        }
        require_positive("engine.u_max", self.engine.u_max)?;
        if self.engine.n_points < 2 {
            return Err(field_err("engine.n_points", "need at least 2 grid points"));
        }
        require_positive("engine.dt", self.engine.dt)?;
        require_positive("engine.window_bins", self.engine.window_bins)?;
        if self.engine.bins != 0 && self.engine.bins < 10 {
            return Err(field_err(
                "engine.bins",
                "0 selects automatic binning; explicit counts need at least 10",
            ));
        }

        // Quantum resolution.
        if self.quantum.n_basis < 2 {
            return Err(field_err("quantum.n_basis", "need at least 2 basis states"));
        }

        // System-specific parameter presence and ranges; constructing the
        // actual objects performs the detailed geometric checks.
        match self.system.kind {
            SystemKind::Stadium => {
                self.build_stadium()?;
            }
            SystemKind::Box => {
                self.build_box()?;
            }
            SystemKind::Harmonic => {
                self.build_harmonic()?;
            }
            SystemKind::TwoLevel => {
                self.build_two_level()?;
            }
        }
        Ok(())
    }

    pub fn schedule(&self) -> Schedule {
        match self.process.schedule {
            ScheduleKind::Linear => Schedule::Linear,
            ScheduleKind::Smoothstep => Schedule::Smoothstep,
        }
    }

    pub fn process_spec(&self) -> Result<ProcessSpec<f64>, CliError> {
        ProcessSpec::new(self.process.tau, self.schedule())
            .map_err(|e| field_err("process.tau", e.to_string()))
    }

    pub fn work_protocol(&self) -> Result<WorkProtocol<f64>, CliError> {
        match self.process.protocol {
            ProtocolKind::Quench => Ok(WorkProtocol::Quench),
            ProtocolKind::Driven => WorkProtocol::driven(self.process_spec()?, self.engine.dt)
                .map_err(|e| field_err("engine.dt", e.to_string())),
        }
    }

    fn centers_2d(&self) -> Result<Vec<[f64; 2]>, CliError> {
        let centers = self
            .process
            .centers
            .as_ref()
            .ok_or_else(|| field_err("process.centers", "required for this system kind"))?;
        centers
            .iter()
            .map(|c| {
                if c.len() == 2 {
                    Ok([c[0], c[1]])
                } else {
                    Err(field_err(
                        "process.centers",
                        format!("2D system needs [x, y] pairs, got a row of length {}", c.len()),
                    ))
                }
            })
            .collect()
    }

    fn center_1d(&self) -> Result<f64, CliError> {
        let centers = self
            .process
            .centers
            .as_ref()
            .ok_or_else(|| field_err("process.centers", "required for this system kind"))?;
        if centers.len() != 1 || centers[0].len() != 1 {
            return Err(field_err(
                "process.centers",
                "1D system needs exactly one single-element row, e.g. [[5.0]]",
            ));
        }
        Ok(centers[0][0])
    }

    pub fn build_stadium(&self) -> Result<StadiumSystem<f64>, CliError> {
        let radius = require_positive("system.radius", require("system.radius", self.system.radius)?)?;
        let length = require_positive("system.length", require("system.length", self.system.length)?)?;
        let strength = require("process.strength", self.process.strength)?;
        let width = require_positive("process.width", require("process.width", self.process.width)?)?;
        if !(strength.is_finite() && strength >= 0.0) {
            return Err(field_err("process.strength", "must be finite and nonnegative"));
        }
        let geometry = StadiumGeometry::new(radius, length)
            .map_err(|e| field_err("system.radius", e.to_string()))?;
        let potential = GaussianPotential::new(strength, width, self.centers_2d()?)
            .map_err(|e| field_err("process.centers", e.to_string()))?;
        StadiumSystem::new(geometry, potential, self.thermal.mass)
            .map_err(|e| field_err("system", e.to_string()))
    }

    pub fn build_box(&self) -> Result<BoxSystem1D<f64>, CliError> {
        let length = require_positive("system.length", require("system.length", self.system.length)?)?;
        let strength = require("process.strength", self.process.strength)?;
        let width = require_positive("process.width", require("process.width", self.process.width)?)?;
        if !(strength.is_finite() && strength >= 0.0) {
            return Err(field_err("process.strength", "must be finite and nonnegative"));
        }
        let bump = GaussianBump1D::new(strength, width, self.center_1d()?)
            .map_err(|e| field_err("process.centers", e.to_string()))?;
        BoxSystem1D::new(length, bump, self.thermal.mass)
            .map_err(|e| field_err("system", e.to_string()))
    }

    pub fn build_harmonic(&self) -> Result<HarmonicRampSystem<f64>, CliError> {
        let k0 = require_positive("system.k0", require("system.k0", self.system.k0)?)?;
        let dk = require("process.dk", self.process.dk)?;
        HarmonicRampSystem::new(self.thermal.mass, k0, dk)
            .map_err(|e| field_err("process.dk", e.to_string()))
    }

    fn build_two_level(&self) -> Result<QuantumModel, CliError> {
        let gap = require_positive("system.gap", require("system.gap", self.system.gap)?)?;
        let v_diag = self
            .process
            .v_diag
            .ok_or_else(|| field_err("process.v_diag", "required for the two-level system"))?;
        let v_off = self
            .process
            .v_off
            .ok_or_else(|| field_err("process.v_off", "required for the two-level system"))?;
        QuantumModel::two_level(gap, v_diag, chaoswork_core::quantum::C64::new(v_off[0], v_off[1]))
            .map_err(|e| field_err("system.gap", e.to_string()))
    }

    /// True when the configured system has an exact finite-basis quantum
    /// reference.
    pub fn has_quantum_reference(&self) -> bool {
        !matches!(self.system.kind, SystemKind::Stadium)
    }

    /// True when the configured system has a classical phase space to
    /// sample.
    pub fn has_phase_space(&self) -> bool {
        !matches!(self.system.kind, SystemKind::TwoLevel)
    }

    /// The quantum reference model at hbar = 1 (enforced by
    /// [`ensure_quantum_hbar`]). Truncation uses `quantum.n_basis`.
    pub fn build_quantum_model(&self) -> Result<QuantumModel, CliError> {
        match self.system.kind {
            SystemKind::Stadium => Err(field_err(
                "system.kind",
                "the stadium billiard has no finite-basis quantum reference at feasible sizes",
            )),
            SystemKind::Box => {
                let length =
                    require_positive("system.length", require("system.length", self.system.length)?)?;
                let strength = require("process.strength", self.process.strength)?;
                let width =
                    require_positive("process.width", require("process.width", self.process.width)?)?;
                QuantumModel::box_with_bump(
                    self.quantum.n_basis,
                    length,
                    self.thermal.mass,
                    1.0,
                    strength,
                    width,
                    self.center_1d()?,
                )
                .map_err(|e| field_err("quantum.n_basis", e.to_string()))
            }
            SystemKind::Harmonic => {
                let k0 = require_positive("system.k0", require("system.k0", self.system.k0)?)?;
                let dk = require("process.dk", self.process.dk)?;
                QuantumModel::harmonic_ramp(self.quantum.n_basis, self.thermal.mass, k0, dk, 1.0)
                    .map_err(|e| field_err("quantum.n_basis", e.to_string()))
            }
            SystemKind::TwoLevel => self.build_two_level(),
        }
    }

    /// Cross-validation against the quantum reference is defined at
    /// hbar_eff = 1 only; reject sweeps that pretend otherwise.
    pub fn ensure_quantum_hbar(&self) -> Result<(), CliError> {
        if self.thermal.hbar_eff.iter().all(|&h| h == 1.0) {
            Ok(())
        } else {
            Err(field_err(
                "thermal.hbar_eff",
                "the quantum reference is defined at hbar_eff = 1; remove other values",
            ))
        }
    }

    pub fn quantum_steps(&self) -> Option<usize> {
        if self.quantum.n_steps == 0 {
            None
        } else {
            Some(self.quantum.n_steps)
        }
    }

    pub fn histogram_bins(&self) -> Option<usize> {
        if self.engine.bins == 0 {
            None
        } else {
            Some(self.engine.bins)
        }
    }

    pub fn window(&self) -> chaoswork_core::Window<f64> {
        match self.engine.window {
            WindowKind::Gaussian => chaoswork_core::Window::Gaussian {
                bins: self.engine.window_bins,
            },
            WindowKind::Hann => chaoswork_core::Window::Hann,
            WindowKind::None => chaoswork_core::Window::None,
        }
    }
}
