//! Subcommand implementations.
//!
//! Every subcommand takes a validated [`RunConfig`], writes its artifacts
//! into the configured output directory, and finishes by writing a
//! `manifest.json` that references each artifact with a checksum. Given the
//! same config (including the seed), re-running a subcommand reproduces
//! every numeric output byte for byte, independent of thread count.

use crate::config::{OutputFormat, ProtocolKind, RunConfig, SystemKind};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::output::{csv_bytes, json_bytes, sha256_hex, write_artifact, FileRecord};
use crate::plot::{emit_plot, Series, SeriesStyle};
use chaoswork_core::{
    char_func_of_atoms, char_func_semiclassical, char_to_work, classical_free_energy_difference,
    classical_work_samples, hermitian_extend, histogram_density, jarzynski_check, l1_distance,
    moments, quantum_free_energy_difference, quantum_work_distribution,
    quantum_work_distribution_sudden, BoxSystem1D, CharFunc, DistributionKind,
    HarmonicRampSystem, QuantumModel, SampleStream, StadiumSystem, System, ThermalParams, UGrid,
    WorkDistribution,
};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

/// Salt decorrelating the free-energy estimator's sample stream from the
/// work estimator's; both are derived from `engine.seed`.
const DF_STREAM_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

const CHAR_FUNC_HEADERS: &[&str] = &["u", "re_g", "im_g", "stderr"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    /// Characteristic function and work distribution from the
    /// trajectory-phase average.
    Semiclassical,
    /// Two-point work histogram from driven classical trajectories.
    Classical,
    /// Exact two-point work atoms on a small quantum model.
    Quantum,
    /// Fluctuation-identity check across all applicable methods.
    Jarzynski,
    /// Side-by-side distribution comparison with L1 distances and moments.
    Compare,
    /// L1 convergence of the trajectory-phase estimator toward the
    /// classical histogram as `hbar_eff` shrinks.
    Limits,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Semiclassical => "semiclassical",
            CommandKind::Classical => "classical",
            CommandKind::Quantum => "quantum",
            CommandKind::Jarzynski => "jarzynski",
            CommandKind::Compare => "compare",
            CommandKind::Limits => "limits",
        }
    }
}

/// The configured system with a classical phase space, dimension resolved.
enum PhaseSpaceSystem {
    Stadium(StadiumSystem<f64>),
    Box1(BoxSystem1D<f64>),
    Harmonic(HarmonicRampSystem<f64>),
}

/// Dispatches `$body` onto the concrete system type behind the enum, so
/// helpers can stay generic over the phase-space dimension.
macro_rules! with_system {
    ($built:expr, $sys:ident => $body:expr) => {
        match $built {
            PhaseSpaceSystem::Stadium($sys) => $body,
            PhaseSpaceSystem::Box1($sys) => $body,
            PhaseSpaceSystem::Harmonic($sys) => $body,
        }
    };
}

fn build_phase_space(cfg: &RunConfig) -> Result<PhaseSpaceSystem, CliError> {
    match cfg.system.kind {
        SystemKind::Stadium => Ok(PhaseSpaceSystem::Stadium(cfg.build_stadium()?)),
        SystemKind::Box => Ok(PhaseSpaceSystem::Box1(cfg.build_box()?)),
        SystemKind::Harmonic => Ok(PhaseSpaceSystem::Harmonic(cfg.build_harmonic()?)),
        SystemKind::TwoLevel => Err(CliError::Config {
            field: "system.kind".into(),
            reason: "the two-level model has no classical phase space; use the `quantum` \
                     subcommand"
                .into(),
        }),
    }
}

/// Artifact sink for one run: gathers file records and failure counts while
/// honoring the configured output formats.
struct RunOutput {
    dir: PathBuf,
    files: Vec<FileRecord>,
    failures: BTreeMap<String, usize>,
    config_hash: String,
    csv: bool,
    json: bool,
    svg: bool,
}

impl RunOutput {
    fn new(cfg: &RunConfig) -> Self {
        let hash = sha256_hex(cfg.to_toml_string().as_bytes());
        let formats = &cfg.output.formats;
        Self {
            dir: PathBuf::from(&cfg.output.dir),
            files: Vec::new(),
            failures: BTreeMap::new(),
            config_hash: hash[..12].to_string(),
            csv: formats.contains(&OutputFormat::Csv),
            json: formats.contains(&OutputFormat::Json),
            svg: cfg.output.plot || formats.contains(&OutputFormat::Svg),
        }
    }

    fn write_csv(&mut self, name: &str, headers: &[&str], rows: &[Vec<f64>]) -> Result<(), CliError> {
        if self.csv {
            self.files
                .push(write_artifact(&self.dir, name, &csv_bytes(headers, rows))?);
        }
        Ok(())
    }

    fn write_json(&mut self, name: &str, value: &serde_json::Value) -> Result<(), CliError> {
        if self.json {
            self.files
                .push(write_artifact(&self.dir, name, &json_bytes(value))?);
        }
        Ok(())
    }

    fn write_plot(
        &mut self,
        name: &str,
        series: &[Series],
        title: &str,
        x_label: &str,
        y_label: &str,
    ) -> Result<(), CliError> {
        if self.svg {
            let svg = emit_plot(series, title, x_label, y_label, &self.config_hash)?;
            self.files
                .push(write_artifact(&self.dir, name, svg.as_bytes())?);
        }
        Ok(())
    }

    fn note_failures(&mut self, key: &str, n_failed: usize) {
        if n_failed > 0 {
            self.failures.insert(key.to_string(), n_failed);
        }
    }
}

/// Runs one subcommand end to end and returns the manifest it wrote.
pub fn run(command: CommandKind, cfg: &RunConfig) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut out = RunOutput::new(cfg);
    let report = match command {
        CommandKind::Semiclassical => run_semiclassical(cfg, &mut out)?,
        CommandKind::Classical => run_classical(cfg, &mut out)?,
        CommandKind::Quantum => run_quantum(cfg, &mut out)?,
        CommandKind::Jarzynski => run_jarzynski(cfg, &mut out)?,
        CommandKind::Compare => run_compare(cfg, &mut out)?,
        CommandKind::Limits => run_limits(cfg, &mut out)?,
    };
    let mut manifest = RunManifest::new(command.name(), cfg);
    let dir = out.dir.clone();
    manifest.files = out.files;
    manifest.failure_counts = out.failures;
    manifest.report = report;
    manifest.wall_time_ms = started.elapsed().as_millis() as u64;
    manifest.write(&dir)?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Shared pipelines
// ---------------------------------------------------------------------------

/// Trajectory-phase estimate on the half grid plus its inverted density.
fn semi_pipeline<S, const D: usize>(
    sys: &S,
    cfg: &RunConfig,
    beta: f64,
    hbar: f64,
) -> Result<(CharFunc<f64>, WorkDistribution<f64>), CliError>
where
    S: System<f64, D>,
{
    let thermal = ThermalParams::new(beta, hbar, cfg.thermal.mass)?;
    let protocol = cfg.work_protocol()?;
    let grid = UGrid::new(cfg.engine.u_max, cfg.engine.n_points)?;
    let stream = SampleStream::new(cfg.engine.seed);
    let cf = char_func_semiclassical(sys, &protocol, &thermal, &grid, cfg.engine.n_samples, &stream)?;
    let full = hermitian_extend(&cf)?;
    let dist = char_to_work(&full, cfg.window())?;
    Ok((cf, dist))
}

/// Classical two-point histogram plus the count of dropped trajectories.
fn classical_pipeline<S, const D: usize>(
    sys: &S,
    cfg: &RunConfig,
    beta: f64,
) -> Result<(WorkDistribution<f64>, usize), CliError>
where
    S: System<f64, D>,
{
    let thermal = ThermalParams::new(beta, 1.0, cfg.thermal.mass)?;
    let protocol = cfg.work_protocol()?;
    let stream = SampleStream::new(cfg.engine.seed);
    let samples = classical_work_samples(sys, &protocol, &thermal, cfg.engine.n_samples, &stream)?;
    let n_failed = samples.n_failed;
    let dist = histogram_density(&samples, cfg.histogram_bins())?;
    Ok((dist, n_failed))
}

/// Classical two-point samples rendered through the same grid and window as
/// the trajectory-phase density. An L1 distance against this rendering
/// measures estimator disagreement; against the plain histogram it would
/// mostly measure the mismatch between the two smoothing kernels.
fn classical_matched_pipeline<S, const D: usize>(
    sys: &S,
    cfg: &RunConfig,
    beta: f64,
) -> Result<(WorkDistribution<f64>, usize), CliError>
where
    S: System<f64, D>,
{
    let thermal = ThermalParams::new(beta, 1.0, cfg.thermal.mass)?;
    let protocol = cfg.work_protocol()?;
    let stream = SampleStream::new(cfg.engine.seed);
    let samples = classical_work_samples(sys, &protocol, &thermal, cfg.engine.n_samples, &stream)?;
    let n_failed = samples.n_failed;
    let weight = 1.0 / samples.w.len() as f64;
    let atoms: Vec<(f64, f64)> = samples.w.iter().map(|&w| (w, weight)).collect();
    let atom_dist = WorkDistribution::from_atoms(atoms, Some(samples.n_samples))?;
    let grid = UGrid::new(cfg.engine.u_max, cfg.engine.n_points)?;
    let cf = char_func_of_atoms(&atom_dist, &grid)?;
    let full = hermitian_extend(&cf)?;
    let dist = char_to_work(&full, cfg.window())?;
    Ok((dist, n_failed))
}

/// Classical free-energy difference with its standard error; closed form
/// where available, Monte Carlo on a decorrelated stream otherwise.
fn classical_delta_f(
    built: &PhaseSpaceSystem,
    cfg: &RunConfig,
    beta: f64,
) -> Result<(f64, f64), CliError> {
    if let PhaseSpaceSystem::Harmonic(sys) = built {
        return Ok((sys.free_energy_difference(beta), 0.0));
    }
    let stream = SampleStream::new(cfg.engine.seed ^ DF_STREAM_SALT);
    let pair = with_system!(built, sys => classical_free_energy_difference(
        sys,
        beta,
        &stream,
        cfg.engine.n_samples,
    ))?;
    Ok(pair)
}

/// Exact quantum work atoms under the configured protocol.
fn quantum_distribution(
    cfg: &RunConfig,
    model: &QuantumModel,
    beta: f64,
) -> Result<WorkDistribution<f64>, CliError> {
    Ok(match cfg.process.protocol {
        ProtocolKind::Quench => quantum_work_distribution_sudden(model, beta)?,
        ProtocolKind::Driven => {
            let process = cfg.process_spec()?;
            quantum_work_distribution(model, &process, beta, cfg.quantum_steps())?
        }
    })
}

// ---------------------------------------------------------------------------
// Row/report shaping
// ---------------------------------------------------------------------------

/// Shortest-round-trip rendering, used to key artifacts by parameter value.
fn fmt_param(x: f64) -> String {
    format!("{x}")
}

fn char_func_rows(cf: &CharFunc<f64>) -> Vec<Vec<f64>> {
    (0..cf.u.len())
        .map(|i| vec![cf.u[i], cf.g[i].re, cf.g[i].im, cf.stderr[i]])
        .collect()
}

fn dist_headers(d: &WorkDistribution<f64>) -> [&'static str; 2] {
    match d.kind {
        DistributionKind::Density => ["w", "density"],
        DistributionKind::Atoms => ["w", "weight"],
    }
}

fn dist_rows(d: &WorkDistribution<f64>) -> Vec<Vec<f64>> {
    d.w.iter().zip(&d.weight).map(|(&w, &p)| vec![w, p]).collect()
}

fn dist_series(d: &WorkDistribution<f64>, label: String) -> Series {
    Series {
        label,
        x: d.w.clone(),
        y: d.weight.clone(),
        style: match d.kind {
            DistributionKind::Density => SeriesStyle::Line,
            DistributionKind::Atoms => SeriesStyle::Points,
        },
    }
}

fn kind_name(kind: DistributionKind) -> &'static str {
    match kind {
        DistributionKind::Density => "density",
        DistributionKind::Atoms => "atoms",
    }
}

fn dist_summary(d: &WorkDistribution<f64>) -> Result<serde_json::Value, CliError> {
    Ok(json!({
        "kind": kind_name(d.kind),
        "total_mass": d.total_mass(),
        "negative_work_mass": d.negative_work_mass(),
        "clipped_mass": d.clipped_mass,
        "broadening": d.broadening,
        "mean": moments(d, 1)?,
        "second_moment": moments(d, 2)?,
    }))
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_semiclassical(cfg: &RunConfig, out: &mut RunOutput) -> Result<serde_json::Value, CliError> {
    let built = build_phase_space(cfg)?;
    let mut runs = Vec::new();
    for &beta in &cfg.thermal.beta {
        let mut series = Vec::new();
        for &hbar in &cfg.thermal.hbar_eff {
            let (cf, dist) = with_system!(&built, sys => semi_pipeline(sys, cfg, beta, hbar))?;
            let g_name = format!(
                "semiclassical_g_beta{}_hbar{}.csv",
                fmt_param(beta),
                fmt_param(hbar)
            );
            out.write_csv(&g_name, CHAR_FUNC_HEADERS, &char_func_rows(&cf))?;
            out.note_failures(&g_name, cf.n_failed);
            let p_name = format!(
                "semiclassical_p_beta{}_hbar{}.csv",
                fmt_param(beta),
                fmt_param(hbar)
            );
            out.write_csv(&p_name, &dist_headers(&dist), &dist_rows(&dist))?;
            runs.push(json!({
                "beta": beta,
                "hbar_eff": hbar,
                "n_samples": cf.n_samples,
                "n_failed": cf.n_failed,
                "distribution": dist_summary(&dist)?,
            }));
            series.push(dist_series(&dist, format!("hbar_eff={hbar}")));
        }
        out.write_plot(
            &format!("semiclassical_p_beta{}.svg", fmt_param(beta)),
            &series,
            "Work distribution (trajectory-phase estimate)",
            "W",
            "P(W)",
        )?;
    }
    Ok(json!({ "runs": runs }))
}

fn run_classical(cfg: &RunConfig, out: &mut RunOutput) -> Result<serde_json::Value, CliError> {
    let built = build_phase_space(cfg)?;
    let mut runs = Vec::new();
    for &beta in &cfg.thermal.beta {
        let (dist, n_failed) = with_system!(&built, sys => classical_pipeline(sys, cfg, beta))?;
        let p_name = format!("classical_p_beta{}.csv", fmt_param(beta));
        out.write_csv(&p_name, &dist_headers(&dist), &dist_rows(&dist))?;
        out.note_failures(&p_name, n_failed);
        runs.push(json!({
            "beta": beta,
            "n_samples": cfg.engine.n_samples,
            "n_failed": n_failed,
            "distribution": dist_summary(&dist)?,
        }));
        out.write_plot(
            &format!("classical_p_beta{}.svg", fmt_param(beta)),
            &[dist_series(&dist, format!("beta={beta}"))],
            "Work distribution (two-point sampling)",
            "W",
            "P(W)",
        )?;
    }
    Ok(json!({ "runs": runs }))
}

fn run_quantum(cfg: &RunConfig, out: &mut RunOutput) -> Result<serde_json::Value, CliError> {
    cfg.ensure_quantum_hbar()?;
    let model = cfg.build_quantum_model()?;
    let grid = UGrid::new(cfg.engine.u_max, cfg.engine.n_points)?;
    let mut runs = Vec::new();
    for &beta in &cfg.thermal.beta {
        let dist = quantum_distribution(cfg, &model, beta)?;
        let atoms_name = format!("quantum_atoms_beta{}.csv", fmt_param(beta));
        out.write_csv(&atoms_name, &dist_headers(&dist), &dist_rows(&dist))?;
        let cf = char_func_of_atoms(&dist, &grid)?;
        let g_name = format!("quantum_g_beta{}.csv", fmt_param(beta));
        out.write_csv(&g_name, CHAR_FUNC_HEADERS, &char_func_rows(&cf))?;
        runs.push(json!({
            "beta": beta,
            "model": model.label(),
            "dim": model.dim(),
            "delta_f": quantum_free_energy_difference(&model, beta)?,
            "atom_count": dist.w.len(),
            "distribution": dist_summary(&dist)?,
        }));
        out.write_plot(
            &format!("quantum_p_beta{}.svg", fmt_param(beta)),
            &[dist_series(&dist, format!("beta={beta}"))],
            "Exact work atoms",
            "W",
            "probability",
        )?;
    }
    Ok(json!({ "runs": runs }))
}

fn run_jarzynski(cfg: &RunConfig, out: &mut RunOutput) -> Result<serde_json::Value, CliError> {
    let include_quantum = cfg.has_quantum_reference() && cfg.ensure_quantum_hbar().is_ok();
    let built = if cfg.has_phase_space() {
        Some(build_phase_space(cfg)?)
    } else {
        None
    };
    if built.is_none() && !include_quantum {
        return Err(CliError::Config {
            field: "thermal.hbar_eff".into(),
            reason: "two-level runs have only the quantum method, which requires hbar_eff = [1.0]"
                .into(),
        });
    }
    let model = if include_quantum {
        Some(cfg.build_quantum_model()?)
    } else {
        None
    };

    let mut entries = Vec::new();
    let mut ratio_points: BTreeMap<&'static str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    let push_entry = |entries: &mut Vec<serde_json::Value>,
                          ratio_points: &mut BTreeMap<&'static str, (Vec<f64>, Vec<f64>)>,
                          method: &'static str,
                          hbar: Option<f64>,
                          rep: &chaoswork_core::JarzynskiReport<f64>,
                          delta_f_stderr: f64,
                          n_failed: usize| {
        entries.push(json!({
            "method": method,
            "beta": rep.beta,
            "hbar_eff": hbar,
            "lhs": rep.lhs,
            "rhs": rep.rhs,
            "ratio": rep.ratio,
            "stderr": rep.stderr,
            "negative_work_mass": rep.negative_work_mass,
            "delta_f": rep.delta_f,
            "delta_f_stderr": delta_f_stderr,
            "n_failed": n_failed,
        }));
        let pts = ratio_points.entry(method).or_default();
        pts.0.push(rep.beta);
        pts.1.push(rep.ratio);
    };

    for &beta in &cfg.thermal.beta {
        if let Some(model) = &model {
            let dist = quantum_distribution(cfg, model, beta)?;
            let delta_f = quantum_free_energy_difference(model, beta)?;
            let rep = jarzynski_check(&dist, beta, delta_f, cfg.engine.seed)?;
            push_entry(&mut entries, &mut ratio_points, "quantum", Some(1.0), &rep, 0.0, 0);
        }
        if let Some(built) = &built {
            let (delta_f, delta_f_se) = classical_delta_f(built, cfg, beta)?;
            let (dist, n_failed) = with_system!(built, sys => classical_pipeline(sys, cfg, beta))?;
            let rep = jarzynski_check(&dist, beta, delta_f, cfg.engine.seed)?;
            out.note_failures(&format!("classical_beta{}", fmt_param(beta)), n_failed);
            push_entry(
                &mut entries,
                &mut ratio_points,
                "classical",
                None,
                &rep,
                delta_f_se,
                n_failed,
            );
            for &hbar in &cfg.thermal.hbar_eff {
                let (cf, sdist) = with_system!(built, sys => semi_pipeline(sys, cfg, beta, hbar))?;
                let rep = jarzynski_check(&sdist, beta, delta_f, cfg.engine.seed)?;
                out.note_failures(
                    &format!("semiclassical_beta{}_hbar{}", fmt_param(beta), fmt_param(hbar)),
                    cf.n_failed,
                );
                push_entry(
                    &mut entries,
                    &mut ratio_points,
                    "semiclassical",
                    Some(hbar),
                    &rep,
                    delta_f_se,
                    cf.n_failed,
                );
            }
        }
    }

    let report = json!({ "entries": entries });
    out.write_json("jarzynski_report.json", &report)?;
    let series: Vec<Series> = ratio_points
        .into_iter()
        .map(|(label, (x, y))| Series {
            label: label.to_string(),
            x,
            y,
            style: SeriesStyle::Points,
        })
        .collect();
    out.write_plot(
        "jarzynski_ratio.svg",
        &series,
        "Fluctuation identity ratio",
        "beta",
        "<exp(-beta W)> exp(beta dF)",
    )?;
    Ok(report)
}

fn run_compare(cfg: &RunConfig, out: &mut RunOutput) -> Result<serde_json::Value, CliError> {
    let built = build_phase_space(cfg)?;
    let include_quantum = cfg.has_quantum_reference() && cfg.ensure_quantum_hbar().is_ok();
    let model = if include_quantum {
        Some(cfg.build_quantum_model()?)
    } else {
        None
    };

    let mut blocks = Vec::new();
    for &beta in &cfg.thermal.beta {
        let (cdist, c_failed) = with_system!(&built, sys => classical_pipeline(sys, cfg, beta))?;
        let c_name = format!("classical_p_beta{}.csv", fmt_param(beta));
        out.write_csv(&c_name, &dist_headers(&cdist), &dist_rows(&cdist))?;
        out.note_failures(&c_name, c_failed);
        // The histogram above is the exported artifact; L1 distances are
        // taken against the same samples rendered through the shared grid
        // and window so they compare estimators, not smoothing kernels.
        let (cmatched, _) =
            with_system!(&built, sys => classical_matched_pipeline(sys, cfg, beta))?;

        let mut series = vec![dist_series(&cdist, "classical".into())];
        let mut semis = Vec::new();
        for &hbar in &cfg.thermal.hbar_eff {
            let (cf, sdist) = with_system!(&built, sys => semi_pipeline(sys, cfg, beta, hbar))?;
            let p_name = format!(
                "semiclassical_p_beta{}_hbar{}.csv",
                fmt_param(beta),
                fmt_param(hbar)
            );
            out.write_csv(&p_name, &dist_headers(&sdist), &dist_rows(&sdist))?;
            out.note_failures(&p_name, cf.n_failed);
            let l1 = json!(l1_distance(&sdist, &cmatched)?);
            semis.push(json!({
                "hbar_eff": hbar,
                "l1_vs_classical": l1,
                "n_failed": cf.n_failed,
                "distribution": dist_summary(&sdist)?,
            }));
            series.push(dist_series(&sdist, format!("trajectory-phase hbar_eff={hbar}")));
        }

        let quantum = match &model {
            Some(m) => {
                let qdist = quantum_distribution(cfg, m, beta)?;
                json!({
                    "delta_f": quantum_free_energy_difference(m, beta)?,
                    "distribution": dist_summary(&qdist)?,
                })
            }
            None => serde_json::Value::Null,
        };

        blocks.push(json!({
            "beta": beta,
            "classical": {
                "n_failed": c_failed,
                "distribution": dist_summary(&cdist)?,
            },
            "semiclassical": semis,
            "quantum": quantum,
        }));
        out.write_plot(
            &format!("compare_p_beta{}.svg", fmt_param(beta)),
            &series,
            "Work distribution comparison",
            "W",
            "P(W)",
        )?;
    }

    let report = json!({ "blocks": blocks });
    out.write_json("compare_report.json", &report)?;
    Ok(report)
}

fn run_limits(cfg: &RunConfig, out: &mut RunOutput) -> Result<serde_json::Value, CliError> {
    let built = build_phase_space(cfg)?;
    // The sweep varies hbar_eff at fixed temperature: use the first entry.
    let beta = cfg.thermal.beta[0];
    let (cdist, c_failed) =
        with_system!(&built, sys => classical_matched_pipeline(sys, cfg, beta))?;
    out.note_failures(&format!("classical_beta{}", fmt_param(beta)), c_failed);

    let mut rows = Vec::new();
    let mut entries = Vec::new();
    for &hbar in &cfg.thermal.hbar_eff {
        let (cf, sdist) = with_system!(&built, sys => semi_pipeline(sys, cfg, beta, hbar))?;
        let l1 = l1_distance(&sdist, &cdist)?;
        out.note_failures(&format!("semiclassical_hbar{}", fmt_param(hbar)), cf.n_failed);
        rows.push(vec![hbar, l1]);
        entries.push(json!({ "hbar_eff": hbar, "l1_distance": l1, "n_failed": cf.n_failed }));
    }
    out.write_csv("limits_l1.csv", &["hbar_eff", "l1_distance"], &rows)?;

    let monotone = rows.windows(2).all(|pair| pair[1][1] < pair[0][1]);
    let report = json!({
        "beta": beta,
        "entries": entries,
        "monotone_decreasing": monotone,
    });
    out.write_plot(
        "limits_l1.svg",
        &[Series {
            label: "L1(trajectory-phase, classical)".into(),
            x: rows.iter().map(|r| r[0]).collect(),
            y: rows.iter().map(|r| r[1]).collect(),
            style: SeriesStyle::Points,
        }],
        "Classical-limit convergence",
        "hbar_eff",
        "L1 distance",
    )?;
    Ok(report)
}
