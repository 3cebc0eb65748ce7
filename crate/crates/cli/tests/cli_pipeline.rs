//! End-to-end tests of the `chaoswork` binary: artifact layout, manifest
//! bookkeeping, determinism, output-directory resolution, and structured
//! error reporting.

use chaoswork::{RunConfig, RunManifest, MANIFEST_NAME};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chaoswork"));
    // Isolate from any ambient default-output-directory setting.
    cmd.env_remove("CHAOSWORK_OUT");
    cmd
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Parses a two-or-more-column CSV written by the binary.
fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let headers: Vec<String> = lines
        .next()
        .expect("header row")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|line| {
            line.split(',')
                .map(|cell| cell.parse::<f64>().expect("numeric cell"))
                .collect()
        })
        .collect();
    (headers, rows)
}

const HARMONIC_CONFIG: &str = r#"
[system]
kind = "harmonic"
k0 = 1.0

[process]
tau = 0.05
schedule = "linear"
protocol = "driven"
dk = 0.5

[thermal]
beta = [1.0]
hbar_eff = [1.0]
mass = 1.0

[engine]
n_samples = 2000
seed = 11
u_max = 2.0
n_points = 64
dt = 0.001
"#;

const TWO_LEVEL_CONFIG: &str = r#"
[system]
kind = "two-level"
gap = 1.0

[process]
tau = 0.3
protocol = "driven"
v_diag = [0.3, -0.2]
v_off = [0.1, 0.05]

[thermal]
beta = [0.5, 4.0]
hbar_eff = [1.0]
mass = 1.0
"#;

const ZERO_STRENGTH_BOX_CONFIG: &str = r#"
[system]
kind = "box"
length = 10.0

[process]
tau = 0.05
protocol = "quench"
strength = 0.0
width = 0.8
centers = [[5.0]]

[thermal]
beta = [1.0]
hbar_eff = [1.0]
mass = 1.0

[engine]
n_samples = 500
seed = 3
"#;

#[test]
fn classical_with_zero_strength_yields_single_atom_at_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), ZERO_STRENGTH_BOX_CONFIG);
    let out_dir = tmp.path().join("out");
    run_ok(bin().args(["classical", "--config"]).arg(&cfg).arg("--out").arg(&out_dir));

    let (headers, rows) = read_csv(&out_dir.join("classical_p_beta1.csv"));
    assert_eq!(headers, ["w", "weight"]);
    assert_eq!(rows.len(), 1, "a zero-strength switch does no work");
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[0][1], 1.0);
}

#[test]
fn quantum_jarzynski_ratio_is_one_within_1e10() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), TWO_LEVEL_CONFIG);
    let out_dir = tmp.path().join("out");
    run_ok(bin().args(["jarzynski", "--config"]).arg(&cfg).arg("--out").arg(&out_dir));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("jarzynski_report.json")).unwrap())
            .unwrap();
    let entries = report["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2, "one quantum entry per temperature");
    for entry in entries {
        assert_eq!(entry["method"], "quantum");
        let ratio = entry["ratio"].as_f64().unwrap();
        assert!(
            (ratio - 1.0).abs() < 1e-10,
            "fluctuation identity violated: ratio = {ratio}"
        );
        assert_eq!(entry["stderr"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn semiclassical_reruns_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), HARMONIC_CONFIG);
    let out_dir = tmp.path().join("out");
    let artifact_names = [
        "semiclassical_g_beta1_hbar1.csv",
        "semiclassical_p_beta1_hbar1.csv",
    ];

    run_ok(bin().args(["semiclassical", "--config"]).arg(&cfg).arg("--out").arg(&out_dir));
    let first: Vec<Vec<u8>> = artifact_names
        .iter()
        .map(|name| std::fs::read(out_dir.join(name)).unwrap())
        .collect();
    let first_manifest = std::fs::read_to_string(out_dir.join(MANIFEST_NAME)).unwrap();

    // Second run: same config and seed, different worker-pool size.
    run_ok(
        bin()
            .args(["semiclassical", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .env("RAYON_NUM_THREADS", "4"),
    );
    for (name, bytes) in artifact_names.iter().zip(&first) {
        let again = std::fs::read(out_dir.join(name)).unwrap();
        assert_eq!(&again, bytes, "{name} changed between identical runs");
    }

    // Manifests agree on everything except the informational wall time.
    let mut a: serde_json::Value = serde_json::from_str(&first_manifest).unwrap();
    let mut b: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join(MANIFEST_NAME)).unwrap())
            .unwrap();
    a["wall_time_ms"] = serde_json::json!(0);
    b["wall_time_ms"] = serde_json::json!(0);
    assert_eq!(a, b);
}

#[test]
fn different_seeds_change_the_sampled_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), HARMONIC_CONFIG);
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");
    run_ok(bin().args(["semiclassical", "--config"]).arg(&cfg).arg("--out").arg(&dir_a));
    run_ok(
        bin()
            .args(["semiclassical", "--config"])
            .arg(&cfg)
            .arg("--seed")
            .arg("999")
            .arg("--out")
            .arg(&dir_b),
    );
    let a = std::fs::read(dir_a.join("semiclassical_g_beta1_hbar1.csv")).unwrap();
    let b = std::fs::read(dir_b.join("semiclassical_g_beta1_hbar1.csv")).unwrap();
    assert_ne!(a, b, "the seed override must reach the sampler");
}

#[test]
fn manifest_references_every_artifact_with_valid_checksums() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), HARMONIC_CONFIG);
    let out_dir = tmp.path().join("out");
    run_ok(
        bin()
            .args(["compare", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .arg("--plot"),
    );

    let manifest = RunManifest::load(&out_dir).unwrap();
    manifest.verify(&out_dir).unwrap();
    assert_eq!(manifest.command, "compare");

    let recorded: BTreeSet<String> = manifest.files.iter().map(|f| f.file.clone()).collect();
    assert_eq!(
        recorded.len(),
        manifest.files.len(),
        "no artifact may be referenced twice"
    );
    let on_disk: BTreeSet<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|name| name != MANIFEST_NAME)
        .collect();
    assert_eq!(recorded, on_disk, "manifest must reference exactly the run's artifacts");
    assert!(on_disk.iter().any(|name| name.ends_with(".svg")));
}

#[test]
fn compare_reports_l1_distance_moments_and_quantum_reference() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), HARMONIC_CONFIG);
    let out_dir = tmp.path().join("out");
    run_ok(bin().args(["compare", "--config"]).arg(&cfg).arg("--out").arg(&out_dir));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("compare_report.json")).unwrap())
            .unwrap();
    let block = &report["blocks"][0];
    assert_eq!(block["beta"].as_f64().unwrap(), 1.0);

    let l1 = block["semiclassical"][0]["l1_vs_classical"].as_f64().unwrap();
    assert!((0.0..=2.0).contains(&l1), "L1 out of range: {l1}");

    // Sampled and exact estimates of the mean work should at least agree
    // on sign and rough size at these settings.
    let classical_mean = block["classical"]["distribution"]["mean"].as_f64().unwrap();
    let quantum_mean = block["quantum"]["distribution"]["mean"].as_f64().unwrap();
    assert!(classical_mean > 0.0 && quantum_mean > 0.0);
    assert!(
        (classical_mean - quantum_mean).abs() < 0.5 * quantum_mean.max(classical_mean),
        "classical {classical_mean} vs quantum {quantum_mean}"
    );
}

#[test]
fn limits_sweep_writes_one_row_per_hbar() {
    let tmp = tempfile::tempdir().unwrap();
    let text = HARMONIC_CONFIG.replace("hbar_eff = [1.0]", "hbar_eff = [1.0, 0.3]");
    let cfg = write_config(tmp.path(), &text);
    let out_dir = tmp.path().join("out");
    run_ok(bin().args(["limits", "--config"]).arg(&cfg).arg("--out").arg(&out_dir));

    let (headers, rows) = read_csv(&out_dir.join("limits_l1.csv"));
    assert_eq!(headers, ["hbar_eff", "l1_distance"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], 1.0);
    assert_eq!(rows[1][0], 0.3);
    for row in &rows {
        assert!(row[1].is_finite() && row[1] >= 0.0);
    }

    let manifest = RunManifest::load(&out_dir).unwrap();
    assert!(manifest.report["monotone_decreasing"].is_boolean());
}

#[test]
fn plot_flag_emits_self_contained_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), HARMONIC_CONFIG);
    let out_dir = tmp.path().join("out");
    run_ok(
        bin()
            .args(["classical", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .arg("--plot"),
    );
    let svg = std::fs::read_to_string(out_dir.join("classical_p_beta1.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("config-hash:"));
    assert!(svg.contains("P(W)"));
}

#[test]
fn output_directory_resolution_prefers_flag_over_env_over_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), ZERO_STRENGTH_BOX_CONFIG);
    let env_dir = tmp.path().join("from_env");
    let flag_dir = tmp.path().join("from_flag");

    // Environment variable beats the config file's relative default.
    run_ok(
        bin()
            .args(["classical", "--config"])
            .arg(&cfg)
            .env("CHAOSWORK_OUT", &env_dir),
    );
    assert!(env_dir.join(MANIFEST_NAME).exists());

    // An explicit flag beats the environment.
    run_ok(
        bin()
            .args(["classical", "--config"])
            .arg(&cfg)
            .env("CHAOSWORK_OUT", &env_dir)
            .arg("--out")
            .arg(&flag_dir),
    );
    assert!(flag_dir.join(MANIFEST_NAME).exists());
}

#[test]
fn invalid_config_fails_with_structured_field_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[engine]\nbins = 5\n",
    );
    let out = bin()
        .args(["classical", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stderr)).unwrap();
    assert_eq!(report["error"]["kind"], "config");
    assert_eq!(report["error"]["field"], "engine.bins");

    // Unknown keys are parse errors that name the offending key.
    let cfg = write_config(tmp.path(), "[engine]\nn_sample = 3\n");
    let out = bin()
        .args(["classical", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8_lossy(&out.stderr)).unwrap();
    assert_eq!(report["error"]["kind"], "parse");
    assert!(report["error"]["reason"].as_str().unwrap().contains("n_sample"));
}

#[test]
fn print_config_emits_resolved_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), HARMONIC_CONFIG);
    let out = run_ok(
        bin()
            .args(["semiclassical", "--config"])
            .arg(&cfg)
            .args(["--seed", "7", "--samples", "123", "--print-config"]),
    );
    let text = String::from_utf8(out.stdout).unwrap();
    // The whole stdout is the resolved config: it parses back losslessly
    // and carries the flag overrides.
    let resolved = RunConfig::from_toml_str(&text).unwrap();
    assert_eq!(resolved.engine.seed, 7);
    assert_eq!(resolved.engine.n_samples, 123);
}
