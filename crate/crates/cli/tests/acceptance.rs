//! Acceptance suite: each test checks one advertised property of the
//! toolkit end to end and prints a single greppable line
//! `criterion N: PASS|FAIL: <measured numbers>` (visible with
//! `cargo test --test acceptance -- --nocapture`). Every tolerance is
//! pinned in code next to the measurement it bounds.
//!
//! The three million-sample driven stadium runs dominate the cost; they
//! are computed once (lazily) and shared between tests. The full suite
//! takes roughly an hour on a single core.

use chaoswork_core::quantum::C64;
use chaoswork_core::{
    char_func_of_atoms, char_func_semiclassical, char_to_work, classical_free_energy_difference,
    classical_work_samples, hermitian_extend, jarzynski_check, l1_distance, mean_level_spacing,
    moments, quantum_free_energy_difference, quantum_work_distribution,
    quantum_work_distribution_sudden, reference_stadium, transition_probabilities, BoxSystem1D,
    DistributionKind, GaussianBump1D, ProcessSpec, QuantumModel, SampleStream, Schedule,
    StadiumSystem, ThermalParams, UGrid, Window, WorkDistribution, WorkProtocol,
};
use once_cell::sync::Lazy;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

// ---------------------------------------------------------------------------
// Frozen experiment parameters
// ---------------------------------------------------------------------------

/// Seed used by every sampled run in this suite (the date it was frozen).
const SEED: u64 = 20260815;
/// Decorrelates the free-energy estimator's draws from the work sampler's.
const DF_SEED_SALT: u64 = 0x9e37_79b9;
/// Work-bin width of the stadium inversion grid.
const DW: f64 = 65.0;
/// Half-grid size: N = 2*N_HALF - 1 = 99 points, W range 6435 — wide
/// enough that the hottest ensemble's support does not alias.
const N_HALF: usize = 50;
/// Drive duration for the finite-time protocol.
const TAU: f64 = 0.1;
/// RK4 step for the driven evolution. Halving it moves the hottest
/// fluctuation-identity ratio by 6e-4, far inside the acceptance band.
const DT: f64 = 1e-3;
/// Gaussian spectral window width in W-bins (sigma = 65 work units).
const WINDOW_BINS: f64 = 1.0;

/// Reference billiard mass (the systems are built with m = 1/2).
const MASS: f64 = 0.5;

fn stadium_grid() -> UGrid<f64> {
    let n_full = (2 * N_HALF - 1) as f64;
    let du = 2.0 * PI / (n_full * DW);
    UGrid::new(du * (N_HALF - 1) as f64, N_HALF).unwrap()
}

fn driven_protocol() -> WorkProtocol<f64> {
    let process = ProcessSpec::new(TAU, Schedule::Linear).unwrap();
    WorkProtocol::driven(process, DT).unwrap()
}

/// Semiclassical work density: trajectory-phase characteristic function on
/// the half grid, Hermitian extension, windowed inverse transform.
fn semiclassical_density(
    sys: &StadiumSystem<f64>,
    protocol: &WorkProtocol<f64>,
    beta: f64,
    hbar: f64,
    grid: &UGrid<f64>,
    n: usize,
    bins: f64,
) -> WorkDistribution<f64> {
    let thermal = ThermalParams::new(beta, hbar, MASS).unwrap();
    let stream = SampleStream::new(SEED);
    let half = char_func_semiclassical(sys, protocol, &thermal, grid, n, &stream).unwrap();
    let full = hermitian_extend(&half).unwrap();
    char_to_work(&full, Window::Gaussian { bins }).unwrap()
}

/// Classical two-point work histogram rendered through the *same* grid and
/// window as the semiclassical density: the empirical characteristic
/// function of the sampled work values is inverted with the identical
/// transform, so distances against it measure distributional disagreement
/// rather than binning disagreement. Sharing the seed with the
/// semiclassical run reuses the same Gibbs draws, cancelling Monte Carlo
/// noise pathwise.
fn classical_matched_density(
    sys: &StadiumSystem<f64>,
    protocol: &WorkProtocol<f64>,
    beta: f64,
    grid: &UGrid<f64>,
    n: usize,
    bins: f64,
) -> WorkDistribution<f64> {
    let thermal = ThermalParams::new(beta, 1.0, MASS).unwrap();
    let stream = SampleStream::new(SEED);
    let samples = classical_work_samples(sys, protocol, &thermal, n, &stream).unwrap();
    let wn = samples.w.len() as f64;
    let atoms: Vec<(f64, f64)> = samples.w.iter().map(|&w| (w, 1.0 / wn)).collect();
    let atom_dist = WorkDistribution::from_atoms(atoms, Some(samples.n_samples)).unwrap();
    let cf = char_func_of_atoms(&atom_dist, grid).unwrap();
    let full = hermitian_extend(&cf).unwrap();
    char_to_work(&full, Window::Gaussian { bins }).unwrap()
}

/// Work value below which a fraction `q` of the probability mass lies.
fn percentile(dist: &WorkDistribution<f64>, q: f64) -> f64 {
    let masses = point_masses(dist);
    let total: f64 = masses.iter().sum();
    let mut acc = 0.0;
    for (i, m) in masses.iter().enumerate() {
        acc += m;
        if acc >= q * total {
            return dist.w[i];
        }
    }
    *dist.w.last().unwrap()
}

/// Probability mass at work values strictly below `w_cut`.
fn mass_below(dist: &WorkDistribution<f64>, w_cut: f64) -> f64 {
    point_masses(dist)
        .iter()
        .zip(&dist.w)
        .filter(|(_, &w)| w < w_cut)
        .map(|(m, _)| m)
        .sum()
}

/// Per-point probability masses (midpoint rule for densities).
fn point_masses(dist: &WorkDistribution<f64>) -> Vec<f64> {
    let n = dist.w.len();
    match dist.kind {
        DistributionKind::Atoms => dist.weight.clone(),
        DistributionKind::Density => (0..n)
            .map(|i| {
                let left = if i > 0 {
                    dist.w[i] - dist.w[i - 1]
                } else {
                    dist.w[1] - dist.w[0]
                };
                let right = if i + 1 < n { dist.w[i + 1] - dist.w[i] } else { left };
                dist.weight[i] * 0.5 * (left + right)
            })
            .collect(),
    }
}

/// Restriction of a density to `w >= w_cut`; used to evaluate the
/// exponential work average on the region where the estimator carries
/// signal rather than transform noise (see criterion 6).
fn truncate_below(dist: &WorkDistribution<f64>, w_cut: f64) -> WorkDistribution<f64> {
    let keep: Vec<usize> = (0..dist.w.len()).filter(|&i| dist.w[i] >= w_cut).collect();
    WorkDistribution {
        kind: dist.kind,
        w: keep.iter().map(|&i| dist.w[i]).collect(),
        weight: keep.iter().map(|&i| dist.weight[i]).collect(),
        n_samples: dist.n_samples,
        clipped_mass: dist.clipped_mass,
        broadening: dist.broadening,
    }
}

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion}: {detail}");
}

// ---------------------------------------------------------------------------
// Shared heavy artifacts: million-sample driven stadium runs
// ---------------------------------------------------------------------------

fn heavy_run(beta_inv: f64, n: usize) -> WorkDistribution<f64> {
    let sys = reference_stadium::<f64>();
    semiclassical_density(
        &sys,
        &driven_protocol(),
        1.0 / beta_inv,
        1.0,
        &stadium_grid(),
        n,
        WINDOW_BINS,
    )
}

static RUN_HOT: Lazy<WorkDistribution<f64>> = Lazy::new(|| heavy_run(1024.0, 1_000_000));
static RUN_WARM: Lazy<WorkDistribution<f64>> = Lazy::new(|| heavy_run(256.0, 1_000_000));
static RUN_COLD: Lazy<WorkDistribution<f64>> = Lazy::new(|| heavy_run(32.0, 250_000));

// ---------------------------------------------------------------------------
// 1. Smooth density of states of the reference billiard
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_weyl_level_spacing() {
    let sys = reference_stadium::<f64>();
    let area = sys.geometry().area();
    let spacing = mean_level_spacing(MASS, area, 1.0);
    let closed_form = 4.0 * PI / area; // 2 pi hbar^2 / (m A) at m = 1/2
    let pass = (spacing / closed_form - 1.0).abs() < 1e-12
        // Expected spacing of the r = l = 1 quarter billiard is about 7.
        && (spacing / 7.0 - 1.0).abs() < 0.01;
    report(
        1,
        pass,
        &format!("mean level spacing {spacing:.4} (closed form {closed_form:.4}, coarse value 7 within 1%)"),
    );
}

// ---------------------------------------------------------------------------
// 2. Exact fluctuation identity on every quantum model family
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_quantum_fluctuation_identity() {
    // (model, optional (tau, forced step count); None = instantaneous switch, beta)
    let cases: Vec<(QuantumModel, Option<(f64, Option<usize>)>, f64)> = vec![
        (two_level(), Some((0.02, None)), 0.05),
        (two_level(), Some((0.7, None)), 1.0),
        (two_level(), Some((5.0, None)), 10.0),
        (two_level(), None, 2.5),
        (box32(), Some((0.05, None)), 0.05),
        (box32(), Some((0.15, None)), 2.0),
        (box32(), None, 0.5),
        (harmonic24(), Some((0.1, None)), 0.2),
        (harmonic24(), Some((0.3, None)), 2.0),
        (harmonic24(), None, 1.0),
        (harmonic64(), None, 0.3),
        (harmonic64(), None, 1.2),
        // Exactness must not depend on integration resolution (it follows
        // from unitarity alone), so the largest models force coarse steps.
        (random32(7), Some((0.1, Some(1200))), 1.0),
        (random64(11), Some((0.1, Some(1500))), 0.5),
        (random64(11), None, 5.0),
    ];
    let n_cases = cases.len();
    let mut worst: f64 = 0.0;
    let mut worst_label = String::new();
    for (model, drive, beta) in cases {
        let dist = match drive {
            Some((tau, n_steps)) => {
                let process = ProcessSpec::new(tau, Schedule::Linear).unwrap();
                quantum_work_distribution(&model, &process, beta, n_steps).unwrap()
            }
            None => quantum_work_distribution_sudden(&model, beta).unwrap(),
        };
        let df = quantum_free_energy_difference(&model, beta).unwrap();
        let rep = jarzynski_check(&dist, beta, df, 0).unwrap();
        let dev = (rep.ratio - 1.0).abs();
        if dev > worst {
            worst = dev;
            worst_label = format!("{} beta={beta}", model.label());
        }
    }
    let pass = worst <= 1e-10;
    report(
        2,
        pass,
        &format!("worst |<exp(-bW)>exp(b dF) - 1| = {worst:.2e} over {n_cases} model/beta/tau cases (tol 1e-10, worst at {worst_label})"),
    );
}

fn two_level() -> QuantumModel {
    QuantumModel::two_level(1.0, [0.3, -0.2], C64::new(0.1, 0.05)).unwrap()
}
fn box32() -> QuantumModel {
    QuantumModel::box_with_bump(32, 10.0, 1.0, 1.0, 6.0, 0.5, 4.0).unwrap()
}
fn harmonic24() -> QuantumModel {
    QuantumModel::harmonic_ramp(24, 1.0, 1.0, 0.5, 1.0).unwrap()
}
fn harmonic64() -> QuantumModel {
    QuantumModel::harmonic_ramp(64, 1.0, 1.0, 3.0, 1.0).unwrap()
}
fn random32(seed: u64) -> QuantumModel {
    QuantumModel::random_hermitian(32, seed, 8.0, 0.3).unwrap()
}
fn random64(seed: u64) -> QuantumModel {
    QuantumModel::random_hermitian(64, seed, 8.0, 0.3).unwrap()
}

// ---------------------------------------------------------------------------
// 3. Transition matrices are doubly stochastic
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_transition_matrix_doubly_stochastic() {
    let process = ProcessSpec::new(0.1, Schedule::Linear).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let model = random32(1000 + k);
        let p = transition_probabilities(&model, &process, Some(1200)).unwrap();
        let n = p.nrows();
        for i in 0..n {
            let row: f64 = (0..n).map(|j| p[(i, j)]).sum();
            let col: f64 = (0..n).map(|j| p[(j, i)]).sum();
            worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
    }
    let pass = worst <= 1e-8;
    report(
        3,
        pass,
        &format!("worst row/column-sum deviation {worst:.2e} over 20 random 32x32 Hermitian drives (tol 1e-8)"),
    );
}

// ---------------------------------------------------------------------------
// 4. A very short drive reproduces the instantaneous-switch formula
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_short_drive_matches_quench() {
    let sys = reference_stadium::<f64>();
    let grid = stadium_grid();
    let n = 100_000;
    let thermal = ThermalParams::new(1.0 / 256.0, 1.0, MASS).unwrap();
    let stream = SampleStream::new(SEED); // shared draws: noise cancels pathwise
    let g_quench =
        char_func_semiclassical(&sys, &WorkProtocol::Quench, &thermal, &grid, n, &stream).unwrap();
    let process = ProcessSpec::new(1e-4, Schedule::Linear).unwrap();
    let protocol = WorkProtocol::driven(process, 2e-5).unwrap();
    let g_driven = char_func_semiclassical(&sys, &protocol, &thermal, &grid, n, &stream).unwrap();

    let mut worst_ratio: f64 = 0.0; // |difference| / (3 combined standard errors)
    for k in 1..g_quench.g.len() {
        let diff = (g_quench.g[k] - g_driven.g[k]).norm();
        let tol = 3.0 * (g_quench.stderr[k] + g_driven.stderr[k]);
        worst_ratio = worst_ratio.max(diff / tol);
    }
    let anchored = (g_quench.g[0] - g_driven.g[0]).norm() == 0.0; // both exactly 1
    let pass = anchored && worst_ratio <= 1.0;
    report(
        4,
        pass,
        &format!("tau=1e-4 drive vs instantaneous switch: worst |dG|/(3 se) = {worst_ratio:.3} over {} grid points at 1e5 shared samples", grid.n_points()),
    );
}

// ---------------------------------------------------------------------------
// 5. Classical limit: the trajectory-phase density converges to the
//    classical two-point histogram as hbar_eff -> 0
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_classical_limit_l1_convergence() {
    let sys = reference_stadium::<f64>();
    let grid = stadium_grid();
    let n = 1_000_000;
    let beta = 1.0 / 256.0;
    let p_classical =
        classical_matched_density(&sys, &WorkProtocol::Quench, beta, &grid, n, WINDOW_BINS);
    let hbars = [1.0, 0.3, 0.1, 0.05];
    let l1: Vec<f64> = hbars
        .iter()
        .map(|&hbar| {
            let p_sc = semiclassical_density(
                &sys,
                &WorkProtocol::Quench,
                beta,
                hbar,
                &grid,
                n,
                WINDOW_BINS,
            );
            l1_distance(&p_sc, &p_classical).unwrap()
        })
        .collect();
    let monotone = l1.windows(2).all(|pair| pair[1] < pair[0]);
    let pass = monotone && l1[3] < 0.05;
    report(
        5,
        pass,
        &format!(
            "L1(P_sc, P_cl) = {:.4} / {:.4} / {:.4} / {:.4} at hbar_eff = 1, 0.3, 0.1, 0.05 (monotone decrease, final < 0.05) at 1e6 samples",
            l1[0], l1[1], l1[2], l1[3]
        ),
    );
}

// ---------------------------------------------------------------------------
// 6. Fluctuation identity on the sampled semiclassical density
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_semiclassical_fluctuation_identity() {
    let sys = reference_stadium::<f64>();
    let mut details = Vec::new();
    let mut pass = true;
    for (beta_inv, dist) in [(256.0, &*RUN_WARM), (1024.0, &*RUN_HOT)] {
        let beta = 1.0 / beta_inv;
        let df_stream = SampleStream::new(SEED ^ DF_SEED_SALT);
        let (df, df_se) =
            classical_free_energy_difference(&sys, beta, &df_stream, 1_000_000).unwrap();
        // The exponential average blows transform-noise mass at far-negative
        // W up by exp(-beta W); physical work of this monotone ramp of a
        // nonnegative potential is nonnegative, and everything below four
        // window widths is pure inversion noise, so the average is taken on
        // W >= -4 sigma_window. The rare-negative-work sensitivity of the
        // estimator is what the reported negative-mass figure tracks.
        let trunc = truncate_below(dist, -4.0 * DW * WINDOW_BINS);
        let rep = jarzynski_check(&trunc, beta, df, SEED).unwrap();
        let ok = rep.ratio >= 0.9 && rep.ratio <= 1.1;
        pass &= ok;
        details.push(format!(
            "1/beta={beta_inv}: ratio {:.4} (se {:.4}), dF {df:.2} (se {df_se:.3}), negative-work mass {:.3}",
            rep.ratio,
            rep.stderr,
            dist.negative_work_mass()
        ));
    }
    report(
        6,
        pass,
        &format!(
            "<exp(-bW)> exp(b dF) within [0.9, 1.1] at 1e6 samples, seed {SEED} — {}",
            details.join("; ")
        ),
    );
}

// ---------------------------------------------------------------------------
// 7. Work-distribution shape across temperatures + 1D quantum cross-check
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_work_distribution_shape() {
    // --- shape properties of the driven billiard density ---
    let runs: [(f64, &WorkDistribution<f64>); 3] =
        [(32.0, &RUN_COLD), (256.0, &RUN_WARM), (1024.0, &RUN_HOT)];
    let mut pass = true;
    let mut shape = Vec::new();
    let mut m1s = Vec::new();
    let mut tails = Vec::new();
    let mut w999s = Vec::new();
    for (beta_inv, dist) in runs {
        let total = dist.total_mass();
        let min_density = dist.weight.iter().cloned().fold(f64::INFINITY, f64::min);
        let neg = dist.negative_work_mass();
        let far_neg = mass_below(dist, -4.0 * DW * WINDOW_BINS);
        let m1 = moments(dist, 1).unwrap();
        let tail = 1.0 - mass_below(dist, 500.0);
        let w999 = percentile(dist, 0.999);
        pass &= (total - 1.0).abs() <= 1e-3;
        pass &= min_density >= -1e-3 && dist.clipped_mass <= 1e-3;
        // "Dominated by W >= 0": what negative mass there is sits within a
        // few window widths of zero (kernel smearing of the near-zero
        // peak), not in a genuine negative tail.
        pass &= neg <= 0.25 && far_neg <= 2e-3;
        m1s.push(m1);
        tails.push(tail);
        w999s.push(w999);
        shape.push(format!(
            "1/beta={beta_inv}: mass {total:.4}, neg {neg:.3}, <W> {m1:.0}, P(W>500) {tail:.3}, w99.9 {w999:.0}"
        ));
    }
    // Tail extent grows with temperature: the mean and the mass beyond a
    // fixed far threshold both increase strictly; the 99.9th percentile
    // must not move against that trend by more than one bin.
    pass &= m1s.windows(2).all(|p| p[1] > p[0]);
    pass &= tails.windows(2).all(|p| p[1] > p[0]);
    pass &= w999s.windows(2).all(|p| p[1] >= p[0] - DW);

    // --- quantum cross-check on a 1D model at high temperature ---
    // A billiard-sized quantum reference is out of reach on a desk, so the
    // moment-level comparison runs on the 1D box with a Gaussian bump.
    let beta = 0.05;
    let model = QuantumModel::box_with_bump(48, 10.0, 1.0, 1.0, 6.0, 0.5, 4.0).unwrap();
    let p_q = quantum_work_distribution_sudden(&model, beta).unwrap();
    let (m1_q, m2_q) = (moments(&p_q, 1).unwrap(), moments(&p_q, 2).unwrap());

    let bump = GaussianBump1D::new(6.0, 0.5, 4.0).unwrap();
    let box_sys = BoxSystem1D::new(10.0, bump, 1.0).unwrap();
    let n_half_1d = 629; // dW = 0.1: the grid resolves the bump's work scale
    let dw_1d = 0.1;
    let du_1d = 2.0 * PI / ((2 * n_half_1d - 1) as f64 * dw_1d);
    let grid_1d = UGrid::new(du_1d * (n_half_1d - 1) as f64, n_half_1d).unwrap();
    let thermal = ThermalParams::new(beta, 1.0, 1.0).unwrap();
    let half = char_func_semiclassical(
        &box_sys,
        &WorkProtocol::Quench,
        &thermal,
        &grid_1d,
        200_000,
        &SampleStream::new(SEED),
    )
    .unwrap();
    let p_sc = char_to_work(&hermitian_extend(&half).unwrap(), Window::Gaussian { bins: 2.0 })
        .unwrap();
    let (m1_s, m2_s) = (moments(&p_sc, 1).unwrap(), moments(&p_sc, 2).unwrap());
    let rel1 = (m1_s - m1_q).abs() / m1_q.abs();
    let rel2 = (m2_s - m2_q).abs() / m2_q.abs();
    pass &= rel1 < 0.10 && rel2 < 0.10;

    report(
        7,
        pass,
        &format!(
            "{}; 1D moments quantum vs semiclassical: <W> {m1_q:.4}/{m1_s:.4} ({:.1}%), <W^2> {m2_q:.4}/{m2_s:.4} ({:.1}%), tol 10%",
            shape.join("; "),
            100.0 * rel1,
            100.0 * rel2
        ),
    );
}

// ---------------------------------------------------------------------------
// 8. Discrete spectra survive the transform round trip
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_transform_round_trip() {
    // Stiffness ramp k: 1 -> 4 doubles the frequency, so every work atom
    // sits exactly on a lattice of spacing 1/2 and a matched W grid can
    // recover all of them.
    let model = harmonic64();
    let beta = 1.2;
    let atoms = quantum_work_distribution_sudden(&model, beta).unwrap();

    // Wide enough to cover every atom (basis truncation pushes the top
    // final eigenvalues, and with them the outermost featherweight atoms,
    // well above the ideal spectrum's range).
    let n_half = 471;
    let dw = 0.5;
    let du = 2.0 * PI / ((2 * n_half - 1) as f64 * dw);
    let grid = UGrid::new(du * (n_half - 1) as f64, n_half).unwrap();
    let g = char_func_of_atoms(&atoms, &grid).unwrap();
    let recovered = char_to_work(&hermitian_extend(&g).unwrap(), Window::None).unwrap();

    // Locations: every atom lies within half a bin of a recovery grid point.
    let mut worst_offset: f64 = 0.0;
    for &w in &atoms.w {
        let nearest = recovered
            .w
            .iter()
            .map(|&wj| (wj - w).abs())
            .fold(f64::INFINITY, f64::min);
        worst_offset = worst_offset.max(nearest);
    }
    // Weights: per grid point, recovered mass density * dw matches the atom
    // mass within that bin.
    let mut worst_mass_err: f64 = 0.0;
    for (&wj, &pj) in recovered.w.iter().zip(&recovered.weight) {
        let true_mass: f64 = atoms
            .w
            .iter()
            .zip(&atoms.weight)
            .filter(|(&w, _)| (w - wj).abs() <= dw / 2.0)
            .map(|(_, &p)| p)
            .sum();
        worst_mass_err = worst_mass_err.max((pj * dw - true_mass).abs());
    }
    let pass = worst_offset <= dw / 2.0 && worst_mass_err <= 1e-6;
    report(
        8,
        pass,
        &format!(
            "{} atoms: worst location offset {worst_offset:.2e} (tol {:.2}), worst bin-mass error {worst_mass_err:.2e} (tol 1e-6)",
            atoms.w.len(),
            dw / 2.0
        ),
    );
}

// ---------------------------------------------------------------------------
// 9. Reruns are byte-identical, independent of worker-pool size
// ---------------------------------------------------------------------------

const DETERMINISM_CONFIG: &str = r#"
[system]
kind = "stadium"
radius = 1.0
length = 1.0

[process]
tau = 0.1
protocol = "quench"
strength = 180.0
width = 0.1
centers = [[0.2, 0.4], [0.67, 0.5], [0.5, 0.15], [0.3, 0.75]]

[thermal]
beta = [0.00390625]
hbar_eff = [1.0]
mass = 0.5

[engine]
n_samples = 30000
seed = 20260815
u_max = 0.047844
n_points = 50
"#;

#[test]
fn criterion_9_cli_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, DETERMINISM_CONFIG).unwrap();

    // All runs write to the same directory (the manifest records the
    // resolved output path, so distinct directories would differ there);
    // bytes are snapshotted between runs.
    let out_dir = tmp.path().join("out");
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_chaoswork"))
            .env_remove("CHAOSWORK_OUT")
            .env("RAYON_NUM_THREADS", threads)
            .args(["semiclassical", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "run failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    let snapshot = |out_dir: &Path| -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(out_dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().into_string().unwrap(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };

    run("1");
    let first = snapshot(&out_dir);
    run("1"); // identical rerun
    let rerun = snapshot(&out_dir);
    run("4"); // same run, different worker-pool size
    let parallel = snapshot(&out_dir);

    let mut compared = 0;
    let mut all_equal = true;
    for ((name, reference), (other_a, other_b)) in
        first.iter().zip(rerun.iter().zip(&parallel))
    {
        assert_eq!(name, &other_a.0);
        assert_eq!(name, &other_b.0);
        for other in [&other_a.1, &other_b.1] {
            if name == "manifest.json" {
                // The manifest checksums every numeric artifact; only the
                // informational wall time may differ between runs.
                let mut a: serde_json::Value = serde_json::from_slice(reference).unwrap();
                let mut b: serde_json::Value = serde_json::from_slice(other).unwrap();
                a["wall_time_ms"] = serde_json::json!(0);
                b["wall_time_ms"] = serde_json::json!(0);
                all_equal &= a == b;
            } else {
                all_equal &= reference == other;
            }
        }
        compared += 1;
    }
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    let pass = compared >= 3 && all_equal;
    report(
        9,
        pass,
        &format!("{compared} artifacts byte-identical across rerun and 1- vs 4-thread pools ({})", names.join(", ")),
    );
}
