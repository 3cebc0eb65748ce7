//! Exact quantum two-point-measurement reference for small driven systems.
//!
//! A model is an initial spectrum plus a Hermitian perturbation matrix in
//! the initial eigenbasis. Amplitudes are propagated through the drive in
//! the interaction picture with RK4, the final eigenbasis comes from a dense
//! Hermitian diagonalization, and the two-point work statistics follow as
//! discrete atoms. Everything here is f64: the dense linear-algebra backend
//! is not generic over the scalar, and these matrices are small enough that
//! reduced precision buys nothing.

use crate::error::{Error, Result};
use crate::systems::ProcessSpec;
use crate::workdist::WorkDistribution;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub type C64 = Complex<f64>;

const HERMITICITY_TOL: f64 = 1e-12;
/// Norm drift beyond this aborts an evolution as under-resolved.
const NORM_DRIFT_LIMIT: f64 = 1e-6;
/// Atoms closer than this (energy units) are merged.
const ATOM_MERGE_TOL: f64 = 1e-12;

/// A finite-dimensional driven system: H(t) = diag(e0) + g(t) V, expressed
/// in the eigenbasis of H(0).
#[derive(Clone, Debug)]
pub struct QuantumModel {
    e0: Vec<f64>,
    v: DMatrix<C64>,
    label: String,
}

impl QuantumModel {
    pub fn new(e0: Vec<f64>, v: DMatrix<C64>, label: impl Into<String>) -> Result<Self> {
        let n = e0.len();
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "e0",
                reason: format!("need at least 2 levels, got {n}"),
            });
        }
        if e0.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite {
                context: "initial spectrum",
            });
        }
        if !e0.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                name: "e0",
                reason: "spectrum must be strictly ascending (non-degenerate)".into(),
            });
        }
        if v.nrows() != n || v.ncols() != n {
            return Err(Error::InvalidParameter {
                name: "v",
                reason: format!("expected {n}x{n}, got {}x{}", v.nrows(), v.ncols()),
            });
        }
        let mut max_dev = 0.0f64;
        for k in 0..n {
            for l in k..n {
                let dev = (v[(k, l)] - v[(l, k)].conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                max_dev,
                tol: HERMITICITY_TOL,
            });
        }
        Ok(Self {
            e0,
            v,
            label: label.into(),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.e0.len()
    }

    #[inline]
    pub fn e0(&self) -> &[f64] {
        &self.e0
    }

    #[inline]
    pub fn v(&self) -> &DMatrix<C64> {
        &self.v
    }

    #[inline]
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Two levels split by `gap`, perturbed by `v_diag` on the diagonal and
    /// `v_off` off-diagonally.
    pub fn two_level(gap: f64, v_diag: [f64; 2], v_off: C64) -> Result<Self> {
        if !(gap.is_finite() && gap > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gap",
                reason: format!("must be finite and positive, got {gap}"),
            });
        }
        let v = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(v_diag[0], 0.0),
                v_off,
                v_off.conj(),
                C64::new(v_diag[1], 0.0),
            ],
        );
        Self::new(vec![0.0, gap], v, "two-level")
    }

    /// Particle in a box [0, L] with a Gaussian bump switched on by the
    /// drive, truncated to the lowest `n_basis` sine modes.
    ///
    /// Matrix elements use the closed form obtained by extending the
    /// Gaussian integrals over the whole line; the neglected wall tails are
    /// O(exp(-d^2/2 width^2)) with d the bump-to-wall distance, so keep the
    /// bump several widths away from both walls.
    pub fn box_with_bump(
        n_basis: usize,
        length: f64,
        mass: f64,
        hbar: f64,
        strength: f64,
        width: f64,
        center: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("length", length),
            ("mass", mass),
            ("hbar", hbar),
            ("width", width),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        if !(center > 0.0 && center < length) {
            return Err(Error::InvalidParameter {
                name: "center",
                reason: format!("bump center {center} outside the box (0, {length})"),
            });
        }
        let e0: Vec<f64> = (1..=n_basis)
            .map(|n| {
                let kn = n as f64 * std::f64::consts::PI * hbar / length;
                kn * kn / (2.0 * mass)
            })
            .collect();
        // phi_k phi_l = (1/L)[cos((k-l) pi x/L) - cos((k+l) pi x/L)];
        // int Gauss(x; c, width) cos(a x) dx = strength e^{-width^2 a^2/2} cos(a c).
        let pi_over_l = std::f64::consts::PI / length;
        let cos_term = |m: f64| {
            let a = m * pi_over_l;
            (-0.5 * width * width * a * a).exp() * (a * center).cos()
        };
        let v = DMatrix::from_fn(n_basis, n_basis, |k, l| {
            let (kf, lf) = ((k + 1) as f64, (l + 1) as f64);
            C64::new(
                strength / length * (cos_term(kf - lf) - cos_term(kf + lf)),
                0.0,
            )
        });
        Self::new(e0, v, "box-with-bump")
    }

    /// Harmonic oscillator with stiffness k0, perturbed by (dk/2) q^2,
    /// truncated to the lowest `n_basis` number states.
    pub fn harmonic_ramp(n_basis: usize, mass: f64, k0: f64, dk: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("k0", k0), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        if !(dk.is_finite() && k0 + dk > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dk",
                reason: format!("must be finite with k0 + dk > 0, got {dk}"),
            });
        }
        let omega0 = (k0 / mass).sqrt();
        let e0: Vec<f64> = (0..n_basis)
            .map(|n| hbar * omega0 * (n as f64 + 0.5))
            .collect();
        // q^2 in number states: diagonal (2n+1), second off-diagonal
        // sqrt((n+1)(n+2)), both times hbar/(2 m omega0).
        let q2 = hbar / (2.0 * mass * omega0);
        let v = DMatrix::from_fn(n_basis, n_basis, |k, l| {
            let val = if k == l {
                q2 * (2.0 * k as f64 + 1.0)
            } else if k + 2 == l {
                q2 * (((k + 1) * (k + 2)) as f64).sqrt()
            } else if l + 2 == k {
                q2 * (((l + 1) * (l + 2)) as f64).sqrt()
            } else {
                0.0
            };
            C64::new(0.5 * dk * val, 0.0)
        });
        Self::new(e0, v, "harmonic-ramp")
    }

    /// Deterministic pseudo-random model: spectrum of `n` sorted uniform
    /// draws on [0, e_span], GUE-like Hermitian perturbation of scale
    /// `v_scale`. Used by unitarity property tests.
    pub fn random_hermitian(n: usize, seed: u64, e_span: f64, v_scale: f64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut e0: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * e_span).collect();
        e0.sort_by(|a, b| a.partial_cmp(b).expect("finite draws"));
        // Break (measure-zero) ties so the spectrum is strictly ascending.
        for i in 1..n {
            if e0[i] <= e0[i - 1] {
                e0[i] = e0[i - 1] + e_span * 1e-12;
            }
        }
        let mut v = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for k in 0..n {
            let d: f64 = rng.sample(StandardNormal);
            v[(k, k)] = C64::new(v_scale * d, 0.0);
            for l in (k + 1)..n {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let z = C64::new(v_scale * re, v_scale * im);
                v[(k, l)] = z;
                v[(l, k)] = z.conj();
            }
        }
        Self::new(e0, v, format!("random-hermitian-{seed}"))
    }

    /// Spectral spread that sets the fastest phase in the interaction
    /// picture: initial-spectrum span plus twice the largest perturbation
    /// row sum (a Gershgorin-style bound on the coupling).
    pub fn spectral_spread(&self) -> f64 {
        let span = self.e0[self.dim() - 1] - self.e0[0];
        let max_row: f64 = (0..self.dim())
            .map(|k| (0..self.dim()).map(|l| self.v[(k, l)].norm()).sum())
            .fold(0.0, f64::max);
        span + 2.0 * max_row
    }

    /// Default RK4 step count: 10^4 steps per 2 pi of the fastest phase.
    pub fn default_n_steps(&self, tau: f64) -> usize {
        let cycles = self.spectral_spread() * tau / (2.0 * std::f64::consts::PI);
        ((1e4 * cycles).ceil() as usize).max(64)
    }

    /// Final Hamiltonian diag(e0) + V diagonalized: ascending eigenvalues
    /// and the matching eigenvector columns (final basis in terms of the
    /// initial one).
    pub fn final_spectrum(&self) -> (Vec<f64>, DMatrix<C64>) {
        let n = self.dim();
        let mut h_tau = self.v.clone();
        for k in 0..n {
            h_tau[(k, k)] += C64::new(self.e0[k], 0.0);
        }
        let eig = nalgebra::SymmetricEigen::new(h_tau);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .expect("finite eigenvalues")
        });
        let e_tau: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut q = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for (col, &i) in order.iter().enumerate() {
            q.set_column(col, &eig.eigenvectors.column(i));
        }
        (e_tau, q)
    }
}

/// Amplitudes in the initial eigenbasis at a fixed time.
#[derive(Clone, Debug)]
pub struct AmplitudeState {
    pub a: DVector<C64>,
    pub t: f64,
}

impl AmplitudeState {
    pub fn norm(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Propagates the amplitude equations i da_k/dt = E_k a_k + g(t) (V a)_k
/// from the initial basis state `m`, using RK4 in the interaction picture
/// (b = e^{+i E t} a), so only the coupling term is integrated and the free
/// phases are applied exactly.
pub fn evolve_amplitudes(
    model: &QuantumModel,
    m: usize,
    process: &ProcessSpec<f64>,
    n_steps: usize,
) -> Result<AmplitudeState> {
    let n = model.dim();
    if m >= n {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: format!("initial index {m} out of range for dimension {n}"),
        });
    }
    if n_steps == 0 {
        return Err(Error::InvalidParameter {
            name: "n_steps",
            reason: "must be positive".into(),
        });
    }
    let tau = process.tau;
    let h = tau / n_steps as f64;

    let mut b = DVector::from_element(n, C64::new(0.0, 0.0));
    b[m] = C64::new(1.0, 0.0);

    // Workspaces reused across steps.
    let mut phases = vec![C64::new(1.0, 0.0); n];
    let mut w = DVector::from_element(n, C64::new(0.0, 0.0));
    let mut x = DVector::from_element(n, C64::new(0.0, 0.0));
    let mut k1 = DVector::from_element(n, C64::new(0.0, 0.0));
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut bs = b.clone();

    let set_phases = |phases: &mut Vec<C64>, t: f64| {
        for (ph, &e) in phases.iter_mut().zip(&model.e0) {
            let (s, c) = (e * t).sin_cos();
            *ph = C64::new(c, s);
        }
    };
    // db/dt = -i g D(t) V D^H(t) b with D = diag(e^{+iE t}).
    let rhs = |g: f64,
               phases: &[C64],
               b: &DVector<C64>,
               w: &mut DVector<C64>,
               x: &mut DVector<C64>,
               out: &mut DVector<C64>| {
        for k in 0..n {
            w[k] = phases[k].conj() * b[k];
        }
        x.gemv(C64::new(1.0, 0.0), &model.v, w, C64::new(0.0, 0.0));
        for k in 0..n {
            let z = phases[k] * x[k];
            out[k] = C64::new(g * z.im, -g * z.re);
        }
    };

    for i in 0..n_steps {
        let t0 = i as f64 * h;
        let t_mid = (i as f64 + 0.5) * h;
        let t1 = (i + 1) as f64 * h;
        let (g0, g_mid, g1) = (process.g(t0), process.g(t_mid), process.g(t1));

        set_phases(&mut phases, t0);
        rhs(g0, &phases, &b, &mut w, &mut x, &mut k1);
        let h2 = C64::new(0.5 * h, 0.0);
        bs.copy_from(&b);
        bs.axpy(h2, &k1, C64::new(1.0, 0.0));
        set_phases(&mut phases, t_mid);
        rhs(g_mid, &phases, &bs, &mut w, &mut x, &mut k2);
        bs.copy_from(&b);
        bs.axpy(h2, &k2, C64::new(1.0, 0.0));
        rhs(g_mid, &phases, &bs, &mut w, &mut x, &mut k3);
        bs.copy_from(&b);
        bs.axpy(C64::new(h, 0.0), &k3, C64::new(1.0, 0.0));
        set_phases(&mut phases, t1);
        rhs(g1, &phases, &bs, &mut w, &mut x, &mut k4);

        let h6 = h / 6.0;
        for k in 0..n {
            b[k] += C64::new(h6, 0.0) * (k1[k] + (k2[k] + k3[k]) * C64::new(2.0, 0.0) + k4[k]);
        }
    }

    // Back to the Schroedinger picture: a_k = e^{-i E_k tau} b_k.
    set_phases(&mut phases, tau);
    let a = DVector::from_fn(n, |k, _| phases[k].conj() * b[k]);
    let state = AmplitudeState { a, t: tau };
    let drift = (state.norm() - 1.0).abs();
    if drift > NORM_DRIFT_LIMIT {
        return Err(Error::NormDrift {
            drift,
            limit: NORM_DRIFT_LIMIT,
        });
    }
    Ok(state)
}

/// Transition matrix P(n|m) = |<final n | U(tau) | initial m>|^2, with final
/// states from the dense diagonalization of diag(e0) + V. Columns (initial
/// states) are propagated independently; the matrix is doubly stochastic up
/// to integration error.
pub fn transition_probabilities(
    model: &QuantumModel,
    process: &ProcessSpec<f64>,
    n_steps: Option<usize>,
) -> Result<DMatrix<f64>> {
    let n = model.dim();
    let steps = n_steps.unwrap_or_else(|| model.default_n_steps(process.tau));
    let (_, q) = model.final_spectrum();
    let q_adj = q.adjoint();
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let state = evolve_amplitudes(model, m, process, steps)?;
            let c = &q_adj * &state.a;
            Ok(c.iter().map(|z| z.norm_sqr()).collect())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n, n, |row, col| columns[col][row]))
}

/// Transition matrix for an instantaneous switch: no evolution happens, so
/// P(n|m) = |<final n | initial m>|^2 straight from the eigenbasis change.
pub fn sudden_transition_probabilities(model: &QuantumModel) -> DMatrix<f64> {
    let (_, q) = model.final_spectrum();
    let n = model.dim();
    DMatrix::from_fn(n, n, |row, col| q[(col, row)].norm_sqr())
}

/// Gibbs weights e^{-beta E} / Z over a spectrum, via the shifted
/// exponential form that cannot overflow.
fn gibbs_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let unnorm: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
    let z: f64 = unnorm.iter().sum();
    unnorm.into_iter().map(|x| x / z).collect()
}

/// ln of the partition function, shifted for overflow safety.
fn log_partition(energies: &[f64], beta: f64) -> f64 {
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = energies.iter().map(|&e| (-beta * (e - e_min)).exp()).sum();
    -beta * e_min + s.ln()
}

/// Exact free-energy difference -ln(Z_tau / Z_0) / beta from the two
/// spectra.
pub fn quantum_free_energy_difference(model: &QuantumModel, beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("must be finite and positive, got {beta}"),
        });
    }
    let (e_tau, _) = model.final_spectrum();
    Ok(-(log_partition(&e_tau, beta) - log_partition(&model.e0, beta)) / beta)
}

/// Assembles the work atoms W = E_tau^n - E_0^m with weights P(m) P(n|m),
/// merging atoms closer than 1e-12.
fn atoms_from_transitions(
    model: &QuantumModel,
    p_nm: &DMatrix<f64>,
    beta: f64,
) -> Result<WorkDistribution<f64>> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("must be finite and positive, got {beta}"),
        });
    }
    let n = model.dim();
    let (e_tau, _) = model.final_spectrum();
    let p_m = gibbs_weights(&model.e0, beta);

    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(n * n);
    for m in 0..n {
        for row in 0..n {
            let p = p_m[m] * p_nm[(row, m)];
            if p > 0.0 {
                atoms.push((e_tau[row] - model.e0[m], p));
            }
        }
    }
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite work values"));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (w, p) in atoms {
        match merged.last_mut() {
            Some(last) if w - last.0 <= ATOM_MERGE_TOL => last.1 += p,
            _ => merged.push((w, p)),
        }
    }
    WorkDistribution::from_atoms(merged, None)
}

/// Exact two-point work distribution of the driven process.
pub fn quantum_work_distribution(
    model: &QuantumModel,
    process: &ProcessSpec<f64>,
    beta: f64,
    n_steps: Option<usize>,
) -> Result<WorkDistribution<f64>> {
    let p_nm = transition_probabilities(model, process, n_steps)?;
    atoms_from_transitions(model, &p_nm, beta)
}

/// Exact two-point work distribution of an instantaneous switch.
pub fn quantum_work_distribution_sudden(
    model: &QuantumModel,
    beta: f64,
) -> Result<WorkDistribution<f64>> {
    let p_nm = sudden_transition_probabilities(model);
    atoms_from_transitions(model, &p_nm, beta)
}

/// Characteristic function of the exact work distribution on a half grid:
/// the Fourier sum over atoms, normalized so G(0) = 1 exactly.
pub fn char_func_quantum(
    model: &QuantumModel,
    process: &ProcessSpec<f64>,
    beta: f64,
    grid: &crate::semiclassical::UGrid<f64>,
    n_steps: Option<usize>,
) -> Result<crate::semiclassical::CharFunc<f64>> {
    let dist = quantum_work_distribution(model, process, beta, n_steps)?;
    crate::workdist::char_func_of_atoms(&dist, grid)
}

/// Truncation-convergence helper: builds the model at `n_basis` and at
/// `2 n_basis`, computes both exact work distributions, and returns the
/// absolute shifts of the first two moments. Small shifts indicate the
/// basis is large enough for this process and temperature.
pub fn moment_shift_on_doubling(
    make_model: impl Fn(usize) -> Result<QuantumModel>,
    n_basis: usize,
    process: &ProcessSpec<f64>,
    beta: f64,
    n_steps: Option<usize>,
) -> Result<(f64, f64)> {
    let small = make_model(n_basis)?;
    let big = make_model(2 * n_basis)?;
    let d_small = quantum_work_distribution(&small, process, beta, n_steps)?;
    let d_big = quantum_work_distribution(&big, process, beta, n_steps)?;
    let m1s = crate::workdist::moments(&d_small, 1)?;
    let m1b = crate::workdist::moments(&d_big, 1)?;
    let m2s = crate::workdist::moments(&d_small, 2)?;
    let m2b = crate::workdist::moments(&d_big, 2)?;
    Ok(((m1b - m1s).abs(), (m2b - m2s).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::Schedule;
    use approx::assert_relative_eq;

    fn process(tau: f64) -> ProcessSpec<f64> {
        ProcessSpec::new(tau, Schedule::Linear).unwrap()
    }

    #[test]
    fn constructor_validates_inputs() {
        let v0 = DMatrix::from_element(2, 2, C64::new(0.0, 0.0));
        assert!(QuantumModel::new(vec![0.0, 1.0], v0.clone(), "ok").is_ok());
        assert!(QuantumModel::new(vec![1.0, 1.0], v0.clone(), "degenerate").is_err());
        assert!(QuantumModel::new(vec![1.0, 0.5], v0.clone(), "descending").is_err());
        assert!(QuantumModel::new(vec![0.0], DMatrix::from_element(1, 1, C64::new(0.0, 0.0)), "tiny").is_err());
        let mut bad = v0;
        bad[(0, 1)] = C64::new(0.0, 1.0);
        bad[(1, 0)] = C64::new(0.0, 1.0); // not conjugate
        assert!(matches!(
            QuantumModel::new(vec![0.0, 1.0], bad, "skew"),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn free_evolution_is_pure_phase() {
        let model =
            QuantumModel::new(vec![1.0, 3.5], DMatrix::from_element(2, 2, C64::new(0.0, 0.0)), "free")
                .unwrap();
        let tau = 0.7;
        let st = evolve_amplitudes(&model, 1, &process(tau), 500).unwrap();
        assert!((st.a[0]).norm() < 1e-14);
        let expect = C64::from_polar(1.0, -3.5 * tau);
        assert!((st.a[1] - expect).norm() < 1e-12, "{}", st.a[1]);
        assert_relative_eq!(st.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_perturbation_gives_identity_transitions_and_zero_atom() {
        let model =
            QuantumModel::new(vec![0.0, 2.0, 5.0], DMatrix::from_element(3, 3, C64::new(0.0, 0.0)), "free")
                .unwrap();
        let p = transition_probabilities(&model, &process(0.3), Some(200)).unwrap();
        for k in 0..3 {
            for l in 0..3 {
                let expect = if k == l { 1.0 } else { 0.0 };
                assert_relative_eq!(p[(k, l)], expect, epsilon = 1e-12);
            }
        }
        let dist = quantum_work_distribution(&model, &process(0.3), 1.0, Some(200)).unwrap();
        assert_eq!(dist.w.len(), 1);
        assert!(dist.w[0].abs() < 1e-12);
        assert_relative_eq!(dist.weight[0], 1.0, epsilon = 1e-12);
        assert_eq!(
            quantum_free_energy_difference(&model, 2.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn sudden_limit_matches_pure_overlaps() {
        let model = QuantumModel::two_level(1.0, [0.4, -0.2], C64::new(0.3, 0.1)).unwrap();
        let p = transition_probabilities(&model, &process(1e-9), Some(64)).unwrap();
        let (_, q) = model.final_spectrum();
        for m in 0..2 {
            for n_idx in 0..2 {
                let overlap = q[(m, n_idx)].norm_sqr();
                assert_relative_eq!(p[(n_idx, m)], overlap, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn random_model_transitions_are_doubly_stochastic() {
        let model = QuantumModel::random_hermitian(8, 7, 5.0, 0.5).unwrap();
        let p = transition_probabilities(&model, &process(0.2), None).unwrap();
        for k in 0..8 {
            let row: f64 = (0..8).map(|l| p[(k, l)]).sum();
            let col: f64 = (0..8).map(|l| p[(l, k)]).sum();
            assert_relative_eq!(row, 1.0, epsilon = 1e-9);
            assert_relative_eq!(col, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn sudden_distribution_matches_short_time_evolution() {
        let model = QuantumModel::random_hermitian(6, 19, 4.0, 0.6).unwrap();
        let p = sudden_transition_probabilities(&model);
        for k in 0..6 {
            let row: f64 = (0..6).map(|l| p[(k, l)]).sum();
            let col: f64 = (0..6).map(|l| p[(l, k)]).sum();
            assert_relative_eq!(row, 1.0, epsilon = 1e-12);
            assert_relative_eq!(col, 1.0, epsilon = 1e-12);
        }
        let sudden = quantum_work_distribution_sudden(&model, 0.7).unwrap();
        let evolved =
            quantum_work_distribution(&model, &process(1e-9), 0.7, Some(64)).unwrap();
        assert_eq!(sudden.w.len(), evolved.w.len());
        for i in 0..sudden.w.len() {
            assert_relative_eq!(sudden.w[i], evolved.w[i], epsilon = 1e-9);
            assert_relative_eq!(sudden.weight[i], evolved.weight[i], epsilon = 1e-7);
        }
    }

    #[test]
    fn harmonic_matrix_elements_match_ladder_formulas() {
        let (mass, k0, dk, hbar) = (2.0, 8.0, 3.0, 1.0);
        let model = QuantumModel::harmonic_ramp(6, mass, k0, dk, hbar).unwrap();
        let omega0 = (k0 / mass).sqrt();
        let q2 = hbar / (2.0 * mass * omega0);
        for n in 0..6 {
            assert_relative_eq!(
                model.v()[(n, n)].re,
                0.5 * dk * q2 * (2.0 * n as f64 + 1.0),
                epsilon = 1e-14
            );
            if n + 2 < 6 {
                let expect = 0.5 * dk * q2 * (((n + 1) * (n + 2)) as f64).sqrt();
                assert_relative_eq!(model.v()[(n, n + 2)].re, expect, epsilon = 1e-14);
                assert_relative_eq!(model.v()[(n + 2, n)].re, expect, epsilon = 1e-14);
            }
            if n + 1 < 6 {
                assert_eq!(model.v()[(n, n + 1)].re, 0.0);
            }
        }
        assert_relative_eq!(
            model.e0()[3],
            hbar * omega0 * 3.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn box_matrix_elements_are_symmetric_and_bounded() {
        let model = QuantumModel::box_with_bump(16, 10.0, 1.0, 1.0, 2.0, 0.8, 5.0).unwrap();
        // Potential expectation in mode k should approach the classical
        // average 2 V_bar = strength/length... the diagonal tends to
        // strength/L for high modes (oscillatory term dies).
        let v_inf = 2.0 / 10.0;
        assert_relative_eq!(model.v()[(15, 15)].re, v_inf, max_relative = 1e-6);
        // Spectrum ascending as n^2.
        assert!(model.e0().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn default_n_steps_scales_with_spread_and_tau() {
        let model = QuantumModel::random_hermitian(8, 1, 10.0, 0.2).unwrap();
        let a = model.default_n_steps(0.1);
        let b = model.default_n_steps(0.2);
        assert!(b >= 2 * a - 1);
        assert!(a >= 64);
    }
}
