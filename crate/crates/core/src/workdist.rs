//! Work distributions and their diagnostics.
//!
//! Three routes produce a [`WorkDistribution`]:
//! * inverse Fourier transform of a symmetric characteristic function
//!   ([`char_to_work`]),
//! * direct two-point sampling of classical trajectories
//!   ([`classical_work_distribution`]), and
//! * exact discrete spectra from the quantum reference (atoms constructed
//!   by that module).
//!
//! The same struct carries both continuous densities on a grid and discrete
//! atom sets, so downstream diagnostics (moments, L1 distance, the
//! fluctuation-identity check) treat all three estimators uniformly.

use crate::error::{Error, Result};
use crate::float::Float;
use crate::semiclassical::{CharFunc, UGrid, WorkProtocol};
use crate::systems::{driven_evolve, h_final, h_initial, System};
use crate::thermal::{SampleStream, ThermalParams};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const CHUNK: usize = 1024;
/// Negative density more negative than -RINGING_TOL * max is a quality error.
const RINGING_TOL: f64 = 1e-3;
/// Bootstrap resample count for the fluctuation-identity standard error.
const N_BOOTSTRAP: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistributionKind {
    /// `weight[i]` is a probability density at `w[i]` on an ordered grid.
    Density,
    /// `weight[i]` is the probability of the discrete outcome `w[i]`.
    Atoms,
}

/// Spectral window applied to a characteristic function before inversion.
/// A truncated u grid rings without one; the induced broadening is recorded
/// on the output so consumers can account for it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window<F> {
    None,
    /// exp(-u^2 sigma^2 / 2) with sigma = `bins` W-grid spacings: convolves
    /// the distribution with a Gaussian of that standard deviation.
    Gaussian { bins: F },
    /// Raised cosine over [-u_max, u_max]; equivalent noise width 1.5 bins.
    Hann,
}

impl<F: Float> Default for Window<F> {
    fn default() -> Self {
        Window::Gaussian { bins: F::lit(2.0) }
    }
}

/// A probability distribution of work, either as a density sampled on an
/// ordered grid or as discrete atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkDistribution<F> {
    pub kind: DistributionKind,
    /// Ordered work values (grid points or atom locations).
    pub w: Vec<F>,
    /// Density values or atom probabilities, all nonnegative.
    pub weight: Vec<F>,
    /// Monte Carlo sample count behind the distribution, if stochastic.
    pub n_samples: Option<usize>,
    /// Probability mass removed by clipping small negative ringing.
    pub clipped_mass: F,
    /// Standard-deviation-equivalent width added by the spectral window.
    pub broadening: Option<F>,
}

impl<F: Float> WorkDistribution<F> {
    /// A unit point mass at `w0`.
    pub fn single_atom(w0: F, n_samples: Option<usize>) -> Self {
        Self {
            kind: DistributionKind::Atoms,
            w: vec![w0],
            weight: vec![F::one()],
            n_samples,
            clipped_mass: F::zero(),
            broadening: None,
        }
    }

    pub fn from_atoms(mut atoms: Vec<(F, F)>, n_samples: Option<usize>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyInput {
                context: "atom list",
            });
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite atom positions"));
        let (w, weight): (Vec<F>, Vec<F>) = atoms.into_iter().unzip();
        if w.iter().any(|x| !x.is_finite()) || weight.iter().any(|x| !(x.is_finite() && *x >= F::zero())) {
            return Err(Error::NonFinite {
                context: "atom positions/weights",
            });
        }
        Ok(Self {
            kind: DistributionKind::Atoms,
            w,
            weight,
            n_samples,
            clipped_mass: F::zero(),
            broadening: None,
        })
    }

    /// Total probability mass: sum for atoms, trapezoid integral for
    /// densities.
    pub fn total_mass(&self) -> F {
        match self.kind {
            DistributionKind::Atoms => self.weight.iter().copied().sum(),
            DistributionKind::Density => trapezoid(&self.w, &self.weight),
        }
    }

    /// Probability mass carried by strictly negative work values.
    pub fn negative_work_mass(&self) -> F {
        match self.kind {
            DistributionKind::Atoms => self
                .w
                .iter()
                .zip(&self.weight)
                .filter(|(w, _)| **w < F::zero())
                .map(|(_, p)| *p)
                .sum(),
            DistributionKind::Density => {
                // Integrate the density restricted to w < 0.
                let masses = point_masses(&self.w, &self.weight);
                self.w
                    .iter()
                    .zip(&masses)
                    .filter(|(w, _)| **w < F::zero())
                    .map(|(_, m)| *m)
                    .sum()
            }
        }
    }
}

fn trapezoid<F: Float>(x: &[F], y: &[F]) -> F {
    let half = F::lit(0.5);
    let mut acc = F::zero();
    for i in 1..x.len() {
        acc += half * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    }
    acc
}

/// Trapezoid quadrature weights turned into per-point masses for a density.
fn point_masses<F: Float>(w: &[F], p: &[F]) -> Vec<F> {
    let n = w.len();
    let half = F::lit(0.5);
    (0..n)
        .map(|i| {
            let left = if i > 0 { w[i] - w[i - 1] } else { F::zero() };
            let right = if i + 1 < n { w[i + 1] - w[i] } else { F::zero() };
            half * (left + right) * p[i]
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Characteristic function -> distribution
// ---------------------------------------------------------------------------

/// Validates that a characteristic function lives on a symmetric uniform
/// grid with G(-u) = conj(G(u)) and returns (center index, spacing).
fn check_symmetric_grid<F: Float>(cf: &CharFunc<F>) -> Result<(usize, F)> {
    let n = cf.u.len();
    if n < 3 || n % 2 == 0 || cf.g.len() != n {
        return Err(Error::BadCharFuncGrid);
    }
    let mid = n / 2;
    if cf.u[mid] != F::zero() {
        return Err(Error::BadCharFuncGrid);
    }
    let du = (cf.u[n - 1] - cf.u[0]) / F::from_usize_exact(n - 1);
    if !(du.is_finite() && du > F::zero()) {
        return Err(Error::BadCharFuncGrid);
    }
    let tol = F::lit(1e-9) * cf.u[n - 1].abs();
    for k in 0..n {
        let expect = F::from_usize_exact(k).mul_add(du, cf.u[0]);
        if (cf.u[k] - expect).abs() > tol {
            return Err(Error::BadCharFuncGrid);
        }
    }
    for k in 1..=mid {
        if cf.u[mid + k] != -cf.u[mid - k] {
            return Err(Error::BadCharFuncGrid);
        }
    }
    let mut max_dev = F::zero();
    for k in 1..=mid {
        let dev = (cf.g[mid + k] - cf.g[mid - k].conj()).norm();
        max_dev = max_dev.max(dev);
    }
    if max_dev > F::lit(1e-12) {
        return Err(Error::AsymmetricCharFunc {
            max_dev: max_dev.as_f64(),
        });
    }
    Ok((mid, du))
}

/// Inverse Fourier transform of a symmetric characteristic function into a
/// work density on the conjugate grid (spacing 2 pi / (N du)).
///
/// The optionally windowed G is inverted with a single DFT; the result is
/// real by symmetry (the imaginary residue is audited), small negative
/// ringing is clipped to zero and renormalized with the removed mass
/// recorded, and ringing beyond -1e-3 of the peak is a quality error.
pub fn char_to_work<F: Float + rustfft::FftNum>(
    cf: &CharFunc<F>,
    window: Window<F>,
) -> Result<WorkDistribution<F>> {
    let (mid, du) = check_symmetric_grid(cf)?;
    let n = cf.u.len();
    let two_pi = F::lit(2.0) * F::PI();
    let dw = two_pi / (F::from_usize_exact(n) * du);

    // Window weights on the symmetric grid.
    let (weights, broadening): (Vec<F>, Option<F>) = match window {
        Window::None => (vec![F::one(); n], None),
        Window::Gaussian { bins } => {
            if !(bins.is_finite() && bins > F::zero()) {
                return Err(Error::InvalidParameter {
                    name: "window_bins",
                    reason: format!("must be finite and positive, got {bins}"),
                });
            }
            let sigma = bins * dw;
            let half = F::lit(0.5);
            (
                cf.u.iter()
                    .map(|&u| (-half * u * u * sigma * sigma).exp())
                    .collect(),
                Some(sigma),
            )
        }
        Window::Hann => {
            let u_max = cf.u[n - 1];
            let half = F::lit(0.5);
            (
                cf.u.iter()
                    .map(|&u| half * (F::one() + (F::PI() * u / u_max).cos()))
                    .collect(),
                Some(F::lit(1.5) * dw),
            )
        }
    };

    // ifftshift: buffer index m holds frequency k = m (m < mid+1) or m - n.
    let mut buf: Vec<Complex<F>> = (0..n)
        .map(|m| {
            let idx = if m <= mid { mid + m } else { m - mid - 1 };
            cf.g[idx] * weights[idx]
        })
        .collect();
    rustfft::FftPlanner::new()
        .plan_fft_forward(n)
        .process(&mut buf);

    let scale = du / two_pi;
    let mut p = vec![F::zero(); n];
    let mut max_re = F::zero();
    let mut max_im = F::zero();
    for j_idx in 0..n {
        // Ascending W order: W_j = (j_idx - mid) dw lives at DFT bin j mod n.
        let j = j_idx as isize - mid as isize;
        let bin = j.rem_euclid(n as isize) as usize;
        let val = buf[bin] * scale;
        p[j_idx] = val.re;
        max_re = max_re.max(val.re.abs());
        max_im = max_im.max(val.im.abs());
    }
    if max_im > F::lit(1e-12) * max_re.max(F::lit(1e-300)) {
        return Err(Error::ImaginaryResidue {
            residue: max_im.as_f64(),
            tol: 1e-12 * max_re.as_f64(),
        });
    }

    let max_p = p.iter().copied().fold(F::zero(), F::max);
    let floor = -F::lit(RINGING_TOL) * max_p;
    let min_p = p.iter().copied().fold(F::infinity(), F::min);
    if min_p < floor {
        return Err(Error::ExcessiveRinging {
            min: min_p.as_f64(),
            floor: floor.as_f64(),
        });
    }
    let mut clipped_mass = F::zero();
    for v in p.iter_mut() {
        if *v < F::zero() {
            clipped_mass -= *v * dw;
            *v = F::zero();
        }
    }
    let total: F = p.iter().map(|&v| v * dw).sum();
    if !(total.is_finite() && total > F::zero()) {
        return Err(Error::NonFinite {
            context: "inverted distribution mass",
        });
    }
    for v in p.iter_mut() {
        *v /= total;
    }

    let w: Vec<F> = (0..n)
        .map(|j_idx| F::from_usize_exact(j_idx).mul_add(dw, -(F::from_usize_exact(mid) * dw)))
        .collect();

    Ok(WorkDistribution {
        kind: DistributionKind::Density,
        w,
        weight: p,
        n_samples: if cf.n_samples > 0 {
            Some(cf.n_effective())
        } else {
            None
        },
        clipped_mass,
        broadening,
    })
}

/// Characteristic function of a discrete atom distribution on the given
/// half grid: G(u) = sum_i weight_i exp(i u w_i) / sum_i weight_i, exact up
/// to roundoff. Dividing by the total mass (accumulated in the same order
/// as the u = 0 sum) makes G(0) exactly 1. The returned stderr is zero and
/// `n_samples` is 0 (not Monte Carlo).
pub fn char_func_of_atoms<F: Float>(dist: &WorkDistribution<F>, grid: &UGrid<F>) -> Result<CharFunc<F>> {
    if dist.kind != DistributionKind::Atoms {
        return Err(Error::IncompatibleDistributions);
    }
    let total: F = dist.weight.iter().copied().sum();
    if !(total.is_finite() && total > F::zero()) {
        return Err(Error::NonFinite {
            context: "atom mass",
        });
    }
    let u = grid.points();
    let g: Vec<Complex<F>> = u
        .iter()
        .map(|&uk| {
            let mut acc = Complex::new(F::zero(), F::zero());
            for (wi, pi) in dist.w.iter().zip(&dist.weight) {
                let (sin, cos) = (uk * *wi).sin_cos();
                acc += Complex::new(*pi * cos, *pi * sin);
            }
            acc / total
        })
        .collect();
    Ok(CharFunc {
        stderr: vec![F::zero(); u.len()],
        u,
        g,
        n_samples: 0,
        n_failed: 0,
    })
}

// ---------------------------------------------------------------------------
// Classical two-point sampling
// ---------------------------------------------------------------------------

/// Work samples drawn by the classical two-point rule, in sample-index
/// order (deterministic for a fixed stream regardless of thread count).
#[derive(Clone, Debug, PartialEq)]
pub struct WorkSamples<F> {
    pub w: Vec<F>,
    pub n_samples: usize,
    pub n_failed: usize,
}

/// For each Gibbs sample z0: w = H_tau(z_tau(z0)) - H0(z0), where z_tau is
/// the driven image of z0 (identity for a quench, so w = V(q0)).
pub fn classical_work_samples<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    protocol: &WorkProtocol<F>,
    thermal: &ThermalParams<F>,
    n_samples: usize,
    stream: &SampleStream,
) -> Result<WorkSamples<F>> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!("need at least 2 samples, got {n_samples}"),
        });
    }
    let n_chunks = n_samples.div_ceil(CHUNK);
    let chunks: Vec<(Vec<F>, usize)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = ((c + 1) * CHUNK).min(n_samples);
            let mut w = Vec::with_capacity(end - start);
            let mut failed = 0usize;
            for i in start..end {
                let mut rng = stream.rng_at(i as u64);
                let z0 = sys.sample_gibbs(thermal.beta, &mut rng);
                let res: Result<F> = (|| match protocol {
                    WorkProtocol::Driven { process, dt } => {
                        let e0 = h_initial(sys, &z0)?;
                        let z_tau = driven_evolve(sys, &z0, process, *dt)?;
                        Ok(h_final(sys, &z_tau)? - e0)
                    }
                    WorkProtocol::Quench => Ok(sys.perturbation(&z0.q)),
                })();
                match res {
                    Ok(v) if v.is_finite() => w.push(v),
                    _ => failed += 1,
                }
            }
            (w, failed)
        })
        .collect();

    let mut w = Vec::with_capacity(n_samples);
    let mut n_failed = 0usize;
    for (chunk_w, failed) in chunks {
        w.extend_from_slice(&chunk_w);
        n_failed += failed;
    }
    if n_failed * 1000 > n_samples {
        return Err(Error::FailureBudgetExceeded {
            failed: n_failed,
            total: n_samples,
            budget_per_mille: 1,
        });
    }
    Ok(WorkSamples {
        w,
        n_samples,
        n_failed,
    })
}

/// Histogram density of a sample set. `bins = None` selects the
/// Freedman-Diaconis rule; explicit bin counts must be at least 10. A
/// degenerate sample set (zero range) collapses to a single atom.
pub fn histogram_density<F: Float>(
    samples: &WorkSamples<F>,
    bins: Option<usize>,
) -> Result<WorkDistribution<F>> {
    if samples.w.is_empty() {
        return Err(Error::EmptyInput {
            context: "work samples",
        });
    }
    let n = samples.w.len();
    let mut lo = F::infinity();
    let mut hi = F::neg_infinity();
    for &v in &samples.w {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::NonFinite {
            context: "work sample range",
        });
    }
    if lo == hi {
        return Ok(WorkDistribution::single_atom(lo, Some(samples.n_samples)));
    }

    let n_bins = match bins {
        Some(b) => {
            if b < 10 {
                return Err(Error::InvalidParameter {
                    name: "bins",
                    reason: format!("need at least 10 bins, got {b}"),
                });
            }
            b
        }
        None => {
            // Freedman-Diaconis: width = 2 IQR n^(-1/3).
            let mut sorted = samples.w.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
            let q = |frac: f64| sorted[((n - 1) as f64 * frac).round() as usize];
            let iqr = q(0.75) - q(0.25);
            let width = F::lit(2.0) * iqr * F::lit((n as f64).powf(-1.0 / 3.0));
            if width > F::zero() {
                ((hi - lo) / width).ceil().as_f64().clamp(10.0, 4096.0) as usize
            } else {
                // Heavily tied samples: fall back to a fixed resolution.
                64
            }
        }
    };

    let width = (hi - lo) / F::from_usize_exact(n_bins);
    let mut counts = vec![0usize; n_bins];
    for &v in &samples.w {
        let idx = ((v - lo) / width).as_f64() as usize;
        counts[idx.min(n_bins - 1)] += 1;
    }

    // Bin centers with one zero bin padded on each side, so the trapezoid
    // integral of the density equals the exact rectangle mass of 1.
    let half = F::lit(0.5);
    let norm = F::from_usize_exact(n) * width;
    let mut w = Vec::with_capacity(n_bins + 2);
    let mut weight = Vec::with_capacity(n_bins + 2);
    w.push(lo - half * width);
    weight.push(F::zero());
    for (i, &c) in counts.iter().enumerate() {
        w.push(lo + (F::from_usize_exact(i) + half) * width);
        weight.push(F::from_usize_exact(c) / norm);
    }
    w.push(hi + half * width);
    weight.push(F::zero());

    Ok(WorkDistribution {
        kind: DistributionKind::Density,
        w,
        weight,
        n_samples: Some(samples.n_samples),
        clipped_mass: F::zero(),
        broadening: None,
    })
}

/// Classical two-point work distribution: Gibbs-sample initial conditions,
/// push each through the drive, histogram the energy differences.
pub fn classical_work_distribution<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    protocol: &WorkProtocol<F>,
    thermal: &ThermalParams<F>,
    n_samples: usize,
    stream: &SampleStream,
    bins: Option<usize>,
) -> Result<WorkDistribution<F>> {
    let samples = classical_work_samples(sys, protocol, thermal, n_samples, stream)?;
    histogram_density(&samples, bins)
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Outcome of testing `<exp(-beta W)> = exp(-beta dF)` on a distribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JarzynskiReport<F> {
    /// Estimated `<exp(-beta W)>`.
    pub lhs: F,
    /// `exp(-beta delta_f)`.
    pub rhs: F,
    /// lhs / rhs; 1 when the identity holds.
    pub ratio: F,
    /// Bootstrap standard error of the ratio (0 for exact distributions).
    pub stderr: F,
    /// Probability mass at W < 0 — the exponential average is dominated by
    /// rare negative-work events, the main error source of the estimator.
    pub negative_work_mass: F,
    pub beta: F,
    pub delta_f: F,
}

/// Evaluates the fluctuation identity on a normalized distribution.
///
/// The standard error comes from a multinomial bootstrap over the
/// distribution's bins/atoms at its recorded sample count (seeded,
/// deterministic); exact distributions (no sample count) report 0.
pub fn jarzynski_check<F: Float>(
    dist: &WorkDistribution<F>,
    beta: F,
    delta_f: F,
    bootstrap_seed: u64,
) -> Result<JarzynskiReport<F>> {
    if !(beta.is_finite() && beta > F::zero()) {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!("must be finite and positive, got {beta}"),
        });
    }
    if !delta_f.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta_f",
            reason: format!("must be finite, got {delta_f}"),
        });
    }
    // exp overflows past ~709; catch it with a diagnostic instead of inf.
    let max_arg = dist
        .w
        .iter()
        .map(|&w| (-beta * w).as_f64())
        .fold(f64::NEG_INFINITY, f64::max);
    if max_arg > 700.0 {
        return Err(Error::InvalidParameter {
            name: "beta",
            reason: format!(
                "exp(-beta W) overflows: max exponent {max_arg:.1} exceeds 700 \
                 (negative-work tail too heavy for this beta)"
            ),
        });
    }

    let masses = match dist.kind {
        DistributionKind::Atoms => dist.weight.clone(),
        DistributionKind::Density => point_masses(&dist.w, &dist.weight),
    };
    let lhs: F = dist
        .w
        .iter()
        .zip(&masses)
        .map(|(&w, &m)| m * (-beta * w).exp())
        .sum();
    if !lhs.is_finite() {
        return Err(Error::NonFinite {
            context: "exponential work average",
        });
    }
    let rhs = (-beta * delta_f).exp();
    let ratio = lhs / rhs;

    let stderr = match dist.n_samples {
        None => F::zero(),
        Some(n) if n >= 2 => {
            bootstrap_ratio_stderr(&dist.w, &masses, beta, rhs, n, bootstrap_seed)
        }
        Some(_) => F::zero(),
    };

    Ok(JarzynskiReport {
        lhs,
        rhs,
        ratio,
        stderr,
        negative_work_mass: dist.negative_work_mass(),
        beta,
        delta_f,
    })
}

/// Multinomial bootstrap: resample bin occupation counts at the original
/// sample size, recompute the exponential average each time, and return the
/// standard deviation of the resampled ratios.
fn bootstrap_ratio_stderr<F: Float>(
    w: &[F],
    masses: &[F],
    beta: F,
    rhs: F,
    n_samples: usize,
    seed: u64,
) -> F {
    use rand_distr::{Binomial, Distribution};
    let total: F = masses.iter().copied().sum();
    if !(total > F::zero()) {
        return F::zero();
    }
    let probs: Vec<f64> = masses.iter().map(|&m| (m / total).as_f64()).collect();
    let factors: Vec<F> = w.iter().map(|&wi| (-beta * wi).exp()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_samples as u64;
    let inv_n = F::one() / F::from_usize_exact(n_samples);

    let mut ratios = Vec::with_capacity(N_BOOTSTRAP);
    for _ in 0..N_BOOTSTRAP {
        // Conditional-binomial decomposition of one multinomial draw.
        let mut remaining = n;
        let mut prob_left = 1.0f64;
        let mut lhs = F::zero();
        for (i, &pi) in probs.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            let c = if prob_left <= 0.0 || pi >= prob_left {
                remaining
            } else {
                let p_cond = (pi / prob_left).clamp(0.0, 1.0);
                Binomial::new(remaining, p_cond)
                    .expect("valid binomial")
                    .sample(&mut rng)
            };
            lhs += F::from_usize_exact(c as usize) * inv_n * factors[i];
            remaining -= c;
            prob_left -= pi;
        }
        ratios.push(lhs / rhs);
    }
    let nb = F::from_usize_exact(N_BOOTSTRAP);
    let mean: F = ratios.iter().copied().sum::<F>() / nb;
    let var: F = ratios.iter().map(|&r| (r - mean) * (r - mean)).sum::<F>() / (nb - F::one());
    var.max(F::zero()).sqrt()
}

/// k-th raw moment of the distribution, k <= 4.
pub fn moments<F: Float>(dist: &WorkDistribution<F>, k: usize) -> Result<F> {
    if k > 4 {
        return Err(Error::UnsupportedMoment { k, max: 4 });
    }
    let pow = |w: F| {
        let mut acc = F::one();
        for _ in 0..k {
            acc *= w;
        }
        acc
    };
    Ok(match dist.kind {
        DistributionKind::Atoms => dist
            .w
            .iter()
            .zip(&dist.weight)
            .map(|(&w, &p)| p * pow(w))
            .sum(),
        DistributionKind::Density => {
            let y: Vec<F> = dist
                .w
                .iter()
                .zip(&dist.weight)
                .map(|(&w, &p)| p * pow(w))
                .collect();
            trapezoid(&dist.w, &y)
        }
    })
}

/// L1 distance between two distributions of the same kind.
///
/// Densities are compared as piecewise-linear functions on the union of
/// their grids (zero outside their supports), with sign changes inside a
/// segment integrated exactly. Atom sets are compared position by position
/// (locations matched within 1e-9 absolute); disjoint unit atoms are at
/// distance 2.
pub fn l1_distance<F: Float>(a: &WorkDistribution<F>, b: &WorkDistribution<F>) -> Result<F> {
    if a.kind != b.kind {
        return Err(Error::IncompatibleDistributions);
    }
    match a.kind {
        DistributionKind::Atoms => {
            let tol = F::lit(1e-9);
            let mut i = 0;
            let mut j = 0;
            let mut acc = F::zero();
            while i < a.w.len() || j < b.w.len() {
                if i < a.w.len() && (j >= b.w.len() || a.w[i] < b.w[j] - tol) {
                    acc += a.weight[i].abs();
                    i += 1;
                } else if j < b.w.len() && (i >= a.w.len() || b.w[j] < a.w[i] - tol) {
                    acc += b.weight[j].abs();
                    j += 1;
                } else {
                    acc += (a.weight[i] - b.weight[j]).abs();
                    i += 1;
                    j += 1;
                }
            }
            Ok(acc)
        }
        DistributionKind::Density => {
            let interp = |d: &WorkDistribution<F>, x: F| -> F {
                let w = &d.w;
                if x < w[0] || x > w[w.len() - 1] {
                    return F::zero();
                }
                match w.binary_search_by(|v| v.partial_cmp(&x).expect("finite grid")) {
                    Ok(i) => d.weight[i],
                    Err(i) => {
                        let (x0, x1) = (w[i - 1], w[i]);
                        let t = (x - x0) / (x1 - x0);
                        d.weight[i - 1] + t * (d.weight[i] - d.weight[i - 1])
                    }
                }
            };
            let mut grid: Vec<F> = a.w.iter().chain(b.w.iter()).copied().collect();
            grid.sort_by(|x, y| x.partial_cmp(y).expect("finite grids"));
            grid.dedup();
            let mut acc = F::zero();
            let half = F::lit(0.5);
            for seg in grid.windows(2) {
                let ga = interp(a, seg[0]) - interp(b, seg[0]);
                let gb = interp(a, seg[1]) - interp(b, seg[1]);
                let h = seg[1] - seg[0];
                acc += if ga * gb >= F::zero() {
                    half * h * (ga.abs() + gb.abs())
                } else {
                    // Linear difference changes sign inside the segment:
                    // integrate the two triangles exactly.
                    half * h * (ga * ga + gb * gb) / (ga.abs() + gb.abs())
                };
            }
            Ok(acc)
        }
    }
}
