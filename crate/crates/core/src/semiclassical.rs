//! Semiclassical characteristic function of the work distribution.
//!
//! The estimator averages pure phases over the initial Gibbs ensemble:
//! `G(u) = < exp(i dS(z0, u hbar) / hbar) >`, where the action difference
//! `dS(z0, s) = int_0^s [H_tau(z_tau(z0(s'))) - H0(z0(s'))] ds'` accumulates,
//! along the *unperturbed* trajectory through z0, the energy mismatch between
//! the final Hamiltonian evaluated on the driven image of each point and the
//! initial Hamiltonian at the point itself. No stability prefactors enter;
//! the decay of G comes entirely from dephasing of the sampled phases.

use crate::error::{Error, Result};
use crate::float::Float;
use crate::phase::PhasePoint;
use crate::systems::{driven_evolve, free_flight, h_final, h_initial, ProcessSpec, System};
use crate::thermal::{SampleStream, ThermalParams};
use num_complex::Complex;
use rayon::prelude::*;

/// Samples per work unit in the deterministic parallel reduction. Partial
/// sums are formed serially inside each chunk and chunks are combined in
/// index order, so results are bitwise independent of the thread count.
const CHUNK: usize = 1024;

/// Uniform grid on [0, u_max] for the characteristic-function argument u
/// (units of inverse energy). The symmetric grid on [-u_max, u_max] is
/// produced afterwards by conjugate extension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UGrid<F> {
    u_max: F,
    n_points: usize,
}

impl<F: Float> UGrid<F> {
    pub fn new(u_max: F, n_points: usize) -> Result<Self> {
        if !(u_max.is_finite() && u_max > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "u_max",
                reason: format!("must be finite and positive, got {u_max}"),
            });
        }
        if n_points < 2 {
            return Err(Error::InvalidParameter {
                name: "n_points",
                reason: format!("need at least 2 grid points, got {n_points}"),
            });
        }
        Ok(Self { u_max, n_points })
    }

    #[inline]
    pub fn u_max(&self) -> F {
        self.u_max
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Grid spacing u_max / (n_points - 1).
    #[inline]
    pub fn du(&self) -> F {
        self.u_max / F::from_usize_exact(self.n_points - 1)
    }

    /// Grid values; the first is exactly 0 and the last exactly u_max.
    pub fn points(&self) -> Vec<F> {
        let n1 = F::from_usize_exact(self.n_points - 1);
        (0..self.n_points)
            .map(|k| {
                if k + 1 == self.n_points {
                    self.u_max
                } else {
                    self.u_max * F::from_usize_exact(k) / n1
                }
            })
            .collect()
    }
}

/// Characteristic function samples on a u grid, with per-point statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct CharFunc<F> {
    /// Grid arguments (inverse energy), ordered.
    pub u: Vec<F>,
    /// Complex mean of the sampled phases at each grid point.
    pub g: Vec<Complex<F>>,
    /// Standard error of the complex mean at each grid point.
    pub stderr: Vec<F>,
    /// Monte Carlo samples attempted (failed ones are excluded from the
    /// averages but kept in this count).
    pub n_samples: usize,
    /// Samples dropped because their trajectory could not be propagated.
    pub n_failed: usize,
}

impl<F: Float> CharFunc<F> {
    /// Number of samples that entered the averages.
    #[inline]
    pub fn n_effective(&self) -> usize {
        self.n_samples - self.n_failed
    }
}

/// How each sampled point is pushed through the drive when the action
/// difference is accumulated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WorkProtocol<F> {
    /// Finite-duration drive: every trajectory point is evolved through the
    /// full process with the fixed-step integrator (step bound `dt`).
    Driven { process: ProcessSpec<F>, dt: F },
    /// Instantaneous switch: the driven image of a point is the point
    /// itself, so the integrand reduces to the perturbation along the
    /// unperturbed trajectory.
    Quench,
}

impl<F: Float> WorkProtocol<F> {
    pub fn driven(process: ProcessSpec<F>, dt: F) -> Result<Self> {
        if !(dt.is_finite() && dt > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("must be finite and positive, got {dt}"),
            });
        }
        Ok(WorkProtocol::Driven { process, dt })
    }
}

fn validate_s_nodes<F: Float>(s_nodes: &[F]) -> Result<()> {
    if s_nodes.is_empty() {
        return Err(Error::EmptyInput {
            context: "s_nodes",
        });
    }
    if s_nodes[0] != F::zero() {
        return Err(Error::InvalidParameter {
            name: "s_nodes",
            reason: format!("first node must be 0, got {}", s_nodes[0]),
        });
    }
    if s_nodes.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "s_nodes",
            reason: "nodes must be finite".into(),
        });
    }
    let ascending = s_nodes.windows(2).all(|w| w[1] > w[0]);
    let descending = s_nodes.windows(2).all(|w| w[1] < w[0]);
    if s_nodes.len() > 1 && !ascending && !descending {
        return Err(Error::InvalidParameter {
            name: "s_nodes",
            reason: "nodes must be strictly monotone".into(),
        });
    }
    Ok(())
}

/// Cumulative trapezoid sums of an integrand evaluated at every node.
///
/// The integrand is continuous but only piecewise-smooth in s (the
/// underlying trajectory reflects off walls), so higher-order quadrature
/// gains nothing at the kinks; the node spacing itself is the resolution.
fn cumulative_trapezoid_scan<F: Float>(
    s_nodes: &[F],
    mut integrand: impl FnMut(usize, F) -> Result<F>,
) -> Result<Vec<F>> {
    let mut out = Vec::with_capacity(s_nodes.len());
    let mut acc = F::zero();
    let mut prev = integrand(0, s_nodes[0])?;
    out.push(F::zero());
    let half = F::lit(0.5);
    for (k, pair) in s_nodes.windows(2).enumerate() {
        let f = integrand(k + 1, pair[1])?;
        acc += half * (pair[1] - pair[0]) * (prev + f);
        out.push(acc);
        prev = f;
    }
    Ok(out)
}

/// Action difference dS(z0, s) at every node of a strictly monotone s grid
/// starting at 0, for a finite-duration drive.
///
/// Per node: (i) slide the initial point along the unperturbed flow to
/// z0(s); (ii) evolve that point through the full drive; (iii) take the
/// final-Hamiltonian value there minus the initial-Hamiltonian value at
/// z0(s). One driven evolution per node; the sums are cumulative trapezoids.
pub fn action_difference<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z0: &PhasePoint<F, D>,
    s_nodes: &[F],
    process: &ProcessSpec<F>,
    dt: F,
) -> Result<Vec<F>> {
    validate_s_nodes(s_nodes)?;
    let mut z = free_flight(sys, z0, s_nodes[0])?;
    let mut prev_s = s_nodes[0];
    cumulative_trapezoid_scan(s_nodes, |node, s| {
        (|| {
            if s != prev_s {
                z = free_flight(sys, &z, s - prev_s)?;
                prev_s = s;
            }
            let z_tau = driven_evolve(sys, &z, process, dt)?;
            Ok(h_final(sys, &z_tau)? - h_initial(sys, &z)?)
        })()
        .map_err(|source: Error| Error::NodePropagation {
            node,
            source: Box::new(source),
        })
    })
}

/// Action difference for an instantaneous switch: the driven image of each
/// point is the point itself, so the integrand is the perturbation along
/// the unperturbed trajectory, dS(z0, s) = int_0^s V(q0(s')) ds'.
pub fn quench_action_difference<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z0: &PhasePoint<F, D>,
    s_nodes: &[F],
) -> Result<Vec<F>> {
    validate_s_nodes(s_nodes)?;
    let mut z = free_flight(sys, z0, s_nodes[0])?;
    let mut prev_s = s_nodes[0];
    cumulative_trapezoid_scan(s_nodes, |node, s| {
        (|| {
            if s != prev_s {
                z = free_flight(sys, &z, s - prev_s)?;
                prev_s = s;
            }
            Ok(sys.perturbation(&z.q))
        })()
        .map_err(|source: Error| Error::NodePropagation {
            node,
            source: Box::new(source),
        })
    })
}

fn actions_for_protocol<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z0: &PhasePoint<F, D>,
    s_nodes: &[F],
    protocol: &WorkProtocol<F>,
) -> Result<Vec<F>> {
    match protocol {
        WorkProtocol::Driven { process, dt } => action_difference(sys, z0, s_nodes, process, *dt),
        WorkProtocol::Quench => quench_action_difference(sys, z0, s_nodes),
    }
}

struct ChunkSum<F> {
    sums: Vec<Complex<F>>,
    failed: usize,
}

/// Monte Carlo average of the semiclassical phases over the Gibbs ensemble,
/// evaluated at arbitrary monotone s nodes (s = u * hbar_eff). Exposed
/// separately from [`char_func_semiclassical`] so negative-u grids can be
/// evaluated directly (backward flight) as a check on conjugate extension.
pub fn char_func_over_s_nodes<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    protocol: &WorkProtocol<F>,
    thermal: &ThermalParams<F>,
    s_nodes: &[F],
    n_samples: usize,
    stream: &SampleStream,
) -> Result<CharFunc<F>> {
    validate_s_nodes(s_nodes)?;
    if n_samples < 2 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!("need at least 2 samples, got {n_samples}"),
        });
    }
    let n_nodes = s_nodes.len();
    let inv_hbar = F::one() / thermal.hbar_eff;

    let n_chunks = n_samples.div_ceil(CHUNK);
    let partials: Vec<ChunkSum<F>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = ((c + 1) * CHUNK).min(n_samples);
            let mut sums = vec![Complex::new(F::zero(), F::zero()); n_nodes];
            let mut failed = 0usize;
            for i in start..end {
                let mut rng = stream.rng_at(i as u64);
                let z0 = sys.sample_gibbs(thermal.beta, &mut rng);
                match actions_for_protocol(sys, &z0, s_nodes, protocol) {
                    Ok(actions) => {
                        for (sum, ds) in sums.iter_mut().zip(&actions) {
                            let (sin, cos) = (*ds * inv_hbar).sin_cos();
                            *sum += Complex::new(cos, sin);
                        }
                    }
                    Err(_) => failed += 1,
                }
            }
            ChunkSum { sums, failed }
        })
        .collect();

    // Ordered sequential reduction over chunks: bitwise thread-independence.
    let mut totals = vec![Complex::new(F::zero(), F::zero()); n_nodes];
    let mut n_failed = 0usize;
    for chunk in &partials {
        for (t, s) in totals.iter_mut().zip(&chunk.sums) {
            *t += *s;
        }
        n_failed += chunk.failed;
    }

    // Drop-and-count failure policy with a hard 0.1% budget: silently biased
    // averages are worse than a loud abort.
    if n_failed * 1000 > n_samples {
        return Err(Error::FailureBudgetExceeded {
            failed: n_failed,
            total: n_samples,
            budget_per_mille: 1,
        });
    }
    let n_ok = n_samples - n_failed;
    if n_ok < 2 {
        return Err(Error::EmptyInput {
            context: "semiclassical average (all samples failed)",
        });
    }

    let n = F::from_usize_exact(n_ok);
    let g: Vec<Complex<F>> = totals.iter().map(|t| t / n).collect();
    // Each sample is a unit phasor, so Var[Re + i Im] = 1 - |mean|^2.
    let stderr: Vec<F> = g
        .iter()
        .map(|m| ((F::one() - m.norm_sqr()).max(F::zero()) / (n - F::one())).sqrt())
        .collect();

    Ok(CharFunc {
        u: s_nodes.iter().map(|&s| s * inv_hbar).collect(),
        g,
        stderr,
        n_samples,
        n_failed,
    })
}

/// Semiclassical characteristic function on a u grid: the s grid is the u
/// grid scaled by hbar_eff, so one cumulative action pass per sample yields
/// G at every grid point simultaneously.
pub fn char_func_semiclassical<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    protocol: &WorkProtocol<F>,
    thermal: &ThermalParams<F>,
    grid: &UGrid<F>,
    n_samples: usize,
    stream: &SampleStream,
) -> Result<CharFunc<F>> {
    let s_nodes: Vec<F> = grid.points().iter().map(|&u| u * thermal.hbar_eff).collect();
    let mut cf = char_func_over_s_nodes(sys, protocol, thermal, &s_nodes, n_samples, stream)?;
    // Report the caller's u grid verbatim (s/hbar would reintroduce
    // round-trip rounding in the last bit).
    cf.u = grid.points();
    Ok(cf)
}

/// Extend a characteristic function sampled on u >= 0 to the symmetric grid
/// [-u_max, u_max] via G(-u) = conj(G(u)).
///
/// The negative-u integral maps to the conjugate of the positive-u one
/// because the Gibbs weight and the phase-space measure are invariant under
/// the unperturbed flow; extending by conjugation therefore loses nothing
/// and guarantees a real work distribution after inversion.
pub fn hermitian_extend<F: Float>(half: &CharFunc<F>) -> Result<CharFunc<F>> {
    if half.u.is_empty() || half.u[0] != F::zero() {
        return Err(Error::BadCharFuncGrid);
    }
    if !half.u.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::BadCharFuncGrid);
    }
    let n = half.u.len();
    let full = 2 * n - 1;
    let mut u = Vec::with_capacity(full);
    let mut g = Vec::with_capacity(full);
    let mut stderr = Vec::with_capacity(full);
    for k in (1..n).rev() {
        u.push(-half.u[k]);
        g.push(half.g[k].conj());
        stderr.push(half.stderr[k]);
    }
    u.extend_from_slice(&half.u);
    g.extend_from_slice(&half.g);
    stderr.extend_from_slice(&half.stderr);
    Ok(CharFunc {
        u,
        g,
        stderr,
        n_samples: half.n_samples,
        n_failed: half.n_failed,
    })
}
