//! Classical systems: configuration domains, driving potentials, exact free
//! flow, and the driven fixed-step RK4 integrator with hard-wall handling.

pub mod one_dim;
pub mod stadium;

use crate::error::{Error, Result};
use crate::float::Float;
use crate::phase::PhasePoint;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use one_dim::{BoxSystem1D, GaussianBump1D, HarmonicRampSystem};
pub use stadium::{reference_stadium, GaussianPotential, StadiumGeometry, StadiumSystem};

/// Absolute position tolerance for locating wall crossings.
pub const WALL_POS_TOL: f64 = 1e-12;
/// Two boundary faces closer than this to the reflection point count as a
/// corner hit and both momentum components are reflected.
pub const CORNER_TOL: f64 = 1e-10;
const BISECT_MAX_ITERS: usize = 64;
const REFLECTIONS_PER_STEP_MAX: usize = 64;

/// Ramp profile g(t): g(0) = 0, g(tau) = 1, monotone on [0, tau].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Linear,
    Smoothstep,
}

impl Schedule {
    #[inline]
    pub fn value<F: Float>(self, t: F, tau: F) -> F {
        let x = (t / tau).max(F::zero()).min(F::one());
        match self {
            Schedule::Linear => x,
            Schedule::Smoothstep => x * x * (F::lit(3.0) - F::lit(2.0) * x),
        }
    }
}

/// Driving protocol: H_t = H_0 + g(t) V over t in [0, tau].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProcessSpec<F> {
    pub tau: F,
    pub schedule: Schedule,
}

impl<F: Float> ProcessSpec<F> {
    pub fn new(tau: F, schedule: Schedule) -> Result<Self> {
        if !(tau.is_finite() && tau > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("must be finite and positive, got {tau}"),
            });
        }
        Ok(Self { tau, schedule })
    }

    #[inline]
    pub fn g(&self, t: F) -> F {
        self.schedule.value(t, self.tau)
    }
}

/// A classical system with kinetic term |p|^2/(2m), an optional static
/// potential in H_0, hard walls (optional), and a driving perturbation V(q).
///
/// `flow_h0` must be the exact (or closed-form) flow of H_0 alone, valid for
/// positive and negative times. Potentials must evaluate everywhere in R^D;
/// integrator stages may probe points slightly outside the walls.
pub trait System<F: Float, const D: usize>: Sync {
    fn mass(&self) -> F;
    fn has_walls(&self) -> bool;
    fn contains(&self, q: &[F; D]) -> bool;
    /// Static potential contribution to H_0 (zero for hard-wall billiards).
    fn base_potential(&self, q: &[F; D]) -> F;
    fn base_potential_grad(&self, q: &[F; D]) -> [F; D];
    /// Driving perturbation V(q) at full strength (g = 1).
    fn perturbation(&self, q: &[F; D]) -> F;
    fn perturbation_grad(&self, q: &[F; D]) -> [F; D];
    /// Exact flow of H_0 for a signed duration s.
    fn flow_h0(&self, z: &PhasePoint<F, D>, s: F) -> Result<PhasePoint<F, D>>;
    /// Specular reflection at the boundary face(s) nearest to z.q; faces
    /// within `CORNER_TOL` of each other are all applied (corner rule).
    fn reflect(&self, z: &mut PhasePoint<F, D>);
    /// Bounding box of the configuration domain, if bounded.
    fn bounds(&self) -> Option<([F; D], [F; D])>;

    /// One draw from the Gibbs ensemble of H_0 at inverse temperature beta.
    /// Positions are drawn before momenta so the stream layout is stable.
    /// Default: rejection-uniform position in the bounding box, momenta
    /// independent Gaussians of variance m/beta. Systems whose H_0 has a
    /// position-dependent part must override.
    fn sample_gibbs(&self, beta: F, rng: &mut ChaCha8Rng) -> PhasePoint<F, D> {
        use rand::Rng;
        let (lo, hi) = self
            .bounds()
            .expect("default Gibbs sampler needs a bounded domain");
        let q = loop {
            let mut q = [F::zero(); D];
            for d in 0..D {
                let u: f64 = rng.random();
                q[d] = lo[d] + (hi[d] - lo[d]) * F::lit(u);
            }
            if self.contains(&q) {
                break q;
            }
        };
        let sd = (self.mass() / beta).sqrt();
        let mut p = [F::zero(); D];
        for d in 0..D {
            let n: f64 = rng.sample(StandardNormal);
            p[d] = sd * F::lit(n);
        }
        PhasePoint::new(q, p)
    }
}

/// V(q) with a domain check.
pub fn potential_value<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    q: &[F; D],
) -> Result<F> {
    if sys.has_walls() && !sys.contains(q) {
        return Err(Error::OutOfDomain {
            q: q.iter().map(|&c| c.as_f64()).collect(),
        });
    }
    Ok(sys.perturbation(q))
}

/// H_0(z) = |p|^2/(2m) + static potential.
pub fn h_initial<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z: &PhasePoint<F, D>,
) -> Result<F> {
    if sys.has_walls() && !sys.contains(&z.q) {
        return Err(Error::OutOfDomain { q: z.q_f64() });
    }
    Ok(z.kinetic_energy(sys.mass()) + sys.base_potential(&z.q))
}

/// H_tau(z) = H_0(z) + V(q), the final Hamiltonian (g = 1).
pub fn h_final<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z: &PhasePoint<F, D>,
) -> Result<F> {
    Ok(h_initial(sys, z)? + sys.perturbation(&z.q))
}

/// H_t(z) = H_0(z) + g(t) V(q); t must lie in [0, tau].
pub fn hamiltonian_value<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z: &PhasePoint<F, D>,
    t: F,
    process: &ProcessSpec<F>,
) -> Result<F> {
    if !(t >= F::zero() && t <= process.tau) {
        return Err(Error::TimeOutOfRange {
            t: t.as_f64(),
            tau: process.tau.as_f64(),
        });
    }
    Ok(h_initial(sys, z)? + process.g(t) * sys.perturbation(&z.q))
}

/// Exact H_0 flow for a signed duration s, with a domain precondition.
pub fn free_flight<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z: &PhasePoint<F, D>,
    s: F,
) -> Result<PhasePoint<F, D>> {
    if !z.is_finite() || !s.is_finite() {
        return Err(Error::NonFinite {
            context: "free_flight input",
        });
    }
    if sys.has_walls() && !sys.contains(&z.q) {
        return Err(Error::OutOfDomain { q: z.q_f64() });
    }
    sys.flow_h0(z, s)
}

#[inline]
fn accel<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    q: &[F; D],
    g: F,
) -> [F; D] {
    let gb = sys.base_potential_grad(q);
    let gv = sys.perturbation_grad(q);
    let mut a = [F::zero(); D];
    for d in 0..D {
        a[d] = -(gb[d] + g * gv[d]);
    }
    a
}

/// One classical RK4 step of duration h for H_t, starting at local time t.
#[inline]
fn rk4_step<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z: &PhasePoint<F, D>,
    t: F,
    h: F,
    process: &ProcessSpec<F>,
) -> PhasePoint<F, D> {
    let inv_m = F::one() / sys.mass();
    let half = F::lit(0.5);
    let h2 = half * h;

    let g1 = process.g(t);
    let g2 = process.g(t + h2);
    let g4 = process.g(t + h);

    let k1p = accel(sys, &z.q, g1);
    let mut q2 = [F::zero(); D];
    let mut p2 = [F::zero(); D];
    for d in 0..D {
        q2[d] = z.q[d] + h2 * z.p[d] * inv_m;
        p2[d] = z.p[d] + h2 * k1p[d];
    }
    let k2p = accel(sys, &q2, g2);
    let mut q3 = [F::zero(); D];
    let mut p3 = [F::zero(); D];
    for d in 0..D {
        q3[d] = z.q[d] + h2 * p2[d] * inv_m;
        p3[d] = z.p[d] + h2 * k2p[d];
    }
    let k3p = accel(sys, &q3, g2);
    let mut q4 = [F::zero(); D];
    let mut p4 = [F::zero(); D];
    for d in 0..D {
        q4[d] = z.q[d] + h * p3[d] * inv_m;
        p4[d] = z.p[d] + h * k3p[d];
    }
    let k4p = accel(sys, &q4, g4);

    let two = F::lit(2.0);
    let sixth = h / F::lit(6.0);
    let mut q = [F::zero(); D];
    let mut p = [F::zero(); D];
    for d in 0..D {
        // dq/dt stages: p/m at z, p2, p3, p4
        q[d] = z.q[d] + sixth * inv_m * (z.p[d] + two * (p2[d] + p3[d]) + p4[d]);
        p[d] = z.p[d] + sixth * (k1p[d] + two * (k2p[d] + k3p[d]) + k4p[d]);
    }
    PhasePoint { q, p }
}

/// Integrates the driven dynamics from t=0 to t=tau with fixed step <= dt.
///
/// After each RK4 step that exits the domain, the crossing is located by
/// bisection to within `WALL_POS_TOL`, a specular reflection is applied, and
/// the remaining fraction of the step is resumed. Bisection that fails to
/// converge in 64 iterations (or a runaway reflection cascade) surfaces a
/// numerical-failure error carrying the trajectory state.
pub fn driven_evolve<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z0: &PhasePoint<F, D>,
    process: &ProcessSpec<F>,
    dt: F,
) -> Result<PhasePoint<F, D>> {
    if !(dt.is_finite() && dt > F::zero()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: format!("must be finite and positive, got {dt}"),
        });
    }
    if !z0.is_finite() {
        return Err(Error::NonFinite {
            context: "driven_evolve initial state",
        });
    }
    if sys.has_walls() && !sys.contains(&z0.q) {
        return Err(Error::OutOfDomain { q: z0.q_f64() });
    }
    let n_steps = (process.tau / dt).ceil().as_f64() as usize;
    let n_steps = n_steps.max(1);
    let h = process.tau / F::from_usize_exact(n_steps);

    let mut z = *z0;
    for i in 0..n_steps {
        let t = F::from_usize_exact(i) * h;
        z = advance_step(sys, z, t, h, process)?;
    }
    Ok(z)
}

fn advance_step<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    z0: PhasePoint<F, D>,
    t0: F,
    h: F,
    process: &ProcessSpec<F>,
) -> Result<PhasePoint<F, D>> {
    let tol = F::lit(WALL_POS_TOL);
    if !sys.has_walls() {
        let z1 = rk4_step(sys, &z0, t0, h, process);
        if !z1.is_finite() {
            return Err(Error::NumericalFailure {
                context: "driven step diverged",
                t: t0.as_f64(),
                q: z0.q_f64(),
                p: z0.p_f64(),
            });
        }
        return Ok(z1);
    }

    let mut z = z0;
    let mut t = t0;
    let mut rem = h;
    let mut reflections = 0usize;
    loop {
        let scale = z.speed(sys.mass()).max(F::one());
        // A remainder below the wall tolerance cannot be resolved further;
        // advancing it would risk re-reflecting at the wall just handled.
        if rem * scale < tol {
            return Ok(z);
        }
        let z1 = rk4_step(sys, &z, t, rem, process);
        if z1.is_finite() && sys.contains(&z1.q) {
            return Ok(z1);
        }

        let mut lo = F::zero();
        let mut hi = rem;
        let mut converged = false;
        for _ in 0..BISECT_MAX_ITERS {
            if (hi - lo) * scale < tol {
                converged = true;
                break;
            }
            let mid = F::lit(0.5) * (lo + hi);
            let zm = rk4_step(sys, &z, t, mid, process);
            if zm.is_finite() && sys.contains(&zm.q) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if !converged {
            return Err(Error::NumericalFailure {
                context: "wall-crossing bisection",
                t: t.as_f64(),
                q: z.q_f64(),
                p: z.p_f64(),
            });
        }
        let mut zw = rk4_step(sys, &z, t, lo, process);
        sys.reflect(&mut zw);
        reflections += 1;
        if reflections > REFLECTIONS_PER_STEP_MAX {
            return Err(Error::NumericalFailure {
                context: "reflection cascade in one step",
                t: t.as_f64(),
                q: zw.q_f64(),
                p: zw.p_f64(),
            });
        }
        t += lo;
        rem -= lo;
        z = zw;
    }
}
