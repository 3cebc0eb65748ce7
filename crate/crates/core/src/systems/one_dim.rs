//! One-dimensional model systems with closed-form unperturbed flows.
//!
//! These are small enough for the exact quantum reference, which makes them
//! the workhorses for cross-validating the semiclassical and classical
//! estimators against exact transition statistics.

use super::System;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::phase::PhasePoint;
use rand_chacha::ChaCha8Rng;

/// Normalized 1D Gaussian bump:
/// V(q) = strength / sqrt(2 pi width^2) * exp(-(q - center)^2 / (2 width^2)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBump1D<F> {
    strength: F,
    width: F,
    center: F,
    norm: F,
    inv_w2: F,
}

impl<F: Float> GaussianBump1D<F> {
    pub fn new(strength: F, width: F, center: F) -> Result<Self> {
        if !strength.is_finite() {
            return Err(Error::InvalidParameter {
                name: "strength",
                reason: format!("must be finite, got {strength}"),
            });
        }
        if !(width.is_finite() && width > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "width",
                reason: format!("must be finite and positive, got {width}"),
            });
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter {
                name: "center",
                reason: format!("must be finite, got {center}"),
            });
        }
        let norm = strength / (F::lit(2.0) * F::PI() * width * width).sqrt();
        Ok(Self {
            strength,
            width,
            center,
            norm,
            inv_w2: F::one() / (width * width),
        })
    }

    #[inline]
    pub fn strength(&self) -> F {
        self.strength
    }

    #[inline]
    pub fn width(&self) -> F {
        self.width
    }

    #[inline]
    pub fn center(&self) -> F {
        self.center
    }

    #[inline]
    pub fn value(&self, q: F) -> F {
        let d = q - self.center;
        self.norm * (-F::lit(0.5) * d * d * self.inv_w2).exp()
    }

    #[inline]
    pub fn grad(&self, q: F) -> F {
        let d = q - self.center;
        -self.norm * self.inv_w2 * d * (-F::lit(0.5) * d * d * self.inv_w2).exp()
    }
}

/// Particle in a hard-walled box [0, L] with a Gaussian bump switched on by
/// the drive. The unperturbed flow is the exact triangle-wave fold of the
/// straight-line motion; a flight ending exactly on a wall returns the
/// reflected (inward-pointing) momentum.
#[derive(Clone, Copy, Debug)]
pub struct BoxSystem1D<F> {
    length: F,
    bump: GaussianBump1D<F>,
    mass: F,
    eps: F,
}

impl<F: Float> BoxSystem1D<F> {
    pub fn new(length: F, bump: GaussianBump1D<F>, mass: F) -> Result<Self> {
        if !(length.is_finite() && length > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("must be finite and positive, got {length}"),
            });
        }
        if !(mass.is_finite() && mass > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("must be finite and positive, got {mass}"),
            });
        }
        if bump.center() < F::zero() || bump.center() > length {
            return Err(Error::InvalidParameter {
                name: "center",
                reason: format!(
                    "bump center {} outside the box [0, {length}]",
                    bump.center()
                ),
            });
        }
        let eps = F::lit(1e-12) * length.max(F::one());
        Ok(Self {
            length,
            bump,
            mass,
            eps,
        })
    }

    #[inline]
    pub fn length(&self) -> F {
        self.length
    }

    #[inline]
    pub fn bump(&self) -> &GaussianBump1D<F> {
        &self.bump
    }

    /// Fold the free straight-line endpoint x = q + v s back into [0, L]
    /// using the 2L-periodic triangle map; the momentum sign follows the
    /// local slope of the fold, with wall hits resolved to the outgoing side.
    fn fold(&self, x: F, p: F) -> (F, F) {
        let two_l = F::lit(2.0) * self.length;
        let mut y = x - (x / two_l).floor() * two_l;
        if y >= two_l {
            y -= two_l;
        }
        if y == self.length {
            (self.length, -p.abs())
        } else if y == F::zero() {
            (F::zero(), p.abs())
        } else if y < self.length {
            (y, p)
        } else {
            (two_l - y, -p)
        }
    }
}

impl<F: Float> System<F, 1> for BoxSystem1D<F> {
    #[inline]
    fn mass(&self) -> F {
        self.mass
    }

    #[inline]
    fn has_walls(&self) -> bool {
        true
    }

    #[inline]
    fn contains(&self, q: &[F; 1]) -> bool {
        q[0] >= -self.eps && q[0] <= self.length + self.eps
    }

    #[inline]
    fn base_potential(&self, _q: &[F; 1]) -> F {
        F::zero()
    }

    #[inline]
    fn base_potential_grad(&self, _q: &[F; 1]) -> [F; 1] {
        [F::zero()]
    }

    #[inline]
    fn perturbation(&self, q: &[F; 1]) -> F {
        self.bump.value(q[0])
    }

    #[inline]
    fn perturbation_grad(&self, q: &[F; 1]) -> [F; 1] {
        [self.bump.grad(q[0])]
    }

    fn flow_h0(&self, z: &PhasePoint<F, 1>, s: F) -> Result<PhasePoint<F, 1>> {
        let x = z.q[0] + z.p[0] / self.mass * s;
        let (q, p) = self.fold(x, z.p[0]);
        Ok(PhasePoint::new([q], [p]))
    }

    fn reflect(&self, z: &mut PhasePoint<F, 1>) {
        z.p[0] = -z.p[0];
    }

    fn bounds(&self) -> Option<([F; 1], [F; 1])> {
        Some(([F::zero()], [self.length]))
    }
}

/// Harmonic oscillator H0 = p^2/2m + k0 q^2/2 whose stiffness is ramped by
/// dk q^2/2. The unperturbed flow is the exact phase-space rotation at
/// angular frequency sqrt(k0/m).
#[derive(Clone, Copy, Debug)]
pub struct HarmonicRampSystem<F> {
    mass: F,
    k0: F,
    dk: F,
    omega0: F,
}

impl<F: Float> HarmonicRampSystem<F> {
    pub fn new(mass: F, k0: F, dk: F) -> Result<Self> {
        if !(mass.is_finite() && mass > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("must be finite and positive, got {mass}"),
            });
        }
        if !(k0.is_finite() && k0 > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "k0",
                reason: format!("must be finite and positive, got {k0}"),
            });
        }
        if !(dk.is_finite() && k0 + dk > F::zero()) {
            return Err(Error::InvalidParameter {
                name: "dk",
                reason: format!("must be finite with k0 + dk > 0, got {dk}"),
            });
        }
        Ok(Self {
            mass,
            k0,
            dk,
            omega0: (k0 / mass).sqrt(),
        })
    }

    #[inline]
    pub fn k0(&self) -> F {
        self.k0
    }

    #[inline]
    pub fn dk(&self) -> F {
        self.dk
    }

    #[inline]
    pub fn omega0(&self) -> F {
        self.omega0
    }

    /// Classical free-energy difference of the full stiffness ramp,
    /// -(1/beta) ln sqrt(k0 / (k0 + dk)) = (1/2beta) ln((k0 + dk)/k0).
    pub fn free_energy_difference(&self, beta: F) -> F {
        ((self.k0 + self.dk) / self.k0).ln() / (F::lit(2.0) * beta)
    }
}

impl<F: Float> System<F, 1> for HarmonicRampSystem<F> {
    #[inline]
    fn mass(&self) -> F {
        self.mass
    }

    #[inline]
    fn has_walls(&self) -> bool {
        false
    }

    #[inline]
    fn contains(&self, _q: &[F; 1]) -> bool {
        true
    }

    #[inline]
    fn base_potential(&self, q: &[F; 1]) -> F {
        F::lit(0.5) * self.k0 * q[0] * q[0]
    }

    #[inline]
    fn base_potential_grad(&self, q: &[F; 1]) -> [F; 1] {
        [self.k0 * q[0]]
    }

    #[inline]
    fn perturbation(&self, q: &[F; 1]) -> F {
        F::lit(0.5) * self.dk * q[0] * q[0]
    }

    #[inline]
    fn perturbation_grad(&self, q: &[F; 1]) -> [F; 1] {
        [self.dk * q[0]]
    }

    fn flow_h0(&self, z: &PhasePoint<F, 1>, s: F) -> Result<PhasePoint<F, 1>> {
        let (sin, cos) = (self.omega0 * s).sin_cos();
        let mw = self.mass * self.omega0;
        Ok(PhasePoint::new(
            [z.q[0] * cos + z.p[0] / mw * sin],
            [-mw * z.q[0] * sin + z.p[0] * cos],
        ))
    }

    fn reflect(&self, _z: &mut PhasePoint<F, 1>) {}

    fn bounds(&self) -> Option<([F; 1], [F; 1])> {
        None
    }

    fn sample_gibbs(&self, beta: F, rng: &mut ChaCha8Rng) -> PhasePoint<F, 1> {
        use rand::Rng;
        use rand_distr::StandardNormal;
        let sd_q = F::one() / (beta * self.k0).sqrt();
        let sd_p = (self.mass / beta).sqrt();
        let nq: f64 = rng.sample(StandardNormal);
        let np: f64 = rng.sample(StandardNormal);
        PhasePoint::new([sd_q * F::lit(nq)], [sd_p * F::lit(np)])
    }
}
