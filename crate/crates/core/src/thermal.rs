//! Thermal preparation: Gibbs sampling of the unperturbed Hamiltonian,
//! classical free-energy differences, and spectral-density estimates that
//! set the effective Planck scale of a billiard.

use crate::error::{Error, Result};
use crate::float::Float;
use crate::phase::PhasePoint;
use crate::systems::System;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Inverse temperature, effective Planck constant, and particle mass shared
/// by every estimator in a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalParams<F> {
    pub beta: F,
    pub hbar_eff: F,
    pub mass: F,
}

impl<F: Float> ThermalParams<F> {
    pub fn new(beta: F, hbar_eff: F, mass: F) -> Result<Self> {
        for (name, v) in [("beta", beta), ("hbar_eff", hbar_eff), ("mass", mass)] {
            if !(v.is_finite() && v > F::zero()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        Ok(Self {
            beta,
            hbar_eff,
            mass,
        })
    }

    /// Temperature 1/beta.
    #[inline]
    pub fn temperature(&self) -> F {
        F::one() / self.beta
    }
}

/// Counter-based random stream family: sample `i` always sees the generator
/// seeded with `seed` on stream `i`, independent of which samples were drawn
/// before it and of how work is split across threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleStream {
    pub seed: u64,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// The generator dedicated to sample index `i`.
    pub fn rng_at(&self, i: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i);
        rng
    }
}

/// One Gibbs draw for sample index `i` of the stream family.
pub fn sample_gibbs<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    beta: F,
    stream: &SampleStream,
    i: u64,
) -> PhasePoint<F, D> {
    let mut rng = stream.rng_at(i);
    sys.sample_gibbs(beta, &mut rng)
}

/// Monte Carlo classical free-energy difference of switching the
/// perturbation on at full strength,
/// `dF = -(1/beta) ln < exp(-beta V(q)) >`, with the average taken over the
/// position marginal of the unperturbed Gibbs ensemble. Returns the estimate
/// and its standard error (delta method).
pub fn classical_free_energy_difference<F: Float, const D: usize, S: System<F, D> + ?Sized>(
    sys: &S,
    beta: F,
    stream: &SampleStream,
    n_samples: usize,
) -> Result<(F, F)> {
    if n_samples < 2 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: format!("need at least 2, got {n_samples}"),
        });
    }
    let mut sum = F::zero();
    let mut sum_sq = F::zero();
    for i in 0..n_samples {
        let z = sample_gibbs(sys, beta, stream, i as u64);
        let x = (-beta * sys.perturbation(&z.q)).exp();
        sum += x;
        sum_sq += x * x;
    }
    let n = F::from_usize_exact(n_samples);
    let mean = sum / n;
    if !(mean.is_finite() && mean > F::zero()) {
        return Err(Error::NonFinite {
            context: "free-energy exponential average",
        });
    }
    let var = ((sum_sq - n * mean * mean) / (n - F::one())).max(F::zero());
    let se_mean = (var / n).sqrt();
    let df = -mean.ln() / beta;
    let se_df = se_mean / (beta * mean);
    Ok((df, se_df))
}

/// Smooth (Weyl) density of states of a 2D hard-wall billiard of the given
/// area: dN/dE = mass * area / (2 pi hbar^2).
pub fn density_of_states_billiard<F: Float>(mass: F, area: F, hbar: F) -> F {
    mass * area / (F::lit(2.0) * F::PI() * hbar * hbar)
}

/// Mean level spacing of a 2D billiard, the reciprocal Weyl density:
/// 2 pi hbar^2 / (mass * area).
pub fn mean_level_spacing<F: Float>(mass: F, area: F, hbar: F) -> F {
    F::one() / density_of_states_billiard(mass, area, hbar)
}
