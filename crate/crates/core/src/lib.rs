//! Work statistics of driven chaotic systems.
//!
//! This crate computes the probability distribution of work performed on a
//! thermally prepared system by a time-dependent drive, three independent
//! ways:
//!
//! * a semiclassical estimator that averages interference phases of
//!   unperturbed trajectories over the initial Gibbs ensemble,
//! * a classical two-point estimator that samples energy differences along
//!   driven trajectories, and
//! * an exact quantum reference that diagonalizes small Hamiltonians and
//!   propagates amplitudes through the drive.
//!
//! All three produce characteristic functions and work distributions on
//! common grids so they can be compared pointwise, and each satisfies the
//! fluctuation identity `<exp(-beta W)> = exp(-beta dF)` within its own
//! accuracy, which the crate exposes as a built-in diagnostic.
//!
//! Numerical work is generic over the scalar type (`f32` or `f64`) through
//! the [`Float`] trait; the quantum reference is `f64`-only because its
//! linear algebra backend is. Random number streams always draw in `f64`
//! and narrow, so a seed reproduces the same trajectory in both precisions.

pub mod error;
pub mod float;
pub mod phase;
pub mod quantum;
pub mod semiclassical;
pub mod systems;
pub mod thermal;
pub mod workdist;

pub use error::{Error, Result};
pub use float::Float;
pub use phase::{PhasePoint, PhasePoint1, PhasePoint2};
pub use quantum::{
    char_func_quantum, evolve_amplitudes, moment_shift_on_doubling,
    quantum_free_energy_difference, quantum_work_distribution, quantum_work_distribution_sudden,
    sudden_transition_probabilities, transition_probabilities, AmplitudeState, QuantumModel,
};
pub use semiclassical::{
    action_difference, char_func_over_s_nodes, char_func_semiclassical, hermitian_extend,
    quench_action_difference, CharFunc, UGrid, WorkProtocol,
};
pub use systems::{
    driven_evolve, free_flight, h_final, h_initial, hamiltonian_value, potential_value,
    reference_stadium, BoxSystem1D, GaussianBump1D, GaussianPotential, HarmonicRampSystem,
    ProcessSpec, Schedule, StadiumGeometry, StadiumSystem, System,
};
pub use thermal::{
    classical_free_energy_difference, density_of_states_billiard, mean_level_spacing,
    sample_gibbs, SampleStream, ThermalParams,
};
pub use workdist::{
    char_func_of_atoms, char_to_work, classical_work_distribution, classical_work_samples,
    histogram_density, jarzynski_check, l1_distance, moments, DistributionKind, JarzynskiReport,
    Window, WorkDistribution, WorkSamples,
};

/// Default scalar precision for end-user entry points.
pub type Real = f64;

/// Crate version, exposed so downstream artifacts can record it.
pub const CORE_VERSION: &str = env!("CARGO_PKG_VERSION");
