//! Berry curvature and Chern number of a driven two-level system, measured
//! through its nonadiabatic response.
//!
//! A qubit with rotating-frame Hamiltonian
//! `H/ħ = ½ [Δ σz + Ω (cos φ σx + sin φ σy)]` is ramped across an ellipsoidal
//! manifold `Δ = Δ₁ cos θ + Δ₂`, `Ω = Ω₁ sin θ`. The σy deviation from the
//! adiabatic state, read out by tomography during the ramp, is linear in the
//! ramp velocity with the Berry curvature as coefficient; integrating it over
//! θ gives the first Chern number. Moving `Δ₂` across `Δ₁` drives the
//! transition `C₁ = 1 → 0`.
//!
//! Modules:
//!
//! - [`model`]: manifold, Hamiltonian, ground states, ramp protocol
//! - [`engine`]: RK4 Schrödinger and Lindblad integration
//! - [`tomography`]: state preparation, Bloch expectations, shot noise
//! - [`chern`]: curvature estimator, Chern quadrature, sweeps
//! - [`oracle`]: closed-form and lattice ground truth
//! - [`config`] and [`commands`]: key-value configs and the CSV reports behind the CLI
//!
//! All numerical types are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

// `!(x > 0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chern;
pub mod commands;
pub mod config;
pub mod engine;
pub mod error;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod state;
pub mod tomography;

pub use chern::{
    chern_integrate, curvature_from_response, fidelity_correction, measure_chern, ramp_rate_sweep,
    run_curvature_experiment, run_tomography, transition_sweep, ChernResult, CurvatureProfile,
    CurvatureSample, ExperimentSetup, ThetaPoints,
};
pub use engine::{evolve_lindblad, evolve_unitary, jump_rates, step_control, DecoherenceParams, Trajectory};
pub use error::{Error, Result};
pub use model::{ground_state, hamiltonian_at, manifold_point, Hamiltonian2, ManifoldParams, RampProtocol};
pub use oracle::{analytic_curvature, lattice_chern, LatticeGrid};
pub use scalar::Scalar;
pub use state::{BlochVector, DensityMatrix, QubitState, Spinor};
pub use tomography::{
    bloch_expectations, generalized_force, prepare_initial, sample_shots, PreparationModel, ShotModel,
};

pub type Manifold = ManifoldParams<f64>;
pub type Hamiltonian = Hamiltonian2<f64>;
pub type Protocol = RampProtocol<f64>;
pub type Decoherence = DecoherenceParams<f64>;
pub type Preparation = PreparationModel<f64>;
pub type Setup = ExperimentSetup<f64>;
pub type Profile = CurvatureProfile<f64>;
pub type Chern = ChernResult<f64>;
pub type Bloch = BlochVector<f64>;
pub type Density = DensityMatrix<f64>;
pub type State = QubitState<f64>;
pub type Psi = Spinor<f64>;

/// Crate version written into every output header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
