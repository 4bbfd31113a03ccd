//! Simulation kernel for chirped and fractional stimulated Raman adiabatic
//! passage in three- and four-level Λ systems.
//!
//! Everything is expressed in units of a reference angular frequency ω:
//! energies and Rabi frequencies in [ω], times in [ω⁻¹], chirp rates in [ω²].
//! Hamiltonians are the rotating-wave field-interaction matrices with ħ = 1 and
//! the overall factor 1/2 folded into the entries, so their eigenvalues are the
//! dressed-state energies directly.
//!
//! The crate is `no_std` (it needs `alloc` for trajectories and frames). File
//! formats, parallel sweeps and the command line live in the `stirap` crate.
#![no_std]

extern crate alloc;

pub mod dressed;
mod error;
pub mod hamiltonian;
pub mod linalg;
mod math;
pub mod propagator;
pub mod pulses;
pub mod sweep;

pub use dressed::{
    dark_state, dressed_frame, dressed_frame_model, find_avoided_crossings, landau_zener, landau_zener_diabatic,
    mixing_angle_series, mixing_angles, rotation_matrix, theta_dot, CrossingOptions, CrossingReport, DressedFrame,
    DressedOptions, MixingAngles,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    analytic_dressed_energies_3lvl, effective_stokes_hamiltonian_at, eta_phase, hamiltonian_at, hamiltonian_rate,
    quartic_eval, HamiltonianModel, HermitianSample, Quartic, ScenarioSpec, Scheme,
};
pub use linalg::{eigh, CMat, CVec, Eigen, C64};
pub use propagator::{
    final_observables, propagate, propagate_model, propagate_with, FinalObservables, Observable, PropagateOptions,
    Trajectory,
};
pub use pulses::{
    effective_stokes, envelope, one_photon_detuning, two_photon_detuning, DetuningSpec, EffectiveStokes, PulseRole,
    PulseSpec, StokesPhaseTracker,
};
pub use sweep::{constraint_line, ConstraintKind, ConstraintLine, SweepAxis, SweepParam, SweepPlan, SweepResult};
