//! Steady-state excitations of the dissipative Rabi model.
//!
//! A two-level atom coupled to a truncated cavity mode, damped by Markovian
//! reservoirs, does not relax to the vacuum once the anti-rotating part of the
//! coupling is kept. This crate builds the Lindblad generator for that system
//! (optionally with a spectator cavity mode or a detuned second atom), finds
//! its null space, and compares the result against closed-form one-photon
//! expressions.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel sweeps live in the `amendart` crate.
//!
//! Conventions used everywhere:
//!
//! * qubit basis `(|g⟩, |e⟩)`, Fock basis `|0⟩..|N⟩` ascending;
//! * tensor products follow the order of [`CompositeSpace`] with the first
//!   factor as the slowest-varying index;
//! * density matrices are vectorized by stacking columns, `v[i + D·j] = ρ[i, j]`.

#![no_std]

extern crate alloc;

pub mod analytic;
pub mod dd;
mod error;
pub mod hilbert;
pub mod linalg;
pub mod liouvillian;
pub mod models;
pub mod observables;
pub mod steady_state;
pub mod trajectories;

pub use error::{Error, Result};
pub use hilbert::{CompositeSpace, DensityMatrix, Operator, SubsystemKind, SubsystemSpec};
pub use linalg::{CMatrix, CsrMatrix, C64};
pub use liouvillian::{BilinearKernelParams, SuperOperator};
pub use models::{CouplingForm, LindbladTerm, ModelSpec, Parasitic, RabiParams, Scenario};
pub use steady_state::{SteadyStateResult, Tolerances};
