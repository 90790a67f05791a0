//! Exact thermodynamics of small spin rings, separable-state bounds on energy
//! and Hamiltonian variance, and heat-capacity entanglement witnesses.
//!
//! All quantities use units with `J = k = ħ = 1` unless a coupling is set
//! explicitly on [`ModelSpec`]. Rescaling to laboratory units belongs to the
//! I/O layer.
//!
//! Module map:
//!
//! - [`spin_model`]: Hamiltonians of transverse Ising, XXX and XX rings.
//! - [`diag`]: dense (symmetry-blocked) exact diagonalization.
//! - [`thermo`]: partition function, internal energy and heat capacity.
//! - [`sepbound`]: product-state minimization of variance and energy.
//! - [`analytic`]: infinite-chain closed forms.
//! - [`witness`]: witness bounds, critical temperatures and reports.
//! - [`eigencheck`]: numerical search for product states inside eigenspaces.

pub mod analytic;
pub mod diag;
pub mod eigencheck;
mod error;
pub mod optimize;
pub mod quadrature;
pub mod sepbound;
pub mod spin_model;
pub mod thermo;
pub mod witness;

pub use error::{Error, Result};
pub use spin_model::{BlochAngles, ModelKind, ModelSpec, OperatorMatrix, Spin};
pub use thermo::{Spectrum, ThermoCurve};
pub use sepbound::{ProductAnsatz, SeparableBound};
pub use witness::{WitnessBound, WitnessReport};
