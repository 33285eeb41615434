//! Symmetric hyperbolic relaxation model of viscous heat-conducting fluids.
//!
//! * [`eos`], [`state`]: equation of state in `(θ, ψ)` and the state
//!   variables, including the 14-component main field `Υ`.
//! * [`potentials`]: `X⁰`, `Xʲ`, their gradients and Hessians, the source.
//! * [`structure`]: symmetrizer positivity and the Kawashima condition.
//! * [`solver`], [`nsf`]: 1D periodic finite-volume solvers for the
//!   relaxation system and for its Navier–Stokes–Fourier limit.
//! * [`experiments`]: relaxation-limit sweep and decay to equilibrium.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dual;
pub mod eos;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod initial;
pub mod limiter;
pub mod linalg;
pub mod nsf;
pub mod potentials;
pub mod solver;
pub mod state;
pub mod structure;

pub use config::Config;
pub use eos::{Eos, IdealGas, PressurePartials};
pub use error::{Error, Result};
pub use grid::{Grid1D, Snapshot};
pub use limiter::Limiter;
pub use nsf::{NsfField, NsfSolver};
pub use potentials::{ConservedVector, FluxTable, Matrix14, SourceVector};
pub use solver::{Field1D, RshsSolver, SchemeConfig};
pub use state::{GodunovState, Model, PhysicalState, RelaxationParams, SourceMode, STATE_DIM};
