//! Learned six-point flux reconstruction for conservative finite-difference
//! solvers of hyperbolic conservation laws.
//!
//! A small network maps each interface stencil of split fluxes to six
//! reconstruction weights. A hard-constraint output layer keeps the weights
//! consistent, so the learned scheme stays conservative and at least
//! second-order accurate whatever the parameters.

pub mod adr;
pub mod error;
pub mod experiments;
pub mod format;
pub mod grid;
pub mod schemes;
pub mod solver;
pub mod training;
pub mod wlnn;

pub use error::{Error, Result};
pub use grid::{l2_error, downsample_block_average, GhostKind, GhostPolicy, ScalarField, UniformGrid};
pub use schemes::{ce6_weights, up5_weights, Direction, StencilWeights};
pub use solver::{EulerState, Scheme};
pub use wlnn::{ConstraintBasis, MlpModel, WlnnModel};
