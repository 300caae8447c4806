//! Measurement-level verification of nonzero quantum discord.
//!
//! A bipartite state has zero discord from B to A exactly when the states of
//! B, conditioned on the outcomes of an informationally complete measurement
//! on A, commute pairwise. This crate implements that test for finite
//! dimensional systems ([`dv`]), finite-shot tomography with significance
//! reporting ([`tomo`]), phase-space commutators of Wigner functions
//! ([`phase_space`]) and the heterodyne peak test for two-mode Gaussian
//! states ([`gaussian`]).

pub mod dv;
pub mod eigen;
pub mod error;
pub mod gaussian;
pub mod linalg;
pub mod phase_space;
pub mod povm;
pub mod random;
pub mod state;
pub mod tomo;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use state::{DensityOperator, Subsystem};
