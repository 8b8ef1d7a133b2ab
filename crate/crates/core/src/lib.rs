//! Numerical toolkit for the quantum coherent state transform on
//! continuous-variable systems: truncated Fock-space simulation, Husimi
//! Q-function sampling, single-shot gate calibration, Gaussian-state
//! estimation, Q-function tomography, and the DV-ancilla discrete variant.

pub mod calibration;
pub mod discrete;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod optimize;
pub mod qcst;
pub mod sample;
pub mod tomography;

pub use error::{QcstError, Result};
