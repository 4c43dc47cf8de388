//! Exact simulation of von Neumann measurements with a Gaussian pointer:
//! coupling of arbitrary strength, post-selection, pointer readings and
//! state-change metrics, plus an independent brute-force grid verifier.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod oracle;
pub mod error;
pub mod grid;
pub mod pointer;
pub mod qcore;
pub mod spinhalf;
pub mod verify;

pub use error::{Error, Result};
pub use qcore::{trace_distance, uhlmann_fidelity, BlochVector, DensityMatrix, Observable, PureState};
