//! Numerics for continuous-variable teleportation through two-mode resources
//! built from (f-deformed) photon-added and photon-subtracted displaced Fock
//! states.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;

pub mod charfun;
pub mod correlations;
pub mod error;
pub mod fock;
pub mod quadrature;
pub mod special;
pub mod states;
pub mod teleport;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use fock::{Cutoff, DeformationFn, DisplacementVariant, OperatorMatrix};
pub use states::{
    beam_split, default_cutoff, make_single_mode, make_single_mode_truncated, make_two_mode, Operation,
    ResourceSpec, SingleModeState, TwoModeState,
};
