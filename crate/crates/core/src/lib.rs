//! Exact dynamics and thermometric sensitivity of fermionic probes strongly
//! coupled to a fermionic reservoir in the wide-band limit.
//!
//! The library simulates one or a few resonant levels exchanging particles
//! with a thermal Fermi gas at chemical potential `mu` and temperature `T`,
//! and quantifies how well a population measurement on the probe estimates
//! `T`. Everything is organised around five modules:
//!
//! - [`model`]: physical parameter records and Fermi statistics,
//! - [`quad`]: adaptive quadrature for Fermi x Lorentzian x oscillatory
//!   integrands, tail closed forms, and small complex matrix kernels,
//! - [`single_probe`]: exact, Markovian and short-time occupation dynamics
//!   of a single level,
//! - [`metrology`]: Fisher information, SLD quantum Fisher information,
//!   noise-to-signal ratios and scalar optimisers,
//! - [`multi_probe`]: common-bath dynamics of several levels via the matrix
//!   Langevin solution, Wick reconstruction of the reduced state, and
//!   additivity comparisons.
//!
//! Units: `hbar = k_B = 1`; energies are quoted in units of the effective
//! gap `epsilon - mu` and times in its inverse.
//!
//! The crate is `no_std` (with `alloc`) so the numerical core can be reused
//! from embedded or bindings contexts; all IO lives in the companion CLI
//! crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod metrology;
pub mod model;
pub mod multi_probe;
pub mod quad;
pub mod single_probe;

pub use error::{Error, Result};
pub use model::{BathKind, BathSpec, ModelParams};
pub use quad::{ComplexMatrix, QuadConfig};
