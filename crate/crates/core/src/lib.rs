//! Quantum speed limits for mixed states.
//!
//! The crate computes time bounds built from Wigner–Yanase coherence and
//! the affinity between density matrices, compares them with fidelity,
//! Fisher-information and relative-purity bounds, propagates states under
//! unitary and Lindblad dynamics, and simulates a SWAP-test measurement
//! protocol for the bound's ingredients.
//!
//! ```
//! use qsl_lab::operator::{bloch_to_state, BlochVector, Observable};
//! use qsl_lab::dynamics::evolve_unitary;
//! use qsl_lab::bounds::tl_bound;
//!
//! let h = Observable::bloch([1.0, 0.0, 0.0], 1.0, 0.0, 1.0).unwrap();
//! let up = bloch_to_state(&BlochVector([0.0, 0.0, 1.0])).unwrap();
//! let later = evolve_unitary(&up, &h, std::f64::consts::FRAC_PI_2).unwrap();
//! let t = tl_bound(&up, &h, &later).unwrap();
//! assert!((t - std::f64::consts::PI / 8f64.sqrt()).abs() < 1e-12);
//! ```

// NaN inputs must fail range checks, so `!(x > 0.0)` is intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod coherence;
pub mod dynamics;
pub mod error;
pub mod interferometry;
pub mod operator;
pub mod optimize;
pub mod quadrature;
pub mod scenario;
pub mod tol;

pub use error::{QslError, Result};
