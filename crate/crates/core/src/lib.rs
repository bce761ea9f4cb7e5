//! Parity-deformed Jaynes–Cummings model.
//!
//! A two-level atom coupled to a single field mode whose ladder operators obey
//! the Wigner–Heisenberg algebra `[𝔞, 𝔞†] = 1 + 2λR̂`. The crate provides the
//! algebra and its cat states, the dressed spectrum, exact interaction-picture
//! dynamics for an initially excited atom, the usual nonclassicality
//! observables, and a dense-matrix oracle that checks the closed forms.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod dynamics;
mod error;
pub mod observables;
pub mod oracle;
pub mod scenario;
pub mod spectrum;

pub use error::{Error, Result};
