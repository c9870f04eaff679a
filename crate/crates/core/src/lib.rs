//! Numerical verification of k-quasi n-power posinormal operators.
//!
//! Operators are dense complex matrices. The crate decides class membership,
//! computes minimal feasibility constants, checks the structural closure
//! properties of the class and builds weighted conditional type operators on
//! finite measure spaces.

pub mod cli;
pub mod condexp;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod par;
pub mod posinormal;
pub mod random;
pub mod structure;
pub mod suites;
pub mod verify;

pub use error::{Error, Result};
