//! Numerical tools for the SIC representation of quantum states.
//!
//! A SIC (symmetric informationally complete measurement) turns every
//! density operator on `C^d` into a probability vector on `d²` outcomes.
//! This crate builds SICs and quasi-SICs, converts between operators and
//! probability vectors, evaluates the Born rule in that representation,
//! and checks the convex geometry and symmetry of the resulting state
//! spaces (qplexes).
//!
//! Modules follow the dependency order
//! [`linalg`] → [`sic`] → [`rep`] → [`geometry`] → [`symmetry`] → [`germlab`].

pub mod error;
pub mod geometry;
pub mod germlab;
pub mod linalg;
mod optimize;
pub mod rep;
pub mod sic;
pub mod symmetry;
pub mod tol;

pub use error::{QplexError, Result};
