//! Scheduling schemes and multiplexing-gain (MG) region bounds for
//! interference networks that carry both delay-sensitive (URLLC) and
//! delay-tolerant (eMBB) traffic under random user activity.
//!
//! The crate is organised bottom-up:
//!
//! * [`netmodel`] builds the Wyner line and the hexagonal torus.
//! * [`traffic`] samples activity patterns and evaluates subnet laws.
//! * [`scheduler`] turns a realization into a phased schedule and tallies it.
//! * [`analytic`] evaluates closed-form bounds and the summation identities.
//! * [`montecarlo`] averages scheduler tallies over many sampled networks.
//! * [`region`] turns constraint sets into polygons and compares them.

pub mod analytic;
pub mod error;
pub mod montecarlo;
pub mod netmodel;
pub mod region;
pub mod scheduler;
pub mod traffic;

pub use error::{Error, Result};
