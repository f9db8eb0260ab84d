//! Simulation and analysis of random access codes for Boolean functions:
//! classical, quantum, entanglement-assisted and nonlocal-box protocols,
//! with exact and Monte Carlo bias measurement against Fourier-analytic
//! bounds.

pub mod boolfn;
pub mod bounds;
pub mod codes;
pub mod error;
pub mod frac;
pub mod prbox;
pub mod quantum;

pub use error::{Error, Result};
