//! Post-processing toolkit for monitoring diving footage.
//!
//! A detector turns video into per-frame probabilities that a dive starts,
//! is in progress, or ends. This crate takes it from there:
//!
//! * [`signal`] smooths the probabilities with a Hann window,
//! * [`temporal`] extracts dive intervals from the smoothed signals,
//! * [`segmask`] turns hot-spot masks into location candidates,
//! * [`trajectory`] fits a projectile model to the candidates with MSAC,
//! * [`clip`] plans fixed-size crops and downsampling for a classifier,
//! * [`divecode`] parses dive codes such as `201B`,
//! * [`eval`] scores predictions against labels.
//!
//! [`simulator`] generates scenes with exact ground truth for testing, and
//! [`loss`] holds the class-balanced cross-entropy used to train detectors.

pub mod clip;
pub mod divecode;
pub mod error;
pub mod eval;
pub mod io;
pub mod loss;
pub mod rng;
pub mod segmask;
pub mod signal;
pub mod simulator;
pub mod temporal;
pub mod trajectory;

pub use error::{Error, Result};
