//! Numerical time-frequency analysis in one dimension: STFT and Gabor
//! frame representations of sampled signals, phase-space wave front
//! estimation from conic decay rates, and Weyl / localization operators.

pub mod cli;
pub mod config;
pub mod error;
pub mod gabor;
pub mod io;
pub mod operators;
pub mod grid;
pub mod symbols;
pub mod tf;
pub mod verify;
pub mod wavefront;

pub use error::{GaborError, Result};
