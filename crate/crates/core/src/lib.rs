//! Simulation and analytic verification toolkit for the constant-differentials
//! Pólya process.
//!
//! The urn holds white and blue balls and evolves under the replacement matrix
//! `[[-a, -a], [a, a]]`: drawing a white ball removes `a` balls of each color,
//! drawing a blue ball adds `a` of each. The blue-minus-white difference
//! (the differential index `Δ`) never changes. In continuous time every ball
//! carries an independent `Exp(1)` clock.
//!
//! Modules:
//! - [`model`]: parameters, urn state, replacement dynamics and tenability.
//! - [`simulate`]: exact event-driven simulation of the poissonized urn.
//! - [`analytics`]: closed forms (MGF, moments, characteristics, gamma limit,
//!   martingale transform, L1 bound) and their numeric oracles.
//! - [`verify`]: Monte Carlo checks confronting simulation with the closed forms.
//! - [`export`]: CSV/JSON writers with frozen schemas.

pub mod analytics;
pub mod error;
pub mod export;
pub mod model;
pub mod simulate;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use model::{Color, ModelParams, ReplacementMatrix, UrnState};
pub use simulate::{EpochEvent, RandomSource, Trajectory};

/// Crate version embedded into every exported artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
