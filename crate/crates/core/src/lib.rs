//! Desk-scale simulation of electromagnetically induced transparency, light
//! storage and spin-wave manipulation in a unity-filled atomic lattice sample.
//!
//! The crate is organized around the experiment it models:
//!
//! - [`lambda`]: Lambda-system parameters, dark state, susceptibility.
//! - [`cloud`]: sample geometry, optical depth, beam overlap.
//! - [`spectroscopy`]: rate-equation transfer lineshape of the EIT window.
//! - [`storage`]: one-dimensional Maxwell-Bloch pulse storage and retrieval.
//! - [`deflection`]: spin-wave phase imprinting and angular redirection of
//!   the retrieved pulse.
//! - [`scenario`]/[`runner`]: configuration files, experiment dispatch and
//!   deterministic outputs for the CLI.
//!
//! Internal units are SI: rad/s for every frequency and decay rate, metres,
//! seconds. Conversion from human-readable quantities happens only at the
//! scenario boundary.

pub mod cloud;
pub mod constants;
pub mod error;
pub mod fit;
pub mod lambda;
pub mod spectroscopy;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use lambda::LambdaSystem;
