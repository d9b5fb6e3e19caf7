//! Physical constants for the Rb-87 D1 probe transition.
//!
//! All angular frequencies are in rad/s, lengths in metres, times in seconds.

use crate::error::{Error, Result};
use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Immutable set of physical constants used across the models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Probe wavelength (m).
    pub probe_wavelength: f64,
    /// Natural linewidth of the excited state, angular frequency (rad/s).
    pub natural_linewidth: f64,
    /// Ground-state hyperfine splitting, angular frequency (rad/s).
    pub ground_splitting: f64,
    /// Speed of light (m/s).
    pub speed_of_light: f64,
    /// Reduced Planck constant (J s).
    pub reduced_planck: f64,
}

impl PhysicalConstants {
    pub fn new(
        probe_wavelength: f64,
        natural_linewidth: f64,
        ground_splitting: f64,
    ) -> Result<Self> {
        let c = Self {
            probe_wavelength,
            natural_linewidth,
            ground_splitting,
            speed_of_light: 299_792_458.0,
            reduced_planck: 1.054_571_817e-34,
        };
        if !(c.probe_wavelength > 0.0 && c.natural_linewidth > 0.0 && c.ground_splitting > 0.0) {
            return Err(Error::InvalidParameter(
                "physical constants must be strictly positive".into(),
            ));
        }
        Ok(c)
    }

    /// Rb-87 D1 line (5S1/2 -> 5P1/2).
    pub fn rb87_d1() -> Self {
        Self {
            probe_wavelength: 794.98e-9,
            natural_linewidth: TWO_PI * 5.75e6,
            ground_splitting: TWO_PI * 6.834e9,
            speed_of_light: 299_792_458.0,
            reduced_planck: 1.054_571_817e-34,
        }
    }

    /// Probe wavevector k = 2 pi / lambda (rad/m).
    pub fn probe_wavevector(&self) -> f64 {
        TWO_PI / self.probe_wavelength
    }

    /// Resonant cross section of a fully closed two-level transition,
    /// sigma_0 = 3 lambda^2 / (2 pi). Weaker lines scale by their
    /// relative strength factor.
    pub fn resonant_cross_section(&self) -> f64 {
        3.0 * self.probe_wavelength * self.probe_wavelength / TWO_PI
    }

    /// Radiative half-linewidth Gamma/2, the default optical coherence decay.
    pub fn radiative_gamma31(&self) -> f64 {
        self.natural_linewidth / 2.0
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::rb87_d1()
    }
}
