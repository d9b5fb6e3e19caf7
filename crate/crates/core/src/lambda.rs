//! Three-level Lambda-system parameterization, dark-state construction and
//! the analytic EIT susceptibility lineshape.
//!
//! Rabi-frequency convention: Omega is defined so that the coupling term in
//! the optical Bloch equations is Omega/2. Every module in this crate shares
//! that convention (see the cross-module consistency tests).

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Parameters of the Lambda system: two ground states |1>, |2> coupled to
/// one excited state |3> by probe and coupling fields.
///
/// All quantities are angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSystem {
    /// Coupling Rabi frequency on |2> <-> |3>.
    pub omega_c: f64,
    /// Probe Rabi frequency on |1> <-> |3>.
    pub omega_p: f64,
    /// Rabi frequency of the pi-polarized probe leakage driving |1> out of
    /// the Lambda system.
    pub omega_p_pi: f64,
    /// Two-photon detuning delta = omega_p - omega_c - omega_21.
    pub delta: f64,
    /// One-photon probe detuning.
    pub delta_1p: f64,
    /// Optical coherence decay rate (default Gamma/2).
    pub gamma_31: f64,
    /// Ground-state coherence decay rate.
    pub gamma_21: f64,
}

impl LambdaSystem {
    pub fn new(omega_c: f64, omega_p: f64, gamma_31: f64, gamma_21: f64) -> Result<Self> {
        let sys = Self {
            omega_c,
            omega_p,
            omega_p_pi: 0.0,
            delta: 0.0,
            delta_1p: 0.0,
            gamma_31,
            gamma_21,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_pi_leak(mut self, omega_p_pi: f64) -> Result<Self> {
        self.omega_p_pi = omega_p_pi;
        self.validate()?;
        Ok(self)
    }

    pub fn with_detunings(mut self, delta: f64, delta_1p: f64) -> Self {
        self.delta = delta;
        self.delta_1p = delta_1p;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.omega_c < 0.0 || self.omega_p < 0.0 {
            return Err(Error::InvalidParameter(
                "Rabi frequencies must be non-negative".into(),
            ));
        }
        if !(self.gamma_31 > 0.0) {
            return Err(Error::InvalidParameter("gamma_31 must be positive".into()));
        }
        if self.gamma_21 < 0.0 {
            return Err(Error::InvalidParameter(
                "gamma_21 must be non-negative".into(),
            ));
        }
        if self.omega_p_pi > self.omega_p {
            return Err(Error::InvalidParameter(
                "pi-leak Rabi frequency cannot exceed the probe Rabi frequency".into(),
            ));
        }
        Ok(())
    }
}

/// Dark state |D> = (Omega_c |1> - Omega_p e^{i (k_c - k_p) . r} |2>) / N
/// sampled on a set of positions.
#[derive(Debug, Clone)]
pub struct DarkState {
    /// Amplitude on |1>; position independent.
    pub amp_1: Complex64,
    /// Amplitude on |2> per position, carrying the wavevector-difference phase.
    pub amp_2_field: Vec<Complex64>,
}

impl DarkState {
    /// Largest deviation of the pointwise norm from 1.
    pub fn normalization_defect(&self) -> f64 {
        self.amp_2_field
            .iter()
            .map(|a2| (self.amp_1.norm_sqr() + a2.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Construct the dark state for given Rabi frequencies and beam wavevectors
/// at each position (m).
pub fn dark_state(
    omega_c: f64,
    omega_p: f64,
    k_c: [f64; 3],
    k_p: [f64; 3],
    positions: &[[f64; 3]],
) -> Result<DarkState> {
    if omega_c < 0.0 || omega_p < 0.0 {
        return Err(Error::InvalidParameter(
            "Rabi frequencies must be non-negative".into(),
        ));
    }
    if omega_c == 0.0 && omega_p == 0.0 {
        return Err(Error::DegenerateDarkState);
    }
    let norm = (omega_c * omega_c + omega_p * omega_p).sqrt();
    let amp_1 = Complex64::new(omega_c / norm, 0.0);
    let dk = [k_c[0] - k_p[0], k_c[1] - k_p[1], k_c[2] - k_p[2]];
    let amp_2_field = positions
        .iter()
        .map(|&r| {
            let phase = dot3(dk, r);
            -Complex64::from_polar(omega_p / norm, phase)
        })
        .collect();
    Ok(DarkState { amp_1, amp_2_field })
}

/// Unit-normalized linear susceptibility lineshape of the Lambda system.
///
/// L = i gamma_31 (gamma_21 - i delta)
///     / [(gamma_21 - i delta)(gamma_31 - i delta_1p) + Omega_c^2 / 4]
///
/// scaled so that the resonant two-level value (Omega_c = 0, delta_1p = 0)
/// of Im L is exactly 1. Im L is the absorption profile; the absolute
/// prefactor (density, dipole moment) lives in the cloud module as optical
/// depth.
pub fn susceptibility_lineshape(sys: &LambdaSystem) -> Complex64 {
    lineshape_at(sys, sys.delta, sys.delta_1p)
}

/// Same as [`susceptibility_lineshape`] with explicit detunings, for scans.
pub fn lineshape_at(sys: &LambdaSystem, delta: f64, delta_1p: f64) -> Complex64 {
    debug_assert!(sys.gamma_31 > 0.0);
    let b = Complex64::new(sys.gamma_31, -delta_1p);
    if sys.omega_c == 0.0 {
        // Two-level reduction; avoids the removable 0/0 at
        // gamma_21 = delta = 0.
        return Complex64::new(0.0, sys.gamma_31) / b;
    }
    let a = Complex64::new(sys.gamma_21, -delta);
    Complex64::new(0.0, sys.gamma_31) * a / (a * b + sys.omega_c * sys.omega_c / 4.0)
}

/// Photon-scattering rate with an out-of-regime flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringRate {
    /// Scattering rate (rad/s equivalent, i.e. events per second).
    pub rate: f64,
    /// Set when the saturation parameter exceeds the weak-probe regime.
    pub out_of_regime: bool,
}

/// Weak-probe photon-scattering rate from the probe field.
///
/// `saturation` is s = 2 Omega_p^2 / Gamma^2 with Gamma = 2 gamma_31; the
/// rate is (Gamma/2) s Im L, which reduces to the textbook two-level
/// steady-state rate for Omega_c = 0 on resonance.
pub fn scattering_rate(sys: &LambdaSystem, saturation: f64) -> Result<ScatteringRate> {
    if saturation < 0.0 {
        return Err(Error::InvalidParameter(
            "saturation parameter must be non-negative".into(),
        ));
    }
    let im_l = susceptibility_lineshape(sys).im;
    Ok(ScatteringRate {
        rate: sys.gamma_31 * saturation * im_l,
        out_of_regime: saturation > 0.1,
    })
}
