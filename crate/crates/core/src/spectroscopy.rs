//! Rate-equation model of probe-induced population transfer |1> -> F=2
//! versus two-photon detuning: the narrow EIT transparency window on top of
//! the saturated absorption line.
//!
//! The sample is discretized into transverse cells and propagation slices.
//! In every slice the local probe intensity is attenuated by the optical
//! depth of the *remaining* |1> population, atoms scatter at the local rate
//! given by the susceptibility lineshape, and each scattering event moves
//! the atom into the F=2 manifold with the decay branching ratio. A
//! detuning-independent pi-polarized leak channel pumps on its own
//! resonant two-level transition. Pumping into F=2 is one-way.

use crate::cloud::{column_density, AtomCloud, BRANCH_F2, PI_LEAK_LINE_STRENGTH};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::lambda::{lineshape_at, LambdaSystem};
use rayon::prelude::*;

/// Configuration for a transfer-lineshape simulation.
#[derive(Debug, Clone, Copy)]
pub struct SpectroscopyConfig {
    pub sys: LambdaSystem,
    pub cloud: AtomCloud,
    pub constants: PhysicalConstants,
    /// Probe pulse duration (s).
    pub probe_duration: f64,
    /// Transverse cells per side of the footprint grid (even, >= 8).
    pub transverse_cells: usize,
    /// Propagation slices along the probe axis (>= 8).
    pub propagation_slices: usize,
    /// Attenuation strength factor of the pi-leak transition; scales its
    /// optical depth the way `cloud.line_strength_factor` scales the probe's.
    pub pi_leak_line_strength: f64,
}

impl SpectroscopyConfig {
    pub fn new(
        sys: LambdaSystem,
        cloud: AtomCloud,
        constants: PhysicalConstants,
        probe_duration: f64,
    ) -> Result<Self> {
        let cfg = Self {
            sys,
            cloud,
            constants,
            probe_duration,
            transverse_cells: 64,
            propagation_slices: 32,
            pi_leak_line_strength: PI_LEAK_LINE_STRENGTH,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_grid(mut self, transverse_cells: usize, propagation_slices: usize) -> Result<Self> {
        self.transverse_cells = transverse_cells;
        self.propagation_slices = propagation_slices;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if !(self.probe_duration > 0.0) {
            return Err(Error::InvalidParameter(
                "probe duration must be positive".into(),
            ));
        }
        if self.transverse_cells < 8 || self.transverse_cells % 2 != 0 {
            return Err(Error::InvalidParameter(
                "transverse_cells must be even and >= 8".into(),
            ));
        }
        if self.propagation_slices < 8 {
            return Err(Error::InvalidParameter(
                "propagation_slices must be >= 8".into(),
            ));
        }
        Ok(())
    }
}

/// One point of the transfer lineshape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferPoint {
    /// Cloud-summed F=2 fraction N2/N after the probe pulse.
    pub f2_fraction: f64,
    /// Remaining F=1 fraction, accumulated independently for the
    /// conservation check.
    pub f1_fraction: f64,
    /// Set when the probe saturation parameter is outside the weak-probe
    /// regime the model assumes.
    pub out_of_regime: bool,
}

/// Transfer lineshape: detunings (rad/s) with F=2 fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct LineshapeScan {
    pub detunings: Vec<f64>,
    pub transfer_fractions: Vec<f64>,
}

impl LineshapeScan {
    pub fn new(detunings: Vec<f64>, transfer_fractions: Vec<f64>) -> Result<Self> {
        if detunings.len() != transfer_fractions.len() {
            return Err(Error::InvalidParameter(
                "detunings and fractions must have equal length".into(),
            ));
        }
        if transfer_fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(Error::InvalidParameter(
                "transfer fractions must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            detunings,
            transfer_fractions,
        })
    }
}

/// Transverse cell of the discretized footprint (one symmetry quadrant).
struct Cell {
    /// Statistical weight: column density times multiplicity.
    weight: f64,
    /// Per-slice optical depth of the sigma+ probe transition at unit
    /// |1> population.
    od_sigma: f64,
    /// Same for the pi-leak transition.
    od_pi: f64,
}

struct Model {
    cells: Vec<Cell>,
    slices: usize,
    /// Unattenuated sigma+ scattering rate at Im L = 1 (1/s).
    r_sigma: f64,
    /// Unattenuated resonant pi-leak scattering rate (1/s).
    r_pi: f64,
    im_l: f64,
    branch: f64,
    duration: f64,
}

impl Model {
    fn build(config: &SpectroscopyConfig, delta: f64) -> Self {
        let sys = &config.sys;
        let cloud = &config.cloud;
        // coupling laser resonant, probe scanned: delta_1p tracks delta
        let im_l = lineshape_at(sys, delta, delta).im;
        let gamma = 2.0 * sys.gamma_31;
        let r_sigma = sys.omega_p * sys.omega_p / gamma;
        let r_pi = sys.omega_p_pi * sys.omega_p_pi / gamma;

        let sigma0 = config.constants.resonant_cross_section();
        let n = config.transverse_cells;
        let ns = config.propagation_slices;
        let ry = cloud.radii[1];
        let rz = cloud.radii[2];
        let dy = 2.0 * ry / n as f64;
        let dz = 2.0 * rz / n as f64;

        // The configuration is transversely centered, so cells at
        // (+-y, +-z) evolve identically: evaluate one quadrant with
        // multiplicity 4. Cell centers of an even grid never sit on an axis.
        let mut cells = Vec::with_capacity(n * n / 4);
        for i in 0..n / 2 {
            let y = (i as f64 + 0.5) * dy;
            for j in 0..n / 2 {
                let z = (j as f64 + 0.5) * dz;
                let col = column_density(cloud, y, z);
                if col > 0.0 {
                    cells.push(Cell {
                        weight: 4.0 * col,
                        od_sigma: sigma0 * cloud.line_strength_factor * col / ns as f64,
                        od_pi: sigma0 * config.pi_leak_line_strength * col / ns as f64,
                    });
                }
            }
        }

        Self {
            cells,
            slices: ns,
            r_sigma,
            r_pi,
            im_l,
            branch: BRANCH_F2,
            duration: config.probe_duration,
        }
    }

    /// Time derivative of the per-slice |1> populations for one cell.
    /// The probe and leak intensities are attenuated front-to-back by the
    /// optical depth of the population still in |1>, evaluated midway
    /// through each slice.
    fn cell_rhs(&self, cell: &Cell, p1: &[f64], dp1: &mut [f64]) {
        let mut att_sigma = 0.0;
        let mut att_pi = 0.0;
        for j in 0..self.slices {
            let p = p1[j].max(0.0);
            let rate_sigma = self.r_sigma
                * self.im_l
                * (-(att_sigma + 0.5 * cell.od_sigma * p) * self.im_l).exp();
            let rate_pi = self.r_pi * (-(att_pi + 0.5 * cell.od_pi * p)).exp();
            dp1[j] = -self.branch * (rate_sigma + rate_pi) * p;
            att_sigma += cell.od_sigma * p;
            att_pi += cell.od_pi * p;
        }
    }

    /// Classic fourth-order Runge-Kutta over the whole population field.
    fn integrate(&self, n_steps: usize) -> (f64, f64) {
        let ns = self.slices;
        let dt = self.duration / n_steps as f64;

        let results: Vec<(f64, f64, f64)> = self
            .cells
            .par_iter()
            .map(|cell| {
                let mut p1 = vec![1.0_f64; ns];
                let mut k1 = vec![0.0; ns];
                let mut k2 = vec![0.0; ns];
                let mut k3 = vec![0.0; ns];
                let mut k4 = vec![0.0; ns];
                let mut tmp = vec![0.0; ns];
                for _ in 0..n_steps {
                    self.cell_rhs(cell, &p1, &mut k1);
                    for j in 0..ns {
                        tmp[j] = p1[j] + 0.5 * dt * k1[j];
                    }
                    self.cell_rhs(cell, &tmp, &mut k2);
                    for j in 0..ns {
                        tmp[j] = p1[j] + 0.5 * dt * k2[j];
                    }
                    self.cell_rhs(cell, &tmp, &mut k3);
                    for j in 0..ns {
                        tmp[j] = p1[j] + dt * k3[j];
                    }
                    self.cell_rhs(cell, &tmp, &mut k4);
                    for j in 0..ns {
                        p1[j] = (p1[j]
                            + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
                            .clamp(0.0, 1.0);
                    }
                }
                let remaining: f64 = p1.iter().sum::<f64>() / ns as f64;
                let transferred: f64 = p1.iter().map(|p| 1.0 - p).sum::<f64>() / ns as f64;
                (cell.weight, remaining, transferred)
            })
            .collect();

        // fixed-order reduction keeps the result bit-deterministic
        let mut w_total = 0.0;
        let mut f1 = 0.0;
        let mut f2 = 0.0;
        for (w, rem, tra) in results {
            w_total += w;
            f1 += w * rem;
            f2 += w * tra;
        }
        (f2 / w_total, f1 / w_total)
    }
}

const STEP_REFINEMENTS: u32 = 8;
const STEP_TOLERANCE: f64 = 1e-7;

/// Simulate the F=2 transfer fraction after the probe pulse at two-photon
/// detuning `delta` (rad/s). The coupling laser is resonant, so the
/// one-photon detuning tracks `delta`.
///
/// The time step is refined by doubling until the result is stable to
/// `1e-7`; failure to converge within the refinement bound is an error.
pub fn simulate_transfer(config: &SpectroscopyConfig, delta: f64) -> Result<TransferPoint> {
    let model = Model::build(config, delta);
    let gamma = 2.0 * config.sys.gamma_31;
    let saturation = 2.0 * config.sys.omega_p * config.sys.omega_p / (gamma * gamma);

    // initial step count from the fastest pumping rate present
    let kappa = model.branch * (model.r_sigma * model.im_l + model.r_pi);
    let mut n_steps = ((model.duration * kappa / 0.05).ceil() as usize).clamp(64, 1 << 20);

    let (mut f2, mut f1) = model.integrate(n_steps);
    for _ in 0..STEP_REFINEMENTS {
        n_steps *= 2;
        let (f2_fine, f1_fine) = model.integrate(n_steps);
        let change = (f2_fine - f2).abs();
        f2 = f2_fine;
        f1 = f1_fine;
        if change < STEP_TOLERANCE {
            return Ok(TransferPoint {
                f2_fraction: f2,
                f1_fraction: f1,
                out_of_regime: saturation > 0.1,
            });
        }
    }
    Err(Error::NonConvergent {
        refinements: STEP_REFINEMENTS,
        last_change: f2,
    })
}

/// Closed-form single-cell reference: no propagation, no attenuation.
/// With constant rates the |1> population decays exactly exponentially.
pub fn single_cell_transfer(sys: &LambdaSystem, duration: f64, delta: f64) -> f64 {
    let im_l = lineshape_at(sys, delta, delta).im;
    let gamma = 2.0 * sys.gamma_31;
    let r_sigma = sys.omega_p * sys.omega_p / gamma;
    let r_pi = sys.omega_p_pi * sys.omega_p_pi / gamma;
    1.0 - (-BRANCH_F2 * (r_sigma * im_l + r_pi) * duration).exp()
}

/// Map [`simulate_transfer`] over a detuning list; order preserving, points
/// evaluated independently.
pub fn scan_lineshape(config: &SpectroscopyConfig, detunings: &[f64]) -> Result<LineshapeScan> {
    let fractions = detunings
        .par_iter()
        .map(|&d| simulate_transfer(config, d).map(|p| p.f2_fraction))
        .collect::<Result<Vec<f64>>>()?;
    LineshapeScan::new(detunings.to_vec(), fractions)
}

/// Which lineshape feature to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feature {
    /// The transparency dip at the window center.
    Window,
    /// The absorption line envelope.
    Line,
}

/// Interpolated full width of a scan feature at half of its depth (window)
/// or height (line). Returns the width in the detuning unit of the scan.
pub fn extract_fwhm(scan: &LineshapeScan, feature: Feature) -> Result<f64> {
    let d = &scan.detunings;
    let v = &scan.transfer_fractions;
    if d.len() < 5 {
        return Err(Error::NoFeature(feature_name(feature)));
    }
    let span = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - v.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < 1e-12 {
        return Err(Error::NoFeature(feature_name(feature)));
    }

    match feature {
        Feature::Window => {
            let i_min = argmin(v);
            if i_min == 0 || i_min == v.len() - 1 {
                return Err(Error::NoFeature("window"));
            }
            let left_max = v[..i_min].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let right_max = v[i_min + 1..]
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let depth = left_max.min(right_max) - v[i_min];
            if depth < 0.05 * span {
                return Err(Error::NoFeature("window"));
            }
            let half = v[i_min] + 0.5 * depth;
            let left = crossing_outward(d, v, i_min, half, -1)?;
            let right = crossing_outward(d, v, i_min, half, 1)?;
            Ok(right - left)
        }
        Feature::Line => {
            let i_max = argmax(v);
            let baseline = v[0].min(v[v.len() - 1]);
            let height = v[i_max] - baseline;
            if height < 0.05 * span || i_max == 0 || i_max == v.len() - 1 {
                return Err(Error::NoFeature("line"));
            }
            let half = baseline + 0.5 * height;
            let left = crossing_outward_below(d, v, i_max, half, -1)?;
            let right = crossing_outward_below(d, v, i_max, half, 1)?;
            Ok(right - left)
        }
    }
}

fn feature_name(feature: Feature) -> &'static str {
    match feature {
        Feature::Window => "window",
        Feature::Line => "line",
    }
}

fn argmin(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap()
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap()
}

/// Walk outward from `start` until the values rise through `level`;
/// linearly interpolate the crossing detuning.
fn crossing_outward(d: &[f64], v: &[f64], start: usize, level: f64, dir: isize) -> Result<f64> {
    let mut i = start as isize;
    loop {
        let next = i + dir;
        if next < 0 || next as usize >= v.len() {
            return Err(Error::NoFeature("window"));
        }
        let (a, b) = (v[i as usize], v[next as usize]);
        if (a - level) * (b - level) <= 0.0 && a != b {
            let t = (level - a) / (b - a);
            return Ok(d[i as usize] + t * (d[next as usize] - d[i as usize]));
        }
        i = next;
    }
}

/// Same, walking outward until the values fall through `level`.
fn crossing_outward_below(
    d: &[f64],
    v: &[f64],
    start: usize,
    level: f64,
    dir: isize,
) -> Result<f64> {
    crossing_outward(d, v, start, level, dir).map_err(|_| Error::NoFeature("line"))
}
