//! Unified scaling of the decoherence exponent and the quantum-classical
//! transition scan.
//!
//! Every system in this crate shares the half-variance
//! `variance/2 = mu^2 S_h tau` with `mu = 2 m v^2 sin(alpha)/hbar`.
//! Expressing the background through `S_h = Theta t_P^2` and the Planck time
//! through the Planck energy turns this into
//!
//! ```text
//! variance/2 = (2 m v^2 sin(alpha) / (m_P c^2))^2 Theta tau
//! ```
//!
//! so the kinetic energy of the probe in Planck-energy units controls the
//! decoherence budget. [`scaling_variance`] keeps this identity exact;
//! [`planck_ratio_form`] exposes the display form without the squared factor
//! of two, which is the same quantity up to that dropped order-unity factor.

use rayon::prelude::*;
use thiserror::Error;

use crate::constants;
use crate::interferometer::InstrumentConfig;
use crate::quantity::{Dim, DimensionError, PhysQuantity};

#[derive(Debug, Error)]
pub enum ScalingError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("sin_alpha must lie in (0, 1], got {0}")]
    SinAlphaOutOfRange(f64),
    #[error("scan grid must not be empty")]
    EmptyGrid,
}

/// Probe and background parameters for the scaling formula.
#[derive(Clone, Copy, Debug)]
pub struct ScalingInput {
    mass: PhysQuantity,
    velocity: PhysQuantity,
    sin_alpha: f64,
    exposure: PhysQuantity,
    theta_gr: PhysQuantity,
}

impl ScalingInput {
    pub fn new(
        mass: PhysQuantity,
        velocity: PhysQuantity,
        sin_alpha: f64,
        exposure: PhysQuantity,
        theta_gr: PhysQuantity,
    ) -> Result<Self, ScalingError> {
        // Zero mass is allowed: it is the trivial no-probe limit.
        let m = mass.expect_dim(Dim::MASS, "scaling input")?;
        if m < 0.0 {
            return Err(ScalingError::NonPositive { field: "mass", value: m });
        }
        for (field, q, dim) in [
            ("velocity", velocity, Dim::VELOCITY),
            ("exposure", exposure, Dim::TIME),
            ("theta", theta_gr, Dim::FREQUENCY),
        ] {
            let v = q.expect_dim(dim, "scaling input")?;
            if !(v > 0.0) {
                return Err(ScalingError::NonPositive { field, value: v });
            }
        }
        if !(sin_alpha > 0.0 && sin_alpha <= 1.0) {
            return Err(ScalingError::SinAlphaOutOfRange(sin_alpha));
        }
        Ok(ScalingInput { mass, velocity, sin_alpha, exposure, theta_gr })
    }

    /// Scaling input of an instrument in a background of temperature
    /// frequency `theta_gr`, exposed for one arm time.
    pub fn from_instrument(cfg: &InstrumentConfig, theta_gr: PhysQuantity) -> Result<Self, ScalingError> {
        ScalingInput::new(cfg.atom_mass(), cfg.atom_velocity(), cfg.sin_alpha(), cfg.arm_time(), theta_gr)
    }

    pub fn mass(&self) -> PhysQuantity {
        self.mass
    }

    pub fn velocity(&self) -> PhysQuantity {
        self.velocity
    }

    pub fn sin_alpha(&self) -> f64 {
        self.sin_alpha
    }

    pub fn exposure(&self) -> PhysQuantity {
        self.exposure
    }

    pub fn theta_gr(&self) -> PhysQuantity {
        self.theta_gr
    }

    fn with_mass_velocity(&self, mass: f64, velocity: f64) -> ScalingInput {
        ScalingInput {
            mass: PhysQuantity::kilograms(mass),
            velocity: PhysQuantity::meters_per_second(velocity),
            ..*self
        }
    }

    fn mu(&self) -> PhysQuantity {
        self.mass * self.velocity.powi(2) * (2.0 * self.sin_alpha)
            / constants::reduced_planck_constant()
    }
}

/// Half-variance `variance/2 = mu^2 S_h tau` with `S_h = Theta t_P^2`.
pub fn scaling_variance(input: &ScalingInput) -> Result<f64, ScalingError> {
    let s_h = input.theta_gr * constants::planck_time().powi(2);
    Ok((input.mu().powi(2) * s_h * input.exposure).as_dimensionless()?)
}

/// Display form `(m v^2 sin(alpha) / (m_P c^2))^2 Theta tau`: identical to
/// [`scaling_variance`] up to the dropped factor (2)^2 = 4.
pub fn planck_ratio_form(input: &ScalingInput) -> Result<f64, ScalingError> {
    let energy_ratio = input.mass * input.velocity.powi(2) * input.sin_alpha / constants::planck_energy();
    Ok((energy_ratio.powi(2) * input.theta_gr * input.exposure).as_dimensionless()?)
}

/// Mass/velocity grid for [`transition_scan`].
#[derive(Clone, Debug)]
pub struct ScanGrid {
    /// Masses in kg, ascending.
    pub masses: Vec<f64>,
    /// Velocities in m/s.
    pub velocities: Vec<f64>,
}

impl ScanGrid {
    pub fn logarithmic(
        mass_range: (PhysQuantity, PhysQuantity),
        n_masses: usize,
        velocity_range: (PhysQuantity, PhysQuantity),
        n_velocities: usize,
    ) -> Result<Self, ScalingError> {
        let m_lo = mass_range.0.expect_dim(Dim::MASS, "grid mass")?;
        let m_hi = mass_range.1.expect_dim(Dim::MASS, "grid mass")?;
        let v_lo = velocity_range.0.expect_dim(Dim::VELOCITY, "grid velocity")?;
        let v_hi = velocity_range.1.expect_dim(Dim::VELOCITY, "grid velocity")?;
        if n_masses == 0 || n_velocities == 0 {
            return Err(ScalingError::EmptyGrid);
        }
        for (field, value) in [("mass", m_lo), ("velocity", v_lo)] {
            if !(value > 0.0) {
                return Err(ScalingError::NonPositive { field, value });
            }
        }
        let log_space = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            if n == 1 {
                return vec![lo];
            }
            (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
        };
        Ok(ScanGrid {
            masses: log_space(m_lo, m_hi.max(m_lo), n_masses),
            velocities: log_space(v_lo, v_hi.max(v_lo), n_velocities),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanRow {
    pub mass: f64,
    pub velocity: f64,
    /// Full variance (twice the scaling half-variance).
    pub variance: f64,
    /// Marks the grid mass closest to the variance = 1 contour of its row.
    pub on_contour: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct ContourPoint {
    pub velocity: f64,
    /// Mass where the variance crosses 1, from bisection in log mass.
    pub mass: f64,
}

#[derive(Clone, Debug)]
pub struct TransitionScan {
    /// Rows ordered by velocity, then mass.
    pub rows: Vec<ScanRow>,
    pub contour: Vec<ContourPoint>,
}

/// Relative bisection tolerance on the contour mass.
const CONTOUR_REL_TOL: f64 = 1e-3;

/// Evaluates the variance over the grid and locates the variance = 1
/// contour along each constant-velocity row (the variance is strictly
/// increasing in mass).
pub fn transition_scan(template: &ScalingInput, grid: &ScanGrid) -> Result<TransitionScan, ScalingError> {
    if grid.masses.is_empty() || grid.velocities.is_empty() {
        return Err(ScalingError::EmptyGrid);
    }
    for (field, values) in [("mass", &grid.masses), ("velocity", &grid.velocities)] {
        if let Some(&bad) = values.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
            return Err(ScalingError::NonPositive { field, value: bad });
        }
    }

    let variance_at = |m: f64, v: f64| -> Result<f64, ScalingError> {
        Ok(2.0 * scaling_variance(&template.with_mass_velocity(m, v))?)
    };

    let row_results: Result<Vec<(Vec<ScanRow>, Option<ContourPoint>)>, ScalingError> = grid
        .velocities
        .par_iter()
        .map(|&v| {
            let mut rows: Vec<ScanRow> = grid
                .masses
                .iter()
                .map(|&m| {
                    Ok(ScanRow { mass: m, velocity: v, variance: variance_at(m, v)?, on_contour: false })
                })
                .collect::<Result<_, ScalingError>>()?;

            let first = rows.first().expect("non-empty row");
            let last = rows.last().expect("non-empty row");
            let contour = if first.variance <= 1.0 && last.variance >= 1.0 {
                let (mut lo, mut hi) = (first.mass, last.mass);
                while hi / lo - 1.0 > CONTOUR_REL_TOL {
                    let mid = (lo * hi).sqrt();
                    if variance_at(mid, v)? >= 1.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let m_star = (lo * hi).sqrt();
                let nearest = rows
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| {
                        let da = (a.mass / m_star).ln().abs();
                        let db = (b.mass / m_star).ln().abs();
                        da.partial_cmp(&db).unwrap()
                    })
                    .map(|(i, _)| i)
                    .expect("non-empty row");
                rows[nearest].on_contour = true;
                Some(ContourPoint { velocity: v, mass: m_star })
            } else {
                None
            };
            Ok((rows, contour))
        })
        .collect();

    let mut rows = Vec::with_capacity(grid.velocities.len() * grid.masses.len());
    let mut contour = Vec::new();
    for (row, point) in row_results? {
        rows.extend(row);
        contour.extend(point);
    }
    Ok(TransitionScan { rows, contour })
}
