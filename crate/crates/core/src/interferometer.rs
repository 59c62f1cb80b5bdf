//! Rhombic matter-wave interferometer geometry and response.
//!
//! The instrument is described by the atom mass and velocity, the time of
//! flight along one rhomb side, the aperture angle, and the laser beam
//! parameters. Rotation signals dephase the two arms by `2 m A Omega / hbar`.
//! A stochastic strain series enters through the same channel after linear
//! filtering by the triangular exposure window `g` and differentiation: the
//! response to a unit strain sinusoid at angular frequency `w` has amplitude
//! `mu_at * tau_at^2 * w * g~[w]`, whose square is exactly the spectral
//! weight `4 mu_at^2 (1 - cos(w tau_at))^2 / w^2` used by the variance
//! integral in [`crate::dephasing`]. (Carrying the one-half of the filtered
//! rotation-rate definition into the response would shrink that weight by a
//! factor of four and break the white-noise closed form; the normalization
//! here is fixed by the variance integral.)

use thiserror::Error;

use crate::constants;
use crate::quantity::{Dim, DimensionError, PhysQuantity};

#[derive(Debug, Error)]
pub enum InstrumentError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("sin_alpha must lie in (0, 1], got {0}")]
    SinAlphaOutOfRange(f64),
    #[error("sample step must be positive, got {0} s")]
    NonPositiveStep(f64),
    #[error("series needs at least {needed} samples, got {len}")]
    SeriesTooShort { needed: usize, len: usize },
    #[error("sample times not uniform at index {index} (step {step}, expected {expected})")]
    NonUniformStep { index: usize, step: f64, expected: f64 },
    #[error("sample step {dt} s too coarse: must be <= tau_at/100 = {max} s")]
    StepTooCoarse { dt: f64, max: f64 },
}

/// Rhombic interferometer parameters.
#[derive(Clone, Copy, Debug)]
pub struct InstrumentConfig {
    m_at: PhysQuantity,
    v_at: PhysQuantity,
    tau_at: PhysQuantity,
    sin_alpha: f64,
    omega_laser: PhysQuantity,
    l_phot: PhysQuantity,
}

impl InstrumentConfig {
    pub fn new(
        m_at: PhysQuantity,
        v_at: PhysQuantity,
        tau_at: PhysQuantity,
        sin_alpha: f64,
        omega_laser: PhysQuantity,
        l_phot: PhysQuantity,
    ) -> Result<Self, InstrumentError> {
        let checks = [
            ("atom mass", m_at.expect_dim(Dim::MASS, "instrument atom mass")?),
            ("atom velocity", v_at.expect_dim(Dim::VELOCITY, "instrument atom velocity")?),
            ("arm time", tau_at.expect_dim(Dim::TIME, "instrument arm time")?),
            ("laser angular frequency", omega_laser.expect_dim(Dim::FREQUENCY, "laser frequency")?),
            ("photon path length", l_phot.expect_dim(Dim::LENGTH, "photon path")?),
        ];
        for (field, value) in checks {
            if !(value > 0.0) {
                return Err(InstrumentError::NonPositive { field, value });
            }
        }
        if !(sin_alpha > 0.0 && sin_alpha <= 1.0) {
            return Err(InstrumentError::SinAlphaOutOfRange(sin_alpha));
        }
        Ok(InstrumentConfig { m_at, v_at, tau_at, sin_alpha, omega_laser, l_phot })
    }

    pub fn atom_mass(&self) -> PhysQuantity {
        self.m_at
    }

    pub fn atom_velocity(&self) -> PhysQuantity {
        self.v_at
    }

    pub fn arm_time(&self) -> PhysQuantity {
        self.tau_at
    }

    pub fn sin_alpha(&self) -> f64 {
        self.sin_alpha
    }

    pub fn laser_angular_frequency(&self) -> PhysQuantity {
        self.omega_laser
    }

    pub fn photon_path(&self) -> PhysQuantity {
        self.l_phot
    }

    /// Enclosed area A = v^2 tau^2 sin(alpha).
    pub fn area(&self) -> PhysQuantity {
        self.v_at.powi(2) * self.tau_at.powi(2) * self.sin_alpha
    }

    /// Kinetic frequency scale mu_at = 2 m v^2 sin(alpha) / hbar.
    pub fn mu_at(&self) -> PhysQuantity {
        self.m_at * self.v_at.powi(2) * (2.0 * self.sin_alpha) / constants::reduced_planck_constant()
    }

    /// Photon channel frequency scale: the laser angular frequency.
    pub fn mu_phot(&self) -> PhysQuantity {
        self.omega_laser
    }

    /// Single-pass photon time of flight L/c.
    pub fn tau_phot(&self) -> PhysQuantity {
        self.l_phot / constants::speed_of_light()
    }

    pub fn filter(&self) -> ApparatusFilter {
        ApparatusFilter { tau_at: self.tau_at.value() }
    }
}

fn rotation_phase(cfg: &InstrumentConfig, rotation: PhysQuantity, context: &'static str) -> Result<f64, InstrumentError> {
    rotation.expect_dim(Dim::FREQUENCY, context)?;
    let phi = cfg.m_at * cfg.area() * rotation * 2.0 / constants::reduced_planck_constant();
    Ok(phi.as_dimensionless()?)
}

/// Sagnac dephasing 2 m A Omega / hbar; odd and linear in the rotation rate.
pub fn sagnac_phase(cfg: &InstrumentConfig, rotation: PhysQuantity) -> Result<f64, InstrumentError> {
    rotation_phase(cfg, rotation, "Sagnac rotation rate")
}

/// Lense-Thirring dephasing; same prefactor as the Sagnac phase with the
/// frame-dragging rate in place of the kinematic rotation rate.
pub fn lense_thirring_phase(cfg: &InstrumentConfig, rotation: PhysQuantity) -> Result<f64, InstrumentError> {
    rotation_phase(cfg, rotation, "Lense-Thirring rotation rate")
}

/// Triangular exposure window of the rhombic geometry: unit area, support
/// `|tau| < tau_at`, peak 1/tau_at at zero lag.
#[derive(Clone, Copy, Debug)]
pub struct ApparatusFilter {
    tau_at: f64,
}

impl ApparatusFilter {
    pub fn new(tau_at: PhysQuantity) -> Result<Self, InstrumentError> {
        let tau = tau_at.expect_dim(Dim::TIME, "filter arm time")?;
        if !(tau > 0.0) {
            return Err(InstrumentError::NonPositive { field: "arm time", value: tau });
        }
        Ok(ApparatusFilter { tau_at: tau })
    }

    pub fn arm_time(&self) -> PhysQuantity {
        PhysQuantity::seconds(self.tau_at)
    }

    /// g(tau) = (1 - |tau|/tau_at)/tau_at inside the support, 0 outside.
    pub fn time_weight(&self, lag: PhysQuantity) -> Result<PhysQuantity, InstrumentError> {
        let t = lag.expect_dim(Dim::TIME, "filter lag")?;
        Ok(PhysQuantity::per_second(self.time_weight_raw(t)))
    }

    pub(crate) fn time_weight_raw(&self, lag: f64) -> f64 {
        let x = lag.abs() / self.tau_at;
        if x >= 1.0 {
            0.0
        } else {
            (1.0 - x) / self.tau_at
        }
    }

    /// g~[omega] = sinc^2(omega tau_at / 2), normalized to 1 at zero frequency.
    pub fn frequency_transfer(&self, omega: PhysQuantity) -> Result<f64, InstrumentError> {
        let w = omega.expect_dim(Dim::FREQUENCY, "filter frequency")?;
        Ok(self.frequency_transfer_raw(w))
    }

    pub(crate) fn frequency_transfer_raw(&self, omega: f64) -> f64 {
        let s = sinc(0.5 * omega * self.tau_at);
        s * s
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Uniformly sampled strain record; times in seconds, samples dimensionless.
#[derive(Clone, Debug)]
pub struct StrainSeries {
    t0: f64,
    dt: f64,
    samples: Vec<f64>,
}

impl StrainSeries {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self, InstrumentError> {
        if !(dt > 0.0) {
            return Err(InstrumentError::NonPositiveStep(dt));
        }
        if samples.len() < 2 {
            return Err(InstrumentError::SeriesTooShort { needed: 2, len: samples.len() });
        }
        Ok(StrainSeries { t0, dt, samples })
    }

    /// Builds a series from explicit sample times, rejecting non-uniform
    /// spacing (relative tolerance 1e-6 on the first step).
    pub fn from_times(times: &[f64], samples: Vec<f64>) -> Result<Self, InstrumentError> {
        if times.len() != samples.len() || times.len() < 2 {
            return Err(InstrumentError::SeriesTooShort { needed: 2, len: times.len().min(samples.len()) });
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(InstrumentError::NonPositiveStep(dt));
        }
        for i in 2..times.len() {
            let step = times[i] - times[i - 1];
            if (step - dt).abs() > 1e-6 * dt {
                return Err(InstrumentError::NonUniformStep { index: i, step, expected: dt });
            }
        }
        Ok(StrainSeries { t0: times[0], dt, samples })
    }

    pub fn start_time(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

/// Stochastic dephasing accumulated between the two arms for one strain
/// record, evaluated at the series midpoint.
///
/// The filtered strain `(g * h)(t)` is formed by discrete convolution with
/// the triangular window and differentiated by second-order central
/// differences; the phase is `-(2 m A / hbar) d(g*h)/dt`. The step must
/// satisfy `dt <= tau_at/100` and the series must extend one filter
/// half-width plus one step on both sides of its midpoint.
pub fn two_arm_phase(cfg: &InstrumentConfig, series: &StrainSeries) -> Result<f64, InstrumentError> {
    let tau = cfg.tau_at.value();
    let dt = series.dt();
    let max_dt = tau / 100.0;
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(InstrumentError::StepTooCoarse { dt, max: max_dt });
    }
    let half_width = (tau / dt * (1.0 + 1e-12)).floor() as usize;
    let mid = (series.len() - 1) / 2;
    let needed = 2 * (half_width + 1) + 1;
    if mid < half_width + 1 || mid + half_width + 1 >= series.len() {
        return Err(InstrumentError::SeriesTooShort { needed, len: series.len() });
    }

    let filter = cfg.filter();
    let h = series.samples();
    // Trapezoid convolution over the window support; the window vanishes at
    // the support edge so the truncated partial cells are O(dt^2).
    let convolve_at = |i: usize| -> f64 {
        let mut acc = 0.0;
        for j in -(half_width as isize)..=(half_width as isize) {
            let weight = if j.unsigned_abs() == half_width { 0.5 } else { 1.0 };
            let g = filter.time_weight_raw(j as f64 * dt);
            acc += weight * g * h[(i as isize - j) as usize];
        }
        acc * dt
    };

    let forward = convolve_at(mid + 1);
    let backward = convolve_at(mid - 1);
    let derivative = (forward - backward) / (2.0 * dt);

    let prefactor = (cfg.m_at * cfg.area() * 2.0 / constants::reduced_planck_constant())
        .expect_dim(Dim::TIME, "two-arm prefactor")?;
    Ok(-prefactor * derivative)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    /// Calibrated test instrument (cesium, 0.2 m/s, 1 s arms, sin a = 0.043,
    /// Cs D2 laser, 1 m optical path); mirrors the shipped scenario defaults.
    fn test_config() -> InstrumentConfig {
        InstrumentConfig::new(
            PhysQuantity::kilograms(2.207e-25),
            PhysQuantity::meters_per_second(0.2),
            PhysQuantity::seconds(1.0),
            0.043,
            PhysQuantity::per_second(TWO_PI * 3.52e14),
            PhysQuantity::meters(1.0),
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            InstrumentConfig::new(
                PhysQuantity::kilograms(-1.0),
                PhysQuantity::meters_per_second(0.2),
                PhysQuantity::seconds(1.0),
                0.1,
                PhysQuantity::per_second(1.0),
                PhysQuantity::meters(1.0),
            ),
            Err(InstrumentError::NonPositive { field: "atom mass", .. })
        ));
        assert!(matches!(
            InstrumentConfig::new(
                PhysQuantity::kilograms(1e-25),
                PhysQuantity::meters_per_second(0.2),
                PhysQuantity::seconds(1.0),
                1.5,
                PhysQuantity::per_second(1.0),
                PhysQuantity::meters(1.0),
            ),
            Err(InstrumentError::SinAlphaOutOfRange(_))
        ));
        // Wrong dimension on the velocity slot.
        assert!(InstrumentConfig::new(
            PhysQuantity::kilograms(1e-25),
            PhysQuantity::seconds(0.2),
            PhysQuantity::seconds(1.0),
            0.1,
            PhysQuantity::per_second(1.0),
            PhysQuantity::meters(1.0),
        )
        .is_err());
    }

    #[test]
    fn derived_quantities() {
        let cfg = test_config();
        let area = cfg.area();
        assert_eq!(area.dim(), Dim::AREA);
        assert!(rel(area.value(), 0.04 * 0.043) < 1e-12);
        let mu = cfg.mu_at();
        assert_eq!(mu.dim(), Dim::FREQUENCY);
        assert!(rel(mu.value(), 7.199_197e6) < 1e-4);
        assert!(rel(cfg.tau_phot().value(), 3.335_641e-9) < 1e-6);
        assert_eq!(cfg.mu_phot(), cfg.laser_angular_frequency());
    }

    #[test]
    fn sagnac_examples() {
        let cfg = test_config();
        assert_eq!(sagnac_phase(&cfg, PhysQuantity::per_second(0.0)).unwrap(), 0.0);

        // mu_at tau_at^2 Omega with the calibrated numbers.
        let phi = sagnac_phase(&cfg, PhysQuantity::per_second(1e-6)).unwrap();
        assert!(rel(phi, 7.199_197) < 1e-4);

        // Doubling the mass doubles the phase at fixed rotation.
        let heavy = InstrumentConfig::new(
            cfg.atom_mass() * 2.0,
            cfg.atom_velocity(),
            cfg.arm_time(),
            cfg.sin_alpha(),
            cfg.laser_angular_frequency(),
            cfg.photon_path(),
        )
        .unwrap();
        let phi2 = sagnac_phase(&heavy, PhysQuantity::per_second(1e-6)).unwrap();
        assert!(rel(phi2, 2.0 * phi) < 1e-12);

        assert!(sagnac_phase(&cfg, PhysQuantity::seconds(1.0)).is_err());
    }

    #[test]
    fn sagnac_prefactor_independent_of_rotation() {
        let cfg = test_config();
        let reference = sagnac_phase(&cfg, PhysQuantity::per_second(1.0)).unwrap();
        for w in [-2.0e3, -1e-9, 1e-12, 3.7e-6, 0.5, 8.0e4] {
            let phi = sagnac_phase(&cfg, PhysQuantity::per_second(w)).unwrap();
            assert!(rel(phi / w, reference) < 1e-12, "prefactor drifts at {w}");
        }
    }

    #[test]
    fn lense_thirring_matches_sagnac_prefactor() {
        let cfg = test_config();
        for w in [-3e-7, 0.0, 1e-6, 5e-5] {
            let rot = PhysQuantity::per_second(w);
            assert_eq!(lense_thirring_phase(&cfg, rot).unwrap(), sagnac_phase(&cfg, rot).unwrap());
        }
        // Sign flips with the rotation sense.
        let plus = lense_thirring_phase(&cfg, PhysQuantity::per_second(2e-6)).unwrap();
        let minus = lense_thirring_phase(&cfg, PhysQuantity::per_second(-2e-6)).unwrap();
        assert_eq!(plus, -minus);
    }

    #[test]
    fn filter_shape() {
        let f = ApparatusFilter::new(PhysQuantity::seconds(0.7)).unwrap();
        let peak = f.time_weight(PhysQuantity::seconds(0.0)).unwrap();
        assert_eq!(peak.dim(), Dim::FREQUENCY);
        assert!(rel(peak.value(), 1.0 / 0.7) < 1e-15);
        assert_eq!(f.time_weight(PhysQuantity::seconds(0.7)).unwrap().value(), 0.0);
        assert_eq!(f.time_weight(PhysQuantity::seconds(-0.7)).unwrap().value(), 0.0);
        assert_eq!(f.time_weight(PhysQuantity::seconds(2.0)).unwrap().value(), 0.0);
        // Even in the lag.
        assert_eq!(
            f.time_weight(PhysQuantity::seconds(0.31)).unwrap().value(),
            f.time_weight(PhysQuantity::seconds(-0.31)).unwrap().value()
        );
    }

    #[test]
    fn filter_unit_area_by_trapezoid() {
        // Trapezoid oracle on [-tau, tau]; kinks sit on grid nodes.
        let tau = 1.3;
        let f = ApparatusFilter::new(PhysQuantity::seconds(tau)).unwrap();
        let n = 20_000usize;
        let dt = 2.0 * tau / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let t = -tau + i as f64 * dt;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * f.time_weight_raw(t);
        }
        acc *= dt;
        assert!((acc - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transfer_normalization_and_zero() {
        let f = ApparatusFilter::new(PhysQuantity::seconds(2.0)).unwrap();
        assert_eq!(f.frequency_transfer(PhysQuantity::per_second(0.0)).unwrap(), 1.0);
        let zero = f.frequency_transfer(PhysQuantity::per_second(TWO_PI / 2.0)).unwrap();
        assert!(zero < 1e-30);
        // Bounded by one away from zero frequency.
        for i in 1..400 {
            let w = 0.05 * i as f64;
            let g = f.frequency_transfer_raw(w);
            assert!(g <= 1.0);
            assert!(g < 1.0, "transfer not strictly below 1 at omega={w}");
        }
    }

    fn sine_series(amp: f64, omega: f64, dt: f64, len: usize, phase: f64) -> StrainSeries {
        let t0 = -0.5 * (len - 1) as f64 * dt;
        let samples = (0..len).map(|i| amp * (omega * (t0 + i as f64 * dt) + phase).sin()).collect();
        StrainSeries::new(t0, dt, samples).unwrap()
    }

    #[test]
    fn constant_strain_gives_zero_phase() {
        let cfg = test_config();
        let series = StrainSeries::new(0.0, 0.005, vec![3.7e-20; 501]).unwrap();
        let phi = two_arm_phase(&cfg, &series).unwrap();
        assert!(phi.abs() < 1e-30);
    }

    #[test]
    fn two_arm_phase_is_linear_in_strain() {
        let cfg = test_config();
        let dt = 1.0 / 400.0;
        let a = sine_series(1e-20, 3.0, dt, 2001, 0.3);
        let phi_a = two_arm_phase(&cfg, &a).unwrap();
        let scaled = StrainSeries::new(a.start_time(), dt, a.samples().iter().map(|x| 5.0 * x).collect()).unwrap();
        let phi_scaled = two_arm_phase(&cfg, &scaled).unwrap();
        assert!(rel(phi_scaled, 5.0 * phi_a) < 1e-12);
    }

    #[test]
    fn sinusoid_amplitude_matches_filtered_derivative() {
        // For h = eps sin(w t) the filtered derivative has amplitude
        // eps w g~[w], so the phase amplitude is mu tau^2 eps w g~[w].
        let cfg = test_config();
        let mu = cfg.mu_at().value();
        let tau = cfg.arm_time().value();
        let eps = 1e-21;
        for omega in [0.05, 0.4, 2.0] {
            let dt = tau / 4000.0;
            let len = 2 * (4000 + 2) + 1 + 4000; // comfortably longer than the window
            let s = sine_series(eps, omega, dt, len, 0.0);
            let c = sine_series(eps, omega, dt, len, std::f64::consts::FRAC_PI_2);
            let ps = two_arm_phase(&cfg, &s).unwrap();
            let pc = two_arm_phase(&cfg, &c).unwrap();
            let measured = (ps * ps + pc * pc).sqrt();
            let gt = cfg.filter().frequency_transfer_raw(omega);
            let expected = mu * tau * tau * eps * omega * gt;
            assert!(rel(measured, expected) < 1e-5, "omega={omega}: {measured} vs {expected}");
        }
    }

    #[test]
    fn series_contracts() {
        let cfg = test_config();
        // Step too coarse.
        let coarse = StrainSeries::new(0.0, 0.02, vec![0.0; 400]).unwrap();
        assert!(matches!(two_arm_phase(&cfg, &coarse), Err(InstrumentError::StepTooCoarse { .. })));
        // Too short for the window.
        let short = StrainSeries::new(0.0, 0.01, vec![0.0; 150]).unwrap();
        assert!(matches!(two_arm_phase(&cfg, &short), Err(InstrumentError::SeriesTooShort { .. })));
        // Non-uniform times rejected.
        let times = [0.0, 0.01, 0.025, 0.03];
        assert!(matches!(
            StrainSeries::from_times(&times, vec![0.0; 4]),
            Err(InstrumentError::NonUniformStep { index: 2, .. })
        ));
        let ok = StrainSeries::from_times(&[0.0, 0.01, 0.02], vec![1.0, 2.0, 3.0]).unwrap();
        assert!(rel(ok.dt(), 0.01) < 1e-12);
    }
}
