//! Gravitational decoherence of macroscopic orbital motion.
//!
//! A circular two-body orbit radiates quadrupole waves at the damping rate
//! `Gamma = 32 G m a^2 / (5 c^5)` and, bathed in a stochastic background of
//! noise temperature `T` evaluated at twice the orbital frequency, undergoes
//! momentum diffusion with coefficient `D = m Gamma k_B T`. Two neighbouring
//! motions separated by `dx` along the orbit decohere with variance
//! `2 D dx^2 tau / hbar^2`.
//!
//! The same physics can be phrased as an equivalent interferometer with
//! `mu = 2 m v^2 sin(alpha)/hbar`, `sin(alpha) = dx/(2 rho)`, giving
//! `mu^2 S_h 2 tau`. Composing the exact diffusion formulas yields
//! `D = 2 m^2 a^2 S_h`, so the diffusion route exceeds the equivalent
//! interferometer route by exactly a factor of two. The diffusion route is
//! the primary result here; [`route_ratio`] exposes the constant rather than
//! absorbing it.

use thiserror::Error;

use crate::background::{self, SpectrumError, StrainSpectrum};
use crate::constants;
use crate::quantity::{Dim, DimensionError, PhysQuantity};

#[derive(Debug, Error)]
pub enum OrbitError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("{field} must be positive, got {value}")]
    NonPositive { field: &'static str, value: f64 },
    #[error("{field} must be nonnegative, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("separation {dx} m exceeds the orbit diameter {diameter} m")]
    SeparationTooLarge { dx: f64, diameter: f64 },
}

/// Two-body circular orbit.
#[derive(Clone, Copy, Debug)]
pub struct OrbitConfig {
    m_a: PhysQuantity,
    m_b: PhysQuantity,
    radius: PhysQuantity,
}

impl OrbitConfig {
    pub fn new(m_a: PhysQuantity, m_b: PhysQuantity, radius: PhysQuantity) -> Result<Self, OrbitError> {
        for (field, q, dim) in [
            ("primary mass", m_a, Dim::MASS),
            ("secondary mass", m_b, Dim::MASS),
            ("orbital radius", radius, Dim::LENGTH),
        ] {
            let v = q.expect_dim(dim, "orbit configuration")?;
            if !(v > 0.0) {
                return Err(OrbitError::NonPositive { field, value: v });
            }
        }
        Ok(OrbitConfig { m_a, m_b, radius })
    }

    pub fn primary_mass(&self) -> PhysQuantity {
        self.m_a
    }

    pub fn secondary_mass(&self) -> PhysQuantity {
        self.m_b
    }

    pub fn radius(&self) -> PhysQuantity {
        self.radius
    }

    pub fn total_mass(&self) -> PhysQuantity {
        self.m_a.try_add(self.m_b).expect("both masses")
    }

    pub fn reduced_mass(&self) -> PhysQuantity {
        self.m_a * self.m_b / self.total_mass()
    }
}

/// Orbit parameters fixed by the masses and the radius.
#[derive(Clone, Copy, Debug)]
pub struct KeplerParams {
    /// Orbital angular frequency sqrt(G M / rho^3).
    pub orbital_frequency: PhysQuantity,
    /// Tangential velocity rho * Omega.
    pub velocity: PhysQuantity,
    /// Normal acceleration rho * Omega^2 = v^2 / rho.
    pub acceleration: PhysQuantity,
}

pub fn kepler_derive(orbit: &OrbitConfig) -> KeplerParams {
    let omega2 = constants::gravitational_constant() * orbit.total_mass() / orbit.radius().powi(3);
    let omega = omega2.sqrt().expect("G M / rho^3 has even exponents");
    let velocity = orbit.radius() * omega;
    KeplerParams {
        orbital_frequency: omega,
        velocity,
        acceleration: velocity.powi(2) / orbit.radius(),
    }
}

/// Quadrupole-emission damping rate 32 G m a^2 / (5 c^5).
pub fn damping_rate(orbit: &OrbitConfig) -> PhysQuantity {
    let a = kepler_derive(orbit).acceleration;
    constants::gravitational_constant() * orbit.reduced_mass() * a.powi(2) * (32.0 / 5.0)
        / constants::speed_of_light().powi(5)
}

/// Momentum diffusion of the orbit in a stochastic background.
#[derive(Clone, Copy, Debug)]
pub struct DiffusionResult {
    pub gamma_gr: PhysQuantity,
    /// D = m Gamma k_B T (kg^2 m^2 / s^3).
    pub d_gr: PhysQuantity,
    /// 2 D / hbar^2 (1 / (m^2 s)): decoherence variance per dx^2 per time.
    pub variance_rate_per_dx2: PhysQuantity,
    /// Noise temperature of the background at the evaluation frequency.
    pub noise_temperature: PhysQuantity,
    /// Evaluation frequency 2 Omega.
    pub evaluation_frequency: PhysQuantity,
}

/// Evaluates the diffusion coefficient with the noise temperature taken
/// strictly at twice the orbital frequency; out-of-band is an error.
pub fn diffusion_coefficient(
    orbit: &OrbitConfig,
    spec: &StrainSpectrum,
) -> Result<DiffusionResult, OrbitError> {
    let kepler = kepler_derive(orbit);
    let eval_frequency = kepler.orbital_frequency * 2.0;
    let s_h = spec.evaluate(eval_frequency)?;
    let noise_temperature = background::to_noise_temperature(s_h)?;
    let gamma = damping_rate(orbit);
    let d = orbit.reduced_mass() * gamma * constants::boltzmann_constant() * noise_temperature;
    let rate = d * 2.0 / constants::reduced_planck_constant().powi(2);
    Ok(DiffusionResult {
        gamma_gr: gamma,
        d_gr: d,
        variance_rate_per_dx2: rate,
        noise_temperature,
        evaluation_frequency: eval_frequency,
    })
}

/// Decoherence variance and factor for two motions separated by `dx` after
/// exposure `tau`.
#[derive(Clone, Copy, Debug)]
pub struct DecoherenceResult {
    /// 2 D dx^2 tau / hbar^2.
    pub variance: f64,
    /// exp(-variance/2).
    pub decoherence_factor: f64,
}

pub fn decoherence_variance(
    orbit: &OrbitConfig,
    spec: &StrainSpectrum,
    dx: PhysQuantity,
    tau: PhysQuantity,
) -> Result<DecoherenceResult, OrbitError> {
    let dxv = dx.expect_dim(Dim::LENGTH, "separation")?;
    if dxv < 0.0 {
        return Err(OrbitError::Negative { field: "separation", value: dxv });
    }
    let tauv = tau.expect_dim(Dim::TIME, "exposure time")?;
    if tauv < 0.0 {
        return Err(OrbitError::Negative { field: "exposure time", value: tauv });
    }
    let diffusion = diffusion_coefficient(orbit, spec)?;
    let variance = (diffusion.variance_rate_per_dx2 * dx.powi(2) * tau).as_dimensionless()?;
    Ok(DecoherenceResult { variance, decoherence_factor: (-0.5 * variance).exp() })
}

/// Exposure time at which the decoherence variance reaches one:
/// tau = hbar^2 / (2 D dx^2).
pub fn decoherence_time(
    orbit: &OrbitConfig,
    spec: &StrainSpectrum,
    dx: PhysQuantity,
) -> Result<PhysQuantity, OrbitError> {
    let dxv = dx.expect_dim(Dim::LENGTH, "separation")?;
    if !(dxv > 0.0) {
        return Err(OrbitError::NonPositive { field: "separation", value: dxv });
    }
    let diffusion = diffusion_coefficient(orbit, spec)?;
    Ok((diffusion.variance_rate_per_dx2 * dx.powi(2)).recip())
}

/// Momentum spread after exposure tau: dp^2 = 2 D tau.
pub fn momentum_spread(diffusion: &DiffusionResult, tau: PhysQuantity) -> Result<PhysQuantity, OrbitError> {
    let tauv = tau.expect_dim(Dim::TIME, "exposure time")?;
    if tauv < 0.0 {
        return Err(OrbitError::Negative { field: "exposure time", value: tauv });
    }
    Ok(diffusion.d_gr * 2.0 * tau)
}

/// The orbit superposition rephrased as an interferometer.
#[derive(Clone, Copy, Debug)]
pub struct EquivalentInterferometer {
    /// mu = 2 m v^2 sin(alpha) / hbar.
    pub mu: PhysQuantity,
    /// sin(alpha) = dx / (2 rho).
    pub sin_alpha: f64,
}

pub fn equivalent_interferometer(
    orbit: &OrbitConfig,
    dx: PhysQuantity,
) -> Result<EquivalentInterferometer, OrbitError> {
    let dxv = dx.expect_dim(Dim::LENGTH, "separation")?;
    if dxv < 0.0 {
        return Err(OrbitError::Negative { field: "separation", value: dxv });
    }
    let diameter = 2.0 * orbit.radius().value();
    if dxv > diameter {
        return Err(OrbitError::SeparationTooLarge { dx: dxv, diameter });
    }
    let sin_alpha = dxv / diameter;
    let v = kepler_derive(orbit).velocity;
    let mu = orbit.reduced_mass() * v.powi(2) * (2.0 * sin_alpha) / constants::reduced_planck_constant();
    Ok(EquivalentInterferometer { mu, sin_alpha })
}

/// Constant ratio between the diffusion-route variance and the equivalent
/// interferometer variance `mu^2 S_h 2 tau`. The exact composition gives 2;
/// the displayed formulas drop it as an order-unity term.
pub fn route_ratio(
    orbit: &OrbitConfig,
    spec: &StrainSpectrum,
    dx: PhysQuantity,
    tau: PhysQuantity,
) -> Result<f64, OrbitError> {
    let d_route = decoherence_variance(orbit, spec, dx, tau)?.variance;
    let equivalent = equivalent_interferometer(orbit, dx)?;
    let kepler = kepler_derive(orbit);
    let s_h = spec.evaluate(kepler.orbital_frequency * 2.0)?;
    let mu_route = (equivalent.mu.powi(2) * s_h * tau * 2.0).as_dimensionless()?;
    Ok(d_route / mu_route)
}

/// Damping rates and noise temperatures of the non-gravitational channels,
/// user inputs with literature-scale defaults.
#[derive(Clone, Copy, Debug)]
pub struct ExternalChannels {
    pub gamma_em: PhysQuantity,
    pub gamma_tides: PhysQuantity,
    pub t_em: PhysQuantity,
    pub t_tides: PhysQuantity,
}

impl ExternalChannels {
    /// Earth-Moon defaults: tidal damping on the ~1e18 s timescale of the
    /// lunar recession, radiation-pressure damping two orders slower, and
    /// thermodynamic-scale temperatures (solar photosphere, tidal
    /// dissipation). These reproduce the quoted channel ratios
    /// Gamma_gr/Gamma_tides ~ 1e-16 and T_gr/T_tides ~ 1e38.
    pub fn moon_defaults() -> Self {
        ExternalChannels {
            gamma_em: PhysQuantity::per_second(1e-20),
            gamma_tides: PhysQuantity::per_second(1e-18),
            t_em: PhysQuantity::kelvins(6000.0),
            t_tides: PhysQuantity::kelvins(1000.0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Channel {
    pub name: &'static str,
    pub damping_rate: PhysQuantity,
    pub noise_temperature: PhysQuantity,
    /// D = m Gamma k_B T.
    pub diffusion: PhysQuantity,
}

/// Damping and diffusion across the three decoherence channels.
#[derive(Clone, Debug)]
pub struct ChannelComparison {
    /// Channels in fixed order: gravitational, electromagnetic, tidal.
    pub channels: Vec<Channel>,
    /// Channel names sorted by descending damping rate.
    pub damping_order: Vec<&'static str>,
    /// Channel names sorted by descending diffusion coefficient.
    pub diffusion_order: Vec<&'static str>,
    pub gamma_gr_over_tides: f64,
    pub t_gr_over_tides: f64,
    pub d_gr_over_tides: f64,
    pub d_gr_over_em: f64,
}

pub fn channel_comparison(
    reduced_mass: PhysQuantity,
    gamma_gr: PhysQuantity,
    t_gr: PhysQuantity,
    external: &ExternalChannels,
) -> Result<ChannelComparison, OrbitError> {
    let m = reduced_mass.expect_dim(Dim::MASS, "reduced mass")?;
    if !(m > 0.0) {
        return Err(OrbitError::NonPositive { field: "reduced mass", value: m });
    }
    let mut channels = Vec::new();
    for (name, gamma, t) in [
        ("gravitational", gamma_gr, t_gr),
        ("electromagnetic", external.gamma_em, external.t_em),
        ("tidal", external.gamma_tides, external.t_tides),
    ] {
        let g = gamma.expect_dim(Dim::FREQUENCY, "channel damping rate")?;
        if g < 0.0 {
            return Err(OrbitError::Negative { field: "channel damping rate", value: g });
        }
        let tv = t.expect_dim(Dim::TEMPERATURE, "channel temperature")?;
        if tv < 0.0 {
            return Err(OrbitError::Negative { field: "channel temperature", value: tv });
        }
        channels.push(Channel {
            name,
            damping_rate: gamma,
            noise_temperature: t,
            diffusion: reduced_mass * gamma * constants::boltzmann_constant() * t,
        });
    }

    let sorted_by = |key: fn(&Channel) -> f64| {
        let mut order: Vec<&Channel> = channels.iter().collect();
        order.sort_by(|a, b| key(b).partial_cmp(&key(a)).unwrap());
        order.into_iter().map(|c| c.name).collect::<Vec<_>>()
    };
    let damping_order = sorted_by(|c| c.damping_rate.value());
    let diffusion_order = sorted_by(|c| c.diffusion.value());

    let ratio = |a: PhysQuantity, b: PhysQuantity| (a / b).as_dimensionless();
    Ok(ChannelComparison {
        gamma_gr_over_tides: ratio(channels[0].damping_rate, channels[2].damping_rate)?,
        t_gr_over_tides: ratio(channels[0].noise_temperature, channels[2].noise_temperature)?,
        d_gr_over_tides: ratio(channels[0].diffusion, channels[2].diffusion)?,
        d_gr_over_em: ratio(channels[0].diffusion, channels[1].diffusion)?,
        damping_order,
        diffusion_order,
        channels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::si;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn earth_moon() -> OrbitConfig {
        OrbitConfig::new(
            PhysQuantity::kilograms(5.972e24),
            PhysQuantity::kilograms(7.342e22),
            PhysQuantity::meters(3.844e8),
        )
        .unwrap()
    }

    fn moon_band_background() -> StrainSpectrum {
        // Flat confusion-level background on a band that includes twice the
        // lunar orbital frequency (f = 8.5e-7 Hz).
        let two_pi = 2.0 * std::f64::consts::PI;
        StrainSpectrum::white(
            PhysQuantity::per_hertz(1e-34),
            PhysQuantity::per_second(two_pi * 1e-7),
            PhysQuantity::per_second(two_pi * 1e-2),
        )
        .unwrap()
    }

    #[test]
    fn kepler_earth_moon() {
        let orbit = earth_moon();
        let k = kepler_derive(&orbit);
        assert_eq!(k.orbital_frequency.dim(), Dim::FREQUENCY);
        assert!(rel(k.orbital_frequency.value(), 2.665_3e-6) < 1e-3);
        assert!(rel(k.velocity.value(), 1.024_5e3) < 1e-3);
        // Sidereal-month scale period.
        let period_days = 2.0 * std::f64::consts::PI / k.orbital_frequency.value() / 86_400.0;
        assert!(period_days > 26.0 && period_days < 28.5);
        // The two acceleration expressions agree identically.
        let a1 = k.velocity.powi(2) / orbit.radius();
        let a2 = orbit.radius() * k.orbital_frequency.powi(2);
        assert!(a1.rel_diff(a2).unwrap() < 1e-12);
        assert!(a1.rel_diff(k.acceleration).unwrap() < 1e-12);
    }

    #[test]
    fn kepler_radius_scaling() {
        let orbit = earth_moon();
        let wide = OrbitConfig::new(orbit.primary_mass(), orbit.secondary_mass(), orbit.radius() * 4.0).unwrap();
        let ratio = kepler_derive(&orbit).orbital_frequency / kepler_derive(&wide).orbital_frequency;
        assert!(rel(ratio.as_dimensionless().unwrap(), 8.0) < 1e-12);
    }

    #[test]
    fn orbit_validation() {
        assert!(matches!(
            OrbitConfig::new(
                PhysQuantity::kilograms(-1.0),
                PhysQuantity::kilograms(1.0),
                PhysQuantity::meters(1.0)
            ),
            Err(OrbitError::NonPositive { field: "primary mass", .. })
        ));
        assert!(OrbitConfig::new(
            PhysQuantity::seconds(1.0),
            PhysQuantity::kilograms(1.0),
            PhysQuantity::meters(1.0)
        )
        .is_err());
    }

    #[test]
    fn damping_rate_earth_moon() {
        let gamma = damping_rate(&earth_moon());
        assert_eq!(gamma.dim(), Dim::FREQUENCY);
        assert!(rel(gamma.value(), 9.539e-35) < 1e-3);
        assert!(gamma.value() > 1e-34 / 5.0 && gamma.value() < 1e-34 * 5.0);
    }

    #[test]
    fn damping_symmetric_in_bodies() {
        let orbit = earth_moon();
        let swapped = OrbitConfig::new(orbit.secondary_mass(), orbit.primary_mass(), orbit.radius()).unwrap();
        assert!(damping_rate(&orbit).rel_diff(damping_rate(&swapped)).unwrap() < 1e-14);
    }

    #[test]
    fn damping_is_linear_in_mass_at_fixed_acceleration() {
        // Gamma * 5 c^5 / (32 G m a^2) = 1 for every orbit, so at fixed a
        // the rate is proportional to the reduced mass and vanishes with it.
        let orbits = [
            earth_moon(),
            OrbitConfig::new(
                PhysQuantity::kilograms(1.9e27),
                PhysQuantity::kilograms(8.9e22),
                PhysQuantity::meters(4.2e8),
            )
            .unwrap(),
            OrbitConfig::new(
                PhysQuantity::kilograms(2e30),
                PhysQuantity::kilograms(6e24),
                PhysQuantity::meters(1.5e11),
            )
            .unwrap(),
        ];
        for orbit in &orbits {
            let a = kepler_derive(orbit).acceleration;
            let unit = damping_rate(orbit) * constants::speed_of_light().powi(5) * 5.0
                / (constants::gravitational_constant() * orbit.reduced_mass() * a.powi(2) * 32.0);
            assert!(rel(unit.as_dimensionless().unwrap(), 1.0) < 1e-14);
        }
    }

    #[test]
    fn diffusion_earth_moon() {
        let orbit = earth_moon();
        let d = diffusion_coefficient(&orbit, &moon_band_background()).unwrap();
        assert_eq!(d.d_gr.dim(), Dim::MOMENTUM_DIFFUSION);
        assert_eq!(d.variance_rate_per_dx2.dim(), Dim::new(-2, 0, -1, 0));
        let rate = d.d_gr.value() / (si::HBAR * si::HBAR);
        assert!(rel(rate, 7.05e74) < 2e-3, "D/hbar^2 = {rate}");
        assert!(rate > 1e75 / 5.0 && rate < 1e75 * 5.0);
        // D = m Gamma k_B T by construction.
        let rebuilt = orbit.reduced_mass() * d.gamma_gr * constants::boltzmann_constant() * d.noise_temperature;
        assert!(rebuilt.rel_diff(d.d_gr).unwrap() < 1e-14);
    }

    #[test]
    fn diffusion_out_of_band_is_rejected() {
        // The default confusion band starts at 1e-6 Hz; twice the lunar
        // orbital frequency (8.5e-7 Hz) falls below it.
        let err = diffusion_coefficient(&earth_moon(), &StrainSpectrum::binary_confusion_default());
        assert!(matches!(err, Err(OrbitError::Spectrum(SpectrumError::OutOfBand { .. }))));
    }

    #[test]
    fn diffusion_zero_spectrum() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let zero = StrainSpectrum::white(
            PhysQuantity::per_hertz(0.0),
            PhysQuantity::per_second(two_pi * 1e-7),
            PhysQuantity::per_second(two_pi * 1e-2),
        )
        .unwrap();
        let d = diffusion_coefficient(&earth_moon(), &zero).unwrap();
        assert_eq!(d.d_gr.value(), 0.0);
    }

    #[test]
    fn diffusion_collapses_to_two_m2_a2_s() {
        // Composing Gamma, D and the temperature conversion gives
        // D = 2 m^2 a^2 S_h exactly.
        let orbit = earth_moon();
        let d = diffusion_coefficient(&orbit, &moon_band_background()).unwrap();
        let a = kepler_derive(&orbit).acceleration;
        let m = orbit.reduced_mass();
        let s_h = PhysQuantity::per_hertz(1e-34);
        let ratio = (d.d_gr / (m.powi(2) * a.powi(2) * s_h)).as_dimensionless().unwrap();
        assert!(rel(ratio, 2.0) < 1e-12, "ratio {ratio}");
    }

    #[test]
    fn decoherence_variance_examples() {
        let orbit = earth_moon();
        let spec = moon_band_background();
        let lp = constants::planck_length();

        // Planck-length separation decoheres on the ten-microsecond scale.
        let t = decoherence_time(&orbit, &spec, lp).unwrap();
        assert_eq!(t.dim(), Dim::TIME);
        assert!(rel(t.value(), 2.71e-6) < 5e-3, "t = {}", t.value());
        assert!(t.value() > 4e-7 && t.value() < 5e-5);
        let at_t = decoherence_variance(&orbit, &spec, lp, t).unwrap();
        assert!(rel(at_t.variance, 1.0) < 1e-12);

        // Zero separation, zero variance, full coherence.
        let zero = decoherence_variance(&orbit, &spec, PhysQuantity::meters(0.0), PhysQuantity::seconds(1.0)).unwrap();
        assert_eq!(zero.variance, 0.0);
        assert_eq!(zero.decoherence_factor, 1.0);

        // Quadratic in the separation.
        let v1 = decoherence_variance(&orbit, &spec, lp, PhysQuantity::seconds(1.0)).unwrap();
        let v2 = decoherence_variance(&orbit, &spec, lp * 2.0, PhysQuantity::seconds(1.0)).unwrap();
        assert!(rel(v2.variance, 4.0 * v1.variance) < 1e-12);
    }

    #[test]
    fn momentum_spread_linear_in_time() {
        let orbit = earth_moon();
        let d = diffusion_coefficient(&orbit, &moon_band_background()).unwrap();
        let zero = momentum_spread(&d, PhysQuantity::seconds(0.0)).unwrap();
        assert_eq!(zero.value(), 0.0);
        assert_eq!(zero.dim(), Dim::MOMENTUM_SQUARED);
        let one = momentum_spread(&d, PhysQuantity::seconds(1.0)).unwrap();
        let two = momentum_spread(&d, PhysQuantity::seconds(2.0)).unwrap();
        assert!(rel(two.value(), 2.0 * one.value()) < 1e-15);
        assert!(rel(one.value(), 2.0 * d.d_gr.value()) < 1e-15);
    }

    #[test]
    fn equivalent_interferometer_limits() {
        let orbit = earth_moon();
        let full = equivalent_interferometer(&orbit, orbit.radius() * 2.0).unwrap();
        assert_eq!(full.sin_alpha, 1.0);
        let none = equivalent_interferometer(&orbit, PhysQuantity::meters(0.0)).unwrap();
        assert_eq!(none.mu.value(), 0.0);
        assert!(matches!(
            equivalent_interferometer(&orbit, orbit.radius() * 2.1),
            Err(OrbitError::SeparationTooLarge { .. })
        ));

        let fm = equivalent_interferometer(&orbit, PhysQuantity::meters(1e-15)).unwrap();
        assert!(rel(fm.sin_alpha, 1e-15 / (2.0 * 3.844e8)) < 1e-12);
        let expected_mu = 2.0 * orbit.reduced_mass().value() * kepler_derive(&orbit).velocity.value().powi(2)
            * fm.sin_alpha
            / si::HBAR;
        assert!(rel(fm.mu.value(), expected_mu) < 1e-12);
    }

    #[test]
    fn route_ratio_is_two_for_all_inputs() {
        let spec = moon_band_background();
        let orbits = [
            earth_moon(),
            OrbitConfig::new(
                PhysQuantity::kilograms(1.9e27),
                PhysQuantity::kilograms(8.9e22),
                PhysQuantity::meters(4.2e8),
            )
            .unwrap(),
        ];
        let mut ratios = Vec::new();
        for orbit in &orbits {
            for dx in [1e-35, 1e-15, 1.0] {
                for tau in [1e-6, 1.0, 3600.0] {
                    let r = route_ratio(orbit, &spec, PhysQuantity::meters(dx), PhysQuantity::seconds(tau)).unwrap();
                    ratios.push(r);
                }
            }
        }
        for r in &ratios {
            assert!(rel(*r, ratios[0]) < 1e-12, "ratio not constant: {r} vs {}", ratios[0]);
            assert!(rel(*r, 2.0) < 1e-12);
        }
    }

    #[test]
    fn channel_comparison_earth_moon() {
        let orbit = earth_moon();
        let d = diffusion_coefficient(&orbit, &moon_band_background()).unwrap();
        let cmp = channel_comparison(
            orbit.reduced_mass(),
            d.gamma_gr,
            d.noise_temperature,
            &ExternalChannels::moon_defaults(),
        )
        .unwrap();
        // Weakest damping, strongest diffusion.
        assert_eq!(cmp.damping_order.last().copied(), Some("gravitational"));
        assert_eq!(cmp.diffusion_order.first().copied(), Some("gravitational"));
        assert_eq!(cmp.damping_order.first().copied(), Some("tidal"));
        // Quoted orders of magnitude.
        assert!(cmp.gamma_gr_over_tides > 1e-17 && cmp.gamma_gr_over_tides < 1e-15);
        assert!(cmp.t_gr_over_tides > 1e37 && cmp.t_gr_over_tides < 1e39);
        assert!(cmp.d_gr_over_tides > 1e21 && cmp.d_gr_over_tides < 1e23);
        assert!(cmp.d_gr_over_em > 1.0);
    }

    #[test]
    fn channel_comparison_degenerate_cases() {
        let m = PhysQuantity::kilograms(1.0);
        // Equal temperatures: diffusion ordering equals damping ordering.
        let ext = ExternalChannels {
            gamma_em: PhysQuantity::per_second(2.0),
            gamma_tides: PhysQuantity::per_second(3.0),
            t_em: PhysQuantity::kelvins(10.0),
            t_tides: PhysQuantity::kelvins(10.0),
        };
        let cmp = channel_comparison(m, PhysQuantity::per_second(1.0), PhysQuantity::kelvins(10.0), &ext).unwrap();
        assert_eq!(cmp.damping_order, cmp.diffusion_order);
        // Zero-temperature channel has zero diffusion.
        let cold = ExternalChannels {
            t_tides: PhysQuantity::kelvins(0.0),
            ..ExternalChannels::moon_defaults()
        };
        let cmp = channel_comparison(m, PhysQuantity::per_second(1.0), PhysQuantity::kelvins(10.0), &cold).unwrap();
        assert_eq!(cmp.channels[2].diffusion.value(), 0.0);
    }
}
