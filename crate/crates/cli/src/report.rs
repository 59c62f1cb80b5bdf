//! Report sections and their unit schemas.
//!
//! Every product is a flat serializable struct; the unit of each field lives
//! in a sidecar schema emitted next to the report so that no number travels
//! without its dimension.

use anyhow::{bail, Context, Result};
use serde::Serialize;

use gwdecoh::background::{self, SpectrumModel, StrainSpectrum};
use gwdecoh::constants::si;
use gwdecoh::dephasing::{self, report_for_white, variance_integral, DephasingError};
use gwdecoh::interferometer::InstrumentConfig;
use gwdecoh::montecarlo::{ensemble_dephasing, EnsembleResult, SimulationConfig};
use gwdecoh::planckscale::{scaling_variance, transition_scan, ScalingInput, ScanGrid, TransitionScan};
use gwdecoh::planetary::{
    channel_comparison, decoherence_time, decoherence_variance, diffusion_coefficient,
    equivalent_interferometer, kepler_derive, momentum_spread, route_ratio,
};
use gwdecoh::scenario::OrbitScenario;
use gwdecoh::PhysQuantity;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// (field, unit) pairs for the sidecar schema.
pub type FieldUnits = &'static [(&'static str, &'static str)];

fn model_label(spec: &StrainSpectrum) -> String {
    match spec.model() {
        SpectrumModel::White { level } => format!("white(level={level} /Hz)"),
        SpectrumModel::PowerLaw { amplitude, exponent, pivot } => {
            format!("power_law(amplitude={amplitude} /Hz, exponent={exponent}, pivot={} Hz)", pivot / TWO_PI)
        }
        SpectrumModel::Tabulated { points, .. } => format!("tabulated({} points)", points.len()),
    }
}

/// Flat white level of a background, or an explanatory error for the
/// closed-form products that require one.
fn white_level(spec: &StrainSpectrum, product: &str) -> Result<PhysQuantity> {
    match spec.model() {
        SpectrumModel::White { level } => Ok(PhysQuantity::per_hertz(*level)),
        other => {
            let found = match other {
                SpectrumModel::PowerLaw { .. } => "power_law",
                SpectrumModel::Tabulated { .. } => "tabulated",
                SpectrumModel::White { .. } => unreachable!(),
            };
            bail!(
                "{product} uses the flat-spectrum closed forms and requires a white background; \
                 found {found} (use the background or montecarlo products for non-flat spectra)"
            )
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BackgroundSection {
    pub model: String,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    /// Representative frequency: geometric mid-band.
    pub eval_frequency_hz: f64,
    pub s_h_per_hz: f64,
    pub noise_temperature_k: f64,
    pub graviton_number: f64,
    pub theta_per_s: f64,
}

pub const BACKGROUND_UNITS: FieldUnits = &[
    ("model", "label"),
    ("band_low_hz", "Hz"),
    ("band_high_hz", "Hz"),
    ("eval_frequency_hz", "Hz"),
    ("s_h_per_hz", "1/Hz"),
    ("noise_temperature_k", "K"),
    ("graviton_number", "dimensionless"),
    ("theta_per_s", "1/s"),
];

pub fn background_section(spec: &StrainSpectrum) -> Result<BackgroundSection> {
    let (lo, hi) = spec.band();
    let omega = (lo * hi).sqrt().expect("band product has even exponents");
    let s_h = spec.evaluate(omega)?;
    let eq = background::equivalents(s_h, omega)?;
    Ok(BackgroundSection {
        model: model_label(spec),
        band_low_hz: lo.value() / TWO_PI,
        band_high_hz: hi.value() / TWO_PI,
        eval_frequency_hz: omega.value() / TWO_PI,
        s_h_per_hz: s_h.value(),
        noise_temperature_k: eq.noise_temperature.value(),
        graviton_number: eq.graviton_number,
        theta_per_s: eq.theta.value(),
    })
}

/// Log-spaced spectrum curve for external plotting.
pub fn background_curve(spec: &StrainSpectrum, points: usize) -> Result<String> {
    let (lo, hi) = spec.band();
    let (lo, hi) = (lo.value(), hi.value());
    let mut out = String::from("frequency_hz,angular_frequency_per_s,s_h_per_hz\n");
    for i in 0..points {
        let omega = lo * (hi / lo).powf(i as f64 / (points - 1) as f64);
        let s = spec.evaluate(PhysQuantity::per_second(omega.clamp(lo, hi)))?;
        out.push_str(&format!("{},{},{}\n", omega / TWO_PI, omega, s.value()));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct AtomSection {
    pub s_h_level_per_hz: f64,
    pub mu_at_per_s: f64,
    pub variance_atomic: f64,
    pub variance_photonic: f64,
    pub variance_total: f64,
    pub contrast: f64,
    /// Band-limited quadrature cross-check; absent when the background band
    /// cannot support the integral.
    pub quadrature_variance: Option<f64>,
    pub quadrature_abs_error: f64,
    pub band_tail_bound: f64,
}

pub const ATOM_UNITS: FieldUnits = &[
    ("s_h_level_per_hz", "1/Hz"),
    ("mu_at_per_s", "1/s"),
    ("variance_atomic", "dimensionless"),
    ("variance_photonic", "dimensionless"),
    ("variance_total", "dimensionless"),
    ("contrast", "dimensionless"),
    ("quadrature_variance", "dimensionless"),
    ("quadrature_abs_error", "dimensionless"),
    ("band_tail_bound", "dimensionless"),
];

pub fn atom_section(cfg: &InstrumentConfig, spec: &StrainSpectrum) -> Result<AtomSection> {
    let level = white_level(spec, "atom")?;
    let report = match report_for_white(cfg, spec) {
        Ok(report) => report,
        Err(DephasingError::NotWhite(found)) => bail!("atom requires a white background, found {found}"),
        Err(other) => return Err(other).context("atom budget"),
    };
    Ok(AtomSection {
        s_h_level_per_hz: level.value(),
        mu_at_per_s: cfg.mu_at().value(),
        variance_atomic: report.variance_atomic,
        variance_photonic: report.variance_photonic,
        variance_total: report.variance_total,
        contrast: report.contrast,
        quadrature_variance: report.quadrature_variance,
        quadrature_abs_error: report.quadrature_abs_error,
        band_tail_bound: report.band_tail_bound,
    })
}

/// Transfer-function curve of the averaging filter.
pub fn filter_curve(cfg: &InstrumentConfig, points: usize) -> String {
    let filter = cfg.filter();
    let tau = cfg.arm_time().value();
    let mut out = String::from("omega_tau,transfer\n");
    for i in 0..points {
        let x = 20.0 * i as f64 / (points - 1) as f64;
        let transfer = filter
            .frequency_transfer(PhysQuantity::per_second(x / tau))
            .expect("frequency dimension");
        out.push_str(&format!("{x},{transfer}\n"));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PhotonSection {
    pub s_h_level_per_hz: f64,
    pub laser_angular_frequency_per_s: f64,
    pub photon_flight_time_s: f64,
    pub variance_photonic: f64,
    pub s_q_m2_per_hz: f64,
    pub sqrt_s_q_m_per_sqrt_hz: f64,
}

pub const PHOTON_UNITS: FieldUnits = &[
    ("s_h_level_per_hz", "1/Hz"),
    ("laser_angular_frequency_per_s", "1/s"),
    ("photon_flight_time_s", "s"),
    ("variance_photonic", "dimensionless"),
    ("s_q_m2_per_hz", "m^2/Hz"),
    ("sqrt_s_q_m_per_sqrt_hz", "m/sqrt(Hz)"),
];

pub fn photon_section(cfg: &InstrumentConfig, spec: &StrainSpectrum) -> Result<PhotonSection> {
    let level = white_level(spec, "photon")?;
    let variance = dephasing::variance_white_photonic(cfg, level)?;
    let s_q = dephasing::equivalent_displacement_noise(cfg, level)?;
    Ok(PhotonSection {
        s_h_level_per_hz: level.value(),
        laser_angular_frequency_per_s: cfg.mu_phot().value(),
        photon_flight_time_s: cfg.tau_phot().value(),
        variance_photonic: variance,
        s_q_m2_per_hz: s_q.value(),
        sqrt_s_q_m_per_sqrt_hz: s_q.value().sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MontecarloSection {
    pub seed: u64,
    pub n_realizations: usize,
    pub n_samples: usize,
    pub dt_s: f64,
    pub duration_s: f64,
    pub spectrum: String,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    pub empirical_variance: f64,
    pub standard_error: f64,
    /// Flat closed form of the synthesized level (white spectra only).
    pub analytic_white_variance: Option<f64>,
    pub z_vs_white: Option<f64>,
    /// Band-limited quadrature of the synthesized spectrum.
    pub analytic_band_variance: Option<f64>,
    pub z_vs_band: Option<f64>,
    pub empirical_contrast: f64,
    pub contrast_standard_error: f64,
    pub predicted_contrast: f64,
    pub realized_psd_check: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub const MONTECARLO_UNITS: FieldUnits = &[
    ("seed", "integer"),
    ("n_realizations", "count"),
    ("n_samples", "count"),
    ("dt_s", "s"),
    ("duration_s", "s"),
    ("spectrum", "label"),
    ("band_low_hz", "Hz"),
    ("band_high_hz", "Hz"),
    ("empirical_variance", "dimensionless"),
    ("standard_error", "dimensionless"),
    ("analytic_white_variance", "dimensionless"),
    ("z_vs_white", "standard errors"),
    ("analytic_band_variance", "dimensionless"),
    ("z_vs_band", "standard errors"),
    ("empirical_contrast", "dimensionless"),
    ("contrast_standard_error", "dimensionless"),
    ("predicted_contrast", "dimensionless"),
    ("realized_psd_check", "relative deviation"),
    ("skewness", "dimensionless"),
    ("excess_kurtosis", "dimensionless"),
];

pub fn montecarlo_section(
    cfg: &InstrumentConfig,
    sim: &SimulationConfig,
) -> Result<(MontecarloSection, EnsembleResult)> {
    let out = ensemble_dephasing(cfg, sim).context("Monte Carlo ensemble")?;

    let analytic_white = match sim.spectrum().model() {
        SpectrumModel::White { level } => {
            Some(dephasing::variance_white_atomic(cfg, PhysQuantity::per_hertz(*level))?)
        }
        _ => None,
    };
    let analytic_band = match variance_integral(cfg, sim.spectrum()) {
        Ok(q) => Some(q.value),
        Err(DephasingError::BandTooNarrow { .. }) => None,
        Err(other) => return Err(other).context("band quadrature"),
    };
    let z = |target: Option<f64>| {
        target.map(|t| {
            if out.standard_error > 0.0 {
                (out.empirical_variance - t) / out.standard_error
            } else {
                0.0
            }
        })
    };

    let (lo, hi) = sim.spectrum().band();
    let section = MontecarloSection {
        seed: sim.seed(),
        n_realizations: out.n_realizations,
        n_samples: sim.n_samples(),
        dt_s: sim.dt().value(),
        duration_s: sim.duration().value(),
        spectrum: model_label(sim.spectrum()),
        band_low_hz: lo.value() / TWO_PI,
        band_high_hz: hi.value() / TWO_PI,
        empirical_variance: out.empirical_variance,
        standard_error: out.standard_error,
        analytic_white_variance: analytic_white,
        z_vs_white: z(analytic_white),
        analytic_band_variance: analytic_band,
        z_vs_band: z(analytic_band),
        empirical_contrast: out.empirical_contrast,
        contrast_standard_error: out.contrast_standard_error,
        predicted_contrast: (-0.5 * out.empirical_variance).exp(),
        realized_psd_check: out.realized_psd_check,
        skewness: out.skewness,
        excess_kurtosis: out.excess_kurtosis,
    };
    Ok((section, out))
}

pub fn phases_csv(result: &EnsembleResult) -> String {
    let mut out = String::from("realization,delta_phi\n");
    for (i, phi) in result.phases.iter().enumerate() {
        out.push_str(&format!("{i},{phi}\n"));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanetarySection {
    pub primary_mass_kg: f64,
    pub secondary_mass_kg: f64,
    pub separation_m: f64,
    pub total_mass_kg: f64,
    pub reduced_mass_kg: f64,
    pub orbital_frequency_per_s: f64,
    pub velocity_m_per_s: f64,
    pub acceleration_m_per_s2: f64,
    pub gamma_gr_per_s: f64,
    pub evaluation_frequency_hz: f64,
    pub s_h_per_hz: f64,
    pub noise_temperature_k: f64,
    pub d_gr_kg2_m2_per_s3: f64,
    pub d_over_hbar2_per_m2_s: f64,
    pub displacement_m: f64,
    pub exposure_s: f64,
    pub decoherence_variance: f64,
    pub decoherence_factor: f64,
    pub decoherence_time_s: f64,
    pub momentum_spread_kg2_m2_per_s2: f64,
    pub mu_equivalent_per_s: f64,
    pub sin_alpha_equivalent: f64,
    /// Diffusion-route variance over the equivalent-interferometer route.
    pub route_ratio: f64,
    pub gamma_em_per_s: f64,
    pub gamma_tides_per_s: f64,
    pub t_em_k: f64,
    pub t_tides_k: f64,
    pub d_em_kg2_m2_per_s3: f64,
    pub d_tides_kg2_m2_per_s3: f64,
    pub gamma_gr_over_tides: f64,
    pub t_gr_over_tides: f64,
    pub d_gr_over_tides: f64,
    pub d_gr_over_em: f64,
    pub damping_order: String,
    pub diffusion_order: String,
}

pub const PLANETARY_UNITS: FieldUnits = &[
    ("primary_mass_kg", "kg"),
    ("secondary_mass_kg", "kg"),
    ("separation_m", "m"),
    ("total_mass_kg", "kg"),
    ("reduced_mass_kg", "kg"),
    ("orbital_frequency_per_s", "1/s"),
    ("velocity_m_per_s", "m/s"),
    ("acceleration_m_per_s2", "m/s^2"),
    ("gamma_gr_per_s", "1/s"),
    ("evaluation_frequency_hz", "Hz"),
    ("s_h_per_hz", "1/Hz"),
    ("noise_temperature_k", "K"),
    ("d_gr_kg2_m2_per_s3", "kg^2 m^2/s^3"),
    ("d_over_hbar2_per_m2_s", "1/(m^2 s)"),
    ("displacement_m", "m"),
    ("exposure_s", "s"),
    ("decoherence_variance", "dimensionless"),
    ("decoherence_factor", "dimensionless"),
    ("decoherence_time_s", "s"),
    ("momentum_spread_kg2_m2_per_s2", "kg^2 m^2/s^2"),
    ("mu_equivalent_per_s", "1/s"),
    ("sin_alpha_equivalent", "dimensionless"),
    ("route_ratio", "dimensionless"),
    ("gamma_em_per_s", "1/s"),
    ("gamma_tides_per_s", "1/s"),
    ("t_em_k", "K"),
    ("t_tides_k", "K"),
    ("d_em_kg2_m2_per_s3", "kg^2 m^2/s^3"),
    ("d_tides_kg2_m2_per_s3", "kg^2 m^2/s^3"),
    ("gamma_gr_over_tides", "dimensionless"),
    ("t_gr_over_tides", "dimensionless"),
    ("d_gr_over_tides", "dimensionless"),
    ("d_gr_over_em", "dimensionless"),
    ("damping_order", "descending"),
    ("diffusion_order", "descending"),
];

pub fn planetary_section(scenario: &OrbitScenario, spec: &StrainSpectrum) -> Result<PlanetarySection> {
    let orbit = &scenario.orbit;
    let kepler = kepler_derive(orbit);
    let diffusion = diffusion_coefficient(orbit, spec).context("momentum diffusion")?;
    let decoherence = decoherence_variance(orbit, spec, scenario.displacement, scenario.exposure)?;
    let time = decoherence_time(orbit, spec, scenario.displacement)?;
    let spread = momentum_spread(&diffusion, scenario.exposure)?;
    let equivalent = equivalent_interferometer(orbit, scenario.displacement)?;
    let ratio = route_ratio(orbit, spec, scenario.displacement, scenario.exposure)?;
    let s_h = spec.evaluate(diffusion.evaluation_frequency)?;
    let channels = channel_comparison(
        orbit.reduced_mass(),
        diffusion.gamma_gr,
        diffusion.noise_temperature,
        &scenario.channels,
    )?;

    Ok(PlanetarySection {
        primary_mass_kg: orbit.primary_mass().value(),
        secondary_mass_kg: orbit.secondary_mass().value(),
        separation_m: orbit.radius().value(),
        total_mass_kg: orbit.total_mass().value(),
        reduced_mass_kg: orbit.reduced_mass().value(),
        orbital_frequency_per_s: kepler.orbital_frequency.value(),
        velocity_m_per_s: kepler.velocity.value(),
        acceleration_m_per_s2: kepler.acceleration.value(),
        gamma_gr_per_s: diffusion.gamma_gr.value(),
        evaluation_frequency_hz: diffusion.evaluation_frequency.value() / TWO_PI,
        s_h_per_hz: s_h.value(),
        noise_temperature_k: diffusion.noise_temperature.value(),
        d_gr_kg2_m2_per_s3: diffusion.d_gr.value(),
        d_over_hbar2_per_m2_s: diffusion.d_gr.value() / (si::HBAR * si::HBAR),
        displacement_m: scenario.displacement.value(),
        exposure_s: scenario.exposure.value(),
        decoherence_variance: decoherence.variance,
        decoherence_factor: decoherence.decoherence_factor,
        decoherence_time_s: time.value(),
        momentum_spread_kg2_m2_per_s2: spread.value(),
        mu_equivalent_per_s: equivalent.mu.value(),
        sin_alpha_equivalent: equivalent.sin_alpha,
        route_ratio: ratio,
        gamma_em_per_s: scenario.channels.gamma_em.value(),
        gamma_tides_per_s: scenario.channels.gamma_tides.value(),
        t_em_k: scenario.channels.t_em.value(),
        t_tides_k: scenario.channels.t_tides.value(),
        d_em_kg2_m2_per_s3: channels.channels[1].diffusion.value(),
        d_tides_kg2_m2_per_s3: channels.channels[2].diffusion.value(),
        gamma_gr_over_tides: channels.gamma_gr_over_tides,
        t_gr_over_tides: channels.t_gr_over_tides,
        d_gr_over_tides: channels.d_gr_over_tides,
        d_gr_over_em: channels.d_gr_over_em,
        damping_order: channels.damping_order.join(">"),
        diffusion_order: channels.diffusion_order.join(">"),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanckRow {
    pub m: f64,
    pub v: f64,
    pub variance: f64,
    pub on_contour: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanckContourPoint {
    pub v: f64,
    pub m_at_unit_variance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PlanckScanSection {
    pub theta_per_s: f64,
    pub sin_aperture: f64,
    pub exposure_s: f64,
    /// Exact half-variance of the template instrument itself.
    pub template_half_variance: f64,
    pub rows: Vec<PlanckRow>,
    pub contour: Vec<PlanckContourPoint>,
}

pub const PLANCK_UNITS: FieldUnits = &[
    ("theta_per_s", "1/s"),
    ("sin_aperture", "dimensionless"),
    ("exposure_s", "s"),
    ("template_half_variance", "dimensionless"),
    ("rows.m", "kg"),
    ("rows.v", "m/s"),
    ("rows.variance", "dimensionless"),
    ("rows.on_contour", "flag"),
    ("contour.v", "m/s"),
    ("contour.m_at_unit_variance", "kg"),
];

pub fn planck_section(
    cfg: &InstrumentConfig,
    spec: &StrainSpectrum,
    grid: &ScanGrid,
) -> Result<PlanckScanSection> {
    let level = white_level(spec, "planck")?;
    let theta = background::theta_gr(level)?;
    let template = ScalingInput::from_instrument(cfg, theta)?;
    let scan: TransitionScan = transition_scan(&template, grid)?;
    Ok(PlanckScanSection {
        theta_per_s: theta.value(),
        sin_aperture: template.sin_alpha(),
        exposure_s: template.exposure().value(),
        template_half_variance: scaling_variance(&template)?,
        rows: scan
            .rows
            .iter()
            .map(|r| PlanckRow { m: r.mass, v: r.velocity, variance: r.variance, on_contour: r.on_contour })
            .collect(),
        contour: scan
            .contour
            .iter()
            .map(|c| PlanckContourPoint { v: c.velocity, m_at_unit_variance: c.mass })
            .collect(),
    })
}

pub fn planck_csv(section: &PlanckScanSection) -> String {
    let mut out = String::from("m,v,variance,on_contour\n");
    for row in &section.rows {
        out.push_str(&format!("{},{},{},{}\n", row.m, row.v, row.variance, row.on_contour));
    }
    out
}

/// Sidecar schema: field name to unit map.
pub fn units_schema(units: FieldUnits) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (field, unit) in units {
        map.insert((*field).to_string(), serde_json::json!({ "unit": unit }));
    }
    serde_json::Value::Object(map)
}
