//! Stochastic strain background models.
//!
//! A [`StrainSpectrum`] is a two-sided spectral density `S_h[omega]` of the
//! dimensionless metric strain, stored against *angular* frequency and only
//! defined on an explicit validity band. Evaluation outside the band is an
//! error, never an extrapolation. The two-sided convention is used
//! throughout: the autocovariance is the integral of `S_h` over all omega
//! divided by 2 pi, with `S_h[-omega] = S_h[omega]`, and a band `[w1, w2]`
//! always denotes the symmetric pair of intervals on the frequency axis.
//!
//! The same density can be expressed as a mean graviton number per mode, as
//! an effective noise temperature, or as the frequency `Theta = S_h / t_P^2`.
//! The conversion factor 16G/(5c^5) is kept exact.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::constants;
use crate::quantity::{Dim, DimensionError, PhysQuantity};

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error("spectral density must be nonnegative, got {0} /Hz")]
    NegativeDensity(f64),
    #[error("angular frequency must be positive, got {0} /s")]
    NonPositiveFrequency(f64),
    #[error("noise temperature must be nonnegative, got {0} K")]
    NegativeTemperature(f64),
    #[error("invalid band [{low}, {high}] /s: need 0 <= low < high")]
    InvalidBand { low: f64, high: f64 },
    #[error("angular frequency {omega} /s outside valid band [{low}, {high}] /s")]
    OutOfBand { omega: f64, low: f64, high: f64 },
    #[error("tabulated spectrum needs at least two points, got {0}")]
    TableTooShort(usize),
    #[error("tabulated frequencies must be strictly increasing (violated at index {0})")]
    NonIncreasingTable(usize),
    #[error("log-log interpolation requires strictly positive densities (zero at index {0})")]
    NonPositiveForLogInterp(usize),
    #[error("power-law pivot frequency must be positive, got {0} /s")]
    NonPositivePivot(f64),
    #[error("reading spectrum file: {0}")]
    Io(#[from] std::io::Error),
    #[error("spectrum file line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Interpolation rule between tabulated points.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Interpolation {
    /// Linear in (ln omega, ln S); the default since spectra span decades.
    #[default]
    LogLog,
    /// Linear in (omega, S); required when the table contains zeros.
    Linear,
}

#[derive(Clone, Debug)]
pub enum SpectrumModel {
    /// Flat density at `level` (1/Hz) across the band.
    White { level: f64 },
    /// `amplitude * (omega/pivot)^exponent`, amplitude in 1/Hz, pivot in 1/s.
    PowerLaw { amplitude: f64, exponent: f64, pivot: f64 },
    /// Sorted `(omega, S_h)` pairs in (1/s, 1/Hz) with an interpolation rule.
    Tabulated { points: Vec<(f64, f64)>, interpolation: Interpolation },
}

/// Two-sided strain spectral density model over a validity band.
#[derive(Clone, Debug)]
pub struct StrainSpectrum {
    model: SpectrumModel,
    /// Angular frequency band (1/s), positive-axis representative.
    band: (f64, f64),
}

impl StrainSpectrum {
    pub fn white(level: PhysQuantity, band_low: PhysQuantity, band_high: PhysQuantity) -> Result<Self, SpectrumError> {
        let level = level.expect_dim(Dim::SPECTRAL_DENSITY, "white level")?;
        if level < 0.0 {
            return Err(SpectrumError::NegativeDensity(level));
        }
        let band = check_band(band_low, band_high)?;
        Ok(StrainSpectrum { model: SpectrumModel::White { level }, band })
    }

    pub fn power_law(
        amplitude: PhysQuantity,
        exponent: f64,
        pivot: PhysQuantity,
        band_low: PhysQuantity,
        band_high: PhysQuantity,
    ) -> Result<Self, SpectrumError> {
        let amplitude = amplitude.expect_dim(Dim::SPECTRAL_DENSITY, "power-law amplitude")?;
        if amplitude < 0.0 {
            return Err(SpectrumError::NegativeDensity(amplitude));
        }
        let pivot = pivot.expect_dim(Dim::FREQUENCY, "power-law pivot")?;
        if pivot <= 0.0 {
            return Err(SpectrumError::NonPositivePivot(pivot));
        }
        let band = check_band(band_low, band_high)?;
        Ok(StrainSpectrum { model: SpectrumModel::PowerLaw { amplitude, exponent, pivot }, band })
    }

    /// Tabulated spectrum; the band is the span of the table.
    /// Points are `(angular frequency 1/s, S_h 1/Hz)`.
    pub fn tabulated(points: Vec<(f64, f64)>, interpolation: Interpolation) -> Result<Self, SpectrumError> {
        if points.len() < 2 {
            return Err(SpectrumError::TableTooShort(points.len()));
        }
        if points[0].0 <= 0.0 {
            return Err(SpectrumError::NonPositiveFrequency(points[0].0));
        }
        for i in 1..points.len() {
            if points[i].0 <= points[i - 1].0 {
                return Err(SpectrumError::NonIncreasingTable(i));
            }
        }
        for (i, &(_, s)) in points.iter().enumerate() {
            if s < 0.0 {
                return Err(SpectrumError::NegativeDensity(s));
            }
            if interpolation == Interpolation::LogLog && s <= 0.0 {
                return Err(SpectrumError::NonPositiveForLogInterp(i));
            }
        }
        let band = (points[0].0, points[points.len() - 1].0);
        Ok(StrainSpectrum { model: SpectrumModel::Tabulated { points, interpolation }, band })
    }

    /// Loads a two-column text file of `frequency [Hz], S_h [1/Hz]`.
    /// Columns are whitespace- or comma-separated; lines starting with `#`
    /// are comments. Frequencies are converted to angular frequency.
    pub fn from_frequency_file(path: &Path, interpolation: Interpolation) -> Result<Self, SpectrumError> {
        let text = fs::read_to_string(path)?;
        Self::from_frequency_text(&text, interpolation)
    }

    pub fn from_frequency_text(text: &str, interpolation: Interpolation) -> Result<Self, SpectrumError> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
            let f: f64 = cols
                .next()
                .ok_or_else(|| SpectrumError::Parse { line: idx + 1, message: "missing frequency column".into() })?
                .parse()
                .map_err(|e| SpectrumError::Parse { line: idx + 1, message: format!("frequency: {e}") })?;
            let s: f64 = cols
                .next()
                .ok_or_else(|| SpectrumError::Parse { line: idx + 1, message: "missing density column".into() })?
                .parse()
                .map_err(|e| SpectrumError::Parse { line: idx + 1, message: format!("density: {e}") })?;
            points.push((2.0 * std::f64::consts::PI * f, s));
        }
        Self::tabulated(points, interpolation)
    }

    /// The binary confusion background: flat 1e-34 /Hz on f in [1e-6, 1e-2] Hz.
    pub fn binary_confusion_default() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        StrainSpectrum {
            model: SpectrumModel::White { level: 1e-34 },
            band: (two_pi * 1e-6, two_pi * 1e-2),
        }
    }

    pub fn model(&self) -> &SpectrumModel {
        &self.model
    }

    /// Validity band as angular frequencies.
    pub fn band(&self) -> (PhysQuantity, PhysQuantity) {
        (PhysQuantity::per_second(self.band.0), PhysQuantity::per_second(self.band.1))
    }

    pub(crate) fn band_raw(&self) -> (f64, f64) {
        self.band
    }

    pub fn contains(&self, omega: PhysQuantity) -> Result<bool, SpectrumError> {
        let w = omega.expect_dim(Dim::FREQUENCY, "band query")?;
        Ok(w >= self.band.0 && w <= self.band.1)
    }

    /// Evaluates `S_h[omega]`; `omega` must lie in the valid band.
    pub fn evaluate(&self, omega: PhysQuantity) -> Result<PhysQuantity, SpectrumError> {
        let w = omega.expect_dim(Dim::FREQUENCY, "spectrum evaluation")?;
        Ok(PhysQuantity::per_hertz(self.evaluate_raw(w)?))
    }

    /// Bare-`f64` evaluation on the quadrature/synthesis hot path.
    pub(crate) fn evaluate_raw(&self, omega: f64) -> Result<f64, SpectrumError> {
        if omega < self.band.0 || omega > self.band.1 {
            return Err(SpectrumError::OutOfBand { omega, low: self.band.0, high: self.band.1 });
        }
        Ok(match &self.model {
            SpectrumModel::White { level } => *level,
            SpectrumModel::PowerLaw { amplitude, exponent, pivot } => {
                amplitude * (omega / pivot).powf(*exponent)
            }
            SpectrumModel::Tabulated { points, interpolation } => {
                interpolate(points, *interpolation, omega)
            }
        })
    }

    /// Maximum density over the band; used for analytic truncation bounds.
    pub(crate) fn max_in_band(&self) -> f64 {
        match &self.model {
            SpectrumModel::White { level } => *level,
            SpectrumModel::PowerLaw { amplitude, exponent, pivot } => {
                let at = |w: f64| amplitude * (w / pivot).powf(*exponent);
                at(self.band.0).max(at(self.band.1))
            }
            SpectrumModel::Tabulated { points, .. } => {
                points.iter().map(|&(_, s)| s).fold(0.0, f64::max)
            }
        }
    }

    /// Interior knot frequencies; quadrature panels must break here because
    /// interpolation kinks live at the knots.
    pub(crate) fn interior_knots(&self) -> Vec<f64> {
        match &self.model {
            SpectrumModel::Tabulated { points, .. } => points[1..points.len() - 1].iter().map(|&(w, _)| w).collect(),
            _ => Vec::new(),
        }
    }
}

fn check_band(low: PhysQuantity, high: PhysQuantity) -> Result<(f64, f64), SpectrumError> {
    let low = low.expect_dim(Dim::FREQUENCY, "band low edge")?;
    let high = high.expect_dim(Dim::FREQUENCY, "band high edge")?;
    if !(low >= 0.0 && low < high) {
        return Err(SpectrumError::InvalidBand { low, high });
    }
    Ok((low, high))
}

fn interpolate(points: &[(f64, f64)], rule: Interpolation, omega: f64) -> f64 {
    let idx = match points.binary_search_by(|&(w, _)| w.partial_cmp(&omega).unwrap()) {
        Ok(i) => return points[i].1,
        Err(i) => i,
    };
    // Band check guarantees an interior bracket.
    let (w0, s0) = points[idx - 1];
    let (w1, s1) = points[idx];
    match rule {
        Interpolation::Linear => {
            let t = (omega - w0) / (w1 - w0);
            s0 + t * (s1 - s0)
        }
        Interpolation::LogLog => {
            let t = (omega.ln() - w0.ln()) / (w1.ln() - w0.ln());
            (s0.ln() + t * (s1.ln() - s0.ln())).exp()
        }
    }
}

/// 16G/(5 c^5), the exact conversion between S_h and k_B T (or hbar omega n).
fn strain_per_energy() -> PhysQuantity {
    constants::gravitational_constant() * (16.0 / 5.0) / constants::speed_of_light().powi(5)
}

fn check_density(s_h: PhysQuantity) -> Result<PhysQuantity, SpectrumError> {
    let v = s_h.expect_dim(Dim::SPECTRAL_DENSITY, "strain density")?;
    if v < 0.0 {
        return Err(SpectrumError::NegativeDensity(v));
    }
    Ok(s_h)
}

/// Effective noise temperature T with S_h = 16G/(5c^5) k_B T.
pub fn to_noise_temperature(s_h: PhysQuantity) -> Result<PhysQuantity, SpectrumError> {
    let s_h = check_density(s_h)?;
    Ok(s_h / (strain_per_energy() * constants::boltzmann_constant()))
}

/// Inverse of [`to_noise_temperature`].
pub fn from_noise_temperature(t: PhysQuantity) -> Result<PhysQuantity, SpectrumError> {
    let v = t.expect_dim(Dim::TEMPERATURE, "noise temperature")?;
    if v < 0.0 {
        return Err(SpectrumError::NegativeTemperature(v));
    }
    Ok(strain_per_energy() * constants::boltzmann_constant() * t)
}

/// Mean graviton number per mode at angular frequency omega:
/// S_h = 16G/(5c^5) hbar omega n.
pub fn to_graviton_number(s_h: PhysQuantity, omega: PhysQuantity) -> Result<f64, SpectrumError> {
    let s_h = check_density(s_h)?;
    let w = omega.expect_dim(Dim::FREQUENCY, "graviton-number frequency")?;
    if w <= 0.0 {
        return Err(SpectrumError::NonPositiveFrequency(w));
    }
    let n = s_h / (strain_per_energy() * constants::reduced_planck_constant() * omega);
    Ok(n.as_dimensionless()?)
}

/// Temperature frequency Theta = S_h / t_P^2. Definitionally exact;
/// Theta equals (16/5) k_B T / hbar, i.e. it tracks the noise temperature
/// up to that fixed order-unity factor.
pub fn theta_gr(s_h: PhysQuantity) -> Result<PhysQuantity, SpectrumError> {
    let s_h = check_density(s_h)?;
    Ok(s_h / constants::planck_time().powi(2))
}

/// The three equivalent representations of one density at one frequency.
#[derive(Clone, Copy, Debug)]
pub struct BackgroundEquivalents {
    pub graviton_number: f64,
    pub noise_temperature: PhysQuantity,
    pub theta: PhysQuantity,
}

pub fn equivalents(s_h: PhysQuantity, omega: PhysQuantity) -> Result<BackgroundEquivalents, SpectrumError> {
    Ok(BackgroundEquivalents {
        graviton_number: to_graviton_number(s_h, omega)?,
        noise_temperature: to_noise_temperature(s_h)?,
        theta: theta_gr(s_h)?,
    })
}
