//! Scenario configuration: a single JSON document describing one background,
//! one instrument and/or one orbit, an optional simulation, and the products
//! to compute.
//!
//! The file format uses ordinary frequencies in Hz (band edges, pivots,
//! tabulated points, the laser line); everything is converted to angular
//! frequency on ingestion. Field names carry their units.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::background::{Interpolation, SpectrumError, StrainSpectrum};
use crate::constants;
use crate::interferometer::{InstrumentConfig, InstrumentError};
use crate::montecarlo::{SimulationConfig, SimulationError};
use crate::planckscale::{ScalingError, ScanGrid};
use crate::planetary::{ExternalChannels, OrbitConfig, OrbitError};
use crate::quantity::PhysQuantity;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing scenario{}: {message}", key.as_ref().map(|k| format!(" key '{k}'")).unwrap_or_default())]
    Parse { key: Option<String>, message: String },
    #[error("scenario '{name}': at least one of 'instrument' or 'orbit' must be present")]
    InstrumentOrOrbitRequired { name: String },
    #[error("unknown output '{0}' (known: background, atom, photon, montecarlo, montecarlo-phases, planetary, planck)")]
    UnknownOutput(String),
    #[error("output '{output}' requires the '{needs}' section")]
    MissingSection { output: &'static str, needs: &'static str },
    #[error("tabulated spectrum needs exactly one of 'file' or 'points_hz'")]
    TabulatedSource,
    #[error("background: {0}")]
    Spectrum(#[from] SpectrumError),
    #[error("instrument: {0}")]
    Instrument(#[from] InstrumentError),
    #[error("orbit: {0}")]
    Orbit(#[from] OrbitError),
    #[error("simulation: {0}")]
    Simulation(#[from] SimulationError),
    #[error("planck scan: {0}")]
    Planck(#[from] ScalingError),
}

/// Raw JSON document; round-trips bit-exactly through serde.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub background: SpectrumSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instrument: Option<InstrumentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planck: Option<PlanckSection>,
    pub outputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumSection {
    White {
        level_per_hz: f64,
        band_hz: [f64; 2],
    },
    PowerLaw {
        amplitude_per_hz: f64,
        exponent: f64,
        pivot_hz: f64,
        band_hz: [f64; 2],
    },
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points_hz: Option<Vec<[f64; 2]>>,
        #[serde(default)]
        interpolation: InterpolationSection,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationSection {
    #[default]
    LogLog,
    Linear,
}

impl From<InterpolationSection> for Interpolation {
    fn from(value: InterpolationSection) -> Self {
        match value {
            InterpolationSection::LogLog => Interpolation::LogLog,
            InterpolationSection::Linear => Interpolation::Linear,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentSection {
    pub atom_mass_kg: f64,
    pub atom_velocity_m_per_s: f64,
    pub arm_time_s: f64,
    pub sin_aperture: f64,
    pub laser_frequency_hz: f64,
    pub photon_path_m: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSection {
    pub primary_mass_kg: f64,
    pub secondary_mass_kg: f64,
    pub separation_m: f64,
    /// Superposition separation probed by the decoherence products;
    /// defaults to the Planck length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displacement_m: Option<f64>,
    /// Exposure time for the decoherence products; defaults to 1 s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exposure_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channels: Option<ChannelSection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub gamma_em_per_s: f64,
    pub gamma_tides_per_s: f64,
    pub t_em_k: f64,
    pub t_tides_k: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub seed: u64,
    pub n_realizations: usize,
    pub dt_s: f64,
    pub duration_s: f64,
    /// Spectrum the oracle synthesizes; its band must be resolvable by
    /// (dt, duration), which astrophysical micro-hertz bands are not.
    pub spectrum: SpectrumSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanckSection {
    pub mass_min_kg: f64,
    pub mass_max_kg: f64,
    pub n_masses: usize,
    pub velocity_min_m_per_s: f64,
    pub velocity_max_m_per_s: f64,
    pub n_velocities: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutputKind {
    Background,
    Atom,
    Photon,
    Montecarlo,
    MontecarloPhases,
    Planetary,
    Planck,
}

impl OutputKind {
    pub fn parse(s: &str) -> Result<Self, ScenarioError> {
        Ok(match s {
            "background" => OutputKind::Background,
            "atom" => OutputKind::Atom,
            "photon" => OutputKind::Photon,
            "montecarlo" => OutputKind::Montecarlo,
            "montecarlo-phases" => OutputKind::MontecarloPhases,
            "planetary" => OutputKind::Planetary,
            "planck" => OutputKind::Planck,
            other => return Err(ScenarioError::UnknownOutput(other.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            OutputKind::Background => "background",
            OutputKind::Atom => "atom",
            OutputKind::Photon => "photon",
            OutputKind::Montecarlo => "montecarlo",
            OutputKind::MontecarloPhases => "montecarlo-phases",
            OutputKind::Planetary => "planetary",
            OutputKind::Planck => "planck",
        }
    }
}

/// Orbit scenario: the orbit plus the decoherence probe parameters.
#[derive(Clone, Debug)]
pub struct OrbitScenario {
    pub orbit: OrbitConfig,
    pub displacement: PhysQuantity,
    pub exposure: PhysQuantity,
    pub channels: ExternalChannels,
}

/// A validated scenario ready for computation.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub background: StrainSpectrum,
    pub instrument: Option<InstrumentConfig>,
    pub orbit: Option<OrbitScenario>,
    pub simulation: Option<SimulationConfig>,
    pub planck: Option<ScanGrid>,
    pub outputs: Vec<OutputKind>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path)
            .map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Parses JSON, reporting the path of the offending key on failure.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|err| {
            let path = err.path().to_string();
            ScenarioError::Parse {
                key: (path != ".").then_some(path),
                message: err.inner().to_string(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("scenario serialization");
        out.push('\n');
        out
    }

    /// Validates and converts into typed objects. `base_dir` anchors
    /// relative tabulated-spectrum file paths.
    pub fn validate(&self, base_dir: &Path) -> Result<Scenario, ScenarioError> {
        let background = build_spectrum(&self.background, base_dir)?;

        let instrument = self
            .instrument
            .as_ref()
            .map(|section| {
                InstrumentConfig::new(
                    PhysQuantity::kilograms(section.atom_mass_kg),
                    PhysQuantity::meters_per_second(section.atom_velocity_m_per_s),
                    PhysQuantity::seconds(section.arm_time_s),
                    section.sin_aperture,
                    PhysQuantity::per_second(TWO_PI * section.laser_frequency_hz),
                    PhysQuantity::meters(section.photon_path_m),
                )
            })
            .transpose()?;

        let orbit = self
            .orbit
            .as_ref()
            .map(|section| -> Result<OrbitScenario, ScenarioError> {
                let orbit = OrbitConfig::new(
                    PhysQuantity::kilograms(section.primary_mass_kg),
                    PhysQuantity::kilograms(section.secondary_mass_kg),
                    PhysQuantity::meters(section.separation_m),
                )?;
                let displacement = section
                    .displacement_m
                    .map(PhysQuantity::meters)
                    .unwrap_or_else(constants::planck_length);
                let exposure = PhysQuantity::seconds(section.exposure_s.unwrap_or(1.0));
                let channels = match &section.channels {
                    Some(c) => ExternalChannels {
                        gamma_em: PhysQuantity::per_second(c.gamma_em_per_s),
                        gamma_tides: PhysQuantity::per_second(c.gamma_tides_per_s),
                        t_em: PhysQuantity::kelvins(c.t_em_k),
                        t_tides: PhysQuantity::kelvins(c.t_tides_k),
                    },
                    None => ExternalChannels::moon_defaults(),
                };
                Ok(OrbitScenario { orbit, displacement, exposure, channels })
            })
            .transpose()?;

        let simulation = self
            .simulation
            .as_ref()
            .map(|section| -> Result<SimulationConfig, ScenarioError> {
                let spectrum = build_spectrum(&section.spectrum, base_dir)?;
                Ok(SimulationConfig::new(
                    section.seed,
                    section.n_realizations,
                    PhysQuantity::seconds(section.dt_s),
                    PhysQuantity::seconds(section.duration_s),
                    spectrum,
                )?)
            })
            .transpose()?;

        let planck = self
            .planck
            .as_ref()
            .map(|section| {
                ScanGrid::logarithmic(
                    (
                        PhysQuantity::kilograms(section.mass_min_kg),
                        PhysQuantity::kilograms(section.mass_max_kg),
                    ),
                    section.n_masses,
                    (
                        PhysQuantity::meters_per_second(section.velocity_min_m_per_s),
                        PhysQuantity::meters_per_second(section.velocity_max_m_per_s),
                    ),
                    section.n_velocities,
                )
            })
            .transpose()?;

        if instrument.is_none() && orbit.is_none() {
            return Err(ScenarioError::InstrumentOrOrbitRequired { name: self.name.clone() });
        }

        let outputs = self
            .outputs
            .iter()
            .map(|s| OutputKind::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
        for output in &outputs {
            let missing = match output {
                OutputKind::Atom | OutputKind::Photon | OutputKind::Planck
                    if instrument.is_none() =>
                {
                    Some("instrument")
                }
                OutputKind::Planck if planck.is_none() => Some("planck"),
                OutputKind::Montecarlo | OutputKind::MontecarloPhases if instrument.is_none() => {
                    Some("instrument")
                }
                OutputKind::Montecarlo | OutputKind::MontecarloPhases if simulation.is_none() => {
                    Some("simulation")
                }
                OutputKind::Planetary if orbit.is_none() => Some("orbit"),
                _ => None,
            };
            if let Some(needs) = missing {
                return Err(ScenarioError::MissingSection { output: output.name(), needs });
            }
        }

        Ok(Scenario {
            name: self.name.clone(),
            background,
            instrument,
            orbit,
            simulation,
            planck,
            outputs,
        })
    }
}

/// Loads and validates in one step.
pub fn load_scenario(path: &Path) -> Result<(ScenarioFile, Scenario), ScenarioError> {
    let file = ScenarioFile::load(path)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let scenario = file.validate(base)?;
    Ok((file, scenario))
}

fn build_spectrum(section: &SpectrumSection, base_dir: &Path) -> Result<StrainSpectrum, ScenarioError> {
    Ok(match section {
        SpectrumSection::White { level_per_hz, band_hz } => StrainSpectrum::white(
            PhysQuantity::per_hertz(*level_per_hz),
            PhysQuantity::per_second(TWO_PI * band_hz[0]),
            PhysQuantity::per_second(TWO_PI * band_hz[1]),
        )?,
        SpectrumSection::PowerLaw { amplitude_per_hz, exponent, pivot_hz, band_hz } => {
            StrainSpectrum::power_law(
                PhysQuantity::per_hertz(*amplitude_per_hz),
                *exponent,
                PhysQuantity::per_second(TWO_PI * pivot_hz),
                PhysQuantity::per_second(TWO_PI * band_hz[0]),
                PhysQuantity::per_second(TWO_PI * band_hz[1]),
            )?
        }
        SpectrumSection::Tabulated { file, points_hz, interpolation } => {
            match (file, points_hz) {
                (Some(file), None) => {
                    let path = base_dir.join(file);
                    StrainSpectrum::from_frequency_file(&path, (*interpolation).into())?
                }
                (None, Some(points)) => {
                    let table = points.iter().map(|&[f, s]| (TWO_PI * f, s)).collect();
                    StrainSpectrum::tabulated(table, (*interpolation).into())?
                }
                _ => return Err(ScenarioError::TabulatedSource),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn minimal_json() -> String {
        r#"{
            "name": "test",
            "background": { "model": "white", "level_per_hz": 1e-34, "band_hz": [1e-6, 1e-2] },
            "instrument": {
                "atom_mass_kg": 2.207e-25,
                "atom_velocity_m_per_s": 0.2,
                "arm_time_s": 1.0,
                "sin_aperture": 0.043,
                "laser_frequency_hz": 3.52e14,
                "photon_path_m": 1.0
            },
            "outputs": ["background", "atom", "photon"]
        }"#
        .to_string()
    }

    #[test]
    fn parse_and_validate_minimal() {
        let file = ScenarioFile::from_json(&minimal_json()).unwrap();
        let scenario = file.validate(Path::new(".")).unwrap();
        assert_eq!(scenario.name, "test");
        let cfg = scenario.instrument.unwrap();
        assert!((cfg.laser_angular_frequency().value() - TWO_PI * 3.52e14).abs() < 1.0);
        assert_eq!(scenario.outputs.len(), 3);
        let (lo, hi) = scenario.background.band();
        assert!((lo.value() - TWO_PI * 1e-6).abs() < 1e-18);
        assert!((hi.value() - TWO_PI * 1e-2).abs() < 1e-14);
    }

    #[test]
    fn parse_error_names_the_key() {
        let bad = minimal_json().replace("\"arm_time_s\": 1.0", "\"arm_time_s\": \"oops\"");
        match ScenarioFile::from_json(&bad) {
            Err(ScenarioError::Parse { key: Some(key), .. }) => {
                assert!(key.contains("arm_time_s"), "key path: {key}");
            }
            other => panic!("expected Parse error with key, got {other:?}"),
        }
    }

    #[test]
    fn json_roundtrip_is_equivalent() {
        let file = ScenarioFile::from_json(&minimal_json()).unwrap();
        let dumped = file.to_json();
        let reparsed = ScenarioFile::from_json(&dumped).unwrap();
        assert_eq!(file, reparsed);
    }

    #[test]
    fn requires_instrument_or_orbit() {
        let json = r#"{
            "name": "empty",
            "background": { "model": "white", "level_per_hz": 1e-34, "band_hz": [1e-6, 1e-2] },
            "outputs": ["background"]
        }"#;
        let file = ScenarioFile::from_json(json).unwrap();
        assert!(matches!(
            file.validate(Path::new(".")),
            Err(ScenarioError::InstrumentOrOrbitRequired { .. })
        ));
    }

    #[test]
    fn outputs_must_be_computable() {
        let json = minimal_json().replace(
            "[\"background\", \"atom\", \"photon\"]",
            "[\"planetary\"]",
        );
        let file = ScenarioFile::from_json(&json).unwrap();
        assert!(matches!(
            file.validate(Path::new(".")),
            Err(ScenarioError::MissingSection { output: "planetary", needs: "orbit" })
        ));

        let json = minimal_json().replace(
            "[\"background\", \"atom\", \"photon\"]",
            "[\"montecarlo\"]",
        );
        let file = ScenarioFile::from_json(&json).unwrap();
        assert!(matches!(
            file.validate(Path::new(".")),
            Err(ScenarioError::MissingSection { output: "montecarlo", needs: "simulation" })
        ));

        let json = minimal_json().replace(
            "[\"background\", \"atom\", \"photon\"]",
            "[\"nonsense\"]",
        );
        let file = ScenarioFile::from_json(&json).unwrap();
        assert!(matches!(file.validate(Path::new(".")), Err(ScenarioError::UnknownOutput(_))));
    }

    #[test]
    fn tabulated_from_file_resolves_relative_path() {
        let dir = tempfile::tempdir().unwrap();
        let spec_path = dir.path().join("spec.txt");
        writeln!(
            fs::File::create(&spec_path).unwrap(),
            "# f S\n1e-6 1e-34\n1e-2 1e-35"
        )
        .unwrap();
        let json = format!(
            r#"{{
                "name": "tab",
                "background": {{ "model": "tabulated", "file": "spec.txt", "interpolation": "log_log" }},
                "instrument": {{
                    "atom_mass_kg": 2.207e-25,
                    "atom_velocity_m_per_s": 0.2,
                    "arm_time_s": 1.0,
                    "sin_aperture": 0.043,
                    "laser_frequency_hz": 3.52e14,
                    "photon_path_m": 1.0
                }},
                "outputs": ["background"]
            }}"#
        );
        let file = ScenarioFile::from_json(&json).unwrap();
        let scenario = file.validate(dir.path()).unwrap();
        let (lo, _) = scenario.background.band();
        assert!((lo.value() - TWO_PI * 1e-6).abs() < 1e-18);

        // Both or neither source is an error.
        let bad = json.replace("\"file\": \"spec.txt\",", "");
        let file = ScenarioFile::from_json(&bad).unwrap();
        assert!(matches!(file.validate(dir.path()), Err(ScenarioError::TabulatedSource)));
    }
}
