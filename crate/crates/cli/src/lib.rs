//! Scenario-driven front end: load one scenario file, run the requested
//! product, and emit machine-readable reports with unit sidecars.
//!
//! Output files are named `<scenario>.<product>.<format>` with a
//! `<scenario>.<product>.schema.json` sidecar; curve data for external
//! plotting goes to `<scenario>.<product>.*.csv`. All emission is
//! byte-deterministic for a fixed scenario and seed.

pub mod report;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

use gwdecoh::scenario::{load_scenario, OutputKind, Scenario};

use report::{
    atom_section, background_curve, background_section, filter_curve, montecarlo_section,
    phases_csv, photon_section, planck_csv, planck_section, planetary_section, units_schema,
    AtomSection, BackgroundSection, MontecarloSection, PhotonSection, PlanckScanSection,
    PlanetarySection,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Product {
    Background,
    Atom,
    Photon,
    Montecarlo,
    Planetary,
    Planck,
    Report,
}

impl Product {
    pub fn name(self) -> &'static str {
        match self {
            Product::Background => "background",
            Product::Atom => "atom",
            Product::Photon => "photon",
            Product::Montecarlo => "montecarlo",
            Product::Planetary => "planetary",
            Product::Planck => "planck",
            Product::Report => "report",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub config: PathBuf,
    pub product: Product,
    /// Overrides the scenario's simulation seed.
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub format: Format,
    /// Echo the parsed scenario as canonical JSON and compute nothing.
    pub dump_config: bool,
}

/// Everything the run produced, for callers that want the numbers as well
/// as the files.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub written: Vec<PathBuf>,
    pub dumped_config: Option<String>,
}

#[derive(Default, Serialize)]
struct CombinedReport {
    scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    background: Option<BackgroundSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    atom: Option<AtomSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    photon: Option<PhotonSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    montecarlo: Option<MontecarloSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    planetary: Option<PlanetarySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    planck: Option<PlanckScanSection>,
}

pub fn run(opts: &RunOptions, stdout: &mut dyn Write) -> Result<RunOutcome> {
    let (file, mut scenario) =
        load_scenario(&opts.config).with_context(|| format!("loading {}", opts.config.display()))?;

    if opts.dump_config {
        let dump = file.to_json();
        stdout.write_all(dump.as_bytes())?;
        return Ok(RunOutcome { written: Vec::new(), dumped_config: Some(dump) });
    }

    if let Some(seed) = opts.seed {
        scenario.simulation = scenario.simulation.take().map(|sim| sim.with_seed(seed));
    }

    fs::create_dir_all(&opts.out_dir)
        .with_context(|| format!("creating output directory {}", opts.out_dir.display()))?;

    let mut emitter = Emitter {
        scenario_name: scenario.name.clone(),
        out_dir: opts.out_dir.clone(),
        format: opts.format,
        written: Vec::new(),
    };

    match opts.product {
        Product::Report => {
            let mut combined = CombinedReport { scenario: scenario.name.clone(), ..Default::default() };
            for output in scenario.outputs.clone() {
                match output {
                    OutputKind::Background => {
                        combined.background = Some(run_background(&scenario, &mut emitter, stdout)?)
                    }
                    OutputKind::Atom => combined.atom = Some(run_atom(&scenario, &mut emitter, stdout)?),
                    OutputKind::Photon => {
                        combined.photon = Some(run_photon(&scenario, &mut emitter, stdout)?)
                    }
                    OutputKind::Montecarlo => {
                        combined.montecarlo = Some(run_montecarlo(&scenario, &mut emitter, stdout)?)
                    }
                    OutputKind::MontecarloPhases => {
                        // Written by the montecarlo product when requested.
                        if combined.montecarlo.is_none() {
                            combined.montecarlo = Some(run_montecarlo(&scenario, &mut emitter, stdout)?);
                        }
                    }
                    OutputKind::Planetary => {
                        combined.planetary = Some(run_planetary(&scenario, &mut emitter, stdout)?)
                    }
                    OutputKind::Planck => {
                        combined.planck = Some(run_planck(&scenario, &mut emitter, stdout)?)
                    }
                }
            }
            let mut all_units = Vec::new();
            all_units.extend_from_slice(report::BACKGROUND_UNITS);
            all_units.extend_from_slice(report::ATOM_UNITS);
            all_units.extend_from_slice(report::PHOTON_UNITS);
            all_units.extend_from_slice(report::MONTECARLO_UNITS);
            all_units.extend_from_slice(report::PLANETARY_UNITS);
            all_units.extend_from_slice(report::PLANCK_UNITS);
            emitter.emit("report", &combined, &units_schema_combined(&all_units))?;
            writeln!(stdout, "report: combined {} sections", scenario.outputs.len())?;
        }
        Product::Background => {
            run_background(&scenario, &mut emitter, stdout)?;
        }
        Product::Atom => {
            run_atom(&scenario, &mut emitter, stdout)?;
        }
        Product::Photon => {
            run_photon(&scenario, &mut emitter, stdout)?;
        }
        Product::Montecarlo => {
            run_montecarlo(&scenario, &mut emitter, stdout)?;
        }
        Product::Planetary => {
            run_planetary(&scenario, &mut emitter, stdout)?;
        }
        Product::Planck => {
            run_planck(&scenario, &mut emitter, stdout)?;
        }
    }

    for path in &emitter.written {
        writeln!(stdout, "wrote {}", path.display())?;
    }
    Ok(RunOutcome { written: emitter.written, dumped_config: None })
}

fn units_schema_combined(units: &[(&'static str, &'static str)]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (field, unit) in units {
        map.insert((*field).to_string(), serde_json::json!({ "unit": unit }));
    }
    serde_json::Value::Object(map)
}

fn run_background(
    scenario: &Scenario,
    emitter: &mut Emitter,
    stdout: &mut dyn Write,
) -> Result<BackgroundSection> {
    let section = background_section(&scenario.background)?;
    emitter.emit("background", &section, &units_schema(report::BACKGROUND_UNITS))?;
    emitter.emit_raw("background.curve.csv", &background_curve(&scenario.background, 200)?)?;
    writeln!(
        stdout,
        "background: S_h = {:.4e} /Hz at {:.4e} Hz, T = {:.4e} K, Theta = {:.4e} /s",
        section.s_h_per_hz, section.eval_frequency_hz, section.noise_temperature_k, section.theta_per_s
    )?;
    Ok(section)
}

fn instrument_of(scenario: &Scenario) -> Result<&gwdecoh::interferometer::InstrumentConfig> {
    scenario
        .instrument
        .as_ref()
        .with_context(|| format!("scenario '{}' has no instrument section", scenario.name))
}

fn run_atom(scenario: &Scenario, emitter: &mut Emitter, stdout: &mut dyn Write) -> Result<AtomSection> {
    let cfg = instrument_of(scenario)?;
    let section = atom_section(cfg, &scenario.background)?;
    emitter.emit("atom", &section, &units_schema(report::ATOM_UNITS))?;
    emitter.emit_raw("atom.filter.csv", &filter_curve(cfg, 201))?;
    writeln!(
        stdout,
        "atom: variance_atomic = {:.4e}, variance_total = {:.4e}, contrast = {:.12}",
        section.variance_atomic, section.variance_total, section.contrast
    )?;
    Ok(section)
}

fn run_photon(scenario: &Scenario, emitter: &mut Emitter, stdout: &mut dyn Write) -> Result<PhotonSection> {
    let cfg = instrument_of(scenario)?;
    let section = photon_section(cfg, &scenario.background)?;
    emitter.emit("photon", &section, &units_schema(report::PHOTON_UNITS))?;
    writeln!(
        stdout,
        "photon: variance_photonic = {:.4e}, sqrt(S_q) = {:.4e} m/sqrt(Hz)",
        section.variance_photonic, section.sqrt_s_q_m_per_sqrt_hz
    )?;
    Ok(section)
}

fn run_montecarlo(
    scenario: &Scenario,
    emitter: &mut Emitter,
    stdout: &mut dyn Write,
) -> Result<MontecarloSection> {
    let cfg = instrument_of(scenario)?;
    let sim = scenario
        .simulation
        .as_ref()
        .with_context(|| format!("scenario '{}' has no simulation section", scenario.name))?;
    let (section, result) = montecarlo_section(cfg, sim)?;
    emitter.emit("montecarlo", &section, &units_schema(report::MONTECARLO_UNITS))?;
    if scenario.outputs.contains(&OutputKind::MontecarloPhases) {
        emitter.emit_raw("montecarlo.phases.csv", &phases_csv(&result))?;
    }
    writeln!(
        stdout,
        "montecarlo: empirical variance = {:.4e} (se {:.2e}), contrast = {:.6}, psd dev = {:.4}",
        section.empirical_variance, section.standard_error, section.empirical_contrast,
        section.realized_psd_check
    )?;
    Ok(section)
}

fn run_planetary(
    scenario: &Scenario,
    emitter: &mut Emitter,
    stdout: &mut dyn Write,
) -> Result<PlanetarySection> {
    let orbit = scenario
        .orbit
        .as_ref()
        .with_context(|| format!("scenario '{}' has no orbit section", scenario.name))?;
    let section = planetary_section(orbit, &scenario.background)?;
    emitter.emit("planetary", &section, &units_schema(report::PLANETARY_UNITS))?;
    writeln!(
        stdout,
        "planetary: Gamma = {:.4e} /s, D/hbar^2 = {:.4e} /(m^2 s), decoherence time = {:.4e} s",
        section.gamma_gr_per_s, section.d_over_hbar2_per_m2_s, section.decoherence_time_s
    )?;
    Ok(section)
}

fn run_planck(
    scenario: &Scenario,
    emitter: &mut Emitter,
    stdout: &mut dyn Write,
) -> Result<PlanckScanSection> {
    let cfg = instrument_of(scenario)?;
    let grid = scenario
        .planck
        .as_ref()
        .with_context(|| format!("scenario '{}' has no planck section", scenario.name))?;
    let section = planck_section(cfg, &scenario.background, grid)?;
    // The scan is tabular: CSV is its native format regardless of --format.
    emitter.emit_raw("planck.csv", &planck_csv(&section))?;
    if emitter.format == Format::Json {
        emitter.emit("planck", &section, &units_schema(report::PLANCK_UNITS))?;
    } else {
        emitter.emit_schema("planck", &units_schema(report::PLANCK_UNITS))?;
    }
    writeln!(
        stdout,
        "planck: {} grid points, {} contour crossings",
        section.rows.len(),
        section.contour.len()
    )?;
    Ok(section)
}

struct Emitter {
    scenario_name: String,
    out_dir: PathBuf,
    format: Format,
    written: Vec<PathBuf>,
}

impl Emitter {
    fn path_for(&self, suffix: &str) -> PathBuf {
        self.out_dir.join(format!("{}.{suffix}", self.scenario_name))
    }

    fn write(&mut self, path: PathBuf, bytes: &[u8]) -> Result<()> {
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    /// Emits a section in the selected format plus its unit sidecar.
    fn emit<S: Serialize>(&mut self, product: &str, section: &S, schema: &serde_json::Value) -> Result<()> {
        let body = match self.format {
            Format::Json => {
                let mut text = serde_json::to_string_pretty(section)?;
                text.push('\n');
                text
            }
            Format::Csv => flat_csv(section)?,
        };
        self.write(self.path_for(&format!("{product}.{}", self.format.extension())), body.as_bytes())?;
        self.emit_schema(product, schema)
    }

    fn emit_schema(&mut self, product: &str, schema: &serde_json::Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(schema)?;
        text.push('\n');
        self.write(self.path_for(&format!("{product}.schema.json")), text.as_bytes())
    }

    fn emit_raw(&mut self, suffix: &str, body: &str) -> Result<()> {
        self.write(self.path_for(suffix), body.as_bytes())
    }
}

/// Header row of field names plus one row of values. Nested objects flatten
/// to dotted names; arrays are not representable here.
fn flat_csv<S: Serialize>(section: &S) -> Result<String> {
    let value = serde_json::to_value(section)?;
    let mut fields = Vec::new();
    flatten_value(String::new(), &value, &mut fields)?;
    let header: Vec<&str> = fields.iter().map(|(k, _)| k.as_str()).collect();
    let row: Vec<&str> = fields.iter().map(|(_, v)| v.as_str()).collect();
    Ok(format!("{}\n{}\n", header.join(","), row.join(",")))
}

fn flatten_value(prefix: String, value: &serde_json::Value, out: &mut Vec<(String, String)>) -> Result<()> {
    match value {
        serde_json::Value::Object(map) => {
            for (key, inner) in map {
                let name = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                flatten_value(name, inner, out)?;
            }
        }
        // Tabular data lives in its dedicated CSV; the flat record only
        // carries the row count.
        serde_json::Value::Array(items) => out.push((format!("{prefix}.n"), items.len().to_string())),
        serde_json::Value::Null => out.push((prefix, String::new())),
        serde_json::Value::String(s) => out.push((prefix, s.replace(',', ";"))),
        other => out.push((prefix, other.to_string())),
    }
    Ok(())
}
