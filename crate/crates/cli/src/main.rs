use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gwdecoh_cli::{run, Format, Product, RunOptions};

#[derive(Parser)]
#[command(
    name = "gwdecoh",
    version,
    about = "Gravitational-wave decoherence budgets for atom interferometers and planetary orbits",
    after_help = "Reports are written as <scenario>.<product>.<format> with a \
                  <scenario>.<product>.schema.json unit sidecar."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum inspection and its equivalent representations.
    Background(Common),
    /// Atomic dephasing variances (closed form plus band quadrature) and contrast.
    Atom(Common),
    /// Photon-path variance and equivalent mirror displacement noise.
    Photon(Common),
    /// Seeded stochastic oracle with the analytic comparison table.
    Montecarlo(Common),
    /// Orbit damping, momentum diffusion, decoherence times, channel table.
    Planetary(Common),
    /// Kinetic-energy scaling scan with the unit-variance contour (CSV).
    Planck(Common),
    /// Every product requested by the scenario's outputs list, combined.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the scenario's Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Report format (the unit sidecar is always JSON).
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Echo the parsed scenario as canonical JSON and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (product, common) = match &cli.command {
        Command::Background(c) => (Product::Background, c),
        Command::Atom(c) => (Product::Atom, c),
        Command::Photon(c) => (Product::Photon, c),
        Command::Montecarlo(c) => (Product::Montecarlo, c),
        Command::Planetary(c) => (Product::Planetary, c),
        Command::Planck(c) => (Product::Planck, c),
        Command::Report(c) => (Product::Report, c),
    };
    let opts = RunOptions {
        config: common.config.clone(),
        product,
        seed: common.seed,
        out_dir: common.out.clone(),
        format: common.format.into(),
        dump_config: common.dump_config,
    };
    let mut stdout = std::io::stdout().lock();
    match run(&opts, &mut stdout) {
        Ok(_) => ExitCode::SUCCESS,
        Err(err) => {
            let _ = writeln!(std::io::stderr(), "gwdecoh: error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
