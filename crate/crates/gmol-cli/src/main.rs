//! `gmol`: single-photon transport calculator for two exchange-coupled
//! multi-point emitters on parallel waveguides.

use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gmol_cli::commands;
use gmol_cli::config::{Coords, RunConfig};
use gmol_cli::CliError;

#[derive(Parser)]
#[command(
    name = "gmol",
    version,
    about = "Single-photon transport for a two-emitter molecule on parallel waveguides"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dense detuning sweep: spectrum.csv dataset plus spectrum.json summary.
    Spectrum(RunArgs),
    /// Cooperativity map with the C = 1 boundary (bare coordinates).
    PhaseDiagram(RunArgs),
    /// Optimal-transfer operating points and the anticrossing gap.
    Optimize(RunArgs),
    /// Self-consistent resonance roots across the atomic-detuning axis.
    Resonances(RunArgs),
    /// Cross-check the closed forms against the exact linear system.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's out_dir, else ".").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Grid resolution override as COLSxROWS, e.g. 401x401.
    #[arg(long)]
    resolution: Option<String>,
    /// Axis-convention override.
    #[arg(long, value_enum)]
    coords: Option<CoordsArg>,
    /// Force ideal chiral coupling.
    #[arg(long)]
    chiral: bool,
    /// Fail (exit 4) if any grid cell hits the scattering pole.
    #[arg(long)]
    strict: bool,
    /// Worker threads for grid evaluation; affects wall time only.
    #[arg(long)]
    workers: Option<usize>,
    /// Override for the |C−1| window of the critical-regime label.
    #[arg(long)]
    tolerance_critical: Option<f64>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Run configuration (TOML); mutually exclusive with --random.
    #[arg(long, required_unless_present = "random", conflicts_with = "random")]
    config: Option<PathBuf>,
    /// Check this many random configurations instead of a config file.
    #[arg(long, requires = "seed")]
    random: Option<usize>,
    /// RNG seed for --random; required so failures are reproducible.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for validate.json (default: config out_dir, else ".").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat pole cells as validation failures (config mode).
    #[arg(long)]
    strict: bool,
    /// Worker threads; affects wall time only.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Copy, Clone, ValueEnum)]
enum CoordsArg {
    Tilde,
    Bare,
}

impl From<CoordsArg> for Coords {
    fn from(c: CoordsArg) -> Coords {
        match c {
            CoordsArg::Tilde => Coords::Tilde,
            CoordsArg::Bare => Coords::Bare,
        }
    }
}

fn parse_resolution(s: &str) -> Result<(u32, u32), CliError> {
    let err = || CliError::Config(format!("resolution must look like 401x401, got {s:?}"));
    let (cols, rows) = s.split_once('x').ok_or_else(err)?;
    let cols: u32 = cols.parse().map_err(|_| err())?;
    let rows: u32 = rows.parse().map_err(|_| err())?;
    if cols == 0 || rows == 0 {
        return Err(err());
    }
    Ok((cols, rows))
}

fn init_workers(workers: Option<usize>) -> Result<(), CliError> {
    let Some(k) = workers else { return Ok(()) };
    if k == 0 {
        return Err(CliError::Config("--workers must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size worker pool: {e}")))
}

/// Loads the config and applies command-line overrides, re-validating the
/// result so an override cannot smuggle in an invalid combination.
fn load_config(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(spec) = &args.resolution {
        let (cols, rows) = parse_resolution(spec)?;
        config.resolution_probe = cols;
        config.resolution_atoms = rows;
    }
    if let Some(coords) = args.coords {
        config.coords = coords.into();
    }
    if args.chiral {
        config.chiral = true;
    }
    if let Some(tol) = args.tolerance_critical {
        config.tolerance_critical = tol;
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(flag: &Option<PathBuf>, config: Option<&RunConfig>) -> PathBuf {
    flag.clone()
        .or_else(|| config.and_then(|c| c.out_dir.as_ref()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Loads and overrides the config, sizes the worker pool, and resolves the
/// output directory.
fn setup(args: &RunArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let config = load_config(args)?;
    init_workers(args.workers.or(config.workers.map(|w| w as usize)))?;
    let dir = out_dir(&args.out, Some(&config));
    Ok((config, dir))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum(args) => {
            let (config, dir) = setup(&args)?;
            commands::cmd_spectrum(&config, &dir, args.strict)
        }
        Command::PhaseDiagram(args) => {
            let (config, dir) = setup(&args)?;
            commands::cmd_phase_diagram(&config, &dir)
        }
        Command::Optimize(args) => {
            let (config, dir) = setup(&args)?;
            commands::cmd_optimize(&config, &dir)
        }
        Command::Resonances(args) => {
            let (config, dir) = setup(&args)?;
            commands::cmd_resonances(&config, &dir)
        }
        Command::Validate(args) => {
            init_workers(args.workers)?;
            match (args.random, &args.config) {
                (Some(draws), _) => {
                    let seed = args.seed.expect("clap enforces --seed with --random");
                    let dir = out_dir(&args.out, None);
                    commands::cmd_validate_random(draws, seed, &dir)
                }
                (None, Some(path)) => {
                    let config = RunConfig::load(path)?;
                    let dir = out_dir(&args.out, Some(&config));
                    commands::cmd_validate_config(&config, &dir, args.strict)
                }
                (None, None) => unreachable!("clap requires --config or --random"),
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        process::exit(e.exit_code());
    }
}
