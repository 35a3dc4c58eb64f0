//! Command-line front door: single evaluations, figure sweeps, and the
//! built-in verification suite.
//!
//! Exit codes: 0 success, 2 usage or config-file errors, 3 domain errors
//! (rejected preconditions), 4 I/O errors, 1 selftest failure.

mod config;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{resolve, OutputFormat, Overrides, Resolved, Tool};
use gravnu::coherence::{coherence_mu, CoherenceScenario};
use gravnu::geometry::{ApproxMode, Direction, GravitySource};
use gravnu::lgi::{self, LgiScenario};
use gravnu::oscillation::{Flavor, OscillationParams};
use gravnu::sweep::{self, fmt_g17, Preset, TOOL_VERSION};
use gravnu::units::UnitsMode;

#[derive(Parser)]
#[command(
    name = "gravnu",
    version,
    about = "Neutrino oscillation observables in a Schwarzschild background"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Leggett-Garg K3: one scenario, or a flat-vs-curved energy sweep.
    K3(ScenarioArgs),
    /// l1-norm coherence: one scenario, or a flat-vs-curved baseline sweep.
    Coherence(ScenarioArgs),
    /// Run the built-in verification suites.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Run the full grid instead of a single evaluation (implied by --preset).
    #[arg(long)]
    sweep: bool,
    /// Published parameter set: fig1a, fig1b (k3), fig2a, fig2b (coherence).
    #[arg(long)]
    preset: Option<String>,
    /// Flat JSON config file; keys are long flag names with underscores.
    /// Defaults to $GRAVNU_CONFIG when set.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Gravitational mass parameter GM in km (0 = flat spacetime).
    #[arg(long, allow_negative_numbers = true)]
    gm: Option<f64>,
    /// Source radius in km.
    #[arg(long, allow_negative_numbers = true)]
    r_source: Option<f64>,
    /// Proper baseline L_p in km.
    #[arg(long, allow_negative_numbers = true)]
    baseline: Option<f64>,
    /// Propagation direction: outward | inward.
    #[arg(long)]
    direction: Option<String>,
    /// Energy in TeV (at infinity for k3, local at the detector for coherence).
    #[arg(long, allow_negative_numbers = true)]
    energy: Option<f64>,
    /// Energy sweep window in TeV (k3 sweeps).
    #[arg(long, allow_negative_numbers = true)]
    energy_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    energy_max: Option<f64>,
    /// Baseline sweep window in km (coherence sweeps).
    #[arg(long, allow_negative_numbers = true)]
    baseline_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    baseline_max: Option<f64>,
    /// Grid points per sweep.
    #[arg(long)]
    steps: Option<usize>,
    /// Measured flavor projector: e | mu.
    #[arg(long)]
    alpha: Option<String>,
    /// Units convention: physical | paper_figure.
    #[arg(long)]
    units: Option<String>,
    /// Geometric fidelity: weak | exact.
    #[arg(long)]
    approx: Option<String>,
    /// Output format: csv | json.
    #[arg(long)]
    format: Option<String>,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Seed for the randomized suites; a fixed seed reproduces the sample.
    #[arg(long, default_value_t = 0x6772_6176)]
    seed: u64,
}

enum AppError {
    Usage(String),
    Domain(gravnu::Error),
    Io(std::io::Error),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Domain(_) => 3,
            AppError::Io(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            AppError::Usage(msg) => msg.clone(),
            AppError::Domain(err) => err.to_string(),
            AppError::Io(err) => err.to_string(),
        }
    }
}

impl From<gravnu::Error> for AppError {
    fn from(err: gravnu::Error) -> Self {
        AppError::Domain(err)
    }
}

impl From<std::io::Error> for AppError {
    fn from(err: std::io::Error) -> Self {
        AppError::Io(err)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::K3(args) => run_scenario(Tool::K3, args),
        Command::Coherence(args) => run_scenario(Tool::Coherence, args),
        Command::Selftest(args) => {
            return if selftest::run(args.seed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn parse_with<T>(
    name: &str,
    value: Option<&str>,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Option<T>, AppError> {
    match value {
        None => Ok(None),
        Some(s) => parse(s)
            .map(Some)
            .ok_or_else(|| AppError::Usage(format!("invalid value `{s}` for --{name}"))),
    }
}

fn overrides_from_args(args: &ScenarioArgs) -> Result<Overrides, AppError> {
    Ok(Overrides {
        preset: parse_with("preset", args.preset.as_deref(), Preset::parse)?,
        direction: parse_with("direction", args.direction.as_deref(), Direction::parse)?,
        alpha: parse_with("alpha", args.alpha.as_deref(), Flavor::parse)?,
        units: parse_with("units", args.units.as_deref(), UnitsMode::parse)?,
        approx: parse_with("approx", args.approx.as_deref(), ApproxMode::parse)?,
        format: parse_with("format", args.format.as_deref(), OutputFormat::parse)?,
        gm: args.gm,
        r_source: args.r_source,
        baseline: args.baseline,
        energy: args.energy,
        energy_min: args.energy_min,
        energy_max: args.energy_max,
        baseline_min: args.baseline_min,
        baseline_max: args.baseline_max,
        steps: args.steps,
    })
}

fn run_scenario(tool: Tool, args: ScenarioArgs) -> Result<(), AppError> {
    let config_path = args
        .config
        .clone()
        .or_else(|| std::env::var_os("GRAVNU_CONFIG").map(PathBuf::from));
    let from_config = match &config_path {
        Some(path) => Overrides::from_config_file(path).map_err(AppError::Usage)?,
        None => Overrides::default(),
    };
    let from_flags = overrides_from_args(&args)?;
    let merged = from_config.layered(from_flags);
    // A preset names a published figure, which is always a sweep.
    let sweep = args.sweep || merged.preset.is_some();
    let resolved = resolve(tool, sweep, merged, args.out).map_err(AppError::Usage)?;

    let output = if resolved.sweep {
        let result = sweep::run(&resolved.sweep_spec())?;
        match resolved.format {
            OutputFormat::Csv => sweep::to_csv(&result),
            OutputFormat::Json => sweep::to_json(&result),
        }
    } else {
        single_evaluation(&resolved)?
    };

    match &resolved.out {
        Some(path) => std::fs::write(path, output)?,
        None => {
            use std::io::Write;
            // A closed pipe downstream is not an error.
            if let Err(err) = std::io::stdout().write_all(output.as_bytes()) {
                if err.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(err.into());
                }
            }
        }
    }
    Ok(())
}

fn single_evaluation(resolved: &Resolved) -> Result<String, AppError> {
    let params = OscillationParams::new(resolved.theta, resolved.delta_m2, resolved.units)?;
    let source = GravitySource::new(resolved.gm)?;
    let values: Vec<(&str, String)> = match resolved.tool {
        Tool::K3 => {
            let scenario = LgiScenario::new(
                params,
                source,
                resolved.direction,
                resolved.r_source,
                resolved.baseline,
                resolved.energy,
                resolved.alpha,
                resolved.approx,
            )?;
            let eval = lgi::evaluate(&scenario)?;
            vec![
                ("k3", fmt_g17(eval.k3)),
                ("c_0_l", fmt_g17(eval.c_0_l)),
                ("c_l_2l", fmt_g17(eval.c_l_2l)),
                ("c_0_2l", fmt_g17(eval.c_0_2l)),
                ("violation", eval.violates.to_string()),
            ]
        }
        Tool::Coherence => {
            let scenario = CoherenceScenario::new(
                params,
                source,
                resolved.direction,
                resolved.r_source,
                resolved.baseline,
                resolved.energy,
                resolved.approx,
            )?;
            vec![("coherence", fmt_g17(coherence_mu(&scenario)?))]
        }
    };

    Ok(match resolved.format {
        OutputFormat::Csv => {
            let mut out = format!("# tool = {TOOL_VERSION}\n");
            for (k, v) in resolved.echo_pairs() {
                out.push_str(&format!("# {k} = {v}\n"));
            }
            for (k, v) in &values {
                out.push_str(&format!("{k} = {v}\n"));
            }
            out
        }
        OutputFormat::Json => {
            let mut out = String::from("{\n  \"config\": {\n");
            out.push_str(&format!("    \"tool\": \"{TOOL_VERSION}\""));
            for (k, v) in resolved.echo_pairs() {
                if v.parse::<f64>().is_ok() {
                    out.push_str(&format!(",\n    \"{k}\": {v}"));
                } else {
                    out.push_str(&format!(",\n    \"{k}\": \"{v}\""));
                }
            }
            out.push_str("\n  }");
            for (k, v) in &values {
                // Floats and booleans both serialize bare.
                out.push_str(&format!(",\n  \"{k}\": {v}"));
            }
            out.push_str("\n}\n");
            out
        }
    })
}
