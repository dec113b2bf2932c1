use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mobility_flow::io::pipeline::{check_scenario, with_threads};
use mobility_flow::io::{
    load_scenario_with, run_stages, synth_scenario, NetworkStyle, Override, RunReport, ScenarioConfig, Stage,
    SynthSpec, TripSource,
};
use mobility_flow::Error;

/// Zone-level mobility flow estimation.
///
/// Exit codes: 0 success, 1 invalid configuration or input, 2 runtime
/// failure, 3 a conservation check failed.
#[derive(Parser)]
#[command(name = "mobflow", version)]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "MOBFLOW_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scenario directory.
    Synth(SynthArgs),
    /// Run the full pipeline.
    Run(ScenarioArgs),
    /// Build the zone grid and potential graph only.
    Gwpc(ScenarioArgs),
    /// Build zones, potential graph and trips.
    Trips(ScenarioArgs),
    /// Assign a trip dump onto the road network.
    Assign {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Trip dump to read [default: <output_dir>/trips.csv].
        #[arg(long)]
        trips: Option<PathBuf>,
    },
    /// Validate the configuration and every input file.
    Check(ScenarioArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML).
    config: PathBuf,
    /// Override a config key, e.g. `--set evolution.p_trip_min=1e-5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<Override>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Network {
    Grid,
    GridDiagonals,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Zones per grid side.
    #[arg(long, default_value_t = 10)]
    zones: usize,
    #[arg(long, default_value_t = 10_000.0)]
    population: f64,
    /// POIs beyond the one per populated zone [default: 2 * zones^2].
    #[arg(long)]
    pois: Option<usize>,
    /// Number of living clusters [default: 1 + zones/3].
    #[arg(long)]
    clusters: Option<usize>,
    #[arg(long, value_enum, default_value_t = Network::Grid)]
    network: Network,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    match with_threads(threads, move || dispatch(cli.command)).and_then(|r| r) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Synth(a) => {
            let mut spec = SynthSpec::new(a.zones, a.seed);
            spec.population = a.population;
            spec.extra_pois = a.pois.unwrap_or(spec.extra_pois);
            spec.clusters = a.clusters.unwrap_or(spec.clusters);
            spec.network = match a.network {
                Network::Grid => NetworkStyle::Grid,
                Network::GridDiagonals => NetworkStyle::GridDiagonals,
            };
            let path = synth_scenario(&spec, &a.out)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(a) => stages(&a, Stage::Assign, None),
        Command::Gwpc(a) => stages(&a, Stage::Potential, None),
        Command::Trips(a) => stages(&a, Stage::Tripgen, None),
        Command::Assign { scenario, trips } => stages(&scenario, Stage::Assign, Some(trips)),
        Command::Check(a) => {
            let cfg = load(&a)?;
            for line in check_scenario(&cfg)? {
                println!("{line}");
            }
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load(a: &ScenarioArgs) -> Result<ScenarioConfig, Error> {
    load_scenario_with(&a.config, &a.overrides)
}

fn stages(a: &ScenarioArgs, through: Stage, dump: Option<Option<PathBuf>>) -> Result<ExitCode, Error> {
    let cfg = load(a)?;
    let source = match dump {
        None => TripSource::Generate,
        Some(path) => TripSource::Dump(path.unwrap_or_else(|| cfg.output_path().join("trips.csv"))),
    };
    let run = run_stages(&cfg, through, &source)?;
    summarize(&run.report, &cfg);
    Ok(if run.report.all_checks_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn summarize(report: &RunReport, cfg: &ScenarioConfig) {
    for t in &report.stages {
        eprintln!("{:<10} {:>9.3} s", t.stage.name(), t.seconds);
    }
    let c = &report.counts;
    eprintln!(
        "zones {} ({} active, {} populated), trips {}, routed {}, dropped {}",
        c.zones, c.active_zones, c.populated_zones, c.trips, c.routed_trips, c.dropped_trips
    );
    for check in &report.checks {
        let status = if check.passed { "pass" } else { "FAIL" };
        eprintln!("check {:<20} {status} (residual {:.3e})", check.name, check.residual);
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", cfg.output_path().display());
}
