use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pevgrid::harness::Area;
use pevgrid_cli::{params, prepare, CliError, RunConfig, Selection};

#[derive(Parser)]
#[command(name = "pevgrid", version, about = "PEV charging impact on substation transformer and regulator depreciation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML) or a previous run_manifest.json.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<u32>,
    /// Output directory (default: `out` from the configuration, else ./out).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the configured or selected fleets against the benchmark.
    Run {
        #[command(flatten)]
        common: Common,
        /// Catalog scenario 1..=10.
        #[arg(long, conflicts_with = "pl")]
        scenario: Option<u8>,
        /// Penetration level (%) of a mixed slow/fast fleet.
        #[arg(long, requires = "area")]
        pl: Option<f64>,
        #[arg(long)]
        area: Option<Area>,
    },
    /// Simulate the base load alone.
    Benchmark {
        #[command(flatten)]
        common: Common,
    },
    /// Mixed fleets over a list of penetration levels.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,300")]
        pl: Vec<f64>,
        #[arg(long, default_value = "suburban")]
        area: Area,
    },
    /// Check the configuration and inputs without simulating.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the annotated default parameter file.
    Params,
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(iterations) = common.iterations {
        config.iterations = iterations;
    }
    Ok(config)
}

fn execute(common: &Common, command: &str, selection: Option<Selection>) -> Result<(), CliError> {
    let config = load(common)?;
    let out = common.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let prepared = prepare(&config, selection)?;
    log::info!(
        "{} fleet(s), {} iteration(s), seed {}",
        prepared.fleets.len(),
        prepared.mcs.iterations,
        prepared.mcs.master_seed
    );
    let report = prepared.run_and_emit(command, &out)?;
    for row in std::iter::once(&report.benchmark).chain(&report.scenarios) {
        println!(
            "{:<24} LoL {:>10.4} %/yr  lifetime {:>6.2} yr{}  VR ops {:>9.1}/yr  TCO {:>12.0} / {:>12.0}",
            row.label,
            row.yearly_lol_pct,
            row.lifetime_yr,
            if row.eps_flag { " (eps)" } else { "" },
            row.total_vr_ops(),
            row.tco_conventional.total,
            row.tco_reestablished.total,
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { common, scenario, pl, area } => {
            let selection = match (scenario, pl, area) {
                (Some(i), _, _) => Some(Selection::Scenarios(vec![i])),
                (None, Some(pl), Some(area)) => Some(Selection::Mixed { pl: vec![pl], area }),
                _ => None,
            };
            execute(&common, "run", selection)
        }
        Command::Benchmark { common } => execute(&common, "benchmark", Some(Selection::Scenarios(Vec::new()))),
        Command::Sweep { common, pl, area } => execute(&common, "sweep", Some(Selection::Mixed { pl, area })),
        Command::Validate { config } => {
            let config = RunConfig::load(&config)?;
            let selection = config.selection()?.unwrap_or(Selection::Scenarios(Vec::new()));
            let prepared = prepare(&config, Some(selection))?;
            println!(
                "ok: {} buses, {} regulators, {} base-load slots, peak {:.1} kW, {} fleet(s), config hash {}",
                prepared.feeder.bus_count(),
                prepared.feeder.regulator_buses().len(),
                prepared.base.horizon_slots(),
                prepared.base.peak_kw(),
                prepared.fleets.len(),
                prepared.config_hash()
            );
            for entry in prepared.params.entries().iter().filter(|e| e.provenance == params::Provenance::Override) {
                println!("override: {} = {}", entry.key, entry.value);
            }
            Ok(())
        }
        Command::Params => {
            print!("{}", params::render_default_file());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
