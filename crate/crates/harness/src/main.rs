use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use discord_dyn_cli::figures::emit_figure_data;
use discord_dyn_cli::presets::Family;
use discord_dyn_cli::run::{format_number, run_scenario};
use discord_dyn_cli::sweep::{run_sweep, Axis, DEFAULT_MAX_RUNS};
use discord_dyn_cli::{thread_pool, HarnessError, RunConfig};

/// Two-qubit discord dynamics in structured reservoirs.
#[derive(Debug, Parser)]
#[command(name = "discord-dyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one configuration.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the cartesian product of one or more axes over a base configuration.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `key=v1,v2,...`; repeat for more axes.
        #[arg(long = "axis")]
        axes: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_RUNS)]
        max_runs: usize,
    },
    /// Emit plot-ready CSVs for a figure family.
    Figures {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        out: PathBuf,
        /// Use the long-time inset grid.
        #[arg(long)]
        long: bool,
    },
}

fn execute(command: Command) -> Result<i32, HarnessError> {
    let pool = thread_pool()?;
    match command {
        Command::Simulate { config } => {
            let config = RunConfig::load(&config)?;
            let out = pool.install(|| run_scenario(&config))?;
            println!(
                "wrote {} ({} rows), terminal discord {}",
                out.csv_path.as_ref().expect("persisted").display(),
                out.rows.len(),
                format_number(out.terminal_discord())
            );
            Ok(0)
        }
        Command::Sweep { config, axes, max_runs } => {
            let base = RunConfig::load(&config)?;
            let axes = axes.iter().map(|a| a.parse()).collect::<Result<Vec<Axis>, _>>()?;
            let report = pool.install(|| run_sweep(&base, &axes, max_runs))?;
            for (row, msg) in report.failures() {
                eprintln!("point {} failed: {msg}", row.index);
            }
            println!("wrote {} ({} points)", report.summary_path.display(), report.rows.len());
            Ok(report.first_failure_code.unwrap_or(0))
        }
        Command::Figures { family, out, long } => {
            let (layout, outputs) = pool.install(|| emit_figure_data(family, &out, long))?;
            println!(
                "wrote {} series in {} panels to {}",
                outputs.len(),
                layout.panels.len(),
                out.display()
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
