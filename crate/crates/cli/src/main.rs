use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tubeaction_cli::runner::suite_configs;
use tubeaction_cli::{run_scenario, run_suite, CliError, RunOptions, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "tubeaction",
    version,
    about = "Proper-tube action verification scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Exit with status 1 when an enforced row is out of tolerance.
    #[arg(long, global = true)]
    check: bool,

    /// Output directory for CSV files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Multiplier on every quadrature order.
    #[arg(long = "mesh-scale", global = true, default_value_t = 1.0)]
    mesh_scale: f64,

    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config.
    Run { config: PathBuf },
    /// Run every *.toml in a directory; failures always set the exit code.
    Suite { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = RunOptions {
        out_dir: cli.out.clone(),
        mesh_scale: cli.mesh_scale,
        quiet: cli.quiet,
    };
    match execute(&cli, &opts) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli, opts: &RunOptions) -> Result<u8, CliError> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = ScenarioConfig::load(config)?;
            let outcome = run_scenario(&cfg, opts)?;
            if !opts.quiet {
                let failed = outcome.rows.iter().filter(|r| r.failed_enforced()).count();
                println!(
                    "{}: {} rows, {} enforced failures",
                    outcome.name,
                    outcome.rows.len(),
                    failed
                );
                for f in &outcome.files {
                    println!("  wrote {}", f.display());
                }
            }
            Ok(if cli.check && !outcome.passed() { 1 } else { 0 })
        }
        Command::Suite { dir } => {
            let paths = suite_configs(dir)?;
            if paths.is_empty() {
                eprintln!("warning: no *.toml scenarios in {}", dir.display());
                return Ok(0);
            }
            let outcome = run_suite(&paths, opts)?;
            if !opts.quiet {
                let failed = outcome.summary.iter().filter(|s| s.failed > 0).count();
                println!(
                    "{} scenarios, {} failing criteria, {} errors",
                    outcome.scenarios,
                    failed,
                    outcome.errors.len()
                );
            }
            Ok(if outcome.passed() { 0 } else { 1 })
        }
    }
}
