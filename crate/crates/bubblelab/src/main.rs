use std::path::PathBuf;
use std::process::ExitCode;

use bubblelab::scenario::{detect_files, verdict_lines, write_verdict};
use bubblelab::sweep::threads_from_env;
use bubblelab::{run_scenario, sweep, CliError, ScenarioConfig};
use bubblelab_core::pricing::DEFAULT_MARGIN;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "bubblelab",
    version,
    about = "Rational-bubble equilibria, saddle paths and the dividend-yield test"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run { config: PathBuf },
    /// Run every cell of the scenario's `[sweep]` grid.
    Sweep { config: PathBuf },
    /// Apply the dividend-yield bubble test to two CSV series.
    Detect {
        #[arg(long)]
        prices: PathBuf,
        #[arg(long)]
        dividends: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        /// Column holding prices (default: `value`, else the last column).
        #[arg(long)]
        price_column: Option<String>,
        #[arg(long)]
        dividend_column: Option<String>,
        /// Also write the verdict as a `key,value` CSV.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run { config } => {
            let config = ScenarioConfig::load(&config)?;
            // Solver work may fan out (regime maps), so honour the cap here too.
            let threads = threads_from_env()?;
            let report = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
                    .install(|| run_scenario(&config))?,
                None => run_scenario(&config)?,
            };
            for (key, value) in &report.summary {
                println!("{key},{value}");
            }
            eprintln!(
                "wrote {} files to {} in {:.3?}",
                report.files.len(),
                report.dir.display(),
                report.elapsed
            );
            report.into_result().map(|_| ())
        }
        Command::Sweep { config } => {
            let config = ScenarioConfig::load(&config)?;
            let report = sweep(&config, threads_from_env()?)?;
            let failed = report.failed();
            println!("cells,{}", report.cells.len());
            println!("failed,{failed}");
            for cell in &report.cells {
                if let Some(e) = cell.error() {
                    eprintln!("error[{}]: {e}", e.category());
                }
            }
            eprintln!("wrote {}", report.dir.display());
            report.first_error().map_or(Ok(()), Err)
        }
        Command::Detect {
            prices,
            dividends,
            margin,
            price_column,
            dividend_column,
            output,
        } => {
            if !(0.0..1.0).contains(&margin) {
                return Err(CliError::Config(format!("`--margin` must lie in [0, 1), got {margin}")));
            }
            let (p, _, verdict) = detect_files(
                &prices,
                &dividends,
                price_column.as_deref(),
                dividend_column.as_deref(),
                margin,
            )?;
            for (key, value) in verdict_lines(&verdict) {
                println!("{key},{value}");
            }
            if let Some(path) = output {
                write_verdict(&path, &verdict, p.len())?;
            }
            Ok(())
        }
    }
}
