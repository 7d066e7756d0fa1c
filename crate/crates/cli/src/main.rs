use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nctx_cli::{run, Mode, OutputFormat, RunConfig};
use nctx_core::Tolerances;

/// Preparation-noncontextuality certification for four preparations and two
/// binary measurements.
#[derive(Parser, Debug)]
#[command(name = "nctx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify one or more two-measurement statistics files.
    Certify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Generate and certify the depolarised qubit example.
    Simulate {
        /// Visibility in [0, 1].
        #[arg(long, conflicts_with = "threshold", allow_negative_numbers = true)]
        eta: Option<f64>,
        /// Print the visibility at which the violation vanishes.
        #[arg(long)]
        threshold: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce a three-measurement file with an auxiliary preparation, then
    /// certify the effective preparations.
    Reduce {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Cross-check the verdict with the LP oracle.
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, default_value_t = nctx_core::scenario::DEFAULT_EPS_PROB)]
    eps_prob: f64,
    #[arg(long, default_value_t = nctx_core::geometry::DEFAULT_EPS_GEOM)]
    eps_geom: f64,
    #[arg(long, default_value_t = nctx_core::inequalities::DEFAULT_EPS_VERDICT)]
    eps_verdict: f64,
    #[arg(long, default_value_t = nctx_core::oracle::DEFAULT_DELTA_LP)]
    delta_lp: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Text,
    Json,
}

impl Common {
    fn config(&self, mode: Mode) -> RunConfig {
        RunConfig {
            mode,
            tolerances: Tolerances {
                eps_prob: self.eps_prob,
                eps_geom: self.eps_geom,
                eps_verdict: self.eps_verdict,
                delta_lp: self.delta_lp,
            },
            oracle: self.oracle,
            format: match self.format {
                Format::Text => OutputFormat::Text,
                Format::Json => OutputFormat::Json,
            },
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("NCTX_LOG")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                nctx_cli::EXIT_ERROR
            } else {
                0
            });
        }
    };
    let cfg = match cli.command {
        Command::Certify { files, common } => common.config(Mode::Certify { inputs: files }),
        Command::Simulate {
            eta,
            threshold,
            common,
        } => {
            let mode = if threshold {
                Mode::Threshold
            } else {
                Mode::Simulate {
                    eta: eta.unwrap_or(1.0),
                }
            };
            common.config(mode)
        }
        Command::Reduce { file, common } => common.config(Mode::Reduce { input: file }),
    };
    log::debug!("{cfg:?}");

    let outcome = run(&cfg);
    // Emission is serialised: one write per stream.
    let _ = std::io::stdout()
        .lock()
        .write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr()
        .lock()
        .write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code)
}
