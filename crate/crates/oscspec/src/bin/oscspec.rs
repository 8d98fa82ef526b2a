use clap::Parser;
use oscspec::cli_reporting::{run, CliError, Command, ConfigLayer, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Eigenvalues of -y'' + x^2 y + q(x) y and checks of their asymptotics.
#[derive(Parser)]
#[command(name = "oscspec", version, allow_negative_numbers = true)]
struct Cli {
    /// What to run; may also come from the config file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// JSON config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: ConfigLayer,
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigLayer::from_file(p)?,
        None => ConfigLayer::default(),
    };
    let flags = ConfigLayer {
        command: cli.command,
        ..cli.flags
    };
    let config = RunConfig::resolve(flags.over(file))?;
    Ok(run(&config)?.success)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", CliError::Config(first.to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
