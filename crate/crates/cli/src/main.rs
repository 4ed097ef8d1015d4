use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use kstab_cli::{execute, Cli, CliError};

fn run(cli: &Cli) -> Result<(), CliError> {
    let text = execute(cli)?.render(cli.format)?;
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Domain(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
