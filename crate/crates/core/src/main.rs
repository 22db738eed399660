use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use charvar::cli::{run, Cli, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            std::io::stdout().flush().ok();
            ExitCode::SUCCESS
        }
        Err(CliError::Verification(report)) => {
            print!("{report}");
            eprintln!("error: verification failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
