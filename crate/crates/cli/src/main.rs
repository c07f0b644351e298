use std::process::ExitCode;

use clap::Parser;
use gse_cli::args::Cli;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match gse_cli::run::run(&cli) {
        Ok(manifest) => {
            log::info!("wrote {}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gse: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
