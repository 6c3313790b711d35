use std::io;
use std::process::ExitCode;

use clap::Parser;
use pbwt_batch::cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pbwt-batch: {}", e);
            ExitCode::FAILURE
        }
    }
}
