use std::process::ExitCode;

use clap::Parser;
use thermoform_cli::{exit_code, experiment, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match experiment(&cli.common, &cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    if let Some(n) = config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let artifact = match run(&config) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &artifact.text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
            eprintln!("wrote {} (sha256 {})", path.display(), artifact.hash);
        }
        None => print!("{}", artifact.text),
    }
    ExitCode::SUCCESS
}
