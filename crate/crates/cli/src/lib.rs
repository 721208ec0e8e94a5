//! Configuration, orchestration and reproducible report emission for the
//! `thermoform` command-line tool.

pub mod config;
pub mod report;
pub mod run;

pub use config::{Cli, Command, Common, ExperimentConfig};
pub use report::Artifact;
pub use run::run;

use thermoform_core::config::MapSpec;
use thermoform_core::Error;

/// Exit status for a failed experiment: 2 for malformed requests, 3 for
/// budget or convergence failures.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_runtime() { 3 } else { 2 }
}

/// Assemble the experiment described by the command line. `run` reads either a
/// bare config or an emitted artifact, whose embedded config is used.
pub fn experiment(common: &Common, command: &Command) -> Result<ExperimentConfig, Error> {
    let mut config = match command {
        Command::Run(args) => {
            let text = std::fs::read_to_string(&args.config)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", args.config.display())))?;
            let value = match report::parse_artifact(&text) {
                Some((embedded, _)) => embedded,
                None => serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("bad config: {e}")))?,
            };
            serde_json::from_value::<ExperimentConfig>(value).map_err(|e| Error::InvalidInput(format!("bad config: {e}")))?
        }
        _ => {
            let map = common.map.as_deref().ok_or_else(|| Error::InvalidInput("--map is required".into()))?;
            ExperimentConfig { map: MapSpec::parse(map)?, command: command.clone(), seed: None, threads: None, output: None }
        }
    };
    if common.seed.is_some() {
        config.seed = common.seed;
    }
    if common.threads.is_some() {
        config.threads = common.threads;
    }
    if common.out.is_some() {
        config.output = common.out.clone();
    }
    Ok(config)
}
