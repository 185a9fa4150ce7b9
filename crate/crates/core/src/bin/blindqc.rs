// Copyright 2026 The blindqc Developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! `blindqc` command-line experiment runner.
//!
//! Exit status: 0 success, 1 i/o failure, 2 configuration error, 3 transport
//! error, 4 protocol abort. `RUST_LOG` sets the log level.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use blindqc::harness::{execute, Command, ExperimentConfig, HarnessError, Overrides};

#[derive(Parser)]
#[command(name = "blindqc", version, about = "Blind delegated MBQC experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// End-to-end delegated sessions
    Run(Flags),
    /// Exact view-distribution comparison over all angle assignments
    Blindness(Flags),
    /// Accept-wrong and detection rates over trap counts
    Detect(Flags),
    /// k-run accept-wrong rates
    Amplify(Flags),
    /// Server role over TCP
    Serve(Flags),
    /// Client role over TCP
    Client(Flags),
}

#[derive(Args)]
struct Flags {
    /// Experiment config (JSON)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    template: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    traps: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Behavior JSON or a bare kind, e.g. honest
    #[arg(long)]
    adversary: Option<String>,
    /// inproc or tcp:host:port
    #[arg(long)]
    transport: Option<String>,
    /// Report file; reports are appended as JSON lines
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (command, flags) = match cli.command {
        Cmd::Run(f) => (Command::Run, f),
        Cmd::Blindness(f) => (Command::Blindness, f),
        Cmd::Detect(f) => (Command::Detect, f),
        Cmd::Amplify(f) => (Command::Amplify, f),
        Cmd::Serve(f) => (Command::Serve, f),
        Cmd::Client(f) => (Command::Client, f),
    };
    match main_inner(command, flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("blindqc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main_inner(command: Command, flags: Flags) -> Result<(), HarnessError> {
    let mut cfg = match &flags.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(Overrides {
        template: flags.template,
        seed: flags.seed,
        trials: flags.trials,
        traps: flags.traps,
        k: flags.k,
        adversary: flags.adversary,
        transport: flags.transport,
        out: flags.out,
    })?;
    let report = execute(command, &cfg)?;
    match &cfg.out {
        Some(path) => {
            if let Some(csv) = report.append_to(path, command.writes_csv())? {
                log::info!("rows appended to {}", csv.display());
            }
        }
        None => println!("{}", report.to_json_line()),
    }
    Ok(())
}
