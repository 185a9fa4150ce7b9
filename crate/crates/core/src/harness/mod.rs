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

//! Experiment runner behind the `blindqc` binary: configuration, the six
//! commands and their reports.

mod commands;
mod config;
mod report;

pub use commands::{amplify, blindness, client, detect, execute, run, serve, Command};
pub use config::{parse_adversary, ExperimentConfig, Overrides, TransportSpec};
pub use report::{Report, Row, REPORT_SCHEMA};

use thiserror::Error;

use crate::mbqc::PatternError;
use crate::protocol::ProtocolError;
use crate::trap::TrapError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("protocol aborted: {0}")]
    Protocol(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    /// Process exit status for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Transport(_) => 3,
            HarnessError::Protocol(_) => 4,
            HarnessError::Io(_) => 1,
        }
    }
}

impl From<ProtocolError> for HarnessError {
    fn from(e: ProtocolError) -> Self {
        if e.is_transport() {
            HarnessError::Transport(e.to_string())
        } else {
            HarnessError::Protocol(e.to_string())
        }
    }
}

impl From<TrapError> for HarnessError {
    fn from(e: TrapError) -> Self {
        match e {
            TrapError::Protocol(p) => p.into(),
            other => HarnessError::Config(other.to_string()),
        }
    }
}

impl From<PatternError> for HarnessError {
    fn from(e: PatternError) -> Self {
        HarnessError::Config(e.to_string())
    }
}
