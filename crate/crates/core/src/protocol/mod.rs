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

//! Blind delegation: client and server state machines, the links between
//! them and exact enumeration of their joint behavior.

mod channel;
mod client;
mod enumerate;
mod job;
mod message;
mod secrets;
mod server;
mod session;
pub mod tcp;

pub use channel::{ChannelError, HandleOps, QuantumChannel, Registry, SERVER_OPERATIONS};
pub use client::Client;
pub use enumerate::{
    enumerate_sessions, exact_acceptance, exact_output_distribution, job_view_distribution, view_distribution, Leaf,
    DEFAULT_BOUND,
};
pub use job::DelegatedJob;
pub use message::{ProtocolMessage, QubitHandle, SessionTranscript, ViewEvent};
pub use secrets::{client_delta, client_interpret, ClientSecrets};
pub use server::Server;
pub use session::{run_delegated, run_in_process, InProcess, SessionOutput, SessionSeeds, StreamRole, Transport};

use thiserror::Error;

use crate::mbqc::PatternError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    /// A message arrived out of sequence or malformed; the session is aborted.
    #[error("protocol violation: {0}")]
    Violation(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("inconsistent secrets: {0}")]
    Secrets(String),
    #[error("enumeration needs {needed} branches, bound is {bound}")]
    BoundExceeded { needed: u128, bound: u128 },
}

impl ProtocolError {
    pub fn is_transport(&self) -> bool {
        matches!(
            self,
            ProtocolError::Transport(_) | ProtocolError::Channel(ChannelError::Link(_))
        )
    }
}
