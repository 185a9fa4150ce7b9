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

//! Trap qubits, their isolation, the accept/reject check and repetition.

mod experiment;
mod layout;
mod template;

pub use experiment::{
    accept_wrong_probability, amplified_accept_wrong, amplify_by_repetition, detection_probability, run_trial,
    run_trial_over, Amplified, Placement, RunRecord, TrialOutcome,
};
pub use layout::{expected_trap_bit, verify, Decision, TrapLayout};
pub use template::{embed_traps, embed_traps_at, BlindedPattern, TrapTemplate};

use thiserror::Error;

use crate::mbqc::{PatternError, Vertex};
use crate::protocol::ProtocolError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrapError {
    #[error("vertex {0} is not a trap")]
    NotATrap(Vertex),
    #[error("invalid trap layout: {0}")]
    Layout(String),
    #[error("template {template} has no room for {requested} isolated traps")]
    Insufficient { template: String, requested: usize },
    #[error("unknown trap template {0:?}")]
    UnknownTemplate(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}
