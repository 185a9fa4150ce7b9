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

//! Open graphs, measurement patterns and their honest execution.

mod engine;
mod graph;
mod oracle;
mod pattern;
pub mod templates;

pub use engine::{build_resource_state, corrected_angle, parity, run_pattern_honest, PatternResult};
pub use graph::{OpenGraph, Vertex};
pub use oracle::{circuit_oracle, ORACLE_MAX_MEASURED, ORACLE_MAX_VERTICES};
pub use pattern::{MeasurementPattern, PatternFile, Readout, PATTERN_FORMAT_VERSION};

use thiserror::Error;

use crate::qsim::QsimError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatternError {
    #[error("vertex {0} appears more than once")]
    DuplicateVertex(Vertex),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("self-loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("measurement order is invalid: {0}")]
    BadOrder(String),
    #[error("vertex {vertex} depends on {dependency}, which is not measured before it")]
    DependencyOrder { vertex: Vertex, dependency: Vertex },
    #[error("measured vertex {0} has no angle")]
    MissingAngle(Vertex),
    #[error("vertex {0} is not measured in the X-Y plane but has an angle")]
    UnexpectedAngle(Vertex),
    #[error("outcome of vertex {0} is needed but not known yet")]
    MissingOutcome(Vertex),
    #[error("no preparation given for vertex {0}")]
    MissingPreparation(Vertex),
    #[error("preparation for vertex {0} is not a single-qubit state")]
    BadPreparation(Vertex),
    #[error("pattern exceeds the oracle cap: {0}")]
    TooLarge(String),
    #[error("unsupported pattern file version {0}")]
    Version(u32),
    #[error("invalid template: {0}")]
    Template(String),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}
