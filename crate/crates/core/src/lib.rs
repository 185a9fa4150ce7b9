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

//! Blind delegated quantum computation with trap-based verification, on a
//! dense state-vector simulator.
//!
//! The crate is layered bottom-up:
//!
//! * [`qsim`]: state vectors, gates and measurements;
//! * [`mbqc`]: open graphs, measurement patterns, honest execution and an
//!   independent circuit oracle;
//! * [`protocol`]: the blind client/server protocol, its transports and exact
//!   enumeration;
//! * [`trap`]: trap embedding, verification and repetition;
//! * [`adversary`]: server behaviors;
//! * [`harness`]: experiment configuration, commands and reports.

pub mod adversary;
pub mod angle;
pub mod harness;
mod inline;
pub mod mbqc;
pub mod protocol;
pub mod qsim;
pub mod stats;
pub mod trap;

pub use angle::Angle;
