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

use std::collections::BTreeMap;

use rand::Rng;

use super::{MeasurementPattern, OpenGraph, PatternError, Readout, Vertex};
use crate::angle::Angle;
use crate::qsim::{QubitId, StateVector};

/// XOR of the known outcomes of `deps`.
pub fn parity(deps: &[Vertex], outcome: impl Fn(Vertex) -> Option<u8>) -> Result<u8, PatternError> {
    deps.iter().try_fold(0u8, |acc, &d| {
        outcome(d).map(|b| acc ^ (b & 1)).ok_or(PatternError::MissingOutcome(d))
    })
}

/// Adaptive angle `(-1)^{s_X} φ + s_Z π`, with `s_X`, `s_Z` the parities of the
/// X and Z dependency outcomes.
pub fn corrected_angle(
    phi: Angle,
    x_deps: &[Vertex],
    z_deps: &[Vertex],
    outcome: impl Fn(Vertex) -> Option<u8>,
) -> Result<Angle, PatternError> {
    let sx = parity(x_deps, &outcome)?;
    let sz = parity(z_deps, &outcome)?;
    Ok(phi.negate_if(sx).plus_pi_if(sz))
}

/// Tensor product of the per-vertex preparations (in vertex order) followed by
/// a CZ on every edge. Qubit ids equal vertex labels.
pub fn build_resource_state(
    graph: &OpenGraph,
    preparations: &BTreeMap<Vertex, StateVector>,
) -> Result<StateVector, PatternError> {
    let mut state = StateVector::empty();
    for &v in graph.vertices() {
        let prep = preparations.get(&v).ok_or(PatternError::MissingPreparation(v))?;
        if prep.n_qubits() != 1 {
            return Err(PatternError::BadPreparation(v));
        }
        state.join(prep.clone().relabel(&[QubitId(v)])?)?;
    }
    for &(a, b) in graph.edges() {
        state.apply_cz(QubitId(a), QubitId(b))?;
    }
    Ok(state)
}

/// Outcome of running a pattern.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternResult {
    /// Corrected bit per output vertex.
    pub outputs: BTreeMap<Vertex, u8>,
    /// Corrected outcome of every X-Y measurement, in measurement order.
    pub transcript: Vec<(Vertex, u8)>,
}

impl PatternResult {
    /// Output bits in the pattern's output order.
    pub fn output_bits(&self, pattern: &MeasurementPattern) -> Vec<u8> {
        pattern.graph().outputs().iter().map(|o| self.outputs[o]).collect()
    }
}

/// Runs the pattern directly: all vertices start in `|+⟩`, measurements follow
/// the pattern order at their corrected angles, then Z-read outputs are measured
/// and corrected by their X-dependency parity.
pub fn run_pattern_honest<R: Rng + ?Sized>(
    pattern: &MeasurementPattern,
    rng: &mut R,
) -> Result<PatternResult, PatternError> {
    let graph = pattern.graph();
    let preps = graph
        .vertices()
        .iter()
        .map(|&v| (v, StateVector::plus_state(Angle::ZERO)))
        .collect();
    let mut state = build_resource_state(graph, &preps)?;
    let mut s: BTreeMap<Vertex, u8> = BTreeMap::new();
    let mut result = PatternResult::default();

    for &v in pattern.order() {
        let phi = pattern.phi(v).ok_or(PatternError::MissingAngle(v))?;
        let angle = corrected_angle(phi, pattern.x_deps(v), pattern.z_deps(v), |d| s.get(&d).copied())?;
        let bit = state.measure_xy(QubitId(v), angle, rng)?.bit;
        s.insert(v, bit);
        result.transcript.push((v, bit));
    }
    for &o in graph.outputs() {
        let bit = match pattern.readout(o).unwrap_or_default() {
            Readout::Xy => s[&o],
            Readout::Z => {
                let raw = state.measure_z(QubitId(o), rng)?.bit;
                raw ^ parity(pattern.x_deps(o), |d| s.get(&d).copied())?
            }
        };
        result.outputs.insert(o, bit);
    }
    Ok(result)
}
