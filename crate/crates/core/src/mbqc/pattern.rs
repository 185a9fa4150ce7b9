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

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{OpenGraph, PatternError, Vertex};
use crate::angle::Angle;

/// Current value of the `version` field in pattern files.
pub const PATTERN_FORMAT_VERSION: u32 = 1;

/// How an output vertex is read at the end of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    /// Computational-basis measurement after all X-Y measurements; the bit is
    /// corrected by the parity of the vertex's X dependencies.
    #[default]
    Z,
    /// Measured in the X-Y plane like any other vertex, at its (corrected) angle.
    Xy,
}

/// Measurement pattern over an open graph.
///
/// `order` lists every vertex measured in the X-Y plane: all non-outputs plus
/// the outputs whose readout is [`Readout::Xy`]. Each of them has an angle in
/// `phi`. Dependencies of a measured vertex must be measured strictly earlier;
/// dependencies of a Z-read output may be any measured vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementPattern {
    graph: OpenGraph,
    order: Vec<Vertex>,
    phi: BTreeMap<Vertex, Angle>,
    x_deps: BTreeMap<Vertex, Vec<Vertex>>,
    z_deps: BTreeMap<Vertex, Vec<Vertex>>,
    readout: BTreeMap<Vertex, Readout>,
}

impl MeasurementPattern {
    pub fn new(
        graph: OpenGraph,
        order: Vec<Vertex>,
        phi: BTreeMap<Vertex, Angle>,
        x_deps: BTreeMap<Vertex, Vec<Vertex>>,
        z_deps: BTreeMap<Vertex, Vec<Vertex>>,
        readout: BTreeMap<Vertex, Readout>,
    ) -> Result<MeasurementPattern, PatternError> {
        let mut readout_full = BTreeMap::new();
        for &v in readout.keys() {
            if !graph.is_output(v) {
                return Err(PatternError::BadOrder(format!(
                    "readout given for non-output vertex {v}"
                )));
            }
        }
        for &o in graph.outputs() {
            readout_full.insert(o, readout.get(&o).copied().unwrap_or_default());
        }

        let expected: BTreeSet<Vertex> = graph
            .vertices()
            .iter()
            .copied()
            .filter(|v| readout_full.get(v).is_none_or(|r| *r == Readout::Xy))
            .collect();
        let mut position = BTreeMap::new();
        for (k, &v) in order.iter().enumerate() {
            if !graph.contains(v) {
                return Err(PatternError::UnknownVertex(v));
            }
            if position.insert(v, k).is_some() {
                return Err(PatternError::BadOrder(format!("vertex {v} measured twice")));
            }
            if !expected.contains(&v) {
                return Err(PatternError::BadOrder(format!(
                    "vertex {v} is a Z-read output and cannot be in the X-Y order"
                )));
            }
        }
        if let Some(v) = expected.iter().find(|v| !position.contains_key(v)) {
            return Err(PatternError::BadOrder(format!("vertex {v} is never measured")));
        }

        for &v in &order {
            if !phi.contains_key(&v) {
                return Err(PatternError::MissingAngle(v));
            }
        }
        if let Some(&v) = phi.keys().find(|v| !position.contains_key(v)) {
            return Err(PatternError::UnexpectedAngle(v));
        }

        let clean = |deps: BTreeMap<Vertex, Vec<Vertex>>| -> Result<_, PatternError> {
            let mut out = BTreeMap::new();
            for (v, mut ds) in deps {
                if !graph.contains(v) {
                    return Err(PatternError::UnknownVertex(v));
                }
                ds.sort_unstable();
                ds.dedup();
                for &d in &ds {
                    let Some(&pd) = position.get(&d) else {
                        return Err(PatternError::DependencyOrder {
                            vertex: v,
                            dependency: d,
                        });
                    };
                    if let Some(&pv) = position.get(&v) {
                        if pd >= pv {
                            return Err(PatternError::DependencyOrder {
                                vertex: v,
                                dependency: d,
                            });
                        }
                    }
                }
                if !ds.is_empty() {
                    out.insert(v, ds);
                }
            }
            Ok(out)
        };
        let x_deps = clean(x_deps)?;
        let z_deps = clean(z_deps)?;

        Ok(MeasurementPattern {
            graph,
            order,
            phi,
            x_deps,
            z_deps,
            readout: readout_full,
        })
    }

    pub fn graph(&self) -> &OpenGraph {
        &self.graph
    }

    /// Vertices measured in the X-Y plane, in measurement order.
    pub fn order(&self) -> &[Vertex] {
        &self.order
    }

    pub fn phi(&self, v: Vertex) -> Option<Angle> {
        self.phi.get(&v).copied()
    }

    pub fn angles(&self) -> &BTreeMap<Vertex, Angle> {
        &self.phi
    }

    pub fn x_deps(&self, v: Vertex) -> &[Vertex] {
        self.x_deps.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn z_deps(&self, v: Vertex) -> &[Vertex] {
        self.z_deps.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn readout(&self, output: Vertex) -> Option<Readout> {
        self.readout.get(&output).copied()
    }

    /// Outputs read in the computational basis, in output order.
    pub fn z_outputs(&self) -> Vec<Vertex> {
        self.graph
            .outputs()
            .iter()
            .copied()
            .filter(|o| self.readout[o] == Readout::Z)
            .collect()
    }

    pub fn n_measured(&self) -> usize {
        self.order.len()
    }

    /// Same pattern with different computational angles.
    pub fn with_angles(&self, phi: BTreeMap<Vertex, Angle>) -> Result<MeasurementPattern, PatternError> {
        MeasurementPattern::new(
            self.graph.clone(),
            self.order.clone(),
            phi,
            self.x_deps.clone(),
            self.z_deps.clone(),
            self.readout.clone(),
        )
    }

    pub fn to_file(&self) -> PatternFile {
        PatternFile {
            version: PATTERN_FORMAT_VERSION,
            vertices: self.graph.vertices().to_vec(),
            edges: self.graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
            inputs: self.graph.inputs().to_vec(),
            outputs: self.graph.outputs().to_vec(),
            order: self.order.clone(),
            phi: self.phi.clone(),
            x_deps: self.x_deps.clone(),
            z_deps: self.z_deps.clone(),
            readout: self.readout.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("pattern serializes")
    }

    pub fn from_json(text: &str) -> Result<MeasurementPattern, PatternError> {
        let file: PatternFile =
            serde_json::from_str(text).map_err(|e| PatternError::BadOrder(format!("parse error: {e}")))?;
        MeasurementPattern::try_from(file)
    }
}

/// On-disk JSON form of a [`MeasurementPattern`].
///
/// Map keys are vertex numbers written as JSON strings; angles are integers
/// `0..8` counting steps of π/4. `x_deps`, `z_deps` and `readout` may be
/// omitted; missing readouts default to `"z"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    pub version: u32,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<[Vertex; 2]>,
    pub inputs: Vec<Vertex>,
    pub outputs: Vec<Vertex>,
    pub order: Vec<Vertex>,
    pub phi: BTreeMap<Vertex, Angle>,
    #[serde(default)]
    pub x_deps: BTreeMap<Vertex, Vec<Vertex>>,
    #[serde(default)]
    pub z_deps: BTreeMap<Vertex, Vec<Vertex>>,
    #[serde(default)]
    pub readout: BTreeMap<Vertex, Readout>,
}

impl TryFrom<PatternFile> for MeasurementPattern {
    type Error = PatternError;

    fn try_from(f: PatternFile) -> Result<MeasurementPattern, PatternError> {
        if f.version != PATTERN_FORMAT_VERSION {
            return Err(PatternError::Version(f.version));
        }
        let graph = OpenGraph::new(
            f.vertices,
            f.edges.into_iter().map(|[a, b]| (a, b)).collect(),
            f.inputs,
            f.outputs,
        )?;
        MeasurementPattern::new(graph, f.order, f.phi, f.x_deps, f.z_deps, f.readout)
    }
}
