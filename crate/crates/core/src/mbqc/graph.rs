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

use std::collections::BTreeSet;

use super::PatternError;

/// Vertex label of an open graph. Doubles as the qubit id in simulations.
pub type Vertex = u32;

/// Graph with designated input and output vertices.
///
/// Vertices are kept sorted; edges are stored as `(low, high)` pairs, sorted
/// and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(Vertex, Vertex)>,
    inputs: Vec<Vertex>,
    outputs: Vec<Vertex>,
}

impl OpenGraph {
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<(Vertex, Vertex)>,
        inputs: Vec<Vertex>,
        outputs: Vec<Vertex>,
    ) -> Result<OpenGraph, PatternError> {
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            if !seen.insert(v) {
                return Err(PatternError::DuplicateVertex(v));
            }
        }
        let mut norm = BTreeSet::new();
        for &(a, b) in &edges {
            if a == b {
                return Err(PatternError::SelfLoop(a));
            }
            for v in [a, b] {
                if !seen.contains(&v) {
                    return Err(PatternError::UnknownVertex(v));
                }
            }
            norm.insert((a.min(b), a.max(b)));
        }
        for set in [&inputs, &outputs] {
            let mut local = BTreeSet::new();
            for &v in set {
                if !seen.contains(&v) {
                    return Err(PatternError::UnknownVertex(v));
                }
                if !local.insert(v) {
                    return Err(PatternError::DuplicateVertex(v));
                }
            }
        }
        Ok(OpenGraph {
            vertices: seen.into_iter().collect(),
            edges: norm.into_iter().collect(),
            inputs,
            outputs,
        })
    }

    /// Path `0 - 1 - ... - (n-1)` with input 0 and output `n-1`.
    pub fn line(n: u32) -> Result<OpenGraph, PatternError> {
        if n == 0 {
            return OpenGraph::new(vec![], vec![], vec![], vec![]);
        }
        OpenGraph::new(
            (0..n).collect(),
            (1..n).map(|v| (v - 1, v)).collect(),
            vec![0],
            vec![n - 1],
        )
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn inputs(&self) -> &[Vertex] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vertex] {
        &self.outputs
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Position of `v` in the sorted vertex list.
    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn is_output(&self, v: Vertex) -> bool {
        self.outputs.contains(&v)
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn are_adjacent(&self, a: Vertex, b: Vertex) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Subgraph induced by `keep`, with the given inputs and outputs.
    pub fn induced(
        &self,
        keep: &[Vertex],
        inputs: Vec<Vertex>,
        outputs: Vec<Vertex>,
    ) -> Result<OpenGraph, PatternError> {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .collect();
        OpenGraph::new(keep.to_vec(), edges, inputs, outputs)
    }
}
