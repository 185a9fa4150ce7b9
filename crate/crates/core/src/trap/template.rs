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
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{TrapError, TrapLayout};
use crate::angle::Angle;
use crate::mbqc::templates::{deterministic_wire_on, square_graph};
use crate::mbqc::{MeasurementPattern, OpenGraph, Readout, Vertex};
use crate::protocol::DelegatedJob;

/// Public graphs that host traps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrapTemplate {
    /// Path `0 - 1 - ... - (n-1)`.
    Line(u32),
    /// The 2×2 grid.
    Square,
}

impl fmt::Display for TrapTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrapTemplate::Line(n) => write!(f, "line:{n}"),
            TrapTemplate::Square => write!(f, "square"),
        }
    }
}

impl FromStr for TrapTemplate {
    type Err = TrapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "square" => Ok(TrapTemplate::Square),
            Some(("line", n)) => match n.parse::<u32>() {
                Ok(n) if (1..=crate::qsim::MAX_QUBITS as u32).contains(&n) => Ok(TrapTemplate::Line(n)),
                _ => Err(TrapError::UnknownTemplate(s.into())),
            },
            _ => Err(TrapError::UnknownTemplate(s.into())),
        }
    }
}

impl TrapTemplate {
    pub fn graph(&self) -> OpenGraph {
        match self {
            TrapTemplate::Line(n) => OpenGraph::line(*n).expect("line graphs are valid"),
            TrapTemplate::Square => square_graph().expect("the square is valid"),
        }
    }

    /// Every set of `n_traps` pairwise non-adjacent vertices, in lexicographic order.
    pub fn placements(&self, n_traps: usize) -> Vec<Vec<Vertex>> {
        let g = self.graph();
        let mut out = Vec::new();
        let mut current = Vec::new();
        fn grow(g: &OpenGraph, start: usize, n: usize, current: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
            if current.len() == n {
                out.push(current.clone());
                return;
            }
            for i in start..g.vertices().len() {
                let v = g.vertices()[i];
                if current.iter().all(|&c| !g.are_adjacent(c, v)) {
                    current.push(v);
                    grow(g, i + 1, n, current, out);
                    current.pop();
                }
            }
        }
        grow(&g, 0, n_traps, &mut current, &mut out);
        out
    }
}

/// A public graph, the computation hidden in it and the secret trap layout.
#[derive(Clone, Debug, PartialEq)]
pub struct BlindedPattern {
    pub public: OpenGraph,
    pub logical: MeasurementPattern,
    pub layout: TrapLayout,
}

impl BlindedPattern {
    pub fn job(&self) -> Result<DelegatedJob, TrapError> {
        Ok(DelegatedJob::blinded(self.public.clone(), self.logical.clone())?)
    }

    /// Output an honest run produces; the hidden computation is deterministic.
    pub fn honest_output(&self) -> Vec<u8> {
        vec![0; self.logical.graph().outputs().len()]
    }
}

/// Splits `keep` into the induced paths of `graph`, each listed from its
/// lower endpoint.
fn paths(graph: &OpenGraph, keep: &BTreeSet<Vertex>) -> Result<Vec<Vec<Vertex>>, TrapError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &v in keep {
        if seen.contains(&v) {
            continue;
        }
        let mut comp = BTreeSet::from([v]);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for w in graph.neighbors(u).filter(|w| keep.contains(w)) {
                if comp.insert(w) {
                    stack.push(w);
                }
            }
        }
        let degree = |u: Vertex| graph.neighbors(u).filter(|w| comp.contains(w)).count();
        let ends: Vec<Vertex> = comp.iter().copied().filter(|&u| degree(u) <= 1).collect();
        let n_edges: usize = comp.iter().map(|&u| degree(u)).sum::<usize>() / 2;
        if n_edges + 1 != comp.len() || comp.iter().any(|&u| degree(u) > 2) {
            return Err(TrapError::Layout(format!("compute region {comp:?} is not a path")));
        }
        let mut path = vec![ends[0]];
        while path.len() < comp.len() {
            let last = *path.last().expect("non-empty");
            let next = graph
                .neighbors(last)
                .find(|w| comp.contains(w) && !path.contains(w))
                .expect("paths are connected");
            path.push(next);
        }
        if path.windows(2).any(|w| w[0] > w[1]) {
            return Err(TrapError::Layout(format!("compute path {path:?} is not increasing")));
        }
        seen.extend(comp);
        out.push(path);
    }
    Ok(out)
}

/// Deterministic wires along every path of `compute`, as one pattern.
fn compute_pattern(graph: &OpenGraph, compute: &BTreeSet<Vertex>) -> Result<MeasurementPattern, TrapError> {
    let mut phi = BTreeMap::new();
    let mut x_deps = BTreeMap::new();
    let mut z_deps = BTreeMap::new();
    let (mut inputs, mut outputs) = (Vec::new(), Vec::new());
    for path in paths(graph, compute)? {
        let wire = deterministic_wire_on(graph, &path)?;
        phi.extend(wire.angles().clone());
        for &v in &path {
            if !wire.x_deps(v).is_empty() {
                x_deps.insert(v, wire.x_deps(v).to_vec());
            }
            if !wire.z_deps(v).is_empty() {
                z_deps.insert(v, wire.z_deps(v).to_vec());
            }
        }
        inputs.push(path[0]);
        outputs.push(*path.last().expect("non-empty"));
    }
    let keep: Vec<Vertex> = compute.iter().copied().collect();
    let readout = outputs.iter().map(|&o| (o, Readout::Xy)).collect();
    let sub = graph.induced(&keep, inputs, outputs)?;
    Ok(MeasurementPattern::new(sub, keep, phi, x_deps, z_deps, readout)?)
}

/// Places traps at `positions` with fresh angles and dummy values from `rng`.
pub fn embed_traps_at<R: Rng + ?Sized>(
    template: TrapTemplate,
    positions: &[Vertex],
    rng: &mut R,
) -> Result<BlindedPattern, TrapError> {
    let public = template.graph();
    let traps: BTreeSet<Vertex> = positions.iter().copied().collect();
    for &t in &traps {
        if !public.contains(t) {
            return Err(TrapError::Layout(format!("trap {t} is not in {template}")));
        }
        if let Some(u) = traps.iter().find(|&&u| public.are_adjacent(t, u)) {
            return Err(TrapError::Layout(format!("traps {t} and {u} are adjacent")));
        }
    }
    let dummies: BTreeSet<Vertex> = traps.iter().flat_map(|&t| public.neighbors(t)).collect();
    let compute: BTreeSet<Vertex> = public
        .vertices()
        .iter()
        .copied()
        .filter(|v| !traps.contains(v) && !dummies.contains(v))
        .collect();
    let layout = TrapLayout {
        trap_theta: traps.iter().map(|&t| (t, Angle::random(rng))).collect(),
        dummy_z: dummies.iter().map(|&d| (d, rng.gen_range(0..2u8))).collect(),
        dummy_delta: dummies.iter().map(|&d| (d, Angle::random(rng))).collect(),
        traps,
        dummies,
    };
    let logical = compute_pattern(&public, &compute)?;
    Ok(BlindedPattern {
        public,
        logical,
        layout,
    })
}

/// Places `n_traps` traps on a uniformly chosen set of isolated positions.
pub fn embed_traps<R: Rng + ?Sized>(
    template: TrapTemplate,
    n_traps: usize,
    rng: &mut R,
) -> Result<BlindedPattern, TrapError> {
    let choices = template.placements(n_traps);
    if choices.is_empty() {
        return Err(TrapError::Insufficient {
            template: template.to_string(),
            requested: n_traps,
        });
    }
    let pick = &choices[rng.gen_range(0..choices.len())];
    embed_traps_at(template, pick, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mbqc::circuit_oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn template_names() {
        assert_eq!("line:4".parse::<TrapTemplate>().unwrap(), TrapTemplate::Line(4));
        assert_eq!("square".parse::<TrapTemplate>().unwrap(), TrapTemplate::Square);
        assert!("line:0".parse::<TrapTemplate>().is_err());
        assert!("ring:3".parse::<TrapTemplate>().is_err());
        assert_eq!(TrapTemplate::Line(4).to_string(), "line:4");
    }

    #[test]
    fn placements_are_independent_sets() {
        assert_eq!(TrapTemplate::Line(4).placements(1).len(), 4);
        assert_eq!(
            TrapTemplate::Line(4).placements(2),
            vec![vec![0, 2], vec![0, 3], vec![1, 3]]
        );
        assert_eq!(TrapTemplate::Square.placements(2), vec![vec![0, 3], vec![1, 2]]);
        assert!(TrapTemplate::Line(4).placements(3).is_empty());
    }

    #[test]
    fn zero_traps_leave_the_computation_whole() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let b = embed_traps(TrapTemplate::Line(4), 0, &mut rng).unwrap();
        assert!(b.layout.is_empty());
        assert_eq!(b.logical.graph().vertices(), &[0, 1, 2, 3]);
    }

    #[test]
    fn too_many_traps() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            embed_traps(TrapTemplate::Square, 3, &mut rng),
            Err(TrapError::Insufficient { .. })
        ));
    }

    #[test]
    fn every_placement_hides_a_deterministic_computation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for template in [TrapTemplate::Line(4), TrapTemplate::Line(5), TrapTemplate::Square] {
            for t in 0..=2 {
                if template == TrapTemplate::Square && t == 0 {
                    assert!(embed_traps(template, 0, &mut rng).is_err(), "a 4-cycle carries no wire");
                    continue;
                }
                for pos in template.placements(t) {
                    let b = embed_traps_at(template, &pos, &mut rng).unwrap();
                    b.layout.validate(&b.public).unwrap();
                    b.job().unwrap();
                    let dist = circuit_oracle(&b.logical).unwrap();
                    assert!(
                        (dist.probability(&b.honest_output()) - 1.0).abs() < 1e-12,
                        "{template} traps {pos:?}"
                    );
                }
            }
        }
    }
}
