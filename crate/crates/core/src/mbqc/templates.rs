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

//! Canned patterns.

use std::collections::BTreeMap;

use super::{MeasurementPattern, OpenGraph, PatternError, Readout, Vertex};
use crate::angle::Angle;

/// Flow-derived dependencies for a wire `path[0] - path[1] - ...` inside `graph`:
/// the successor of `v` collects `v` as an X dependency, and every other
/// neighbor of that successor collects `v` as a Z dependency.
pub fn wire_dependencies(
    graph: &OpenGraph,
    path: &[Vertex],
) -> (BTreeMap<Vertex, Vec<Vertex>>, BTreeMap<Vertex, Vec<Vertex>>) {
    let mut x: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    let mut z: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for w in path.windows(2) {
        let (v, next) = (w[0], w[1]);
        x.entry(next).or_default().push(v);
        for u in graph.neighbors(next) {
            if u != v {
                z.entry(u).or_default().push(v);
            }
        }
    }
    (x, z)
}

/// Line of `n` vertices; every non-output vertex is measured at the given
/// angle and the last vertex is read out as specified (`phi_out` is its X-Y
/// angle when `readout` is [`Readout::Xy`]).
fn wire(angles: &[Angle], readout: Readout, phi_out: Angle) -> Result<MeasurementPattern, PatternError> {
    let n = angles.len() as u32 + 1;
    let graph = OpenGraph::line(n)?;
    let path: Vec<Vertex> = (0..n).collect();
    let (x_deps, z_deps) = wire_dependencies(&graph, &path);
    let mut phi: BTreeMap<Vertex, Angle> = angles.iter().enumerate().map(|(v, &a)| (v as Vertex, a)).collect();
    let mut order: Vec<Vertex> = (0..n - 1).collect();
    if readout == Readout::Xy {
        phi.insert(n - 1, phi_out);
        order.push(n - 1);
    }
    MeasurementPattern::new(graph, order, phi, x_deps, z_deps, BTreeMap::from([(n - 1, readout)]))
}

/// Line of `n` vertices, all measured at angle 0, output read in Z. Implements
/// `H^{n-1}` on `|+⟩`: uniform output for odd `n`, deterministic 0 for even `n`.
pub fn identity_wire(n: u32) -> Result<MeasurementPattern, PatternError> {
    if n == 0 {
        return Err(PatternError::Template("a wire needs at least one vertex".into()));
    }
    wire(&vec![Angle::ZERO; n as usize - 1], Readout::Z, Angle::ZERO)
}

/// Single-qubit rotation wire: one vertex per angle plus a Z-read output.
pub fn rotation_wire(angles: &[Angle]) -> Result<MeasurementPattern, PatternError> {
    wire(angles, Readout::Z, Angle::ZERO)
}

/// Wire of `n` vertices, all measured in the X-Y plane, whose logical output is
/// 0 with certainty: the first vertex at -π/2, inner vertices at π and the
/// output at -π/2 keep the logical state at `|+_{-π/2}⟩`. A single vertex is
/// read at angle 0.
pub fn deterministic_wire(n: u32) -> Result<MeasurementPattern, PatternError> {
    deterministic_wire_on(&OpenGraph::line(n)?, &(0..n).collect::<Vec<_>>())
}

/// [`deterministic_wire`] laid along `path`, an induced path of `graph`.
pub(crate) fn deterministic_wire_on(graph: &OpenGraph, path: &[Vertex]) -> Result<MeasurementPattern, PatternError> {
    if path.is_empty() {
        return Err(PatternError::Template("a wire needs at least one vertex".into()));
    }
    let minus_half_pi = -Angle::PI_2;
    let last = path.len() - 1;
    let phi: BTreeMap<Vertex, Angle> = path
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let a = match (k, last) {
                (_, 0) => Angle::ZERO,
                (0, _) => minus_half_pi,
                (k, l) if k == l => minus_half_pi,
                _ => Angle::PI,
            };
            (v, a)
        })
        .collect();
    let sub = graph.induced(path, vec![path[0]], vec![path[last]])?;
    let (x_deps, z_deps) = wire_dependencies(&sub, path);
    MeasurementPattern::new(
        sub,
        path.to_vec(),
        phi,
        x_deps,
        z_deps,
        BTreeMap::from([(path[last], Readout::Xy)]),
    )
}

/// 2×2 cluster: two wires `0 - 1` and `2 - 3` joined by rungs `0 - 2` and
/// `1 - 3`. Vertices 0 and 2 are measured at the given angles; 1 and 3 are
/// Z-read outputs.
pub fn cluster_2x2(phi_top: Angle, phi_bottom: Angle) -> Result<MeasurementPattern, PatternError> {
    let graph = square_graph()?;
    let (mut x_deps, mut z_deps) = wire_dependencies(&graph, &[0, 1]);
    let (x2, z2) = wire_dependencies(&graph, &[2, 3]);
    for (v, ds) in x2 {
        x_deps.entry(v).or_default().extend(ds);
    }
    for (v, ds) in z2 {
        z_deps.entry(v).or_default().extend(ds);
    }
    MeasurementPattern::new(
        graph,
        vec![0, 2],
        BTreeMap::from([(0, phi_top), (2, phi_bottom)]),
        x_deps,
        z_deps,
        BTreeMap::new(),
    )
}

/// The 4-cycle `0 - 1 - 3 - 2 - 0` laid out as a 2×2 grid.
pub fn square_graph() -> Result<OpenGraph, PatternError> {
    OpenGraph::new(
        vec![0, 1, 2, 3],
        vec![(0, 1), (2, 3), (0, 2), (1, 3)],
        vec![0, 2],
        vec![1, 3],
    )
}

fn parse_angles(list: &str) -> Result<Vec<Angle>, PatternError> {
    if list.trim().is_empty() {
        return Ok(vec![]);
    }
    list.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map(Angle::from_eighths)
                .map_err(|_| PatternError::Template(format!("bad angle {t:?}")))
        })
        .collect()
}

/// Looks up a canned pattern by name:
///
/// * `wire:N`: [`identity_wire`]
/// * `rotation:a,b,...`: [`rotation_wire`], angles in π/4 steps
/// * `detwire:N`: [`deterministic_wire`]
/// * `cluster2x2:a,b`: [`cluster_2x2`]
pub fn by_name(name: &str) -> Result<MeasurementPattern, PatternError> {
    let (kind, arg) = name.split_once(':').unwrap_or((name, ""));
    let count = || {
        arg.parse::<u32>()
            .map_err(|_| PatternError::Template(format!("{name:?} needs a vertex count")))
    };
    match kind {
        "wire" => identity_wire(count()?),
        "detwire" => deterministic_wire(count()?),
        "rotation" => rotation_wire(&parse_angles(arg)?),
        "cluster2x2" => {
            let a = parse_angles(arg)?;
            match a.as_slice() {
                [] => cluster_2x2(Angle::ZERO, Angle::ZERO),
                [t, b] => cluster_2x2(*t, *b),
                _ => Err(PatternError::Template("cluster2x2 takes two angles".into())),
            }
        }
        _ => Err(PatternError::Template(format!("unknown template {name:?}"))),
    }
}

/// Every canned pattern exercised by the correctness checks, with its name.
pub fn catalogue() -> Vec<(String, MeasurementPattern)> {
    let names = [
        "wire:1",
        "wire:2",
        "wire:3",
        "wire:4",
        "wire:5",
        "rotation:1",
        "rotation:3,6",
        "rotation:1,2,7",
        "detwire:1",
        "detwire:2",
        "detwire:3",
        "detwire:4",
        "cluster2x2:0,0",
        "cluster2x2:1,6",
    ];
    names
        .iter()
        .map(|n| (n.to_string(), by_name(n).expect("catalogue entries are valid")))
        .collect()
}
