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

use super::{ClientSecrets, ProtocolError};
use crate::angle::Angle;
use crate::mbqc::{MeasurementPattern, OpenGraph, PatternError, Readout, Vertex};
use crate::trap::TrapLayout;

/// What the server learns up front (the public graph and the measurement
/// schedule) together with the computation the client actually runs on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelegatedJob {
    public: OpenGraph,
    logical: MeasurementPattern,
    schedule: Vec<Vertex>,
    z_readout: Vec<Vertex>,
    plan: Plan,
}

/// Index-based view of a job; vertex `k` of the public graph is index `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Plan {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
    pub adjacency: Vec<Vec<usize>>,
    pub schedule: Vec<usize>,
    pub z_readout: Vec<usize>,
    pub logical: Vec<bool>,
    pub phi: Vec<Angle>,
    pub x_deps: Vec<Vec<usize>>,
    pub z_deps: Vec<Vec<usize>>,
    /// Logical outputs with their readout, in the logical pattern's output order.
    pub outputs: Vec<(usize, Readout)>,
}

impl DelegatedJob {
    /// Delegates `pattern` as is: the public graph is the pattern's graph,
    /// X-Y vertices are instructed in pattern order and Z-read outputs are
    /// requested at the end.
    pub fn plain(pattern: MeasurementPattern) -> DelegatedJob {
        let public = pattern.graph().clone();
        let schedule = pattern.order().to_vec();
        let z_readout = pattern.z_outputs();
        DelegatedJob::assemble(public, pattern, schedule, z_readout).expect("a valid pattern is a valid plain job")
    }

    /// Runs `logical` on a subset of `public`. Every public vertex is
    /// instructed, in increasing vertex order, and nothing is read in Z, so
    /// the server-visible schedule does not depend on where the logical
    /// computation sits.
    pub fn blinded(public: OpenGraph, logical: MeasurementPattern) -> Result<DelegatedJob, PatternError> {
        let g = logical.graph();
        for &v in g.vertices() {
            if !public.contains(v) {
                return Err(PatternError::UnknownVertex(v));
            }
        }
        let expected = public.induced(g.vertices(), vec![], vec![])?;
        if expected.edges() != g.edges() {
            return Err(PatternError::Template(
                "logical pattern must use the induced subgraph of the public graph".into(),
            ));
        }
        if !logical.z_outputs().is_empty() {
            return Err(PatternError::Template(
                "a blinded job reads every output in the X-Y plane".into(),
            ));
        }
        if logical.order().windows(2).any(|w| w[0] > w[1]) {
            return Err(PatternError::Template(
                "logical order must follow the public vertex order".into(),
            ));
        }
        let schedule = public.vertices().to_vec();
        DelegatedJob::assemble(public, logical, schedule, vec![])
    }

    fn assemble(
        public: OpenGraph,
        logical: MeasurementPattern,
        schedule: Vec<Vertex>,
        z_readout: Vec<Vertex>,
    ) -> Result<DelegatedJob, PatternError> {
        let vertices = public.vertices().to_vec();
        let idx = |v: Vertex| public.index_of(v).ok_or(PatternError::UnknownVertex(v));
        let n = vertices.len();
        let mut plan = Plan {
            edges: public
                .edges()
                .iter()
                .map(|&(a, b)| Ok((idx(a)?, idx(b)?)))
                .collect::<Result<_, PatternError>>()?,
            schedule: schedule.iter().map(|&v| idx(v)).collect::<Result<_, _>>()?,
            z_readout: z_readout.iter().map(|&v| idx(v)).collect::<Result<_, _>>()?,
            adjacency: vec![Vec::new(); n],
            logical: vec![false; n],
            phi: vec![Angle::ZERO; n],
            x_deps: vec![Vec::new(); n],
            z_deps: vec![Vec::new(); n],
            outputs: Vec::new(),
            vertices,
        };
        for &(a, b) in &plan.edges {
            plan.adjacency[a].push(b);
            plan.adjacency[b].push(a);
        }
        for &v in logical.graph().vertices() {
            let k = idx(v)?;
            plan.logical[k] = true;
            plan.phi[k] = logical.phi(v).unwrap_or(Angle::ZERO);
            plan.x_deps[k] = logical.x_deps(v).iter().map(|&d| idx(d)).collect::<Result<_, _>>()?;
            plan.z_deps[k] = logical.z_deps(v).iter().map(|&d| idx(d)).collect::<Result<_, _>>()?;
        }
        for &o in logical.graph().outputs() {
            plan.outputs.push((idx(o)?, logical.readout(o).unwrap_or_default()));
        }
        Ok(DelegatedJob {
            public,
            logical,
            schedule,
            z_readout,
            plan,
        })
    }

    pub fn public_graph(&self) -> &OpenGraph {
        &self.public
    }

    pub fn logical(&self) -> &MeasurementPattern {
        &self.logical
    }

    /// Vertices instructed in the X-Y plane, in order.
    pub fn schedule(&self) -> &[Vertex] {
        &self.schedule
    }

    /// Vertices read in the computational basis at the end.
    pub fn z_readout(&self) -> &[Vertex] {
        &self.z_readout
    }

    pub(crate) fn plan(&self) -> &Plan {
        &self.plan
    }
}

/// Per-vertex role in a session.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Role {
    Compute,
    Trap,
    Dummy,
}

pub(crate) const UNSET_THETA: u8 = 1;
pub(crate) const UNSET_MASK: u8 = 2;

/// Secrets of one session flattened onto plan indices. Entries flagged in
/// `unset` are chosen later, one at a time, by an exhaustive enumerator.
#[derive(Clone, Debug)]
pub(crate) struct SessionKeys {
    pub role: Vec<Role>,
    /// Preparation angle, or the Z value for dummies (as 0 or 4 eighths).
    pub theta: Vec<Angle>,
    pub r: Vec<u8>,
    pub dummy_delta: Vec<Angle>,
    pub unset: Vec<u8>,
}

impl SessionKeys {
    pub fn new(job: &DelegatedJob, secrets: &ClientSecrets) -> Result<SessionKeys, ProtocolError> {
        let mut keys = SessionKeys::roles(job, &secrets.layout)?;
        let plan = job.plan();
        let layout = &secrets.layout;
        for (k, &v) in plan.vertices.iter().enumerate() {
            keys.theta[k] = match keys.role[k] {
                Role::Dummy => Angle::ZERO.plus_pi_if(layout.dummy_z[&v]),
                _ => secrets
                    .theta_of(v)
                    .ok_or_else(|| ProtocolError::Secrets(format!("no preparation angle for vertex {v}")))?,
            };
            keys.r[k] = secrets.r.get(&v).copied().unwrap_or(0) & 1;
            keys.dummy_delta[k] = layout.dummy_delta.get(&v).copied().unwrap_or(Angle::ZERO);
            keys.unset[k] = 0;
        }
        Ok(keys)
    }

    /// Keys with roles taken from `layout` and every secret left open.
    pub fn roles(job: &DelegatedJob, layout: &TrapLayout) -> Result<SessionKeys, ProtocolError> {
        let plan = job.plan();
        layout
            .validate(job.public_graph())
            .map_err(|e| ProtocolError::Secrets(e.to_string()))?;
        let n = plan.vertices.len();
        let mut role = Vec::with_capacity(n);
        for (k, &v) in plan.vertices.iter().enumerate() {
            let r = if layout.is_trap(v) {
                Role::Trap
            } else if layout.is_dummy(v) {
                Role::Dummy
            } else {
                Role::Compute
            };
            if (r == Role::Compute) != plan.logical[k] {
                return Err(ProtocolError::Secrets(format!(
                    "vertex {v} is {} the logical pattern but the layout says {r:?}",
                    if plan.logical[k] { "in" } else { "outside" }
                )));
            }
            role.push(r);
        }
        Ok(SessionKeys {
            role,
            theta: vec![Angle::ZERO; n],
            r: vec![0; n],
            dummy_delta: vec![Angle::ZERO; n],
            unset: vec![UNSET_THETA | UNSET_MASK; n],
        })
    }
}
