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

//! Exact joint behavior of client and server by walking every branch: every
//! secret the client draws and every measurement outcome, each with its
//! probability. Secrets are fixed at the moment they are first used so that
//! branches share their common prefix.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::job::{Role, SessionKeys};
use super::{ChannelError, Client, DelegatedJob, ProtocolError, Registry, Server, SessionTranscript};
use crate::adversary::ServerBehavior;
use crate::angle::Angle;
use crate::mbqc::{MeasurementPattern, Vertex};
use crate::stats::Distribution;
use crate::trap::TrapLayout;

/// Default cap on the number of leaves an enumeration may visit.
pub const DEFAULT_BOUND: u128 = 1 << 26;

/// One complete session reached by the enumeration.
pub struct Leaf<'x> {
    pub outputs: &'x [u8],
    pub accepted: bool,
    /// The server's view of the session.
    pub transcript: &'x SessionTranscript,
}

#[derive(Clone)]
struct Duplex<'a> {
    client: Client<'a>,
    server: Server<'a>,
    registry: Registry,
}

impl Duplex<'_> {
    /// Sends the next client message and feeds back the reply.
    fn step(&mut self) -> Result<bool, ProtocolError> {
        let Some(msg) = self.client.poll_send(&mut self.registry)? else {
            return Ok(false);
        };
        match self.server.receive(msg, &mut self.registry)? {
            Some(reply) => self.client.receive(reply)?,
            None if self.client.is_waiting() => return Err(ProtocolError::Violation("server did not reply".into())),
            None => {}
        }
        Ok(true)
    }
}

fn leaf_count(job: &DelegatedJob, keys: &SessionKeys) -> u128 {
    let plan = job.plan();
    let mut count: u128 = 1;
    for k in 0..plan.vertices.len() {
        count = count.saturating_mul(if keys.role[k] == Role::Dummy { 2 } else { 8 });
    }
    for &k in &plan.schedule {
        count = count.saturating_mul(if keys.role[k] == Role::Dummy { 8 } else { 2 } * 2);
    }
    count.saturating_mul(1 << plan.z_readout.len().min(64))
}

fn explore(d: &mut Duplex<'_>, weight: f64, visit: &mut dyn FnMut(Leaf<'_>, f64)) -> Result<(), ProtocolError> {
    loop {
        if let Some((_, arity)) = d.client.pending_choice() {
            let w = weight / f64::from(arity);
            for value in 0..arity - 1 {
                let mut branch = d.clone();
                branch.client.fix_choice(value);
                explore(&mut branch, w, visit)?;
            }
            d.client.fix_choice(arity - 1);
            return explore(d, w, visit);
        }
        let m = d.client.measurements_in_next();
        if m > 0 {
            let last = (1u64 << m) - 1;
            for bits in 0..last {
                outcome_branch(&mut d.clone(), bits, m, weight, visit)?;
            }
            return outcome_branch(d, last, m, weight, visit);
        }
        if !d.step()? {
            visit(
                Leaf {
                    outputs: d.client.output_bits(),
                    accepted: d.client.accepted(),
                    transcript: d.server.transcript(),
                },
                weight,
            );
            return Ok(());
        }
    }
}

/// Forces the next `m` measurement outcomes to the bits of `bits` and explores on.
fn outcome_branch(
    d: &mut Duplex<'_>,
    bits: u64,
    m: usize,
    weight: f64,
    visit: &mut dyn FnMut(Leaf<'_>, f64),
) -> Result<(), ProtocolError> {
    d.registry.set_script(bits, m);
    match d.step() {
        Ok(_) => {}
        Err(ProtocolError::Channel(ChannelError::ImpossibleBranch)) => return Ok(()),
        Err(e) => return Err(e),
    }
    let w = weight * d.registry.script_weight();
    if w > 0.0 {
        explore(d, w, visit)?;
    }
    Ok(())
}

/// Visits every session of `job` with trap roles from `layout` (its secret
/// values are ignored and enumerated instead), against `behavior` whose own
/// randomness is fixed by `server_seed`.
pub fn enumerate_sessions(
    job: &DelegatedJob,
    layout: &TrapLayout,
    behavior: &ServerBehavior,
    server_seed: u64,
    bound: u128,
    visit: &mut dyn FnMut(Leaf<'_>, f64),
) -> Result<(), ProtocolError> {
    enumerate_inner(job, layout, behavior, server_seed, bound, true, visit)
}

fn enumerate_inner(
    job: &DelegatedJob,
    layout: &TrapLayout,
    behavior: &ServerBehavior,
    server_seed: u64,
    bound: u128,
    record: bool,
    visit: &mut dyn FnMut(Leaf<'_>, f64),
) -> Result<(), ProtocolError> {
    let keys = SessionKeys::roles(job, layout)?;
    let needed = leaf_count(job, &keys);
    if needed > bound {
        return Err(ProtocolError::BoundExceeded { needed, bound });
    }
    let server = Server::new(behavior, ChaCha8Rng::seed_from_u64(server_seed));
    let mut d = Duplex {
        client: Client::new(job, keys),
        server: if record { server } else { server.unrecorded() },
        registry: Registry::scripted(),
    };
    explore(&mut d, 1.0, visit)
}

/// Exact distribution of the client's logical output.
pub fn exact_output_distribution(
    job: &DelegatedJob,
    layout: &TrapLayout,
    behavior: &ServerBehavior,
) -> Result<Distribution, ProtocolError> {
    let mut tally: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
    enumerate_inner(
        job,
        layout,
        behavior,
        0,
        DEFAULT_BOUND,
        false,
        &mut |leaf, w| match tally.get_mut(leaf.outputs) {
            Some(p) => *p += w,
            None => {
                tally.insert(leaf.outputs.to_vec(), w);
            }
        },
    )?;
    let mut dist = Distribution::new();
    for (k, w) in tally {
        dist.add(k, w);
    }
    Ok(dist)
}

/// Exact probability that the client accepts.
pub fn exact_acceptance(
    job: &DelegatedJob,
    layout: &TrapLayout,
    behavior: &ServerBehavior,
) -> Result<f64, ProtocolError> {
    let mut p = 0.0;
    enumerate_inner(job, layout, behavior, 0, DEFAULT_BOUND, false, &mut |leaf, w| {
        if leaf.accepted {
            p += w;
        }
    })?;
    Ok(p)
}

/// Exact distribution of the server's view of `job`.
pub fn job_view_distribution(
    job: &DelegatedJob,
    layout: &TrapLayout,
    behavior: &ServerBehavior,
    bound: u128,
) -> Result<Distribution, ProtocolError> {
    let mut dist = Distribution::new();
    enumerate_sessions(job, layout, behavior, 0, bound, &mut |leaf, w| {
        dist.add(leaf.transcript.view_key(), w)
    })?;
    Ok(dist)
}

/// Exact distribution of an honest server's view when `pattern`'s graph is
/// run with computational angles `phi`.
pub fn view_distribution(
    pattern: &MeasurementPattern,
    phi: &BTreeMap<Vertex, Angle>,
    bound: u128,
) -> Result<Distribution, ProtocolError> {
    let job = DelegatedJob::plain(pattern.with_angles(phi.clone())?);
    job_view_distribution(&job, &TrapLayout::default(), &ServerBehavior::Honest, bound)
}
