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

//! The client's side of a session as a message-driven state machine.

use crate::inline::Inline;
use std::collections::{BTreeMap, BTreeSet};

use super::job::{Role, SessionKeys, UNSET_MASK, UNSET_THETA};
use super::{
    client_delta, client_interpret, DelegatedJob, ProtocolError, ProtocolMessage, QuantumChannel, QubitHandle,
};
use crate::angle::Angle;
use crate::mbqc::{PatternResult, Readout};
use crate::trap::Decision;

const UNKNOWN: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Prepare(usize),
    Entangle(usize),
    Instruct(usize),
    AwaitReport(usize),
    RequestReadout,
    AwaitClaim,
    Decide,
    Done,
}

/// Everything the client tracks about one vertex.
#[derive(Clone, Copy, Debug)]
struct Slot {
    role: Role,
    /// Preparation angle, or the Z value for dummies (as 0 or π).
    theta: Angle,
    r: u8,
    dummy_delta: Angle,
    unset: u8,
    handle: QubitHandle,
    /// Reported bit.
    raw: u8,
    /// De-masked outcome of a compute vertex.
    s: u8,
}

#[derive(Clone, Debug)]
pub struct Client<'a> {
    job: &'a DelegatedJob,
    phase: Phase,
    slots: Inline<Slot, 8>,
    claim: Vec<u8>,
    outputs: Vec<u8>,
    accept: bool,
}

impl<'a> Client<'a> {
    pub(crate) fn new(job: &'a DelegatedJob, keys: SessionKeys) -> Client<'a> {
        let n = job.plan().vertices.len();
        let slots = (0..n)
            .map(|k| Slot {
                role: keys.role[k],
                theta: keys.theta[k],
                r: keys.r[k],
                dummy_delta: keys.dummy_delta[k],
                unset: keys.unset[k],
                handle: QubitHandle(u64::MAX),
                raw: UNKNOWN,
                s: UNKNOWN,
            })
            .collect();
        Client {
            job,
            phase: if n == 0 {
                Phase::RequestReadout
            } else {
                Phase::Prepare(0)
            },
            slots,
            claim: Vec::new(),
            outputs: Vec::new(),
            accept: false,
        }
    }

    /// Parity of the dummy neighbors of `k` prepared in `|1⟩`.
    fn zpar(&self, k: usize) -> u8 {
        self.job.plan().adjacency[k]
            .iter()
            .filter(|&&d| self.slots[d].role == Role::Dummy && self.slots[d].theta == Angle::PI)
            .count() as u8
            & 1
    }

    pub fn is_done(&self) -> bool {
        self.phase == Phase::Done
    }

    /// Whether the client is waiting for a reply.
    pub fn is_waiting(&self) -> bool {
        matches!(self.phase, Phase::AwaitReport(_) | Phase::AwaitClaim)
    }

    fn violation(&self, got: &ProtocolMessage) -> ProtocolError {
        ProtocolError::Violation(format!("client in phase {:?} cannot accept {}", self.phase, got.kind()))
    }

    fn first_schedule_phase(&self) -> Phase {
        if self.job.plan().schedule.is_empty() {
            Phase::RequestReadout
        } else {
            Phase::Instruct(0)
        }
    }

    /// Next outgoing message, if the client has one to send now. Qubits are
    /// pushed through `channel` as part of the preparation messages.
    pub fn poll_send(&mut self, channel: &mut dyn QuantumChannel) -> Result<Option<ProtocolMessage>, ProtocolError> {
        let plan = self.job.plan();
        if self.pending_choice().is_some() {
            return Err(ProtocolError::Secrets("a session secret is still open".into()));
        }
        let msg = match self.phase {
            Phase::Prepare(k) => {
                let slot = self.slots[k];
                let handle = match slot.role {
                    Role::Dummy => channel.prepare_z(u8::from(slot.theta == Angle::PI))?,
                    _ => channel.prepare_plus(slot.theta)?,
                };
                self.slots[k].handle = handle;
                self.phase = if k + 1 < plan.vertices.len() {
                    Phase::Prepare(k + 1)
                } else if !plan.edges.is_empty() {
                    Phase::Entangle(0)
                } else {
                    self.first_schedule_phase()
                };
                ProtocolMessage::PrepareNotice { handle_id: handle }
            }
            Phase::Entangle(e) => {
                let (a, b) = plan.edges[e];
                self.phase = if e + 1 < plan.edges.len() {
                    Phase::Entangle(e + 1)
                } else {
                    self.first_schedule_phase()
                };
                ProtocolMessage::Entangle {
                    handle_a: self.slots[a].handle,
                    handle_b: self.slots[b].handle,
                }
            }
            Phase::Instruct(step) => {
                let k = plan.schedule[step];
                let slot = self.slots[k];
                let delta = match slot.role {
                    Role::Dummy => slot.dummy_delta,
                    Role::Trap => client_delta(Angle::ZERO, slot.theta, slot.r),
                    Role::Compute => {
                        let phi = self.corrected(k)?;
                        client_delta(phi, slot.theta, slot.r).plus_pi_if(self.zpar(k))
                    }
                };
                self.phase = Phase::AwaitReport(step);
                ProtocolMessage::MeasureInstruction {
                    handle_id: slot.handle,
                    delta,
                }
            }
            Phase::RequestReadout => {
                self.phase = Phase::AwaitClaim;
                ProtocolMessage::ReadoutRequest {
                    handles: plan.z_readout.iter().map(|&k| self.slots[k].handle).collect(),
                }
            }
            Phase::Decide => {
                self.finish()?;
                self.phase = Phase::Done;
                ProtocolMessage::Decision { accept: self.accept }
            }
            Phase::AwaitReport(_) | Phase::AwaitClaim | Phase::Done => return Ok(None),
        };
        Ok(Some(msg))
    }

    fn corrected(&self, k: usize) -> Result<Angle, ProtocolError> {
        let plan = self.job.plan();
        let parity = |deps: &[usize]| -> Result<u8, ProtocolError> {
            deps.iter().try_fold(0u8, |acc, &d| match self.slots[d].s {
                UNKNOWN => Err(ProtocolError::Violation(format!(
                    "outcome of vertex {} needed before it was reported",
                    plan.vertices[d]
                ))),
                b => Ok(acc ^ b),
            })
        };
        let sx = parity(&plan.x_deps[k])?;
        let sz = parity(&plan.z_deps[k])?;
        Ok(plan.phi[k].negate_if(sx).plus_pi_if(sz))
    }

    pub fn receive(&mut self, msg: ProtocolMessage) -> Result<(), ProtocolError> {
        let plan = self.job.plan();
        match (self.phase, &msg) {
            (Phase::AwaitReport(step), ProtocolMessage::OutcomeReport { handle_id, b }) => {
                let k = plan.schedule[step];
                let slot = &mut self.slots[k];
                if *handle_id != slot.handle || *b > 1 {
                    return Err(self.violation(&msg));
                }
                slot.raw = *b;
                if slot.role == Role::Compute {
                    slot.s = client_interpret(*b, slot.r);
                }
                self.phase = if step + 1 < plan.schedule.len() {
                    Phase::Instruct(step + 1)
                } else {
                    Phase::RequestReadout
                };
                Ok(())
            }
            (Phase::AwaitClaim, ProtocolMessage::ResultClaim { bits }) => {
                if bits.len() != plan.z_readout.len() || bits.iter().any(|&b| b > 1) {
                    return Err(self.violation(&msg));
                }
                self.claim.clone_from(bits);
                self.phase = Phase::Decide;
                Ok(())
            }
            _ => Err(self.violation(&msg)),
        }
    }

    fn finish(&mut self) -> Result<(), ProtocolError> {
        let plan = self.job.plan();
        let mut outputs = Vec::with_capacity(plan.outputs.len());
        for &(k, readout) in &plan.outputs {
            let bit = match readout {
                Readout::Xy => self.slots[k].s,
                Readout::Z => {
                    let pos = plan
                        .z_readout
                        .iter()
                        .position(|&z| z == k)
                        .ok_or_else(|| ProtocolError::Violation("Z output missing from readout".into()))?;
                    plan.x_deps[k]
                        .iter()
                        .fold(self.claim[pos], |acc, &d| acc ^ self.slots[d].s)
                }
            };
            if bit > 1 {
                return Err(ProtocolError::Violation("output bit never reported".into()));
            }
            outputs.push(bit);
        }
        self.outputs = outputs;
        let accept = self.failed_trap_indices().next().is_none();
        self.accept = accept;
        Ok(())
    }

    fn failed_trap_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let plan = self.job.plan();
        (0..plan.vertices.len()).filter(move |&k| {
            let slot = &self.slots[k];
            slot.role == Role::Trap && slot.raw != slot.r ^ self.zpar(k)
        })
    }

    /// The secret the next message depends on, if it is still open, with the
    /// number of values it can take.
    pub(crate) fn pending_choice(&self) -> Option<(usize, u8)> {
        match self.phase {
            Phase::Prepare(k) if self.slots[k].unset & UNSET_THETA != 0 => {
                Some((k, if self.slots[k].role == Role::Dummy { 2 } else { 8 }))
            }
            Phase::Instruct(step) => {
                let k = self.job.plan().schedule[step];
                let slot = &self.slots[k];
                (slot.unset & UNSET_MASK != 0).then_some((k, if slot.role == Role::Dummy { 8 } else { 2 }))
            }
            _ => None,
        }
    }

    /// Fixes the secret reported by [`Client::pending_choice`].
    pub(crate) fn fix_choice(&mut self, value: u8) {
        match self.pending_choice() {
            Some((k, 2)) if matches!(self.phase, Phase::Prepare(_)) => {
                self.slots[k].theta = Angle::ZERO.plus_pi_if(value);
                self.slots[k].unset &= !UNSET_THETA;
            }
            Some((k, _)) if matches!(self.phase, Phase::Prepare(_)) => {
                self.slots[k].theta = Angle::from_eighths(i64::from(value));
                self.slots[k].unset &= !UNSET_THETA;
            }
            Some((k, _)) => {
                let slot = &mut self.slots[k];
                if slot.role == Role::Dummy {
                    slot.dummy_delta = Angle::from_eighths(i64::from(value));
                } else {
                    slot.r = value & 1;
                }
                slot.unset &= !UNSET_MASK;
            }
            None => {}
        }
    }

    /// Number of measurements the next message makes the server perform.
    pub(crate) fn measurements_in_next(&self) -> usize {
        match self.phase {
            Phase::Instruct(_) => 1,
            Phase::RequestReadout => self.job.plan().z_readout.len(),
            _ => 0,
        }
    }

    /// Logical output bits in output order; empty until the session is done.
    pub fn output_bits(&self) -> &[u8] {
        &self.outputs
    }

    pub fn accepted(&self) -> bool {
        self.is_done() && self.accept
    }

    /// Raw bits the server reported, by vertex.
    pub fn reported(&self) -> BTreeMap<u32, u8> {
        let plan = self.job.plan();
        plan.vertices
            .iter()
            .zip(&self.slots)
            .filter(|(_, slot)| slot.raw != UNKNOWN)
            .map(|(&v, slot)| (v, slot.raw))
            .collect()
    }

    pub fn decision(&self) -> Decision {
        let plan = self.job.plan();
        let failed: BTreeSet<u32> = self.failed_trap_indices().map(|k| plan.vertices[k]).collect();
        if self.is_done() {
            Decision::from_failures(failed)
        } else {
            Decision {
                accept: false,
                failed_traps: failed,
            }
        }
    }

    pub fn pattern_result(&self) -> PatternResult {
        let plan = self.job.plan();
        let logical = self.job.logical();
        PatternResult {
            outputs: plan
                .outputs
                .iter()
                .zip(&self.outputs)
                .map(|(&(k, _), &b)| (plan.vertices[k], b))
                .collect(),
            transcript: logical
                .order()
                .iter()
                .filter_map(|&v| {
                    let k = plan.vertices.iter().position(|&u| u == v)?;
                    let s = self.slots[k].s;
                    (s != UNKNOWN).then_some((v, s))
                })
                .collect(),
        }
    }
}
