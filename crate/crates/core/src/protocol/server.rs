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

use crate::inline::Inline;
use rand_chacha::ChaCha8Rng;

use super::{HandleOps, ProtocolError, ProtocolMessage, QubitHandle, SessionTranscript, ViewEvent};
use crate::adversary::{Deviation, ServerBehavior};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Stage {
    Receiving,
    Entangling,
    Measuring,
    ReadOut,
    Closed,
}

/// Bob. Holds nothing but handles, its own randomness and its view.
#[derive(Clone, Debug)]
pub struct Server<'b> {
    deviation: Deviation<'b>,
    rng: ChaCha8Rng,
    stage: Stage,
    arrivals: Inline<QubitHandle, 16>,
    transcript: SessionTranscript,
    record: bool,
    verdict: Option<bool>,
}

impl<'b> Server<'b> {
    pub fn new(behavior: &'b ServerBehavior, rng: ChaCha8Rng) -> Server<'b> {
        Server {
            deviation: Deviation::new(behavior),
            rng,
            stage: Stage::Receiving,
            arrivals: Inline::new(),
            transcript: SessionTranscript::new(),
            record: true,
            verdict: None,
        }
    }

    /// A server that keeps no transcript; for enumerations that only need outcomes.
    pub(crate) fn unrecorded(mut self) -> Server<'b> {
        self.record = false;
        self
    }

    fn log(&mut self, event: impl FnOnce() -> ViewEvent) {
        if self.record {
            self.transcript.push(event());
        }
    }

    pub fn transcript(&self) -> &SessionTranscript {
        &self.transcript
    }

    pub fn into_transcript(self) -> SessionTranscript {
        self.transcript
    }

    /// The client's announced decision, once received.
    pub fn verdict(&self) -> Option<bool> {
        self.verdict
    }

    pub fn is_closed(&self) -> bool {
        self.stage == Stage::Closed
    }

    fn advance(&mut self, to: Stage, msg: &ProtocolMessage) -> Result<(), ProtocolError> {
        if to < self.stage {
            return Err(ProtocolError::Violation(format!(
                "server cannot accept {} after {:?}",
                msg.kind(),
                self.stage
            )));
        }
        if self.stage == Stage::Receiving && to > Stage::Receiving {
            let n = self.arrivals.len();
            self.deviation.resolve(n, &mut self.rng);
        }
        self.stage = to;
        Ok(())
    }

    fn position(&self, h: QubitHandle) -> Result<usize, ProtocolError> {
        self.arrivals
            .iter()
            .position(|&a| a == h)
            .ok_or_else(|| ProtocolError::Violation(format!("handle {h} was never announced")))
    }

    fn measure(
        &mut self,
        ops: &mut dyn HandleOps,
        h: QubitHandle,
        delta: Option<crate::angle::Angle>,
    ) -> Result<u8, ProtocolError> {
        let position = self.position(h)?;
        if !self.deviation.is_passive() {
            self.deviation.before_measure(ops, h, position, &mut self.rng)?;
        }
        let bit = match delta {
            Some(d) => ops.measure_xy(h, d + self.deviation.offset())?,
            None => ops.measure_z(h)?,
        };
        self.log(|| ViewEvent::Measured { handle_id: h, bit });
        Ok(if self.deviation.is_passive() {
            bit
        } else {
            self.deviation.report(bit, &mut self.rng)
        })
    }

    /// Handles one client message and returns the reply, if the message calls for one.
    pub fn receive(
        &mut self,
        msg: ProtocolMessage,
        ops: &mut dyn HandleOps,
    ) -> Result<Option<ProtocolMessage>, ProtocolError> {
        let reply = match &msg {
            ProtocolMessage::PrepareNotice { handle_id } => {
                self.advance(Stage::Receiving, &msg)?;
                if self.arrivals.contains(handle_id) {
                    return Err(ProtocolError::Violation(format!("handle {handle_id} announced twice")));
                }
                self.log(|| ViewEvent::Received { msg: msg.clone() });
                self.arrivals.push(*handle_id);
                None
            }
            ProtocolMessage::Entangle { handle_a, handle_b } => {
                self.advance(Stage::Entangling, &msg)?;
                self.position(*handle_a)?;
                self.position(*handle_b)?;
                self.log(|| ViewEvent::Received { msg: msg.clone() });
                ops.entangle(*handle_a, *handle_b)?;
                None
            }
            ProtocolMessage::MeasureInstruction { handle_id, delta } => {
                self.advance(Stage::Measuring, &msg)?;
                self.log(|| ViewEvent::Received { msg: msg.clone() });
                let b = self.measure(ops, *handle_id, Some(*delta))?;
                Some(ProtocolMessage::OutcomeReport {
                    handle_id: *handle_id,
                    b,
                })
            }
            ProtocolMessage::ReadoutRequest { handles } => {
                if self.stage >= Stage::ReadOut {
                    return Err(ProtocolError::Violation("second readout request".into()));
                }
                self.advance(Stage::ReadOut, &msg)?;
                self.log(|| ViewEvent::Received { msg: msg.clone() });
                let mut bits = Vec::with_capacity(handles.len());
                for &h in handles {
                    bits.push(self.measure(ops, h, None)?);
                }
                Some(ProtocolMessage::ResultClaim { bits })
            }
            ProtocolMessage::Decision { accept } => {
                if self.stage != Stage::ReadOut {
                    return Err(ProtocolError::Violation("decision before readout".into()));
                }
                self.log(|| ViewEvent::Received { msg: msg.clone() });
                self.verdict = Some(*accept);
                self.stage = Stage::Closed;
                None
            }
            ProtocolMessage::OutcomeReport { .. } | ProtocolMessage::ResultClaim { .. } => {
                return Err(ProtocolError::Violation(format!(
                    "server received a server message: {}",
                    msg.kind()
                )));
            }
        };
        if let Some(r) = &reply {
            self.log(|| ViewEvent::Sent { msg: r.clone() });
        }
        Ok(reply)
    }
}
