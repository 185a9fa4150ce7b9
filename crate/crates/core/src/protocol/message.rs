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

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::angle::Angle;

/// Opaque reference to a qubit held by the server. Carries no preparation data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitHandle(pub u64);

impl fmt::Display for QubitHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Classical message exchanged between client and server.
///
/// On the wire each message is one JSON object with a `"type"` tag, e.g.
/// `{"type":"measure_instruction","handle_id":3,"delta":5}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolMessage {
    /// Client → server: a qubit has been sent under this handle.
    PrepareNotice { handle_id: QubitHandle },
    /// Client → server: apply CZ between two held qubits.
    Entangle {
        handle_a: QubitHandle,
        handle_b: QubitHandle,
    },
    /// Client → server: measure in the X-Y plane at `delta`.
    MeasureInstruction { handle_id: QubitHandle, delta: Angle },
    /// Server → client: outcome of the last instructed measurement.
    OutcomeReport { handle_id: QubitHandle, b: u8 },
    /// Client → server: measure these qubits in the computational basis.
    ReadoutRequest { handles: Vec<QubitHandle> },
    /// Server → client: bits of the requested readout, in request order.
    ResultClaim { bits: Vec<u8> },
    /// Client → server: whether the client accepted the session.
    Decision { accept: bool },
}

impl ProtocolMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            ProtocolMessage::PrepareNotice { .. } => "prepare_notice",
            ProtocolMessage::Entangle { .. } => "entangle",
            ProtocolMessage::MeasureInstruction { .. } => "measure_instruction",
            ProtocolMessage::OutcomeReport { .. } => "outcome_report",
            ProtocolMessage::ReadoutRequest { .. } => "readout_request",
            ProtocolMessage::ResultClaim { .. } => "result_claim",
            ProtocolMessage::Decision { .. } => "decision",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("messages serialize")
    }
}

/// One entry of the server's view.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum ViewEvent {
    Received {
        msg: ProtocolMessage,
    },
    Sent {
        msg: ProtocolMessage,
    },
    /// The server's own measurement result, before anything is reported.
    Measured {
        handle_id: QubitHandle,
        bit: u8,
    },
}

/// Append-only record of everything the server sees during one session.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SessionTranscript {
    events: Vec<ViewEvent>,
}

impl SessionTranscript {
    pub fn new() -> SessionTranscript {
        SessionTranscript {
            events: Vec::with_capacity(32),
        }
    }

    pub fn push(&mut self, event: ViewEvent) {
        self.events.push(event);
    }

    pub fn events(&self) -> &[ViewEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Messages only, in order, without the server's private outcomes.
    pub fn messages(&self) -> impl Iterator<Item = &ProtocolMessage> {
        self.events.iter().filter_map(|e| match e {
            ViewEvent::Received { msg } | ViewEvent::Sent { msg } => Some(msg),
            ViewEvent::Measured { .. } => None,
        })
    }

    /// One JSON object per line.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    pub fn from_ndjson(text: &str) -> Result<SessionTranscript, serde_json::Error> {
        let events = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<Result<_, _>>()?;
        Ok(SessionTranscript { events })
    }

    /// Compact byte encoding of the view, injective over transcripts; used as a
    /// key when tallying view distributions.
    pub fn view_key(&self) -> Vec<u8> {
        fn handle(out: &mut Vec<u8>, h: QubitHandle) {
            match u8::try_from(h.0) {
                Ok(b) if b < u8::MAX => out.push(b),
                _ => {
                    out.push(u8::MAX);
                    out.extend_from_slice(&h.0.to_le_bytes());
                }
            }
        }
        fn len(out: &mut Vec<u8>, n: usize) {
            out.extend_from_slice(&(n as u32).to_le_bytes());
        }
        let mut out = Vec::with_capacity(self.events.len() * 3);
        for e in &self.events {
            match e {
                ViewEvent::Received { msg } | ViewEvent::Sent { msg } => match msg {
                    ProtocolMessage::PrepareNotice { handle_id } => {
                        out.push(0);
                        handle(&mut out, *handle_id);
                    }
                    ProtocolMessage::Entangle { handle_a, handle_b } => {
                        out.push(1);
                        handle(&mut out, *handle_a);
                        handle(&mut out, *handle_b);
                    }
                    ProtocolMessage::MeasureInstruction { handle_id, delta } => {
                        out.push(2);
                        handle(&mut out, *handle_id);
                        out.push(delta.eighths());
                    }
                    ProtocolMessage::OutcomeReport { handle_id, b } => {
                        out.push(3);
                        handle(&mut out, *handle_id);
                        out.push(*b);
                    }
                    ProtocolMessage::ReadoutRequest { handles } => {
                        out.push(4);
                        len(&mut out, handles.len());
                        handles.iter().for_each(|&h| handle(&mut out, h));
                    }
                    ProtocolMessage::ResultClaim { bits } => {
                        out.push(5);
                        len(&mut out, bits.len());
                        out.extend_from_slice(bits);
                    }
                    ProtocolMessage::Decision { accept } => {
                        out.push(6);
                        out.push(u8::from(*accept));
                    }
                },
                ViewEvent::Measured { handle_id, bit } => {
                    out.push(7);
                    handle(&mut out, *handle_id);
                    out.push(*bit);
                }
            }
        }
        out
    }

    /// Hex SHA-256 of [`SessionTranscript::to_ndjson`].
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_ndjson().as_bytes()))
    }
}
