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

//! Sessions over TCP.
//!
//! Each session uses one connection carrying newline-delimited JSON. Classical
//! traffic is exactly the [`ProtocolMessage`] stream. Three framing records
//! surround it:
//!
//! * `{"type":"hello","master":M,"session":S}` opens the session and fixes the
//!   server-side random streams;
//! * `{"type":"qubit","handle_id":H,"prep":...}` stands in for a photon on the
//!   quantum channel and is absorbed by the server host's [`Registry`], never
//!   by the server logic;
//! * `{"type":"bye","transcript":"..."}` closes the session and returns the
//!   server's view as NDJSON.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};

use serde::{Deserialize, Serialize};

use super::{
    ChannelError, ProtocolError, ProtocolMessage, QuantumChannel, QubitHandle, Registry, Server, SessionSeeds,
    SessionTranscript, StreamRole, Transport,
};
use crate::adversary::ServerBehavior;
use crate::angle::Angle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Preparation {
    Plus(Angle),
    Z(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum Frame {
    Hello { master: u64, session: u64 },
    Qubit { handle_id: QubitHandle, prep: Preparation },
    Bye { transcript: String },
}

fn io_err(e: impl std::fmt::Display) -> ProtocolError {
    ProtocolError::Transport(e.to_string())
}

fn read_line(reader: &mut impl BufRead) -> Result<String, ProtocolError> {
    let mut line = String::new();
    if reader.read_line(&mut line).map_err(io_err)? == 0 {
        return Err(ProtocolError::Transport("connection closed".into()));
    }
    Ok(line)
}

fn is_frame(line: &str) -> bool {
    ["\"hello\"", "\"qubit\"", "\"bye\""]
        .iter()
        .any(|t| line.contains(&format!("\"type\":{t}")))
}

fn parse_frame(line: &str) -> Result<Frame, ProtocolError> {
    serde_json::from_str(line).map_err(|e| ProtocolError::Violation(format!("bad frame: {e}")))
}

fn parse_message(line: &str) -> Result<ProtocolMessage, ProtocolError> {
    serde_json::from_str(line).map_err(|e| ProtocolError::Violation(format!("bad message: {e}")))
}

/// Client end of a TCP session.
pub struct TcpTransport {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
    next_handle: u64,
}

impl TcpTransport {
    pub fn connect(addr: impl ToSocketAddrs, seeds: SessionSeeds) -> Result<TcpTransport, ProtocolError> {
        let stream = TcpStream::connect(addr).map_err(io_err)?;
        stream.set_nodelay(true).map_err(io_err)?;
        let mut t = TcpTransport {
            reader: BufReader::new(stream.try_clone().map_err(io_err)?),
            writer: BufWriter::new(stream),
            next_handle: 0,
        };
        t.write(
            &serde_json::to_string(&Frame::Hello {
                master: seeds.master,
                session: seeds.session,
            })
            .map_err(io_err)?,
        )?;
        Ok(t)
    }

    fn write(&mut self, line: &str) -> Result<(), ProtocolError> {
        self.writer.write_all(line.as_bytes()).map_err(io_err)?;
        self.writer.write_all(b"\n").map_err(io_err)
    }

    fn send_qubit(&mut self, prep: Preparation) -> Result<QubitHandle, ChannelError> {
        let handle_id = QubitHandle(self.next_handle);
        let line = serde_json::to_string(&Frame::Qubit { handle_id, prep }).expect("frames serialize");
        self.write(&line).map_err(|e| ChannelError::Link(e.to_string()))?;
        self.next_handle += 1;
        Ok(handle_id)
    }
}

impl QuantumChannel for TcpTransport {
    fn prepare_plus(&mut self, theta: Angle) -> Result<QubitHandle, ChannelError> {
        self.send_qubit(Preparation::Plus(theta))
    }

    fn prepare_z(&mut self, z: u8) -> Result<QubitHandle, ChannelError> {
        if z > 1 {
            return Err(crate::qsim::QsimError::InvalidBit(z).into());
        }
        self.send_qubit(Preparation::Z(z))
    }
}

impl Transport for TcpTransport {
    fn channel(&mut self) -> &mut dyn QuantumChannel {
        self
    }

    fn deliver(&mut self, msg: &ProtocolMessage) -> Result<Option<ProtocolMessage>, ProtocolError> {
        self.write(&msg.to_json())?;
        if !matches!(
            msg,
            ProtocolMessage::MeasureInstruction { .. } | ProtocolMessage::ReadoutRequest { .. }
        ) {
            return Ok(None);
        }
        self.writer.flush().map_err(io_err)?;
        let line = read_line(&mut self.reader)?;
        parse_message(&line).map(Some)
    }

    fn finish(&mut self) -> Result<SessionTranscript, ProtocolError> {
        self.writer.flush().map_err(io_err)?;
        match parse_frame(&read_line(&mut self.reader)?)? {
            Frame::Bye { transcript } => SessionTranscript::from_ndjson(&transcript)
                .map_err(|e| ProtocolError::Violation(format!("bad transcript: {e}"))),
            other => Err(ProtocolError::Violation(format!("expected bye, got {other:?}"))),
        }
    }
}

/// Runs the server side of one session on `stream`.
pub fn serve_session(stream: TcpStream, behavior: &ServerBehavior) -> Result<SessionTranscript, ProtocolError> {
    stream.set_nodelay(true).map_err(io_err)?;
    let mut reader = BufReader::new(stream.try_clone().map_err(io_err)?);
    let mut writer = BufWriter::new(stream);
    let seeds = match parse_frame(&read_line(&mut reader)?)? {
        Frame::Hello { master, session } => SessionSeeds::new(master, session),
        other => return Err(ProtocolError::Violation(format!("expected hello, got {other:?}"))),
    };
    let mut registry = Registry::from_rng(seeds.rng(StreamRole::Device));
    let mut server = Server::new(behavior, seeds.rng(StreamRole::Server));
    while !server.is_closed() {
        let line = read_line(&mut reader)?;
        if is_frame(&line) {
            match parse_frame(&line)? {
                Frame::Qubit { handle_id, prep } => {
                    let h = match prep {
                        Preparation::Plus(theta) => registry.prepare_plus(theta)?,
                        Preparation::Z(z) => registry.prepare_z(z)?,
                    };
                    if h != handle_id {
                        return Err(ProtocolError::Violation(format!(
                            "qubit arrived as {h} but was sent as {handle_id}"
                        )));
                    }
                }
                other => return Err(ProtocolError::Violation(format!("unexpected frame {other:?}"))),
            }
            continue;
        }
        if let Some(reply) = server.receive(parse_message(&line)?, &mut registry)? {
            writer.write_all(reply.to_json().as_bytes()).map_err(io_err)?;
            writer.write_all(b"\n").map_err(io_err)?;
            writer.flush().map_err(io_err)?;
        }
    }
    registry.close();
    let transcript = server.into_transcript();
    let bye = Frame::Bye {
        transcript: transcript.to_ndjson(),
    };
    writer
        .write_all(serde_json::to_string(&bye).map_err(io_err)?.as_bytes())
        .map_err(io_err)?;
    writer.write_all(b"\n").map_err(io_err)?;
    writer.flush().map_err(io_err)?;
    Ok(transcript)
}

/// Accepts connections on `listener` and serves one session per connection,
/// stopping after `max_sessions` if given. Calls `on_session` with each
/// session's outcome.
pub fn serve(
    listener: &TcpListener,
    behavior: &ServerBehavior,
    max_sessions: Option<usize>,
    on_session: &mut dyn FnMut(Result<SessionTranscript, ProtocolError>),
) -> Result<(), ProtocolError> {
    for (served, stream) in (1..).zip(listener.incoming()) {
        let stream = stream.map_err(io_err)?;
        on_session(serve_session(stream, behavior));
        if max_sessions.is_some_and(|m| served >= m) {
            break;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_are_told_apart_from_messages() {
        let q = serde_json::to_string(&Frame::Qubit {
            handle_id: QubitHandle(2),
            prep: Preparation::Plus(Angle::PI_4),
        })
        .unwrap();
        assert_eq!(q, r#"{"type":"qubit","handle_id":2,"prep":{"plus":1}}"#);
        assert!(is_frame(&q));
        assert!(!is_frame(&ProtocolMessage::Decision { accept: true }.to_json()));
        assert!(parse_frame(r#"{"type":"qubit","handle_id":2}"#).is_err());
    }
}
