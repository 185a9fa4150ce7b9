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

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::job::SessionKeys;
use super::{
    Client, ClientSecrets, DelegatedJob, ProtocolError, ProtocolMessage, QuantumChannel, Registry, Server,
    SessionTranscript,
};
use crate::adversary::ServerBehavior;
use crate::mbqc::PatternResult;
use crate::trap::Decision;

/// Independent random streams of one session.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamRole {
    Client = 0,
    Server = 1,
    /// Outcomes of the simulated measurement device.
    Device = 2,
}

/// Seeds for session number `session` of an experiment seeded with `master`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SessionSeeds {
    pub master: u64,
    pub session: u64,
}

impl SessionSeeds {
    pub fn new(master: u64, session: u64) -> SessionSeeds {
        SessionSeeds { master, session }
    }

    pub fn rng(&self, role: StreamRole) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream((self.session << 2) | role as u64);
        rng
    }
}

/// The client's view of the other end of a session.
pub trait Transport {
    fn channel(&mut self) -> &mut dyn QuantumChannel;
    /// Sends `msg` and returns the server's reply when the message calls for one.
    fn deliver(&mut self, msg: &ProtocolMessage) -> Result<Option<ProtocolMessage>, ProtocolError>;
    /// Ends the session and returns the server's view of it.
    fn finish(&mut self) -> Result<SessionTranscript, ProtocolError>;
}

/// Client and server in one process, sharing a registry.
#[derive(Clone, Debug)]
pub struct InProcess<'b> {
    pub(crate) registry: Registry,
    pub(crate) server: Server<'b>,
}

impl<'b> InProcess<'b> {
    pub fn new(behavior: &'b ServerBehavior, seeds: SessionSeeds) -> InProcess<'b> {
        InProcess {
            registry: Registry::from_rng(seeds.rng(StreamRole::Device)),
            server: Server::new(behavior, seeds.rng(StreamRole::Server)),
        }
    }
}

impl Transport for InProcess<'_> {
    fn channel(&mut self) -> &mut dyn QuantumChannel {
        &mut self.registry
    }

    fn deliver(&mut self, msg: &ProtocolMessage) -> Result<Option<ProtocolMessage>, ProtocolError> {
        self.server.receive(msg.clone(), &mut self.registry)
    }

    fn finish(&mut self) -> Result<SessionTranscript, ProtocolError> {
        self.registry.close();
        Ok(self.server.transcript().clone())
    }
}

pub type SessionOutput = (PatternResult, SessionTranscript, Decision);

/// Runs one full session of `job` over `transport`. Any protocol violation
/// aborts the session with an error.
pub fn run_delegated(
    job: &DelegatedJob,
    secrets: &ClientSecrets,
    transport: &mut dyn Transport,
) -> Result<SessionOutput, ProtocolError> {
    let keys = SessionKeys::new(job, secrets)?;
    let mut client = Client::new(job, keys);
    while let Some(msg) = client.poll_send(transport.channel())? {
        match transport.deliver(&msg)? {
            Some(reply) => client.receive(reply)?,
            None if client.is_waiting() => return Err(ProtocolError::Violation(format!("no reply to {}", msg.kind()))),
            None => {}
        }
    }
    let transcript = transport.finish()?;
    Ok((client.pattern_result(), transcript, client.decision()))
}

/// [`run_delegated`] over an in-process link with streams from `seeds`.
pub fn run_in_process(
    job: &DelegatedJob,
    secrets: &ClientSecrets,
    behavior: &ServerBehavior,
    seeds: SessionSeeds,
) -> Result<SessionOutput, ProtocolError> {
    run_delegated(job, secrets, &mut InProcess::new(behavior, seeds))
}
