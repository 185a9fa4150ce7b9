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

//! Server behaviors, honest and otherwise.
//!
//! Everything here runs on the server's side of the secrecy boundary: a
//! behavior sees protocol messages, opaque [`QubitHandle`]s and the
//! [`HandleOps`] interface, and nothing else.
//!
//! ```compile_fail
//! use blindqc::protocol::{HandleOps, QubitHandle};
//! fn peek(ops: &dyn HandleOps, h: QubitHandle) {
//!     // Handle-level access offers no way to read a preparation angle.
//!     let _ = ops.theta(h);
//! }
//! ```

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::Angle;
use crate::protocol::{ChannelError, HandleOps, ProtocolError, ProtocolMessage, QubitHandle, Server};
use crate::qsim::Unitary2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("matrix is not unitary")]
    NotUnitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn unitary(self) -> Unitary2 {
        match self {
            Pauli::X => Unitary2::X,
            Pauli::Y => Unitary2::Y,
            Pauli::Z => Unitary2::Z,
        }
    }
}

/// Which qubit an attack hits, by arrival position (the order of
/// `prepare_notice` messages). Serialized as the position or as `"random"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttackTarget {
    Position(usize),
    /// Drawn uniformly per session from the server's own randomness.
    Random,
}

impl Serialize for AttackTarget {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            AttackTarget::Position(p) => s.serialize_u64(*p as u64),
            AttackTarget::Random => s.serialize_str("random"),
        }
    }
}

impl<'de> Deserialize<'de> for AttackTarget {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "random" => Ok(AttackTarget::Random),
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(|p| AttackTarget::Position(p as usize))
                .ok_or_else(|| serde::de::Error::custom("target position must be a non-negative integer")),
            other => Err(serde::de::Error::custom(format!("invalid target {other}"))),
        }
    }
}

/// A 2×2 complex matrix as rows of `[re, im]` pairs.
pub type MatrixSpec = [[[f64; 2]; 2]; 2];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ServerBehavior {
    #[default]
    Honest,
    /// Applies a Pauli to one qubit just before it is measured.
    PauliAt {
        pauli: Pauli,
        target: AttackTarget,
    },
    /// Before each measurement, with probability `p`, applies a uniformly chosen Pauli.
    RandomPauliEach {
        p: f64,
    },
    /// Measures every X-Y instruction at `δ + offset`.
    AngleOffset {
        offset: Angle,
    },
    /// Flips each reported bit with probability `flip_prob`.
    LieOutcome {
        flip_prob: f64,
    },
    ArbitraryUnitaryAt {
        u: MatrixSpec,
        target: AttackTarget,
    },
    /// Applies every part, in order.
    Composite {
        parts: Vec<ServerBehavior>,
    },
}

fn matrix_of(spec: &MatrixSpec) -> Result<Unitary2, crate::qsim::QsimError> {
    let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
    Unitary2::new([[c(spec[0][0]), c(spec[0][1])], [c(spec[1][0]), c(spec[1][1])]])
}

fn unitary_from(spec: &MatrixSpec) -> Result<Unitary2, AdversaryError> {
    matrix_of(spec).map_err(|_| AdversaryError::NotUnitary)
}

fn check_probability(p: f64) -> Result<(), AdversaryError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(AdversaryError::Probability(p))
    }
}

impl ServerBehavior {
    pub fn validate(&self) -> Result<(), AdversaryError> {
        match self {
            ServerBehavior::RandomPauliEach { p } => check_probability(*p),
            ServerBehavior::LieOutcome { flip_prob } => check_probability(*flip_prob),
            ServerBehavior::ArbitraryUnitaryAt { u, .. } => unitary_from(u).map(|_| ()),
            ServerBehavior::Composite { parts } => parts.iter().try_for_each(|p| p.validate()),
            _ => Ok(()),
        }
    }

    pub fn is_honest(&self) -> bool {
        match self {
            ServerBehavior::Honest => true,
            ServerBehavior::AngleOffset { offset } => *offset == Angle::ZERO,
            ServerBehavior::Composite { parts } => parts.iter().all(|p| p.is_honest()),
            _ => false,
        }
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        serde_json::to_string(self).expect("behaviors serialize")
    }

    fn leaves<'a>(&'a self, out: &mut Vec<&'a ServerBehavior>) {
        match self {
            ServerBehavior::Composite { parts } => parts.iter().for_each(|p| p.leaves(out)),
            leaf => out.push(leaf),
        }
    }

    /// Total angle offset over all parts.
    pub(crate) fn angle_offset(&self) -> Angle {
        match self {
            ServerBehavior::AngleOffset { offset } => *offset,
            ServerBehavior::Composite { parts } => parts.iter().fold(Angle::ZERO, |acc, p| acc + p.angle_offset()),
            _ => Angle::ZERO,
        }
    }
}

/// A behavior with its targets fixed for one session.
#[derive(Clone, Debug)]
pub(crate) struct Deviation<'b> {
    leaves: Vec<&'b ServerBehavior>,
    targets: Vec<Option<usize>>,
    offset: Angle,
}

impl<'b> Deviation<'b> {
    pub fn new(behavior: &'b ServerBehavior) -> Deviation<'b> {
        let mut leaves = Vec::new();
        behavior.leaves(&mut leaves);
        leaves.retain(|l| !matches!(l, ServerBehavior::Honest | ServerBehavior::AngleOffset { .. }));
        Deviation {
            targets: Vec::new(),
            offset: behavior.angle_offset(),
            leaves,
        }
    }

    pub fn is_passive(&self) -> bool {
        self.leaves.is_empty()
    }

    /// Fixes the attack positions once the number of qubits is known.
    pub fn resolve(&mut self, n_qubits: usize, rng: &mut ChaCha8Rng) {
        self.targets = self
            .leaves
            .iter()
            .map(|leaf| match leaf {
                ServerBehavior::PauliAt { target, .. } | ServerBehavior::ArbitraryUnitaryAt { target, .. } => {
                    match target {
                        AttackTarget::Position(p) => Some(*p),
                        AttackTarget::Random if n_qubits > 0 => Some(rng.gen_range(0..n_qubits)),
                        AttackTarget::Random => None,
                    }
                }
                _ => None,
            })
            .collect();
    }

    pub fn offset(&self) -> Angle {
        self.offset
    }

    /// Acts on the qubit at arrival `position` right before it is measured.
    pub fn before_measure(
        &self,
        ops: &mut dyn HandleOps,
        h: QubitHandle,
        position: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(), ChannelError> {
        for (leaf, target) in self.leaves.iter().zip(&self.targets) {
            match leaf {
                ServerBehavior::PauliAt { pauli, .. } if *target == Some(position) => {
                    ops.apply_single(h, &pauli.unitary())?;
                }
                ServerBehavior::ArbitraryUnitaryAt { u, .. } if *target == Some(position) => {
                    ops.apply_single(h, &matrix_of(u)?)?;
                }
                ServerBehavior::RandomPauliEach { p } if rng.gen::<f64>() < *p => {
                    let pauli = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
                    ops.apply_single(h, &pauli.unitary())?;
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The bit actually reported for a measured `bit`.
    pub fn report(&self, bit: u8, rng: &mut ChaCha8Rng) -> u8 {
        self.leaves.iter().fold(bit, |b, leaf| match leaf {
            ServerBehavior::LieOutcome { flip_prob } => b ^ u8::from(rng.gen::<f64>() < *flip_prob),
            _ => b,
        })
    }
}

/// Feeds `incoming` to a fresh server running `behavior` and collects its replies.
pub fn execute_server(
    behavior: &ServerBehavior,
    incoming: &[ProtocolMessage],
    ops: &mut dyn HandleOps,
    rng: ChaCha8Rng,
) -> Result<Vec<ProtocolMessage>, ProtocolError> {
    let mut server = Server::new(behavior, rng);
    let mut out = Vec::new();
    for msg in incoming {
        if let Some(reply) = server.receive(msg.clone(), ops)? {
            out.push(reply);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema() {
        let b: ServerBehavior = serde_json::from_str(r#"{"kind":"pauli_at","pauli":"Z","target":"random"}"#).unwrap();
        assert_eq!(
            b,
            ServerBehavior::PauliAt {
                pauli: Pauli::Z,
                target: AttackTarget::Random
            }
        );
        let b: ServerBehavior = serde_json::from_str(r#"{"kind":"pauli_at","pauli":"X","target":2}"#).unwrap();
        assert_eq!(b.label(), r#"{"kind":"pauli_at","pauli":"X","target":2}"#);
        assert!(serde_json::from_str::<ServerBehavior>(r#"{"kind":"pauli_at","pauli":"X","target":"all"}"#).is_err());
        let h: ServerBehavior = serde_json::from_str(r#"{"kind":"honest"}"#).unwrap();
        assert!(h.is_honest());
    }

    #[test]
    fn validation() {
        assert!(ServerBehavior::LieOutcome { flip_prob: 1.5 }.validate().is_err());
        let not_unitary = ServerBehavior::ArbitraryUnitaryAt {
            u: [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
            target: AttackTarget::Position(0),
        };
        assert_eq!(not_unitary.validate(), Err(AdversaryError::NotUnitary));
        let composite = ServerBehavior::Composite {
            parts: vec![
                ServerBehavior::AngleOffset { offset: Angle::PI },
                ServerBehavior::RandomPauliEach { p: 0.1 },
            ],
        };
        assert!(composite.validate().is_ok());
        assert_eq!(composite.angle_offset(), Angle::PI);
    }

    #[test]
    fn zero_offset_is_honest() {
        assert!(ServerBehavior::AngleOffset { offset: Angle::ZERO }.is_honest());
        assert!(!ServerBehavior::AngleOffset { offset: Angle::PI_4 }.is_honest());
    }
}
