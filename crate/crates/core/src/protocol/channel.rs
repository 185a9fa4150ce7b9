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

//! The simulated quantum link between client and server.
//!
//! [`Registry`] holds the joint state of every qubit the client has sent. The
//! client reaches it only through [`QuantumChannel`] (preparation), the server
//! only through [`HandleOps`] (gates and measurements on opaque handles).
//! Neither trait exposes amplitudes or preparation parameters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::QubitHandle;
use crate::angle::Angle;
use crate::qsim::{Basis, QsimError, QubitId, StateVector, Unitary2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("the quantum channel is closed")]
    Closed,
    #[error("unknown qubit handle {0}")]
    UnknownHandle(QubitHandle),
    #[error("qubit {0} was already measured")]
    AlreadyMeasured(QubitHandle),
    /// Raised in scripted mode when a measurement has no forced outcome left.
    #[error("measurement outcome not scripted")]
    NeedsBranch,
    /// Raised in scripted mode when the forced outcome is impossible.
    #[error("scripted outcome has zero probability")]
    ImpossibleBranch,
    #[error("link failure: {0}")]
    Link(String),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// Client side of the link: sends freshly prepared qubits.
pub trait QuantumChannel {
    /// Sends `|+_θ⟩`.
    fn prepare_plus(&mut self, theta: Angle) -> Result<QubitHandle, ChannelError>;
    /// Sends `|z⟩`.
    fn prepare_z(&mut self, z: u8) -> Result<QubitHandle, ChannelError>;
}

/// Server side of the link: everything a server may do to the qubits it holds.
pub trait HandleOps {
    fn entangle(&mut self, a: QubitHandle, b: QubitHandle) -> Result<(), ChannelError>;
    fn apply_single(&mut self, h: QubitHandle, u: &Unitary2) -> Result<(), ChannelError>;
    fn measure_xy(&mut self, h: QubitHandle, delta: Angle) -> Result<u8, ChannelError>;
    fn measure_z(&mut self, h: QubitHandle) -> Result<u8, ChannelError>;
}

/// Names of the [`HandleOps`] methods, i.e. every quantum operation a server can reach.
pub const SERVER_OPERATIONS: [&str; 4] = ["entangle", "apply_single", "measure_xy", "measure_z"];

#[derive(Clone, Debug)]
enum Outcomes {
    Sampled(Box<ChaCha8Rng>),
    /// Forced outcomes as a little-endian bit queue; `weight` accumulates their
    /// Born probabilities.
    Scripted {
        bits: u64,
        len: u8,
        pos: u8,
        weight: f64,
    },
}

/// Joint state of the qubits in flight for one session.
#[derive(Clone, Debug)]
pub struct Registry {
    state: StateVector,
    /// Handles issued so far; a handle is live while its qubit is in `state`.
    issued: u64,
    outcomes: Outcomes,
    open: bool,
}

impl Registry {
    /// Registry whose measurements are sampled from a seeded stream.
    pub fn sampled(seed: u64) -> Registry {
        Registry::with_outcomes(Outcomes::Sampled(Box::new(ChaCha8Rng::seed_from_u64(seed))))
    }

    pub fn from_rng(rng: ChaCha8Rng) -> Registry {
        Registry::with_outcomes(Outcomes::Sampled(Box::new(rng)))
    }

    /// Registry whose measurements take their outcomes from a script; used to
    /// walk every measurement branch exactly.
    pub fn scripted() -> Registry {
        Registry::with_outcomes(Outcomes::Scripted {
            bits: 0,
            len: 0,
            pos: 0,
            weight: 1.0,
        })
    }

    fn with_outcomes(outcomes: Outcomes) -> Registry {
        Registry {
            state: StateVector::empty(),
            issued: 0,
            outcomes,
            open: true,
        }
    }

    /// Replaces the outcome script with the low `len` bits of `bits`, first
    /// outcome in bit 0, and resets its accumulated weight.
    pub(crate) fn set_script(&mut self, bits: u64, len: usize) {
        debug_assert!(len <= 64);
        self.outcomes = Outcomes::Scripted {
            bits,
            len: len as u8,
            pos: 0,
            weight: 1.0,
        };
    }

    /// Probability of the scripted outcomes consumed since the last [`Registry::set_script`].
    pub(crate) fn script_weight(&self) -> f64 {
        match self.outcomes {
            Outcomes::Scripted { weight, .. } => weight,
            Outcomes::Sampled(_) => 1.0,
        }
    }

    pub fn close(&mut self) {
        self.open = false;
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    /// Number of qubits still unmeasured.
    pub fn live_qubits(&self) -> usize {
        self.state.n_qubits()
    }

    fn admit(&mut self, single: StateVector) -> Result<QubitHandle, ChannelError> {
        if !self.open {
            return Err(ChannelError::Closed);
        }
        let handle = QubitHandle(self.issued);
        self.state.join(single.relabel(&[QubitId(handle.0 as u32)])?)?;
        self.issued += 1;
        Ok(handle)
    }

    fn live(&self, h: QubitHandle) -> Result<QubitId, ChannelError> {
        let q = QubitId(h.0 as u32);
        if h.0 >= self.issued {
            Err(ChannelError::UnknownHandle(h))
        } else if self.state.contains(q) {
            Ok(q)
        } else {
            Err(ChannelError::AlreadyMeasured(h))
        }
    }

    fn measure(&mut self, h: QubitHandle, basis: Basis) -> Result<u8, ChannelError> {
        let q = self.live(h)?;
        let bit = match &mut self.outcomes {
            Outcomes::Sampled(rng) => self.state.measure(q, basis, &mut **rng)?.bit,
            Outcomes::Scripted { bits, len, pos, weight } => {
                if *pos >= *len {
                    return Err(ChannelError::NeedsBranch);
                }
                let bit = ((*bits >> *pos) & 1) as u8;
                *pos += 1;
                match self.state.collapse(q, basis, bit) {
                    Ok(p) => *weight *= p,
                    Err(QsimError::ZeroProbability { .. }) => return Err(ChannelError::ImpossibleBranch),
                    Err(e) => return Err(e.into()),
                }
                bit
            }
        };
        Ok(bit)
    }
}

impl QuantumChannel for Registry {
    fn prepare_plus(&mut self, theta: Angle) -> Result<QubitHandle, ChannelError> {
        self.admit(StateVector::plus_state(theta))
    }

    fn prepare_z(&mut self, z: u8) -> Result<QubitHandle, ChannelError> {
        self.admit(StateVector::z_eigenstate(z)?)
    }
}

impl HandleOps for Registry {
    fn entangle(&mut self, a: QubitHandle, b: QubitHandle) -> Result<(), ChannelError> {
        let (qa, qb) = (self.live(a)?, self.live(b)?);
        Ok(self.state.apply_cz(qa, qb)?)
    }

    fn apply_single(&mut self, h: QubitHandle, u: &Unitary2) -> Result<(), ChannelError> {
        let q = self.live(h)?;
        Ok(self.state.apply_single(q, u)?)
    }

    fn measure_xy(&mut self, h: QubitHandle, delta: Angle) -> Result<u8, ChannelError> {
        self.measure(h, Basis::Xy(delta))
    }

    fn measure_z(&mut self, h: QubitHandle) -> Result<u8, ChannelError> {
        self.measure(h, Basis::Z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plus_state_reads_half_in_z() {
        let mut ones = 0;
        for seed in 0..4000 {
            let mut reg = Registry::sampled(seed);
            let h = reg.prepare_plus(Angle::ZERO).unwrap();
            ones += reg.measure_z(h).unwrap() as usize;
        }
        assert!((ones as f64 / 4000.0 - 0.5).abs() < 0.03);
    }

    #[test]
    fn measuring_at_theta_gives_zero() {
        for theta in Angle::ALL {
            let mut reg = Registry::sampled(u64::from(theta.eighths()));
            let h = reg.prepare_plus(theta).unwrap();
            assert_eq!(reg.measure_xy(h, theta).unwrap(), 0);
        }
    }

    #[test]
    fn handles_are_distinct_and_product_state() {
        let mut reg = Registry::sampled(0);
        let a = reg.prepare_plus(Angle::ZERO).unwrap();
        let b = reg.prepare_plus(Angle::PI).unwrap();
        assert_ne!(a, b);
        assert_eq!(reg.live_qubits(), 2);
        assert_eq!(reg.measure_xy(a, Angle::ZERO).unwrap(), 0);
        assert_eq!(reg.measure_xy(b, Angle::ZERO).unwrap(), 1);
    }

    #[test]
    fn error_paths() {
        let mut reg = Registry::sampled(0);
        let a = reg.prepare_z(1).unwrap();
        assert_eq!(reg.measure_z(a).unwrap(), 1);
        assert_eq!(reg.measure_z(a), Err(ChannelError::AlreadyMeasured(a)));
        assert_eq!(reg.entangle(a, QubitHandle(7)), Err(ChannelError::AlreadyMeasured(a)));
        assert_eq!(
            reg.measure_z(QubitHandle(7)),
            Err(ChannelError::UnknownHandle(QubitHandle(7)))
        );
        reg.close();
        assert_eq!(reg.prepare_plus(Angle::ZERO), Err(ChannelError::Closed));
    }

    #[test]
    fn scripted_outcomes_carry_weights() {
        let mut reg = Registry::scripted();
        let h = reg.prepare_plus(Angle::ZERO).unwrap();
        let k = reg.prepare_z(0).unwrap();
        assert_eq!(reg.measure_z(h), Err(ChannelError::NeedsBranch));
        reg.set_script(0b11, 2);
        assert_eq!(reg.measure_z(h).unwrap(), 1);
        assert!((reg.script_weight() - 0.5).abs() < 1e-15);
        assert_eq!(reg.measure_z(k), Err(ChannelError::ImpossibleBranch));
    }
}
