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

use std::collections::BTreeMap;

use rand::Rng;

use super::{DelegatedJob, ProtocolError};
use crate::angle::Angle;
use crate::mbqc::Vertex;
use crate::trap::TrapLayout;

/// Everything the client keeps from the server.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClientSecrets {
    /// Preparation angle of every vertex that is neither trap nor dummy.
    pub theta: BTreeMap<Vertex, Angle>,
    /// Outcome mask of every X-Y measured vertex that is not a dummy.
    pub r: BTreeMap<Vertex, u8>,
    pub layout: TrapLayout,
}

impl ClientSecrets {
    /// Draws fresh `θ` and `r` uniformly for `job`, keeping the given layout.
    pub fn sample<R: Rng + ?Sized>(job: &DelegatedJob, layout: TrapLayout, rng: &mut R) -> ClientSecrets {
        let mut theta = BTreeMap::new();
        let mut r = BTreeMap::new();
        for &v in job.public_graph().vertices() {
            if !layout.is_trap(v) && !layout.is_dummy(v) {
                theta.insert(v, Angle::random(rng));
            }
        }
        for &v in job.schedule() {
            if !layout.is_dummy(v) {
                r.insert(v, rng.gen_range(0..2u8));
            }
        }
        ClientSecrets { theta, r, layout }
    }

    /// Preparation angle of a non-dummy vertex.
    pub fn theta_of(&self, v: Vertex) -> Option<Angle> {
        self.layout.trap_theta.get(&v).or_else(|| self.theta.get(&v)).copied()
    }

    /// Instructed angle for vertex `j` given its corrected computational angle.
    pub fn delta(&self, j: Vertex, phi_corrected: Angle) -> Result<Angle, ProtocolError> {
        let theta = self
            .theta_of(j)
            .ok_or_else(|| ProtocolError::Secrets(format!("no preparation angle for vertex {j}")))?;
        let r = self.r.get(&j).copied().unwrap_or(0);
        Ok(client_delta(phi_corrected, theta, r))
    }
}

/// `δ = φ' + θ + r·π`.
pub fn client_delta(phi_corrected: Angle, theta: Angle, r: u8) -> Angle {
    (phi_corrected + theta).plus_pi_if(r)
}

/// Removes the outcome mask: `s = b ⊕ r`.
pub fn client_interpret(b: u8, r: u8) -> u8 {
    (b ^ r) & 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_examples() {
        assert_eq!(client_delta(Angle::ZERO, Angle::ZERO, 0), Angle::ZERO);
        assert_eq!(client_delta(Angle::PI_4, Angle::PI_2, 1), Angle::from_eighths(7));
    }

    #[test]
    fn delta_is_a_one_time_pad() {
        for phi in Angle::ALL {
            let mut counts = [0u32; 8];
            for theta in Angle::ALL {
                for r in 0..2 {
                    counts[usize::from(client_delta(phi, theta, r).eighths())] += 1;
                }
            }
            assert_eq!(counts, [2; 8], "phi={phi}");
        }
    }

    #[test]
    fn interpret_examples() {
        assert_eq!(client_interpret(0, 0), 0);
        assert_eq!(client_interpret(1, 1), 0);
        assert_eq!(client_interpret(1, 0), 1);
        assert_eq!(client_interpret(0, 1), 1);
    }
}
