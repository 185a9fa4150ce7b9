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

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::mbqc::{OpenGraph, Vertex};
use crate::protocol::ClientSecrets;

use super::TrapError;

/// Secret placement of traps and their isolating dummies.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapLayout {
    pub traps: BTreeSet<Vertex>,
    /// Every graph neighbor of every trap.
    pub dummies: BTreeSet<Vertex>,
    /// Preparation angle of each trap.
    pub trap_theta: BTreeMap<Vertex, Angle>,
    /// Computational-basis value each dummy is prepared in.
    pub dummy_z: BTreeMap<Vertex, u8>,
    /// Instructed angle for each dummy; dummies carry no computation, so this
    /// is drawn uniformly.
    pub dummy_delta: BTreeMap<Vertex, Angle>,
}

impl TrapLayout {
    pub fn is_empty(&self) -> bool {
        self.traps.is_empty() && self.dummies.is_empty()
    }

    pub fn is_trap(&self, v: Vertex) -> bool {
        self.traps.contains(&v)
    }

    pub fn is_dummy(&self, v: Vertex) -> bool {
        self.dummies.contains(&v)
    }

    /// Checks trap isolation against `graph`.
    pub fn validate(&self, graph: &OpenGraph) -> Result<(), TrapError> {
        if let Some(v) = self.traps.intersection(&self.dummies).next() {
            return Err(TrapError::Layout(format!("vertex {v} is both trap and dummy")));
        }
        for &t in &self.traps {
            if !graph.contains(t) {
                return Err(TrapError::Layout(format!("trap {t} is not in the graph")));
            }
            if !self.trap_theta.contains_key(&t) {
                return Err(TrapError::Layout(format!("trap {t} has no angle")));
            }
            if let Some(n) = graph.neighbors(t).find(|n| !self.dummies.contains(n)) {
                return Err(TrapError::Layout(format!("neighbor {n} of trap {t} is not a dummy")));
            }
        }
        for &d in &self.dummies {
            if !graph.contains(d) {
                return Err(TrapError::Layout(format!("dummy {d} is not in the graph")));
            }
            if !matches!(self.dummy_z.get(&d), Some(0 | 1)) {
                return Err(TrapError::Layout(format!("dummy {d} has no valid z value")));
            }
            if !self.dummy_delta.contains_key(&d) {
                return Err(TrapError::Layout(format!("dummy {d} has no instructed angle")));
            }
        }
        Ok(())
    }

    /// XOR of the dummy values among the neighbors of `v`: every CZ with a
    /// dummy in `|1⟩` applies Z to `v`.
    pub fn dummy_parity(&self, graph: &OpenGraph, v: Vertex) -> u8 {
        graph
            .neighbors(v)
            .filter_map(|n| self.dummy_z.get(&n))
            .fold(0, |acc, z| acc ^ z)
    }
}

/// Outcome of the trap check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub accept: bool,
    pub failed_traps: BTreeSet<Vertex>,
}

impl Decision {
    pub fn from_failures(failed_traps: BTreeSet<Vertex>) -> Decision {
        Decision {
            accept: failed_traps.is_empty(),
            failed_traps,
        }
    }
}

/// Outcome an honest server reports for `trap`: `r_t ⊕ (⊕ z_d)` over its
/// dummy neighbors.
pub fn expected_trap_bit(trap: Vertex, graph: &OpenGraph, secrets: &ClientSecrets) -> Result<u8, TrapError> {
    let layout = &secrets.layout;
    if !layout.is_trap(trap) {
        return Err(TrapError::NotATrap(trap));
    }
    let r = secrets.r.get(&trap).copied().unwrap_or(0);
    Ok(r ^ layout.dummy_parity(graph, trap))
}

/// Accepts iff every trap reported its expected bit. A missing report counts
/// as a failed trap.
pub fn verify(reported: &BTreeMap<Vertex, u8>, graph: &OpenGraph, secrets: &ClientSecrets) -> Decision {
    let failed = secrets
        .layout
        .traps
        .iter()
        .copied()
        .filter(|&t| {
            let expected = expected_trap_bit(t, graph, secrets).ok();
            reported.get(&t).copied() != expected
        })
        .collect();
    Decision::from_failures(failed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::ClientSecrets;

    fn secrets_with(traps: &[(Vertex, u8)], dummies: &[(Vertex, u8)]) -> ClientSecrets {
        let layout = TrapLayout {
            traps: traps.iter().map(|t| t.0).collect(),
            dummies: dummies.iter().map(|d| d.0).collect(),
            trap_theta: traps.iter().map(|t| (t.0, Angle::ZERO)).collect(),
            dummy_z: dummies.iter().copied().collect(),
            dummy_delta: dummies.iter().map(|d| (d.0, Angle::ZERO)).collect(),
        };
        ClientSecrets {
            theta: BTreeMap::new(),
            r: traps.iter().copied().collect(),
            layout,
        }
    }

    #[test]
    fn expected_bits() {
        let isolated = OpenGraph::new(vec![0], vec![], vec![], vec![]).unwrap();
        let s = secrets_with(&[(0, 0)], &[]);
        assert_eq!(expected_trap_bit(0, &isolated, &s).unwrap(), 0);

        let pair = OpenGraph::line(2).unwrap();
        let s = secrets_with(&[(0, 0)], &[(1, 1)]);
        assert_eq!(expected_trap_bit(0, &pair, &s).unwrap(), 1);

        let three = OpenGraph::line(3).unwrap();
        let s = secrets_with(&[(1, 1)], &[(0, 1), (2, 1)]);
        assert_eq!(expected_trap_bit(1, &three, &s).unwrap(), 1);
        assert_eq!(expected_trap_bit(0, &three, &s), Err(TrapError::NotATrap(0)));
    }

    #[test]
    fn verify_flags_wrong_and_missing_traps() {
        let three = OpenGraph::line(3).unwrap();
        let s = secrets_with(&[(1, 0)], &[(0, 1), (2, 0)]);
        let ok = verify(&BTreeMap::from([(1, 1)]), &three, &s);
        assert!(ok.accept && ok.failed_traps.is_empty());
        let bad = verify(&BTreeMap::from([(1, 0)]), &three, &s);
        assert!(!bad.accept);
        assert_eq!(bad.failed_traps, BTreeSet::from([1]));
        let missing = verify(&BTreeMap::new(), &three, &s);
        assert!(!missing.accept);
    }

    #[test]
    fn isolation_is_validated() {
        let three = OpenGraph::line(3).unwrap();
        let s = secrets_with(&[(1, 0)], &[(0, 1)]);
        assert!(s.layout.validate(&three).is_err());
        let s = secrets_with(&[(1, 0)], &[(0, 1), (2, 0)]);
        assert!(s.layout.validate(&three).is_ok());
    }
}
