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

//! Dense state-vector engine.
//!
//! Qubits are addressed by [`QubitId`]. Inside a [`StateVector`] the qubit at
//! position `p` of the register is bit `p` of the basis index (little-endian),
//! so the first qubit joined into a register is the least significant bit.
//! Measuring a qubit removes it from the register.

use crate::inline::Inline;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::Angle;

/// Largest register a [`StateVector`] will hold.
pub const MAX_QUBITS: usize = 24;

/// Tolerance used for unitarity and normalization checks.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Projections with a smaller probability than this are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitId(pub u32);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("qubit {0:?} is not in the register (never allocated or already measured)")]
    QubitNotPresent(QubitId),
    #[error("two-qubit gate needs distinct qubits, got {0:?} twice")]
    SameQubit(QubitId),
    #[error("qubit {0:?} is already in the register")]
    DuplicateQubit(QubitId),
    #[error("register would hold {requested} qubits, cap is {cap}")]
    TooManyQubits { requested: usize, cap: usize },
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("outcome {bit} has zero probability")]
    ZeroProbability { bit: u8 },
    #[error("expected a bit, got {0}")]
    InvalidBit(u8),
    #[error("amplitude vector has length {len}, expected {expected}")]
    BadLength { len: usize, expected: usize },
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, QsimError>;

/// Single-qubit measurement basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Computational basis, outcome `b` projects onto `|b⟩`.
    Z,
    /// X-Y plane basis `{|+_δ⟩, |-_δ⟩}`, outcome `b` projects onto `|+_{δ+bπ}⟩`.
    Xy(Angle),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub qubit: QubitId,
    pub bit: u8,
}

/// A 2×2 unitary, validated on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary2([[Complex64; 2]; 2]);

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Unitary2 {
    pub const IDENTITY: Unitary2 = Unitary2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
    pub const X: Unitary2 = Unitary2([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
    pub const Y: Unitary2 = Unitary2([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]);
    pub const Z: Unitary2 = Unitary2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]);
    pub const H: Unitary2 = Unitary2([
        [
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ],
        [
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            c(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ],
    ]);

    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Unitary2> {
        let deviation = unitarity_deviation(&m);
        if deviation > NORM_TOLERANCE || !deviation.is_finite() {
            return Err(QsimError::NotUnitary { deviation });
        }
        Ok(Unitary2(m))
    }

    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: Angle) -> Unitary2 {
        Unitary2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), theta.phase()]])
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.0
    }
}

fn unitarity_deviation(m: &[[Complex64; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            // (U†U)_{ij}
            let v = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - c(target, 0.0)).norm());
        }
    }
    worst
}

/// Pure state of a small register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: Inline<QubitId, 8>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The zero-qubit state (scalar 1). Joining qubits into it builds a register.
    pub fn empty() -> StateVector {
        StateVector {
            qubits: Inline::new(),
            amps: vec![c(1.0, 0.0)],
        }
    }

    /// `(|0⟩ + e^{iθ}|1⟩)/√2` on qubit 0.
    pub fn plus_state(theta: Angle) -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector {
            qubits: Inline::from(&[QubitId(0)][..]),
            amps: vec![c(h, 0.0), theta.phase() * h],
        }
    }

    /// `|z⟩` on qubit 0.
    pub fn z_eigenstate(z: u8) -> Result<StateVector> {
        let amps = match z {
            0 => vec![c(1.0, 0.0), c(0.0, 0.0)],
            1 => vec![c(0.0, 0.0), c(1.0, 0.0)],
            other => return Err(QsimError::InvalidBit(other)),
        };
        Ok(StateVector {
            qubits: Inline::from(&[QubitId(0)][..]),
            amps,
        })
    }

    pub fn from_amplitudes(qubits: Vec<QubitId>, amps: Vec<Complex64>) -> Result<StateVector> {
        if qubits.len() > MAX_QUBITS {
            return Err(QsimError::TooManyQubits {
                requested: qubits.len(),
                cap: MAX_QUBITS,
            });
        }
        for (k, q) in qubits.iter().enumerate() {
            if qubits[..k].contains(q) {
                return Err(QsimError::DuplicateQubit(*q));
            }
        }
        let expected = 1usize << qubits.len();
        if amps.len() != expected {
            return Err(QsimError::BadLength {
                len: amps.len(),
                expected,
            });
        }
        let state = StateVector {
            qubits: qubits.into(),
            amps,
        };
        let n = state.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(QsimError::NotNormalized(n));
        }
        Ok(state)
    }

    /// Renames the qubits of this state, keeping their positions.
    pub fn relabel(mut self, ids: &[QubitId]) -> Result<StateVector> {
        if ids.len() != self.qubits.len() {
            return Err(QsimError::BadLength {
                len: ids.len(),
                expected: self.qubits.len(),
            });
        }
        self.qubits = ids.into();
        for (k, q) in self.qubits.iter().enumerate() {
            if self.qubits[..k].contains(q) {
                return Err(QsimError::DuplicateQubit(*q));
            }
        }
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[QubitId] {
        &self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn contains(&self, q: QubitId) -> bool {
        self.qubits.contains(&q)
    }

    fn position(&self, q: QubitId) -> Result<usize> {
        self.qubits
            .iter()
            .position(|&x| x == q)
            .ok_or(QsimError::QubitNotPresent(q))
    }

    /// Tensors `other` onto this register; its qubits take the new high positions.
    pub fn join(&mut self, other: StateVector) -> Result<()> {
        let requested = self.qubits.len() + other.qubits.len();
        if requested > MAX_QUBITS {
            return Err(QsimError::TooManyQubits {
                requested,
                cap: MAX_QUBITS,
            });
        }
        if let Some(q) = other.qubits.iter().find(|q| self.qubits.contains(q)) {
            return Err(QsimError::DuplicateQubit(*q));
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for hi in &other.amps {
            amps.extend(self.amps.iter().map(|lo| lo * hi));
        }
        self.amps = amps;
        self.qubits.extend_from_slice(&other.qubits);
        Ok(())
    }

    pub fn apply_cz(&mut self, i: QubitId, j: QubitId) -> Result<()> {
        if i == j {
            return Err(QsimError::SameQubit(i));
        }
        let mask = (1usize << self.position(i)?) | (1usize << self.position(j)?);
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if idx & mask == mask {
                *a = -*a;
            }
        }
        Ok(())
    }

    pub fn apply_single(&mut self, q: QubitId, u: &Unitary2) -> Result<()> {
        let bit = 1usize << self.position(q)?;
        let m = &u.0;
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let (a0, a1) = (self.amps[idx], self.amps[idx | bit]);
                self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[idx | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Amplitude `k` of the unnormalized post-measurement state over the
    /// remaining qubits.
    #[inline]
    fn projected(&self, pos: usize, basis: Basis, bit: u8, k: usize) -> Complex64 {
        let low = (1usize << pos) - 1;
        let idx = ((k & !low) << 1) | (k & low);
        match basis {
            Basis::Z => self.amps[idx | (usize::from(bit & 1) << pos)],
            Basis::Xy(delta) => {
                // ⟨+_{δ+bπ}| = (⟨0| + e^{-i(δ+bπ)}⟨1|)/√2
                let w = delta.plus_pi_if(bit).phase().conj();
                (self.amps[idx] + w * self.amps[idx | (1 << pos)]) * std::f64::consts::FRAC_1_SQRT_2
            }
        }
    }

    /// Born probability of `bit` when measuring `q` in `basis`.
    pub fn probability(&self, q: QubitId, basis: Basis, bit: u8) -> Result<f64> {
        let pos = self.position(q)?;
        Ok((0..self.amps.len() / 2)
            .map(|k| self.projected(pos, basis, bit, k).norm_sqr())
            .sum())
    }

    /// Projects onto the given outcome, removes `q` and renormalizes.
    /// Returns the Born probability of the outcome.
    pub fn collapse(&mut self, q: QubitId, basis: Basis, bit: u8) -> Result<f64> {
        if bit > 1 {
            return Err(QsimError::InvalidBit(bit));
        }
        let pos = self.position(q)?;
        let p = self.probability(q, basis, bit)?;
        if p < ZERO_PROBABILITY {
            return Err(QsimError::ZeroProbability { bit });
        }
        let scale = 1.0 / p.sqrt();
        let half = self.amps.len() / 2;
        // Source indices never fall below the slot being written.
        for k in 0..half {
            self.amps[k] = self.projected(pos, basis, bit, k) * scale;
        }
        self.amps.truncate(half);
        self.qubits.remove(pos);
        Ok(p)
    }

    /// Samples an outcome with the Born rule and collapses onto it.
    pub fn measure<R: Rng + ?Sized>(&mut self, q: QubitId, basis: Basis, rng: &mut R) -> Result<MeasurementOutcome> {
        let p0 = self.probability(q, basis, 0)?;
        let u: f64 = rng.gen();
        let bit = if u < p0 { 0 } else { 1 };
        self.collapse(q, basis, bit)?;
        Ok(MeasurementOutcome { qubit: q, bit })
    }

    pub fn measure_xy<R: Rng + ?Sized>(&mut self, q: QubitId, delta: Angle, rng: &mut R) -> Result<MeasurementOutcome> {
        self.measure(q, Basis::Xy(delta), rng)
    }

    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: QubitId, rng: &mut R) -> Result<MeasurementOutcome> {
        self.measure(q, Basis::Z, rng)
    }

    /// `|⟨self|other⟩|²` for registers holding the same qubits in the same order.
    pub fn fidelity(&self, other: &StateVector) -> Option<f64> {
        if self.qubits != other.qubits {
            return None;
        }
        let overlap: Complex64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        Some(overlap.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn q(i: u32) -> QubitId {
        QubitId(i)
    }

    fn two_plus() -> StateVector {
        let mut s = StateVector::plus_state(Angle::ZERO);
        s.join(StateVector::plus_state(Angle::ZERO).relabel(&[q(1)]).unwrap())
            .unwrap();
        s
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn plus_state_amplitudes() {
        let s = StateVector::plus_state(Angle::ZERO);
        assert!(close(s.amplitudes()[0], c(H, 0.0)) && close(s.amplitudes()[1], c(H, 0.0)));
        let s = StateVector::plus_state(Angle::PI);
        assert!(close(s.amplitudes()[1], c(-H, 0.0)));
        let s = StateVector::plus_state(Angle::PI_4);
        assert!(close(s.amplitudes()[1], c(0.5, 0.5)));
        let f = s.fidelity(&StateVector::plus_state(Angle::ZERO)).unwrap();
        // cos²(π/8)
        assert!((f - 0.853_553_390_593_273_7).abs() < 1e-12);
    }

    #[test]
    fn z_eigenstates() {
        let zero = StateVector::z_eigenstate(0).unwrap();
        let one = StateVector::z_eigenstate(1).unwrap();
        assert_eq!(zero.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(one.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(zero.fidelity(&one), Some(0.0));
        assert_eq!(StateVector::z_eigenstate(2), Err(QsimError::InvalidBit(2)));
    }

    #[test]
    fn cz_makes_cluster_state() {
        let mut s = two_plus();
        s.apply_cz(q(0), q(1)).unwrap();
        let expected = [c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)];
        for (a, b) in s.amplitudes().iter().zip(expected) {
            assert!(close(*a, b));
        }
        let mut t = two_plus();
        t.apply_cz(q(1), q(0)).unwrap();
        assert_eq!(s, t);
        s.apply_cz(q(0), q(1)).unwrap();
        assert_eq!(s, two_plus());
        assert_eq!(s.apply_cz(q(0), q(0)), Err(QsimError::SameQubit(q(0))));
        assert_eq!(s.apply_cz(q(0), q(5)), Err(QsimError::QubitNotPresent(q(5))));
    }

    #[test]
    fn single_qubit_gates() {
        let mut s = StateVector::z_eigenstate(0).unwrap();
        s.apply_single(q(0), &Unitary2::X).unwrap();
        assert_eq!(s, StateVector::z_eigenstate(1).unwrap());

        for theta in Angle::ALL {
            let mut s = StateVector::plus_state(theta);
            s.apply_single(q(0), &Unitary2::Z).unwrap();
            let f = s.fidelity(&StateVector::plus_state(theta + Angle::PI)).unwrap();
            assert!((f - 1.0).abs() < 1e-12);

            let mut s = StateVector::plus_state(theta);
            s.apply_single(q(0), &Unitary2::X).unwrap();
            let f = s.fidelity(&StateVector::plus_state(-theta)).unwrap();
            assert!((f - 1.0).abs() < 1e-12);
            let f = s.fidelity(&StateVector::plus_state(theta)).unwrap();
            let cos = theta.radians().cos();
            assert!((f - cos * cos).abs() < 1e-12);
        }
        let f = {
            let mut s = StateVector::plus_state(Angle::PI_4);
            s.apply_single(q(0), &Unitary2::X).unwrap();
            s.fidelity(&StateVector::plus_state(Angle::PI_4)).unwrap()
        };
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(Unitary2::new(m), Err(QsimError::NotUnitary { .. })));
        assert!(Unitary2::new(*Unitary2::H.matrix()).is_ok());
    }

    #[test]
    fn xy_measurement_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for theta in Angle::ALL {
            let s = StateVector::plus_state(theta);
            assert!((s.probability(q(0), Basis::Xy(theta), 0).unwrap() - 1.0).abs() < 1e-12);
            let opposite = theta + Angle::PI;
            assert!((s.probability(q(0), Basis::Xy(opposite), 1).unwrap() - 1.0).abs() < 1e-12);
            for _ in 0..20 {
                let mut t = s.clone();
                assert_eq!(t.measure_xy(q(0), theta, &mut rng).unwrap().bit, 0);
                let mut t = s.clone();
                assert_eq!(t.measure_xy(q(0), opposite, &mut rng).unwrap().bit, 1);
            }
        }
        let s = StateVector::plus_state(Angle::ZERO);
        assert!((s.probability(q(0), Basis::Xy(Angle::PI_2), 0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn xy_probability_is_cos_squared_half_difference() {
        for theta in Angle::ALL {
            for delta in Angle::ALL {
                let s = StateVector::plus_state(theta);
                let half = (theta.radians() - delta.radians()) / 2.0;
                let p = s.probability(q(0), Basis::Xy(delta), 0).unwrap();
                assert!((p - half.cos().powi(2)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn z_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = StateVector::z_eigenstate(0).unwrap();
        assert_eq!(s.measure_z(q(0), &mut rng).unwrap().bit, 0);
        assert_eq!(s.n_qubits(), 0);
        assert_eq!(s.measure_z(q(0), &mut rng), Err(QsimError::QubitNotPresent(q(0))));
        let s = StateVector::plus_state(Angle::ZERO);
        assert!((s.probability(q(0), Basis::Z, 0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bell_collapse_correlates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bell = StateVector::from_amplitudes(vec![q(0), q(1)], vec![c(H, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(H, 0.0)])
            .unwrap();
        for _ in 0..50 {
            let mut s = bell.clone();
            let first = s.measure_z(q(0), &mut rng).unwrap().bit;
            assert_eq!(s.qubits(), &[q(1)]);
            let expected = StateVector::z_eigenstate(first).unwrap().relabel(&[q(1)]).unwrap();
            assert!((s.fidelity(&expected).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_wraps_by_full_turn() {
        let mut s = two_plus();
        s.apply_cz(q(0), q(1)).unwrap();
        let a = Angle::from_eighths(3);
        let b = Angle::from_eighths(3 + 8);
        let mut r1 = ChaCha8Rng::seed_from_u64(11);
        let mut r2 = ChaCha8Rng::seed_from_u64(11);
        let (mut s1, mut s2) = (s.clone(), s);
        assert_eq!(
            s1.measure_xy(q(1), a, &mut r1).unwrap(),
            s2.measure_xy(q(1), b, &mut r2).unwrap()
        );
        assert_eq!(s1, s2);
    }

    #[test]
    fn zero_probability_collapse_is_an_error() {
        let mut s = StateVector::z_eigenstate(0).unwrap();
        assert_eq!(
            s.collapse(q(0), Basis::Z, 1),
            Err(QsimError::ZeroProbability { bit: 1 })
        );
    }

    #[test]
    fn register_cap() {
        let mut s = StateVector::empty();
        for i in 0..MAX_QUBITS as u32 {
            s.join(StateVector::z_eigenstate(0).unwrap().relabel(&[q(i)]).unwrap())
                .unwrap();
        }
        let err = s
            .join(StateVector::z_eigenstate(0).unwrap().relabel(&[q(99)]).unwrap())
            .unwrap_err();
        assert!(matches!(err, QsimError::TooManyQubits { .. }));
    }
}
