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

//! Discrete rotation angles in steps of π/4.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An angle `k·π/4` with `k` kept in `0..8`.
///
/// All arithmetic wraps modulo 8, so the set is closed under addition and
/// negation. Serialized as the bare integer `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(u8);

impl Angle {
    pub const ZERO: Angle = Angle(0);
    pub const PI_4: Angle = Angle(1);
    pub const PI_2: Angle = Angle(2);
    pub const PI: Angle = Angle(4);

    /// Every angle in the set, in increasing order.
    pub const ALL: [Angle; 8] = [
        Angle(0),
        Angle(1),
        Angle(2),
        Angle(3),
        Angle(4),
        Angle(5),
        Angle(6),
        Angle(7),
    ];

    /// Builds an angle from any integer number of eighths-of-a-turn-over-π/4 steps.
    pub fn from_eighths(k: i64) -> Angle {
        Angle(k.rem_euclid(8) as u8)
    }

    pub fn eighths(self) -> u8 {
        self.0
    }

    pub fn radians(self) -> f64 {
        f64::from(self.0) * std::f64::consts::FRAC_PI_4
    }

    /// `e^{iθ}` computed from exact table values.
    pub fn phase(self) -> Complex64 {
        const H: f64 = std::f64::consts::FRAC_1_SQRT_2;
        let (re, im) = match self.0 {
            0 => (1.0, 0.0),
            1 => (H, H),
            2 => (0.0, 1.0),
            3 => (-H, H),
            4 => (-1.0, 0.0),
            5 => (-H, -H),
            6 => (0.0, -1.0),
            _ => (H, -H),
        };
        Complex64::new(re, im)
    }

    /// Adds `π` when `bit` is 1.
    pub fn plus_pi_if(self, bit: u8) -> Angle {
        if bit & 1 == 1 {
            self + Angle::PI
        } else {
            self
        }
    }

    /// Negates when `bit` is 1.
    pub fn negate_if(self, bit: u8) -> Angle {
        if bit & 1 == 1 {
            -self
        } else {
            self
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Angle {
        Angle(rng.gen_range(0..8))
    }
}

impl Add for Angle {
    type Output = Angle;

    fn add(self, rhs: Angle) -> Angle {
        Angle((self.0 + rhs.0) & 7)
    }
}

impl AddAssign for Angle {
    fn add_assign(&mut self, rhs: Angle) {
        *self = *self + rhs;
    }
}

impl Sub for Angle {
    type Output = Angle;

    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl Neg for Angle {
    type Output = Angle;

    fn neg(self) -> Angle {
        Angle((8 - self.0) & 7)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "0"),
            4 => write!(f, "π"),
            k => write!(f, "{k}π/4"),
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Angle, D::Error> {
        let k = u8::deserialize(d)?;
        if k >= 8 {
            return Err(serde::de::Error::custom(format!(
                "angle must be an integer number of π/4 steps in 0..8, got {k}"
            )));
        }
        Ok(Angle(k))
    }
}
