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

//! Exact output distribution of a pattern by branch enumeration.
//!
//! Works on closed-form graph-state amplitudes rather than the state-vector
//! engine, so it can be used to check both the honest and the delegated runs.

use num_complex::Complex64;

use super::{MeasurementPattern, PatternError, Readout};
use crate::stats::Distribution;

/// Largest number of X-Y measured vertices the oracle enumerates.
pub const ORACLE_MAX_MEASURED: usize = 12;

/// Largest graph the oracle will expand densely.
pub const ORACLE_MAX_VERTICES: usize = 16;

/// Exact distribution of the corrected output bits (in output order).
pub fn circuit_oracle(pattern: &MeasurementPattern) -> Result<Distribution, PatternError> {
    let graph = pattern.graph();
    let n = graph.vertices().len();
    let m = pattern.n_measured();
    if m > ORACLE_MAX_MEASURED {
        return Err(PatternError::TooLarge(format!(
            "{m} measured vertices, cap is {ORACLE_MAX_MEASURED}"
        )));
    }
    if n > ORACLE_MAX_VERTICES {
        return Err(PatternError::TooLarge(format!(
            "{n} vertices, cap is {ORACLE_MAX_VERTICES}"
        )));
    }

    let index = |v| graph.index_of(v).expect("validated vertex");
    // Graph state amplitude signs: (-1)^{Σ_edges x_a x_b}, norm 2^{-n/2}.
    let edge_masks: Vec<usize> = graph
        .edges()
        .iter()
        .map(|&(a, b)| (1 << index(a)) | (1 << index(b)))
        .collect();
    let norm = (0.5f64).powf(n as f64 / 2.0);
    let graph_amp: Vec<f64> = (0..1usize << n)
        .map(|x| {
            let odd = edge_masks.iter().filter(|&&e| x & e == e).count() % 2;
            if odd == 1 {
                -norm
            } else {
                norm
            }
        })
        .collect();

    let measured: Vec<usize> = pattern.order().iter().map(|&v| index(v)).collect();
    let measured_pos = |v| {
        pattern
            .order()
            .iter()
            .position(|&u| u == v)
            .expect("measured dependency")
    };
    let x_dep_pos: Vec<Vec<usize>> = pattern
        .order()
        .iter()
        .map(|&v| pattern.x_deps(v).iter().map(|&d| measured_pos(d)).collect())
        .collect();
    let z_dep_pos: Vec<Vec<usize>> = pattern
        .order()
        .iter()
        .map(|&v| pattern.z_deps(v).iter().map(|&d| measured_pos(d)).collect())
        .collect();
    let z_outputs = pattern.z_outputs();
    let z_out_idx: Vec<usize> = z_outputs.iter().map(|&o| index(o)).collect();

    let outputs = graph.outputs();
    let mut dist = Distribution::new();
    let mut eighths = vec![0u8; m];
    let h = std::f64::consts::FRAC_1_SQRT_2;

    for branch in 0..1usize << m {
        let s = |k: usize| ((branch >> k) & 1) as u8;
        for (k, &v) in pattern.order().iter().enumerate() {
            let sx = x_dep_pos[k].iter().fold(0, |acc, &d| acc ^ s(d));
            let sz = z_dep_pos[k].iter().fold(0, |acc, &d| acc ^ s(d));
            let phi = i32::from(pattern.phi(v).expect("validated angle").eighths());
            let signed = if sx == 1 { 8 - phi } else { phi };
            eighths[k] = ((signed + 4 * i32::from(sz) + 4 * i32::from(s(k))) % 8) as u8;
        }
        // Bra coefficients ⟨+_{δ_k + s_k π}|x⟩ = e^{-i x (δ_k + s_k π)} / √2.
        let bra: Vec<[Complex64; 2]> = eighths
            .iter()
            .map(|&e| {
                let a = f64::from(e) * std::f64::consts::FRAC_PI_4;
                [Complex64::new(h, 0.0), Complex64::from_polar(h, -a)]
            })
            .collect();

        for y in 0..1usize << z_out_idx.len() {
            let mut fixed = 0usize;
            for (k, &p) in z_out_idx.iter().enumerate() {
                fixed |= ((y >> k) & 1) << p;
            }
            let mut amp = Complex64::new(0.0, 0.0);
            for xm in 0..1usize << m {
                let mut x = fixed;
                let mut w = Complex64::new(1.0, 0.0);
                for (k, &p) in measured.iter().enumerate() {
                    let bit = (xm >> k) & 1;
                    x |= bit << p;
                    w *= bra[k][bit];
                }
                amp += w * graph_amp[x];
            }
            let prob = amp.norm_sqr();
            if prob == 0.0 {
                continue;
            }
            let bits: Vec<u8> = outputs
                .iter()
                .map(|&o| match pattern.readout(o).unwrap_or_default() {
                    Readout::Xy => s(measured_pos(o)),
                    Readout::Z => {
                        let k = z_outputs.iter().position(|&z| z == o).expect("z output");
                        let raw = ((y >> k) & 1) as u8;
                        pattern.x_deps(o).iter().fold(raw, |acc, &d| acc ^ s(measured_pos(d)))
                    }
                })
                .collect();
            dist.add(bits, prob);
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::Angle;
    use crate::mbqc::{templates, OpenGraph};
    use std::collections::BTreeMap;

    #[test]
    fn identity_wire_is_uniform() {
        for n in [1, 3, 5] {
            let d = circuit_oracle(&templates::identity_wire(n).unwrap()).unwrap();
            assert!((d.probability(&[0]) - 0.5).abs() < 1e-12, "n={n}");
            assert!((d.probability(&[1]) - 0.5).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn even_wire_is_deterministic() {
        for n in [2, 4] {
            let d = circuit_oracle(&templates::identity_wire(n).unwrap()).unwrap();
            assert!((d.probability(&[0]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_pattern_is_a_point_mass() {
        let p = MeasurementPattern::new(
            OpenGraph::new(vec![], vec![], vec![], vec![]).unwrap(),
            vec![],
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
            BTreeMap::new(),
        )
        .unwrap();
        let d = circuit_oracle(&p).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.probability(&[]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_wire_matches_closed_form() {
        // Two-vertex wire measuring vertex 0 at φ leaves H·Rz(-φ)|+⟩ on the
        // output, so P(0) = cos²(φ/2).
        for phi in Angle::ALL {
            let d = circuit_oracle(&templates::rotation_wire(&[phi]).unwrap()).unwrap();
            let expected = (phi.radians() / 2.0).cos().powi(2);
            assert!((d.probability(&[0]) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn refuses_oversized_patterns() {
        let p = templates::identity_wire(14).unwrap();
        assert!(matches!(circuit_oracle(&p), Err(PatternError::TooLarge(_))));
    }
}
