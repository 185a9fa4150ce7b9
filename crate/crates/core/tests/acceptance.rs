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

//! Acceptance checks, run in order with one PASS/FAIL line each.

use std::collections::BTreeMap;
use std::net::TcpListener;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blindqc::adversary::{AttackTarget, Pauli, ServerBehavior};
use blindqc::mbqc::{circuit_oracle, run_pattern_honest, templates, MeasurementPattern};
use blindqc::protocol::tcp::{self, TcpTransport};
use blindqc::protocol::{
    exact_acceptance, exact_output_distribution, run_delegated, view_distribution, ClientSecrets, DelegatedJob,
    InProcess, SessionSeeds, SessionTranscript, StreamRole, Transport, DEFAULT_BOUND,
};
use blindqc::qsim::{Basis, QubitId, StateVector, Unitary2};
use blindqc::stats::Distribution;
use blindqc::trap::{
    accept_wrong_probability, amplified_accept_wrong, detection_probability, embed_traps, embed_traps_at, Placement,
    TrapTemplate,
};
use blindqc::Angle;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("{what} took {elapsed:.2?}, limit {limit:?}"))
    }
}

fn honest_correctness() -> Outcome {
    let start = Instant::now();
    let mut worst: (f64, String) = (0.0, String::new());
    let mut checked = 0;
    for (name, pattern) in templates::catalogue() {
        if pattern.n_measured() > 4 {
            continue;
        }
        let job = DelegatedJob::plain(pattern);
        let delegated = exact_output_distribution(&job, &Default::default(), &ServerBehavior::Honest)
            .map_err(|e| format!("{name}: {e}"))?;
        let oracle = circuit_oracle(job.logical()).map_err(|e| format!("{name}: {e}"))?;
        let tv = delegated.tv_distance(&oracle);
        if tv >= worst.0 {
            worst = (tv, name);
        }
        checked += 1;
    }
    within(start.elapsed(), Duration::from_secs(10), "enumeration")?;
    check(
        worst.0 < 1e-12 && checked > 0,
        format!(
            "{checked} templates, max TV {:.1e} ({}), {:.2?}",
            worst.0,
            worst.1,
            start.elapsed()
        ),
    )
}

/// Largest TV distance between the views of any two φ-assignments of `pattern`.
fn max_pairwise_view_tv(pattern: &MeasurementPattern) -> Result<(f64, usize), String> {
    let measured = pattern.order().to_vec();
    let mut views: Vec<Distribution> = Vec::new();
    for code in 0..8usize.pow(measured.len() as u32) {
        let phi: BTreeMap<_, _> = measured
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, Angle::ALL[(code >> (3 * i)) & 7]))
            .collect();
        views.push(view_distribution(pattern, &phi, DEFAULT_BOUND).map_err(|e| e.to_string())?);
    }
    let mut max = 0.0f64;
    let mut pairs = 0;
    for a in &views {
        for b in &views {
            max = max.max(a.tv_distance(b));
            pairs += 1;
        }
    }
    Ok((max, pairs))
}

fn blindness() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut ok = true;
    let cases = [("rotation:0", 64), ("rotation:0,0", 4096), ("cluster2x2:0,0", 4096)];
    for (name, want_pairs) in cases {
        let pattern = templates::by_name(name).map_err(|e| e.to_string())?;
        let (tv, pairs) = max_pairwise_view_tv(&pattern)?;
        ok &= tv < 1e-12 && pairs == want_pairs;
        lines.push(format!("{name}: {pairs} pairs, max TV {tv:.1e}"));
    }
    within(start.elapsed(), Duration::from_secs(60), "blindness")?;
    check(ok, format!("{}, {:.2?}", lines.join("; "), start.elapsed()))
}

fn trap_completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 1.0f64;
    let mut jobs = 0;
    let templates = [
        TrapTemplate::Line(1),
        TrapTemplate::Line(2),
        TrapTemplate::Line(3),
        TrapTemplate::Line(4),
        TrapTemplate::Square,
    ];
    for template in templates {
        for t in 1..=2 {
            for positions in template.placements(t) {
                let blinded = embed_traps_at(template, &positions, &mut rng).map_err(|e| e.to_string())?;
                let job = blinded.job().map_err(|e| e.to_string())?;
                let p = exact_acceptance(&job, &blinded.layout, &ServerBehavior::Honest)
                    .map_err(|e| format!("{template} {positions:?}: {e}"))?;
                worst = worst.min(p);
                jobs += 1;
            }
        }
    }
    check(
        (1.0 - worst).abs() < 1e-12 && jobs > 0,
        format!("{jobs} trap placements, min P(accept) = {worst:.15}"),
    )
}

fn z_random() -> ServerBehavior {
    ServerBehavior::PauliAt {
        pauli: Pauli::Z,
        target: AttackTarget::Random,
    }
}

/// Exact detection rate of a Z attack at a uniform position: acceptance
/// enumerated at each fixed position, averaged over positions and placements.
fn exact_z_detection(template: TrapTemplate) -> Result<f64, String> {
    let n = template.graph().vertices().len();
    let placements = template.placements(1);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut detected = 0.0;
    for positions in &placements {
        let blinded = embed_traps_at(template, positions, &mut rng).map_err(|e| e.to_string())?;
        let job = blinded.job().map_err(|e| e.to_string())?;
        for p in 0..n {
            let z = ServerBehavior::PauliAt {
                pauli: Pauli::Z,
                target: AttackTarget::Position(p),
            };
            detected += 1.0 - exact_acceptance(&job, &blinded.layout, &z).map_err(|e| e.to_string())?;
        }
    }
    Ok(detected / (n * placements.len()) as f64)
}

const SOUNDNESS_TRIALS: u64 = 100_000;
const SOUNDNESS_SEED: u64 = 20_260_415;

fn trap_soundness() -> Outcome {
    let start = Instant::now();
    let line4 = TrapTemplate::Line(4);
    let exact = exact_z_detection(line4)?;
    let z = detection_probability(
        &z_random(),
        line4,
        &Placement::Random(1),
        SOUNDNESS_TRIALS,
        SOUNDNESS_SEED,
    )
    .map_err(|e| e.to_string())?;
    let x_on_trap = ServerBehavior::PauliAt {
        pauli: Pauli::X,
        target: AttackTarget::Position(1),
    };
    let x = detection_probability(
        &x_on_trap,
        line4,
        &Placement::Fixed(vec![1]),
        SOUNDNESS_TRIALS,
        SOUNDNESS_SEED + 1,
    )
    .map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(120), "soundness")?;
    check(
        (exact - 0.25).abs() < 1e-12 && (z.estimate - 0.25).abs() <= 0.02 && (x.estimate - 0.5).abs() <= 0.02,
        format!(
            "Z random: exact {exact:.12}, MC {:.4} [{:.4}, {:.4}]; X on trap: MC {:.4} [{:.4}, {:.4}]; {} trials each, {:.2?}",
            z.estimate,
            z.ci_low,
            z.ci_high,
            x.estimate,
            x.ci_low,
            x.ci_high,
            SOUNDNESS_TRIALS,
            start.elapsed()
        ),
    )
}

fn amplification() -> Outcome {
    let line4 = TrapTemplate::Line(4);
    let placement = Placement::Random(1);
    let single = accept_wrong_probability(&z_random(), line4, &placement, SOUNDNESS_TRIALS, SOUNDNESS_SEED)
        .map_err(|e| e.to_string())?;
    let p = single.estimate;
    let mut ok = p > 0.0;
    let mut prev = f64::INFINITY;
    let mut parts = vec![format!("p = {p:.4}")];
    for k in [1usize, 2, 4, 8] {
        let e = amplified_accept_wrong(k, &z_random(), line4, &placement, SOUNDNESS_TRIALS, SOUNDNESS_SEED)
            .map_err(|e| e.to_string())?;
        let bound = p.powi(k as i32);
        let sigma = (bound * (1.0 - bound) / SOUNDNESS_TRIALS as f64).sqrt();
        ok &= e.estimate <= bound + 2.0 * sigma && e.estimate < prev;
        prev = e.estimate;
        parts.push(format!("k={k}: {:.5} (p^k+2σ {:.5})", e.estimate, bound + 2.0 * sigma));
    }
    check(ok, parts.join("; "))
}

/// One blinded session as the trial runner does it, returning the server's view.
fn blinded_session(seeds: SessionSeeds, transport: &mut dyn Transport) -> Result<SessionTranscript, String> {
    let mut rng = seeds.rng(StreamRole::Client);
    let template = if seeds.session.is_multiple_of(2) {
        TrapTemplate::Line(4)
    } else {
        TrapTemplate::Square
    };
    let blinded = embed_traps(template, 1, &mut rng).map_err(|e| e.to_string())?;
    let job = blinded.job().map_err(|e| e.to_string())?;
    let secrets = ClientSecrets::sample(&job, blinded.layout.clone(), &mut rng);
    let (_, transcript, _) = run_delegated(&job, &secrets, transport).map_err(|e| e.to_string())?;
    Ok(transcript)
}

fn transport_equivalence() -> Outcome {
    const SESSIONS: usize = 100;
    const MASTER: u64 = 77;
    let behavior = ServerBehavior::Composite {
        parts: vec![
            ServerBehavior::RandomPauliEach { p: 0.3 },
            ServerBehavior::LieOutcome { flip_prob: 0.1 },
        ],
    };
    let listener = TcpListener::bind("127.0.0.1:0").map_err(|e| e.to_string())?;
    let addr = listener.local_addr().map_err(|e| e.to_string())?;
    let (tx, rx) = mpsc::channel();
    let server_behavior = behavior.clone();
    let server = std::thread::spawn(move || {
        tcp::serve(&listener, &server_behavior, Some(SESSIONS), &mut |t| {
            let _ = tx.send(t.map(|t| t.to_ndjson()).map_err(|e| e.to_string()));
        })
    });
    let mut identical = 0;
    let mut first_mismatch = None;
    for i in 0..SESSIONS as u64 {
        let seeds = SessionSeeds::new(MASTER, i);
        let local = blinded_session(seeds, &mut InProcess::new(&behavior, seeds))?.to_ndjson();
        let mut remote = TcpTransport::connect(addr, seeds).map_err(|e| e.to_string())?;
        let received = blinded_session(seeds, &mut remote)?.to_ndjson();
        let served = rx.recv().map_err(|e| e.to_string())??;
        if local == received && local == served {
            identical += 1;
        } else {
            first_mismatch.get_or_insert(i);
        }
    }
    server
        .join()
        .map_err(|_| "server thread panicked".to_string())?
        .map_err(|e| e.to_string())?;
    check(
        identical == SESSIONS,
        format!("{identical}/{SESSIONS} byte-identical transcripts, first mismatch {first_mismatch:?}"),
    )
}

fn engine_scale() -> Outcome {
    let pattern = templates::identity_wire(20).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let start = Instant::now();
    let result = run_pattern_honest(&pattern, &mut rng).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1), "20-qubit run")?;
    if result.outputs.len() != 1 {
        return Err("20-qubit run produced no output".into());
    }

    let gates = [Unitary2::H, Unitary2::X, Unitary2::Y, Unitary2::Z];
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let mut state = StateVector::empty();
        for q in 0..10 {
            let single = StateVector::plus_state(Angle::random(&mut rng))
                .relabel(&[QubitId(q)])
                .map_err(|e| e.to_string())?;
            state.join(single).map_err(|e| e.to_string())?;
        }
        for _ in 0..12 {
            let q = QubitId(rng.gen_range(0..10));
            let r = QubitId(rng.gen_range(0..10));
            match rng.gen_range(0..3) {
                0 if q != r => state.apply_cz(q, r),
                1 => state.apply_single(q, &Unitary2::phase(Angle::random(&mut rng))),
                _ => state.apply_single(q, &gates[rng.gen_range(0..4)]),
            }
            .map_err(|e| e.to_string())?;
            worst = worst.max((state.norm_sqr() - 1.0).abs());
        }
        let q = QubitId(rng.gen_range(0..10));
        let basis = if rng.gen() {
            Basis::Z
        } else {
            Basis::Xy(Angle::random(&mut rng))
        };
        state.measure(q, basis, &mut rng).map_err(|e| e.to_string())?;
        worst = worst.max((state.norm_sqr() - 1.0).abs());
    }
    check(
        worst <= 1e-10,
        format!("20-qubit run {elapsed:.2?}; max |norm - 1| {worst:.1e} over 10^4 sequences"),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 7] = [
        ("honest correctness", honest_correctness),
        ("blindness", blindness),
        ("trap completeness", trap_completeness),
        ("trap soundness", trap_soundness),
        ("amplification", amplification),
        ("transport equivalence", transport_equivalence),
        ("engine scale", engine_scale),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
