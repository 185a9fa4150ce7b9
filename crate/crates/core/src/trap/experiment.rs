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

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{embed_traps, embed_traps_at, TrapError, TrapTemplate};
use crate::adversary::ServerBehavior;
use crate::mbqc::Vertex;
use crate::protocol::{run_delegated, ClientSecrets, InProcess, SessionSeeds, StreamRole, Transport};
use crate::stats::{Estimate, Z_95};

/// How traps are placed in each session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// This many traps on uniformly chosen isolated positions.
    Random(usize),
    /// Traps at exactly these vertices.
    Fixed(Vec<Vertex>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub accepted: bool,
    pub output: Vec<u8>,
    /// The output differs from the honest one.
    pub wrong: bool,
    pub failed_traps: BTreeSet<Vertex>,
    pub digest: String,
}

/// One blinded session with fresh secrets drawn from the client stream of `seeds`.
pub fn run_trial(
    template: TrapTemplate,
    placement: &Placement,
    behavior: &ServerBehavior,
    seeds: SessionSeeds,
) -> Result<TrialOutcome, TrapError> {
    run_trial_over(template, placement, seeds, &mut InProcess::new(behavior, seeds))
}

/// [`run_trial`] against whatever server sits behind `transport`.
pub fn run_trial_over(
    template: TrapTemplate,
    placement: &Placement,
    seeds: SessionSeeds,
    transport: &mut dyn Transport,
) -> Result<TrialOutcome, TrapError> {
    let mut rng = seeds.rng(StreamRole::Client);
    let blinded = match placement {
        Placement::Random(n) => embed_traps(template, *n, &mut rng)?,
        Placement::Fixed(p) => embed_traps_at(template, p, &mut rng)?,
    };
    let job = blinded.job()?;
    let secrets = ClientSecrets::sample(&job, blinded.layout.clone(), &mut rng);
    let (result, transcript, decision) = run_delegated(&job, &secrets, transport)?;
    let output = result.output_bits(&blinded.logical);
    Ok(TrialOutcome {
        accepted: decision.accept,
        wrong: output != blinded.honest_output(),
        output,
        failed_traps: decision.failed_traps,
        digest: transcript.digest(),
    })
}

fn estimate_over(
    trials: u64,
    master: u64,
    event: impl Fn(SessionSeeds) -> Result<bool, TrapError> + Sync,
) -> Result<Estimate, TrapError> {
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| event(SessionSeeds::new(master, i)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Estimate::wilson(hits, trials, Z_95))
}

/// Monte-Carlo estimate of P(accept and wrong output).
pub fn accept_wrong_probability(
    behavior: &ServerBehavior,
    template: TrapTemplate,
    placement: &Placement,
    trials: u64,
    master: u64,
) -> Result<Estimate, TrapError> {
    estimate_over(trials, master, |s| {
        run_trial(template, placement, behavior, s).map(|t| t.accepted && t.wrong)
    })
}

/// Monte-Carlo estimate of P(reject).
pub fn detection_probability(
    behavior: &ServerBehavior,
    template: TrapTemplate,
    placement: &Placement,
    trials: u64,
    master: u64,
) -> Result<Estimate, TrapError> {
    estimate_over(trials, master, |s| {
        run_trial(template, placement, behavior, s).map(|t| !t.accepted)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub accepted: bool,
    pub output: Vec<u8>,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Amplified {
    pub accept: bool,
    /// Majority output over accepting runs; `None` on a tie or when nothing was accepted.
    pub output: Option<Vec<u8>>,
    pub wrong: bool,
    pub runs: Vec<RunRecord>,
}

/// Runs `k` independent sessions. Accepts iff every run accepts and all runs
/// agree on the output.
pub fn amplify_by_repetition(
    k: usize,
    behavior: &ServerBehavior,
    template: TrapTemplate,
    placement: &Placement,
    master: u64,
    index: u64,
) -> Result<Amplified, TrapError> {
    assert!(k >= 1, "at least one run");
    let master = master.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut runs = Vec::with_capacity(k);
    let mut honest = Vec::new();
    for j in 0..k as u64 {
        let seeds = SessionSeeds::new(master, index * k as u64 + j);
        let t = run_trial(template, placement, behavior, seeds)?;
        if honest.is_empty() {
            honest = vec![0; t.output.len()];
        }
        runs.push(RunRecord {
            accepted: t.accepted,
            output: t.output,
            digest: t.digest,
        });
    }
    let mut votes: BTreeMap<&Vec<u8>, usize> = BTreeMap::new();
    for r in runs.iter().filter(|r| r.accepted) {
        *votes.entry(&r.output).or_default() += 1;
    }
    let best = votes.values().copied().max().unwrap_or(0);
    let output = match votes.iter().filter(|(_, &c)| c == best).collect::<Vec<_>>().as_slice() {
        [(o, _)] => Some((**o).clone()),
        _ => None,
    };
    let accept = runs.iter().all(|r| r.accepted) && votes.len() == 1;
    let wrong = output.as_ref().is_some_and(|o| *o != honest);
    Ok(Amplified {
        accept,
        output,
        wrong,
        runs,
    })
}

/// Monte-Carlo estimate of P(accept and wrong) for the `k`-run protocol.
pub fn amplified_accept_wrong(
    k: usize,
    behavior: &ServerBehavior,
    template: TrapTemplate,
    placement: &Placement,
    trials: u64,
    master: u64,
) -> Result<Estimate, TrapError> {
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| {
            amplify_by_repetition(k, behavior, template, placement, master, i).map(|a| u64::from(a.accept && a.wrong))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Estimate::wilson(hits, trials, Z_95))
}
