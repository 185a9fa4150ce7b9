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
use std::net::{SocketAddr, TcpListener};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::{ExperimentConfig, HarnessError, Report, Row, TransportSpec};
use crate::angle::Angle;
use crate::mbqc::{circuit_oracle, templates, MeasurementPattern};
use crate::protocol::tcp::{self, TcpTransport};
use crate::protocol::{
    run_delegated, view_distribution, ClientSecrets, DelegatedJob, InProcess, SessionSeeds, StreamRole, Transport,
    DEFAULT_BOUND,
};
use crate::stats::{Distribution, Estimate, Z_95};
use crate::trap::{
    accept_wrong_probability, amplified_accept_wrong, detection_probability, run_trial_over, Placement, TrapError,
    TrapLayout, TrapTemplate,
};

/// Most φ-assignments `blindness` will enumerate.
const MAX_ASSIGNMENTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Run,
    Blindness,
    Detect,
    Amplify,
    Serve,
    Client,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Blindness => "blindness",
            Command::Detect => "detect",
            Command::Amplify => "amplify",
            Command::Serve => "serve",
            Command::Client => "client",
        }
    }

    /// Whether the command emits a CSV sweep next to its JSON report.
    pub fn writes_csv(self) -> bool {
        matches!(self, Command::Detect | Command::Amplify)
    }
}

/// Validates `cfg` and runs `cmd`. `serve` announces its bound address on stderr.
pub fn execute(cmd: Command, cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut report = match cmd {
        Command::Run => run(cfg),
        Command::Blindness => blindness(cfg),
        Command::Detect => detect(cfg),
        Command::Amplify => amplify(cfg),
        Command::Serve => serve(cfg, &mut |addr| eprintln!("listening on {addr}")),
        Command::Client => client(cfg),
    }?;
    if cfg.wall_clock {
        report.wall_clock_s = Some(started.elapsed().as_secs_f64());
    }
    Ok(report)
}

enum Workload {
    Trapped(TrapTemplate),
    Plain(Box<MeasurementPattern>),
}

fn workload(cfg: &ExperimentConfig) -> Result<Workload, HarnessError> {
    if let Ok(t) = cfg.template.parse::<TrapTemplate>() {
        return Ok(Workload::Trapped(t));
    }
    let pattern = templates::by_name(&cfg.template)
        .map_err(|_| HarnessError::Config(format!("unknown template {:?}", cfg.template)))?;
    if cfg.n_traps > 0 {
        return Err(HarnessError::Config(format!(
            "traps need a line:N or square template, not {:?}",
            cfg.template
        )));
    }
    Ok(Workload::Plain(Box::new(pattern)))
}

fn trap_template(cfg: &ExperimentConfig) -> Result<TrapTemplate, HarnessError> {
    cfg.template
        .parse()
        .map_err(|_| HarnessError::Config(format!("{:?} is not a trap template (line:N or square)", cfg.template)))
}

fn in_process_only(cfg: &ExperimentConfig, cmd: Command) -> Result<(), HarnessError> {
    match cfg.transport {
        TransportSpec::InProcess => Ok(()),
        TransportSpec::Tcp(_) => Err(HarnessError::Config(format!("{} runs in process only", cmd.name()))),
    }
}

/// Runs `f` once per session over the configured transport, in parallel when
/// in process. Results come back in session order.
fn sessions<T: Send>(
    cfg: &ExperimentConfig,
    f: impl Fn(SessionSeeds, &mut dyn Transport) -> Result<T, HarnessError> + Sync,
) -> Result<Vec<T>, HarnessError> {
    match &cfg.transport {
        TransportSpec::InProcess => (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let seeds = SessionSeeds::new(cfg.seed, i);
                f(seeds, &mut InProcess::new(&cfg.adversary, seeds))
            })
            .collect(),
        TransportSpec::Tcp(addr) => (0..cfg.trials)
            .map(|i| {
                let seeds = SessionSeeds::new(cfg.seed, i);
                f(seeds, &mut TcpTransport::connect(addr.as_str(), seeds)?)
            })
            .collect(),
    }
}

fn rate(hits: impl Iterator<Item = bool>, trials: u64) -> Estimate {
    Estimate::wilson(hits.filter(|&h| h).count() as u64, trials, Z_95)
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

/// End-to-end delegated sessions.
pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    if !cfg.adversary.is_honest() && matches!(cfg.transport, TransportSpec::Tcp(_)) {
        log::warn!("over tcp the server's own configuration decides its behavior");
    }
    let mut report = Report::new(Command::Run.name(), cfg);
    let n = cfg.trials;
    match workload(cfg)? {
        Workload::Trapped(template) => {
            let placement = Placement::Random(cfg.n_traps);
            let trials = sessions(cfg, |seeds, t| Ok(run_trial_over(template, &placement, seeds, t)?))?;
            report.estimates = vec![
                Row::new("accept", rate(trials.iter().map(|t| t.accepted), n)),
                Row::new("wrong", rate(trials.iter().map(|t| t.wrong), n)),
                Row::new("accept_wrong", rate(trials.iter().map(|t| t.accepted && t.wrong), n)),
            ];
            report.details = json!({ "template": template.to_string(), "n_traps": cfg.n_traps });
            report.digests = trials.into_iter().map(|t| t.digest).collect();
        }
        Workload::Plain(pattern) => {
            let job = DelegatedJob::plain(*pattern);
            let runs = sessions(cfg, |seeds, t| {
                let secrets = ClientSecrets::sample(&job, TrapLayout::default(), &mut seeds.rng(StreamRole::Client));
                let (result, transcript, decision) = run_delegated(&job, &secrets, t)?;
                Ok((result.output_bits(job.logical()), decision.accept, transcript.digest()))
            })?;
            let empirical = Distribution::from_samples(runs.iter().map(|r| r.0.clone()));
            let oracle = circuit_oracle(job.logical())?;
            let counts: BTreeMap<String, u64> = runs.iter().fold(BTreeMap::new(), |mut m, r| {
                *m.entry(bit_string(&r.0)).or_default() += 1;
                m
            });
            report.estimates = vec![Row::new("accept", rate(runs.iter().map(|r| r.1), n))];
            report.details = json!({
                "outputs": counts,
                "tv_to_oracle": empirical.tv_distance(&oracle),
            });
            report.digests = runs.into_iter().map(|r| r.2).collect();
        }
    }
    Ok(report)
}

/// [`run`] against a remote server.
pub fn client(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    if !matches!(cfg.transport, TransportSpec::Tcp(_)) {
        return Err(HarnessError::Config("client needs a tcp:host:port transport".into()));
    }
    let mut report = run(cfg)?;
    report.command = Command::Client.name().into();
    Ok(report)
}

/// Serves `trials` sessions on the configured address with the configured
/// behavior. `on_ready` receives the bound address before the first accept.
pub fn serve(cfg: &ExperimentConfig, on_ready: &mut dyn FnMut(SocketAddr)) -> Result<Report, HarnessError> {
    let TransportSpec::Tcp(addr) = &cfg.transport else {
        return Err(HarnessError::Config("serve needs a tcp:host:port transport".into()));
    };
    let listener = TcpListener::bind(addr).map_err(|e| HarnessError::Transport(format!("bind {addr}: {e}")))?;
    on_ready(
        listener
            .local_addr()
            .map_err(|e| HarnessError::Transport(e.to_string()))?,
    );
    let mut digests = Vec::new();
    let mut first_error = None;
    tcp::serve(
        &listener,
        &cfg.adversary,
        Some(cfg.trials as usize),
        &mut |outcome| match outcome {
            Ok(t) => digests.push(t.digest()),
            Err(e) => {
                log::warn!("session failed: {e}");
                first_error.get_or_insert(e);
            }
        },
    )?;
    if let Some(e) = first_error {
        return Err(e.into());
    }
    let mut report = Report::new(Command::Serve.name(), cfg);
    report.details = json!({ "sessions": digests.len() });
    report.digests = digests;
    Ok(report)
}

/// Every assignment of the 8 angles to `n` vertices, in lexicographic order.
fn assignments(n: usize) -> impl Iterator<Item = Vec<Angle>> {
    (0..8usize.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let a = Angle::ALL[code % 8];
                code /= 8;
                a
            })
            .collect()
    })
}

/// Exact view distributions for every φ-assignment of the template's measured
/// vertices, compared pairwise.
pub fn blindness(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    in_process_only(cfg, Command::Blindness)?;
    let pattern = match workload(cfg)? {
        Workload::Plain(p) => *p,
        Workload::Trapped(_) => {
            return Err(HarnessError::Config(
                "blindness takes a canned pattern such as rotation:1".into(),
            ))
        }
    };
    let measured = pattern.order().to_vec();
    let count = 8usize
        .checked_pow(measured.len() as u32)
        .filter(|&c| c <= MAX_ASSIGNMENTS);
    let Some(count) = count else {
        return Err(HarnessError::Config(format!(
            "{} measured vertices exceed the {MAX_ASSIGNMENTS}-assignment limit",
            measured.len()
        )));
    };
    let views = assignments(measured.len())
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|angles| {
            let phi = measured.iter().copied().zip(angles).collect();
            Ok(view_distribution(&pattern, &phi, DEFAULT_BOUND)?)
        })
        .collect::<Result<Vec<Distribution>, HarnessError>>()?;
    let max_tv = (0..count)
        .into_par_iter()
        .map(|i| views.iter().map(|v| views[i].tv_distance(v)).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max);
    let mut report = Report::new(Command::Blindness.name(), cfg);
    report.details = json!({
        "measured": measured.len(),
        "assignments": count,
        "pairs": count * count,
        "max_tv": max_tv,
        "views_per_assignment": views.first().map_or(0, Distribution::len),
    });
    Ok(report)
}

/// Accept-wrong and detection rates for trap counts `0..=n_traps`. Counts the
/// template cannot hold are skipped.
pub fn detect(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    in_process_only(cfg, Command::Detect)?;
    let template = trap_template(cfg)?;
    let label = cfg.adversary.label();
    let mut report = Report::new(Command::Detect.name(), cfg);
    let mut skipped = Vec::new();
    for t in 0..=cfg.n_traps {
        let placement = Placement::Random(t);
        let wrong = match accept_wrong_probability(&cfg.adversary, template, &placement, cfg.trials, cfg.seed) {
            Err(TrapError::Insufficient { .. } | TrapError::Layout(_)) => {
                skipped.push(t);
                continue;
            }
            other => other?,
        };
        let detected = detection_probability(&cfg.adversary, template, &placement, cfg.trials, cfg.seed)?;
        for (name, estimate) in [("accept_wrong", wrong), ("detect", detected)] {
            let mut row = Row::new(name, estimate);
            row.adversary = Some(label.clone());
            row.n_traps = Some(t);
            report.estimates.push(row);
        }
    }
    report.details = json!({ "template": template.to_string(), "skipped_n_traps": skipped });
    Ok(report)
}

/// Accept-wrong rate of the `k`-run protocol for `k` = 1, 2, 4, ... up to the
/// configured `k`, against the single-run rate raised to the `k`.
pub fn amplify(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    in_process_only(cfg, Command::Amplify)?;
    let template = trap_template(cfg)?;
    let placement = Placement::Random(cfg.n_traps);
    let label = cfg.adversary.label();
    let single = accept_wrong_probability(&cfg.adversary, template, &placement, cfg.trials, cfg.seed)?;
    let mut report = Report::new(Command::Amplify.name(), cfg);
    let mut single_row = Row::new("single_run", single);
    single_row.adversary = Some(label.clone());
    single_row.n_traps = Some(cfg.n_traps);
    report.estimates.push(single_row);
    let ks: Vec<usize> = std::iter::successors(Some(1usize), |k| k.checked_mul(2))
        .take_while(|&k| k <= cfg.k)
        .collect();
    let mut curve = Vec::new();
    for &k in &ks {
        let e = amplified_accept_wrong(k, &cfg.adversary, template, &placement, cfg.trials, cfg.seed)?;
        curve.push(e.estimate);
        let mut row = Row::new("accept_wrong", e);
        row.adversary = Some(label.clone());
        row.n_traps = Some(cfg.n_traps);
        row.k = Some(k);
        row.reference = Some(single.estimate.powi(k as i32));
        report.estimates.push(row);
    }
    report.details = json!({
        "template": template.to_string(),
        "p_single": single.estimate,
        "strictly_decreasing": curve.windows(2).all(|w| w[1] < w[0]),
    });
    Ok(report)
}
