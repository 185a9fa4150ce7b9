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

//! Python bindings. Behaviors and configs cross the boundary as JSON text;
//! distributions come back as dicts keyed by bit strings.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use blindqc_core::adversary::ServerBehavior;
use blindqc_core::harness::{self, Command, ExperimentConfig, HarnessError};
use blindqc_core::mbqc::{circuit_oracle, templates, MeasurementPattern};
use blindqc_core::protocol::{self, DelegatedJob};
use blindqc_core::stats::{Distribution, Estimate};
use blindqc_core::trap::{self, Placement, TrapLayout, TrapTemplate};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn harness_err(e: HarnessError) -> PyErr {
    match e {
        HarnessError::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn pattern(name: &str) -> PyResult<MeasurementPattern> {
    templates::by_name(name).map_err(value_err)
}

fn trap_template(name: &str) -> PyResult<TrapTemplate> {
    name.parse().map_err(value_err)
}

fn behavior(adversary: Option<&str>) -> PyResult<ServerBehavior> {
    let b = match adversary {
        Some(text) => harness::parse_adversary(text).map_err(harness_err)?,
        None => ServerBehavior::Honest,
    };
    b.validate().map_err(value_err)?;
    Ok(b)
}

fn as_dict(d: &Distribution) -> BTreeMap<String, f64> {
    d.iter()
        .map(|(bits, p)| (bits.iter().map(|b| char::from(b'0' + b)).collect(), p))
        .collect()
}

fn triple(e: Estimate) -> (f64, f64, f64) {
    (e.estimate, e.ci_low, e.ci_high)
}

/// Exact output distribution of a canned pattern, e.g. `"rotation:1,2"`.
#[pyfunction]
fn oracle(template: &str) -> PyResult<BTreeMap<String, f64>> {
    Ok(as_dict(&circuit_oracle(&pattern(template)?).map_err(value_err)?))
}

/// Exact output distribution of the delegated protocol on a canned pattern.
#[pyfunction]
#[pyo3(signature = (template, adversary=None))]
fn exact_output(template: &str, adversary: Option<&str>) -> PyResult<BTreeMap<String, f64>> {
    let job = DelegatedJob::plain(pattern(template)?);
    let d =
        protocol::exact_output_distribution(&job, &TrapLayout::default(), &behavior(adversary)?).map_err(value_err)?;
    Ok(as_dict(&d))
}

/// Exact acceptance probability with traps at `traps` on a `line:N` or `square` template.
#[pyfunction]
#[pyo3(signature = (template, traps, adversary=None, seed=0))]
fn exact_acceptance(template: &str, traps: Vec<u32>, adversary: Option<&str>, seed: u64) -> PyResult<f64> {
    let b = trap::embed_traps_at(trap_template(template)?, &traps, &mut ChaCha8Rng::seed_from_u64(seed))
        .map_err(value_err)?;
    let job = b.job().map_err(value_err)?;
    protocol::exact_acceptance(&job, &b.layout, &behavior(adversary)?).map_err(value_err)
}

/// Monte-Carlo P(reject) as `(estimate, ci_low, ci_high)`.
#[pyfunction]
#[pyo3(signature = (template, n_traps, adversary=None, trials=10_000, seed=0))]
fn detection_probability(
    template: &str,
    n_traps: usize,
    adversary: Option<&str>,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, f64, f64)> {
    let e = trap::detection_probability(
        &behavior(adversary)?,
        trap_template(template)?,
        &Placement::Random(n_traps),
        trials,
        seed,
    )
    .map_err(value_err)?;
    Ok(triple(e))
}

/// Monte-Carlo P(accept and wrong) as `(estimate, ci_low, ci_high)`; `k` > 1
/// uses the repeated protocol.
#[pyfunction]
#[pyo3(signature = (template, n_traps, adversary=None, trials=10_000, seed=0, k=1))]
fn accept_wrong_probability(
    template: &str,
    n_traps: usize,
    adversary: Option<&str>,
    trials: u64,
    seed: u64,
    k: usize,
) -> PyResult<(f64, f64, f64)> {
    if k == 0 {
        return Err(PyValueError::new_err("k must be at least 1"));
    }
    let (b, t, p) = (
        behavior(adversary)?,
        trap_template(template)?,
        Placement::Random(n_traps),
    );
    let e = if k == 1 {
        trap::accept_wrong_probability(&b, t, &p, trials, seed)
    } else {
        trap::amplified_accept_wrong(k, &b, t, &p, trials, seed)
    }
    .map_err(value_err)?;
    Ok(triple(e))
}

/// Runs a harness command (`run`, `blindness`, `detect`, `amplify`) on a JSON
/// config and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (command, config="{}"))]
fn run_experiment(command: &str, config: &str) -> PyResult<String> {
    let cmd = match command {
        "run" => Command::Run,
        "blindness" => Command::Blindness,
        "detect" => Command::Detect,
        "amplify" => Command::Amplify,
        other => return Err(PyValueError::new_err(format!("unsupported command {other:?}"))),
    };
    let cfg = ExperimentConfig::from_json(config).map_err(harness_err)?;
    Ok(harness::execute(cmd, &cfg).map_err(harness_err)?.to_json_line())
}

#[pymodule]
fn blindqc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(exact_output, m)?)?;
    m.add_function(wrap_pyfunction!(exact_acceptance, m)?)?;
    m.add_function(wrap_pyfunction!(detection_probability, m)?)?;
    m.add_function(wrap_pyfunction!(accept_wrong_probability, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
