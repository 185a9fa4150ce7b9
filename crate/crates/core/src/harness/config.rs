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

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::adversary::ServerBehavior;

/// Where the server runs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TransportSpec {
    #[default]
    InProcess,
    /// `host:port` of a `blindqc serve` instance.
    Tcp(String),
}

impl FromStr for TransportSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "inproc" => Ok(TransportSpec::InProcess),
            Some(("tcp", addr))
                if addr
                    .rsplit_once(':')
                    .is_some_and(|(h, p)| !h.is_empty() && p.parse::<u16>().is_ok()) =>
            {
                Ok(TransportSpec::Tcp(addr.to_string()))
            }
            _ => Err(HarnessError::Config(format!(
                "transport {s:?} is neither \"inproc\" nor \"tcp:host:port\""
            ))),
        }
    }
}

impl TryFrom<String> for TransportSpec {
    type Error = HarnessError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<TransportSpec> for String {
    fn from(t: TransportSpec) -> String {
        t.to_string()
    }
}

impl fmt::Display for TransportSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransportSpec::InProcess => f.write_str("inproc"),
            TransportSpec::Tcp(addr) => write!(f, "tcp:{addr}"),
        }
    }
}

/// One experiment, as a JSON document. Missing fields take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `line:N` or `square` for trap runs, or a canned pattern name.
    pub template: String,
    pub n_traps: usize,
    pub adversary: ServerBehavior,
    pub trials: u64,
    /// Repetitions; `amplify` sweeps the powers of two up to this value.
    pub k: usize,
    pub seed: u64,
    pub transport: TransportSpec,
    pub out: Option<PathBuf>,
    /// Include elapsed time in the report, which makes reports differ between runs.
    pub wall_clock: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            template: "line:4".into(),
            n_traps: 1,
            adversary: ServerBehavior::Honest,
            trials: 1000,
            k: 1,
            seed: 0,
            transport: TransportSpec::InProcess,
            out: None,
            wall_clock: false,
        }
    }
}

/// Command-line values that replace config fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub template: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub traps: Option<usize>,
    pub k: Option<usize>,
    /// Behavior JSON, or a bare kind such as `honest`.
    pub adversary: Option<String>,
    pub transport: Option<String>,
    pub out: Option<PathBuf>,
}

/// Parses a behavior from JSON or from a bare kind name.
pub fn parse_adversary(text: &str) -> Result<ServerBehavior, HarnessError> {
    let text = text.trim();
    let json = if text.starts_with('{') {
        text.to_string()
    } else {
        serde_json::json!({ "kind": text }).to_string()
    };
    serde_json::from_str(&json).map_err(|e| HarnessError::Config(format!("adversary {text:?}: {e}")))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        ExperimentConfig::from_json(&text)
    }

    pub fn apply(&mut self, o: Overrides) -> Result<(), HarnessError> {
        if let Some(t) = o.template {
            self.template = t;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(t) = o.trials {
            self.trials = t;
        }
        if let Some(t) = o.traps {
            self.n_traps = t;
        }
        if let Some(k) = o.k {
            self.k = k;
        }
        if let Some(a) = o.adversary {
            self.adversary = parse_adversary(&a)?;
        }
        if let Some(t) = o.transport {
            self.transport = t.parse()?;
        }
        if let Some(out) = o.out {
            self.out = Some(out);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(HarnessError::Config("k must be at least 1".into()));
        }
        self.adversary
            .validate()
            .map_err(|e| HarnessError::Config(format!("adversary: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{AttackTarget, Pauli};

    #[test]
    fn defaults_fill_missing_fields() {
        let c = ExperimentConfig::from_json(r#"{"trials": 5, "transport": "tcp:127.0.0.1:7000"}"#).unwrap();
        assert_eq!(c.trials, 5);
        assert_eq!(c.template, "line:4");
        assert_eq!(c.transport, TransportSpec::Tcp("127.0.0.1:7000".into()));
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn unknown_fields_and_bad_transports_are_config_errors() {
        assert!(matches!(
            ExperimentConfig::from_json(r#"{"trails": 5}"#),
            Err(HarnessError::Config(_))
        ));
        for bad in ["tcp", "tcp:host", "tcp::80", "udp:a:1", "tcp:a:99999"] {
            assert!(bad.parse::<TransportSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn flags_override_the_document() {
        let mut c = ExperimentConfig::default();
        c.apply(Overrides {
            seed: Some(9),
            traps: Some(2),
            adversary: Some(r#"{"kind":"pauli_at","pauli":"Z","target":"random"}"#.into()),
            ..Overrides::default()
        })
        .unwrap();
        assert_eq!((c.seed, c.n_traps), (9, 2));
        assert_eq!(
            c.adversary,
            ServerBehavior::PauliAt {
                pauli: Pauli::Z,
                target: AttackTarget::Random
            }
        );
        assert_eq!(parse_adversary("honest").unwrap(), ServerBehavior::Honest);
        assert!(parse_adversary("sneaky").is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig {
            trials: 0,
            ..ExperimentConfig::default()
        };
        assert!(c.validate().is_err());
        c.trials = 1;
        c.adversary = ServerBehavior::RandomPauliEach { p: 2.0 };
        assert!(c.validate().is_err());
    }
}
