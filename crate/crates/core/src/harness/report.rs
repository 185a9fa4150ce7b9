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

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, HarnessError};
use crate::stats::Estimate;

/// Version tag carried by every report.
pub const REPORT_SCHEMA: &str = "blindqc.report/1";

/// One estimated quantity, possibly one point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversary: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_traps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(flatten)]
    pub estimate: Estimate,
    /// Reference value the estimate is compared against, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
}

impl Row {
    pub fn new(name: &str, estimate: Estimate) -> Row {
        Row {
            name: name.into(),
            adversary: None,
            n_traps: None,
            k: None,
            estimate,
            reference: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub estimates: Vec<Row>,
    /// Command-specific results.
    pub details: serde_json::Value,
    /// Transcript digest of every session, by session index.
    pub digests: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_s: Option<f64>,
}

impl Report {
    pub fn new(command: &str, config: &ExperimentConfig) -> Report {
        Report {
            schema: REPORT_SCHEMA.into(),
            command: command.into(),
            config: config.clone(),
            estimates: Vec::new(),
            details: serde_json::Value::Null,
            digests: Vec::new(),
            wall_clock_s: None,
        }
    }

    /// The report as one line of JSON.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn to_csv(&self, with_header: bool) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        if with_header {
            w.write_record(CSV_HEADER).expect("in-memory write");
        }
        for r in &self.estimates {
            let opt = |v: Option<String>| v.unwrap_or_default();
            w.write_record([
                self.command.clone(),
                r.name.clone(),
                opt(r.adversary.clone()),
                opt(r.n_traps.map(|t| t.to_string())),
                opt(r.k.map(|k| k.to_string())),
                r.estimate.successes.to_string(),
                r.estimate.trials.to_string(),
                r.estimate.estimate.to_string(),
                r.estimate.ci_low.to_string(),
                r.estimate.ci_high.to_string(),
                opt(r.reference.map(|x| x.to_string())),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Appends the report to `path` as one JSON line and, when `csv` is set,
    /// its rows to the sibling `.csv` file. Returns the CSV path if written.
    pub fn append_to(&self, path: &Path, csv: bool) -> Result<Option<PathBuf>, HarnessError> {
        append(path, &(self.to_json_line() + "\n"))?;
        if !csv {
            return Ok(None);
        }
        let csv_path = path.with_extension("csv");
        let fresh = std::fs::metadata(&csv_path).map(|m| m.len() == 0).unwrap_or(true);
        append(&csv_path, &self.to_csv(fresh))?;
        Ok(Some(csv_path))
    }
}

const CSV_HEADER: [&str; 11] = [
    "command",
    "name",
    "adversary",
    "n_traps",
    "k",
    "successes",
    "trials",
    "estimate",
    "ci_low",
    "ci_high",
    "reference",
];

fn append(path: &Path, text: &str) -> Result<(), HarnessError> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    f.write_all(text.as_bytes())
        .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Z_95;

    fn sample() -> Report {
        let mut r = Report::new("detect", &ExperimentConfig::default());
        let mut row = Row::new("accept_wrong", Estimate::wilson(25, 100, Z_95));
        row.adversary = Some(r#"{"kind":"honest"}"#.into());
        row.n_traps = Some(1);
        r.estimates.push(row);
        r
    }

    #[test]
    fn json_round_trips_and_omits_wall_clock() {
        let r = sample();
        let line = r.to_json_line();
        assert!(!line.contains("wall_clock_s"));
        assert!(line.starts_with(r#"{"schema":"blindqc.report/1""#));
        assert_eq!(serde_json::from_str::<Report>(&line).unwrap(), r);
    }

    #[test]
    fn csv_quotes_json_cells() {
        let csv = sample().to_csv(true);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert!(lines
            .next()
            .unwrap()
            .starts_with(r#"detect,accept_wrong,"{""kind"":""honest""}",1,,25,100,0.25,"#));
    }

    #[test]
    fn appending_writes_one_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let r = sample();
        r.append_to(&path, true).unwrap();
        r.append_to(&path, true).unwrap();
        let json = std::fs::read_to_string(&path).unwrap();
        assert_eq!(json.lines().count(), 2);
        let csv = std::fs::read_to_string(path.with_extension("csv")).unwrap();
        assert_eq!(csv.lines().count(), 3);
    }
}
