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

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn blindqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blindqc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port()
}

#[test]
fn fixed_seed_reports_are_byte_identical() {
    let args = ["run", "--seed", "42", "--trials", "50", "--traps", "1"];
    let a = blindqc(&args);
    let b = blindqc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r["schema"], "blindqc.report/1");
    assert_eq!(r["digests"].as_array().unwrap().len(), 50);
    assert!(r.get("wall_clock_s").is_none());
}

#[test]
fn one_qubit_blindness_is_exact() {
    let r = report(&blindqc(&["blindness", "--template", "rotation:3", "--traps", "0"]));
    assert_eq!(r["details"]["pairs"], 64);
    assert!(r["details"]["max_tv"].as_f64().unwrap() < 1e-12);
}

#[test]
fn detect_appends_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("detect.jsonl");
    let config = dir.path().join("cfg.json");
    std::fs::write(
        &config,
        r#"{"template": "line:4", "adversary": {"kind": "pauli_at", "pauli": "Z", "target": "random"}, "trials": 4000}"#,
    )
    .unwrap();
    let args = [
        "detect",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    for _ in 0..2 {
        assert!(blindqc(&args).status.success());
    }
    let lines: Vec<Value> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], lines[1]);
    let detect = lines[0]["estimates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "detect" && r["n_traps"] == 1)
        .unwrap();
    let p = detect["estimate"].as_f64().unwrap();
    assert!((p - 0.25).abs() < 0.03, "{p}");
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("command,")).count(), 1);
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
}

#[test]
fn serve_and_client_agree_with_in_process_runs() {
    let transport = format!("tcp:127.0.0.1:{}", free_port());
    let mut server = Command::new(env!("CARGO_BIN_EXE_blindqc"))
        .args(["serve", "--transport", &transport, "--trials", "20"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(server.stderr.take().unwrap());
    let mut ready = String::new();
    stderr.read_line(&mut ready).unwrap();
    assert!(ready.starts_with("listening on"), "{ready}");
    let client = report(&blindqc(&[
        "client",
        "--transport",
        &transport,
        "--trials",
        "20",
        "--seed",
        "9",
    ]));
    let mut served = String::new();
    std::io::Read::read_to_string(&mut server.stdout.take().unwrap(), &mut served).unwrap();
    assert!(server.wait().unwrap().success());
    let served: Value = serde_json::from_str(&served).unwrap();
    let local = report(&blindqc(&["run", "--trials", "20", "--seed", "9"]));
    assert_eq!(client["digests"], served["digests"]);
    assert_eq!(client["digests"], local["digests"]);
}

#[test]
fn exit_codes_name_the_failure() {
    assert_eq!(blindqc(&["run", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(blindqc(&["run", "--adversary", "sneaky"]).status.code(), Some(2));
    assert_eq!(
        blindqc(&["run", "--config", "/nonexistent/cfg.json"]).status.code(),
        Some(2)
    );
    let refused = format!("tcp:127.0.0.1:{}", free_port());
    assert_eq!(
        blindqc(&["client", "--transport", &refused, "--trials", "1"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn a_server_breaking_the_protocol_aborts_the_client() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let fake = std::thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut writer = stream;
        let mut line = String::new();
        while reader.read_line(&mut line).unwrap() > 0 {
            if line.contains("measure_instruction") {
                writer.write_all(b"{\"type\":\"result_claim\",\"bits\":[]}\n").unwrap();
                break;
            }
            line.clear();
        }
    });
    let out = blindqc(&["client", "--transport", &format!("tcp:{addr}"), "--trials", "1"]);
    fake.join().unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}
