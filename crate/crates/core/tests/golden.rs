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

//! Server views of fixed-seed sessions, compared byte for byte with files in
//! `tests/golden`. Set `BLINDQC_BLESS=1` to rewrite them.

use std::path::PathBuf;

use blindqc::adversary::{AttackTarget, Pauli, ServerBehavior};
use blindqc::mbqc::templates;
use blindqc::protocol::{run_in_process, ClientSecrets, DelegatedJob, SessionSeeds, StreamRole};
use blindqc::trap::{embed_traps, TrapLayout, TrapTemplate};

fn trapped(template: TrapTemplate, behavior: &ServerBehavior, seeds: SessionSeeds) -> String {
    let mut rng = seeds.rng(StreamRole::Client);
    let blinded = embed_traps(template, 1, &mut rng).unwrap();
    let job = blinded.job().unwrap();
    let secrets = ClientSecrets::sample(&job, blinded.layout.clone(), &mut rng);
    run_in_process(&job, &secrets, behavior, seeds).unwrap().1.to_ndjson()
}

fn plain(name: &str, seeds: SessionSeeds) -> String {
    let job = DelegatedJob::plain(templates::by_name(name).unwrap());
    let secrets = ClientSecrets::sample(&job, TrapLayout::default(), &mut seeds.rng(StreamRole::Client));
    run_in_process(&job, &secrets, &ServerBehavior::Honest, seeds)
        .unwrap()
        .1
        .to_ndjson()
}

fn compare(file: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(file);
    if std::env::var_os("BLINDQC_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{file} changed");
}

#[test]
fn honest_line() {
    let t = trapped(
        TrapTemplate::Line(4),
        &ServerBehavior::Honest,
        SessionSeeds::new(2026, 3),
    );
    compare("line4_honest.ndjson", &t);
}

#[test]
fn z_attack_on_the_square() {
    let z = ServerBehavior::PauliAt {
        pauli: Pauli::Z,
        target: AttackTarget::Random,
    };
    let t = trapped(TrapTemplate::Square, &z, SessionSeeds::new(2026, 5));
    compare("square_z_random.ndjson", &t);
}

#[test]
fn plain_rotation() {
    compare(
        "rotation_1_2.ndjson",
        &plain("rotation:1,2", SessionSeeds::new(2026, 7)),
    );
}
