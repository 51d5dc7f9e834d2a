//! Replays the checked-in fuzz corpus through the fuzz target bodies.

use std::fs;
use std::path::Path;

#[path = "../../../fuzz/harness.rs"]
mod harness;

type Target = (&'static str, fn(&[u8]));

const TARGETS: [Target; 7] = [
    ("moment_spec", harness::moment_spec),
    ("measure", harness::measure),
    ("rational", harness::rational),
    ("precision_flags", harness::precision_flags),
    ("scalar_json", harness::scalar_json),
    ("triangular_json", harness::triangular_json),
    ("experiment_config", harness::experiment_config),
];

#[test]
fn corpus_seeds_replay_cleanly() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    for (name, body) in TARGETS {
        let dir = root.join(name);
        let mut count = 0;
        for entry in fs::read_dir(&dir).unwrap_or_else(|e| panic!("{}: {e}", dir.display())) {
            let path = entry.unwrap().path();
            body(&fs::read(&path).unwrap());
            count += 1;
        }
        assert!(count > 0, "no seeds for {name}");
    }
}

#[test]
fn every_target_has_a_binary() {
    let targets = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/fuzz_targets");
    for (name, _) in TARGETS {
        assert!(targets.join(format!("{name}.rs")).exists(), "{name}");
    }
}
