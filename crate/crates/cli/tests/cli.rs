#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command as Proc;

use chainscope::config::{Command, Format, Grid, RunConfig, Source, DEFAULT_CAP};
use chainscope::format::{write_system, Scalar};
use chainscope_core::entropy::{entropy_estimate, CountLimits};
use chainscope_core::{Dyadic, NodeSet};
use common::{random_system, SeedableRng, TestRng};

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_chainscope"))
}

#[test]
fn report_matches_library_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = TestRng::seed_from_u64(5);
    for case in 0..6 {
        let sys = random_system(&mut rng, 4 + case, case % 2 == 1);
        let path = dir.path().join(format!("sys{case}.json"));
        std::fs::write(&path, write_system(&sys).unwrap()).unwrap();
        let grid = r#"{"r":[[1,4]],"delta":[[1,5]],"n":[1,2,3,4]}"#;
        let out = bin()
            .args(["entropy", "--system", path.to_str().unwrap(), "--grid", grid, "--seed", "3"])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

        let cfg = RunConfig {
            command: Command::Entropy,
            source: Source::File(path.to_str().unwrap().into()),
            grid: Grid { r: vec![Scalar(1, 4)], delta: vec![Scalar(1, 5)], n: vec![1, 2, 3, 4], ..Grid::default() },
            exact_cap: 4096,
            cap: DEFAULT_CAP,
            seed: 3,
            format: Format::Json,
            out: None,
        };
        let text = chainscope::render(&cfg, &chainscope::run(&cfg).unwrap()).unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), text);

        let report: serde_json::Value = serde_json::from_str(&text).unwrap();
        let direct =
            entropy_estimate(&sys, &NodeSet::full(sys.size()), Dyadic::new(1, 4), &[1, 2, 3, 4], &CountLimits::default())
                .unwrap();
        let cell = &report["result"]["cells"][0];
        assert_eq!(cell["kind"], "orbit");
        let counts: Vec<u64> = cell["counts"].as_array().unwrap().iter().map(|c| c["count"].as_u64().unwrap()).collect();
        assert_eq!(counts, direct.counts.iter().map(|c| c.count as u64).collect::<Vec<_>>());
    }
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("odo.csv");
    let status = bin()
        .args(["entropy", "--builder", "odometer", "--params", r#"{"m":[2,4]}"#, "--format", "csv", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,r,delta,n,count,log_count,exact"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shift.json");
    let out = bin().args(["export", "--builder", "full_shift", "--params", r#"{"depth":2}"#]).output().unwrap();
    assert!(out.status.success());
    std::fs::write(&path, &out.stdout).unwrap();
    let again = bin().args(["export", "--system", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str], cap: Option<&str>| {
        let mut p = bin();
        p.args(args);
        if let Some(c) = cap {
            p.env("CHAINSCOPE_CAP", c);
        }
        p.output().unwrap().status.code()
    };
    assert_eq!(code(&["odometer"], None), Some(0));
    assert_eq!(code(&["entropy"], None), Some(2));
    assert_eq!(code(&["entropy", "--builder", "nosuch"], None), Some(2));
    assert_eq!(code(&["entropy", "--system", "/nonexistent.json"], None), Some(2));
    assert_eq!(code(&["components", "--builder", "odometer", "--grid", r#"{"delta":[[1,2],[1,4],[1,3]]}"#], None), Some(2));
    assert_eq!(code(&["entropy", "--builder", "full_shift"], Some("16")), Some(3));
}
