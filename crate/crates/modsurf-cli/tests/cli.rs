//! End-to-end checks of the command-line surface: reproducibility of the
//! deterministic artifacts, exit-code discipline, cache and ledger files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_modsurf"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("modsurf-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().expect("binary runs")
}

#[test]
fn rerun_is_byte_identical_across_worker_counts() {
    let dir = tmp_dir("determinism");
    let base = [
        "var-random",
        "--L",
        "2",
        "--R",
        "0.1",
        "--n",
        "400",
        "--seed",
        "11",
        "--step",
        "0.5",
        "--ledger-dir",
        "none",
    ];
    let mut outputs = Vec::new();
    for (idx, workers) in ["1", "3", "8"].iter().enumerate() {
        let out_file = dir.join(format!("run{idx}.json"));
        let mut args: Vec<&str> = base.to_vec();
        let out_str = out_file.to_str().unwrap().to_string();
        let leaked: &'static str = Box::leak(out_str.into_boxed_str());
        args.extend_from_slice(&["--workers", workers, "--out", leaked]);
        let out = run(&args, &dir);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&out_file).unwrap());
    }
    // worker count appears in the config echo; payloads must be identical
    let payload = |bytes: &[u8]| -> serde_json::Value {
        let v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
        v["payload"].clone()
    };
    let first = payload(&outputs[0]);
    for other in &outputs[1..] {
        assert_eq!(first, payload(other), "payload differs across worker counts");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn identical_flags_give_identical_bytes() {
    let dir = tmp_dir("bytes");
    for name in ["a.json", "b.json"] {
        let out = run(
            &[
                "expect",
                "--D",
                "5",
                "--R",
                "0.1",
                "--n",
                "300",
                "--seed",
                "3",
                "--workers",
                "2",
                "--ledger-dir",
                "none",
                "--out",
                name,
            ],
            &dir,
        );
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.join("a.json")).unwrap();
    let b = std::fs::read(dir.join("b.json")).unwrap();
    assert_eq!(a, b, "reruns with identical flags must be byte-identical");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gfun_table_and_ledger() {
    let dir = tmp_dir("gfun");
    let out = run(
        &["gfun", "--points", "40", "--out", "g.csv", "--ledger-dir", "ledg"],
        &dir,
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("g.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("w,G,G_prime,asymptotic_ratio"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[1], "1", "G(0) = 1 row");
    // monotone nonincreasing G column
    let mut prev = f64::INFINITY;
    for line in csv.lines().skip(1) {
        let g: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(g <= prev + 1e-14);
        prev = g;
    }
    let ledger = std::fs::read_to_string(dir.join("ledg").join("ledger.jsonl")).unwrap();
    assert_eq!(ledger.lines().count(), 1);
    let record: serde_json::Value = serde_json::from_str(ledger.lines().next().unwrap()).unwrap();
    assert_eq!(record["command"], "gfun");
    assert!(record["wall_ms"].as_f64().unwrap() >= 0.0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn forms_writes_cache_and_reports_class_number() {
    let dir = tmp_dir("forms");
    let out = run(
        &["forms", "--D", "1297", "--format", "csv", "--ledger-dir", "none"],
        &dir,
    );
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let row = stdout.lines().nth(1).unwrap();
    assert!(row.starts_with("1297,11,true,"), "unexpected row: {row}");
    let cache: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("cache/D1297.json")).unwrap())
            .unwrap();
    assert_eq!(cache["h_plus"], 11);
    assert_eq!(cache["cycles"].as_array().unwrap().len(), 11);
    // cache rewrite is byte-stable
    let before = std::fs::read(dir.join("cache/D1297.json")).unwrap();
    assert!(run(&["forms", "--D", "1297", "--ledger-dir", "none"], &dir).status.success());
    let after = std::fs::read(dir.join("cache/D1297.json")).unwrap();
    assert_eq!(before, after);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn svg_plot_is_well_formed_with_one_group_per_class() {
    let dir = tmp_dir("svg");
    let out = run(&["plot-geodesics", "--D", "5", "--out", "d5.svg", "--ledger-dir", "none"], &dir);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(dir.join("d5.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("class=\"geodesic-class\"").count(), 1, "h+ = 1 for D = 5");
    assert_eq!(svg.matches("<g").count(), svg.matches("</g>").count());

    // non-fundamental discriminants are rejected
    let bad = run(&["plot-geodesics", "--D", "45", "--out", "x.svg", "--ledger-dir", "none"], &dir);
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes_and_usage() {
    let dir = tmp_dir("exit");
    let bad = run(&["definitely-not-a-command"], &dir);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("Usage"));

    let missing = run(&["var-random", "--L", "2", "--ledger-dir", "none"], &dir);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing required value"));

    let help = run(&["--help"], &dir);
    assert_eq!(help.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tmp_dir("config");
    std::fs::write(
        dir.join("lab.conf"),
        "R = 0.1\nn = 300\nseed = 5\nworkers = 2\nstep = 0.5\nL = 2 # flags beat this\n",
    )
    .unwrap();
    let from_config = run(
        &["var-random", "--config", "lab.conf", "--ledger-dir", "none", "--out", "c.json"],
        &dir,
    );
    assert!(
        from_config.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&from_config.stderr)
    );
    let c: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("c.json")).unwrap()).unwrap();
    assert_eq!(c["config"]["segment_len"], 2.0);

    let overridden = run(
        &[
            "var-random",
            "--config",
            "lab.conf",
            "--L",
            "3",
            "--ledger-dir",
            "none",
            "--out",
            "d.json",
        ],
        &dir,
    );
    assert!(overridden.status.success());
    let d: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("d.json")).unwrap()).unwrap();
    assert_eq!(d["config"]["segment_len"], 3.0);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn var_closed_reports_conjecture_without_asserting() {
    let dir = tmp_dir("closed");
    let out = run(
        &[
            "var-closed",
            "--D",
            "5",
            "--R",
            "0.1",
            "--n",
            "200",
            "--seed",
            "9",
            "--workers",
            "2",
            "--ledger-dir",
            "none",
            "--out",
            "vc.json",
        ],
        &dir,
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("vc.json")).unwrap()).unwrap();
    assert_eq!(v["payload"]["conjecture_comparison_only"], true);
    assert!(v["payload"]["estimate"]["prediction"].as_f64().unwrap() > 0.0);
    assert!(v["payload"]["estimate"]["z_score"].is_number());
    std::fs::remove_dir_all(&dir).ok();
}
