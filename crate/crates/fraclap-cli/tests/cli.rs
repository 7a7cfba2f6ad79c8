//! End-to-end tests of the binary: exit codes, error wording, file outputs,
//! config-file precedence, and byte-level determinism of repeated runs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fraclap");

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn help_lists_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    for sub in [
        "kernel",
        "op",
        "solve-linear",
        "solve-variational",
        "branch",
        "examples",
        "verify-all",
    ] {
        assert!(text.contains(sub), "help is missing {sub}:\n{text}");
    }
}

#[test]
fn rejects_fractional_order_outside_the_open_interval() {
    let dir = tempfile::tempdir().unwrap();
    for s in ["0", "1", "1.5", "-0.5"] {
        let out = run_in(dir.path(), &["kernel", "dump", "--s", s]);
        assert_eq!(out.status.code(), Some(1), "s = {s} must be rejected");
        let err = stderr_of(&out);
        assert!(err.contains("0 < s < 1"), "unexpected message for s = {s}: {err}");
    }
}

#[test]
fn rejects_supercritical_exponent_with_the_bound_spelled_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["solve-variational", "--s", "0.25", "--p", "3", "--lambda", "-1"],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("p < 3"), "bound missing from: {err}");
    assert!(err.contains("variational"), "module missing from: {err}");
}

#[test]
fn kernel_dump_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = run_in(
            dir.path(),
            &["kernel", "dump", "--s", "0.5", "--resolution", "128", "--out", name],
        );
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn branch_csv_is_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = run_in(
            dir.path(),
            &["branch", "--s", "0.5", "--k", "1", "--f", "u3", "--out", name],
        );
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,amplitude,period,residual"));
    let first: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    // k = 1, s = 1/2 branches off at lambda = 1/2.
    assert!((first[0] - 0.5).abs() < 1e-4, "onset lambda {}", first[0]);
    assert!(text.lines().count() > 10);
}

#[test]
fn custom_nonlinearity_is_parsed_and_bad_forms_are_named() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["branch", "--s", "0.5", "--f", "custom:0.0,1.0", "--out", "c.csv"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(dir.path().join("c.csv").exists());

    let bad = run_in(dir.path(), &["branch", "--s", "0.5", "--f", "u5"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr_of(&bad).contains("custom:<c2>,<c3>"));
}

#[test]
fn op_apply_spectral_matches_the_symbol() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("u.json"),
        r#"{"n_modes": 2, "a": [0.0, 1.0, 0.0], "b": [0.0, 0.0, 2.0]}"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["op", "apply", "--s", "0.5", "--in", "u.json", "--out", "v.json"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    // Multipliers at s = 1/2 are k, so cos x keeps weight 1 and sin 2x doubles.
    assert_eq!(v["a"][1], 1.0);
    assert_eq!(v["b"][2], 4.0);
}

#[test]
fn op_apply_backends_agree_on_a_smooth_field() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("u.json"),
        r#"{"n_modes": 3, "a": [0.5, 1.0, 0.3, 0.1], "b": [0.0, 0.2, 0.1, 0.05]}"#,
    )
    .unwrap();
    for (backend, out_name) in [("spectral", "s.json"), ("quadrature", "q.json")] {
        let out = run_in(
            dir.path(),
            &[
                "op", "apply", "--s", "0.75", "--in", "u.json", "--backend", backend, "--out",
                out_name,
            ],
        );
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    let s: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    let q: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("q.json")).unwrap()).unwrap();
    for j in 0..=3 {
        for part in ["a", "b"] {
            let d = (s[part][j].as_f64().unwrap() - q[part][j].as_f64().unwrap()).abs();
            assert!(d < 1e-6, "{part}[{j}] differs by {d}");
        }
    }
}

#[test]
fn solve_linear_writes_the_resolvent_report() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("f.json"),
        r#"{"n_modes": 1, "a": [0.0, 1.0], "b": [0.0, 0.0]}"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["solve-linear", "--s", "0.5", "--rhs", "f.json", "--out", "sol.json"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let sol: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sol.json")).unwrap()).unwrap();
    // (L + 1)^{-1} cos x = cos x / 2 at s = 1/2.
    assert_eq!(sol["solution"]["a"][1], 0.5);
    assert_eq!(sol["eigenvalue_errors"].as_array().unwrap().len(), 9);
}

#[test]
fn config_file_supplies_defaults_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"s": 0.5, "resolution": 64, "out": "from-config.csv"}"#,
    )
    .unwrap();
    // No --s on the command line: the config file supplies it.
    let out = run_in(dir.path(), &["--config", "cfg.json", "kernel", "dump"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let from_config = fs::read_to_string(dir.path().join("from-config.csv")).unwrap();
    assert_eq!(from_config.lines().count(), 64); // header + 63 nodes

    // An explicit flag wins over the file value.
    let out = run_in(
        dir.path(),
        &["--config", "cfg.json", "kernel", "dump", "--resolution", "32", "--out", "flag.csv"],
    );
    assert!(out.status.success(), "{}", stderr_of(&out));
    let overridden = fs::read_to_string(dir.path().join("flag.csv")).unwrap();
    assert_eq!(overridden.lines().count(), 32);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"s": 0.5, "sigma": 2.0}"#).unwrap();
    let out = run_in(dir.path(), &["--config", "cfg.json", "kernel", "dump"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("sigma"));
}

#[test]
fn missing_required_parameter_names_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["kernel", "dump"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("--s"));
}

#[test]
fn examples_rejects_an_unknown_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["examples", "run", "--which", "9.9"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_of(&out);
    assert!(err.contains("7.1") && err.contains("bo"), "{err}");
}

#[test]
fn small_amplitude_example_writes_waves_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["examples", "run", "--which", "7.1", "--out-dir", "ex"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let summary = fs::read_to_string(dir.path().join("ex/7_1_summary.csv")).unwrap();
    assert_eq!(summary.lines().next(), Some("family,s,p,period,amplitude,residual"));
    assert_eq!(summary.lines().count(), 3);
    for wave in ["7_1_wave_a.json", "7_1_wave_b.json"] {
        let w: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("ex").join(wave)).unwrap())
                .unwrap();
        assert_eq!(w["family"], "even-power");
        assert!(w["residual"].as_f64().unwrap() < 1e-5);
    }
}
