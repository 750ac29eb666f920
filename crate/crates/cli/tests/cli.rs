use std::path::Path;
use std::process::{Command, Output};

use spinamp::{run_random_map, ExpParams, MapParams, Mode, ProtocolSpec, Scheme, TargetState};
use spinamp_cli::output::parse_trace_csv;

fn spinamp(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinamp"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SPINAMP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn cat_gate_reports_full_contrast() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinamp(
        &["run", "--scheme", "cat-gate", "--n", "3", "--target", "1"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("C = 2.000000000000"), "{}", stdout(&o));
    let out = dir.path().join("spinamp-out");
    assert!(out.join("cat-gate-n3.trace.csv").exists());
    assert!(out.join("cat-gate-n3.meta.json").exists());
}

#[test]
fn random_map_trace_parses_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinamp(
        &[
            "run",
            "--scheme",
            "random-map",
            "--n",
            "6",
            "--rmax",
            "40",
            "--out",
            "data",
            "--plot",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let bytes = std::fs::read(dir.path().join("data/random-map-n6.trace.csv")).unwrap();
    let text = String::from_utf8(bytes.clone()).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("r,Mz0,Mz1,contrast,Q0,Q1,fidelity")
    );
    assert_eq!(text.lines().count(), 41);

    let parsed = parse_trace_csv(&bytes, 6, 0.9).unwrap();
    let spec = ProtocolSpec::new(Scheme::RandomMap, 6, TargetState::One, Mode::Reduced);
    let direct = run_random_map(
        &spec,
        &MapParams::defaults(6, 40).unwrap(),
        0.9,
        &ExpParams::default(),
    )
    .unwrap();
    assert_eq!(parsed, direct);

    let plot = std::fs::read_to_string(dir.path().join("data/random-map-n6.plot.py")).unwrap();
    assert!(plot.contains("random-map-n6.trace.csv"));
}

#[test]
fn rerun_from_metadata_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinamp(
        &[
            "run", "--n", "5", "--rmax", "25", "--out", "a", "--name", "x",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    let o = spinamp(
        &["run", "--config", "a/x.meta.json", "--out", "b"],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let a = std::fs::read(dir.path().join("a/x.trace.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/x.trace.csv")).unwrap();
    assert_eq!(a, b);

    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("b/x.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["r_max"], 25);
    assert!(meta["version"].is_string());
    assert!(meta["timestamp"].is_string());
}

#[test]
fn invalid_config_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "--n", "20", "--out", "o"][..],
        &["run", "--rmax", "0", "--out", "o"],
        &["run", "--n", "4,5", "--out", "o"],
        &["sweep", "--scheme", "cat-gate", "--n", "3,4", "--out", "o"],
        &["run", "--first-spin", "9", "--n", "4", "--out", "o"],
        &["run", "--no-such-flag"],
    ] {
        let o = spinamp(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn validation_message_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinamp(&["run", "--rmax", "0"], dir.path());
    assert!(String::from_utf8_lossy(&o.stderr).contains("r_max"));
}

#[test]
fn computation_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinamp(
        &[
            "run",
            "--n",
            "4",
            "--rmax",
            "3",
            "--method",
            "krylov",
            "--krylov-dim",
            "2",
            "--tolerance",
            "1e-300",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn env_var_sets_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_spinamp"))
        .args(["run", "--scheme", "cnot-chain", "--n", "2"])
        .current_dir(dir.path())
        .env("SPINAMP_OUT_DIR", "from-env")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("from-env/cnot-chain-n2.trace.csv").exists());
}

#[test]
fn sweep_writes_table_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinamp(
        &[
            "sweep",
            "--n",
            "4,6,3",
            "--rmax",
            "60",
            "--threshold",
            "0.5",
            "--out",
            "s",
            "--plot",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let table = std::fs::read_to_string(dir.path().join("s/sweep-random-map.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next(),
        Some("n,N,r_star,contrast_sat,Q_sat,fidelity_sat")
    );
    let ns: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["3", "4", "6"]);
    for n in [3, 4, 6] {
        assert!(dir
            .path()
            .join(format!("s/sweep-random-map.n{n}.trace.csv"))
            .exists());
    }
    let fit: serde_json::Value = serde_json::from_slice(
        &std::fs::read(dir.path().join("s/sweep-random-map.fit.json")).unwrap(),
    )
    .unwrap();
    let reached = fit["sizes_reaching_threshold"].as_u64().unwrap();
    assert_eq!(fit["fit"].is_object(), reached >= 2);
    let again = spinamp(
        &[
            "sweep",
            "--config",
            "s/sweep-random-map.meta.json",
            "--out",
            "t",
        ],
        dir.path(),
    );
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.path().join("t/sweep-random-map.csv")).unwrap(),
        table.as_bytes()
    );
}

#[test]
fn verify_passes_and_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinamp(&["verify"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("c = 1.5"));
    assert!(!text.contains("FAIL"));

    let o = spinamp(&["verify", "--negative-control"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL rotated dipolar identity n=2: residual"));
}
