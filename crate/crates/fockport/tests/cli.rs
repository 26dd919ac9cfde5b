use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fockport"));
    c.env_remove("FOCKPORT_OUT_DIR");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"{
  "schema_version": 1,
  "name": "small",
  "target": "fidelity_coherent",
  "grid": { "n": [0, 1], "k": [1], "operations": ["add", "sub"], "deformations": ["identity", "inv_sqrt_n"] },
  "axis": { "variable": "alpha", "start": 0.5, "stop": 1.5, "step": 0.5 }
}
"#;

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.json");
    std::fs::write(&cfg, SMALL).unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "4", "4"] {
        let out = dir.path().join(format!("out{}", outputs.len()));
        let o = bin().args(["sweep", cfg.to_str().unwrap(), "--jobs", jobs, "--out-dir", out.to_str().unwrap()]).output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push((
            std::fs::read(out.join("small_identity.csv")).unwrap(),
            std::fs::read(out.join("small_inv_sqrt_n.csv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
    let text = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,add_n0_k1,add_n1_k1,sub_n0_k1,sub_n1_k1");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0.5,"));
}

#[test]
fn failed_points_leave_empty_cells_and_a_log() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.json");
    std::fs::write(&cfg, SMALL).unwrap();
    let o = bin().args(["sweep", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]).output().unwrap();
    assert!(o.status.success());
    assert!(stderr(&o).contains("cells failed"));
    let csv = std::fs::read_to_string(dir.path().join("small_inv_sqrt_n.csv")).unwrap();
    // alpha = 1 and 1.5 have no normalizable state for this deformation
    let last = csv.lines().last().unwrap();
    assert_eq!(last, "1.5,,,,");
    let log = std::fs::read_to_string(dir.path().join("small_inv_sqrt_n.errors.log")).unwrap();
    assert_eq!(log.lines().count(), 8);
    assert!(log.lines().all(|l| l.contains("tail mass")), "{log}");
    assert!(!dir.path().join("small_identity.errors.log").exists());
}

#[test]
fn degenerate_axis_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one.json");
    std::fs::write(&cfg, SMALL.replace("\"stop\": 1.5", "\"stop\": 0.5")).unwrap();
    let o = bin().args(["sweep", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("small_identity.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let from_cfg = dir.path().join("from_cfg");
    let with_dir = SMALL.replace(
        "\"name\": \"small\",",
        &format!("\"name\": \"small\", \"output\": {{ \"dir\": {:?} }},", from_cfg.to_str().unwrap()),
    );
    std::fs::write(&cfg, &with_dir).unwrap();
    let env_dir = dir.path().join("from_env");
    let flag_dir = dir.path().join("from_flag");

    let o = bin().args(["sweep", cfg.to_str().unwrap()]).env("FOCKPORT_OUT_DIR", &env_dir).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(from_cfg.join("small_identity.csv").exists());
    assert!(!env_dir.exists());

    let o = bin()
        .args(["sweep", cfg.to_str().unwrap(), "--out-dir", flag_dir.to_str().unwrap()])
        .env("FOCKPORT_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(flag_dir.join("small_identity.csv").exists());

    std::fs::write(&cfg, SMALL).unwrap();
    let o = bin().args(["sweep", cfg.to_str().unwrap()]).env("FOCKPORT_OUT_DIR", &env_dir).output().unwrap();
    assert!(o.status.success());
    assert!(env_dir.join("small_identity.csv").exists());
}

#[test]
fn config_errors_exit_with_2_and_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (SMALL.replace("\"step\": 0.5", "\"step\": -0.5"), "field `axis.step`"),
        (SMALL.replace("\"k\": [1],", "\"k\": [1]"), "line 5"),
        (SMALL.replace("\"add\"", "\"double\""), "field `grid.operations[0]`"),
        (SMALL.replace("\"alpha\", \"start\"", "\"alpha\", \"begin\""), "unknown field `begin`"),
    ];
    for (text, want) in cases {
        let cfg = dir.path().join("bad.json");
        std::fs::write(&cfg, text).unwrap();
        let o = bin().args(["sweep", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]).output().unwrap();
        assert_eq!(o.status.code(), Some(2), "{want}");
        assert!(stderr(&o).contains(want), "{want}: {}", stderr(&o));
    }
    let o = bin().args(["sweep", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["fidelity", "--op", "multiply"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn one_shot_commands() {
    let o = bin().args(["fidelity", "--n", "0", "--k", "1", "--op", "sub", "--alpha", "0.7", "--deform", "inv_sqrt_n"]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let f: f64 = stdout(&o).lines().next().unwrap().strip_prefix("fidelity ").unwrap().parse().unwrap();
    assert!(f > 0.5 && f < 0.6, "{f}");

    let q = bin()
        .args(["fidelity", "--n", "0", "--k", "1", "--op", "sub", "--alpha", "0.7", "--deform", "inv_sqrt_n", "--method", "quadrature"])
        .output()
        .unwrap();
    let fq: f64 = stdout(&q).lines().next().unwrap().strip_prefix("fidelity ").unwrap().parse().unwrap();
    assert!((f - fq).abs() < 1e-9);

    let o = bin().args(["fidelity", "--input", "squeezed", "--r", "0.5", "--n", "1", "--alpha", "1"]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));

    // no normalizable state: a computation failure
    let o = bin().args(["fidelity", "--n", "0", "--k", "1", "--op", "sub", "--alpha", "1.5", "--deform", "inv_sqrt_n"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tail mass"));

    let o = bin().args(["entanglement", "--n", "1", "--alpha", "1"]).output().unwrap();
    assert!(o.status.success());
    let e: f64 = stdout(&o).split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((e - std::f64::consts::LN_2).abs() < 1e-9, "{e}");
    let o = bin().args(["entanglement", "--n", "1", "--alpha", "1", "--bits"]).output().unwrap();
    assert!(stdout(&o).starts_with("entropy 1 bits"), "{}", stdout(&o));

    let o = bin().args(["epr", "--alpha", "1.3"]).output().unwrap();
    assert_eq!(stdout(&o), "var_xminus 1\nvar_pplus 1\n");
}

#[test]
fn states_round_trip_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    for ext in ["json", "csv"] {
        let path = dir.path().join(format!("s.{ext}"));
        let a = bin()
            .args(["epr", "--n", "2", "--k", "1", "--op", "add", "--alpha", "0.8,0.3", "--save-state", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(a.status.success(), "{}", stderr(&a));
        let b = bin().args(["epr", "--state", path.to_str().unwrap()]).output().unwrap();
        assert!(b.status.success(), "{}", stderr(&b));
        assert_eq!(stdout(&a), stdout(&b));
    }
}

#[test]
fn plot_writes_svg_and_rejects_bad_csv() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("g.csv");
    std::fs::write(&good, "alpha,a,b\n0,0.5,0.4\n1,0.45,\n2,0.4,0.2\n").unwrap();
    let o = bin().args(["plot", good.to_str().unwrap(), "--title", "t"]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = std::fs::read_to_string(dir.path().join("g.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));

    let bad = dir.path().join("b.csv");
    std::fs::write(&bad, "alpha,a\n0,0.5\n1,zz\n").unwrap();
    let o = bin().args(["plot", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn every_shipped_config_runs_under_the_default_cutoff() {
    let dir = tempfile::tempdir().unwrap();
    let mut names: Vec<PathBuf> = std::fs::read_dir(configs())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    names.sort();
    assert_eq!(names.len(), 15);
    for cfg in names {
        let o = bin().args(["sweep", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "--plot"]).output().unwrap();
        assert!(o.status.success(), "{}: {}", cfg.display(), stderr(&o));
        for line in stdout(&o).lines() {
            let csv = std::fs::read_to_string(line).unwrap();
            let rows = csv.lines().count();
            assert!(rows > 1, "{line}");
            assert!(Path::new(line).with_extension("svg").exists());
        }
    }
}

#[test]
fn selftest_passes() {
    let o = bin().arg("selftest").output().unwrap();
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("7 of 7 checks passed"), "{}", stdout(&o));
}
