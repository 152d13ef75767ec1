use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wavefront"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    bin().args(args).arg(cfg).arg("--out").arg(out).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn equal_states_give_empty_fan() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "r.json",
        r#"{"system":{"kind":"psystem_exp","eps1":0.05},"w_minus":[0.01,-0.02],"w_plus":[0.01,-0.02],"epsilon":0.01}"#,
    );
    let o = run(&["riemann"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(0));
    let fan = std::fs::read_to_string(dir.path().join("out/fan.csv")).unwrap();
    assert_eq!(fan.lines().count(), 1);
}

#[test]
fn bundled_decay_config_reports_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["decay"], &configs().join("decay_alpha05.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("decay.json")).unwrap()).unwrap();
    let slope = v["slope"].as_f64().unwrap();
    assert!(slope < 0.0 && slope.is_finite());
}

#[test]
fn unknown_key_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.json", r#"{"eps1":0.05,"typo":true}"#);
    let o = run(&["temple"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["failure"]["kind"], "schema");
    assert!(dir.path().join("out/diagnostics.json").exists());
}

#[test]
fn interaction_cap_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.json",
        r#"{"system":{"kind":"psystem_exp","eps1":0.05},
            "data":{"kind":"random","count":20,"amplitude":0.04,"start":0.0,"end":1.0},
            "epsilon":0.002,"t_end":1.0,"interaction_cap":5}"#,
    );
    let o = run(&["simulate"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["failure"]["kind"], "numerical");
}

#[test]
fn excessive_cfl_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "o.json",
        r#"{"eps1":0.05,"data":{"kind":"steps","left":[0,0],"jumps":[[0,0.01,0]]},"t":0.1,"cfl":0.95,"levels":[[0.01,0.01]]}"#,
    );
    assert_eq!(run(&["oracle-compare"], &cfg, &dir.path().join("out")).status.code(), Some(2));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = bin().args(["simulate"]).arg(configs().join("simulate.json")).arg("--out").arg(out).args(["--seed", "4"]).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["summary.json", "interactions.jsonl", "snapshot_002.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn bundled_configs_parse() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        assert!(v.is_object(), "{}", p.display());
    }
}

#[test]
fn shift_config_checks_first_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["shift"], &configs().join("shift.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["topology_changed"], false);
    assert!(s["shifted_interactions"].as_u64().unwrap() > 0);
    assert!(dir.path().join("ledger.csv").exists());
}
