use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const SMALL: &str = r#"
distribution.d = 10
distribution.p = 0.7
distribution.mu = 0.05
distribution.sigma = 0.3
n_train = 50
n_test = 20
eps = 0.1
lambda = 0.05
method = "at"
rounds = 4
seed = 3
"#;

fn slar(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slar"))
        .current_dir(dir)
        .arg("--quiet")
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn sha(path: &Path) -> String {
    hex::encode(Sha256::digest(std::fs::read(path).unwrap()))
}

#[test]
fn gen_writes_shaped_reproducible_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", SMALL);
    for out in ["a", "b"] {
        let o = slar(&["--out", out, "gen", &cfg], tmp.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let train = std::fs::read_to_string(tmp.path().join("a/train.csv")).unwrap();
    let lines: Vec<&str> = train.lines().collect();
    assert_eq!(lines.len(), 51);
    assert!(lines.iter().all(|l| l.split(',').count() == 12));
    assert!(lines[0].starts_with("y,x1,"));
    assert_eq!(std::fs::read_to_string(tmp.path().join("a/test.csv")).unwrap().lines().count(), 21);
    assert_eq!(sha(&tmp.path().join("a/train.csv")), sha(&tmp.path().join("b/train.csv")));
    // the seed flag changes the sample
    slar(&["--out", "c", "--seed", "4", "gen", &cfg], tmp.path());
    assert_ne!(sha(&tmp.path().join("a/train.csv")), sha(&tmp.path().join("c/train.csv")));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let zero = write_config(tmp.path(), "zero.toml", &SMALL.replace("n_train = 50", "n_train = 0"));
    let o = slar(&["gen", &zero], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_train"));

    let typo = write_config(tmp.path(), "typo.toml", &format!("{SMALL}\nlambada = 1\n"));
    assert_eq!(slar(&["run", &typo], tmp.path()).status.code(), Some(2));

    assert_eq!(slar(&["run", "missing.toml"], tmp.path()).status.code(), Some(4));

    let stalled = write_config(
        tmp.path(),
        "stalled.toml",
        &format!("{SMALL}\nsolver.exact.tolerance = 1e-30\nsolver.exact.max_iters = 1\n"),
    );
    let o = slar(&["--out", "stalled", "run", &stalled], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    // the partial trajectory is still written
    assert!(tmp.path().join("stalled/trajectory_at.csv").exists());
}

#[test]
fn run_writes_summary_with_stable_keys() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", &SMALL.replace("method = \"at\"", "method = \"all\""));
    let o = slar(&["--out", "o", "run", &cfg], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let top: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("o/summary.json")).unwrap()).unwrap();
    let rows = top.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
    let mut expected = vec![
        "method",
        "std_acc_train",
        "std_acc_test",
        "robust_acc_test",
        "nonrobust_mass",
        "deltaw_mean_tail",
        "deltaw_min_tail",
        "condition_report",
    ];
    expected.sort_unstable();
    let mut got = keys.clone();
    got.sort_unstable();
    assert_eq!(got, expected);
    for m in ["standard", "at", "oat", "ne"] {
        assert!(tmp.path().join(format!("o/{m}/trajectory_{m}.csv")).exists());
        let weights = std::fs::read_to_string(tmp.path().join(format!("o/{m}/weights_{m}.csv"))).unwrap();
        assert!(weights.starts_with("index,mu_i,is_robust,w_i\n"));
        assert_eq!(weights.lines().count(), 12);
    }
    for fig in ["fig_deltaw.svg", "fig_acc.svg", "fig_weights.svg"] {
        assert!(std::fs::read_to_string(tmp.path().join("o").join(fig)).unwrap().starts_with("<svg"));
    }
}

#[test]
fn ne_on_a_discrete_population_zeroes_non_robust_weights() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/ne_discrete.toml");
    let tmp = tempfile::tempdir().unwrap();
    let o = slar(&["--out", "ne", "run", cfg.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let weights = std::fs::read_to_string(tmp.path().join("ne/weights_ne.csv")).unwrap();
    for line in weights.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let w: f64 = cols[3].parse().unwrap();
        if cols[2] == "false" {
            assert!(w.abs() < 1e-9, "{line}");
        } else {
            assert!(w != 0.0, "{line}");
        }
    }
}

#[test]
fn verify_builtin_passes_and_reports_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let o = slar(&["--out", "v", "verify"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("v/verify.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], Value::Bool(true));
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 15);
    for c in checks {
        let digest = c["inputs_digest"].as_str().unwrap();
        assert_eq!(digest.len(), 64);
        assert!(["pass", "skipped"].contains(&c["status"].as_str().unwrap()), "{c}");
    }
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    for n in ["lemma1_grid", "lemma1_grid_negative_control", "sign_lemma", "ne_verification", "oat_robustness", "at_sign_flips"] {
        assert!(names.contains(&n), "{n} missing");
    }
    // the near-one spec fails the threshold, so its dependent check is skipped
    let gating = checks.iter().find(|c| c["name"] == "condition_gating").unwrap();
    assert_eq!(gating["status"], "pass");
}

#[test]
fn verify_with_a_config_adds_its_game() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/sign_flip.toml");
    let tmp = tempfile::tempdir().unwrap();
    let o = slar(&["--out", "v", "verify", cfg.to_str().unwrap()], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(tmp.path().join("v/verify.json")).unwrap();
    assert!(text.contains("at_sign_flips[config]"));
    assert!(text.contains("config_condition_report"));
}
