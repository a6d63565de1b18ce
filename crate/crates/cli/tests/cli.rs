use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hypersaw(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypersaw"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("-q")
        .output()
        .unwrap()
}

fn error_of(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str::<Value>(text.trim()).unwrap()["error"].clone()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn manifest_lists_exactly_the_written_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = hypersaw(&["sample", "--seed", "3", "--n", "4", "--samples", "3"], &out);
    assert!(o.status.success());
    let m = manifest(&out);
    let mut listed: Vec<String> = m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_owned())
        .collect();
    let mut present: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n != "manifest.json")
        .collect();
    listed.sort();
    present.sort();
    assert_eq!(listed, present);
    assert_eq!(listed, ["walk_000000.json", "walk_000001.json", "walk_000002.json"]);
    assert_eq!(m["command"], "sample");
    assert_eq!(m["params"]["n"], 4);
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert!(m["wall_clock"].as_f64().unwrap() >= 0.0);

    let walk: Value = serde_json::from_str(&fs::read_to_string(out.join("walk_000000.json")).unwrap()).unwrap();
    assert_eq!(walk["directions"].as_array().unwrap().len(), 4);
}

#[test]
fn csv_outputs_have_the_documented_headers() {
    let tmp = tempfile::tempdir().unwrap();
    let scan = tmp.path().join("scan");
    assert!(hypersaw(&["scan", "--seed", "1", "--n-values", "1,2", "--samples", "30"], &scan).status.success());
    let text = fs::read_to_string(scan.join("scan.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,estimate,std_error,ci_low,ci_high,method,samples");
    assert_eq!(text.lines().nth(1).unwrap(), "1,1,0,1,1,iid,30");

    let scaling = tmp.path().join("scaling");
    let args = ["scaling", "--seed", "1", "--n-values", "2,4,8", "--eps-rule", "const:1", "--samples", "30"];
    assert!(hypersaw(&args, &scaling).status.success());
    let text = fs::read_to_string(scaling.join("scaling.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,eps,mean_displacement,std_error,ci_low,ci_high,method,samples");
    assert_eq!(text.lines().count(), 4);
    let fit: Value = serde_json::from_str(&fs::read_to_string(scaling.join("scaling_fit.json")).unwrap()).unwrap();
    assert_eq!(fit["trend"].as_array().unwrap().len(), 2);
    assert!(fit["fit"]["beta"].is_f64());
}

#[test]
fn invalid_parameters_exit_with_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hypersaw(&["sample", "--seed", "1", "--c", "1.5"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_of(&o)["kind"], "config");

    let o = hypersaw(&["sample"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(error_of(&o)["message"].as_str().unwrap().contains("seed"));

    let o = hypersaw(&["sample", "--seed", "1", "--bogus"], tmp.path());
    assert_eq!(o.status.code(), Some(2));

    let o = hypersaw(&["scaling", "--seed", "1", "--n-values", "4,8", "--eps-rule", "sideways"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!tmp.path().join("manifest.json").exists());
}

#[test]
fn exhausted_rejection_cap_exits_with_feasibility_error() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["sample", "--seed", "1", "--n", "60", "--c", "0.99", "--rejection-cap", "10"];
    let o = hypersaw(&args, tmp.path());
    assert_eq!(o.status.code(), Some(3));
    let e = error_of(&o);
    assert_eq!(e["kind"], "feasibility");
    assert_eq!(e["attempts"], 10);
    assert!((e["acceptance_rate"].as_f64().unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn failed_verification_exits_with_code_four() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    // a threshold no triangle can meet
    fs::write(&cfg, r#"{"seed": 2, "verify": {"delta": 1e-6, "delta_samples": 50, "suites": ["delta"]}}"#).unwrap();
    let out = tmp.path().join("out");
    let o = hypersaw(&["verify", "--config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(4));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn resume_continues_numbering_and_matches_an_uninterrupted_chain() {
    let tmp = tempfile::tempdir().unwrap();
    let (first, second, whole) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("w"));
    let base = ["sample", "--seed", "9", "--n", "6", "--sampler", "mcmc"];
    assert!(hypersaw(&[&base[..], &["--samples", "2"]].concat(), &first).status.success());
    let cp = first.join("checkpoint.json");
    let o = hypersaw(&["resume", "--checkpoint", cp.to_str().unwrap(), "--samples", "2"], &second);
    assert!(o.status.success());
    assert!(hypersaw(&[&base[..], &["--samples", "4"]].concat(), &whole).status.success());
    for k in 2..4 {
        let name = format!("walk_{k:06}.json");
        assert_eq!(fs::read(second.join(&name)).unwrap(), fs::read(whole.join(&name)).unwrap());
    }
    assert_eq!(manifest(&second)["command"], "resume");
}

#[test]
fn help_exits_zero() {
    let o = Command::new(env!("CARGO_BIN_EXE_hypersaw")).arg("--help").output().unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("scaling"));
}
