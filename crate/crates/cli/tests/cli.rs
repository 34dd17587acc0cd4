use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn liouville(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouville"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn error_object(output: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&output.stderr);
    let line = text.lines().last().expect("stderr has an error line");
    serde_json::from_str::<serde_json::Value>(line).expect("stderr is JSON")["error"].clone()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn preset_criterion_writes_report_and_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("power");
    let o = liouville(&["criterion", "--preset", "power_weight"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&out);
    assert_eq!(rep["command"], "criterion");
    assert_eq!(rep["seed"], 0);
    assert_eq!(rep["config"]["source"], "preset:power_weight");
    assert_eq!(rep["result"]["verdict"], "forced_trivial");
    let samples = fs::read_to_string(out.join("samples.csv")).unwrap();
    assert!(
        samples.starts_with("r,q,integrand,partial_integral"),
        "{}",
        &samples[..60.min(samples.len())]
    );
    assert!(out.join("ladder.csv").exists());
}

#[test]
fn criterion_from_spec_file() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"n":3,"m":2,"k":1,"lambda":2,
            "profile_a":{"type":"const","value":1},
            "profile_b":{"type":"power","exponent":-1.5}}"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    let o = liouville(
        &["criterion", "--method", "hoelder", "--spec", spec.to_str().unwrap()],
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&out);
    assert_eq!(rep["result"]["verdict"], "not_forced");
    assert_eq!(rep["config"]["method"], "hoelder");
}

#[test]
fn slow_decay_counterexample_is_refused_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("ce.json");
    fs::write(&spec, r#"{"n":3,"k":1,"nu":-1,"lambda":2}"#).unwrap();
    let out = tmp.path().join("o");
    let o = liouville(&["counterexample", "--spec", spec.to_str().unwrap()], &out);
    assert!(!o.status.success());
    assert_eq!(o.status.code(), Some(3));
    let err = error_object(&o);
    assert_eq!(err["kind"], "no_counterexample");
    assert!(err["message"].as_str().unwrap().contains("nu"), "{err}");
    assert!(!out.exists() || fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn empty_spec_is_a_schema_error_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("empty.json");
    fs::write(&spec, "").unwrap();
    let out = tmp.path().join("o");
    let o = liouville(&["criterion", "--spec", spec.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_object(&o)["kind"], "schema");
    assert!(!out.exists());
}

#[test]
fn schema_error_names_the_offending_node() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("bad.json");
    fs::write(
        &spec,
        r#"{"n":3,"m":2,"lambda":2,"profile_a":{"type":"const","value":1},
            "profile_b":{"type":"power","exponant":-1}}"#,
    )
    .unwrap();
    let o = liouville(&["criterion", "--spec", spec.to_str().unwrap()], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    let err = error_object(&o);
    assert_eq!(err["kind"], "schema");
    assert!(err["path"].as_str().unwrap().starts_with("profile_b"), "{err}");
}

#[test]
fn usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = liouville(&["criterion", "--preset", "no_such_preset"], &out);
    assert_ne!(o.status.code(), Some(0));
    let o = liouville(&["counterexample", "--tol", "-1"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_object(&o)["kind"], "usage");
    let o = liouville(&["criterion"], &out);
    assert_eq!(o.status.code(), Some(2));
    let o = liouville(&["frobnicate"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn counterexample_and_verify_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("ce");
    let o = liouville(&["counterexample"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&out);
    assert_eq!(rep["result"]["residuals_within_tol"], true);
    let chain = fs::read_to_string(out.join("chain.csv")).unwrap();
    assert!(chain.starts_with("r,w0,w1\n"));
    assert!(fs::read_to_string(out.join("u.csv")).unwrap().starts_with("r,value\n"));

    let out = tmp.path().join("verify");
    let o = liouville(&["verify"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&out)["result"]["all_pass"], true);
    let csv = fs::read_to_string(out.join("verify.csv")).unwrap();
    assert!(csv.starts_with("r1,r2,lhs,rhs,"), "{csv}");
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn proofsim_and_averaging_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p");
    let o = liouville(&["proofsim", "--preset", "blowup_convergent"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&out);
    let first = &rep["result"]["trajectories"][0];
    assert_eq!(first["c"], 1e-6);
    assert_eq!(first["blow_up"], false);
    assert!(fs::read_to_string(out.join("trajectory_0.csv"))
        .unwrap()
        .starts_with("i,r,value,label\n"));

    let spec = tmp.path().join("avg.json");
    fs::write(&spec, r#"{"settings":[{"alpha":0.5,"kappa":2,"nu":2}],"trials":200}"#).unwrap();
    let out = tmp.path().join("a");
    let o = liouville(&["averaging", "--seed", "3", "--spec", spec.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&out);
    assert_eq!(rep["seed"], 3);
    assert_eq!(rep["result"][0]["trials"], 200);
    assert_eq!(
        fs::read_to_string(out.join("trials_0.csv")).unwrap().lines().count(),
        201
    );
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let read = |dir: &Path| {
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (
                    e.file_name().to_string_lossy().into_owned(),
                    fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };
    for args in [
        &["averaging", "--seed", "11"][..],
        &["criterion", "--preset", "dyadic_windows"][..],
    ] {
        let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
        assert!(liouville(args, &a).status.success());
        assert!(liouville(args, &b).status.success());
        assert_eq!(read(&a), read(&b), "{args:?}");
        fs::remove_dir_all(&a).unwrap();
        fs::remove_dir_all(&b).unwrap();
    }
}
