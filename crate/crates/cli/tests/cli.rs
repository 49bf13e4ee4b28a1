use std::fs;
use std::process::Command;

use serde_json::Value;

fn descend(job: &str, extra: &[&str]) -> (Option<i32>, String, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let job_path = dir.path().join("job.json");
    let out_path = dir.path().join("report.json");
    fs::write(&job_path, job).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_descend"))
        .arg("--job")
        .arg(&job_path)
        .arg("--out")
        .arg(&out_path)
        .args(extra)
        .status()
        .unwrap();
    let report = fs::read_to_string(&out_path).unwrap_or_default();
    (status.code(), report, dir)
}

#[test]
fn trivial_class_all_methods_pass() {
    let (code, report, _d) = descend(
        r#"{"p":7,"a4":3,"a6":2,"n":3,"classes":{"point":"infinity"},"method":"all","seed":5}"#,
        &[],
    );
    assert_eq!(code, Some(0));
    let v: Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["status"], "PASS");
    let methods = &v["classes"][0]["methods"];
    for m in ["hesse", "flex", "segre"] {
        assert!(methods[m]["cubic"].is_object(), "{m} has no cubic");
    }
    assert_eq!(methods["segre"]["quadrics"]["type1"].as_array().unwrap().len(), 3);
    assert_eq!(methods["segre"]["quadrics"]["type2"].as_array().unwrap().len(), 24);
    assert_eq!(v["classes"][0]["cross"]["invariants_agree"], true);
    assert_eq!(v["classes"][0]["cross"]["counts_agree"], true);
}

#[test]
fn all_classes_runs_each_representative() {
    // E: y^2 = x^3 + 2x + 5 over F_13 has E(F_13)/3E(F_13) of order 3.
    let (code, report, _d) = descend(
        r#"{"p":13,"a4":2,"a6":5,"n":3,"classes":"all-classes","method":"hesse"}"#,
        &["--verify", "fast"],
    );
    assert_eq!(code, Some(0));
    let v: Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["job"]["verify"], "fast");
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 3);
    let mut digests: Vec<&str> = classes
        .iter()
        .map(|c| c["rho_digest"].as_str().unwrap())
        .collect();
    digests.dedup();
    assert_eq!(digests.len(), 3);
    assert!(classes.iter().all(|c| c["methods"]["flex"].is_null()));
}

#[test]
fn identical_jobs_give_identical_reports() {
    let job = r#"{"p":11,"a4":1,"a6":3,"n":3,"classes":"all-classes","method":"flex","seed":9}"#;
    let (_, a, _d1) = descend(job, &[]);
    let (_, b, _d2) = descend(job, &[]);
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn seed_flag_overrides_job() {
    let (code, report, _d) = descend(
        r#"{"p":7,"a4":3,"a6":2,"n":2,"classes":"all-classes","method":"segre","seed":1}"#,
        &["--seed", "42"],
    );
    assert_eq!(code, Some(0));
    let v: Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["job"]["seed"], 42);
    assert_eq!(v["classes"][0]["methods"]["segre"]["checks"]["quadric_zeros"], true);
}

#[test]
fn composite_p_is_rejected() {
    let (code, report, _d) = descend(
        r#"{"p":15,"a4":1,"a6":1,"n":3,"classes":"all-classes"}"#,
        &[],
    );
    assert_eq!(code, Some(2));
    assert!(report.is_empty());
}

#[test]
fn malformed_job_is_rejected() {
    let (code, _, _d) = descend(r#"{"p":7}"#, &[]);
    assert_eq!(code, Some(2));
}
