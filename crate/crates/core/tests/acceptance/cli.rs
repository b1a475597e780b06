use std::process::{Command, Output};

fn qml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qml")).args(args).env_remove("QML_TRUNCATION_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn passing_commands_exit_zero() {
    for args in [
        &["enum", "kostant", "--n", "3", "--gamma", "2,2"][..],
        &["enum", "defects", "--n", "4", "--gamma", "1,1,1", "--format", "csv"],
        &["fixedpoint", "--n", "3", "--gamma", "2,2", "--defect", "2;1,1"],
        &["microlocal", "--n", "3", "--gamma", "2,2", "--defect", "2;1,1", "--format", "json"],
        &["sweep", "--n-max", "3", "--gamma-max", "3"],
        &["remark"],
        &["--help"],
    ] {
        let o = qml(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["fixedpoint", "--n", "3", "--gamma", "2,1", "--defect", "2;1,1"][..],
        &["fixedpoint", "--n", "3", "--gamma", "2,2", "--defect", "2;1"],
        &["enum", "bogus", "--n", "3", "--gamma", "1,1"],
        &["sweep", "--format", "xml"],
        &["sweep", "--oracle-max", "a,b,c"],
        &["nonsense"],
    ] {
        let o = qml(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn violations_exit_two() {
    // the commutation constraints fail at n = 4 once |gamma| reaches 4
    let o = qml(&["sweep", "--n-max", "4", "--gamma-max", "4", "--oracle-max", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("first violation: n=4"), "{out}");
}

#[test]
fn truncation_cap_is_reported() {
    let o = Command::new(env!("CARGO_BIN_EXE_qml")).arg("remark").env("QML_TRUNCATION_CAP", "1").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncation"));
}

#[test]
fn sweep_is_independent_of_job_count() {
    let base = ["sweep", "--n-max", "4", "--gamma-max", "3", "--format", "json", "--oracle-max", "3,3"];
    let one = qml(&[&base[..], &["--jobs", "1"]].concat());
    let many = qml(&[&base[..], &["--jobs", "8"]].concat());
    assert_eq!(one.stdout, many.stdout);
    for format in ["csv", "human"] {
        let a = qml(&["sweep", "--format", format, "--jobs", "1"]);
        let b = qml(&["sweep", "--format", format, "--jobs", "3"]);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn json_report_shape() {
    let o = qml(&["sweep", "--n-max", "3", "--gamma-max", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["tool"], "qml");
    assert_eq!(v["config"]["seed"], 0);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), v["summary"]["records"].as_u64().unwrap() as usize);
    let keys: Vec<&str> = records[0].as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["n", "gamma", "defect", "dim_t", "kernel_dim", "key_prop_bound", "margin", "pass"] {
        assert!(keys.contains(&k), "missing {k}");
    }
}

#[test]
fn csv_columns_are_stable() {
    let o = qml(&["sweep", "--n-max", "3", "--gamma-max", "2", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("n,gamma,defect,dim_t,kernel_dim,key_prop_bound,margin,"));
    let cols = header.split(',').count();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    for row in reader.records() {
        assert_eq!(row.unwrap().len(), cols);
    }
}

#[test]
fn out_writes_report_and_timings() {
    let dir = std::env::temp_dir().join(format!("qml-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.json");
    let o = qml(&["sweep", "--n-max", "3", "--gamma-max", "2", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let timings: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("sweep.timings.json")).unwrap()).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), timings.as_array().unwrap().len());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seed_changes_only_witnesses() {
    let run = |seed: &str| {
        let o = qml(&["microlocal", "--n", "3", "--gamma", "2,2", "--defect", "2;1,1", "--format", "json", "--seed", seed]);
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()
    };
    let (a, again, b) = (run("1"), run("1"), run("2"));
    assert_eq!(a, again);
    for k in ["ambient_dim", "dpi_rank", "conormal_dim", "intersection_dim", "pass"] {
        assert_eq!(a[k], b[k], "{k}");
    }
    assert_eq!(a["intersection_dim"], 8);
    assert_eq!(a["conormal_dim"], 12);
}

#[test]
fn remark_human_output() {
    let o = qml(&["remark"]);
    let text = stdout(&o);
    assert!(text.contains("2;1,1"), "{text}");
}
