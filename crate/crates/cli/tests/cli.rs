use std::process::{Command, Output};

fn run(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compstruct"))
        .args(args.split_whitespace())
        .env_remove("COMPSTRUCT_MAX_N")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exact_table_in_canonical_order() {
    let o = run("pmf --model g --theta 1 --n 3 --exact --format json");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim_end(),
        r#"[{"parts":[1,1,1],"prob":"4/11"},{"parts":[1,2],"prob":"2/11"},{"parts":[2,1],"prob":"3/11"},{"parts":[3],"prob":"2/11"}]"#
    );
}

#[test]
fn csv_table() {
    let o = run("pmf --model e --theta 1 --n 2 --exact --format csv");
    assert_eq!(stdout(&o), "parts,prob_num,prob_den\n1-1,1,2\n2,1,2\n");
}

#[test]
fn enumerate_one() {
    assert_eq!(
        stdout(&run("enumerate --n 1")).trim_end(),
        r#"[{"parts":[1]}]"#
    );
}

#[test]
fn missing_seed_is_a_usage_error() {
    let o = run("sample --model e --theta 1 --n 5");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_parameter_names_the_flag() {
    let o = run("pmf --model g --theta -1 --n 3");
    assert_eq!(o.status.code(), Some(2));
    let o = run("pmf --model g --theta 1 --n 3 --format xml");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--format"));
}

#[test]
fn cap_can_be_raised() {
    let o = run("enumerate --n 21");
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_compstruct"))
        .args(["enumerate", "--n", "21", "--format", "csv"])
        .env("COMPSTRUCT_MAX_N", "21")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(o.stdout.iter().filter(|&&b| b == b'\n').count(), 1 + (1 << 20));
}

#[test]
fn exact_suite_passes() {
    let o = run("verify --suite exact --n-max 10");
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let reports: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = reports.as_array().unwrap();
    assert!(reports.len() > 40);
    assert!(reports
        .iter()
        .any(|r| r["expected_fail"] == true && r["status"] == "fail"));
}

#[test]
fn samples_and_paintboxes_are_reproducible() {
    for args in [
        "sample --model p --alpha 0.5 --n 6 --count 2000 --seed 42",
        "sample --model g --theta 1 --n 5 --count 500 --seed 7 --sampler paintbox --format csv",
        "sample --model e --theta 2 --n 6 --count 500 --seed 7 --sampler paintbox",
        "sample --model p --alpha 1/2 --n 6 --count 500 --seed 7 --sampler crp",
        "paintbox --model beta --alpha 3/2 --theta 2 --n 8 --seed 3",
        "paintbox --model g --theta 1/2 --seed 3 --format csv",
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args}");
        assert!(!a.stdout.is_empty());
    }
    assert_ne!(
        run("sample --model p --alpha 0.5 --n 6 --count 50 --seed 1").stdout,
        run("sample --model p --alpha 0.5 --n 6 --count 50 --seed 2").stdout
    );
}

#[test]
fn paintbox_document() {
    let o = run("paintbox --model e --theta 1 --n 6 --seed 9");
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let parts: Vec<usize> = serde_json::from_value(doc["parts"].clone()).unwrap();
    assert_eq!(parts.iter().sum::<usize>(), 6);
    assert_eq!(doc["points"].as_array().unwrap().len(), 6);
    assert!(!doc["intervals"].as_array().unwrap().is_empty());
}
