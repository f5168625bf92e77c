use std::path::Path;
use std::process::{Command, Output};

fn qtransduce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtransduce"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn plan_reports_register_sizes() {
    let out = qtransduce(&["plan", "--eps", "0.001", "--delta", "0.001", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["d"], 13);
    assert_eq!(report["direct_qubits"], 13);
    assert_eq!(report["controlled_qubits"], 26);
    assert_eq!(report["comparator_d"], 10);
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn sample_outputs_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let out = qtransduce(&[
            "sample", "--rows", "2", "--cols", "3", "--variant", "direct", "--shots", "5000", "--seed", "11",
            "--out", dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (fa, fb) = (read_all(&a), read_all(&b));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["counts.csv", "magnetization.csv", "run.json", "sigma.csv"]);
    assert_eq!(fa, fb);

    let meta: serde_json::Value = serde_json::from_slice(&fa[2].1).unwrap();
    assert_eq!(meta["metadata"]["seed"], 11);
    assert_eq!(meta["metadata"]["shots"], 5000);
    let sigma = String::from_utf8(fa[3].1.clone()).unwrap();
    assert!(sigma.starts_with("sigma,density,observed,observed_over_g,theory\n"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "rows = 2\nvariant = \"direct\"\nshots = 100\nseed = 3\n").unwrap();
    let out = qtransduce(&["sample", "--config", cfg.to_str().unwrap(), "--seed", "4", "--format", "json", "--out"]);
    // `--out` without a value is a usage error
    assert_ne!(code(&out), 0);
    let dir = tmp.path().join("o");
    let out = qtransduce(&[
        "sample", "--config", cfg.to_str().unwrap(), "--seed", "4", "--format", "json", "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("sample.json")).unwrap()).unwrap();
    assert_eq!(v["metadata"]["seed"], 4);
    assert_eq!(v["metadata"]["shots"], 100);
    assert_eq!(v["metadata"]["variant"], "direct");
}

#[test]
fn exit_codes_distinguish_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "temperature = 3\n").unwrap();
    assert_eq!(code(&qtransduce(&["synth", "--config", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&qtransduce(&["synth", "--beta-j", "0.1", "--beta-rel-critical", "1"])), 2);
    assert_eq!(code(&qtransduce(&["sample", "--shots", "0"])), 2);
    assert_eq!(code(&qtransduce(&["synth", "--rows", "2", "--d", "2"])), 3);
    assert_eq!(code(&qtransduce(&["synth", "--rows", "4", "--variant", "controlled"])), 4);
    assert_eq!(code(&qtransduce(&["table1", "--nu-rule", "optimal", "--shots", "100"])), 5);
}

#[test]
fn synth_with_amplitude_table_and_exact_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("alphas.csv");
    std::fs::write(&table, "index,alpha\n0,1.0\n1,0.5\n2,0.0001\n3,0.25\n").unwrap();
    let out = qtransduce(&[
        "synth", "--alphas", table.to_str().unwrap(), "--d", "4", "--cutoff", "0.01", "--enforce-zero", "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["saturated"], 1);
    let u = v["diagnostics"]["u_sq"].as_f64().unwrap();
    let oracle = v["diagnostics"]["u_sq_oracle"].as_f64().unwrap();
    assert!((u - oracle).abs() < 1e-12);
}

#[test]
fn baselines_csv() {
    let out = qtransduce(&["baselines", "--d", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,d,norm,qubits,simulated_qubits"));
    assert_eq!(lines.count(), 4);
}
