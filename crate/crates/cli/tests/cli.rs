use std::path::Path;
use std::process::{Command, Output};

use locapprox_cli::experiments::Experiment;
use locapprox_cli::report::load_config;
use serde_json::Value;

fn locapprox(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locapprox"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = locapprox(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn line_count(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn gen_data_writes_requested_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-data", "--kind", "three_moons", "--count", "50", "--out", "moons.csv"]);
    assert_eq!(line_count(&d.join("moons.csv")), 1 + 150);
    ok(d, &["gen-data", "--kind", "uniform_sphere", "--count", "0", "--out", "empty.csv"]);
    assert_eq!(line_count(&d.join("empty.csv")), 1);
    ok(d, &["gen-data", "--kind", "great_circle", "--count", "64", "--out", "circle.csv"]);
    assert_eq!(line_count(&d.join("circle.csv")), 65);
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("moons.json"),
        r#"{ "experiment": "three_moons", "per_class": 80 }"#,
    )
    .unwrap();
    for out in ["a", "b"] {
        ok(d, &["--seed", "5", "--config", "moons.json", "--out-dir", out, "masc"]);
        ok(d, &["--seed", "5", "--out-dir", out, "torus"]);
    }
    for file in ["three_moons.json", "fig4.json"] {
        let a = std::fs::read(d.join("a").join(file)).unwrap();
        let b = std::fs::read(d.join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between runs");
    }
    assert!(d.join("a/fig4.timing.json").exists());
}

#[test]
fn fig4_writes_one_plot_per_degree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["--out-dir", "out", "torus"]);
    for file in ["fig4_n128.svg", "fig4_n256.svg"] {
        let svg = std::fs::read_to_string(d.join("out").join(file)).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    }
    let report = json(&d.join("out/fig4.json"));
    assert_eq!(report["results"]["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn benchmark_table_has_five_methods_and_nine_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("small.json"),
        r#"{ "experiment": "table2", "runs": 1, "degree": 8, "train": 800, "test": 300 }"#,
    )
    .unwrap();
    ok(d, &["--config", "small.json", "--out-dir", "out", "sphere"]);
    let report = json(&d.join("out/table2.json"));
    let table = report["results"]["table"].as_array().unwrap();
    assert_eq!(table.len(), 5);
    assert!(table.iter().all(|row| row.as_array().unwrap().len() == 9));
    assert!(d.join("out/table2.svg").exists());

    // The saved report re-renders without re-running.
    let text = ok(d, &["--out-dir", "again", "report", "out/table2.json"]);
    assert!(text.contains("QS5"));
    assert!(d.join("again/table2.svg").exists());
}

#[test]
fn bad_configs_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("empty.json"), "").unwrap();
    let out = locapprox(d, &["--config", "empty.json", "torus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));

    std::fs::write(d.join("fig4.json"), r#"{ "experiment": "fig4" }"#).unwrap();
    let out = locapprox(d, &["--config", "fig4.json", "masc"]);
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(d.join("junk.json"), r#"{ "experiment": "nope" }"#).unwrap();
    assert_eq!(locapprox(d, &["--config", "junk.json", "torus"]).status.code(), Some(2));
}

#[test]
fn checked_in_configs_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let exp = load_config(&path).unwrap();
            let text = serde_json::to_string(&exp).unwrap();
            let back: Experiment = serde_json::from_str(&text).unwrap();
            assert_eq!(exp, back, "{}", path.display());
            seen += 1;
        }
    }
    assert_eq!(seen, 12);
}

#[test]
fn quadrature_and_zonal_fit_interfaces() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-data", "--kind", "uniform_sphere", "--count", "400", "--out", "pts.csv"]);
    ok(d, &["quad", "solve", "--data", "pts.csv", "--order", "9", "--out", "solved.json"]);
    let rule = json(&d.join("solved.json"));
    assert!(rule["moment_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(rule["weights"].as_array().unwrap().len(), 400);

    ok(d, &["quad", "product", "--order", "9", "--out", "rule.json"]);
    let pts = std::fs::read_to_string(d.join("pts.csv")).unwrap();
    let mut labeled = String::from("x,y,z,value\n");
    for line in pts.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        labeled.push_str(&format!("{},{},{},{}\n", v[0], v[1], v[2], v[2] * v[2] + v[0] * v[1]));
    }
    std::fs::write(d.join("labeled.csv"), labeled).unwrap();
    ok(
        d,
        &["zonal", "fit", "--degree", "4", "--data", "labeled.csv", "--rule", "rule.json", "--out", "net.json"],
    );
    let net = json(&d.join("net.json"));
    let centers = net["centers"].as_array().unwrap();
    assert_eq!(centers.len(), json(&d.join("rule.json"))["weights"].as_array().unwrap().len());
    assert_eq!(net["coeffs"].as_array().unwrap().len(), centers.len());
}

#[test]
fn masc_run_interface() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen-data", "--kind", "three_moons", "--count", "150", "--out", "moons.csv"]);
    ok(
        d,
        &[
            "masc", "run", "--data", "moons.csv", "--labels-oracle", "moons.csv", "--theta", "0.1", "--eta-factor",
            "8", "--out", "result.json",
        ],
    );
    let res = json(&d.join("result.json"));
    assert_eq!(res["clusters"], 3);
    assert!(res["queries"].as_u64().unwrap() <= 3);
    assert!(res["accuracy"].as_f64().unwrap() > 0.95);
}
