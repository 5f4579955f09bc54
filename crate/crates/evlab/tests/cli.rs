use std::path::Path;
use std::process::{Command, Output};

fn evlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evlab")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn unknown_subcommand_prints_usage_and_fails() {
    let out = evlab(&["frobnicate"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn config_echoes_the_canonical_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"map": "ternary", "eps": [1e-3], "m": 200, "n": 1000, "seed": 1}"#);
    let out = evlab(&["config", "--config", &cfg]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.is_ascii());
    let back = evlab::config::parse_config_str(&text).unwrap();
    assert_eq!(back.realizations, evlab::config::DEFAULT_REALIZATIONS);

    let bad = write(dir.path(), "bad.json", r#"{"map": "ternary", "eps": [-0.1], "m": 200, "n": 1000, "seed": 1}"#);
    let out = evlab(&["config", "--config", &bad]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps[0]"));
}

#[test]
fn lemma_grid_holds_on_valid_rows() {
    let out = evlab(&["verify-lemma", "--eps", "0.3", "--jmax", "200"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let (valid, within) = (header.iter().position(|h| *h == "valid").unwrap(), header.iter().position(|h| *h == "within_bound").unwrap());
    let mut checked = 0;
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f[valid] == "true" {
            assert_eq!(f[within], "true", "{line}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn fit_reads_a_maxima_file() {
    let dir = tempfile::tempdir().unwrap();
    // Gumbel quantiles at (i − 0.5)/m
    let m = 200;
    let body: String = (1..=m).map(|i| format!("{}\n", -(-((i as f64 - 0.5) / m as f64).ln()).ln())).collect();
    let input = write(dir.path(), "maxima.csv", &format!("maximum\n{body}"));
    let out = evlab(&["fit", "--input", &input]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let fit = &doc["fit"];
    assert!(fit["kappa"].as_f64().unwrap().abs() < 0.1, "{fit}");
    assert!((fit["sigma"].as_f64().unwrap() - 1.0).abs() < 0.1, "{fit}");
    assert_eq!(fit["sample_size"], m);

    let short = write(dir.path(), "short.csv", "1\n2\n3\n");
    assert!(!evlab(&["fit", "--input", &short]).status.success());
    let junk = write(dir.path(), "junk.csv", "1\n2\nthree\n");
    assert!(!evlab(&["fit", "--input", &junk]).status.success());
}

#[test]
fn simulate_writes_an_orbit() {
    let out = evlab(&["simulate", "--map", "ternary", "--eps", "0.01", "--length", "50", "--seed", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 51);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(1).unwrap().parse::<f64>().is_ok_and(|x| (0.0..1.0).contains(&x))));
    assert_eq!(text, String::from_utf8(evlab(&["simulate", "--map", "ternary", "--eps", "0.01", "--length", "50", "--seed", "4"]).stdout).unwrap());
}

/// Same config twice: identical files and checksums.
#[test]
fn run_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"map": "ternary", "eps": [1e-2, 0], "m": 40, "n": 200, "seed": 9, "realizations": 3, "burn_in": 100}"#,
    );
    let mut dirs = Vec::new();
    for k in 0..2 {
        let out_dir = dir.path().join(format!("out{k}"));
        let out = evlab(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        dirs.push(out_dir);
    }
    for name in ["config.json", "results.csv", "results.json", "manifest.json"] {
        let a = std::fs::read(dirs[0].join(name)).unwrap();
        assert!(a.is_ascii(), "{name}");
        assert_eq!(a, std::fs::read(dirs[1].join(name)).unwrap(), "{name}");
    }
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(dirs[0].join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
    let csv = std::fs::read_to_string(dirs[0].join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
}

#[test]
fn unknown_figure_fails() {
    assert!(!evlab(&["figure", "spiral"]).status.success());
}
