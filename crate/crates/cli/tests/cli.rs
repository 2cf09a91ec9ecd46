use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use topoartmap_cli::experiment::RunResults;
use topoartmap_cli::{run, sweep, Experiment, Grid, ModelKind};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topoartmap"))
        .args(args)
        .output()
        .unwrap()
}

fn small() -> Experiment {
    let mut exp = Experiment {
        seed: 3,
        ..Default::default()
    };
    exp.synthetic.n_samples = 300;
    exp
}

#[test]
fn run_writes_results_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bin(&[
        "run",
        "--model",
        "skm",
        "--k",
        "7",
        "--order",
        "random",
        "--seed",
        "2",
        "--out-dir",
        out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("ari="));

    let results: RunResults =
        serde_json::from_str(&fs::read_to_string(dir.path().join("results.json")).unwrap())
            .unwrap();
    assert_eq!(results.n_samples, 1600);
    assert_eq!(results.config.model, ModelKind::Skm);
    assert_eq!(results.config.seed, 2);
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("t,cluster,k,p,rho_a,v,icvi_value"));
    assert_eq!(lines.count(), 1600);
}

#[test]
fn exit_codes() {
    assert!(bin(&["--help"]).status.success());
    assert_eq!(bin(&["run", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        bin(&["run", "--dataset", "/nonexistent/data.csv"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(bin(&["sweep", "--model", "skm"]).status.code(), Some(1));
    assert_eq!(
        bin(&["run", "--sweep", "no-equals-sign"]).status.code(),
        Some(1)
    );
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bin(&[
        "sweep",
        "--model",
        "skm",
        "--sweep",
        "skm.k=5:7:1",
        "--out-dir",
        out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("3 points; best skm.k="), "{stdout}");
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "skm.k,ari,acc,n_mis,k_hat,p,runtime_s");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("5,"));
    assert!(dir.path().join("sweep.json").exists());
}

#[test]
fn results_replay_reproduces_metrics() {
    let first = run(&small()).unwrap();
    let text = serde_json::to_string(&first.results).unwrap();
    let echoed: RunResults = serde_json::from_str(&text).unwrap();
    let again = run(&echoed.config).unwrap();
    assert_eq!(again.results.metrics, first.results.metrics);
    assert_eq!(again.trace, first.trace);
}

#[test]
fn singleton_sweep_equals_run() {
    let mut exp = small();
    exp.topoartmap.rho_a = 0.5;
    let single = run(&exp).unwrap().results.metrics;
    exp.topoartmap.rho_a = 0.0;
    exp.sweep
        .insert("topoartmap.rho_a".into(), Grid::Range("0.5:0.5:0.1".into()));
    let s = sweep(&exp).unwrap();
    assert_eq!(s.rows.len(), 1);
    assert_eq!(s.best, 0);
    assert_eq!(s.rows[0].metrics, single);
}

#[test]
fn config_file_with_relative_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/embeddings.csv");
    fs::copy(&data, dir.path().join("emb.csv")).unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(
        &cfg,
        "dataset = \"emb.csv\"\nseed = 4\n\n[topoartmap]\nm_type = \"cosine\"\nrho_a = 0.3\nrho_mt_icvi = 0.1\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = bin(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let results: RunResults =
        serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    assert_eq!(results.n_samples, 200);
    assert!(results.metrics.ari.unwrap() >= 0.9);
}

#[test]
fn semi_supervised_reports_accuracy() {
    let mut exp = small();
    exp.labeled_per_class = 1;
    exp.model = ModelKind::Nn;
    let m = run(&exp).unwrap().results.metrics;
    assert_eq!(m.k_hat, 7);
    assert!(m.ari.is_none());
    let (acc, wrong) = (m.acc.unwrap(), m.n_mis.unwrap());
    assert!((acc - (1.0 - wrong as f64 / 293.0)).abs() < 1e-12);
}

#[test]
fn rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[topoartmap]\nrho = 0.3\n").unwrap();
    assert!(Experiment::load(&cfg).is_err());
    let o = bin(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bundled_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let exp = Experiment::load(&path).unwrap();
        exp.validate().unwrap();
        if exp.dataset != "synthetic" {
            assert!(Path::new(&exp.dataset).exists(), "{}", exp.dataset);
        }
        n += 1;
    }
    assert!(n >= 4);
}
