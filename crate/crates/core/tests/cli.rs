use std::path::Path;
use std::process::Command;

use wifisynth::cli::{dispatch, EXIT_DATA, EXIT_OK, EXIT_USAGE};
use wifisynth::seed::seeds_from_json;
use wifisynth::timeseries::parse_trace_csv;

fn wifisynth(args: &[&str]) -> i32 {
    let quiet = ["wifisynth", "--log-level", "error"];
    dispatch(quiet.into_iter().chain(args.iter().copied()))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn lines(path: &str) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn binary_without_arguments_prints_usage() {
    let out = Command::new(env!("CARGO_BIN_EXE_wifisynth")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(wifisynth(&["extract", "--input", &p(d, "missing.csv"), "--out", &p(d, "s.json")]), EXIT_DATA);
    std::fs::write(d.join("bad.csv"), "ap_id,timestamp,bytes,users\nA,0,-5,1\n").unwrap();
    assert_eq!(wifisynth(&["ingest", "--input", &p(d, "bad.csv"), "--out", &p(d, "o.csv")]), EXIT_DATA);
    assert_eq!(wifisynth(&["ingest", "--input", &p(d, "bad.csv")]), EXIT_USAGE);
    assert_eq!(
        wifisynth(&["ingest", "--timezone", "Mars/Olympus", "--input", &p(d, "bad.csv"), "--out", &p(d, "o.csv")]),
        EXIT_USAGE
    );
}

#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let trace = p(d, "trace.csv");
    assert_eq!(wifisynth(&["simulate", "--aps", "2", "--days", "8", "--rng-seed", "3", "--out", &trace]), EXIT_OK);

    let series = p(d, "series.csv");
    assert_eq!(wifisynth(&["ingest", "--input", &trace, "--out", &series]), EXIT_OK);
    assert_eq!(lines(&series), 1 + 2 * 8 * 144);

    let seed = p(d, "seed.json");
    assert_eq!(wifisynth(&["extract", "--input", &trace, "--out", &seed]), EXIT_OK);
    let seeds = seeds_from_json(&std::fs::read_to_string(&seed).unwrap()).unwrap();
    assert_eq!(seeds.len(), 2);
    assert!(seeds.iter().all(|s| s.load.slots.len() == 168 && s.users.slots.len() == 168));

    let (s1, s2) = (p(d, "synth1.csv"), p(d, "synth2.csv"));
    for out in [&s1, &s2] {
        let args = ["generate", "--seed", &seed, "--days", "60", "--alpha", "0.9", "--rng-seed", "7", "--out", out];
        assert_eq!(wifisynth(&args), EXIT_OK);
    }
    assert_eq!(std::fs::read(&s1).unwrap(), std::fs::read(&s2).unwrap());
    assert!(d.join("synth1.config.json").exists());
    // Synthetic output re-enters through ingestion.
    let back = parse_trace_csv(std::fs::File::open(&s1).unwrap()).unwrap();
    assert_eq!(back.len(), 2);
    assert_eq!(back[0].records().len(), 60 * 144);

    let s3 = p(d, "synth3.csv");
    let args = ["generate", "--seed", &seed, "--days", "60", "--rng-seed", "8", "--out", &s3];
    assert_eq!(wifisynth(&args), EXIT_OK);
    assert_ne!(std::fs::read(&s1).unwrap(), std::fs::read(&s3).unwrap());

    let report = p(d, "report.csv");
    assert_eq!(wifisynth(&["validate", "--real", &series, "--synthetic", &s1, "--out", &report]), EXIT_OK);
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.starts_with("ap_id,delta_mean_kb,delta_std_kb,delta_cv_pct,"));
    assert_eq!(text.lines().count(), 1 + 2 + 2);
    let json = p(d, "report.json");
    assert_eq!(wifisynth(&["validate", "--real", &series, "--synthetic", &s1, "--out", &json]), EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);

    let data = p(d, "data");
    let args = ["dataset", "--input", &series, "--lookback", "6", "--steps", "2", "--split", "0.75", "--out", &data];
    assert_eq!(wifisynth(&args), EXIT_OK);
    let train_bin = p(&d.join("data"), "ap000.train.bin");
    let test_bin = p(&d.join("data"), "ap000.test.bin");
    assert!(Path::new(&p(&d.join("data"), "ap000.train.json")).exists());

    let model = p(d, "model.bin");
    let args = ["train", "--data", &train_bin, "--model", "linear_ar", "--epochs", "3", "--out", &model];
    assert_eq!(wifisynth(&args), EXIT_OK);
    let eval = p(d, "eval.json");
    let args = ["evaluate", "--model", &model, "--data", &test_bin, "--gamma", "0.01,0.05,0.1", "--out", &eval];
    assert_eq!(wifisynth(&args), EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&eval).unwrap()).unwrap();
    assert!(v["mae"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["classification"].as_array().unwrap().len(), 3);
    assert_eq!(v["classification"][0]["step"], 1);

    let plots = p(d, "plots");
    let args = ["plot-data", "--kind", "weekly_profile", "--real", &series, "--synthetic", &s1, "--out", &plots];
    assert_eq!(wifisynth(&args), EXIT_OK);
    assert_eq!(lines(&p(&d.join("plots"), "weekly_profile_ap000.csv")), 169);
    let args = ["plot-data", "--kind", "violin", "--real", &series, "--synthetic", &s1, "--out", &plots];
    assert_eq!(wifisynth(&args), EXIT_USAGE);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let trace = p(d, "trace.csv");
    assert_eq!(wifisynth(&["simulate", "--aps", "1", "--days", "2", "--out", &trace]), EXIT_OK);
    let seed = p(d, "seed.json");
    assert_eq!(wifisynth(&["extract", "--input", &trace, "--out", &seed]), EXIT_OK);
    let cfg = p(d, "cfg.toml");
    std::fs::write(&cfg, "days = 3\nrng_seed = 5\n").unwrap();

    let from_file = p(d, "a.csv");
    assert_eq!(wifisynth(&["generate", "--config", &cfg, "--seed", &seed, "--out", &from_file]), EXIT_OK);
    assert_eq!(lines(&from_file), 1 + 3 * 144);
    let from_flag = p(d, "b.csv");
    assert_eq!(wifisynth(&["generate", "--config", &cfg, "--days", "1", "--seed", &seed, "--out", &from_flag]), EXIT_OK);
    assert_eq!(lines(&from_flag), 1 + 144);

    std::fs::write(&cfg, "dayz = 3\n").unwrap();
    assert_eq!(wifisynth(&["generate", "--config", &cfg, "--seed", &seed, "--out", &from_flag]), EXIT_DATA);
}

#[test]
fn doe_run_and_boxplots() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = d.join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    let trace = p(&corpus, "aps.csv");
    assert_eq!(wifisynth(&["simulate", "--aps", "3", "--days", "5", "--out", &trace]), EXIT_OK);
    let plan = p(d, "plan.toml");
    std::fs::write(
        &plan,
        r#"
seed_days = [1, 2]
train_test_days = [5]
train_ap_counts = [1]
test_ap_counts = [1]
repetitions = 2
model_kinds = ["linear_ar"]
horizons = [1]
gammas = [0.01, 0.1]
regime = "both"
test_set_mode = "disjoint_aps"
rng_seed = 1

[model]
epochs = 2
"#,
    )
    .unwrap();
    let out = d.join("out");
    let args = ["doe", "run", "--plan", &plan, "--corpus", &p(d, "corpus"), "--out", &p(d, "out")];
    assert_eq!(wifisynth(&args), EXIT_OK);
    assert_eq!(lines(&p(&out, "records.csv")), 1 + 3 * 2);
    let box_path = p(&out, "mae_boxplot_linear_ar_s1.csv");
    let boxplot = std::fs::read_to_string(&box_path).unwrap();
    assert!(boxplot.starts_with("K,length,regime,seed_days,median,q25,q75,min,max,n"));

    let plots = d.join("plots");
    let args = ["plot-data", "--kind", "mae_boxplot", "--doe", &p(&out, "result.json"), "--out", &p(d, "plots")];
    assert_eq!(wifisynth(&args), EXIT_OK);
    assert_eq!(std::fs::read_to_string(plots.join("mae_boxplot_linear_ar_s1.csv")).unwrap(), boxplot);
}
