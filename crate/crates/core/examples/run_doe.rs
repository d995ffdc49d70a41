//! A small design of experiments comparing models trained on real data with
//! models trained on synthetic data from short seeds.
//!
//! cargo run --release --example run_doe

use wifisynth::corpus::{generate_series, CorpusConfig};
use wifisynth::doe::{aggregate, run, DoEPlan};

const PLAN: &str = r#"
seed_days = [1, 7]
train_test_days = [14]
train_ap_counts = [1]
test_ap_counts = [1]
repetitions = 4
model_kinds = ["linear_ar", "recurrent"]
horizons = [1]
gammas = [0.01, 0.1]
regime = "both"
test_set_mode = "same_aps"
rng_seed = 11

[model]
hidden_size = 8
epochs = 10
"#;

fn main() -> wifisynth::Result<()> {
    let plan: DoEPlan = toml::from_str(PLAN).map_err(|e| wifisynth::Error::InvalidConfig(e.to_string()))?;
    let corpus = generate_series(&CorpusConfig {
        aps: 6,
        days: 14,
        ..CorpusConfig::default()
    })?;
    let result = run(&plan, &corpus)?;
    for agg in aggregate(&result.records)? {
        println!(
            "{:<48} n={} mean MAE {:.4} (median {:.4})",
            agg.cell.to_string(),
            agg.mae.n,
            agg.mae.mean,
            agg.mae.median
        );
    }
    Ok(())
}
