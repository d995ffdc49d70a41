//! Score forecasts as LOAD / NO-LOAD decisions over a grid of thresholds.
//!
//! cargo run --release --example classify_load

use wifisynth::corpus::{generate_series, CorpusConfig};
use wifisynth::dataset::{build_feature_matrix, chrono_split};
use wifisynth::forecast::{load_classify, predict_all, train, ModelKind, ModelSpec};
use wifisynth::timeseries::calendar_features;

fn main() -> wifisynth::Result<()> {
    let series = generate_series(&CorpusConfig {
        aps: 1,
        days: 14,
        ..CorpusConfig::default()
    })?
    .remove(0);
    let matrix = build_feature_matrix(&series, &calendar_features(&series))?;
    let split = chrono_split(&matrix, 12, 3, 0.8)?;
    let mut spec = ModelSpec::for_dataset(ModelKind::LinearAr, &split.train);
    spec.training.epochs = 30;
    let model = train(&spec, &split.train)?;

    let predictions = predict_all(&model, &split.test)?;
    let truths: Vec<&[f64]> = (0..split.test.len()).map(|i| split.test.target(i)).collect();
    for gamma in [0.01, 0.05, 0.1] {
        let r = load_classify(&predictions, &truths, gamma, 2)?;
        let rate = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{:.3}", v));
        println!(
            "gamma {gamma:<4}  tp {:>4} tn {:>4} fp {:>4} fn {:>4}  fp rate {} fn rate {}",
            r.tp,
            r.tn,
            r.fp,
            r.fn_,
            rate(r.fp_rate),
            rate(r.fn_rate)
        );
    }
    Ok(())
}
