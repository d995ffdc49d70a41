//! Train each model kind on one AP, report test MAE and save a checkpoint.
//!
//! cargo run --release --example train_forecaster

use wifisynth::corpus::{generate_series, CorpusConfig};
use wifisynth::dataset::{build_feature_matrix, chrono_split};
use wifisynth::forecast::{mae, train, ForecastModel, ModelKind, ModelSpec};
use wifisynth::timeseries::calendar_features;

fn main() -> wifisynth::Result<()> {
    let series = generate_series(&CorpusConfig {
        aps: 1,
        days: 14,
        ..CorpusConfig::default()
    })?
    .remove(0);
    let matrix = build_feature_matrix(&series, &calendar_features(&series))?;
    let split = chrono_split(&matrix, 12, 1, 0.8)?;

    for kind in ModelKind::ALL {
        let mut spec = ModelSpec::for_dataset(kind, &split.train);
        spec.hidden_size = 16;
        spec.training.epochs = 20;
        let model = train(&spec, &split.train)?;
        println!(
            "{kind:<13}: {} parameters, final loss {:.5}, test MAE {:.4}",
            spec.param_count(),
            model.log().epoch_loss.last().copied().unwrap_or(f64::NAN),
            mae(&model, &split.test)?
        );
        if kind == ModelKind::LinearAr {
            let mut ckpt = Vec::new();
            model.write_checkpoint(&mut ckpt)?;
            let restored = ForecastModel::read_checkpoint(ckpt.as_slice())?;
            assert_eq!(restored.parameters(), model.parameters());
        }
    }
    Ok(())
}
