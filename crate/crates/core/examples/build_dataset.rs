//! Turn a series into supervised windows, split chronologically and round
//! trip the training half through the binary format.
//!
//! cargo run --example build_dataset

use wifisynth::corpus::{generate_series, CorpusConfig};
use wifisynth::dataset::{build_feature_matrix, chrono_split, WindowedDataset};
use wifisynth::timeseries::calendar_features;

fn main() -> wifisynth::Result<()> {
    let series = generate_series(&CorpusConfig {
        aps: 1,
        days: 10,
        ..CorpusConfig::default()
    })?
    .remove(0);
    let matrix = build_feature_matrix(&series, &calendar_features(&series))?;
    let split = chrono_split(&matrix, 12, 3, 0.8)?;
    println!(
        "{} samples x {} features -> {} train / {} test windows (boundary {})",
        matrix.len(),
        split.train.n_features,
        split.train.len(),
        split.test.len(),
        split.boundary
    );
    println!("first training target (normalized load): {:?}", split.train.target(0));

    let mut bytes = Vec::new();
    split.train.write_binary(&mut bytes)?;
    let back = WindowedDataset::read_binary(bytes.as_slice())?;
    assert_eq!(back, split.train);
    println!("binary round trip ok, {} bytes", bytes.len());
    Ok(())
}
