//! Emit plot-ready CSVs (weekly profile, histogram, autocorrelation) for a
//! real/synthetic pair into a temporary directory.
//!
//! cargo run --example plot_data

use wifisynth::corpus::{generate_series, CorpusConfig};
use wifisynth::plots::{emit_plot_data, PlotKind, PlotSource};
use wifisynth::seed::extract_ap_seed;
use wifisynth::synth::{generate_ap, GeneratorConfig};

fn main() -> wifisynth::Result<()> {
    let real = generate_series(&CorpusConfig {
        aps: 2,
        days: 14,
        ..CorpusConfig::default()
    })?;
    let synthetic = real
        .iter()
        .map(|r| {
            let cfg = GeneratorConfig {
                duration_days: 14,
                ..GeneratorConfig::default()
            };
            Ok(generate_ap(&extract_ap_seed(r)?, &cfg)?.series)
        })
        .collect::<wifisynth::Result<Vec<_>>>()?;

    let dir = std::env::temp_dir().join("wifisynth-plot-data");
    let source = PlotSource::Series {
        real: &real,
        synthetic: &synthetic,
    };
    for kind in [PlotKind::WeeklyProfile, PlotKind::Histogram, PlotKind::Autocorr] {
        for path in emit_plot_data(source, kind, &dir)? {
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
