//! Simulate a small raw trace corpus, write it as CSV, read it back and
//! resample onto the 10-minute grid.
//!
//! cargo run --example simulate_corpus

use wifisynth::corpus::{generate_corpus, CorpusConfig};
use wifisynth::timeseries::{parse_trace_csv, resample, write_trace_csv, DEFAULT_PERIOD_SECONDS};

fn main() -> wifisynth::Result<()> {
    let cfg = CorpusConfig {
        aps: 3,
        days: 7,
        ..CorpusConfig::default()
    };
    let traces = generate_corpus(&cfg)?;

    let mut csv = Vec::new();
    write_trace_csv(&mut csv, &traces)?;
    println!("{} raw records, {} bytes of CSV", traces.iter().map(|t| t.records().len()).sum::<usize>(), csv.len());

    for raw in parse_trace_csv(csv.as_slice())? {
        let series = resample(&raw, DEFAULT_PERIOD_SECONDS)?;
        let peak = series.load().iter().copied().fold(0.0, f64::max);
        println!("{}: {} windows, peak {:.3e} bytes", series.ap_id(), series.len(), peak);
    }
    Ok(())
}
