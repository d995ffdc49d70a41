//! Generate four weeks of synthetic traffic from a two-week seed, with and
//! without the non-negativity clamp.
//!
//! cargo run --example generate_synthetic

use wifisynth::corpus::{generate_series, CorpusConfig};
use wifisynth::seed::extract_ap_seed;
use wifisynth::synth::{derive_seed, generate_ap, generate_raw, GeneratorConfig};

fn main() -> wifisynth::Result<()> {
    let real = generate_series(&CorpusConfig {
        aps: 1,
        days: 14,
        ..CorpusConfig::default()
    })?
    .remove(0);
    let seed = extract_ap_seed(&real)?;
    let cfg = GeneratorConfig {
        duration_days: 28,
        rng_seed: derive_seed(7, real.ap_id()),
        ..GeneratorConfig::default()
    };

    let trace = generate_ap(&seed, &cfg)?;
    let s = &trace.series;
    println!("{} synthetic windows for {} starting at {}", s.len(), trace.source_ap_id, s.start());
    println!("first hour: {:?}", &s.load()[..6].iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>());

    let raw = generate_raw(&seed.load, &GeneratorConfig { clamp_nonnegative: false, ..cfg })?;
    let negative = raw.iter().filter(|v| **v < 0.0).count();
    println!("without clamping {negative} of {} values would be negative", raw.len());
    Ok(())
}
