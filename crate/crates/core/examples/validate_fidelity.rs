//! Compare synthetic traces against their real sources with the statistical
//! battery and print the per-AP rows plus the summary.
//!
//! cargo run --example validate_fidelity

use wifisynth::corpus::{generate_series, CorpusConfig};
use wifisynth::seed::extract_ap_seed;
use wifisynth::synth::{derive_seed, generate_ap, GeneratorConfig};
use wifisynth::validate::{compare, summarize};

fn main() -> wifisynth::Result<()> {
    let corpus = generate_series(&CorpusConfig {
        aps: 5,
        days: 28,
        ..CorpusConfig::default()
    })?;
    let mut rows = Vec::new();
    for real in &corpus {
        let cfg = GeneratorConfig {
            duration_days: 28,
            rng_seed: derive_seed(1, real.ap_id()),
            ..GeneratorConfig::default()
        };
        let synth = generate_ap(&extract_ap_seed(real)?, &cfg)?.series;
        rows.push(compare(real, &synth)?);
    }
    let report = summarize(rows)?;
    let mut out = Vec::new();
    report.write_csv(&mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    println!("mean weekly-mean correlation: {:.3}", report.summary_mean.rho_weekly_mean.unwrap_or(f64::NAN));
    Ok(())
}
