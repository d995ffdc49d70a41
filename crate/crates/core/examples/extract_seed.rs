//! Reduce two weeks of traffic to the 168-slot weekly seed and print the
//! busiest hour of each weekday.
//!
//! cargo run --example extract_seed

use wifisynth::corpus::{generate_series, CorpusConfig};
use wifisynth::seed::{extract_ap_seed, seeds_to_json};

const DAYS: [&str; 7] = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];

fn main() -> wifisynth::Result<()> {
    let corpus = generate_series(&CorpusConfig {
        aps: 1,
        days: 14,
        ..CorpusConfig::default()
    })?;
    let seed = extract_ap_seed(&corpus[0])?;

    for (w, day) in DAYS.iter().enumerate() {
        let busiest = (0..24).max_by(|&a, &b| seed.load.slot(w, a).mean.total_cmp(&seed.load.slot(w, b).mean)).unwrap();
        let slot = seed.load.slot(w, busiest);
        println!(
            "{day} peak at {busiest:02}:00  mean {:.3e}  std {:.3e}  ({} days)",
            slot.mean,
            slot.variance.sqrt(),
            slot.day_count
        );
    }
    println!("seed JSON is {} bytes", seeds_to_json(std::slice::from_ref(&seed))?.len());
    Ok(())
}
