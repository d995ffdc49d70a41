//! Reference corpus of raw AP traces drawn from a richer hidden process than
//! the generator's (weekday and weekend diurnal shapes, per-AP character,
//! day-to-day level swings, log-AR fluctuations, bursts and outages).
//!
//! Used by the examples and tests as stand-in "real" data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::{derive_seed, SYNTHETIC_EPOCH};
use crate::timeseries::{resample, LoadSeries, RawRecord, RawTrace, DEFAULT_PERIOD_SECONDS, SECONDS_PER_DAY};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub aps: usize,
    pub days: u32,
    /// Spacing of raw measurements.
    pub record_seconds: u32,
    pub start: i64,
    pub rng_seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            aps: 20,
            days: 28,
            record_seconds: 120,
            start: SYNTHETIC_EPOCH,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Character {
    Office,
    Residential,
    Campus,
}

struct ApProfile {
    character: Character,
    scale: f64,
    shift_hours: f64,
    weekend_level: f64,
    night_floor: f64,
    max_users: f64,
}

fn bump(h: f64, centre: f64, width: f64) -> f64 {
    // Circular distance on the 24 h clock.
    let d = (h - centre + 36.0).rem_euclid(24.0) - 12.0;
    (-0.5 * (d / width).powi(2)).exp()
}

impl ApProfile {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        let character = match rng.random_range(0..3) {
            0 => Character::Office,
            1 => Character::Residential,
            _ => Character::Campus,
        };
        Self {
            character,
            scale: LogNormal::new(15.0, 0.8).expect("valid lognormal").sample(rng),
            shift_hours: rng.random_range(-1.5..1.5),
            weekend_level: match character {
                Character::Office => rng.random_range(0.1..0.35),
                Character::Residential => rng.random_range(0.9..1.3),
                Character::Campus => rng.random_range(0.3..0.6),
            },
            night_floor: rng.random_range(0.01..0.04),
            max_users: rng.random_range(8.0..60.0),
        }
    }

    /// Relative activity in [floor, ~1] at fractional local hour `h`.
    fn shape(&self, h: f64, weekend: bool) -> f64 {
        let h = h - self.shift_hours;
        let day = match self.character {
            Character::Office => 0.9 * bump(h, 10.5, 1.8) + 0.8 * bump(h, 15.0, 1.8),
            Character::Residential => 0.35 * bump(h, 8.0, 1.2) + 1.0 * bump(h, 20.5, 2.2),
            Character::Campus => 0.7 * bump(h, 11.0, 2.5) + 0.6 * bump(h, 16.5, 2.5) + 0.3 * bump(h, 21.0, 1.5),
        };
        let level = if weekend { self.weekend_level } else { 1.0 };
        self.night_floor + level * day
    }
}

/// Raw traces for `cfg.aps` access points, `ap000`, `ap001`, ...
pub fn generate_corpus(cfg: &CorpusConfig) -> Result<Vec<RawTrace>> {
    if cfg.aps == 0 || cfg.days == 0 {
        return Err(Error::InvalidConfig("corpus needs at least one AP and one day".into()));
    }
    if cfg.record_seconds == 0 || SECONDS_PER_DAY % i64::from(cfg.record_seconds) != 0 {
        return Err(Error::InvalidConfig(format!(
            "record spacing {} must divide a day",
            cfg.record_seconds
        )));
    }
    (0..cfg.aps)
        .map(|i| {
            let id = format!("ap{i:03}");
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.rng_seed, &id));
            let records = simulate(cfg, &mut rng);
            RawTrace::new(id, records)
        })
        .collect()
}

fn simulate(cfg: &CorpusConfig, rng: &mut ChaCha8Rng) -> Vec<RawRecord> {
    let ap = ApProfile::draw(rng);
    let per_day = (SECONDS_PER_DAY / i64::from(cfg.record_seconds)) as usize;
    // Scale per-record bytes so a 10-minute window carries `ap.scale` at peak.
    let unit = ap.scale * f64::from(cfg.record_seconds) / f64::from(DEFAULT_PERIOD_SECONDS);
    let day_level = LogNormal::new(0.0, 0.25).expect("valid lognormal");
    let innovation = Normal::new(0.0, 0.12).expect("valid normal");
    let phi = 0.97;

    let mut records = Vec::with_capacity(per_day * cfg.days as usize);
    let mut log_noise = 0.0f64;
    let mut burst_left = 0usize;
    let mut burst_gain = 1.0;
    let mut outage_left = 0usize;
    for d in 0..cfg.days as usize {
        let day_start = cfg.start + d as i64 * SECONDS_PER_DAY;
        let weekday = (day_start.div_euclid(SECONDS_PER_DAY) + 3).rem_euclid(7);
        let weekend = weekday >= 5;
        let level = day_level.sample(rng);
        for k in 0..per_day {
            let ts = day_start + k as i64 * i64::from(cfg.record_seconds);
            log_noise = phi * log_noise + innovation.sample(rng);
            if outage_left == 0 && rng.random::<f64>() < 2e-4 {
                outage_left = rng.random_range(3..30);
            }
            if outage_left > 0 {
                outage_left -= 1;
                // Keep the trace spanning the full period.
                if (d == 0 && k == 0) || (d + 1 == cfg.days as usize && k + 1 == per_day) {
                    records.push(RawRecord {
                        timestamp: ts,
                        bytes: 0.0,
                        users: 0.0,
                    });
                }
                continue;
            }
            if burst_left == 0 && rng.random::<f64>() < 1e-3 {
                burst_left = rng.random_range(2..10);
                burst_gain = rng.random_range(1.5..3.0);
            }
            let gain = if burst_left > 0 {
                burst_left -= 1;
                burst_gain
            } else {
                1.0
            };
            let h = k as f64 * f64::from(cfg.record_seconds) / 3600.0;
            let activity = ap.shape(h, weekend) * level;
            let bytes = (unit * activity * gain * log_noise.exp()).round().max(0.0);
            let users = (ap.max_users * activity * (0.5 * log_noise).exp()).round().max(0.0);
            records.push(RawRecord {
                timestamp: ts,
                bytes,
                users,
            });
        }
    }
    records
}

/// The corpus resampled onto the default 10-minute grid.
pub fn generate_series(cfg: &CorpusConfig) -> Result<Vec<LoadSeries>> {
    generate_corpus(cfg)?
        .iter()
        .map(|raw| resample(raw, DEFAULT_PERIOD_SECONDS))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let cfg = CorpusConfig {
            aps: 3,
            days: 2,
            ..CorpusConfig::default()
        };
        let a = generate_corpus(&cfg).unwrap();
        assert_eq!(a, generate_corpus(&cfg).unwrap());
        assert_eq!(a.len(), 3);
        assert_eq!(a[1].ap_id(), "ap001");
        let series = generate_series(&cfg).unwrap();
        assert!(series.iter().all(|s| s.start() == SYNTHETIC_EPOCH));
        assert!(series.iter().all(|s| s.load().iter().any(|&v| v > 0.0)));
    }

    #[test]
    fn zero_sized_rejected() {
        let cfg = CorpusConfig {
            aps: 0,
            ..CorpusConfig::default()
        };
        assert!(generate_corpus(&cfg).is_err());
    }
}
