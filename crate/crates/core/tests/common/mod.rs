#![allow(dead_code)]

use chrono::{DateTime, Datelike, Timelike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wifisynth::timeseries::LoadSeries;

pub const MONDAY: i64 = 1_704_067_200;

/// Brute-force weekly profile: for every (weekday, hour) walk every date of
/// that weekday, and for every date scan every sample. Calendar fields come
/// from chrono rather than the crate's own calendar code.
///
/// Returns `(mean, population variance, number of days)` per slot, with the
/// all-weekday hourly pool standing in for weekdays never observed.
pub fn oracle_seed(series: &LoadSeries, values: &[f64]) -> Vec<(f64, f64, usize)> {
    let offset = i64::from(series.timezone().offset_seconds());
    let local = |i: usize| {
        let t = series.start() + i as i64 * i64::from(series.period_seconds()) + offset;
        DateTime::from_timestamp(t, 0).unwrap().naive_utc()
    };
    let mut dates: Vec<chrono::NaiveDate> = (0..values.len()).map(|i| local(i).date()).collect();
    dates.dedup();

    let stats = |xs: &[f64]| {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        Some((m, xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n))
    };

    let mut daily: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); 24]; 7];
    for w in 0..7u32 {
        for date in dates.iter().filter(|d| d.weekday().num_days_from_monday() == w) {
            for h in 0..24u32 {
                let mut sum = 0.0;
                let mut count = 0usize;
                for (i, v) in values.iter().enumerate() {
                    let dt = local(i);
                    if dt.date() == *date && dt.hour() == h {
                        sum += v;
                        count += 1;
                    }
                }
                if count > 0 {
                    daily[w as usize][h as usize].push(sum / count as f64);
                }
            }
        }
    }
    let mut out = Vec::with_capacity(168);
    for w in 0..7 {
        for h in 0..24 {
            let own = &daily[w][h];
            let (m, v) = stats(own).unwrap_or_else(|| {
                let pooled: Vec<f64> = (0..7).flat_map(|x| daily[x][h].iter().copied()).collect();
                stats(&pooled).unwrap_or((0.0, 0.0))
            });
            out.push((m, v, own.len()));
        }
    }
    out
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Random non-negative series of `samples` 10-minute windows; roughly a
/// third of values are zero to exercise degenerate slots.
pub fn random_series(seed: u64, start: i64, samples: usize) -> LoadSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let load: Vec<f64> = (0..samples)
        .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..1e6) })
        .collect();
    let users: Vec<f64> = (0..samples).map(|_| f64::from(rng.random_range(0u32..40))).collect();
    LoadSeries::new(format!("ap{seed}"), start, 600, load, users).unwrap()
}
