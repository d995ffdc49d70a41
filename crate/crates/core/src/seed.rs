//! Weekly seed knowledge: per-(weekday, hour) mean and variance profiles.
//!
//! For every calendar date `d` and hour `h` the series is averaged into a
//! daily hour mean `μ[d,h]`. The seed slot `(w, h)` then holds the mean of
//! `μ[d,h]` over all dates `d` falling on weekday `w`, and the population
//! variance of those same values (dividing by the number of dates).
//!
//! Weekdays never observed in the series (e.g. a one-day seed) fall back to
//! the statistics of hour `h` pooled over all observed dates, with
//! `day_count = 0` marking the slot as borrowed.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{day_index, LoadSeries, SECONDS_PER_DAY, SECONDS_PER_HOUR};

pub const SLOTS: usize = 168;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feature {
    Load,
    Users,
}

impl Feature {
    pub fn values(self, series: &LoadSeries) -> &[f64] {
        match self {
            Feature::Load => series.load(),
            Feature::Users => series.users(),
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Feature::Load => "load",
            Feature::Users => "users",
        })
    }
}

impl FromStr for Feature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "load" | "bytes" => Ok(Feature::Load),
            "users" => Ok(Feature::Users),
            other => Err(Error::InvalidConfig(format!("unknown feature `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedSlot {
    pub w: usize,
    pub h: usize,
    pub mean: f64,
    pub variance: f64,
    pub day_count: usize,
}

/// The 168-slot weekly profile of one feature of one AP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedKnowledge {
    pub ap_id: String,
    pub feature: Feature,
    pub period_seconds: u32,
    /// First resampled value of the source series; seeds the AR noise state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_observation: Option<f64>,
    pub slots: Vec<SeedSlot>,
}

impl SeedKnowledge {
    /// Builds a seed from 168 `(mean, variance)` pairs ordered Mon 0h .. Sun 23h.
    pub fn from_profile(
        ap_id: impl Into<String>,
        feature: Feature,
        period_seconds: u32,
        profile: &[(f64, f64)],
    ) -> Result<Self> {
        if profile.len() != SLOTS {
            return Err(Error::InvalidConfig(format!(
                "seed profile needs {SLOTS} slots, got {}",
                profile.len()
            )));
        }
        let seed = Self {
            ap_id: ap_id.into(),
            feature,
            period_seconds,
            first_observation: None,
            slots: profile
                .iter()
                .enumerate()
                .map(|(i, &(mean, variance))| SeedSlot {
                    w: i / 24,
                    h: i % 24,
                    mean,
                    variance,
                    day_count: 0,
                })
                .collect(),
        };
        seed.validate()?;
        Ok(seed)
    }

    pub fn constant(ap_id: impl Into<String>, feature: Feature, period_seconds: u32, mean: f64, variance: f64) -> Result<Self> {
        Self::from_profile(ap_id, feature, period_seconds, &[(mean, variance); SLOTS])
    }

    pub fn with_first_observation(mut self, value: Option<f64>) -> Self {
        self.first_observation = value;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.slots.len() != SLOTS {
            return Err(Error::InvalidConfig(format!(
                "seed `{}` has {} slots, expected {SLOTS}",
                self.ap_id,
                self.slots.len()
            )));
        }
        if self.period_seconds == 0 || 3600 % self.period_seconds != 0 {
            return Err(Error::InvalidPeriod(self.period_seconds));
        }
        for (i, s) in self.slots.iter().enumerate() {
            if s.w != i / 24 || s.h != i % 24 {
                return Err(Error::InvalidConfig(format!(
                    "slot {i} is labelled ({}, {}), expected ({}, {})",
                    s.w,
                    s.h,
                    i / 24,
                    i % 24
                )));
            }
            if !(s.mean.is_finite() && s.variance.is_finite()) || s.mean < 0.0 || s.variance < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "slot ({}, {}) has mean {} and variance {}",
                    s.w, s.h, s.mean, s.variance
                )));
            }
            if s.day_count <= 1 && s.day_count != 0 && s.variance != 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "slot ({}, {}) observed on one day but has non-zero variance",
                    s.w, s.h
                )));
            }
        }
        Ok(())
    }

    pub fn slot(&self, w: usize, h: usize) -> &SeedSlot {
        &self.slots[w * 24 + h]
    }

    pub fn means(&self) -> Vec<f64> {
        self.slots.iter().map(|s| s.mean).collect()
    }

    pub fn samples_per_hour(&self) -> usize {
        (SECONDS_PER_HOUR / i64::from(self.period_seconds)) as usize
    }
}

/// Load and users seeds of one AP, as stored in a seed file.
#[derive(Debug, Clone, PartialEq)]
pub struct ApSeed {
    pub load: SeedKnowledge,
    pub users: SeedKnowledge,
}

impl ApSeed {
    pub fn ap_id(&self) -> &str {
        &self.load.ap_id
    }

    /// Serializes as a JSON array of the two per-feature documents.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&[&self.load, &self.users])?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mut seeds = seeds_from_json(text)?;
        if seeds.len() != 1 {
            return Err(Error::InvalidConfig(format!("expected one AP in seed file, found {}", seeds.len())));
        }
        Ok(seeds.remove(0))
    }

    fn from_documents(load: Option<SeedKnowledge>, users: Option<SeedKnowledge>) -> Result<Self> {
        match (load, users) {
            (Some(load), Some(users)) => Ok(Self { load, users }),
            (Some(load), None) => {
                let users = SeedKnowledge::constant(load.ap_id.clone(), Feature::Users, load.period_seconds, 0.0, 0.0)?;
                Ok(Self { load, users })
            }
            (None, _) => Err(Error::InvalidConfig("seed file has an AP without a load document".into())),
        }
    }
}

/// Seed file for several APs: one flat JSON array of per-feature documents.
pub fn seeds_to_json(seeds: &[ApSeed]) -> Result<String> {
    let docs: Vec<&SeedKnowledge> = seeds.iter().flat_map(|s| [&s.load, &s.users]).collect();
    Ok(serde_json::to_string_pretty(&docs)?)
}

/// Groups documents by AP in first-appearance order. An AP without a users
/// document gets an all-zero users seed.
pub fn seeds_from_json(text: &str) -> Result<Vec<ApSeed>> {
    let docs: Vec<SeedKnowledge> = serde_json::from_str(text)?;
    if docs.is_empty() {
        return Err(Error::EmptyInput("seed file"));
    }
    let mut order: Vec<String> = Vec::new();
    let mut slots: Vec<(Option<SeedKnowledge>, Option<SeedKnowledge>)> = Vec::new();
    for doc in docs {
        doc.validate()?;
        let i = match order.iter().position(|id| *id == doc.ap_id) {
            Some(i) => i,
            None => {
                order.push(doc.ap_id.clone());
                slots.push((None, None));
                slots.len() - 1
            }
        };
        let entry = match doc.feature {
            Feature::Load => &mut slots[i].0,
            Feature::Users => &mut slots[i].1,
        };
        if entry.is_some() {
            return Err(Error::InvalidConfig(format!("duplicate {} seed for ap `{}`", doc.feature, doc.ap_id)));
        }
        *entry = Some(doc);
    }
    slots.into_iter().map(|(l, u)| ApSeed::from_documents(l, u)).collect()
}

/// Mean of one (date, hour) block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HourlyMean {
    pub mean: f64,
    pub samples: usize,
    /// Fewer samples than a fully covered hour.
    pub partial: bool,
}

/// Mean of the samples of `series` falling in `hour` of local date `day`.
pub fn hourly_mean(series: &LoadSeries, feature: Feature, day: NaiveDate, hour: u32) -> Result<HourlyMean> {
    if hour >= 24 {
        return Err(Error::InvalidConfig(format!("hour {hour} out of range")));
    }
    let period = i64::from(series.period_seconds());
    let block_start = day_index(day) * SECONDS_PER_DAY + i64::from(hour) * SECONDS_PER_HOUR
        - i64::from(series.timezone().offset_seconds());
    let block_end = block_start + SECONDS_PER_HOUR;
    let first = ceil_div(block_start - series.start(), period).max(0);
    let last = ceil_div(block_end - series.start(), period).min(series.len() as i64);
    if last <= first {
        return Err(Error::EmptyBlock);
    }
    let values = &feature.values(series)[first as usize..last as usize];
    let samples = values.len();
    Ok(HourlyMean {
        mean: values.iter().sum::<f64>() / samples as f64,
        samples,
        partial: samples < series.samples_per_hour(),
    })
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -(-a).div_euclid(b)
}

/// Extracts the 168-slot seed of `feature` from a series spanning at least a day.
pub fn extract_seed(series: &LoadSeries, feature: Feature) -> Result<SeedKnowledge> {
    if series.span_seconds() < SECONDS_PER_DAY {
        return Err(Error::SeriesTooShort(format!(
            "seed extraction needs one full day, `{}` spans {} s",
            series.ap_id(),
            series.span_seconds()
        )));
    }
    let values = feature.values(series);

    // Accumulate (date, hour) blocks; dates are contiguous so a flat buffer suffices.
    let first_day = series.calendar(0).day;
    let last_day = series.calendar(series.len() - 1).day;
    let n_days = (last_day - first_day + 1) as usize;
    let mut sums = vec![0.0; n_days * 24];
    let mut counts = vec![0usize; n_days * 24];
    let mut weekday_of = vec![0usize; n_days];
    for (i, &v) in values.iter().enumerate() {
        let cal = series.calendar(i);
        let d = (cal.day - first_day) as usize;
        weekday_of[d] = cal.weekday;
        sums[d * 24 + cal.hour] += v;
        counts[d * 24 + cal.hour] += 1;
    }

    // Daily hour means grouped per weekly slot, plus per-hour pools for fallback.
    let mut per_slot: Vec<Vec<f64>> = vec![Vec::new(); SLOTS];
    let mut per_hour: Vec<Vec<f64>> = vec![Vec::new(); 24];
    for d in 0..n_days {
        for h in 0..24 {
            let c = counts[d * 24 + h];
            if c == 0 {
                continue;
            }
            let mu = sums[d * 24 + h] / c as f64;
            per_slot[weekday_of[d] * 24 + h].push(mu);
            per_hour[h].push(mu);
        }
    }

    let hour_fallback: Vec<(f64, f64)> = per_hour.iter().map(|v| mean_and_population_variance(v)).collect();
    let slots = per_slot
        .iter()
        .enumerate()
        .map(|(i, mus)| {
            let (mean, variance) = if mus.is_empty() {
                hour_fallback[i % 24]
            } else {
                mean_and_population_variance(mus)
            };
            SeedSlot {
                w: i / 24,
                h: i % 24,
                mean,
                variance,
                day_count: mus.len(),
            }
        })
        .collect();

    Ok(SeedKnowledge {
        ap_id: series.ap_id().to_string(),
        feature,
        period_seconds: series.period_seconds(),
        first_observation: values.first().copied(),
        slots,
    })
}

/// Both feature seeds of an AP.
pub fn extract_ap_seed(series: &LoadSeries) -> Result<ApSeed> {
    Ok(ApSeed {
        load: extract_seed(series, Feature::Load)?,
        users: extract_seed(series, Feature::Users)?,
    })
}

/// `(0, 0)` for an empty slice.
fn mean_and_population_variance(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MONDAY: i64 = 1_704_067_200;

    fn series(start: i64, load: Vec<f64>) -> LoadSeries {
        let users = vec![0.0; load.len()];
        LoadSeries::new("ap", start, 600, load, users).unwrap()
    }

    #[test]
    fn hourly_mean_full_block() {
        let s = series(MONDAY, (1..=144).map(f64::from).collect());
        let m = hourly_mean(&s, Feature::Load, NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(), 0).unwrap();
        assert_eq!(m.mean, 3.5);
        assert_eq!(m.samples, 6);
        assert!(!m.partial);
    }

    #[test]
    fn hourly_mean_zero_and_partial() {
        // Starts at 00:40: hour 0 has only samples at :40 and :50.
        let mut load = vec![0.0; 10];
        load[0] = 4.0;
        load[1] = 8.0;
        let s = series(MONDAY + 2400, load);
        let day = NaiveDate::from_ymd_opt(2024, 1, 1).unwrap();
        let m = hourly_mean(&s, Feature::Load, day, 0).unwrap();
        assert_eq!((m.mean, m.samples, m.partial), (6.0, 2, true));
        let z = hourly_mean(&s, Feature::Load, day, 1).unwrap();
        assert_eq!(z.mean, 0.0);
        assert!(matches!(hourly_mean(&s, Feature::Load, day, 5), Err(Error::EmptyBlock)));
    }

    #[test]
    fn constant_series_has_zero_variance() {
        let s = series(MONDAY, vec![7.5; 14 * 144]);
        let seed = extract_seed(&s, Feature::Load).unwrap();
        assert_eq!(seed.slots.len(), SLOTS);
        for slot in &seed.slots {
            assert_eq!(slot.mean, 7.5);
            assert_eq!(slot.variance, 0.0);
            assert_eq!(slot.day_count, 2);
        }
    }

    #[test]
    fn two_mondays_hour_nine() {
        let mut load = vec![0.0; 14 * 144];
        load[9 * 6..10 * 6].fill(10.0);
        load[7 * 144 + 9 * 6..7 * 144 + 10 * 6].fill(20.0);
        let seed = extract_seed(&series(MONDAY, load), Feature::Load).unwrap();
        let slot = seed.slot(0, 9);
        assert_eq!((slot.mean, slot.variance, slot.day_count), (15.0, 25.0, 2));
        assert_eq!(seed.slot(0, 8).mean, 0.0);
        assert_eq!(seed.slot(1, 9).variance, 0.0);
    }

    #[test]
    fn one_day_seed_borrows_other_weekdays() {
        let tuesday = MONDAY + SECONDS_PER_DAY;
        let load: Vec<f64> = (0..144).map(|i| (i / 6) as f64).collect();
        let seed = extract_seed(&series(tuesday, load), Feature::Load).unwrap();
        for w in 0..7 {
            for h in 0..24 {
                let slot = seed.slot(w, h);
                assert_eq!(slot.day_count, usize::from(w == 1));
                assert_eq!(slot.variance, 0.0);
                assert_eq!(slot.mean, h as f64);
            }
        }
        assert_eq!(seed.first_observation, Some(0.0));
    }

    #[test]
    fn too_short_series_rejected() {
        assert!(matches!(
            extract_seed(&series(MONDAY, vec![1.0; 143]), Feature::Load),
            Err(Error::SeriesTooShort(_))
        ));
    }

    #[test]
    fn seed_json_round_trip_and_validation() {
        let s = series(MONDAY, (0..288).map(|i| (i % 17) as f64).collect());
        let seed = extract_ap_seed(&s).unwrap();
        let text = seed.to_json().unwrap();
        let back = ApSeed::from_json(&text).unwrap();
        assert_eq!(back, seed);

        let mut broken = seed.load.clone();
        broken.slots.pop();
        assert!(broken.validate().is_err());
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let first = &v[0]["slots"][0];
        for key in ["w", "h", "mean", "variance", "day_count"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
    }
}
