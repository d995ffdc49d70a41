//! Fidelity battery comparing a real series with its synthetic counterpart.
//!
//! Nine metrics per AP: absolute differences of mean and standard deviation
//! (in KB of 1024 bytes), coefficient of variation (percentage points),
//! skewness, excess kurtosis, lag-1 and lag-6 autocorrelation, plus Pearson
//! correlations between the two 168-slot weekly mean and std profiles.
//!
//! Moments use population (biased) estimators: `g1 = m3 / m2^1.5` and
//! `g2 = m4 / m2² - 3`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::SLOTS;
use crate::timeseries::LoadSeries;

pub const BYTES_PER_KB: f64 = 1024.0;
pub const METRIC_COUNT: usize = 9;
pub const METRIC_NAMES: [&str; METRIC_COUNT] = [
    "delta_mean_kb",
    "delta_std_kb",
    "delta_cv_pct",
    "delta_skew",
    "delta_kurt",
    "delta_ac1",
    "delta_ac6",
    "rho_weekly_mean",
    "rho_weekly_std",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub mean: f64,
    pub std: f64,
    /// `100 · std / mean`; `None` when the mean is not positive.
    pub cv: Option<f64>,
    /// `None` for zero-variance input.
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

pub fn moments(series: &[f64]) -> Result<MomentSet> {
    if series.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "moments need at least 2 values, got {}",
            series.len()
        )));
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in series {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let std = m2.sqrt();
    let degenerate = std == 0.0 || std <= 1e-13 * mean.abs();
    Ok(MomentSet {
        mean,
        std,
        cv: (mean > 0.0).then(|| 100.0 * std / mean),
        skewness: (!degenerate).then(|| m3 / m2.powf(1.5)),
        excess_kurtosis: (!degenerate).then(|| m4 / (m2 * m2) - 3.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Autocorrelation {
    pub value: f64,
    /// Zero-variance input; `value` is reported as 0.
    pub degenerate: bool,
}

/// Biased sample autocorrelation at `lag`.
pub fn autocorr(series: &[f64], lag: usize) -> Result<Autocorrelation> {
    if lag == 0 || series.len() <= lag + 1 {
        return Err(Error::InsufficientData(format!(
            "autocorrelation at lag {lag} needs more than {} values, got {}",
            lag + 1,
            series.len()
        )));
    }
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;
    let denom: f64 = series.iter().map(|x| (x - mean).powi(2)).sum();
    if denom == 0.0 || denom.sqrt() <= 1e-13 * mean.abs() * (n as f64).sqrt() {
        return Ok(Autocorrelation {
            value: 0.0,
            degenerate: true,
        });
    }
    let num: f64 = (0..n - lag).map(|t| (series[t] - mean) * (series[t + lag] - mean)).sum();
    Ok(Autocorrelation {
        value: num / denom,
        degenerate: false,
    })
}

/// Per-slot mean and population std of the load; `None` marks unobserved slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklyProfile {
    pub means: Vec<Option<f64>>,
    pub stds: Vec<Option<f64>>,
}

impl WeeklyProfile {
    pub fn observed(&self) -> usize {
        self.means.iter().filter(|m| m.is_some()).count()
    }
}

pub fn weekly_profile(series: &LoadSeries) -> Result<WeeklyProfile> {
    if series.is_empty() {
        return Err(Error::EmptyInput("weekly profile of an empty series"));
    }
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); SLOTS];
    for (i, &v) in series.load().iter().enumerate() {
        buckets[series.calendar(i).slot()].push(v);
    }
    let mut means = Vec::with_capacity(SLOTS);
    let mut stds = Vec::with_capacity(SLOTS);
    for b in &buckets {
        if b.is_empty() {
            means.push(None);
            stds.push(None);
            continue;
        }
        let n = b.len() as f64;
        let m = b.iter().sum::<f64>() / n;
        let var = b.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        means.push(Some(m));
        stds.push(Some(var.sqrt()));
    }
    Ok(WeeklyProfile { means, stds })
}

/// Pearson correlation over positions defined in both vectors.
///
/// Needs at least 3 joint positions. When either side has zero variance
/// the correlation is 1 if the two vectors are identical, else undefined.
pub fn pearson(a: &[Option<f64>], b: &[Option<f64>]) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .collect();
    if pairs.len() < 3 {
        return None;
    }
    if pairs.iter().all(|(x, y)| x == y) {
        // Exact, rather than 1 up to rounding.
        return Some(1.0);
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// The nine metrics, generic over the cell type so summaries and counts
/// share the layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics<T> {
    pub delta_mean: T,
    pub delta_std: T,
    pub delta_cv: T,
    pub delta_skew: T,
    pub delta_kurt: T,
    pub delta_ac1: T,
    pub delta_ac6: T,
    pub rho_weekly_mean: T,
    pub rho_weekly_std: T,
}

impl<T: Copy> Metrics<T> {
    pub fn to_array(&self) -> [T; METRIC_COUNT] {
        [
            self.delta_mean,
            self.delta_std,
            self.delta_cv,
            self.delta_skew,
            self.delta_kurt,
            self.delta_ac1,
            self.delta_ac6,
            self.rho_weekly_mean,
            self.rho_weekly_std,
        ]
    }

    pub fn from_array(a: [T; METRIC_COUNT]) -> Self {
        Self {
            delta_mean: a[0],
            delta_std: a[1],
            delta_cv: a[2],
            delta_skew: a[3],
            delta_kurt: a[4],
            delta_ac1: a[5],
            delta_ac6: a[6],
            rho_weekly_mean: a[7],
            rho_weekly_std: a[8],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub ap_id: String,
    #[serde(flatten)]
    pub metrics: Metrics<Option<f64>>,
}

fn abs_diff(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some((a? - b?).abs())
}

pub fn compare(real: &LoadSeries, synth: &LoadSeries) -> Result<ValidationRow> {
    let mr = moments(real.load())?;
    let ms = moments(synth.load())?;
    let ac = |s: &LoadSeries, lag| autocorr(s.load(), lag).map(|a| a.value);
    let pr = weekly_profile(real)?;
    let ps = weekly_profile(synth)?;
    Ok(ValidationRow {
        ap_id: real.ap_id().to_string(),
        metrics: Metrics {
            delta_mean: Some((mr.mean - ms.mean).abs() / BYTES_PER_KB),
            delta_std: Some((mr.std - ms.std).abs() / BYTES_PER_KB),
            delta_cv: abs_diff(mr.cv, ms.cv),
            delta_skew: abs_diff(mr.skewness, ms.skewness),
            delta_kurt: abs_diff(mr.excess_kurtosis, ms.excess_kurtosis),
            delta_ac1: Some((ac(real, 1)? - ac(synth, 1)?).abs()),
            delta_ac6: Some((ac(real, 6)? - ac(synth, 6)?).abs()),
            rho_weekly_mean: pearson(&pr.means, &ps.means),
            rho_weekly_std: pearson(&pr.stds, &ps.stds),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub summary_mean: Metrics<Option<f64>>,
    pub summary_std: Metrics<Option<f64>>,
    /// Rows contributing to each column (undefined entries are skipped).
    pub counts: Metrics<usize>,
}

/// Column-wise mean and population std over all rows.
pub fn summarize(rows: Vec<ValidationRow>) -> Result<ValidationReport> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("validation rows"));
    }
    let mut mean = [None; METRIC_COUNT];
    let mut std = [None; METRIC_COUNT];
    let mut counts = [0usize; METRIC_COUNT];
    for c in 0..METRIC_COUNT {
        let col: Vec<f64> = rows.iter().filter_map(|r| r.metrics.to_array()[c]).collect();
        counts[c] = col.len();
        if col.is_empty() {
            continue;
        }
        let n = col.len() as f64;
        let m = col.iter().sum::<f64>() / n;
        let v = col.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        mean[c] = Some(m);
        std[c] = Some(v.sqrt());
    }
    Ok(ValidationReport {
        rows,
        summary_mean: Metrics::from_array(mean),
        summary_std: Metrics::from_array(std),
        counts: Metrics::from_array(counts),
    })
}

impl ValidationReport {
    /// CSV in table order; the last two rows are `Mean` and `Std`.
    /// Undefined cells are left empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["ap_id"];
        header.extend(METRIC_NAMES);
        w.write_record(&header)?;
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut write_row = |label: &str, m: &Metrics<Option<f64>>| -> Result<()> {
            let mut rec = vec![label.to_string()];
            rec.extend(m.to_array().into_iter().map(fmt));
            w.write_record(&rec)?;
            Ok(())
        };
        for row in &self.rows {
            write_row(&row.ap_id, &row.metrics)?;
        }
        write_row("Mean", &self.summary_mean)?;
        write_row("Std", &self.summary_std)?;
        w.flush()?;
        Ok(())
    }
}
