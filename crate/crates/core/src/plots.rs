//! Plot-ready CSV emission. Each figure kind becomes one tidy CSV per
//! access point (or per boxplot panel) with fixed columns; no rendering.
//!
//! | kind             | columns                                                 |
//! |------------------|---------------------------------------------------------|
//! | `weekly_profile` | w, h, real_mean, synth_mean, real_std, synth_std        |
//! | `histogram`      | bin_lo, bin_hi, real_count, synth_count                 |
//! | `correlation`    | w, h, real_mean, synth_mean                             |
//! | `autocorr`       | lag, real, synth                                        |
//! | `mae_boxplot`    | K, length, regime, seed_days, median, q25, q75, min, max, n |
//!
//! Load-valued columns are in bytes per window. Unobserved slots and
//! undefined autocorrelations are empty cells.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::doe::{aggregate, boxplot_panels, write_boxplot_csv, DoERecord};
use crate::error::{Error, Result};
use crate::seed::SLOTS;
use crate::timeseries::LoadSeries;
use crate::validate::{autocorr, weekly_profile};

pub const DEFAULT_BINS: usize = 50;
pub const DEFAULT_MAX_LAG: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    WeeklyProfile,
    Histogram,
    Correlation,
    Autocorr,
    MaeBoxplot,
}

impl PlotKind {
    pub const ALL: [PlotKind; 5] = [
        PlotKind::WeeklyProfile,
        PlotKind::Histogram,
        PlotKind::Correlation,
        PlotKind::Autocorr,
        PlotKind::MaeBoxplot,
    ];
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlotKind::WeeklyProfile => "weekly_profile",
            PlotKind::Histogram => "histogram",
            PlotKind::Correlation => "correlation",
            PlotKind::Autocorr => "autocorr",
            PlotKind::MaeBoxplot => "mae_boxplot",
        })
    }
}

impl FromStr for PlotKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::UnknownPlotKind(s.to_string()))
    }
}

/// What a figure is drawn from.
#[derive(Debug, Clone, Copy)]
pub enum PlotSource<'a> {
    /// Real and synthetic series, paired by AP identifier.
    Series {
        real: &'a [LoadSeries],
        synthetic: &'a [LoadSeries],
    },
    Doe(&'a [DoERecord]),
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_weekly_profile<W: Write>(real: &LoadSeries, synth: &LoadSeries, out: W) -> Result<()> {
    let (r, s) = (weekly_profile(real)?, weekly_profile(synth)?);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["w", "h", "real_mean", "synth_mean", "real_std", "synth_std"])?;
    for slot in 0..SLOTS {
        w.write_record([
            (slot / 24).to_string(),
            (slot % 24).to_string(),
            opt(r.means[slot]),
            opt(s.means[slot]),
            opt(r.stds[slot]),
            opt(s.stds[slot]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_correlation<W: Write>(real: &LoadSeries, synth: &LoadSeries, out: W) -> Result<()> {
    let (r, s) = (weekly_profile(real)?, weekly_profile(synth)?);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["w", "h", "real_mean", "synth_mean"])?;
    for slot in 0..SLOTS {
        w.write_record([
            (slot / 24).to_string(),
            (slot % 24).to_string(),
            opt(r.means[slot]),
            opt(s.means[slot]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Counts over `bins` equal-width bins spanning both series; the last bin
/// is closed on the right.
pub fn write_histogram<W: Write>(real: &LoadSeries, synth: &LoadSeries, bins: usize, out: W) -> Result<()> {
    if bins == 0 {
        return Err(Error::InvalidConfig("histogram needs at least one bin".into()));
    }
    let all = real.load().iter().chain(synth.load());
    let lo = all.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = all.copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let count = |values: &[f64]| {
        let mut c = vec![0usize; bins];
        for v in values {
            let b = (((v - lo) / width).floor() as usize).min(bins - 1);
            c[b] += 1;
        }
        c
    };
    let (rc, sc) = (count(real.load()), count(synth.load()));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin_lo", "bin_hi", "real_count", "synth_count"])?;
    for b in 0..bins {
        w.write_record([
            (lo + b as f64 * width).to_string(),
            (lo + (b + 1) as f64 * width).to_string(),
            rc[b].to_string(),
            sc[b].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_autocorr<W: Write>(real: &LoadSeries, synth: &LoadSeries, max_lag: usize, out: W) -> Result<()> {
    let ac = |s: &LoadSeries, lag| autocorr(s.load(), lag).ok().filter(|a| !a.degenerate).map(|a| a.value);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lag", "real", "synth"])?;
    for lag in 1..=max_lag {
        w.write_record([lag.to_string(), opt(ac(real, lag)), opt(ac(synth, lag))])?;
    }
    w.flush()?;
    Ok(())
}

fn create(dir: &Path, name: String, written: &mut Vec<PathBuf>) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path)?;
    written.push(path);
    Ok(BufWriter::new(f))
}

/// Writes the CSVs for `kind` into `dir` and returns their paths.
pub fn emit_plot_data(source: PlotSource<'_>, kind: PlotKind, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    match (source, kind) {
        (PlotSource::Doe(records), PlotKind::MaeBoxplot) => {
            if records.is_empty() {
                return Err(Error::EmptyInput("doe records"));
            }
            for ((model, steps), rows) in boxplot_panels(&aggregate(records)?) {
                write_boxplot_csv(&rows, create(dir, format!("mae_boxplot_{model}_s{steps}.csv"), &mut written)?)?;
            }
        }
        (PlotSource::Doe(_), k) | (PlotSource::Series { .. }, k @ PlotKind::MaeBoxplot) => {
            return Err(Error::InvalidConfig(format!("plot kind `{k}` cannot be drawn from this input")));
        }
        (PlotSource::Series { real, synthetic }, kind) => {
            let mut pairs = 0;
            for r in real {
                let Some(s) = synthetic.iter().find(|s| s.ap_id() == r.ap_id()) else {
                    log::warn!("no synthetic series for ap `{}`", r.ap_id());
                    continue;
                };
                pairs += 1;
                let out = create(dir, format!("{kind}_{}.csv", r.ap_id()), &mut written)?;
                match kind {
                    PlotKind::WeeklyProfile => write_weekly_profile(r, s, out)?,
                    PlotKind::Histogram => write_histogram(r, s, DEFAULT_BINS, out)?,
                    PlotKind::Correlation => write_correlation(r, s, out)?,
                    PlotKind::Autocorr => write_autocorr(r, s, DEFAULT_MAX_LAG, out)?,
                    PlotKind::MaeBoxplot => unreachable!("handled above"),
                }
            }
            if pairs == 0 {
                return Err(Error::EmptyInput("real/synthetic series pairs"));
            }
        }
    }
    Ok(written)
}
