//! Sliding-window supervised datasets.
//!
//! A [`FeatureMatrix`] holds six rows per sample, in this fixed order:
//!
//! | row | feature  |
//! |-----|----------|
//! | 0   | load     |
//! | 1   | users    |
//! | 2   | hour_sin |
//! | 3   | hour_cos |
//! | 4   | dow_sin  |
//! | 5   | dow_cos  |
//!
//! Load and users are min-max scaled to `[0, 1]`; the calendar rows are
//! already in `[-1, 1]`. A window with origin `t` takes samples `[t, t+l)` as
//! input and the load of `[t+l, t+l+s)` as target.

use std::io::{Read, Write};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{CalendarFeatures, LoadSeries};

pub const N_FEATURES: usize = 6;
pub const FEATURE_ROWS: [&str; N_FEATURES] = ["load", "users", "hour_sin", "hour_cos", "dow_sin", "dow_cos"];
pub const DEFAULT_LOOKBACK: usize = 12;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.8;

const MAGIC: &[u8; 4] = b"WSWD";
const VERSION: u32 = 1;

/// `(x - offset) / scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMax {
    pub offset: f64,
    pub scale: f64,
}

impl MinMax {
    pub const IDENTITY: MinMax = MinMax { offset: 0.0, scale: 1.0 };

    /// Fits on `values`; a constant input gets scale 1.
    pub fn fit(values: &[f64]) -> Self {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            return Self::IDENTITY;
        }
        let span = hi - lo;
        Self {
            offset: lo,
            scale: if span > 0.0 { span } else { 1.0 },
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.offset) / self.scale
    }

    pub fn invert(&self, y: f64) -> f64 {
        y * self.scale + self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub load: MinMax,
    pub users: MinMax,
}

impl Normalization {
    pub const IDENTITY: Normalization = Normalization {
        load: MinMax::IDENTITY,
        users: MinMax::IDENTITY,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    ap_id: String,
    samples: usize,
    // Unscaled values, row-major N × T.
    raw: Vec<f64>,
    normalization: Normalization,
}

/// Builds the 6 × T matrix, normalizing load and users over the whole series.
pub fn build_feature_matrix(series: &LoadSeries, cal: &CalendarFeatures) -> Result<FeatureMatrix> {
    if series.len() != cal.len() {
        return Err(Error::LengthMismatch(format!(
            "series has {} samples, calendar features {}",
            series.len(),
            cal.len()
        )));
    }
    let samples = series.len();
    let mut raw = Vec::with_capacity(N_FEATURES * samples);
    for row in [
        series.load(),
        series.users(),
        &cal.hour_sin,
        &cal.hour_cos,
        &cal.dow_sin,
        &cal.dow_cos,
    ] {
        raw.extend_from_slice(row);
    }
    let mut m = FeatureMatrix {
        ap_id: series.ap_id().to_string(),
        samples,
        raw,
        normalization: Normalization::IDENTITY,
    };
    m.normalization = m.fit_normalization(0..samples);
    Ok(m)
}

impl FeatureMatrix {
    pub fn ap_id(&self) -> &str {
        &self.ap_id
    }

    /// Number of samples T.
    pub fn len(&self) -> usize {
        self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples == 0
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    fn raw_row(&self, row: usize) -> &[f64] {
        &self.raw[row * self.samples..(row + 1) * self.samples]
    }

    /// Min-max parameters of load and users over the sample range.
    pub fn fit_normalization(&self, range: Range<usize>) -> Normalization {
        let r = range.start.min(self.samples)..range.end.min(self.samples);
        Normalization {
            load: MinMax::fit(&self.raw_row(0)[r.clone()]),
            users: MinMax::fit(&self.raw_row(1)[r]),
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// Normalized value of `row` at sample `t`.
    pub fn value(&self, row: usize, t: usize) -> f64 {
        let v = self.raw[row * self.samples + t];
        match row {
            0 => self.normalization.load.apply(v),
            1 => self.normalization.users.apply(v),
            _ => v,
        }
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        (0..self.samples).map(|t| self.value(row, t)).collect()
    }
}

/// Inputs are stored time-major: window `i` is `l` consecutive rows of `N` features.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    pub lookback: usize,
    pub steps: usize,
    pub n_features: usize,
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
    pub origins: Vec<usize>,
    pub normalization: Normalization,
}

impl WindowedDataset {
    pub fn empty(lookback: usize, steps: usize, n_features: usize) -> Self {
        Self {
            lookback,
            steps,
            n_features,
            inputs: Vec::new(),
            targets: Vec::new(),
            origins: Vec::new(),
            normalization: Normalization::IDENTITY,
        }
    }

    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    pub fn input_len(&self) -> usize {
        self.lookback * self.n_features
    }

    pub fn input(&self, i: usize) -> &[f64] {
        let n = self.input_len();
        &self.inputs[i * n..(i + 1) * n]
    }

    pub fn target(&self, i: usize) -> &[f64] {
        &self.targets[i * self.steps..(i + 1) * self.steps]
    }

    /// Sample indices covered by window `i`, inputs and targets together.
    pub fn span(&self, i: usize) -> Range<usize> {
        let o = self.origins[i];
        o..o + self.lookback + self.steps
    }

    pub fn push(&mut self, origin: usize, input: &[f64], target: &[f64]) -> Result<()> {
        if input.len() != self.input_len() || target.len() != self.steps {
            return Err(Error::ShapeMismatch(format!(
                "window of {} inputs / {} targets, dataset expects {} / {}",
                input.len(),
                target.len(),
                self.input_len(),
                self.steps
            )));
        }
        self.inputs.extend_from_slice(input);
        self.targets.extend_from_slice(target);
        self.origins.push(origin);
        Ok(())
    }

    /// Appends all windows of `other`; origins keep their per-AP meaning.
    pub fn extend(&mut self, other: &WindowedDataset) -> Result<()> {
        if (other.lookback, other.steps, other.n_features) != (self.lookback, self.steps, self.n_features) {
            return Err(Error::ShapeMismatch(format!(
                "cannot merge (l={}, s={}, N={}) into (l={}, s={}, N={})",
                other.lookback, other.steps, other.n_features, self.lookback, self.steps, self.n_features
            )));
        }
        self.inputs.extend_from_slice(&other.inputs);
        self.targets.extend_from_slice(&other.targets);
        self.origins.extend_from_slice(&other.origins);
        Ok(())
    }

    /// Binary container: little-endian header then one record per window
    /// (`l·N` inputs followed by `s` targets, all `f64`).
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        for v in [self.lookback, self.steps, self.n_features] {
            w.write_all(&(v as u32).to_le_bytes())?;
        }
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        let n = self.normalization;
        for v in [n.load.offset, n.load.scale, n.users.offset, n.users.scale] {
            w.write_all(&v.to_le_bytes())?;
        }
        for i in 0..self.len() {
            for v in self.input(i).iter().chain(self.target(i)) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a container written by [`write_binary`](Self::write_binary).
    /// Origins are not stored in the binary body and come back as `0..count`
    /// unless restored from the sidecar.
    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let bad = |m: &str| Error::ShapeMismatch(format!("dataset container: {m}"));
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("bad magic"));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let lookback = read_u32(&mut r)? as usize;
        let steps = read_u32(&mut r)? as usize;
        let n_features = read_u32(&mut r)? as usize;
        let mut count_bytes = [0u8; 8];
        r.read_exact(&mut count_bytes)?;
        let count = u64::from_le_bytes(count_bytes) as usize;
        let mut norm = [0.0; 4];
        for v in &mut norm {
            *v = read_f64(&mut r)?;
        }
        let mut ds = Self::empty(lookback, steps, n_features);
        ds.normalization = Normalization {
            load: MinMax { offset: norm[0], scale: norm[1] },
            users: MinMax { offset: norm[2], scale: norm[3] },
        };
        let per_input = lookback * n_features;
        ds.inputs.reserve(count * per_input);
        ds.targets.reserve(count * steps);
        for i in 0..count {
            for _ in 0..per_input {
                ds.inputs.push(read_f64(&mut r)?);
            }
            for _ in 0..steps {
                ds.targets.push(read_f64(&mut r)?);
            }
            ds.origins.push(i);
        }
        Ok(ds)
    }

    pub fn sidecar(&self, ap_id: &str) -> DatasetSidecar {
        DatasetSidecar {
            ap_id: ap_id.to_string(),
            lookback: self.lookback,
            steps: self.steps,
            n_features: self.n_features,
            count: self.len(),
            feature_rows: FEATURE_ROWS.iter().map(|s| s.to_string()).collect(),
            normalization: self.normalization,
            origins: self.origins.clone(),
        }
    }
}

/// JSON companion of a binary dataset container.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSidecar {
    pub ap_id: String,
    pub lookback: usize,
    pub steps: usize,
    pub n_features: usize,
    pub count: usize,
    pub feature_rows: Vec<String>,
    pub normalization: Normalization,
    pub origins: Vec<usize>,
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Windows whose full span lies inside `range`.
fn window_range(matrix: &FeatureMatrix, l: usize, s: usize, range: Range<usize>) -> WindowedDataset {
    let mut ds = WindowedDataset::empty(l, s, N_FEATURES);
    ds.normalization = matrix.normalization();
    let width = l + s;
    if range.end < range.start + width {
        return ds;
    }
    let count = range.end - range.start - width + 1;
    ds.inputs.reserve(count * l * N_FEATURES);
    ds.targets.reserve(count * s);
    for origin in range.start..range.start + count {
        for t in origin..origin + l {
            for row in 0..N_FEATURES {
                ds.inputs.push(matrix.value(row, t));
            }
        }
        for t in origin + l..origin + width {
            ds.targets.push(matrix.value(0, t));
        }
        ds.origins.push(origin);
    }
    ds
}

/// All `max(0, T - l - s + 1)` windows of the matrix.
pub fn window(matrix: &FeatureMatrix, l: usize, s: usize) -> Result<WindowedDataset> {
    if l == 0 || s == 0 {
        return Err(Error::InvalidConfig(format!("lookback {l} and steps {s} must be positive")));
    }
    Ok(window_range(matrix, l, s, 0..matrix.len()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: WindowedDataset,
    pub test: WindowedDataset,
    /// First test sample index.
    pub boundary: usize,
    /// Fitted on `[0, boundary)` and applied to both sides.
    pub normalization: Normalization,
}

/// Chronological split at `⌊train_fraction · T⌋`, discarding windows that
/// straddle the boundary.
pub fn chrono_split(matrix: &FeatureMatrix, l: usize, s: usize, train_fraction: f64) -> Result<SplitDataset> {
    let norm = if train_fraction > 0.0 && train_fraction < 1.0 {
        matrix.fit_normalization(0..(train_fraction * matrix.len() as f64).floor() as usize)
    } else {
        matrix.normalization()
    };
    chrono_split_with(matrix, l, s, train_fraction, Some(norm))
}

/// As [`chrono_split`], with an explicit normalization (or the matrix's own
/// when `None`).
pub fn chrono_split_with(
    matrix: &FeatureMatrix,
    l: usize,
    s: usize,
    train_fraction: f64,
    normalization: Option<Normalization>,
) -> Result<SplitDataset> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!("train fraction {train_fraction} outside (0, 1)")));
    }
    if l == 0 || s == 0 {
        return Err(Error::InvalidConfig(format!("lookback {l} and steps {s} must be positive")));
    }
    let t = matrix.len();
    let boundary = (train_fraction * t as f64).floor() as usize;
    if boundary < l + s || t - boundary < l + s {
        return Err(Error::InsufficientData(format!(
            "split at {boundary} of {t} samples leaves a side shorter than l + s = {}",
            l + s
        )));
    }
    let normalization = normalization.unwrap_or(matrix.normalization());
    let m = matrix.clone().with_normalization(normalization);
    Ok(SplitDataset {
        train: window_range(&m, l, s, 0..boundary),
        test: window_range(&m, l, s, boundary..t),
        boundary,
        normalization,
    })
}
