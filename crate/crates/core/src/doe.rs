//! Design-of-experiments harness: a factorial grid of seed lengths, dataset
//! lengths, AP counts, model kinds and horizons, each cell repeated with
//! fresh AP draws, over real and synthetic training regimes.
//!
//! Every random choice descends from the plan's master seed through labelled
//! child seeds, so any cell/repetition can be re-run alone and two runs of
//! the same plan on the same corpus produce identical records.
//!
//! AP draws and model initialization are keyed on the coordinates shared by
//! the conditions being compared (not on seed length, regime, model kind or
//! horizon), so paired cells see the same APs and start from the same
//! weights within a repetition.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{build_feature_matrix, chrono_split, chrono_split_with, WindowedDataset, DEFAULT_LOOKBACK, DEFAULT_TRAIN_FRACTION, N_FEATURES};
use crate::error::{Error, Result};
use crate::forecast::{load_classify, mae_of, predict_all, train, LoadClassReport, ModelKind, ModelSpec, TrainingConfig};
use crate::seed::extract_ap_seed;
use crate::synth::{derive_seed, generate_ap, GeneratorConfig};
use crate::timeseries::{calendar_features, LoadSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Real,
    Synthetic,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Real => "real",
            Regime::Synthetic => "synthetic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    Real,
    Synthetic,
    Both,
}

impl RegimeChoice {
    fn regimes(self) -> &'static [Regime] {
        match self {
            RegimeChoice::Real => &[Regime::Real],
            RegimeChoice::Synthetic => &[Regime::Synthetic],
            RegimeChoice::Both => &[Regime::Real, Regime::Synthetic],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestSetMode {
    SameAps,
    DisjointAps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoEPlan {
    pub seed_days: Vec<u32>,
    pub train_test_days: Vec<u32>,
    /// Paired with `test_ap_counts` element-wise; a single-element list is
    /// broadcast against the other.
    pub train_ap_counts: Vec<usize>,
    pub test_ap_counts: Vec<usize>,
    pub repetitions: usize,
    pub model_kinds: Vec<ModelKind>,
    pub horizons: Vec<usize>,
    pub gammas: Vec<f64>,
    pub regime: RegimeChoice,
    pub test_set_mode: TestSetMode,
    pub rng_seed: u64,
    #[serde(default = "default_lookback")]
    pub lookback: usize,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    /// Horizon element used for LOAD / NO-LOAD; defaults to the last.
    #[serde(default)]
    pub classify_step: Option<usize>,
    #[serde(default)]
    pub model: ModelOptions,
    #[serde(default)]
    pub generator: GeneratorOptions,
}

fn default_lookback() -> usize {
    DEFAULT_LOOKBACK
}

fn default_train_fraction() -> f64 {
    DEFAULT_TRAIN_FRACTION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelOptions {
    pub hidden_size: usize,
    pub conv_channels: usize,
    pub conv_kernel: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        let spec = ModelSpec::new(ModelKind::Recurrent, 1, 1, 1);
        Self {
            hidden_size: spec.hidden_size,
            conv_channels: spec.conv_channels,
            conv_kernel: spec.conv_kernel,
            epochs: spec.training.epochs,
            batch_size: spec.training.batch_size,
            learning_rate: spec.training.learning_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorOptions {
    pub alpha: f64,
    pub beta_gauss: f64,
    pub beta_ar: f64,
    pub clamp_nonnegative: bool,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        let g = GeneratorConfig::default();
        Self {
            alpha: g.alpha,
            beta_gauss: g.beta_gauss,
            beta_ar: g.beta_ar,
            clamp_nonnegative: g.clamp_nonnegative,
        }
    }
}

impl DoEPlan {
    /// Reads a plan from `.toml` or JSON (any other extension).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let plan: Self = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml")) {
            toml::from_str(&text).map_err(|e| Error::Format {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?
        } else {
            serde_json::from_str(&text)?
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("plan: {m}")));
        if self.seed_days.is_empty()
            || self.train_test_days.is_empty()
            || self.train_ap_counts.is_empty()
            || self.test_ap_counts.is_empty()
            || self.model_kinds.is_empty()
            || self.horizons.is_empty()
            || self.gammas.is_empty()
        {
            return bad("all lists must be nonempty");
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1");
        }
        if self.seed_days.contains(&0) || self.train_test_days.contains(&0) {
            return bad("day counts must be positive");
        }
        if self.horizons.contains(&0) || self.lookback == 0 {
            return bad("lookback and horizons must be positive");
        }
        if self.gammas.iter().any(|g| !(*g > 0.0 && *g < 1.0)) {
            return bad("gammas must lie in (0, 1)");
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return bad("train_fraction must lie in (0, 1)");
        }
        if let Some(step) = self.classify_step {
            if self.horizons.iter().any(|&s| step >= s) {
                return bad("classify_step must be below every horizon");
            }
        }
        for (k, m) in self.ap_pairs()? {
            if k == 0 || m == 0 {
                return bad("AP counts must be positive");
            }
            if self.test_set_mode == TestSetMode::SameAps && m > k {
                return bad("same_aps mode needs test_ap_count <= train_ap_count");
            }
        }
        self.generator_config(1, 0).validate()?;
        for &kind in &self.model_kinds {
            for &s in &self.horizons {
                self.model_spec(kind, s, 0).validate()?;
            }
        }
        Ok(())
    }

    /// `(train, test)` AP-count pairs.
    pub fn ap_pairs(&self) -> Result<Vec<(usize, usize)>> {
        let (a, b) = (&self.train_ap_counts, &self.test_ap_counts);
        match (a.len(), b.len()) {
            (x, y) if x == y => Ok(a.iter().copied().zip(b.iter().copied()).collect()),
            (1, _) => Ok(b.iter().map(|&m| (a[0], m)).collect()),
            (_, 1) => Ok(a.iter().map(|&k| (k, b[0])).collect()),
            (x, y) => Err(Error::InvalidConfig(format!(
                "plan: {x} train AP counts cannot pair with {y} test AP counts"
            ))),
        }
    }

    /// Number of distinct APs a repetition of the largest cell draws.
    pub fn aps_needed(&self) -> Result<usize> {
        Ok(self
            .ap_pairs()?
            .into_iter()
            .map(|(k, m)| match self.test_set_mode {
                TestSetMode::SameAps => k,
                TestSetMode::DisjointAps => k + m,
            })
            .max()
            .unwrap_or(0))
    }

    /// Cells in a fixed order. Real-regime cells carry no seed length.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let mut cells = Vec::new();
        let pairs = self.ap_pairs()?;
        for &regime in self.regime.regimes() {
            let seeds: Vec<Option<u32>> = match regime {
                Regime::Real => vec![None],
                Regime::Synthetic => self.seed_days.iter().map(|&d| Some(d)).collect(),
            };
            for &model in &self.model_kinds {
                for &steps in &self.horizons {
                    for &(train_aps, test_aps) in &pairs {
                        for &train_test_days in &self.train_test_days {
                            for &seed_days in &seeds {
                                cells.push(Cell {
                                    regime,
                                    model,
                                    steps,
                                    seed_days,
                                    train_test_days,
                                    train_aps,
                                    test_aps,
                                });
                            }
                        }
                    }
                }
            }
        }
        Ok(cells)
    }

    fn generator_config(&self, days: u32, rng_seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            alpha: self.generator.alpha,
            beta_gauss: self.generator.beta_gauss,
            beta_ar: self.generator.beta_ar,
            duration_days: days,
            clamp_nonnegative: self.generator.clamp_nonnegative,
            rng_seed,
            ..GeneratorConfig::default()
        }
    }

    fn model_spec(&self, kind: ModelKind, steps: usize, rng_seed: u64) -> ModelSpec {
        let o = &self.model;
        let mut spec = ModelSpec::new(kind, self.lookback, steps, N_FEATURES);
        spec.hidden_size = o.hidden_size;
        spec.conv_channels = o.conv_channels;
        spec.conv_kernel = o.conv_kernel;
        spec.training = TrainingConfig {
            epochs: o.epochs,
            batch_size: o.batch_size,
            learning_rate: o.learning_rate,
            rng_seed,
        };
        spec
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub regime: Regime,
    pub model: ModelKind,
    pub steps: usize,
    pub seed_days: Option<u32>,
    pub train_test_days: u32,
    pub train_aps: usize,
    pub test_aps: usize,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/s{}/", self.regime, self.model, self.steps)?;
        match self.seed_days {
            Some(d) => write!(f, "seed{d}/")?,
            None => f.write_str("seed-/")?,
        }
        write!(f, "len{}/k{}/m{}", self.train_test_days, self.train_aps, self.test_aps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoERecord {
    pub cell: Cell,
    pub repetition: usize,
    pub train_ap_ids: Vec<String>,
    pub test_ap_ids: Vec<String>,
    pub train_windows: usize,
    pub test_windows: usize,
    pub final_loss: f64,
    pub mae: f64,
    pub classification: Vec<LoadClassReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoEResult {
    pub plan: DoEPlan,
    pub records: Vec<DoERecord>,
}

/// The seed-extraction input of a cell: the first `seed_days` whole days.
pub fn seed_input(series: &LoadSeries, seed_days: u32) -> Result<LoadSeries> {
    series.truncate_days(seed_days)
}

/// Draws `(train, test)` corpus indices for one repetition.
pub fn sample_aps(plan: &DoEPlan, corpus_len: usize, train_aps: usize, test_aps: usize, repetition: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let mode = plan.test_set_mode;
    let needed = match mode {
        TestSetMode::SameAps => train_aps,
        TestSetMode::DisjointAps => train_aps + test_aps,
    };
    if corpus_len < needed {
        return Err(Error::CorpusTooSmall {
            available: corpus_len,
            needed,
        });
    }
    let key = format!("sample/{mode:?}/k{train_aps}/m{test_aps}/rep{repetition}");
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(plan.rng_seed, &key));
    let drawn = rand::seq::index::sample(&mut rng, corpus_len, needed).into_vec();
    let train = drawn[..train_aps].to_vec();
    let test = match mode {
        TestSetMode::SameAps => drawn[..test_aps].to_vec(),
        TestSetMode::DisjointAps => drawn[train_aps..].to_vec(),
    };
    Ok((train, test))
}

/// Runs every cell and repetition on the current rayon pool. Records come
/// back in cell order, then repetition order.
pub fn run(plan: &DoEPlan, corpus: &[LoadSeries]) -> Result<DoEResult> {
    plan.validate()?;
    let needed = plan.aps_needed()?;
    if corpus.len() < needed {
        return Err(Error::CorpusTooSmall {
            available: corpus.len(),
            needed,
        });
    }
    let items: Vec<(Cell, usize)> = plan
        .cells()?
        .into_iter()
        .flat_map(|c| (0..plan.repetitions).map(move |r| (c, r)))
        .collect();
    log::info!("doe: {} work items over {} APs", items.len(), corpus.len());
    let records = items
        .par_iter()
        .map(|&(cell, rep)| {
            run_cell(plan, corpus, cell, rep).map_err(|e| Error::Cell {
                cell: cell.to_string(),
                repetition: rep,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DoEResult {
        plan: plan.clone(),
        records,
    })
}

/// One cell at one repetition.
pub fn run_cell(plan: &DoEPlan, corpus: &[LoadSeries], cell: Cell, repetition: usize) -> Result<DoERecord> {
    let (train_idx, test_idx) = sample_aps(plan, corpus.len(), cell.train_aps, cell.test_aps, repetition)?;
    let (l, s, frac) = (plan.lookback, cell.steps, plan.train_fraction);

    // Test windows are always real, normalized on the AP's own real training part.
    let mut test = WindowedDataset::empty(l, s, N_FEATURES);
    for &i in &test_idx {
        let series = corpus[i].truncate_days(cell.train_test_days)?;
        let matrix = build_feature_matrix(&series, &calendar_features(&series))?;
        test.extend(&chrono_split(&matrix, l, s, frac)?.test)?;
    }

    let mut training = WindowedDataset::empty(l, s, N_FEATURES);
    for &i in &train_idx {
        let split = match (cell.regime, cell.seed_days) {
            (Regime::Synthetic, Some(days)) => {
                // Synthetic data is scaled like the real seed it came from.
                let real = seed_input(&corpus[i], days)?;
                let norm = build_feature_matrix(&real, &calendar_features(&real))?.normalization();
                let seed = extract_ap_seed(&real)?;
                let label = format!("generate/{cell}/rep{repetition}/{}", corpus[i].ap_id());
                let cfg = plan.generator_config(cell.train_test_days, derive_seed(plan.rng_seed, &label));
                let series = generate_ap(&seed, &cfg)?.series;
                let matrix = build_feature_matrix(&series, &calendar_features(&series))?;
                chrono_split_with(&matrix, l, s, frac, Some(norm))?
            }
            _ => {
                let series = corpus[i].truncate_days(cell.train_test_days)?;
                chrono_split(&build_feature_matrix(&series, &calendar_features(&series))?, l, s, frac)?
            }
        };
        training.extend(&split.train)?;
    }

    let init_key = format!(
        "train/{:?}/k{}/m{}/len{}/rep{repetition}",
        plan.test_set_mode, cell.train_aps, cell.test_aps, cell.train_test_days
    );
    let spec = plan.model_spec(cell.model, s, derive_seed(plan.rng_seed, &init_key));
    let model = train(&spec, &training)?;
    let preds = predict_all(&model, &test)?;
    let truths: Vec<&[f64]> = (0..test.len()).map(|i| test.target(i)).collect();
    let mae = mae_of(&preds, &truths)?;
    let step = plan.classify_step.unwrap_or(s - 1);
    let classification = plan
        .gammas
        .iter()
        .map(|&g| load_classify(&preds, &truths, g, step))
        .collect::<Result<Vec<_>>>()?;
    Ok(DoERecord {
        cell,
        repetition,
        train_ap_ids: train_idx.iter().map(|&i| corpus[i].ap_id().to_string()).collect(),
        test_ap_ids: test_idx.iter().map(|&i| corpus[i].ap_id().to_string()).collect(),
        train_windows: training.len(),
        test_windows: test.len(),
        final_loss: model.log().epoch_loss.last().copied().unwrap_or(f64::NAN),
        mae,
        classification,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub min: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::EmptyInput("aggregate cell"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("aggregate input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let var = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(Summary {
        n: sorted.len(),
        mean,
        std: var.sqrt(),
        median: quantile(&sorted, 0.5),
        q25: quantile(&sorted, 0.25),
        q75: quantile(&sorted, 0.75),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub cell: Cell,
    pub mae: Summary,
}

/// Per-cell MAE summaries, ordered by cell.
pub fn aggregate(records: &[DoERecord]) -> Result<Vec<CellAggregate>> {
    if records.is_empty() {
        return Err(Error::EmptyInput("doe records"));
    }
    let mut groups: BTreeMap<Cell, Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry(r.cell).or_default().push(r.mae);
    }
    groups
        .into_iter()
        .map(|(cell, maes)| Ok(CellAggregate { cell, mae: summarize(&maes)? }))
        .collect()
}

const RECORD_HEADER: [&str; 13] = [
    "regime",
    "model",
    "steps",
    "seed_days",
    "train_test_days",
    "train_aps",
    "test_aps",
    "repetition",
    "train_ap_ids",
    "test_ap_ids",
    "train_windows",
    "test_windows",
    "mae",
];

fn cell_fields(c: &Cell) -> [String; 7] {
    [
        c.regime.to_string(),
        c.model.to_string(),
        c.steps.to_string(),
        c.seed_days.map(|d| d.to_string()).unwrap_or_default(),
        c.train_test_days.to_string(),
        c.train_aps.to_string(),
        c.test_aps.to_string(),
    ]
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_records_csv<W: Write>(records: &[DoERecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        let mut row: Vec<String> = cell_fields(&r.cell).into();
        row.extend([
            r.repetition.to_string(),
            r.train_ap_ids.join(";"),
            r.test_ap_ids.join(";"),
            r.train_windows.to_string(),
            r.test_windows.to_string(),
            r.mae.to_string(),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_classification_csv<W: Write>(records: &[DoERecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = RECORD_HEADER[..8].to_vec();
    header.extend(["gamma", "step", "tp", "tn", "fp", "fn", "fp_rate", "fn_rate"]);
    w.write_record(&header)?;
    for r in records {
        for c in &r.classification {
            let mut row: Vec<String> = cell_fields(&r.cell).into();
            row.extend([
                r.repetition.to_string(),
                c.gamma.to_string(),
                c.step.to_string(),
                c.tp.to_string(),
                c.tn.to_string(),
                c.fp.to_string(),
                c.fn_.to_string(),
                opt(c.fp_rate),
                opt(c.fn_rate),
            ]);
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One boxplot panel per (model, horizon); rows are cells.
pub fn boxplot_panels(aggregates: &[CellAggregate]) -> BTreeMap<(ModelKind, usize), Vec<CellAggregate>> {
    let mut panels: BTreeMap<(ModelKind, usize), Vec<CellAggregate>> = BTreeMap::new();
    for a in aggregates {
        panels.entry((a.cell.model, a.cell.steps)).or_default().push(a.clone());
    }
    panels
}

pub const BOXPLOT_HEADER: [&str; 10] = ["K", "length", "regime", "seed_days", "median", "q25", "q75", "min", "max", "n"];

pub fn write_boxplot_csv<W: Write>(rows: &[CellAggregate], out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("boxplot panel"));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BOXPLOT_HEADER)?;
    for a in rows {
        let (c, m) = (&a.cell, &a.mae);
        w.write_record([
            c.train_aps.to_string(),
            c.train_test_days.to_string(),
            c.regime.to_string(),
            c.seed_days.map(|d| d.to_string()).unwrap_or_default(),
            m.median.to_string(),
            m.q25.to_string(),
            m.q75.to_string(),
            m.min.to_string(),
            m.max.to_string(),
            m.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `records.csv`, `classification.csv`, `aggregates.json` and one
/// `mae_boxplot_<model>_s<steps>.csv` per panel into `dir`.
pub fn write_outputs(result: &DoEResult, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut create = |name: String| -> Result<std::io::BufWriter<std::fs::File>> {
        let path = dir.join(name);
        let f = std::fs::File::create(&path)?;
        written.push(path);
        Ok(std::io::BufWriter::new(f))
    };
    write_records_csv(&result.records, create("records.csv".into())?)?;
    write_classification_csv(&result.records, create("classification.csv".into())?)?;
    let aggregates = aggregate(&result.records)?;
    serde_json::to_writer_pretty(create("aggregates.json".into())?, &aggregates)?;
    for ((model, steps), rows) in boxplot_panels(&aggregates) {
        write_boxplot_csv(&rows, create(format!("mae_boxplot_{model}_s{steps}.csv"))?)?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_series, CorpusConfig};
    use crate::forecast::mae;

    fn small_plan() -> DoEPlan {
        DoEPlan {
            seed_days: vec![1, 3],
            train_test_days: vec![4],
            train_ap_counts: vec![1],
            test_ap_counts: vec![1],
            repetitions: 2,
            model_kinds: vec![ModelKind::LinearAr],
            horizons: vec![1],
            gammas: vec![0.01, 0.1],
            regime: RegimeChoice::Both,
            test_set_mode: TestSetMode::SameAps,
            rng_seed: 11,
            lookback: 6,
            train_fraction: 0.8,
            classify_step: None,
            model: ModelOptions {
                epochs: 3,
                ..ModelOptions::default()
            },
            generator: GeneratorOptions::default(),
        }
    }

    fn corpus(aps: usize) -> Vec<LoadSeries> {
        generate_series(&CorpusConfig {
            aps,
            days: 4,
            rng_seed: 5,
            ..CorpusConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn quantiles_interpolate() {
        let s = summarize(&[0.3, 0.1, 0.2]).unwrap();
        assert!((s.median - 0.2).abs() < 1e-15);
        assert!((s.q25 - 0.15).abs() < 1e-15);
        assert!((s.q75 - 0.25).abs() < 1e-15);
        let one = summarize(&[0.7]).unwrap();
        assert_eq!((one.median, one.q25, one.q75, one.min, one.max, one.std), (0.7, 0.7, 0.7, 0.7, 0.7, 0.0));
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn cells_enumerate_grid() {
        let plan = small_plan();
        let cells = plan.cells().unwrap();
        // One real cell plus one synthetic cell per seed length.
        assert_eq!(cells.len(), 3);
        assert_eq!(cells[0].seed_days, None);
        assert_eq!(cells[2].seed_days, Some(3));
    }

    #[test]
    fn ap_count_pairing() {
        let mut plan = small_plan();
        plan.train_ap_counts = vec![10, 20, 50];
        plan.test_ap_counts = vec![1];
        assert_eq!(plan.ap_pairs().unwrap(), vec![(10, 1), (20, 1), (50, 1)]);
        plan.test_ap_counts = vec![1, 2];
        assert!(plan.ap_pairs().is_err());
    }

    #[test]
    fn invalid_plans_rejected() {
        let mut plan = small_plan();
        plan.gammas.clear();
        assert!(plan.validate().is_err());
        let mut plan = small_plan();
        plan.repetitions = 0;
        assert!(plan.validate().is_err());
        let mut plan = small_plan();
        plan.test_ap_counts = vec![2];
        assert!(plan.validate().is_err());
    }

    #[test]
    fn disjoint_sampling() {
        let mut plan = small_plan();
        plan.test_set_mode = TestSetMode::DisjointAps;
        for rep in 0..50 {
            let (tr, te) = sample_aps(&plan, 7, 3, 4, rep).unwrap();
            assert!(tr.iter().all(|i| !te.contains(i)));
        }
        assert!(matches!(sample_aps(&plan, 6, 3, 4, 0), Err(Error::CorpusTooSmall { .. })));
    }

    #[test]
    fn too_small_corpus_rejected() {
        let mut plan = small_plan();
        plan.train_ap_counts = vec![3];
        assert!(matches!(run(&plan, &corpus(2)), Err(Error::CorpusTooSmall { available: 2, needed: 3 })));
    }

    #[test]
    fn cell_errors_carry_coordinates() {
        let mut plan = small_plan();
        plan.train_test_days = vec![9];
        match run(&plan, &corpus(2)) {
            Err(Error::Cell { cell, repetition, .. }) => {
                assert!(cell.contains("len9"), "{cell}");
                assert_eq!(repetition, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn real_single_cell_matches_direct_composition() {
        let mut plan = small_plan();
        plan.regime = RegimeChoice::Real;
        plan.repetitions = 1;
        let corpus = corpus(3);
        let result = run(&plan, &corpus).unwrap();
        assert_eq!(result.records.len(), 1);
        let rec = &result.records[0];

        let idx = corpus.iter().position(|s| s.ap_id() == rec.train_ap_ids[0]).unwrap();
        let series = corpus[idx].truncate_days(4).unwrap();
        let m = build_feature_matrix(&series, &calendar_features(&series)).unwrap();
        let split = chrono_split(&m, 6, 1, 0.8).unwrap();
        let key = "train/SameAps/k1/m1/len4/rep0";
        let spec = plan.model_spec(ModelKind::LinearAr, 1, derive_seed(11, key));
        let model = train(&spec, &split.train).unwrap();
        assert_eq!(rec.mae, mae(&model, &split.test).unwrap());
        assert_eq!(rec.classification.len(), 2);
    }

    #[test]
    fn reproducible_and_recomputable() {
        let plan = small_plan();
        let corpus = corpus(3);
        let a = run(&plan, &corpus).unwrap();
        let b = run(&plan, &corpus).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.records.len(), 6);
        let agg = aggregate(&a.records).unwrap();
        assert_eq!(agg.len(), 3);
        let mut shuffled = a.records.clone();
        shuffled.reverse();
        assert_eq!(aggregate(&shuffled).unwrap(), agg);
        for g in &agg {
            let maes: Vec<f64> = a.records.iter().filter(|r| r.cell == g.cell).map(|r| r.mae).collect();
            assert_eq!(summarize(&maes).unwrap(), g.mae);
        }
    }

    #[test]
    fn outputs_written() {
        let plan = small_plan();
        let result = run(&plan, &corpus(3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = write_outputs(&result, dir.path()).unwrap();
        assert_eq!(files.len(), 4);
        let records = std::fs::read_to_string(dir.path().join("records.csv")).unwrap();
        assert_eq!(records.lines().count(), 7);
        let cls = std::fs::read_to_string(dir.path().join("classification.csv")).unwrap();
        assert_eq!(cls.lines().count(), 13);
        assert!(dir.path().join("mae_boxplot_linear_ar_s1.csv").exists());
    }
}
