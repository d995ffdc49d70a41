//! Command-line front end. [`dispatch`] parses arguments, resolves settings
//! (flags, then the `--config` TOML file, then defaults), logs the resolved
//! set and runs one subcommand.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or I/O error.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{generate_corpus, CorpusConfig};
use crate::dataset::{build_feature_matrix, chrono_split, window, WindowedDataset, DEFAULT_LOOKBACK, DEFAULT_TRAIN_FRACTION};
use crate::doe::{run, write_outputs, DoEPlan, DoEResult};
use crate::error::{Error, Result};
use crate::forecast::{self, load_classify, mae_of, predict_all, ForecastModel, LoadClassReport, ModelKind, ModelSpec};
use crate::plots::{emit_plot_data, PlotKind, PlotSource};
use crate::seed::{extract_ap_seed, seeds_from_json, seeds_to_json};
use crate::synth::{derive_seed, generate_ap, GeneratorConfig, SYNTHETIC_EPOCH};
use crate::timeseries::{calendar_features, parse_trace_csv, resample, write_series_csv, write_trace_csv, LoadSeries, Timezone, DEFAULT_PERIOD_SECONDS};
use crate::validate::{compare, summarize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wifisynth", version, about = "Synthetic Wi-Fi AP traffic: seed extraction, generation, validation and forecasting")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Master seed for every random choice.
    #[arg(long, global = true)]
    rng_seed: Option<u64>,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// error, warn, info, debug or trace.
    #[arg(long, global = true)]
    log_level: Option<String>,
    /// TOML file of default settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Resampling period in seconds; must divide 3600.
    #[arg(long, global = true)]
    period_seconds: Option<u32>,
    /// Calendar zone: `UTC` or a fixed offset such as `+02:00`.
    #[arg(long, global = true)]
    timezone: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a raw trace CSV and write the resampled series.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract weekly seed profiles (load and users) for every AP.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate synthetic traces from a seed file.
    Generate {
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        gen: GeneratorArgs,
    },
    /// Compare real and synthetic series AP by AP.
    Validate {
        #[arg(long)]
        real: PathBuf,
        #[arg(long)]
        synthetic: PathBuf,
        /// `.json` for a JSON report, anything else for CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build sliding-window datasets, one set of files per AP.
    Dataset {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        win: WindowArgs,
        /// Write one unsplit dataset per AP instead of train/test files.
        #[arg(long)]
        no_split: bool,
    },
    /// Train a forecaster on one or more dataset files.
    Train {
        #[arg(long, required = true, num_args = 1..)]
        data: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// MAE and LOAD / NO-LOAD report of a model on dataset files.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        data: Vec<PathBuf>,
        /// Thresholds on the normalized load.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        gamma: Vec<f64>,
        /// Horizon element to classify (default: the last).
        #[arg(long)]
        step: Option<usize>,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Design-of-experiments runs.
    Doe {
        #[command(subcommand)]
        action: DoeAction,
    },
    /// Tidy CSVs for figures.
    PlotData {
        /// weekly_profile, histogram, correlation, autocorr or mae_boxplot.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, requires = "synthetic")]
        real: Option<PathBuf>,
        #[arg(long, requires = "real")]
        synthetic: Option<PathBuf>,
        /// `result.json` written by `doe run`.
        #[arg(long, conflicts_with_all = ["real", "synthetic"])]
        doe: Option<PathBuf>,
    },
    /// Write a simulated raw corpus in the ingestion format.
    Simulate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        aps: usize,
        #[arg(long, default_value_t = 28)]
        days: u32,
    },
}

#[derive(Debug, Subcommand)]
enum DoeAction {
    Run {
        /// Plan as JSON or TOML.
        #[arg(long)]
        plan: PathBuf,
        /// Directory of trace CSVs, or one CSV.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct GeneratorArgs {
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta_gauss: Option<f64>,
    #[arg(long)]
    beta_ar: Option<f64>,
    /// Allow negative generated loads before storage (stored loads are
    /// still floored at zero).
    #[arg(long)]
    no_clamp: bool,
}

#[derive(Debug, Args)]
struct WindowArgs {
    #[arg(long)]
    lookback: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// Training fraction of the chronological split.
    #[arg(long)]
    split: Option<f64>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// convolutional, recurrent or linear_ar.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    hidden_size: Option<usize>,
    #[arg(long)]
    conv_channels: Option<usize>,
    #[arg(long)]
    conv_kernel: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
}

/// Settings that may come from flags or the config file. `None` means
/// "not given here".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub rng_seed: Option<u64>,
    pub threads: Option<usize>,
    pub log_level: Option<String>,
    pub period_seconds: Option<u32>,
    pub timezone: Option<String>,
    pub days: Option<u32>,
    pub alpha: Option<f64>,
    pub beta_gauss: Option<f64>,
    pub beta_ar: Option<f64>,
    pub clamp_nonnegative: Option<bool>,
    pub lookback: Option<usize>,
    pub steps: Option<usize>,
    pub split: Option<f64>,
    pub model: Option<String>,
    pub hidden_size: Option<usize>,
    pub conv_channels: Option<usize>,
    pub conv_kernel: Option<usize>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr, $($f:ident),*) => {
        Settings { $($f: $hi.$f.or($lo.$f)),* }
    };
}

impl Settings {
    /// Fields of `self` win; gaps are filled from `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        overlay!(
            self, lower, rng_seed, threads, log_level, period_seconds, timezone, days, alpha, beta_gauss,
            beta_ar, clamp_nonnegative, lookback, steps, split, model, hidden_size, conv_channels, conv_kernel,
            epochs, batch_size, learning_rate
        )
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Every field filled in with its default.
    pub fn resolved(self) -> Settings {
        let g = GeneratorConfig::default();
        let m = ModelSpec::new(ModelKind::Recurrent, 1, 1, 1);
        self.over(Settings {
            rng_seed: Some(0),
            threads: Some(0),
            log_level: Some("info".into()),
            period_seconds: Some(DEFAULT_PERIOD_SECONDS),
            timezone: Some("UTC".into()),
            days: Some(g.duration_days),
            alpha: Some(g.alpha),
            beta_gauss: Some(g.beta_gauss),
            beta_ar: Some(g.beta_ar),
            clamp_nonnegative: Some(g.clamp_nonnegative),
            lookback: Some(DEFAULT_LOOKBACK),
            steps: Some(1),
            split: Some(DEFAULT_TRAIN_FRACTION),
            model: Some(m.kind.to_string()),
            hidden_size: Some(m.hidden_size),
            conv_channels: Some(m.conv_channels),
            conv_kernel: Some(m.conv_kernel),
            epochs: Some(m.training.epochs),
            batch_size: Some(m.training.batch_size),
            learning_rate: Some(m.training.learning_rate),
        })
    }
}

impl Cli {
    fn flag_settings(&self) -> Settings {
        let g = &self.global;
        let mut s = Settings {
            rng_seed: g.rng_seed,
            threads: g.threads,
            log_level: g.log_level.clone(),
            period_seconds: g.period_seconds,
            timezone: g.timezone.clone(),
            ..Settings::default()
        };
        match &self.command {
            Command::Generate { gen, .. } => {
                s.days = gen.days;
                s.alpha = gen.alpha;
                s.beta_gauss = gen.beta_gauss;
                s.beta_ar = gen.beta_ar;
                s.clamp_nonnegative = gen.no_clamp.then_some(false);
            }
            Command::Dataset { win, .. } => {
                s.lookback = win.lookback;
                s.steps = win.steps;
                s.split = win.split;
            }
            Command::Train { model, .. } => {
                s.model = model.model.clone();
                s.hidden_size = model.hidden_size;
                s.conv_channels = model.conv_channels;
                s.conv_kernel = model.conv_kernel;
                s.epochs = model.epochs;
                s.batch_size = model.batch_size;
                s.learning_rate = model.learning_rate;
            }
            _ => {}
        }
        s
    }
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownPlotKind(_) => Failure::Usage(e.to_string()),
            e => Failure::Data(e),
        }
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            EXIT_DATA
        }
    }
}

fn execute(cli: &Cli) -> std::result::Result<(), Failure> {
    let file = match &cli.global.config {
        Some(path) => Settings::from_toml_file(path)?,
        None => Settings::default(),
    };
    let merged = cli.flag_settings().over(file);
    let explicit_seed = merged.rng_seed;
    let settings = merged.resolved();
    let level = settings.log_level.clone().unwrap_or_default();
    // A second call in the same process keeps the first logger.
    let _ = env_logger::Builder::new().parse_filters(&level).format_timestamp(None).try_init();
    log::info!("resolved config: {}", serde_json::to_string(&settings).unwrap_or_default());

    let ctx = Context::new(settings, explicit_seed)?;
    let threads = ctx.settings.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    pool.install(|| ctx.run(&cli.command))
}

struct Context {
    settings: Settings,
    period: u32,
    tz: Timezone,
    rng_seed: u64,
    /// Seed given by flag or config file; overrides a plan's own seed.
    explicit_seed: Option<u64>,
}

impl Context {
    fn new(settings: Settings, explicit_seed: Option<u64>) -> std::result::Result<Self, Failure> {
        let tz = settings
            .timezone
            .as_deref()
            .unwrap_or("UTC")
            .parse()
            .map_err(|e: Error| Failure::Usage(e.to_string()))?;
        let period = settings.period_seconds.unwrap_or(DEFAULT_PERIOD_SECONDS);
        if period == 0 || 3600 % period != 0 {
            return Err(Failure::Usage(Error::InvalidPeriod(period).to_string()));
        }
        Ok(Self {
            rng_seed: settings.rng_seed.unwrap_or(0),
            explicit_seed,
            settings,
            period,
            tz,
        })
    }

    fn run(&self, command: &Command) -> std::result::Result<(), Failure> {
        match command {
            Command::Ingest { input, out } => {
                let series = load_series(input, self.period, self.tz)?;
                write_series_csv(create(out)?, &series)?;
                log::info!("wrote {} series to {}", series.len(), out.display());
            }
            Command::Extract { input, out } => {
                let series = load_series(input, self.period, self.tz)?;
                let seeds = series.par_iter().map(extract_ap_seed).collect::<Result<Vec<_>>>()?;
                create(out)?.write_all(seeds_to_json(&seeds)?.as_bytes()).map_err(Error::from)?;
                log::info!("wrote seeds for {} APs to {}", seeds.len(), out.display());
            }
            Command::Generate { seed, out, .. } => self.generate(seed, out)?,
            Command::Validate { real, synthetic, out } => self.validate(real, synthetic, out)?,
            Command::Dataset { input, out, no_split, .. } => self.dataset(input, out, *no_split)?,
            Command::Train { data, out, .. } => self.train(data, out)?,
            Command::Evaluate {
                model,
                data,
                gamma,
                step,
                out,
            } => evaluate(model, data, gamma, *step, out.as_deref())?,
            Command::Doe {
                action: DoeAction::Run { plan, corpus, out },
            } => {
                let mut plan = DoEPlan::load(plan)?;
                if let Some(seed) = self.explicit_seed {
                    plan.rng_seed = seed;
                }
                let corpus = load_series(corpus, self.period, self.tz)?;
                let result = run(&plan, &corpus)?;
                let files = write_outputs(&result, out)?;
                serde_json::to_writer(create(&out.join("result.json"))?, &result).map_err(Error::from)?;
                log::info!("doe: {} records, {} files in {}", result.records.len(), files.len() + 1, out.display());
            }
            Command::PlotData {
                kind,
                out,
                real,
                synthetic,
                doe,
            } => {
                let kind: PlotKind = kind.parse()?;
                let files = match (real, synthetic, doe) {
                    (Some(r), Some(s), None) => {
                        let real = load_series(r, self.period, self.tz)?;
                        let synthetic = load_series(s, self.period, self.tz)?;
                        emit_plot_data(PlotSource::Series { real: &real, synthetic: &synthetic }, kind, out)?
                    }
                    (None, None, Some(d)) => {
                        let result: DoEResult = serde_json::from_reader(BufReader::new(open(d)?)).map_err(Error::from)?;
                        emit_plot_data(PlotSource::Doe(&result.records), kind, out)?
                    }
                    _ => return Err(Failure::Usage("plot-data needs --real and --synthetic, or --doe".into())),
                };
                log::info!("wrote {} plot files", files.len());
            }
            Command::Simulate { out, aps, days } => {
                let cfg = CorpusConfig {
                    aps: *aps,
                    days: *days,
                    rng_seed: self.rng_seed,
                    ..CorpusConfig::default()
                };
                let traces = generate_corpus(&cfg)?;
                write_trace_csv(create(out)?, &traces)?;
            }
        }
        Ok(())
    }

    fn generator_config(&self) -> GeneratorConfig {
        let s = &self.settings;
        let d = GeneratorConfig::default();
        GeneratorConfig {
            alpha: s.alpha.unwrap_or(d.alpha),
            beta_gauss: s.beta_gauss.unwrap_or(d.beta_gauss),
            beta_ar: s.beta_ar.unwrap_or(d.beta_ar),
            duration_days: s.days.unwrap_or(d.duration_days),
            period_seconds: d.period_seconds,
            clamp_nonnegative: s.clamp_nonnegative.unwrap_or(d.clamp_nonnegative),
            rng_seed: self.rng_seed,
        }
    }

    fn generate(&self, seed_path: &Path, out: &Path) -> Result<()> {
        let seeds = seeds_from_json(&std::fs::read_to_string(seed_path)?)?;
        let base = self.generator_config();
        let series = seeds
            .par_iter()
            .map(|seed| {
                let cfg = GeneratorConfig {
                    period_seconds: seed.load.period_seconds,
                    rng_seed: derive_seed(base.rng_seed, seed.ap_id()),
                    ..base.clone()
                };
                let trace = generate_ap(seed, &cfg)?;
                self.localize(trace.series)
            })
            .collect::<Result<Vec<_>>>()?;
        write_series_csv(create(out)?, &series)?;
        let sidecar = sidecar_path(out, "config.json");
        serde_json::to_writer_pretty(create(&sidecar)?, &base)?;
        log::info!("wrote {} synthetic series to {}", series.len(), out.display());
        Ok(())
    }

    /// Shifts a synthetic series so its first sample falls on Monday 00:00
    /// in the configured zone, where the seed's slot 0 lives.
    fn localize(&self, series: LoadSeries) -> Result<LoadSeries> {
        let offset = i64::from(self.tz.offset_seconds());
        if offset == 0 {
            return Ok(series);
        }
        LoadSeries::new(
            series.ap_id(),
            SYNTHETIC_EPOCH - offset,
            series.period_seconds(),
            series.load().to_vec(),
            series.users().to_vec(),
        )
        .map(|s| s.with_timezone(self.tz))
    }

    fn validate(&self, real: &Path, synthetic: &Path, out: &Path) -> Result<()> {
        let real = load_series(real, self.period, self.tz)?;
        let synthetic = load_series(synthetic, self.period, self.tz)?;
        let rows = real
            .par_iter()
            .filter_map(|r| {
                let s = synthetic.iter().find(|s| s.ap_id() == r.ap_id());
                if s.is_none() {
                    log::warn!("no synthetic series for ap `{}`", r.ap_id());
                }
                s.map(|s| compare(r, s))
            })
            .collect::<Result<Vec<_>>>()?;
        let report = summarize(rows)?;
        if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::to_writer_pretty(create(out)?, &report)?;
        } else {
            report.write_csv(create(out)?)?;
        }
        log::info!("validated {} APs", report.rows.len());
        Ok(())
    }

    fn dataset(&self, input: &Path, out: &Path, no_split: bool) -> Result<()> {
        let s = &self.settings;
        let (l, steps, frac) = (
            s.lookback.unwrap_or(DEFAULT_LOOKBACK),
            s.steps.unwrap_or(1),
            s.split.unwrap_or(DEFAULT_TRAIN_FRACTION),
        );
        let series = load_series(input, self.period, self.tz)?;
        std::fs::create_dir_all(out)?;
        for ser in &series {
            let matrix = build_feature_matrix(ser, &calendar_features(ser))?;
            let id = ser.ap_id();
            if no_split {
                save_dataset(&window(&matrix, l, steps)?, id, &out.join(format!("{id}.bin")))?;
            } else {
                let split = chrono_split(&matrix, l, steps, frac)?;
                save_dataset(&split.train, id, &out.join(format!("{id}.train.bin")))?;
                save_dataset(&split.test, id, &out.join(format!("{id}.test.bin")))?;
            }
        }
        log::info!("wrote datasets for {} APs to {}", series.len(), out.display());
        Ok(())
    }

    fn train(&self, data: &[PathBuf], out: &Path) -> std::result::Result<(), Failure> {
        let s = &self.settings;
        let ds = read_datasets(data)?;
        let kind: ModelKind = s.model.as_deref().unwrap_or("recurrent").parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
        let mut spec = ModelSpec::for_dataset(kind, &ds);
        let d = spec.clone();
        spec.hidden_size = s.hidden_size.unwrap_or(d.hidden_size);
        spec.conv_channels = s.conv_channels.unwrap_or(d.conv_channels);
        spec.conv_kernel = s.conv_kernel.unwrap_or(d.conv_kernel);
        spec.training.epochs = s.epochs.unwrap_or(d.training.epochs);
        spec.training.batch_size = s.batch_size.unwrap_or(d.training.batch_size);
        spec.training.learning_rate = s.learning_rate.unwrap_or(d.training.learning_rate);
        spec.training.rng_seed = self.rng_seed;
        let model = forecast::train(&spec, &ds)?;
        model.write_checkpoint(create(out)?)?;
        let log = model.log();
        println!(
            "{}",
            serde_json::json!({
                "model": kind.to_string(),
                "windows": ds.len(),
                "parameters": spec.param_count(),
                "epochs": log.epoch_loss.len(),
                "final_loss": log.epoch_loss.last(),
                "best_loss": log.best_loss.last(),
            })
        );
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct EvaluationReport {
    model: ModelKind,
    windows: usize,
    mae: f64,
    classification: Vec<LoadClassReport>,
}

fn evaluate(model: &Path, data: &[PathBuf], gammas: &[f64], step: Option<usize>, out: Option<&Path>) -> Result<()> {
    let model = ForecastModel::read_checkpoint(BufReader::new(open(model)?))?;
    let ds = read_datasets(data)?;
    let preds = predict_all(&model, &ds)?;
    let truths: Vec<&[f64]> = (0..ds.len()).map(|i| ds.target(i)).collect();
    let step = step.unwrap_or(model.spec().steps - 1);
    let report = EvaluationReport {
        model: model.spec().kind,
        windows: ds.len(),
        mae: mae_of(&preds, &truths)?,
        classification: gammas
            .iter()
            .map(|&g| load_classify(&preds, &truths, g, step))
            .collect::<Result<Vec<_>>>()?,
    };
    let text = serde_json::to_string_pretty(&report)?;
    match out {
        Some(path) => create(path)?.write_all(text.as_bytes())?,
        None => println!("{text}"),
    }
    Ok(())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

fn save_dataset(ds: &WindowedDataset, ap_id: &str, path: &Path) -> Result<()> {
    ds.write_binary(create(path)?)?;
    serde_json::to_writer_pretty(create(&path.with_extension("json"))?, &ds.sidecar(ap_id))?;
    Ok(())
}

fn read_datasets(paths: &[PathBuf]) -> Result<WindowedDataset> {
    let mut merged: Option<WindowedDataset> = None;
    for p in paths {
        let ds = WindowedDataset::read_binary(BufReader::new(open(p)?)).map_err(|e| Error::Format {
            path: p.clone(),
            message: e.to_string(),
        })?;
        match merged.as_mut() {
            Some(m) => m.extend(&ds)?,
            None => merged = Some(ds),
        }
    }
    merged.ok_or(Error::EmptyInput("dataset files"))
}

/// Reads trace CSVs (one file, or every `.csv` in a directory in name
/// order) and resamples each AP.
pub fn load_series(path: &Path, period_seconds: u32, tz: Timezone) -> Result<Vec<LoadSeries>> {
    let files = if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")))
            .collect();
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    let mut out = Vec::new();
    for f in files {
        let traces = parse_trace_csv(BufReader::new(open(&f)?)).map_err(|e| Error::Format {
            path: f.clone(),
            message: e.to_string(),
        })?;
        for t in &traces {
            out.push(resample(t, period_seconds)?.with_timezone(tz));
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("no traces in input"));
    }
    Ok(out)
}
