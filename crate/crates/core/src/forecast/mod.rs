//! Traffic forecasters trained by mini-batch gradient descent.
//!
//! Three architectures map an `l × N` window to `s` future normalized loads:
//! a single affine map (`linear_ar`), one 1-D convolution with a rectifier
//! and a dense head (`convolutional`), and a single-layer gated recurrent
//! cell with a dense head on the last hidden state (`recurrent`). Training
//! minimizes mean squared error with plain SGD; evaluation uses MAE and the
//! LOAD / NO-LOAD threshold report.
//!
//! LOAD / NO-LOAD follows the energy-saving convention: a false positive is
//! predicting NO-LOAD (`pred < γ`) when the truth is LOAD (`truth ≥ γ`), a
//! false negative is the reverse.

mod nets;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::WindowedDataset;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"WSFM";
const VERSION: u32 = 1;

/// Denominator floor of the gradient-check relative error, as a fraction of
/// the largest analytic gradient component. Components far below the
/// gradient's scale are compared on that scale instead of their own, where
/// finite-difference rounding would dominate.
pub const GRAD_CHECK_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Convolutional,
    Recurrent,
    LinearAr,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Convolutional, ModelKind::Recurrent, ModelKind::LinearAr];
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ModelKind::Convolutional => "convolutional",
            ModelKind::Recurrent => "recurrent",
            ModelKind::LinearAr => "linear_ar",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "convolutional" | "conv" | "cnn" => Ok(ModelKind::Convolutional),
            "recurrent" | "gru" | "rnn" | "lstm" => Ok(ModelKind::Recurrent),
            "linear_ar" | "linear" | "ar" => Ok(ModelKind::LinearAr),
            other => Err(Error::InvalidConfig(format!("unknown model kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub rng_seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            batch_size: 32,
            learning_rate: 1e-2,
            rng_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub hidden_size: usize,
    pub conv_channels: usize,
    pub conv_kernel: usize,
    pub lookback: usize,
    pub steps: usize,
    pub n_features: usize,
    pub training: TrainingConfig,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, lookback: usize, steps: usize, n_features: usize) -> Self {
        Self {
            kind,
            hidden_size: 32,
            conv_channels: 16,
            conv_kernel: 3,
            lookback,
            steps,
            n_features,
            training: TrainingConfig::default(),
        }
    }

    pub fn for_dataset(kind: ModelKind, data: &WindowedDataset) -> Self {
        Self::new(kind, data.lookback, data.steps, data.n_features)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.lookback == 0 || self.steps == 0 || self.n_features == 0 {
            return bad(format!(
                "lookback {}, steps {} and features {} must be positive",
                self.lookback, self.steps, self.n_features
            ));
        }
        match self.kind {
            ModelKind::Recurrent if self.hidden_size == 0 => return bad("hidden_size must be positive".into()),
            ModelKind::Convolutional if self.conv_channels == 0 || self.conv_kernel == 0 => {
                return bad("conv channels and kernel must be positive".into())
            }
            ModelKind::Convolutional if self.conv_kernel > self.lookback => {
                return bad(format!("kernel {} longer than lookback {}", self.conv_kernel, self.lookback))
            }
            _ => {}
        }
        let t = &self.training;
        if t.epochs == 0 || t.batch_size == 0 || !(t.learning_rate > 0.0 && t.learning_rate.is_finite()) {
            return bad(format!(
                "epochs {}, batch size {} and learning rate {} must be positive",
                t.epochs, t.batch_size, t.learning_rate
            ));
        }
        Ok(())
    }

    pub fn param_count(&self) -> usize {
        nets::param_count(self)
    }

    pub fn input_len(&self) -> usize {
        self.lookback * self.n_features
    }

    /// Seeded uniform `±1/√fan_in` weights and zero biases.
    pub fn initial_parameters(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.training.rng_seed);
        let mut params = Vec::with_capacity(self.param_count());
        for (len, fan_in) in nets::init_blocks(self) {
            if fan_in == 0 {
                params.extend(std::iter::repeat_n(0.0, len));
            } else {
                let bound = 1.0 / (fan_in as f64).sqrt();
                params.extend((0..len).map(|_| rng.random_range(-bound..bound)));
            }
        }
        params
    }

    fn check_dataset(&self, data: &WindowedDataset) -> Result<()> {
        if (data.lookback, data.steps, data.n_features) != (self.lookback, self.steps, self.n_features) {
            return Err(Error::ShapeMismatch(format!(
                "dataset (l={}, s={}, N={}) does not match model (l={}, s={}, N={})",
                data.lookback, data.steps, data.n_features, self.lookback, self.steps, self.n_features
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    /// Mean per-sample loss over each epoch.
    pub epoch_loss: Vec<f64>,
    /// Running minimum of `epoch_loss`.
    pub best_loss: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastModel {
    spec: ModelSpec,
    params: Vec<f64>,
    log: TrainingLog,
}

impl ForecastModel {
    pub fn from_parameters(spec: ModelSpec, params: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        if params.len() != spec.param_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} parameters for a model needing {}",
                params.len(),
                spec.param_count()
            )));
        }
        if let Some(i) = params.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite(format!("parameter {i}")));
        }
        Ok(Self {
            spec,
            params,
            log: TrainingLog::default(),
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn parameters(&self) -> &[f64] {
        &self.params
    }

    pub fn log(&self) -> &TrainingLog {
        &self.log
    }

    /// Checkpoint: magic, version, JSON header length and header
    /// (`{spec, log}`), parameter count, parameters as little-endian `f64`.
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        let header = serde_json::to_vec(&CheckpointHeader {
            spec: self.spec.clone(),
            log: self.log.clone(),
        })?;
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(header.len() as u32).to_le_bytes())?;
        w.write_all(&header)?;
        w.write_all(&(self.params.len() as u64).to_le_bytes())?;
        for p in &self.params {
            w.write_all(&p.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::ShapeMismatch("model checkpoint: bad magic".into()));
        }
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b4)?;
        let version = u32::from_le_bytes(b4);
        if version != VERSION {
            return Err(Error::ShapeMismatch(format!("model checkpoint: unsupported version {version}")));
        }
        r.read_exact(&mut b4)?;
        let mut header = vec![0u8; u32::from_le_bytes(b4) as usize];
        r.read_exact(&mut header)?;
        let header: CheckpointHeader = serde_json::from_slice(&header)?;
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut params = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut b8)?;
            params.push(f64::from_le_bytes(b8));
        }
        let mut model = Self::from_parameters(header.spec, params)?;
        model.log = header.log;
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    spec: ModelSpec,
    log: TrainingLog,
}

/// Trains a model from seeded initial weights with shuffled mini-batches.
pub fn train(spec: &ModelSpec, data: &WindowedDataset) -> Result<ForecastModel> {
    spec.validate()?;
    spec.check_dataset(data)?;
    if data.is_empty() {
        return Err(Error::EmptyInput("training dataset"));
    }
    let mut params = spec.initial_parameters();
    let mut grad = vec![0.0; params.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.training.rng_seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut log = TrainingLog::default();
    let lr = spec.training.learning_rate;

    for epoch in 0..spec.training.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(spec.training.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                total += nets::loss_and_grad(spec, &params, data.input(i), data.target(i), &mut grad);
            }
            let step = lr / batch.len() as f64;
            for (p, g) in params.iter_mut().zip(&grad) {
                *p -= step * g;
            }
        }
        let epoch_loss = total / data.len() as f64;
        if !epoch_loss.is_finite() || params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Diverged { epoch, loss: epoch_loss });
        }
        let best = log.best_loss.last().map_or(epoch_loss, |b: &f64| b.min(epoch_loss));
        log.epoch_loss.push(epoch_loss);
        log.best_loss.push(best);
    }
    Ok(ForecastModel {
        spec: spec.clone(),
        params,
        log,
    })
}

/// Predicts `s` normalized loads from one time-major `l × N` window.
pub fn predict(model: &ForecastModel, window: &[f64]) -> Result<Vec<f64>> {
    if window.len() != model.spec.input_len() {
        return Err(Error::ShapeMismatch(format!(
            "window has {} values, model expects {}",
            window.len(),
            model.spec.input_len()
        )));
    }
    let out = nets::forward(&model.spec, &model.params, window);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("prediction".into()));
    }
    Ok(out)
}

pub fn predict_all(model: &ForecastModel, data: &WindowedDataset) -> Result<Vec<Vec<f64>>> {
    model.spec.check_dataset(data)?;
    (0..data.len()).map(|i| predict(model, data.input(i))).collect()
}

/// Mean over windows of the per-window mean absolute error.
pub fn mae(model: &ForecastModel, data: &WindowedDataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyInput("evaluation dataset"));
    }
    let preds = predict_all(model, data)?;
    let truths: Vec<&[f64]> = (0..data.len()).map(|i| data.target(i)).collect();
    mae_of(&preds, &truths)
}

pub fn mae_of<P: AsRef<[f64]>, T: AsRef<[f64]>>(predictions: &[P], truths: &[T]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch(format!(
            "{} predictions vs {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    let mut total = 0.0;
    for (p, t) in predictions.iter().zip(truths) {
        let (p, t) = (p.as_ref(), t.as_ref());
        if p.len() != t.len() || p.is_empty() {
            return Err(Error::ShapeMismatch(format!("prediction of {} vs target of {}", p.len(), t.len())));
        }
        total += p.iter().zip(t).map(|(a, b)| (a - b).abs()).sum::<f64>() / p.len() as f64;
    }
    Ok(total / predictions.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadClassReport {
    pub gamma: f64,
    pub step: usize,
    /// LOAD predicted as LOAD.
    pub tp: usize,
    /// NO-LOAD predicted as NO-LOAD.
    pub tn: usize,
    /// LOAD predicted as NO-LOAD.
    pub fp: usize,
    /// NO-LOAD predicted as LOAD.
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// `fp / #LOAD truths`; `None` without LOAD truths.
    pub fp_rate: Option<f64>,
    /// `fn / #NO-LOAD truths`; `None` without NO-LOAD truths.
    pub fn_rate: Option<f64>,
}

impl LoadClassReport {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn errors(&self) -> usize {
        self.fp + self.fn_
    }
}

pub fn load_classify<P: AsRef<[f64]>, T: AsRef<[f64]>>(
    predictions: &[P],
    truths: &[T],
    gamma: f64,
    step: usize,
) -> Result<LoadClassReport> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput("predictions"));
    }
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch(format!(
            "{} predictions vs {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidConfig(format!("gamma {gamma} outside (0, 1)")));
    }
    let mut r = LoadClassReport {
        gamma,
        step,
        tp: 0,
        tn: 0,
        fp: 0,
        fn_: 0,
        fp_rate: None,
        fn_rate: None,
    };
    for (p, t) in predictions.iter().zip(truths) {
        let (p, t) = (p.as_ref(), t.as_ref());
        let (Some(&pred), Some(&truth)) = (p.get(step), t.get(step)) else {
            return Err(Error::ShapeMismatch(format!("step {step} outside horizon {}", p.len().min(t.len()))));
        };
        match (truth >= gamma, pred >= gamma) {
            (true, true) => r.tp += 1,
            (true, false) => r.fp += 1,
            (false, true) => r.fn_ += 1,
            (false, false) => r.tn += 1,
        }
    }
    let load = r.tp + r.fp;
    let no_load = r.tn + r.fn_;
    r.fp_rate = (load > 0).then(|| r.fp as f64 / load as f64);
    r.fn_rate = (no_load > 0).then(|| r.fn_ as f64 / no_load as f64);
    Ok(r)
}

/// Largest relative discrepancy between backpropagated gradients and central
/// finite differences, for the spec's seeded initial parameters.
pub fn grad_check(spec: &ModelSpec, window: &[f64], target: &[f64], epsilon: f64) -> Result<f64> {
    grad_check_at(spec, &spec.initial_parameters(), window, target, epsilon)
}

pub fn grad_check_at(spec: &ModelSpec, params: &[f64], window: &[f64], target: &[f64], epsilon: f64) -> Result<f64> {
    spec.validate()?;
    if window.len() != spec.input_len() || target.len() != spec.steps || params.len() != spec.param_count() {
        return Err(Error::ShapeMismatch("grad check sample does not match spec".into()));
    }
    if window.iter().chain(target).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("grad check sample".into()));
    }
    let mut analytic = vec![0.0; params.len()];
    let loss = nets::loss_and_grad(spec, params, window, target, &mut analytic);
    if !loss.is_finite() {
        return Err(Error::NonFinite("loss".into()));
    }
    let scale = analytic.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let floor = (GRAD_CHECK_FLOOR * scale).max(f64::MIN_POSITIVE);
    let mut p = params.to_vec();
    let mut worst = 0.0f64;
    for i in 0..p.len() {
        let orig = p[i];
        p[i] = orig + epsilon;
        let up = nets::loss(spec, &p, window, target);
        p[i] = orig - epsilon;
        let down = nets::loss(spec, &p, window, target);
        p[i] = orig;
        let numeric = (up - down) / (2.0 * epsilon);
        if !numeric.is_finite() {
            return Err(Error::NonFinite(format!("finite difference at parameter {i}")));
        }
        let denom = analytic[i].abs().max(numeric.abs()).max(floor);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::WindowedDataset;

    fn random_sample(spec: &ModelSpec, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = (0..spec.input_len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = (0..spec.steps).map(|_| rng.random_range(0.0..1.0)).collect();
        (x, y)
    }

    #[test]
    fn parameter_counts() {
        let lin = ModelSpec::new(ModelKind::LinearAr, 12, 6, 6);
        assert_eq!(lin.param_count(), 6 * 72 + 6);
        let conv = ModelSpec::new(ModelKind::Convolutional, 12, 1, 6);
        assert_eq!(conv.param_count(), 16 * 3 * 6 + 16 + 10 * 16 + 1);
        let gru = ModelSpec::new(ModelKind::Recurrent, 12, 1, 6);
        assert_eq!(gru.param_count(), 3 * 32 * 6 + 3 * 32 * 32 + 3 * 32 + 32 + 1);
        for spec in [lin, conv, gru] {
            assert_eq!(spec.initial_parameters().len(), spec.param_count());
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut conv = ModelSpec::new(ModelKind::Convolutional, 6, 3, 6);
        conv.conv_channels = 2;
        let mut gru = ModelSpec::new(ModelKind::Recurrent, 5, 2, 6);
        gru.hidden_size = 4;
        let lin = ModelSpec::new(ModelKind::LinearAr, 4, 2, 6);
        for (spec, tol) in [(lin, 1e-7), (conv, 1e-4), (gru, 1e-4)] {
            let (x, y) = random_sample(&spec, 3);
            let err = grad_check(&spec, &x, &y, 1e-5).unwrap();
            assert!(err < tol, "{}: {err}", spec.kind);
        }
    }

    #[test]
    fn zero_parameters_give_bias() {
        let spec = ModelSpec::new(ModelKind::Recurrent, 3, 2, 6);
        let mut params = vec![0.0; spec.param_count()];
        let n = params.len();
        params[n - 2] = 0.25;
        params[n - 1] = -0.5;
        let model = ForecastModel::from_parameters(spec, params).unwrap();
        assert_eq!(predict(&model, &[0.3; 18]).unwrap(), vec![0.25, -0.5]);
        for kind in ModelKind::ALL {
            let spec = ModelSpec::new(kind, 4, 3, 6);
            let model = ForecastModel::from_parameters(spec.clone(), vec![0.0; spec.param_count()]).unwrap();
            assert_eq!(predict(&model, &[1.0; 24]).unwrap(), vec![0.0; 3]);
        }
    }

    #[test]
    fn linear_repeats_last_load() {
        let (l, s, n) = (4, 3, 6);
        let spec = ModelSpec::new(ModelKind::LinearAr, l, s, n);
        let mut params = vec![0.0; spec.param_count()];
        for k in 0..s {
            params[k * l * n + (l - 1) * n] = 1.0;
        }
        let model = ForecastModel::from_parameters(spec, params).unwrap();
        let mut window = vec![0.0; l * n];
        window[(l - 1) * n] = 0.42;
        window[0] = 0.9;
        assert_eq!(predict(&model, &window).unwrap(), vec![0.42; 3]);
        assert!(matches!(predict(&model, &[0.0; 5]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn recurrent_is_finite_on_extreme_inputs() {
        let spec = ModelSpec::new(ModelKind::Recurrent, 12, 6, 6);
        let model = ForecastModel::from_parameters(spec.clone(), spec.initial_parameters()).unwrap();
        assert!(predict(&model, &[1.0; 72]).unwrap().iter().all(|v| v.is_finite()));
        assert!(predict(&model, &[1e6; 72]).unwrap().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn non_finite_parameters_rejected() {
        let spec = ModelSpec::new(ModelKind::LinearAr, 2, 1, 6);
        let mut params = vec![0.0; spec.param_count()];
        params[0] = f64::NAN;
        assert!(matches!(ForecastModel::from_parameters(spec, params), Err(Error::NonFinite(_))));
    }

    #[test]
    fn mae_arithmetic() {
        let zeros = vec![vec![0.0]; 4];
        assert_eq!(mae_of(&zeros, &zeros).unwrap(), 0.0);
        assert_eq!(mae_of(&vec![vec![0.5]; 3], &vec![vec![0.0]; 3]).unwrap(), 0.5);
        let preds = vec![vec![0.1, 0.1], vec![0.3, 0.3]];
        let truths = vec![vec![0.0, 0.2], vec![0.0, 0.6]];
        assert!((mae_of(&preds, &truths).unwrap() - 0.2).abs() < 1e-15);
        assert!(mae_of::<Vec<f64>, Vec<f64>>(&[], &[]).is_err());
    }

    #[test]
    fn classification_convention() {
        let truths = vec![vec![0.02], vec![0.005]];
        let preds = vec![vec![0.005], vec![0.02]];
        let r = load_classify(&preds, &truths, 0.01, 0).unwrap();
        assert_eq!((r.tp, r.tn, r.fp, r.fn_), (0, 0, 1, 1));
        assert_eq!((r.fp_rate, r.fn_rate), (Some(1.0), Some(1.0)));
        let same = load_classify(&truths, &truths, 0.01, 0).unwrap();
        assert_eq!((same.fp_rate, same.fn_rate), (Some(0.0), Some(0.0)));
        let all_load = load_classify(&[vec![0.5]], &[vec![0.5]], 0.1, 0).unwrap();
        assert_eq!(all_load.fn_rate, None);
        assert!(load_classify(&preds, &truths, 0.01, 1).is_err());
        assert!(load_classify(&preds, &truths, 1.0, 0).is_err());
        assert!(load_classify::<Vec<f64>, Vec<f64>>(&[], &[], 0.1, 0).is_err());
    }

    fn dataset_from(f: impl Fn(&[f64]) -> Vec<f64>, l: usize, s: usize, count: usize, seed: u64) -> WindowedDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ds = WindowedDataset::empty(l, s, 6);
        for i in 0..count {
            let x: Vec<f64> = (0..l * 6).map(|_| rng.random_range(0.0..1.0)).collect();
            let y = f(&x);
            ds.push(i, &x, &y).unwrap();
        }
        ds
    }

    #[test]
    fn linear_recovers_noise_free_map() {
        let (l, s) = (3, 2);
        let ds = dataset_from(|x| vec![0.5 * x[12] + 0.2, 0.3 * x[0] - 0.1 * x[5]], l, s, 256, 9);
        let mut spec = ModelSpec::for_dataset(ModelKind::LinearAr, &ds);
        spec.training = TrainingConfig {
            epochs: 400,
            batch_size: 16,
            learning_rate: 0.1,
            rng_seed: 1,
        };
        let model = train(&spec, &ds).unwrap();
        assert!(mae(&model, &ds).unwrap() < 1e-3);
        let log = model.log();
        assert_eq!(log.epoch_loss.len(), 400);
        assert!(log.best_loss.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn constant_target_learned_by_every_kind() {
        for kind in ModelKind::ALL {
            let ds = dataset_from(|_| vec![0.3], 4, 1, 128, 2);
            let mut spec = ModelSpec::for_dataset(kind, &ds);
            spec.hidden_size = 8;
            spec.conv_channels = 4;
            spec.training = TrainingConfig {
                epochs: 600,
                batch_size: 16,
                learning_rate: 0.05,
                rng_seed: 5,
            };
            let model = train(&spec, &ds).unwrap();
            let err = mae(&model, &ds).unwrap();
            assert!(err < 1e-2, "{kind}: {err}");
        }
    }

    #[test]
    fn training_is_deterministic() {
        let ds = dataset_from(|x| vec![x[0]], 4, 1, 64, 4);
        let mut spec = ModelSpec::for_dataset(ModelKind::Recurrent, &ds);
        spec.hidden_size = 4;
        spec.training.epochs = 3;
        let a = train(&spec, &ds).unwrap();
        let b = train(&spec, &ds).unwrap();
        assert_eq!(a.parameters(), b.parameters());
        spec.training.rng_seed = 1;
        assert_ne!(train(&spec, &ds).unwrap().parameters(), a.parameters());
    }

    #[test]
    fn training_errors() {
        let empty = WindowedDataset::empty(4, 1, 6);
        let spec = ModelSpec::for_dataset(ModelKind::LinearAr, &empty);
        assert!(matches!(train(&spec, &empty), Err(Error::EmptyInput(_))));
        let ds = dataset_from(|x| vec![x[0] * 1e200], 4, 1, 8, 4);
        let mut spec = ModelSpec::for_dataset(ModelKind::LinearAr, &ds);
        spec.training.learning_rate = 10.0;
        assert!(matches!(train(&spec, &ds), Err(Error::Diverged { .. })));
        let other = ModelSpec::new(ModelKind::LinearAr, 5, 1, 6);
        assert!(matches!(train(&other, &ds), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn checkpoint_round_trip() {
        let ds = dataset_from(|x| vec![x[1], x[2]], 3, 2, 32, 8);
        let mut spec = ModelSpec::for_dataset(ModelKind::Convolutional, &ds);
        spec.conv_channels = 3;
        spec.training.epochs = 2;
        let model = train(&spec, &ds).unwrap();
        let mut buf = Vec::new();
        model.write_checkpoint(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"WSFM");
        let back = ForecastModel::read_checkpoint(buf.as_slice()).unwrap();
        assert_eq!(back, model);
        assert!(ForecastModel::read_checkpoint(&buf[..10]).is_err());
    }
}
