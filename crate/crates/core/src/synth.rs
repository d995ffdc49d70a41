//! Gauss-Markov synthetic traffic generator.
//!
//! Each sample is the weekly baseline of its slot plus two noise terms:
//!
//! ```text
//! L(t)     = max(0, g(t) + G(t) + A(t))
//! g(t)     = mean of slot ⌊t / r⌋ mod 168          (r = samples per hour)
//! G(t)     ~ N(0, beta_gauss · Var(t))
//! A(t)     = alpha · A(t-1) + W(t),  W(t) ~ N(0, beta_ar · Var(t))
//! A(0)     = first observation carried by the seed (0 if absent)
//! ```
//!
//! `Var(t)` is the variance of the same (weekday, hour) slot as `g(t)`.
//! Traces always start on a Monday at 00:00 so that sample 0 maps to slot 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{ApSeed, SeedKnowledge, SLOTS};
use crate::timeseries::{LoadSeries, SECONDS_PER_DAY};

/// 2024-01-01T00:00:00Z, a Monday. Start timestamp of every synthetic trace.
pub const SYNTHETIC_EPOCH: i64 = 1_704_067_200;

const LOAD_STREAM: u64 = 0;
const USERS_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub alpha: f64,
    pub beta_gauss: f64,
    pub beta_ar: f64,
    pub duration_days: u32,
    pub period_seconds: u32,
    pub clamp_nonnegative: bool,
    pub rng_seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            alpha: 0.9,
            beta_gauss: 1.0,
            beta_ar: 1.0,
            duration_days: 7,
            period_seconds: 600,
            clamp_nonnegative: true,
            rng_seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!("alpha {} outside [0, 1)", self.alpha)));
        }
        if !(self.beta_gauss >= 0.0 && self.beta_gauss.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta_gauss {} must be >= 0", self.beta_gauss)));
        }
        if !(self.beta_ar >= 0.0 && self.beta_ar.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta_ar {} must be >= 0", self.beta_ar)));
        }
        if self.duration_days == 0 {
            return Err(Error::InvalidConfig("duration_days must be positive".into()));
        }
        if self.period_seconds == 0 || 3600 % self.period_seconds != 0 {
            return Err(Error::InvalidPeriod(self.period_seconds));
        }
        Ok(())
    }

    pub fn samples(&self) -> usize {
        (i64::from(self.duration_days) * SECONDS_PER_DAY / i64::from(self.period_seconds)) as usize
    }

    /// Noise budget that reproduces the slot variance in total:
    /// `beta_ar = (1 - alpha²)(1 - beta_gauss)`.
    pub fn variance_matched(mut self, beta_gauss: f64) -> Self {
        self.beta_gauss = beta_gauss;
        self.beta_ar = (1.0 - self.alpha * self.alpha) * (1.0 - beta_gauss).max(0.0);
        self
    }
}

/// A generated series together with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTrace {
    pub series: LoadSeries,
    pub source_ap_id: String,
    pub config: GeneratorConfig,
}

fn slot_index(samples_per_hour: usize, t: usize) -> usize {
    (t / samples_per_hour) % SLOTS
}

/// Weekly-cyclic baseline mean for sample index `t`.
pub fn baseline(seed: &SeedKnowledge, t: usize) -> f64 {
    seed.slots[slot_index(seed.samples_per_hour(), t)].mean
}

/// Variance of the slot that `baseline(seed, t)` reads.
pub fn slot_variance(seed: &SeedKnowledge, t: usize) -> f64 {
    seed.slots[slot_index(seed.samples_per_hour(), t)].variance
}

/// One Gauss-Markov step: `alpha · prev + N(0, innovation_std²)`.
pub fn ar_step<R: Rng + ?Sized>(prev: f64, alpha: f64, innovation_std: f64, rng: &mut R) -> f64 {
    let w: f64 = rng.sample(StandardNormal);
    alpha * prev + innovation_std * w
}

fn check_seed(seed: &SeedKnowledge, cfg: &GeneratorConfig) -> Result<()> {
    cfg.validate()?;
    seed.validate()?;
    if seed.period_seconds != cfg.period_seconds {
        return Err(Error::InvalidConfig(format!(
            "seed period {} s differs from generator period {} s",
            seed.period_seconds, cfg.period_seconds
        )));
    }
    Ok(())
}

/// Runs the generator for one feature on the given RNG stream, unclamped
/// values are clamped at zero when configured.
fn generate_values(seed: &SeedKnowledge, cfg: &GeneratorConfig, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(stream);
    let n = cfg.samples();
    let mut out = Vec::with_capacity(n);
    let mut ar = seed.first_observation.unwrap_or(0.0);
    for t in 0..n {
        let var = slot_variance(seed, t);
        let gauss_std = (cfg.beta_gauss * var).sqrt();
        let ar_std = (cfg.beta_ar * var).sqrt();
        let g: f64 = rng.sample(StandardNormal);
        if t > 0 {
            ar = ar_step(ar, cfg.alpha, ar_std, &mut rng);
        }
        let v = baseline(seed, t) + gauss_std * g + ar;
        out.push(if cfg.clamp_nonnegative { v.max(0.0) } else { v });
    }
    out
}

/// Synthetic load trace from a load seed. Users are left at zero; see
/// [`generate_ap`] for a trace carrying both features.
pub fn generate(seed: &SeedKnowledge, cfg: &GeneratorConfig) -> Result<SyntheticTrace> {
    check_seed(seed, cfg)?;
    let load = generate_values(seed, cfg, LOAD_STREAM);
    let users = vec![0.0; load.len()];
    build_trace(seed, cfg, load, users)
}

/// Synthetic users counts: the same process rounded half-to-even and
/// floored at zero.
pub fn generate_users(seed_users: &SeedKnowledge, cfg: &GeneratorConfig) -> Result<Vec<f64>> {
    check_seed(seed_users, cfg)?;
    Ok(generate_values(seed_users, cfg, USERS_STREAM)
        .into_iter()
        .map(|v| v.round_ties_even().max(0.0))
        .collect())
}

/// Synthetic trace with both load and users.
pub fn generate_ap(seed: &ApSeed, cfg: &GeneratorConfig) -> Result<SyntheticTrace> {
    check_seed(&seed.load, cfg)?;
    let load = generate_values(&seed.load, cfg, LOAD_STREAM);
    let users = generate_users(&seed.users, cfg)?;
    build_trace(&seed.load, cfg, load, users)
}

fn build_trace(seed: &SeedKnowledge, cfg: &GeneratorConfig, mut load: Vec<f64>, users: Vec<f64>) -> Result<SyntheticTrace> {
    if !cfg.clamp_nonnegative {
        // LoadSeries cannot hold negative loads; the unclamped values are
        // only reachable through `generate_raw`.
        load.iter_mut().for_each(|v| *v = v.max(0.0));
    }
    let series = LoadSeries::new(seed.ap_id.clone(), SYNTHETIC_EPOCH, cfg.period_seconds, load, users)?;
    Ok(SyntheticTrace {
        series,
        source_ap_id: seed.ap_id.clone(),
        config: cfg.clone(),
    })
}

/// The raw generated load values, honouring `clamp_nonnegative` (values may
/// be negative when clamping is off).
pub fn generate_raw(seed: &SeedKnowledge, cfg: &GeneratorConfig) -> Result<Vec<f64>> {
    check_seed(seed, cfg)?;
    Ok(generate_values(seed, cfg, LOAD_STREAM))
}

/// Stable child seed for an AP (or any label) under a master seed.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    // FNV-1a over the label, then a splitmix64 finalizer with the master.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix(master ^ splitmix(h))
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::Feature;

    fn seed_with(mean: impl Fn(usize) -> f64, var: impl Fn(usize) -> f64) -> SeedKnowledge {
        let profile: Vec<(f64, f64)> = (0..SLOTS).map(|i| (mean(i), var(i))).collect();
        SeedKnowledge::from_profile("ap", Feature::Load, 600, &profile).unwrap()
    }

    #[test]
    fn baseline_indexing() {
        let seed = seed_with(|i| i as f64, |_| 0.0);
        assert_eq!(baseline(&seed, 0), 0.0);
        assert_eq!(baseline(&seed, 5), 0.0);
        assert_eq!(baseline(&seed, 6), 1.0);
        assert_eq!(baseline(&seed, 1008), 0.0);
        assert_eq!(baseline(&seed, 1008 + 6 * 33), 33.0);
    }

    #[test]
    fn slot_variance_indexing() {
        let zero = seed_with(|_| 1.0, |_| 0.0);
        assert!((0..3000).all(|t| slot_variance(&zero, t) == 0.0));
        let seed = seed_with(|_| 1.0, |i| if i == 9 { 25.0 } else { 0.0 });
        for t in 54..60 {
            assert_eq!(slot_variance(&seed, t), 25.0);
            assert_eq!(slot_variance(&seed, t + 1008), 25.0);
        }
        assert_eq!(slot_variance(&seed, 60), 0.0);
    }

    #[test]
    fn ar_step_degenerate_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(ar_step(123.0, 0.0, 0.0, &mut rng), 0.0);
        assert_eq!(ar_step(8.0, 0.5, 0.0, &mut rng), 4.0);
    }

    #[test]
    fn noise_free_is_clamped_baseline() {
        let seed = seed_with(|i| (i % 24) as f64, |_| 3.0);
        let cfg = GeneratorConfig {
            beta_gauss: 0.0,
            beta_ar: 0.0,
            duration_days: 8,
            ..Default::default()
        };
        let trace = generate(&seed, &cfg).unwrap();
        assert_eq!(trace.series.len(), 8 * 144);
        for (t, v) in trace.series.load().iter().enumerate() {
            assert_eq!(*v, baseline(&seed, t));
        }
        let zero_var = seed_with(|i| (i % 24) as f64, |_| 0.0);
        let trace = generate(&zero_var, &GeneratorConfig { duration_days: 2, ..Default::default() }).unwrap();
        for (t, v) in trace.series.load().iter().enumerate() {
            assert_eq!(*v, baseline(&zero_var, t));
        }
    }

    #[test]
    fn first_observation_decays() {
        let seed = seed_with(|_| 10.0, |_| 0.0).with_first_observation(Some(5.0));
        let cfg = GeneratorConfig { duration_days: 1, ..Default::default() };
        let load = generate(&seed, &cfg).unwrap().series.load().to_vec();
        assert_eq!(load[0], 15.0);
        assert!((load[1] - 14.5).abs() < 1e-12);
        assert!((load[2] - 14.05).abs() < 1e-12);
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let seed = seed_with(|i| 100.0 + i as f64, |_| 50.0);
        let cfg = GeneratorConfig { duration_days: 7, rng_seed: 7, ..Default::default() };
        let a = generate(&seed, &cfg).unwrap();
        let b = generate(&seed, &cfg).unwrap();
        assert_eq!(a, b);
        let c = generate(&seed, &GeneratorConfig { rng_seed: 8, ..cfg.clone() }).unwrap();
        let differing = a.series.load().iter().zip(c.series.load()).filter(|(x, y)| x != y).count();
        assert!(differing as f64 >= 0.99 * a.series.len() as f64);
    }

    #[test]
    fn users_rounding() {
        let seed = SeedKnowledge::constant("ap", Feature::Users, 600, 3.4, 0.0).unwrap();
        let cfg = GeneratorConfig { duration_days: 1, ..Default::default() };
        assert!(generate_users(&seed, &cfg).unwrap().iter().all(|&u| u == 3.0));
        let half = SeedKnowledge::constant("ap", Feature::Users, 600, 2.5, 0.0).unwrap();
        assert!(generate_users(&half, &cfg).unwrap().iter().all(|&u| u == 2.0));
        let zero = SeedKnowledge::constant("ap", Feature::Users, 600, 0.0, 0.0).unwrap();
        assert!(generate_users(&zero, &cfg).unwrap().iter().all(|&u| u == 0.0));
        let noisy = SeedKnowledge::constant("ap", Feature::Users, 600, 1.0, 4.0).unwrap();
        let cfg = GeneratorConfig { duration_days: 3, rng_seed: 11, ..Default::default() };
        let a = generate_users(&noisy, &cfg).unwrap();
        assert_eq!(a, generate_users(&noisy, &cfg).unwrap());
        assert!(a.iter().all(|&u| u >= 0.0 && u.fract() == 0.0));
    }

    #[test]
    fn invalid_configs() {
        let seed = seed_with(|_| 1.0, |_| 1.0);
        for cfg in [
            GeneratorConfig { alpha: 1.0, ..Default::default() },
            GeneratorConfig { alpha: -0.1, ..Default::default() },
            GeneratorConfig { beta_gauss: -1.0, ..Default::default() },
            GeneratorConfig { beta_ar: f64::NAN, ..Default::default() },
            GeneratorConfig { duration_days: 0, ..Default::default() },
            GeneratorConfig { period_seconds: 300, ..Default::default() },
        ] {
            assert!(generate(&seed, &cfg).is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn derive_seed_is_stable_and_label_sensitive() {
        assert_eq!(derive_seed(42, "ap-1"), derive_seed(42, "ap-1"));
        assert_ne!(derive_seed(42, "ap-1"), derive_seed(42, "ap-2"));
        assert_ne!(derive_seed(42, "ap-1"), derive_seed(43, "ap-1"));
    }
}
