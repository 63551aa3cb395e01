//! Heat-pump noise curve, decibel arithmetic, ambient profiles and acoustic
//! metrics.
//!
//! Levels are in dB. `f64::NEG_INFINITY` stands for an absent source.

use std::f64::consts::PI;
use std::path::Path;

use chrono::NaiveDateTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{self, hour_of_day, in_window, SeriesError, STEPS_PER_DAY, STEP_HOURS};

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("invalid noise curve: {0}")]
    Curve(String),
    #[error("u = {0} outside the curve domain")]
    OutOfRange(f64),
    #[error("limit {limit} dB is below the quietest level {floor} dB")]
    Unattainable { limit: f64, floor: f64 },
    #[error("empty series")]
    Empty,
    #[error("trace of {0} samples does not cover whole days")]
    PartialDay(usize),
    #[error("no samples in the quiet window")]
    NoQuietSamples,
    #[error("series lengths differ")]
    Misaligned,
    #[error("invalid ambient parameters: {0}")]
    Ambient(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Piecewise-affine map from input fraction to noise level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseCurve {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Default for NoiseCurve {
    fn default() -> Self {
        Self {
            alpha: vec![0.0, 0.2, 0.7, 1.0],
            beta: vec![0.0, 40.0, 60.0, 60.0],
        }
    }
}

impl NoiseCurve {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self, NoiseError> {
        let c = Self { alpha, beta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        let (a, b) = (&self.alpha, &self.beta);
        if a.len() < 2 || a.len() != b.len() {
            return Err(NoiseError::Curve(
                "alpha and beta need equal lengths of at least 2".into(),
            ));
        }
        if a[0] != 0.0 || a[a.len() - 1] != 1.0 {
            return Err(NoiseError::Curve("alpha must start at 0 and end at 1".into()));
        }
        if a.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(NoiseError::Curve("alpha must be strictly increasing".into()));
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(NoiseError::Curve("beta must be finite".into()));
        }
        Ok(())
    }

    /// Number of affine pieces `k`.
    pub fn pieces(&self) -> usize {
        self.alpha.len() - 1
    }

    /// Largest absolute slope over all pieces, dB per unit input.
    pub fn max_slope(&self) -> f64 {
        (0..self.pieces())
            .map(|i| {
                ((self.beta[i + 1] - self.beta[i]) / (self.alpha[i + 1] - self.alpha[i])).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn eval_curve(curve: &NoiseCurve, u: f64) -> Result<f64, NoiseError> {
    let (a, b) = (&curve.alpha, &curve.beta);
    if !(u >= a[0] && u <= a[a.len() - 1]) {
        return Err(NoiseError::OutOfRange(u));
    }
    let i = a.partition_point(|&x| x <= u).clamp(1, a.len() - 1) - 1;
    if u == a[i] {
        return Ok(b[i]);
    }
    let w = (u - a[i]) / (a[i + 1] - a[i]);
    Ok(b[i] + w * (b[i + 1] - b[i]))
}

/// Largest `u` in `[0, 1]` whose level does not exceed `limit`.
pub fn invert_curve_max_u(curve: &NoiseCurve, limit: f64) -> Result<f64, NoiseError> {
    let (a, b) = (&curve.alpha, &curve.beta);
    if limit < b[0] {
        return Err(NoiseError::Unattainable { limit, floor: b[0] });
    }
    // admissible inputs form [0, first crossing]
    for i in 0..curve.pieces() {
        if b[i + 1] > limit {
            if b[i] >= limit {
                return Ok(a[i]);
            }
            let w = (limit - b[i]) / (b[i + 1] - b[i]);
            return Ok(a[i] + w * (a[i + 1] - a[i]));
        }
    }
    Ok(a[a.len() - 1])
}

/// Energetic sum of two levels.
pub fn mix(l_amb: f64, l_hp: f64) -> f64 {
    let hi = l_amb.max(l_hp);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    let lo = l_amb.min(l_hp);
    hi + 10.0 * (1.0 + 10f64.powf((lo - hi) / 10.0)).log10()
}

fn energy(l: f64) -> f64 {
    10f64.powf(l / 10.0)
}

/// Equivalent continuous level (energetic mean).
pub fn leq(levels: &[f64]) -> Result<f64, NoiseError> {
    if levels.is_empty() {
        return Err(NoiseError::Empty);
    }
    let mean = levels.iter().map(|&l| energy(l)).sum::<f64>() / levels.len() as f64;
    Ok(10.0 * mean.log10())
}

/// Aligned per-step acoustic series.
#[derive(Clone, Debug, PartialEq)]
pub struct AcousticTrace {
    pub start: NaiveDateTime,
    pub l_hp: Vec<f64>,
    pub l_amb: Vec<f64>,
    pub l_mix: Vec<f64>,
}

impl AcousticTrace {
    /// Builds the trace with `l_mix` computed from the two sources.
    pub fn new(start: NaiveDateTime, l_hp: Vec<f64>, l_amb: Vec<f64>) -> Result<Self, NoiseError> {
        if l_hp.len() != l_amb.len() {
            return Err(NoiseError::Misaligned);
        }
        let l_mix = l_amb.iter().zip(&l_hp).map(|(&a, &h)| mix(a, h)).collect();
        Ok(Self {
            start,
            l_hp,
            l_amb,
            l_mix,
        })
    }

    pub fn len(&self) -> usize {
        self.l_mix.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l_mix.is_empty()
    }

    fn hour(&self, k: usize) -> f64 {
        hour_of_day(series::timestamp_at(self.start, k))
    }
}

/// Day 07-19, evening 19-23 (+5 dB), night 23-07 (+10 dB).
pub fn l_den(trace: &AcousticTrace) -> Result<f64, NoiseError> {
    let n = trace.len();
    if n == 0 || n % STEPS_PER_DAY != 0 {
        return Err(NoiseError::PartialDay(n));
    }
    let weighted: Vec<f64> = (0..n)
        .map(|k| {
            let h = trace.hour(k);
            let penalty = if in_window(h, 7.0, 19.0) {
                0.0
            } else if in_window(h, 19.0, 23.0) {
                5.0
            } else {
                10.0
            };
            trace.l_mix[k] + penalty
        })
        .collect();
    leq(&weighted)
}

/// Leq of the mixed level over `[22:00, 07:00)`.
pub fn l_quiet(trace: &AcousticTrace) -> Result<f64, NoiseError> {
    let quiet: Vec<f64> = (0..trace.len())
        .filter(|&k| in_window(trace.hour(k), 22.0, 7.0))
        .map(|k| trace.l_mix[k])
        .collect();
    if quiet.is_empty() {
        return Err(NoiseError::NoQuietSamples);
    }
    leq(&quiet)
}

/// Hours per day during which the heat pump is strictly louder than ambient.
pub fn domination_time(trace: &AcousticTrace) -> f64 {
    if trace.is_empty() {
        return 0.0;
    }
    let count = trace
        .l_hp
        .iter()
        .zip(&trace.l_amb)
        .filter(|(h, a)| h > a)
        .count();
    let days = trace.len() as f64 / STEPS_PER_DAY as f64;
    count as f64 * STEP_HOURS / days
}

/// Sum over the run of `L_mix - L_amb`.
pub fn real_noise_cost(trace: &AcousticTrace) -> f64 {
    trace
        .l_mix
        .iter()
        .zip(&trace.l_amb)
        .map(|(m, a)| if a.is_finite() { m - a } else { 0.0 })
        .sum()
}

/// Diurnal ambient level: a floor plus two raised-cosine bumps, the main one
/// centered on `peak_hour`, with bounded per-step jitter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmbientParams {
    pub floor_db: f64,
    pub peak_db: f64,
    pub peak_hour: f64,
    /// Full width of the main bump, hours.
    pub peak_width_h: f64,
    /// Height of the morning bump as a fraction of `peak_db - floor_db`.
    pub morning_ratio: f64,
    pub morning_hour: f64,
    pub morning_width_h: f64,
    /// Uniform jitter half-width, dB.
    pub jitter_db: f64,
}

impl Default for AmbientParams {
    fn default() -> Self {
        Self {
            floor_db: 40.0,
            peak_db: 60.0,
            peak_hour: 13.0,
            peak_width_h: 14.0,
            morning_ratio: 0.5,
            morning_hour: 8.5,
            morning_width_h: 5.0,
            jitter_db: 0.5,
        }
    }
}

impl AmbientParams {
    pub fn validate(&self) -> Result<(), NoiseError> {
        if !(self.peak_db >= self.floor_db) {
            return Err(NoiseError::Ambient("peak below floor".into()));
        }
        if !(self.peak_width_h > 0.0 && self.peak_width_h <= 24.0)
            || !(self.morning_width_h > 0.0 && self.morning_width_h <= 24.0)
        {
            return Err(NoiseError::Ambient("bump widths must lie in (0, 24] h".into()));
        }
        if !(0.0..=1.0).contains(&self.morning_ratio) || !(self.jitter_db >= 0.0) {
            return Err(NoiseError::Ambient(
                "morning_ratio must lie in [0, 1] and jitter must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Noise-free level at `hour`.
    pub fn shape(&self, hour: f64) -> f64 {
        let bump = |center: f64, width: f64| {
            let mut d = (hour - center).abs() % 24.0;
            d = d.min(24.0 - d);
            if d >= width / 2.0 {
                0.0
            } else {
                0.5 * (1.0 + (2.0 * PI * d / width).cos())
            }
        };
        let span = self.peak_db - self.floor_db;
        let main = bump(self.peak_hour, self.peak_width_h);
        let morning = self.morning_ratio * bump(self.morning_hour, self.morning_width_h);
        self.floor_db + span * main.max(morning)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmbientProfile {
    pub start: NaiveDateTime,
    pub levels: Vec<f64>,
}

const AMBIENT_HEADER: [&str; 2] = ["timestamp", "L_amb_dB"];

impl AmbientProfile {
    pub fn read_csv(path: &Path) -> Result<Self, NoiseError> {
        let t = series::read_table(series::open(path)?, &AMBIENT_HEADER)?;
        let levels = t.columns.into_iter().next().unwrap_or_default();
        if levels.iter().any(|l| !l.is_finite()) {
            return Err(NoiseError::Ambient("non-finite level in CSV".into()));
        }
        Ok(Self {
            start: t.start,
            levels,
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), NoiseError> {
        series::write_table(series::create(path)?, &AMBIENT_HEADER, self.start, &[&self.levels])?;
        Ok(())
    }
}

/// Jitter is clamped so the level never leaves `[floor, peak]`.
pub fn synth_ambient(
    params: &AmbientParams,
    start: NaiveDateTime,
    steps: usize,
    seed: u64,
) -> Result<AmbientProfile, NoiseError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let levels = (0..steps)
        .map(|k| {
            let base = params.shape(hour_of_day(series::timestamp_at(start, k)));
            let j = if params.jitter_db > 0.0 {
                rng.random_range(-params.jitter_db..=params.jitter_db)
            } else {
                0.0
            };
            (base + j).clamp(params.floor_db, params.peak_db)
        })
        .collect();
    Ok(AmbientProfile { start, levels })
}
