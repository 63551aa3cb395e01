//! Closed-loop simulation, η sweeps, metric aggregation and output files.
//!
//! Timeline, in 15-minute steps from 2024-01-01 00:00: identification data
//! covers days `0 .. train + test`, the last of which doubles as a
//! thermostat warm-up for the control plant; control starts at the next
//! midnight and runs for `days` days. Forecasts are the true future series.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::NaiveDateTime;
use log::{info, warn};
use quietpump_milp::SolverOptions;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{PlantKind, RunConfig};
use crate::lin_model::{
    identify, mae, predict_one_step, windowed_open_loop, ArxModel, History, IoDataset, ModelError,
};
use crate::mpc::{
    exceedance_cost, ratio_cost, solve_step, CostOption, Forecast, MpcConfig, MpcError,
};
use crate::noise::{
    domination_time, eval_curve, l_den, l_quiet, mix, real_noise_cost, synth_ambient,
    AcousticTrace, AmbientProfile, NoiseCurve, NoiseError,
};
use crate::plant::{synth_weather, Disturbance, Excitation, PlantError, RcPlant, WeatherSeries};
use crate::series::{
    self, default_start, format_timestamp, hour_of_day, parse_timestamp, timestamp_at,
    SeriesError, STEPS_PER_DAY, STEP_SECONDS,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Setup(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Mpc(#[from] MpcError),
    #[error("controller failed at step {step}: {source}")]
    Controller {
        step: usize,
        source: MpcError,
        /// Steps completed before the failure.
        partial: Box<ClosedLoopTrace>,
    },
    #[error("no {0} reference row")]
    MissingReference(String),
    #[error("malformed trace: {0}")]
    Trace(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Sub-seeds derived from the master seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Seeds {
    pub weather: u64,
    pub ambient: u64,
    pub excitation: u64,
}

impl Seeds {
    pub fn from_master(seed: u64) -> Self {
        // SplitMix64 output stream
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^ (z >> 31)
        };
        Self {
            weather: next(),
            ambient: next(),
            excitation: next(),
        }
    }
}

/// Exogenous series over the whole timeline, aligned step by step.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub start: NaiveDateTime,
    pub t_amb: Vec<f64>,
    pub solar: Vec<f64>,
    pub ambient: Vec<f64>,
    pub price: Vec<f64>,
    pub hour: Vec<f64>,
    /// Internal gains of the occupants, W. Only the RC plant sees them.
    pub occupancy_w: Vec<f64>,
    /// First control step.
    pub control_start: usize,
}

const PRICE_HEADER: [&str; 2] = ["timestamp", "price_per_kWh"];

/// Picks `len` samples starting at `start` out of a series beginning at
/// `from`.
fn align(
    what: &str,
    from: NaiveDateTime,
    values: &[f64],
    start: NaiveDateTime,
    len: usize,
) -> Result<Vec<f64>, HarnessError> {
    let offset = (start - from).num_seconds();
    if offset < 0 || offset % STEP_SECONDS != 0 {
        return Err(HarnessError::Setup(format!(
            "{what} series starts at {} but the run starts at {}",
            format_timestamp(from),
            format_timestamp(start)
        )));
    }
    let offset = (offset / STEP_SECONDS) as usize;
    if offset + len > values.len() {
        return Err(HarnessError::Setup(format!(
            "{what} series has {} samples, the run needs {}",
            values.len(),
            offset + len
        )));
    }
    Ok(values[offset..offset + len].to_vec())
}

impl Environment {
    /// Builds the series for identification plus `days` of control, with
    /// one extra day of forecast margin per 96 horizon steps.
    pub fn build(cfg: &RunConfig, days: usize) -> Result<Self, HarnessError> {
        let start = default_start();
        let seeds = Seeds::from_master(cfg.seed);
        let id_days = cfg.plant.train_days + cfg.plant.test_days;
        let margin = cfg.controller.horizon.div_ceil(STEPS_PER_DAY);
        let total_days = id_days + days + margin;
        let len = total_days * STEPS_PER_DAY;

        let weather = match &cfg.weather.csv {
            Some(p) => WeatherSeries::read_csv(p)?,
            None => synth_weather(&cfg.weather.climate, start, total_days, seeds.weather)?,
        };
        let t_amb = align("weather", weather.start, &weather.t_amb, start, len)?;
        let solar = align("weather", weather.start, &weather.solar, start, len)?;
        let ambient = match &cfg.noise.ambient_csv {
            Some(p) => AmbientProfile::read_csv(p)?,
            None => synth_ambient(&cfg.noise.ambient, start, len, seeds.ambient)?,
        };
        let ambient = align("ambient noise", ambient.start, &ambient.levels, start, len)?;
        let stamps: Vec<NaiveDateTime> = (0..len).map(|k| timestamp_at(start, k)).collect();
        let hour: Vec<f64> = stamps.iter().map(|&t| hour_of_day(t)).collect();
        let price = match &cfg.weather.price_csv {
            Some(p) => {
                let t = series::read_table(series::open(p)?, &PRICE_HEADER)?;
                let col = t.columns.into_iter().next().unwrap_or_default();
                align("price", t.start, &col, start, len)?
            }
            None => hour.iter().map(|&h| cfg.weather.tariff.price_at(h)).collect(),
        };
        let occupancy_w = stamps.iter().map(|&t| cfg.plant.occupancy.gain_at(t)).collect();
        Ok(Self {
            start,
            t_amb,
            solar,
            ambient,
            price,
            hour,
            occupancy_w,
            control_start: id_days * STEPS_PER_DAY,
        })
    }

    pub fn len(&self) -> usize {
        self.t_amb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_amb.is_empty()
    }

    fn disturbance(&self, k: usize) -> Disturbance {
        Disturbance {
            t_amb: self.t_amb[k],
            solar: self.solar[k],
            occupancy_w: self.occupancy_w[k],
        }
    }

    fn forecast(&self, k: usize, n: usize) -> Forecast<'_> {
        let end = (k + n).min(self.len());
        Forecast {
            t_amb: &self.t_amb[k..end],
            solar: &self.solar[k..end],
            price: &self.price[k..end],
            ambient: &self.ambient[k..end],
            hour: &self.hour[k..end],
        }
    }
}

/// Identified model and its open-loop fit.
#[derive(Clone, Debug)]
pub struct FitReport {
    pub model: ArxModel,
    pub train_mae: f64,
    pub test_mae: f64,
    pub window: usize,
    pub train: IoDataset,
    pub test: IoDataset,
}

impl FitReport {
    pub fn to_text(&self) -> String {
        format!(
            "open-loop window: {} steps\ntrain MAE: {:.4} C ({} samples)\ntest MAE: {:.4} C ({} samples)\n",
            self.window,
            self.train_mae,
            self.train.len(),
            self.test_mae,
            self.test.len()
        )
    }
}

/// Runs the RC plant under the randomized excitation over the
/// identification span.
pub fn excitation_dataset(cfg: &RunConfig, env: &Environment) -> Result<IoDataset, HarnessError> {
    let seeds = Seeds::from_master(cfg.seed);
    let n = env.control_start;
    let t0 = cfg.plant.initial_c;
    let mut plant = RcPlant::new(cfg.plant.rc.clone(), [t0; 3])?;
    let mut ex = Excitation::new(seeds.excitation);
    ex.low_c = cfg.controller.comfort_low_c;
    ex.high_c = cfg.controller.comfort_high_c;
    let (mut y, mut u) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let yk = plant.t_air();
        let uk = ex.next(yk);
        y.push(yk);
        u.push(uk);
        plant.step(uk, env.disturbance(k), STEP_SECONDS as f64)?;
    }
    Ok(IoDataset::new(
        env.start,
        y,
        u,
        env.t_amb[..n].to_vec(),
        env.solar[..n].to_vec(),
    )?)
}

/// Fits on the training days and reports windowed open-loop MAE on both
/// halves.
pub fn identify_plant(cfg: &RunConfig, env: &Environment) -> Result<FitReport, HarnessError> {
    let data = excitation_dataset(cfg, env)?;
    let split = cfg.plant.train_days * STEPS_PER_DAY;
    let train = data.slice(0, split);
    let test = data.slice(split, data.len());
    let model = identify(&train, cfg.plant.orders)?;
    let window = cfg.plant.mae_window;
    let (p, t) = windowed_open_loop(&model, &train, window)?;
    let train_mae = mae(&p, &t)?;
    let (p, t) = windowed_open_loop(&model, &test, window)?;
    let test_mae = mae(&p, &t)?;
    info!("identified model: train MAE {train_mae:.4} C, test MAE {test_mae:.4} C");
    Ok(FitReport {
        model,
        train_mae,
        test_mae,
        window,
        train,
        test,
    })
}

/// One row of a closed-loop trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub timestamp: NaiveDateTime,
    /// Measured air temperature at the start of the step, °C.
    pub y: f64,
    pub u: f64,
    pub l_hp: f64,
    pub l_amb: f64,
    pub l_mix: f64,
    pub price: f64,
    pub energy_cost: f64,
    /// Distance of `y` outside the comfort band, °C.
    pub violation: f64,
    pub solve_ms: f64,
    pub status: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClosedLoopTrace {
    pub records: Vec<TraceRecord>,
}

pub const TRACE_HEADER: [&str; 12] = [
    "step",
    "timestamp",
    "y_C",
    "u_frac",
    "L_hp_dB",
    "L_amb_dB",
    "L_mix_dB",
    "price_per_kWh",
    "energy_cost",
    "comfort_violation_C",
    "solve_ms",
    "status",
];

impl ClosedLoopTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn column(&self, f: impl Fn(&TraceRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }

    pub fn acoustic(&self) -> Result<AcousticTrace, HarnessError> {
        let start = self
            .records
            .first()
            .map(|r| r.timestamp)
            .ok_or_else(|| HarnessError::Trace("empty trace".into()))?;
        Ok(AcousticTrace::new(
            start,
            self.column(|r| r.l_hp),
            self.column(|r| r.l_amb),
        )?)
    }

    /// CSV text; solve times are written as 0 unless `record_timing`.
    pub fn to_csv(&self, record_timing: bool) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| HarnessError::Series(SeriesError::from(e));
        w.write_record(TRACE_HEADER).map_err(csv_err)?;
        for r in &self.records {
            let ms = if record_timing { r.solve_ms } else { 0.0 };
            w.write_record([
                r.step.to_string(),
                format_timestamp(r.timestamp),
                r.y.to_string(),
                r.u.to_string(),
                r.l_hp.to_string(),
                r.l_amb.to_string(),
                r.l_mix.to_string(),
                r.price.to_string(),
                r.energy_cost.to_string(),
                r.violation.to_string(),
                ms.to_string(),
                r.status.clone(),
            ])
            .map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| HarnessError::Trace(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| HarnessError::Trace(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if header != TRACE_HEADER {
            return Err(HarnessError::Trace(format!(
                "expected header {}, found {}",
                TRACE_HEADER.join(","),
                header.join(",")
            )));
        }
        let mut records = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| HarnessError::Trace(e.to_string()))?;
            let num = |c: usize| -> Result<f64, HarnessError> {
                rec[c].parse().map_err(|_| {
                    HarnessError::Trace(format!("row {}: {} = {:?}", i + 1, TRACE_HEADER[c], &rec[c]))
                })
            };
            records.push(TraceRecord {
                step: rec[0]
                    .parse()
                    .map_err(|_| HarnessError::Trace(format!("row {}: bad step", i + 1)))?,
                timestamp: parse_timestamp(&rec[1])
                    .map_err(|e| HarnessError::Trace(format!("row {}: {e}", i + 1)))?,
                y: num(2)?,
                u: num(3)?,
                l_hp: num(4)?,
                l_amb: num(5)?,
                l_mix: num(6)?,
                price: num(7)?,
                energy_cost: num(8)?,
                violation: num(9)?,
                solve_ms: num(10)?,
                status: rec[11].to_string(),
            });
        }
        Ok(Self { records })
    }

    pub fn write(&self, path: &Path, record_timing: bool) -> Result<(), HarnessError> {
        fs::write(path, self.to_csv(record_timing)?).map_err(io_err(path))
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        Self::from_csv(&fs::read_to_string(path).map_err(io_err(path))?)
    }
}

/// The plant the loop drives.
enum SimPlant {
    Rc(RcPlant),
    /// The identified model, propagated on the loop's own history.
    Arx,
}

/// Warm-up input: proportional thermostat around the middle of the band.
fn thermostat(cfg: &MpcConfig, y: f64) -> f64 {
    let target = 0.5 * (cfg.comfort_low_c + cfg.comfort_high_c);
    (0.3 + 0.5 * (target - y)).clamp(0.0, 1.0)
}

/// Solver settings used for every MPC step.
pub fn solver_options(cfg: &RunConfig) -> SolverOptions {
    SolverOptions {
        max_nodes: cfg.sweep.max_nodes,
        ..SolverOptions::default()
    }
}

/// Simulates `days` days of closed-loop control with the given controller
/// settings. One day of thermostat warm-up precedes the first MPC step.
pub fn run_closed_loop(
    cfg: &RunConfig,
    env: &Environment,
    model: &ArxModel,
    mpc: &MpcConfig,
    plant_kind: PlantKind,
    days: usize,
) -> Result<ClosedLoopTrace, HarnessError> {
    mpc.validate()?;
    let curve = cfg.noise.curve();
    let opts = solver_options(cfg);
    let steps = days * STEPS_PER_DAY;
    let cs = env.control_start;
    if cs < STEPS_PER_DAY || cs + steps + mpc.horizon > env.len() {
        return Err(HarnessError::Setup(format!(
            "environment of {} steps cannot hold warm-up, {steps} control steps and horizon {}",
            env.len(),
            mpc.horizon
        )));
    }
    let keep = model.orders().max_lag();
    let w0 = cs - STEPS_PER_DAY;
    let t0 = cfg.plant.initial_c;
    let mut hist = History {
        y: vec![t0; keep],
        u: vec![thermostat(mpc, t0); keep],
        t_amb: vec![env.t_amb[w0]; keep],
        solar: vec![env.solar[w0]; keep],
    };
    let mut plant = match plant_kind {
        PlantKind::Rc => SimPlant::Rc(RcPlant::new(cfg.plant.rc.clone(), [t0; 3])?),
        PlantKind::Arx => SimPlant::Arx,
    };
    let dt = STEP_SECONDS as f64;
    let advance = |plant: &mut SimPlant, hist: &mut History, k: usize, u: f64| {
        let y_next = match plant {
            SimPlant::Rc(p) => p.step(u, env.disturbance(k), dt)?,
            SimPlant::Arx => {
                let mut us = vec![u];
                us.extend_from_slice(&hist.u);
                let mut ts = vec![env.t_amb[k]];
                ts.extend_from_slice(&hist.t_amb);
                let mut ss = vec![env.solar[k]];
                ss.extend_from_slice(&hist.solar);
                predict_one_step(model, &hist.y, &us, &ts, &ss)?
            }
        };
        hist.push(y_next, u, env.t_amb[k], env.solar[k], keep);
        Ok::<(), HarnessError>(())
    };
    for k in w0..cs {
        let u = thermostat(mpc, hist.y[0]);
        advance(&mut plant, &mut hist, k, u)?;
    }

    let mut trace = ClosedLoopTrace {
        records: Vec::with_capacity(steps),
    };
    let mut hint: Option<Vec<f64>> = None;
    for step in 0..steps {
        let k = cs + step;
        let y = hist.y[0];
        let fc = env.forecast(k, mpc.horizon);
        let started = Instant::now();
        let decision = match solve_step(mpc, model, &hist, &fc, &curve, &opts, hint.as_deref()) {
            Ok(d) => d,
            Err(source) => {
                return Err(HarnessError::Controller {
                    step,
                    source,
                    partial: Box::new(trace),
                })
            }
        };
        let solve_ms = started.elapsed().as_secs_f64() * 1e3;
        hint = Some(decision.shifted_values()).filter(|h| !h.is_empty());
        let u = decision.u0;
        let l_hp = if cfg.noise.silent_at_zero && u == 0.0 {
            f64::NEG_INFINITY
        } else {
            eval_curve(&curve, u)?
        };
        let l_amb = env.ambient[k];
        let price = env.price[k];
        trace.records.push(TraceRecord {
            step,
            timestamp: timestamp_at(env.start, k),
            y,
            u,
            l_hp,
            l_amb,
            l_mix: mix(l_amb, l_hp),
            price,
            energy_cost: mpc.energy_per_step() * price * u,
            violation: (mpc.comfort_low_c - y).max(y - mpc.comfort_high_c).max(0.0),
            solve_ms,
            status: if decision.degraded {
                "node_limit".to_string()
            } else {
                "optimal".to_string()
            },
        });
        advance(&mut plant, &mut hist, k, u)?;
    }
    let capped = trace.records.iter().filter(|r| r.status != "optimal").count();
    if capped > 0 {
        info!(
            "{} eta={}: {capped} of {steps} steps stopped at the node cap",
            mpc.cost_option.as_str(),
            mpc.eta
        );
    }
    Ok(trace)
}

/// Per-run summary metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub eta: f64,
    pub option: CostOption,
    pub energy_cost: f64,
    /// Noise cost of the applied inputs under the row's option; the
    /// baseline row uses the exceedance form.
    pub jn: f64,
    pub real_noise_cost: f64,
    pub l_den: f64,
    pub l_quiet: f64,
    /// Hours per day with the heat pump louder than the ambient.
    pub domination_h: f64,
    pub mean_solve_ms: f64,
    /// Set when the run failed; metric fields are NaN then.
    pub failed: Option<String>,
}

impl MetricsRow {
    pub fn failed(eta: f64, option: CostOption, why: String) -> Self {
        Self {
            eta,
            option,
            energy_cost: f64::NAN,
            jn: f64::NAN,
            real_noise_cost: f64::NAN,
            l_den: f64::NAN,
            l_quiet: f64::NAN,
            domination_h: f64::NAN,
            mean_solve_ms: f64::NAN,
            failed: Some(why),
        }
    }
}

/// Noise cost of the applied inputs, using the curve level of each `u`.
pub fn applied_noise_cost(
    trace: &ClosedLoopTrace,
    option: CostOption,
    curve: &NoiseCurve,
) -> Result<f64, HarnessError> {
    let levels = trace
        .records
        .iter()
        .map(|r| eval_curve(curve, r.u))
        .collect::<Result<Vec<_>, _>>()?;
    let amb = trace.column(|r| r.l_amb);
    Ok(match option {
        CostOption::Ratio => ratio_cost(&levels, &amb),
        _ => exceedance_cost(&levels, &amb),
    })
}

pub fn compute_metrics(
    trace: &ClosedLoopTrace,
    option: CostOption,
    eta: f64,
    curve: &NoiseCurve,
) -> Result<MetricsRow, HarnessError> {
    let ac = trace.acoustic()?;
    let n = trace.len() as f64;
    Ok(MetricsRow {
        eta,
        option,
        energy_cost: trace.records.iter().map(|r| r.energy_cost).sum(),
        jn: applied_noise_cost(trace, option, curve)?,
        real_noise_cost: real_noise_cost(&ac),
        l_den: l_den(&ac)?,
        l_quiet: l_quiet(&ac)?,
        domination_h: domination_time(&ac),
        mean_solve_ms: trace.records.iter().map(|r| r.solve_ms).sum::<f64>() / n,
        failed: None,
    })
}

/// One finished (or failed) sweep run.
#[derive(Clone, Debug)]
pub struct SweepRun {
    pub row: MetricsRow,
    /// Full trace, or the partial trace of a failed run.
    pub trace: ClosedLoopTrace,
}

/// Controller settings of a sweep point. At `η = 0` both noise options
/// build the same problem, so they share one run.
fn controller_for(cfg: &RunConfig, option: CostOption, eta: f64) -> MpcConfig {
    let option = if eta == 0.0 && option != CostOption::Baseline {
        CostOption::Exceedance
    } else {
        option
    };
    MpcConfig {
        eta: if option == CostOption::Baseline { 0.0 } else { eta },
        cost_option: option,
        ..cfg.controller.clone()
    }
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
}

/// Runs every `(option, η)` point, each on its own plant and controller,
/// on a bounded pool. Rows come back grouped by option in the given order,
/// sorted by η, followed by the baseline when requested.
pub fn run_sweep(
    cfg: &RunConfig,
    env: &Environment,
    model: &ArxModel,
    options: &[CostOption],
    etas: &[f64],
    baseline: bool,
    days: usize,
) -> Vec<SweepRun> {
    let mut grid = etas.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut points: Vec<(CostOption, f64)> = options
        .iter()
        .flat_map(|&o| grid.iter().map(move |&e| (o, e)))
        .collect();
    if baseline {
        points.push((CostOption::Baseline, 0.0));
    }
    let mut jobs: Vec<MpcConfig> = Vec::new();
    let job_of: Vec<usize> = points
        .iter()
        .map(|&(o, e)| {
            let c = controller_for(cfg, o, e);
            match jobs.iter().position(|j| *j == c) {
                Some(i) => i,
                None => {
                    jobs.push(c);
                    jobs.len() - 1
                }
            }
        })
        .collect();
    let plant = cfg.plant.kind;
    let results: Vec<Result<ClosedLoopTrace, HarnessError>> = pool(cfg.sweep.threads).install(|| {
        jobs.par_iter()
            .map(|mpc| {
                let r = run_closed_loop(cfg, env, model, mpc, plant, days);
                match &r {
                    Ok(_) => info!("finished {} eta={}", mpc.cost_option.as_str(), mpc.eta),
                    Err(e) => warn!("run {} eta={} failed: {e}", mpc.cost_option.as_str(), mpc.eta),
                }
                r
            })
            .collect()
    });
    let curve = cfg.noise.curve();
    points
        .iter()
        .zip(job_of)
        .map(|(&(option, eta), j)| match &results[j] {
            Ok(trace) => {
                let row = compute_metrics(trace, option, eta, &curve)
                    .unwrap_or_else(|e| MetricsRow::failed(eta, option, e.to_string()));
                SweepRun {
                    row,
                    trace: trace.clone(),
                }
            }
            Err(e) => SweepRun {
                row: MetricsRow::failed(eta, option, e.to_string()),
                trace: match e {
                    HarnessError::Controller { partial, .. } => (**partial).clone(),
                    _ => ClosedLoopTrace::default(),
                },
            },
        })
        .collect()
}

/// Sweep of one option over an η grid; rows sorted by η.
pub fn pareto_sweep(
    cfg: &RunConfig,
    env: &Environment,
    model: &ArxModel,
    option: CostOption,
    etas: &[f64],
    days: usize,
) -> Result<Vec<SweepRun>, HarnessError> {
    if etas.is_empty() {
        return Err(HarnessError::Setup("empty eta grid".into()));
    }
    Ok(run_sweep(cfg, env, model, &[option], etas, false, days))
}

/// Both noise options over the configured grid, plus the baseline.
pub fn full_sweep(
    cfg: &RunConfig,
    env: &Environment,
    model: &ArxModel,
) -> Vec<SweepRun> {
    run_sweep(
        cfg,
        env,
        model,
        &cfg.sweep.options,
        &cfg.sweep.etas,
        cfg.sweep.baseline,
        cfg.sweep.days,
    )
}

pub const SUMMARY_LABELS: [&str; 7] = [
    "Noise cost J_n reduction (%)",
    "Real noise cost reduction (%)",
    "Energy cost increase (%)",
    "L_den reduction (dB)",
    "L_quiet reduction (dB)",
    "Domination time reduction (h/day)",
    "Mean MPC solve time (s)",
];

/// `100 (reference - value) / reference`; 0 when both are 0.
pub fn reduction_pct(reference: f64, value: f64) -> f64 {
    if reference == value {
        0.0
    } else {
        100.0 * (reference - value) / reference
    }
}

/// One column of the summary table: a row compared with a reference row.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryColumn {
    pub title: String,
    pub jn_reduction_pct: f64,
    pub real_noise_reduction_pct: f64,
    pub energy_increase_pct: f64,
    pub l_den_reduction_db: f64,
    pub l_quiet_reduction_db: f64,
    pub domination_reduction_h: f64,
    pub mean_solve_s: f64,
}

impl SummaryColumn {
    pub fn compare(title: String, reference: &MetricsRow, row: &MetricsRow) -> Self {
        Self {
            title,
            jn_reduction_pct: reduction_pct(reference.jn, row.jn),
            real_noise_reduction_pct: reduction_pct(reference.real_noise_cost, row.real_noise_cost),
            energy_increase_pct: -reduction_pct(reference.energy_cost, row.energy_cost),
            l_den_reduction_db: reference.l_den - row.l_den,
            l_quiet_reduction_db: reference.l_quiet - row.l_quiet,
            domination_reduction_h: reference.domination_h - row.domination_h,
            mean_solve_s: row.mean_solve_ms / 1e3,
        }
    }

    pub fn values(&self) -> [f64; 7] {
        [
            self.jn_reduction_pct,
            self.real_noise_reduction_pct,
            self.energy_increase_pct,
            self.l_den_reduction_db,
            self.l_quiet_reduction_db,
            self.domination_reduction_h,
            self.mean_solve_s,
        ]
    }
}

/// Row of `option` with the largest J_n reduction against its `η = 0` row;
/// ties go to the smaller η. Falls back to the reference when the grid has
/// no positive η.
pub fn best_row(rows: &[MetricsRow], option: CostOption) -> Result<(&MetricsRow, &MetricsRow), HarnessError> {
    let ok: Vec<&MetricsRow> = rows
        .iter()
        .filter(|r| r.option == option && r.failed.is_none())
        .collect();
    let reference = ok
        .iter()
        .find(|r| r.eta == 0.0)
        .copied()
        .ok_or_else(|| HarnessError::MissingReference(format!("{} eta=0", option.as_str())))?;
    let mut sorted: Vec<&MetricsRow> = ok.iter().copied().filter(|r| r.eta > 0.0).collect();
    sorted.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    let mut best = sorted.first().copied().unwrap_or(reference);
    for r in sorted {
        if r.jn < best.jn - 1e-9 * best.jn.abs().max(1.0) {
            best = r;
        }
    }
    Ok((reference, best))
}

/// Summary table: each noise option at its best η against its `η = 0`
/// reference, and against the baseline when one is given.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub columns: Vec<SummaryColumn>,
}

pub fn summarize(rows: &[MetricsRow], baseline: Option<&MetricsRow>) -> Result<Summary, HarnessError> {
    let mut options: Vec<CostOption> = Vec::new();
    for r in rows {
        if r.option != CostOption::Baseline && !options.contains(&r.option) {
            options.push(r.option);
        }
    }
    let mut columns = Vec::new();
    let mut best = Vec::new();
    for &o in &options {
        let (reference, row) = best_row(rows, o)?;
        columns.push(SummaryColumn::compare(
            format!("{} (eta = {}) vs eta = 0", o.as_str(), row.eta),
            reference,
            row,
        ));
        best.push((o, row));
    }
    if let Some(b) = baseline {
        if b.failed.is_some() {
            return Err(HarnessError::MissingReference("baseline".into()));
        }
        for (o, row) in best {
            columns.push(SummaryColumn::compare(
                format!("{} (eta = {}) vs baseline", o.as_str(), row.eta),
                b,
                row,
            ));
        }
    }
    Ok(Summary { columns })
}

impl Summary {
    pub fn to_markdown(&self) -> String {
        let mut s = String::from("# Performance summary\n\n| metric |");
        for c in &self.columns {
            s.push_str(&format!(" {} |", c.title));
        }
        s.push_str("\n|---|");
        for _ in &self.columns {
            s.push_str("---:|");
        }
        s.push('\n');
        for (i, label) in SUMMARY_LABELS.iter().enumerate() {
            s.push_str(&format!("| {label} |"));
            for c in &self.columns {
                s.push_str(&format!(" {:.2} |", c.values()[i]));
            }
            s.push('\n');
        }
        s
    }
}

pub const METRICS_HEADER: [&str; 9] = [
    "eta",
    "option",
    "energy_cost",
    "Jn",
    "real_noise_cost_dB",
    "Lden_dB",
    "Lquiet_dB",
    "domination_h",
    "mean_solve_ms",
];

pub fn metrics_csv(rows: &[MetricsRow], record_timing: bool) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| HarnessError::Series(SeriesError::from(e));
    w.write_record(METRICS_HEADER).map_err(csv_err)?;
    for r in rows {
        let ms = if record_timing || r.failed.is_some() {
            r.mean_solve_ms
        } else {
            0.0
        };
        w.write_record([
            r.eta.to_string(),
            r.option.as_str().to_string(),
            r.energy_cost.to_string(),
            r.jn.to_string(),
            r.real_noise_cost.to_string(),
            r.l_den.to_string(),
            r.l_quiet.to_string(),
            r.domination_h.to_string(),
            ms.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| HarnessError::Trace(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// File name of a run's trace.
pub fn trace_file_name(eta: f64) -> String {
    format!("trace_{eta}.csv")
}

/// Writes `<option>/trace_<eta>.csv` per run, `metrics.csv` and, when
/// given, `summary.md` under `out_dir`.
pub fn write_outputs(
    out_dir: &Path,
    runs: &[SweepRun],
    summary: Option<&Summary>,
    record_timing: bool,
) -> Result<(), HarnessError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    for run in runs {
        let dir = out_dir.join(run.row.option.as_str());
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        run.trace
            .write(&dir.join(trace_file_name(run.row.eta)), record_timing)?;
    }
    let rows: Vec<MetricsRow> = runs.iter().map(|r| r.row.clone()).collect();
    let path = out_dir.join("metrics.csv");
    fs::write(&path, metrics_csv(&rows, record_timing)?).map_err(io_err(&path))?;
    if let Some(s) = summary {
        let path = out_dir.join("summary.md");
        fs::write(&path, s.to_markdown()).map_err(io_err(&path))?;
    }
    Ok(())
}
