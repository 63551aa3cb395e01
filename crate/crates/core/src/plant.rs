//! Surrogate building: a three-node RC network (air, envelope, floor) heated
//! through the floor by the heat pump, plus synthetic weather, occupancy and
//! the open-loop excitation used for identification.
//!
//! The network is discretized exactly: for `dx/dt = A x + B w` with inputs
//! held over the step, `[Ad Bd] = top rows of exp([[A, B], [0, 0]] dt)`.

use std::f64::consts::PI;
use std::path::Path;

use chrono::NaiveDateTime;
use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{self, hour_of_day, in_window, is_weekend, SeriesError};

#[derive(Debug, Error)]
pub enum PlantError {
    #[error("input u = {0} outside [0, 1]")]
    Input(f64),
    #[error("time step must be positive, got {0}")]
    Step(f64),
    #[error("invalid plant parameters: {0}")]
    Params(String),
    #[error("invalid weather: {0}")]
    Weather(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Thermal parameters. Resistances in K/W, capacitances in J/K.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RcParams {
    pub c_air: f64,
    pub c_envelope: f64,
    pub c_floor: f64,
    pub r_floor_air: f64,
    pub r_air_envelope: f64,
    pub r_envelope_out: f64,
    /// Ventilation and glazing path straight to outdoors.
    pub r_air_out: f64,
    /// Electrical capacity of the heat pump, W.
    pub p_max_w: f64,
    /// Heat delivered per unit of electrical power.
    pub cop: f64,
    /// Effective solar aperture onto the envelope, m².
    pub solar_aperture_m2: f64,
}

impl Default for RcParams {
    fn default() -> Self {
        Self {
            c_air: 2.0e6,
            c_envelope: 2.0e7,
            c_floor: 1.5e7,
            r_floor_air: 5.2e-4,
            r_air_envelope: 6.7e-4,
            r_envelope_out: 1.55e-3,
            r_air_out: 4.0e-3,
            p_max_w: 15_000.0,
            cop: 3.0,
            solar_aperture_m2: 6.0,
        }
    }
}

impl RcParams {
    pub fn validate(&self) -> Result<(), PlantError> {
        let positive = [
            ("c_air", self.c_air),
            ("c_envelope", self.c_envelope),
            ("c_floor", self.c_floor),
            ("r_floor_air", self.r_floor_air),
            ("r_air_envelope", self.r_air_envelope),
            ("r_envelope_out", self.r_envelope_out),
            ("r_air_out", self.r_air_out),
            ("p_max_w", self.p_max_w),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PlantError::Params(format!("{name} must be positive")));
            }
        }
        if !(self.cop >= 1.0 && self.cop.is_finite()) {
            return Err(PlantError::Params("cop must be at least 1".into()));
        }
        if !(self.solar_aperture_m2 >= 0.0 && self.solar_aperture_m2.is_finite()) {
            return Err(PlantError::Params("solar_aperture_m2 must be non-negative".into()));
        }
        Ok(())
    }

    /// Steady-state conductance from indoor air to outdoors, W/K.
    pub fn total_ua(&self) -> f64 {
        1.0 / self.r_air_out + 1.0 / (self.r_air_envelope + self.r_envelope_out)
    }

    /// Continuous-time matrices for state `[air, envelope, floor]` and input
    /// `[u, T_out, S, Q_occ]`.
    fn continuous(&self) -> (SMatrix<f64, 3, 3>, SMatrix<f64, 3, 4>) {
        let g_fa = 1.0 / self.r_floor_air;
        let g_ae = 1.0 / self.r_air_envelope;
        let g_eo = 1.0 / self.r_envelope_out;
        let g_ao = 1.0 / self.r_air_out;
        let (ca, ce, cf) = (self.c_air, self.c_envelope, self.c_floor);
        #[rustfmt::skip]
        let a = SMatrix::<f64, 3, 3>::new(
            -(g_fa + g_ae + g_ao) / ca, g_ae / ca,            g_fa / ca,
            g_ae / ce,                  -(g_ae + g_eo) / ce,  0.0,
            g_fa / cf,                  0.0,                  -g_fa / cf,
        );
        #[rustfmt::skip]
        let b = SMatrix::<f64, 3, 4>::new(
            0.0,                              g_ao / ca, 0.0,                              1.0 / ca,
            0.0,                              g_eo / ce, self.solar_aperture_m2 / ce,      0.0,
            self.cop * self.p_max_w / cf,     0.0,       0.0,                              0.0,
        );
        (a, b)
    }
}

/// Exogenous conditions over one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disturbance {
    pub t_amb: f64,
    pub solar: f64,
    /// Internal gain into the air node, W.
    pub occupancy_w: f64,
}

#[derive(Clone, Debug)]
pub struct RcPlant {
    params: RcParams,
    /// `[air, envelope, floor]`, °C.
    state: SVector<f64, 3>,
    cache: Option<(f64, SMatrix<f64, 3, 3>, SMatrix<f64, 3, 4>)>,
}

impl RcPlant {
    pub fn new(params: RcParams, initial: [f64; 3]) -> Result<Self, PlantError> {
        params.validate()?;
        Ok(Self {
            params,
            state: SVector::from(initial),
            cache: None,
        })
    }

    pub fn params(&self) -> &RcParams {
        &self.params
    }

    pub fn state(&self) -> [f64; 3] {
        self.state.into()
    }

    pub fn t_air(&self) -> f64 {
        self.state[0]
    }

    fn discretize(&mut self, dt: f64) -> (SMatrix<f64, 3, 3>, SMatrix<f64, 3, 4>) {
        if let Some((cached_dt, ad, bd)) = self.cache {
            if cached_dt == dt {
                return (ad, bd);
            }
        }
        let (a, b) = self.params.continuous();
        let mut m = SMatrix::<f64, 7, 7>::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&(a * dt));
        m.fixed_view_mut::<3, 4>(0, 3).copy_from(&(b * dt));
        let e = m.exp();
        let ad = e.fixed_view::<3, 3>(0, 0).into_owned();
        let bd = e.fixed_view::<3, 4>(0, 3).into_owned();
        self.cache = Some((dt, ad, bd));
        (ad, bd)
    }

    /// Advances by `dt` seconds with inputs held constant; returns the new
    /// air temperature.
    pub fn step(&mut self, u: f64, w: Disturbance, dt: f64) -> Result<f64, PlantError> {
        if !(0.0..=1.0).contains(&u) {
            return Err(PlantError::Input(u));
        }
        if !(dt > 0.0) {
            return Err(PlantError::Step(dt));
        }
        let (ad, bd) = self.discretize(dt);
        let input = SVector::<f64, 4>::new(u, w.t_amb, w.solar, w.occupancy_w);
        self.state = ad * self.state + bd * input;
        Ok(self.state[0])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OccupancySchedule {
    pub occupants: u32,
    pub gain_per_occupant_w: f64,
    /// Weekday presence window `[from, to)` in hours, may wrap midnight.
    pub weekday_from_h: f64,
    pub weekday_to_h: f64,
}

impl Default for OccupancySchedule {
    fn default() -> Self {
        Self {
            occupants: 5,
            gain_per_occupant_w: 100.0,
            weekday_from_h: 18.0,
            weekday_to_h: 8.0,
        }
    }
}

impl OccupancySchedule {
    /// No one home, ever.
    pub fn empty() -> Self {
        Self {
            occupants: 0,
            ..Self::default()
        }
    }

    pub fn count_at(&self, ts: NaiveDateTime) -> u32 {
        if is_weekend(ts) || in_window(hour_of_day(ts), self.weekday_from_h, self.weekday_to_h) {
            self.occupants
        } else {
            0
        }
    }

    pub fn gain_at(&self, ts: NaiveDateTime) -> f64 {
        self.count_at(ts) as f64 * self.gain_per_occupant_w
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeatherParams {
    pub mean_c: f64,
    pub amplitude_c: f64,
    /// Hour of the daily temperature maximum.
    pub warmest_hour: f64,
    /// Clear-sky irradiance at solar noon, W/m².
    pub solar_peak_wm2: f64,
    pub daylight_start_h: f64,
    pub daylight_end_h: f64,
    /// Standard deviation of the slow temperature perturbation, °C.
    pub perturbation_c: f64,
    /// Lowest daily clear-sky fraction; each day draws uniformly up to 1.
    pub min_clearness: f64,
}

impl Default for WeatherParams {
    fn default() -> Self {
        Self {
            mean_c: 4.0,
            amplitude_c: 4.0,
            warmest_hour: 15.0,
            solar_peak_wm2: 350.0,
            daylight_start_h: 8.0,
            daylight_end_h: 16.0,
            perturbation_c: 1.0,
            min_clearness: 0.3,
        }
    }
}

impl WeatherParams {
    pub fn validate(&self) -> Result<(), PlantError> {
        if !(self.daylight_start_h < self.daylight_end_h)
            || self.daylight_start_h < 0.0
            || self.daylight_end_h > 24.0
        {
            return Err(PlantError::Weather("daylight window must satisfy 0 <= start < end <= 24".into()));
        }
        if !(self.solar_peak_wm2 >= 0.0) || !(self.perturbation_c >= 0.0) || !(self.amplitude_c >= 0.0) {
            return Err(PlantError::Weather(
                "solar peak, amplitude and perturbation must be non-negative".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.min_clearness) {
            return Err(PlantError::Weather("min_clearness must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeatherSeries {
    pub start: NaiveDateTime,
    pub t_amb: Vec<f64>,
    pub solar: Vec<f64>,
}

const WEATHER_HEADER: [&str; 3] = ["timestamp", "T_amb_C", "S_Wm2"];

impl WeatherSeries {
    pub fn len(&self) -> usize {
        self.t_amb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_amb.is_empty()
    }

    pub fn read_csv(path: &Path) -> Result<Self, PlantError> {
        let t = series::read_table(series::open(path)?, &WEATHER_HEADER)?;
        let mut cols = t.columns.into_iter();
        let t_amb = cols.next().unwrap_or_default();
        let solar = cols.next().unwrap_or_default();
        if solar.iter().any(|s| !(*s >= 0.0)) {
            return Err(PlantError::Weather("negative irradiance".into()));
        }
        Ok(Self {
            start: t.start,
            t_amb,
            solar,
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), PlantError> {
        series::write_table(
            series::create(path)?,
            &WEATHER_HEADER,
            self.start,
            &[&self.t_amb, &self.solar],
        )?;
        Ok(())
    }
}

/// Diurnal sinusoid plus a slow first-order random perturbation for the
/// temperature; half-sine irradiance inside the daylight window scaled by a
/// per-day clearness draw.
pub fn synth_weather(
    params: &WeatherParams,
    start: NaiveDateTime,
    days: usize,
    seed: u64,
) -> Result<WeatherSeries, PlantError> {
    params.validate()?;
    if days == 0 {
        return Err(PlantError::Weather("days must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = days * series::STEPS_PER_DAY;
    // AR(1) with a ~6 h correlation time, scaled to the requested std
    let rho: f64 = (-1.0 / 24.0f64).exp();
    let innovation = params.perturbation_c * (1.0 - rho * rho).sqrt();
    let mut drift = 0.0;
    let mut clearness = 1.0;
    let mut t_amb = Vec::with_capacity(steps);
    let mut solar = Vec::with_capacity(steps);
    for k in 0..steps {
        if k % series::STEPS_PER_DAY == 0 {
            clearness = rng.random_range(params.min_clearness..=1.0);
        }
        let shock: f64 = rng.random_range(-1.0..1.0) * 3f64.sqrt();
        drift = rho * drift + innovation * shock;
        let h = hour_of_day(series::timestamp_at(start, k));
        let phase = 2.0 * PI * (h - params.warmest_hour) / 24.0;
        t_amb.push(params.mean_c + params.amplitude_c * phase.cos() + drift);
        let (a, b) = (params.daylight_start_h, params.daylight_end_h);
        let s = if h > a && h < b {
            params.solar_peak_wm2 * clearness * (PI * (h - a) / (b - a)).sin()
        } else {
            0.0
        };
        solar.push(s);
    }
    Ok(WeatherSeries {
        start,
        t_amb,
        solar,
    })
}

/// Random piecewise-constant input with comfort overrides: off above
/// `high_c`, full power below `low_c`.
#[derive(Clone, Debug)]
pub struct Excitation {
    rng: ChaCha8Rng,
    level: f64,
    remaining: usize,
    pub low_c: f64,
    pub high_c: f64,
}

impl Excitation {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            level: 0.0,
            remaining: 0,
            low_c: 19.0,
            high_c: 24.0,
        }
    }

    /// Next input given the current measured air temperature.
    pub fn next(&mut self, t_air: f64) -> f64 {
        if self.remaining == 0 {
            self.level = self.rng.random_range(0.0..=1.0);
            self.remaining = self.rng.random_range(2..=12);
        }
        self.remaining -= 1;
        if t_air > self.high_c {
            0.0
        } else if t_air < self.low_c {
            1.0
        } else {
            self.level
        }
    }
}

/// Excitation sequence for a fixed temperature trajectory; in closed loop use
/// [`Excitation::next`] step by step instead.
pub fn gen_excitation(seed: u64, t_air: &[f64]) -> Vec<f64> {
    let mut ex = Excitation::new(seed);
    t_air.iter().map(|&t| ex.next(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::default_start;

    fn calm(t: f64) -> Disturbance {
        Disturbance {
            t_amb: t,
            solar: 0.0,
            occupancy_w: 0.0,
        }
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let mut p = RcPlant::new(RcParams::default(), [20.0; 3]).unwrap();
        for _ in 0..10 {
            p.step(0.0, calm(20.0), 900.0).unwrap();
        }
        for s in p.state() {
            assert!((s - 20.0).abs() < 1e-10);
        }
    }

    #[test]
    fn passive_cooling_lowers_air_temperature() {
        let mut p = RcPlant::new(RcParams::default(), [21.0; 3]).unwrap();
        let before = p.t_air();
        assert!(p.step(0.0, calm(5.0), 900.0).unwrap() < before);
    }

    #[test]
    fn rejects_bad_input() {
        let mut p = RcPlant::new(RcParams::default(), [21.0; 3]).unwrap();
        assert!(matches!(p.step(1.5, calm(5.0), 900.0), Err(PlantError::Input(_))));
        assert!(matches!(p.step(0.5, calm(5.0), 0.0), Err(PlantError::Step(_))));
    }

    #[test]
    fn exact_step_matches_fine_euler() {
        let params = RcParams::default();
        let (a, b) = params.continuous();
        let w = SVector::<f64, 4>::new(0.4, 2.0, 150.0, 500.0);
        let mut x = SVector::<f64, 3>::new(21.0, 15.0, 25.0);
        let mut p = RcPlant::new(params, [21.0, 15.0, 25.0]).unwrap();
        p.step(0.4, Disturbance { t_amb: 2.0, solar: 150.0, occupancy_w: 500.0 }, 900.0)
            .unwrap();
        let h = 0.01;
        for _ in 0..90_000 {
            x += (a * x + b * w) * h;
        }
        for (e, s) in x.iter().zip(p.state()) {
            assert!((e - s).abs() < 1e-3, "{e} vs {s}");
        }
    }

    #[test]
    fn weekday_evening_and_weekend_occupancy() {
        let occ = OccupancySchedule::default();
        let monday_noon = series::timestamp_at(default_start(), 48);
        let monday_night = series::timestamp_at(default_start(), 80);
        let saturday_noon = series::timestamp_at(default_start(), 5 * 96 + 48);
        assert_eq!(occ.count_at(monday_noon), 0);
        assert_eq!(occ.gain_at(monday_night), 500.0);
        assert_eq!(occ.count_at(saturday_noon), 5);
    }

    #[test]
    fn weather_is_deterministic_and_dark_at_night() {
        let p = WeatherParams::default();
        let a = synth_weather(&p, default_start(), 3, 7).unwrap();
        assert_eq!(a, synth_weather(&p, default_start(), 3, 7).unwrap());
        for (k, s) in a.solar.iter().enumerate() {
            let h = hour_of_day(series::timestamp_at(default_start(), k));
            if !(8.0..16.0).contains(&h) {
                assert_eq!(*s, 0.0);
            }
            assert!(*s >= 0.0);
        }
        let flat = WeatherParams {
            amplitude_c: 0.0,
            perturbation_c: 0.0,
            ..p
        };
        let w = synth_weather(&flat, default_start(), 1, 3).unwrap();
        assert!(w.t_amb.iter().all(|&t| t == 4.0));
    }

    #[test]
    fn excitation_overrides() {
        let mut ex = Excitation::new(1);
        assert_eq!(ex.next(30.0), 0.0);
        assert_eq!(ex.next(10.0), 1.0);
        let u = gen_excitation(5, &[21.0; 500]);
        assert!(u.iter().all(|u| (0.0..=1.0).contains(u)));
        // dwell of at least two steps
        let changes = u.windows(2).filter(|w| w[0] != w[1]).count();
        assert!(changes <= 250);
    }
}
