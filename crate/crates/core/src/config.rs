//! Run configuration: one TOML file with typed sections and a master seed.
//!
//! Every section falls back to its defaults, unknown keys are rejected, and
//! [`RunConfig::validate`] applies the checks of the owning modules.
//!
//! ```toml
//! seed = 42
//!
//! [plant]
//! kind = "arx"            # closed-loop plant: rc | arx
//! initial_C = 21.0
//! train_days = 7
//! test_days = 7
//! mae_window = 48
//! [plant.orders]
//! na = 4
//! nb = 1
//! nc = 2
//! nd = 2
//! [plant.rc]              # RcParams
//! [plant.occupancy]       # OccupancySchedule
//!
//! [weather.climate]       # WeatherParams
//! [weather.tariff]
//! low = 0.10
//! high = 0.20
//! low_from_h = 22.0
//! low_to_h = 7.0
//!
//! [noise]
//! alpha = [0.0, 0.2, 0.7, 1.0]
//! beta = [0.0, 40.0, 60.0, 60.0]
//! silent_at_zero = false
//! [noise.ambient]         # AmbientParams
//!
//! [controller]            # MpcConfig
//! N = 32
//!
//! [sweep]
//! etas = [0.0, 0.01, 0.1, 1.0, 10.0, 100.0]
//! options = ["ratio", "exceedance"]
//! baseline = true
//! days = 7
//! threads = 0             # 0 = one per core
//! max_nodes = 300         # branch-and-bound nodes per MPC step
//!
//! [io]
//! record_timing = false   # false writes solve times as 0
//! # model = "out/model.toml"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lin_model::ArxOrders;
use crate::mpc::{CostOption, MpcConfig};
use crate::noise::{AmbientParams, NoiseCurve};
use crate::plant::{OccupancySchedule, RcParams, WeatherParams};
use crate::series::in_window;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("invalid [{section}]: {message}")]
    Invalid {
        section: &'static str,
        message: String,
    },
}

fn invalid(section: &'static str, e: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        section,
        message: e.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlantKind {
    /// Three-node RC surrogate building.
    Rc,
    /// The identified model itself; no mismatch and no occupants.
    Arx,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantSection {
    pub kind: PlantKind,
    /// Initial temperature of every node, °C.
    #[serde(rename = "initial_C")]
    pub initial_c: f64,
    pub train_days: usize,
    pub test_days: usize,
    /// Open-loop window for the fit report, steps.
    pub mae_window: usize,
    pub orders: ArxOrders,
    pub rc: RcParams,
    pub occupancy: OccupancySchedule,
}

impl Default for PlantSection {
    fn default() -> Self {
        Self {
            kind: PlantKind::Arx,
            initial_c: 21.0,
            train_days: 7,
            test_days: 7,
            mae_window: 48,
            orders: ArxOrders::DEFAULT,
            rc: RcParams::default(),
            occupancy: OccupancySchedule::default(),
        }
    }
}

/// Two-tier price per kWh; `low` applies inside `[low_from_h, low_to_h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tariff {
    pub low: f64,
    pub high: f64,
    pub low_from_h: f64,
    pub low_to_h: f64,
}

impl Default for Tariff {
    fn default() -> Self {
        Self {
            low: 0.10,
            high: 0.20,
            low_from_h: 22.0,
            low_to_h: 7.0,
        }
    }
}

impl Tariff {
    pub fn price_at(&self, hour: f64) -> f64 {
        if in_window(hour, self.low_from_h, self.low_to_h) {
            self.low
        } else {
            self.high
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeatherSection {
    pub climate: WeatherParams,
    pub tariff: Tariff,
    /// Replaces the synthetic weather (`timestamp,T_amb_C,S_Wm2`).
    pub csv: Option<PathBuf>,
    /// Replaces the tariff (`timestamp,price_per_kWh`).
    pub price_csv: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Treat `u = 0` as silence (-inf dB) in traces instead of the curve
    /// value.
    pub silent_at_zero: bool,
    pub ambient: AmbientParams,
    /// Replaces the synthetic ambient profile (`timestamp,L_amb_dB`).
    pub ambient_csv: Option<PathBuf>,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let c = NoiseCurve::default();
        Self {
            alpha: c.alpha,
            beta: c.beta,
            silent_at_zero: false,
            ambient: AmbientParams::default(),
            ambient_csv: None,
        }
    }
}

impl NoiseSection {
    pub fn curve(&self) -> NoiseCurve {
        NoiseCurve {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub etas: Vec<f64>,
    pub options: Vec<CostOption>,
    /// Adds the day/night cap baseline run.
    pub baseline: bool,
    pub days: usize,
    /// Worker threads; 0 uses one per core.
    pub threads: usize,
    /// Branch-and-bound node cap per MPC step.
    pub max_nodes: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            etas: vec![0.0, 0.01, 0.1, 1.0, 10.0, 100.0],
            options: vec![CostOption::Ratio, CostOption::Exceedance],
            baseline: true,
            days: 7,
            threads: 0,
            max_nodes: 300,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoSection {
    /// Write measured solve times into traces and `metrics.csv`. Off keeps
    /// those files byte-reproducible.
    pub record_timing: bool,
    /// Identified model to load instead of identifying in-process.
    pub model: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub plant: PlantSection,
    pub weather: WeatherSection,
    pub noise: NoiseSection,
    pub controller: MpcConfig,
    pub sweep: SweepSection,
    pub io: IoSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            plant: PlantSection::default(),
            weather: WeatherSection::default(),
            noise: NoiseSection::default(),
            controller: MpcConfig::default(),
            sweep: SweepSection::default(),
            io: IoSection::default(),
        }
    }
}

impl RunConfig {
    /// Parses and validates. Relative paths inside the file stay relative
    /// to the working directory.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let p = &self.plant;
        p.rc.validate().map_err(|e| invalid("plant.rc", e))?;
        if !p.initial_c.is_finite() {
            return Err(invalid("plant", "initial_C must be finite"));
        }
        if p.train_days == 0 || p.test_days == 0 || p.mae_window == 0 {
            return Err(invalid("plant", "train_days, test_days and mae_window must be positive"));
        }
        let o = p.orders;
        if o.na == 0 || o.nb == 0 || o.nc == 0 || o.nd == 0 {
            return Err(invalid("plant.orders", "every order must be at least 1"));
        }
        if !(p.occupancy.gain_per_occupant_w >= 0.0) {
            return Err(invalid("plant.occupancy", "gain_per_occupant_w must be non-negative"));
        }
        self.weather
            .climate
            .validate()
            .map_err(|e| invalid("weather.climate", e))?;
        let t = &self.weather.tariff;
        if !(t.low >= 0.0 && t.high >= 0.0 && t.low.is_finite() && t.high.is_finite()) {
            return Err(invalid("weather.tariff", "prices must be finite and non-negative"));
        }
        self.noise.curve().validate().map_err(|e| invalid("noise", e))?;
        self.noise
            .ambient
            .validate()
            .map_err(|e| invalid("noise.ambient", e))?;
        self.controller
            .validate()
            .map_err(|e| invalid("controller", e))?;
        if p.rc.p_max_w != self.controller.p_max_w {
            return Err(invalid(
                "controller",
                "p_max_W must equal plant.rc.p_max_w so costs match the plant",
            ));
        }
        let s = &self.sweep;
        if s.etas.is_empty() || s.etas.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(invalid("sweep", "etas must be a nonempty list of finite values >= 0"));
        }
        if !s.etas.contains(&0.0) {
            return Err(invalid("sweep", "etas must include the 0 reference"));
        }
        if s.options.contains(&CostOption::Baseline) {
            return Err(invalid("sweep", "use baseline = true instead of listing it in options"));
        }
        if s.days == 0 || s.max_nodes == 0 {
            return Err(invalid("sweep", "days and max_nodes must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn round_trip() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::from_toml("[controller]\nhorizon_steps = 4\n").unwrap_err();
        assert!(err.to_string().contains("horizon_steps"), "{err}");
    }

    #[test]
    fn nested_overrides() {
        let cfg = RunConfig::from_toml(
            "seed = 7\n[controller]\nN = 8\neta = 2.5\ncost_option = \"ratio\"\n[plant.rc]\ncop = 4.0\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.controller.horizon, 8);
        assert_eq!(cfg.controller.cost_option, CostOption::Ratio);
        assert_eq!(cfg.plant.rc.cop, 4.0);
        assert_eq!(cfg.plant.rc.c_air, RcParams::default().c_air);
    }

    #[test]
    fn module_invariants_are_checked() {
        assert!(RunConfig::from_toml("[noise]\nalpha = [0.0, 0.5]\nbeta = [0.0]\n").is_err());
        assert!(RunConfig::from_toml("[controller]\ncomfort_low_C = 25.0\n").is_err());
        assert!(RunConfig::from_toml("[sweep]\netas = [1.0]\n").is_err());
    }

    #[test]
    fn tariff_tiers() {
        let t = Tariff::default();
        assert_eq!(t.price_at(6.75), 0.10);
        assert_eq!(t.price_at(7.0), 0.20);
        assert_eq!(t.price_at(21.75), 0.20);
        assert_eq!(t.price_at(22.0), 0.10);
    }
}
