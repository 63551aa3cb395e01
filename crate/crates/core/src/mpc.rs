//! Receding-horizon controller: builds the per-step MILP with the
//! piecewise noise encoding and solves it, plus the day/night cap baseline.
//!
//! Variables are laid out step by step so that a plan can be shifted into a
//! start hint for the next step. Per step `t` the block is
//! `u, λ_0..λ_k, z_1..z_k, L̂, [δ], s`, with `δ` present only for the
//! exceedance cost at `η > 0`.
//!
//! Rows per step: lifted comfort bounds softened by `s`, the `u` and `L̂`
//! definitions, `k + 1` adjacency rows, `Σz = 1`, optionally `Σλ = 1`, and
//! `L̂ - δ ≤ L_amb` with the cuts of [`exceedance_envelope`] when `δ`
//! exists.

use std::time::Duration;

use log::debug;
use quietpump_milp::{
    solve_lp_with, solve_milp_with, write_lp, LinearProgram, Sense, SolverOptions, Status, VarId,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lin_model::{lift_for_horizon, ArxModel, History, Lifted, ModelError};
use crate::noise::{eval_curve, invert_curve_max_u, NoiseCurve, NoiseError};
use crate::series::{in_window, STEP_HOURS};

#[derive(Debug, Error)]
pub enum MpcError {
    #[error("{what} forecast has {got} samples, horizon needs {needed}")]
    Forecast {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("invalid controller config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("solver returned {status}\n{dump}")]
    Solver { status: &'static str, dump: String },
    #[error(transparent)]
    Milp(#[from] quietpump_milp::MilpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostOption {
    /// `Σ L̂_t / L_amb_t`.
    Ratio,
    /// `Σ δ_t` with `L̂_t ≤ L_amb_t + δ_t`.
    Exceedance,
    /// Energy-only LP with day/night input caps.
    Baseline,
}

impl CostOption {
    pub fn as_str(&self) -> &'static str {
        match self {
            CostOption::Ratio => "ratio",
            CostOption::Exceedance => "exceedance",
            CostOption::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for CostOption {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ratio" => Ok(CostOption::Ratio),
            "exceedance" => Ok(CostOption::Exceedance),
            "baseline" => Ok(CostOption::Baseline),
            _ => Err(format!("unknown cost option {s:?} (ratio|exceedance|baseline)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MpcConfig {
    #[serde(rename = "N")]
    pub horizon: usize,
    pub eta: f64,
    pub cost_option: CostOption,
    #[serde(rename = "comfort_low_C")]
    pub comfort_low_c: f64,
    #[serde(rename = "comfort_high_C")]
    pub comfort_high_c: f64,
    #[serde(rename = "p_max_W")]
    pub p_max_w: f64,
    /// Penalty per °C of comfort violation per step.
    pub slack_weight: f64,
    #[serde(rename = "baseline_day_limit_dB")]
    pub baseline_day_limit_db: f64,
    #[serde(rename = "baseline_night_limit_dB")]
    pub baseline_night_limit_db: f64,
    /// Start of the baseline day window, hour.
    pub day_start: f64,
    pub day_end: f64,
    /// Adds `Σλ = 1` per step. Without it the encoding admits points below
    /// the curve.
    pub convex_combination: bool,
}

impl Default for MpcConfig {
    fn default() -> Self {
        Self {
            horizon: 32,
            eta: 0.0,
            cost_option: CostOption::Exceedance,
            comfort_low_c: 19.0,
            comfort_high_c: 24.0,
            p_max_w: 15_000.0,
            slack_weight: 1e4,
            baseline_day_limit_db: 60.0,
            baseline_night_limit_db: 50.0,
            day_start: 7.0,
            day_end: 22.0,
            convex_combination: true,
        }
    }
}

impl MpcConfig {
    pub fn validate(&self) -> Result<(), MpcError> {
        let bad = |m: &str| Err(MpcError::Config(m.to_string()));
        if self.horizon == 0 {
            return bad("N must be at least 1");
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad("eta must be finite and non-negative");
        }
        if !(self.comfort_low_c < self.comfort_high_c) {
            return bad("comfort_low_C must be below comfort_high_C");
        }
        if !(self.p_max_w > 0.0) || !(self.slack_weight >= 0.0) {
            return bad("p_max_W must be positive and slack_weight non-negative");
        }
        if !(0.0..=24.0).contains(&self.day_start) || !(0.0..=24.0).contains(&self.day_end) {
            return bad("day_start and day_end must be hours in [0, 24]");
        }
        Ok(())
    }

    /// Currency per unit of `u` held for one step at price 1 per kWh.
    pub fn energy_per_step(&self) -> f64 {
        STEP_HOURS * self.p_max_w / 1000.0
    }

    pub fn baseline_limit(&self, hour: f64) -> f64 {
        if in_window(hour, self.day_start, self.day_end) {
            self.baseline_day_limit_db
        } else {
            self.baseline_night_limit_db
        }
    }
}

/// Exogenous forecasts over the horizon, element `j` for step `t + j`.
#[derive(Clone, Copy, Debug)]
pub struct Forecast<'a> {
    pub t_amb: &'a [f64],
    pub solar: &'a [f64],
    /// Price per kWh.
    pub price: &'a [f64],
    /// Ambient noise level, dB.
    pub ambient: &'a [f64],
    /// Hour of day of each step.
    pub hour: &'a [f64],
}

impl Forecast<'_> {
    fn check(&self, n: usize) -> Result<(), MpcError> {
        for (what, got) in [
            ("ambient temperature", self.t_amb.len()),
            ("solar", self.solar.len()),
            ("price", self.price.len()),
            ("ambient noise", self.ambient.len()),
            ("hour", self.hour.len()),
        ] {
            if got < n {
                return Err(MpcError::Forecast { what, needed: n, got });
            }
        }
        Ok(())
    }
}

/// Variable handles of a built problem.
#[derive(Clone, Debug)]
pub struct Layout {
    pub u: Vec<VarId>,
    pub lambda: Vec<Vec<VarId>>,
    pub z: Vec<Vec<VarId>>,
    pub lhat: Vec<VarId>,
    pub delta: Option<Vec<VarId>>,
    pub slack: Vec<VarId>,
    /// Variables per step.
    pub block: usize,
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub lp: LinearProgram,
    pub layout: Layout,
    pub lifted: Lifted,
}

fn comfort_rows(
    lp: &mut LinearProgram,
    cfg: &MpcConfig,
    lifted: &Lifted,
    u: &[VarId],
    slack: &[VarId],
) {
    let n = u.len();
    for j in 0..n {
        let mut terms: Vec<(VarId, f64)> = (0..=j)
            .filter(|&m| lifted.phi[(j, m)] != 0.0)
            .map(|m| (u[m], lifted.phi[(j, m)]))
            .collect();
        let g = lifted.gamma[j];
        let mut lo = terms.clone();
        lo.push((slack[j], 1.0));
        lp.add_constraint(format!("comfort_lo_{j}"), lo, Sense::Ge, cfg.comfort_low_c - g);
        terms.push((slack[j], -1.0));
        lp.add_constraint(format!("comfort_hi_{j}"), terms, Sense::Le, cfg.comfort_high_c - g);
    }
}

/// Lines `δ ≥ slope·u + intercept` bounding `(f(u) - ambient)^+` from below,
/// one per facet of its lower convex hull on `[α_0, α_k]`. Facets already
/// implied by `δ ≥ 0` are dropped. They cut off relaxed points only, never
/// a point of the piecewise encoding.
pub fn exceedance_envelope(curve: &NoiseCurve, ambient: f64) -> Vec<(f64, f64)> {
    let (a, b) = (&curve.alpha, &curve.beta);
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(2 * a.len());
    for i in 0..a.len() {
        if i > 0 && (b[i - 1] - ambient) * (b[i] - ambient) < 0.0 {
            let x = a[i - 1] + (ambient - b[i - 1]) * (a[i] - a[i - 1]) / (b[i] - b[i - 1]);
            pts.push((x, 0.0));
        }
        pts.push((a[i], (b[i] - ambient).max(0.0)));
    }
    // lower hull, monotone chain
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (o, q) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (q.0 - o.0) * (p.1 - o.1) - (q.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        if hull.last().is_some_and(|q| q.0 == p.0) {
            continue;
        }
        hull.push(p);
    }
    hull.windows(2)
        .filter_map(|w| {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let icept = w[0].1 - slope * w[0].0;
            let trivial = slope == 0.0 && icept <= 0.0;
            (!trivial).then_some((slope, icept))
        })
        .collect()
}

/// Builds the noise-aware MILP for the ratio or exceedance cost.
pub fn build_problem(
    cfg: &MpcConfig,
    model: &ArxModel,
    hist: &History,
    fc: &Forecast,
    curve: &NoiseCurve,
) -> Result<Problem, MpcError> {
    cfg.validate()?;
    curve.validate()?;
    if cfg.cost_option == CostOption::Baseline {
        return Err(MpcError::Config(
            "the baseline is an LP; use build_baseline_problem".into(),
        ));
    }
    let n = cfg.horizon;
    fc.check(n)?;
    let lifted = lift_for_horizon(model, n, hist, &fc.t_amb[..n], &fc.solar[..n])?;
    let k = curve.pieces();
    let with_delta = cfg.cost_option == CostOption::Exceedance && cfg.eta > 0.0;
    let lo_db = curve.beta.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_db = curve.beta.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut lp = LinearProgram::new();
    let mut layout = Layout {
        u: Vec::with_capacity(n),
        lambda: Vec::with_capacity(n),
        z: Vec::with_capacity(n),
        lhat: Vec::with_capacity(n),
        delta: with_delta.then(|| Vec::with_capacity(n)),
        slack: Vec::with_capacity(n),
        block: 0,
    };
    for t in 0..n {
        let first = lp.num_vars();
        let u = lp.add_var(format!("u_{t}"), 0.0, 1.0);
        let lam: Vec<VarId> = (0..=k)
            .map(|i| lp.add_var(format!("lambda_{i}_{t}"), 0.0, 1.0))
            .collect();
        let z: Vec<VarId> = (1..=k).map(|i| lp.add_binary(format!("z_{i}_{t}"))).collect();
        let lhat = lp.add_var(format!("Lhat_{t}"), lo_db, hi_db);
        if let Some(d) = layout.delta.as_mut() {
            d.push(lp.add_var(format!("delta_{t}"), 0.0, f64::INFINITY));
        }
        let s = lp.add_var(format!("s_{t}"), 0.0, f64::INFINITY);
        layout.block = lp.num_vars() - first;

        let energy = cfg.energy_per_step() * fc.price[t];
        if energy != 0.0 {
            lp.add_objective(u, energy);
        }
        if cfg.slack_weight != 0.0 {
            lp.add_objective(s, cfg.slack_weight);
        }
        match (cfg.cost_option, cfg.eta > 0.0) {
            (CostOption::Ratio, true) => {
                lp.add_objective(lhat, cfg.eta / fc.ambient[t].max(1.0));
            }
            (CostOption::Exceedance, true) => {
                let d = layout.delta.as_ref().unwrap()[t];
                lp.add_objective(d, cfg.eta);
            }
            _ => {}
        }

        let mut udef = vec![(u, -1.0)];
        let mut ldef = vec![(lhat, -1.0)];
        for i in 0..=k {
            if curve.alpha[i] != 0.0 {
                udef.push((lam[i], curve.alpha[i]));
            }
            if curve.beta[i] != 0.0 {
                ldef.push((lam[i], curve.beta[i]));
            }
        }
        lp.add_constraint(format!("u_def_{t}"), udef, Sense::Eq, 0.0);
        lp.add_constraint(format!("L_def_{t}"), ldef, Sense::Eq, 0.0);
        // λ_i may be positive only next to the active piece
        for i in 0..=k {
            let mut row = vec![(lam[i], 1.0)];
            if i >= 1 {
                row.push((z[i - 1], -1.0));
            }
            if i < k {
                row.push((z[i], -1.0));
            }
            lp.add_constraint(format!("adj_{i}_{t}"), row, Sense::Le, 0.0);
        }
        lp.add_constraint(
            format!("one_piece_{t}"),
            z.iter().map(|&v| (v, 1.0)).collect(),
            Sense::Eq,
            1.0,
        );
        if cfg.convex_combination {
            lp.add_constraint(
                format!("convex_{t}"),
                lam.iter().map(|&v| (v, 1.0)).collect(),
                Sense::Eq,
                1.0,
            );
        }
        if let Some(d) = layout.delta.as_ref() {
            lp.add_constraint(
                format!("exceed_{t}"),
                vec![(lhat, 1.0), (d[t], -1.0)],
                Sense::Le,
                fc.ambient[t],
            );
            // δ_t ≥ every facet of the convex hull of (f(u) - L_amb)^+
            for (j, (slope, icept)) in exceedance_envelope(curve, fc.ambient[t])
                .into_iter()
                .enumerate()
            {
                lp.add_constraint(
                    format!("envelope_{j}_{t}"),
                    vec![(u, slope), (d[t], -1.0)],
                    Sense::Le,
                    -icept,
                );
            }
        }
        layout.u.push(u);
        layout.lambda.push(lam);
        layout.z.push(z);
        layout.lhat.push(lhat);
        layout.slack.push(s);
    }
    comfort_rows(&mut lp, cfg, &lifted, &layout.u, &layout.slack);
    Ok(Problem { lp, layout, lifted })
}

/// Energy-only LP with per-step caps from the day/night limits. Ignores the
/// ambient noise forecast.
pub fn build_baseline_problem(
    cfg: &MpcConfig,
    model: &ArxModel,
    hist: &History,
    fc: &Forecast,
    curve: &NoiseCurve,
) -> Result<Problem, MpcError> {
    cfg.validate()?;
    curve.validate()?;
    let n = cfg.horizon;
    for (what, got) in [
        ("ambient temperature", fc.t_amb.len()),
        ("solar", fc.solar.len()),
        ("price", fc.price.len()),
        ("hour", fc.hour.len()),
    ] {
        if got < n {
            return Err(MpcError::Forecast { what, needed: n, got });
        }
    }
    let lifted = lift_for_horizon(model, n, hist, &fc.t_amb[..n], &fc.solar[..n])?;
    let mut lp = LinearProgram::new();
    let mut u = Vec::with_capacity(n);
    let mut slack = Vec::with_capacity(n);
    for t in 0..n {
        let cap = invert_curve_max_u(curve, cfg.baseline_limit(fc.hour[t]))?;
        let ut = lp.add_var(format!("u_{t}"), 0.0, cap.min(1.0));
        let st = lp.add_var(format!("s_{t}"), 0.0, f64::INFINITY);
        let energy = cfg.energy_per_step() * fc.price[t];
        if energy != 0.0 {
            lp.add_objective(ut, energy);
        }
        if cfg.slack_weight != 0.0 {
            lp.add_objective(st, cfg.slack_weight);
        }
        u.push(ut);
        slack.push(st);
    }
    comfort_rows(&mut lp, cfg, &lifted, &u, &slack);
    let layout = Layout {
        u,
        lambda: Vec::new(),
        z: Vec::new(),
        lhat: Vec::new(),
        delta: None,
        slack,
        block: 2,
    };
    Ok(Problem { lp, layout, lifted })
}

#[derive(Clone, Debug)]
pub struct StepDecision {
    /// Input applied now.
    pub u0: f64,
    pub u_plan: Vec<f64>,
    /// Predicted outputs `y_{t+1} .. y_{t+N}`.
    pub y_pred: Vec<f64>,
    /// Noise level of the plan, from the encoding or the curve (baseline).
    pub lhat_pred: Vec<f64>,
    /// Planned energy cost over the horizon.
    pub j_o: f64,
    /// Planned noise cost over the horizon under the active option
    /// (exceedance form for the baseline).
    pub j_n: f64,
    pub slack_sum: f64,
    pub status: Status,
    /// Set when the solver stopped at a cap and returned its incumbent.
    pub degraded: bool,
    pub nodes: usize,
    pub iterations: usize,
    pub solve_time: Duration,
    /// Full solution vector, used to seed the next step.
    pub values: Vec<f64>,
    pub block: usize,
}

impl StepDecision {
    /// Drops the first step of the plan and repeats the last one, giving a
    /// start assignment for the next receding-horizon problem.
    pub fn shifted_values(&self) -> Vec<f64> {
        let b = self.block;
        if b == 0 || self.values.len() < b {
            return Vec::new();
        }
        let mut v = self.values[b..].to_vec();
        v.extend_from_slice(&self.values[self.values.len() - b..]);
        v
    }
}

/// Exceedance noise cost of a level sequence.
pub fn exceedance_cost(lhat: &[f64], ambient: &[f64]) -> f64 {
    lhat.iter().zip(ambient).map(|(l, a)| (l - a).max(0.0)).sum()
}

/// Ratio noise cost of a level sequence; ambient clamped at 1 dB.
pub fn ratio_cost(lhat: &[f64], ambient: &[f64]) -> f64 {
    lhat.iter().zip(ambient).map(|(l, a)| l / a.max(1.0)).sum()
}

fn finish(
    cfg: &MpcConfig,
    problem: &Problem,
    fc: &Forecast,
    curve: &NoiseCurve,
    sol: quietpump_milp::Solution,
) -> Result<StepDecision, MpcError> {
    let degraded = match sol.status {
        Status::Optimal => false,
        Status::IterationLimit if sol.has_point() => {
            debug!("solver hit its cap; applying the incumbent (gap {:.2e})", sol.gap);
            true
        }
        status => {
            return Err(MpcError::Solver {
                status: status.as_str(),
                dump: write_lp(&problem.lp).unwrap_or_default(),
            })
        }
    };
    let n = cfg.horizon;
    let layout = &problem.layout;
    // snap solver round-off at the input bounds
    let u_plan: Vec<f64> = layout
        .u
        .iter()
        .map(|v| {
            let u = sol.values[v.0].clamp(0.0, 1.0);
            if u < 1e-9 {
                0.0
            } else if u > 1.0 - 1e-9 {
                1.0
            } else {
                u
            }
        })
        .collect();
    let lhat_pred: Vec<f64> = if layout.lhat.is_empty() {
        u_plan
            .iter()
            .map(|&u| eval_curve(curve, u))
            .collect::<Result<_, _>>()?
    } else {
        layout.lhat.iter().map(|v| sol.values[v.0]).collect()
    };
    let ambient = &fc.ambient[..n.min(fc.ambient.len())];
    let j_n = match cfg.cost_option {
        CostOption::Ratio => ratio_cost(&lhat_pred, ambient),
        _ => exceedance_cost(&lhat_pred, ambient),
    };
    let j_o = u_plan
        .iter()
        .zip(fc.price)
        .map(|(u, p)| cfg.energy_per_step() * p * u)
        .sum();
    Ok(StepDecision {
        u0: u_plan[0],
        y_pred: problem.lifted.apply(&u_plan),
        lhat_pred,
        u_plan,
        j_o,
        j_n,
        slack_sum: layout.slack.iter().map(|v| sol.values[v.0]).sum(),
        status: sol.status,
        degraded,
        nodes: sol.nodes,
        iterations: sol.iterations,
        solve_time: sol.wall_time,
        block: layout.block,
        values: sol.values,
    })
}

/// Builds and solves one step. `hint` is an optional start assignment in the
/// problem's variable order (see [`StepDecision::shifted_values`]).
#[allow(clippy::too_many_arguments)]
pub fn solve_step(
    cfg: &MpcConfig,
    model: &ArxModel,
    hist: &History,
    fc: &Forecast,
    curve: &NoiseCurve,
    opts: &SolverOptions,
    hint: Option<&[f64]>,
) -> Result<StepDecision, MpcError> {
    if cfg.cost_option == CostOption::Baseline {
        return baseline_step(cfg, model, hist, fc, curve, opts);
    }
    let problem = build_problem(cfg, model, hist, fc, curve)?;
    let hint = hint.filter(|h| h.len() == problem.lp.num_vars());
    let sol = solve_milp_with(&problem.lp, opts, hint)?;
    finish(cfg, &problem, fc, curve, sol)
}

pub fn baseline_step(
    cfg: &MpcConfig,
    model: &ArxModel,
    hist: &History,
    fc: &Forecast,
    curve: &NoiseCurve,
    opts: &SolverOptions,
) -> Result<StepDecision, MpcError> {
    let problem = build_baseline_problem(cfg, model, hist, fc, curve)?;
    let sol = solve_lp_with(&problem.lp, opts)?;
    let cfg = MpcConfig {
        cost_option: CostOption::Baseline,
        ..cfg.clone()
    };
    finish(&cfg, &problem, fc, curve, sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn warm_model() -> (ArxModel, History) {
        // slow first-order building that holds its temperature
        let m = ArxModel::new(vec![0.95], vec![2.0], vec![0.05], vec![0.0]).unwrap();
        let h = History {
            y: vec![22.0],
            ..Default::default()
        };
        (m, h)
    }

    fn flat_forecast(n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        (vec![22.0; n], vec![0.0; n], vec![0.2; n], vec![45.0; n], vec![12.0; n])
    }

    #[test]
    fn variable_count_for_exceedance() {
        let (m, h) = warm_model();
        let (t, s, p, a, hr) = flat_forecast(4);
        let fc = Forecast { t_amb: &t, solar: &s, price: &p, ambient: &a, hour: &hr };
        let cfg = MpcConfig { horizon: 4, eta: 1.0, ..Default::default() };
        let prob = build_problem(&cfg, &m, &h, &fc, &NoiseCurve::default()).unwrap();
        assert_eq!(prob.lp.num_vars(), 44);
        assert_eq!(prob.layout.block, 11);
        assert_eq!(prob.lp.num_binaries(), 12);
    }

    #[test]
    fn warm_single_step_stays_off() {
        let (m, h) = warm_model();
        let (t, s, p, a, hr) = flat_forecast(1);
        let fc = Forecast { t_amb: &t, solar: &s, price: &p, ambient: &a, hour: &hr };
        let cfg = MpcConfig { horizon: 1, eta: 5.0, ..Default::default() };
        let d = solve_step(&cfg, &m, &h, &fc, &NoiseCurve::default(), &Default::default(), None)
            .unwrap();
        assert_eq!(d.u0, 0.0);
        assert_eq!(d.j_n, 0.0);
        assert!(d.status == Status::Optimal);
    }

    #[test]
    fn short_forecast_is_rejected() {
        let (m, h) = warm_model();
        let (t, s, p, a, hr) = flat_forecast(2);
        let fc = Forecast { t_amb: &t, solar: &s, price: &p, ambient: &a[..1], hour: &hr };
        let cfg = MpcConfig { horizon: 2, eta: 1.0, ..Default::default() };
        assert!(matches!(
            build_problem(&cfg, &m, &h, &fc, &NoiseCurve::default()),
            Err(MpcError::Forecast { what: "ambient noise", needed: 2, got: 1 })
        ));
    }

    #[test]
    fn baseline_caps_follow_day_window() {
        let cfg = MpcConfig::default();
        assert_eq!(cfg.baseline_limit(6.75), 50.0);
        assert_eq!(cfg.baseline_limit(7.0), 60.0);
        assert_eq!(cfg.baseline_limit(21.75), 60.0);
        assert_eq!(cfg.baseline_limit(22.0), 50.0);
    }

    #[test]
    fn shifted_values_repeat_last_block() {
        let d = StepDecision {
            u0: 0.0,
            u_plan: vec![],
            y_pred: vec![],
            lhat_pred: vec![],
            j_o: 0.0,
            j_n: 0.0,
            slack_sum: 0.0,
            status: Status::Optimal,
            degraded: false,
            nodes: 0,
            iterations: 0,
            solve_time: Duration::ZERO,
            values: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            block: 2,
        };
        assert_eq!(d.shifted_values(), vec![3.0, 4.0, 5.0, 6.0, 5.0, 6.0]);
    }

    #[test]
    fn envelope_is_hull_of_exceedance() {
        let curve = NoiseCurve::default();
        assert_eq!(exceedance_envelope(&curve, 40.0), vec![(25.0, -5.0)]);
        for amb in [-5.0, 0.0, 25.0, 40.0, 52.5, 60.0, 70.0] {
            let cuts = exceedance_envelope(&curve, amb);
            for i in 0..=1000 {
                let u = i as f64 / 1000.0;
                let h = (eval_curve(&curve, u).unwrap() - amb).max(0.0);
                for &(m, c) in &cuts {
                    assert!(m * u + c <= h + 1e-9, "amb {amb} u {u}");
                }
            }
        }
        assert!(exceedance_envelope(&curve, 60.0).is_empty());
    }
}
