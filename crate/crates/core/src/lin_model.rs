//! ARX thermal predictor, least-squares identification and horizon lifting.
//!
//! All histories are ordered newest-first. For a prediction made at step `t`:
//! - `y` starts with `y_t` and needs `na` entries;
//! - `u`, `t_amb` and `solar` hold only samples *before* `t`
//!   (`u_{t-1}, u_{t-2}, ...`) and need `nb - 1`, `nc - 1` and `nd - 1`
//!   entries, because the sample at `t` is the first element of the
//!   corresponding future sequence.
//!
//! Element `j` of an open-loop prediction is `y_{t+j+1}`, driven by
//! `u_seq[j]`, `t_seq[j]` and `s_seq[j]` as lag-1 inputs.

use std::path::Path;

use chrono::NaiveDateTime;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{self, SeriesError};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{what}: need at least {needed} samples, got {got}")]
    Length {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("regressor matrix is rank deficient at column {column}")]
    Singular { column: String },
    #[error("input is empty")]
    Empty,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArxOrders {
    pub na: usize,
    pub nb: usize,
    pub nc: usize,
    pub nd: usize,
}

impl ArxOrders {
    pub const DEFAULT: ArxOrders = ArxOrders {
        na: 4,
        nb: 1,
        nc: 2,
        nd: 2,
    };

    pub fn max_lag(&self) -> usize {
        self.na.max(self.nb).max(self.nc).max(self.nd)
    }

    pub fn num_params(&self) -> usize {
        self.na + self.nb + self.nc + self.nd
    }

    /// Regressor names in parameter order: `a1.., b1.., c1.., d1..`.
    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.num_params());
        for (prefix, n) in [("a", self.na), ("b", self.nb), ("c", self.nc), ("d", self.nd)] {
            names.extend((1..=n).map(|k| format!("{prefix}{k}")));
        }
        names
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArxModel {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    #[serde(default = "default_sample_period")]
    pub sample_period: f64,
}

fn default_sample_period() -> f64 {
    series::STEP_SECONDS as f64
}

impl ArxModel {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, d: Vec<f64>) -> Result<Self, ModelError> {
        let model = Self {
            a,
            b,
            c,
            d,
            sample_period: default_sample_period(),
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, v) in [("a", &self.a), ("b", &self.b), ("c", &self.c), ("d", &self.d)] {
            if v.is_empty() {
                return Err(ModelError::Invalid(format!("order of {name} must be at least 1")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(ModelError::Invalid(format!("non-finite coefficient in {name}")));
            }
        }
        if !(self.sample_period > 0.0) {
            return Err(ModelError::Invalid("sample_period must be positive".into()));
        }
        Ok(())
    }

    pub fn orders(&self) -> ArxOrders {
        ArxOrders {
            na: self.a.len(),
            nb: self.b.len(),
            nc: self.c.len(),
            nd: self.d.len(),
        }
    }

    /// Parameters in the order of [`ArxOrders::param_names`].
    pub fn params(&self) -> Vec<f64> {
        [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .flatten()
            .copied()
            .collect()
    }

    fn from_params(orders: ArxOrders, p: &[f64]) -> Self {
        let (a, rest) = p.split_at(orders.na);
        let (b, rest) = rest.split_at(orders.nb);
        let (c, d) = rest.split_at(orders.nc);
        Self {
            a: a.to_vec(),
            b: b.to_vec(),
            c: c.to_vec(),
            d: d.to_vec(),
            sample_period: default_sample_period(),
        }
    }

    /// Model file text: an `[orders]` table plus the coefficient arrays,
    /// whose lengths must agree with it.
    pub fn to_toml(&self) -> String {
        let file = ModelFile {
            orders: self.orders(),
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
            sample_period: self.sample_period,
        };
        toml::to_string(&file).expect("model serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, ModelError> {
        let f: ModelFile = toml::from_str(text).map_err(|e| ModelError::Invalid(e.to_string()))?;
        let model = ArxModel {
            a: f.a,
            b: f.b,
            c: f.c,
            d: f.d,
            sample_period: f.sample_period,
        };
        model.validate()?;
        if f.orders != model.orders() {
            return Err(ModelError::Invalid(format!(
                "[orders] {:?} disagree with coefficient lengths {:?}",
                f.orders,
                model.orders()
            )));
        }
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    #[serde(default = "default_sample_period")]
    sample_period: f64,
    orders: ArxOrders,
}

fn need(what: &'static str, got: usize, needed: usize) -> Result<(), ModelError> {
    if got < needed {
        Err(ModelError::Length { what, needed, got })
    } else {
        Ok(())
    }
}

fn dot(coef: &[f64], hist: &[f64]) -> f64 {
    coef.iter().zip(hist).map(|(c, h)| c * h).sum()
}

/// One-step prediction `y_t` from lagged samples, each slice newest-first
/// starting at lag 1.
pub fn predict_one_step(
    model: &ArxModel,
    y_hist: &[f64],
    u_hist: &[f64],
    t_hist: &[f64],
    s_hist: &[f64],
) -> Result<f64, ModelError> {
    let o = model.orders();
    need("y history", y_hist.len(), o.na)?;
    need("u history", u_hist.len(), o.nb)?;
    need("T history", t_hist.len(), o.nc)?;
    need("S history", s_hist.len(), o.nd)?;
    Ok(dot(&model.a, y_hist) + dot(&model.b, u_hist) + dot(&model.c, t_hist) + dot(&model.d, s_hist))
}

/// State needed to predict forward from step `t` (see module docs).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct History {
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub t_amb: Vec<f64>,
    pub solar: Vec<f64>,
}

impl History {
    pub fn check(&self, model: &ArxModel) -> Result<(), ModelError> {
        let o = model.orders();
        need("y history", self.y.len(), o.na)?;
        need("u history", self.u.len(), o.nb - 1)?;
        need("T history", self.t_amb.len(), o.nc - 1)?;
        need("S history", self.solar.len(), o.nd - 1)?;
        Ok(())
    }

    /// Advances by one step: `y_next` is the new newest output and the inputs
    /// are the ones applied at the current step. Histories keep `keep` entries.
    pub fn push(&mut self, y_next: f64, u: f64, t_amb: f64, solar: f64, keep: usize) {
        for (v, x) in [
            (&mut self.y, y_next),
            (&mut self.u, u),
            (&mut self.t_amb, t_amb),
            (&mut self.solar, solar),
        ] {
            v.insert(0, x);
            v.truncate(keep);
        }
    }

    /// History at step `t` of a recorded dataset, `t >= max_lag - 1`.
    pub fn from_dataset(data: &IoDataset, t: usize, keep: usize) -> Self {
        let back = |v: &[f64], from: usize| -> Vec<f64> {
            (0..keep).take_while(|&k| k <= from).map(|k| v[from - k]).collect()
        };
        let before = |v: &[f64]| if t == 0 { Vec::new() } else { back(v, t - 1) };
        Self {
            y: back(&data.y, t),
            u: before(&data.u),
            t_amb: before(&data.t_amb),
            solar: before(&data.solar),
        }
    }
}

fn check_sequences(n: usize, t_seq: &[f64], s_seq: &[f64]) -> Result<(), ModelError> {
    need("T forecast", t_seq.len(), n)?;
    need("S forecast", s_seq.len(), n)?;
    Ok(())
}

/// Recursive multi-step prediction feeding predictions back as outputs.
pub fn predict_open_loop(
    model: &ArxModel,
    hist: &History,
    u_seq: &[f64],
    t_seq: &[f64],
    s_seq: &[f64],
) -> Result<Vec<f64>, ModelError> {
    hist.check(model)?;
    let n = u_seq.len();
    if t_seq.len() != n || s_seq.len() != n {
        return Err(ModelError::Invalid(format!(
            "sequence lengths differ: u {n}, T {}, S {}",
            t_seq.len(),
            s_seq.len()
        )));
    }
    let o = model.orders();
    let prepend = |seq: &[f64], past: &[f64], j: usize, len: usize| -> Vec<f64> {
        // newest-first window of `len` samples ending at seq[j]
        (0..len)
            .map(|k| if k <= j { seq[j - k] } else { past[k - j - 1] })
            .collect()
    };
    let mut out: Vec<f64> = Vec::with_capacity(n);
    for j in 0..n {
        let y_win: Vec<f64> = (0..o.na)
            .map(|k| if k < j { out[j - 1 - k] } else { hist.y[k - j] })
            .collect();
        let y = predict_one_step(
            model,
            &y_win,
            &prepend(u_seq, &hist.u, j, o.nb),
            &prepend(t_seq, &hist.t_amb, j, o.nc),
            &prepend(s_seq, &hist.solar, j, o.nd),
        )?;
        out.push(y);
    }
    Ok(out)
}

/// Affine map `y = phi * u + gamma` for the next `n` outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Lifted {
    pub phi: DMatrix<f64>,
    pub gamma: DVector<f64>,
}

impl Lifted {
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (&self.phi * DVector::from_column_slice(u) + &self.gamma)
            .iter()
            .copied()
            .collect()
    }
}

/// Unrolls the recursion symbolically, tracking every output as an affine
/// expression in the future inputs.
pub fn lift_for_horizon(
    model: &ArxModel,
    n: usize,
    hist: &History,
    t_seq: &[f64],
    s_seq: &[f64],
) -> Result<Lifted, ModelError> {
    if n == 0 {
        return Err(ModelError::Invalid("horizon must be at least 1".into()));
    }
    hist.check(model)?;
    check_sequences(n, t_seq, s_seq)?;
    let mut phi = DMatrix::<f64>::zeros(n, n);
    let mut gamma = DVector::<f64>::zeros(n);
    for j in 0..n {
        // output y_{t+j+1}; a lag-k sample sits at offset m = j + 1 - k from t
        for (k, &a) in model.a.iter().enumerate() {
            let m = j as isize - k as isize;
            if m >= 1 {
                let src = (m - 1) as usize;
                for col in 0..n {
                    phi[(j, col)] += a * phi[(src, col)];
                }
                gamma[j] += a * gamma[src];
            } else {
                gamma[j] += a * hist.y[(-m) as usize];
            }
        }
        for (k, &b) in model.b.iter().enumerate() {
            let m = j as isize - k as isize;
            if m >= 0 {
                phi[(j, m as usize)] += b;
            } else {
                gamma[j] += b * hist.u[(-m - 1) as usize];
            }
        }
        for (coef, past, seq) in [(&model.c, &hist.t_amb, t_seq), (&model.d, &hist.solar, s_seq)] {
            for (k, &c) in coef.iter().enumerate() {
                let m = j as isize - k as isize;
                gamma[j] += c * if m >= 0 {
                    seq[m as usize]
                } else {
                    past[(-m - 1) as usize]
                };
            }
        }
    }
    Ok(Lifted { phi, gamma })
}

/// Input/output record used for identification; 900 s sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct IoDataset {
    pub start: NaiveDateTime,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub t_amb: Vec<f64>,
    pub solar: Vec<f64>,
}

const IO_HEADER: [&str; 5] = ["timestamp", "y_C", "u_frac", "T_amb_C", "S_Wm2"];

impl IoDataset {
    pub fn new(
        start: NaiveDateTime,
        y: Vec<f64>,
        u: Vec<f64>,
        t_amb: Vec<f64>,
        solar: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let d = Self {
            start,
            y,
            u,
            t_amb,
            solar,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.y.len();
        if self.u.len() != n || self.t_amb.len() != n || self.solar.len() != n {
            return Err(ModelError::Invalid("dataset columns differ in length".into()));
        }
        if let Some(i) = self.u.iter().position(|u| !(0.0..=1.0).contains(u)) {
            return Err(ModelError::Invalid(format!("u[{i}] = {} outside [0, 1]", self.u[i])));
        }
        Ok(())
    }

    /// Sub-range `[from, to)` with the start timestamp shifted accordingly.
    pub fn slice(&self, from: usize, to: usize) -> Self {
        Self {
            start: series::timestamp_at(self.start, from),
            y: self.y[from..to].to_vec(),
            u: self.u[from..to].to_vec(),
            t_amb: self.t_amb[from..to].to_vec(),
            solar: self.solar[from..to].to_vec(),
        }
    }

    pub fn read_csv(path: &Path) -> Result<Self, ModelError> {
        let t = series::read_table(series::open(path)?, &IO_HEADER)?;
        let mut cols = t.columns.into_iter();
        let mut next = || cols.next().unwrap_or_default();
        Self::new(t.start, next(), next(), next(), next())
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), ModelError> {
        series::write_table(
            series::create(path)?,
            &IO_HEADER,
            self.start,
            &[&self.y, &self.u, &self.t_amb, &self.solar],
        )?;
        Ok(())
    }
}

/// Least-squares fit of one-step residuals via a thin QR factorization of
/// the regressor matrix and back-substitution on R.
pub fn identify(data: &IoDataset, orders: ArxOrders) -> Result<ArxModel, ModelError> {
    data.validate()?;
    if orders.na == 0 || orders.nb == 0 || orders.nc == 0 || orders.nd == 0 {
        return Err(ModelError::Invalid("all orders must be at least 1".into()));
    }
    let p = orders.max_lag();
    let np = orders.num_params();
    need("dataset", data.len(), p + np + 1)?;
    let rows = data.len() - p;
    let mut phi = DMatrix::<f64>::zeros(rows, np);
    let mut target = DVector::<f64>::zeros(rows);
    for r in 0..rows {
        let t = p + r;
        target[r] = data.y[t];
        let mut col = 0;
        for (series, n) in [
            (&data.y, orders.na),
            (&data.u, orders.nb),
            (&data.t_amb, orders.nc),
            (&data.solar, orders.nd),
        ] {
            for k in 1..=n {
                phi[(r, col)] = series[t - k];
                col += 1;
            }
        }
    }
    let norms: Vec<f64> = (0..np).map(|j| phi.column(j).norm()).collect();
    let qr = phi.qr();
    let r = qr.r();
    let qty = qr.q().transpose() * &target;
    let names = orders.param_names();
    for j in 0..np {
        if r[(j, j)].abs() <= 1e-10 * norms[j] {
            return Err(ModelError::Singular {
                column: names[j].clone(),
            });
        }
    }
    let mut x = vec![0.0; np];
    for j in (0..np).rev() {
        let mut s = qty[j];
        for k in j + 1..np {
            s -= r[(j, k)] * x[k];
        }
        x[j] = s / r[(j, j)];
    }
    Ok(ArxModel::from_params(orders, &x))
}

pub fn mae(pred: &[f64], truth: &[f64]) -> Result<f64, ModelError> {
    if pred.is_empty() || truth.is_empty() {
        return Err(ModelError::Empty);
    }
    if pred.len() != truth.len() {
        return Err(ModelError::Invalid(format!(
            "lengths differ: {} vs {}",
            pred.len(),
            truth.len()
        )));
    }
    Ok(pred.iter().zip(truth).map(|(p, t)| (p - t).abs()).sum::<f64>() / pred.len() as f64)
}

/// Open-loop predictions over consecutive windows of `window` steps, each
/// restarted from measured history. Returns (predictions, measurements)
/// aligned; the first `max_lag - 1` samples only seed the first window.
pub fn windowed_open_loop(
    model: &ArxModel,
    data: &IoDataset,
    window: usize,
) -> Result<(Vec<f64>, Vec<f64>), ModelError> {
    let keep = model.orders().max_lag();
    let mut t = keep - 1;
    let mut pred = Vec::new();
    let mut truth = Vec::new();
    while t + 1 < data.len() {
        let len = window.min(data.len() - 1 - t);
        let hist = History::from_dataset(data, t, keep);
        let y = predict_open_loop(
            model,
            &hist,
            &data.u[t..t + len],
            &data.t_amb[t..t + len],
            &data.solar[t..t + len],
        )?;
        pred.extend(y);
        truth.extend_from_slice(&data.y[t + 1..t + 1 + len]);
        t += len;
    }
    Ok((pred, truth))
}
