//! Dense bounded-variable simplex tableau.
//!
//! Every row `i` of the prepared problem becomes `a_i x + s_i = b_i` with a
//! logical column `s_i` whose bounds encode the row sense:
//! `<=` gives `s_i >= 0`, `>=` gives `s_i <= 0`, `=` fixes `s_i = 0`.
//! The tableau stores `B^-1 [A I]` row-major together with the value of every
//! column and the reduced costs of the phase-2 objective. Nonbasic columns sit
//! at a finite bound, or at zero when free.

use std::sync::Arc;

use crate::options::SolverOptions;
use crate::problem::{LinearProgram, Sense};

const NONBASIC: usize = usize::MAX;
const DEGENERATE_STEP: f64 = 1e-12;
/// Pivots after which values and reduced costs are recomputed from scratch
/// before a dual solve may report optimality.
const REFRESH_AFTER: usize = 64;

/// Problem after singleton-row bound tightening, in column form.
#[derive(Clone, Debug)]
pub(crate) struct Prepared {
    pub n: usize,
    pub rows: Vec<(Vec<(usize, f64)>, Sense, f64)>,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub cost: Vec<f64>,
    pub binary: Vec<bool>,
    /// Set when tightening alone proves infeasibility.
    pub infeasible: bool,
}

impl Prepared {
    /// With `relax` set, binary flags are ignored entirely.
    pub fn from_problem(lp: &LinearProgram, opts: &SolverOptions, relax: bool) -> Self {
        let n = lp.num_vars();
        let mut lb: Vec<f64> = lp.variables.iter().map(|v| v.lower).collect();
        let mut ub: Vec<f64> = lp.variables.iter().map(|v| v.upper).collect();
        let binary: Vec<bool> = lp.variables.iter().map(|v| v.binary && !relax).collect();
        let feas = opts.tol.feasibility;
        let mut infeasible = false;
        let mut rows = Vec::with_capacity(lp.constraints.len());

        for row in &lp.constraints {
            // merge duplicate references and drop zeros
            let mut terms: Vec<(usize, f64)> = Vec::with_capacity(row.terms.len());
            for &(v, c) in &row.terms {
                match terms.iter_mut().find(|(j, _)| *j == v.0) {
                    Some(t) => t.1 += c,
                    None => terms.push((v.0, c)),
                }
            }
            terms.retain(|&(_, c)| c != 0.0);

            match terms.len() {
                0 => {
                    let ok = match row.sense {
                        Sense::Le => 0.0 <= row.rhs + feas,
                        Sense::Ge => 0.0 >= row.rhs - feas,
                        Sense::Eq => row.rhs.abs() <= feas,
                    };
                    infeasible |= !ok;
                }
                1 => {
                    let (j, a) = terms[0];
                    let bound = row.rhs / a;
                    let sense = match (row.sense, a > 0.0) {
                        (Sense::Eq, _) => Sense::Eq,
                        (s, true) => s,
                        (Sense::Le, false) => Sense::Ge,
                        (Sense::Ge, false) => Sense::Le,
                    };
                    match sense {
                        Sense::Le => ub[j] = ub[j].min(bound),
                        Sense::Ge => lb[j] = lb[j].max(bound),
                        Sense::Eq => {
                            lb[j] = lb[j].max(bound);
                            ub[j] = ub[j].min(bound);
                        }
                    }
                }
                _ => rows.push((terms, row.sense, row.rhs)),
            }
        }

        for j in 0..n {
            if binary[j] {
                lb[j] = (lb[j] - opts.tol.integrality).ceil().max(0.0);
                ub[j] = (ub[j] + opts.tol.integrality).floor().min(1.0);
            }
            if lb[j] > ub[j] {
                if lb[j] - ub[j] <= feas {
                    let mid = 0.5 * (lb[j] + ub[j]);
                    lb[j] = mid;
                    ub[j] = mid;
                } else {
                    infeasible = true;
                }
            }
        }

        Self {
            n,
            rows,
            lb,
            ub,
            cost: lp.cost_vector(),
            binary,
            infeasible,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The dual bound crossed the requested cutoff.
    Cutoff,
}

/// Basis description used to rebuild a tableau without keeping a full copy.
#[derive(Clone, Debug)]
pub(crate) struct BasisState {
    basis: Vec<usize>,
    at_upper: Vec<bool>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Tableau {
    m: usize,
    n_struct: usize,
    ncols: usize,
    t: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    x: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    pub iterations: usize,
    scratch: Vec<(usize, f64)>,
    /// Structural part of the original rows, for recomputing basic values.
    rows: Arc<Vec<Vec<(usize, f64)>>>,
    /// Pivots since `x` and `d` were last recomputed.
    stale_x: usize,
    stale_d: usize,
}

impl Tableau {
    pub fn new(prep: &Prepared) -> Self {
        let m = prep.rows.len();
        let n = prep.n;
        let ncols = n + m;
        let mut t = vec![0.0; m * ncols];
        let mut lb = prep.lb.clone();
        let mut ub = prep.ub.clone();
        let mut cost = prep.cost.clone();
        let mut rhs = Vec::with_capacity(m);
        for (i, (terms, sense, b)) in prep.rows.iter().enumerate() {
            for &(j, a) in terms {
                t[i * ncols + j] += a;
            }
            t[i * ncols + n + i] = 1.0;
            let (l, u) = match sense {
                Sense::Le => (0.0, f64::INFINITY),
                Sense::Ge => (f64::NEG_INFINITY, 0.0),
                Sense::Eq => (0.0, 0.0),
            };
            lb.push(l);
            ub.push(u);
            cost.push(0.0);
            rhs.push(*b);
        }

        let mut x = vec![0.0; ncols];
        for j in 0..n {
            x[j] = initial_value(lb[j], ub[j]);
        }
        let mut row_of = vec![NONBASIC; ncols];
        let mut basis = Vec::with_capacity(m);
        for i in 0..m {
            basis.push(n + i);
            row_of[n + i] = i;
        }
        let d = cost.clone();
        let mut tab = Self {
            m,
            n_struct: n,
            ncols,
            t,
            rhs,
            basis,
            row_of,
            x,
            lb,
            ub,
            cost,
            d,
            iterations: 0,
            scratch: Vec::new(),
            rows: Arc::new(prep.rows.iter().map(|r| r.0.clone()).collect()),
            stale_x: 0,
            stale_d: 0,
        };
        tab.refresh_basic_values();
        tab
    }

    /// Rebuilds the tableau for a previously optimal basis. Returns `None` if
    /// the basis turns out numerically singular.
    pub fn from_basis(prep: &Prepared, state: &BasisState, pivot_tol: f64) -> Option<Self> {
        let mut tab = Self::new(prep);
        let mut in_target = vec![false; tab.ncols];
        for &c in &state.basis {
            in_target[c] = true;
        }
        for &c in &state.basis {
            if tab.row_of[c] != NONBASIC {
                continue;
            }
            let mut best = None;
            let mut best_abs = pivot_tol.max(1e-9);
            for i in 0..tab.m {
                if in_target[tab.basis[i]] {
                    continue;
                }
                let a = tab.t[i * tab.ncols + c].abs();
                if a > best_abs {
                    best_abs = a;
                    best = Some(i);
                }
            }
            let r = best?;
            let leaving = tab.basis[r];
            tab.pivot(r, c);
            tab.x[leaving] = initial_value(tab.lb[leaving], tab.ub[leaving]);
        }
        for j in 0..tab.ncols {
            if tab.row_of[j] == NONBASIC {
                tab.x[j] = if state.at_upper[j] && tab.ub[j].is_finite() {
                    tab.ub[j]
                } else {
                    initial_value(tab.lb[j], tab.ub[j])
                };
            }
        }
        tab.refresh_basic_values();
        tab.refresh_reduced_costs();
        tab.iterations = 0;
        Some(tab)
    }

    pub fn basis_state(&self) -> BasisState {
        let at_upper = (0..self.ncols)
            .map(|j| {
                self.row_of[j] == NONBASIC
                    && self.ub[j].is_finite()
                    && self.lb[j] < self.ub[j]
                    && self.x[j] >= self.ub[j]
            })
            .collect();
        BasisState {
            basis: self.basis.clone(),
            at_upper,
        }
    }

    pub fn byte_size(&self) -> usize {
        self.t.len() * std::mem::size_of::<f64>()
    }

    pub fn structural_values(&self) -> Vec<f64> {
        self.x[..self.n_struct].to_vec()
    }

    pub fn objective(&self) -> f64 {
        (0..self.n_struct).map(|j| self.cost[j] * self.x[j]).sum()
    }

    pub fn value(&self, j: usize) -> f64 {
        self.x[j]
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lb[j], self.ub[j])
    }

    /// Reduced cost of a nonbasic column, `None` when basic.
    pub fn reduced_cost(&self, j: usize) -> Option<f64> {
        (self.row_of[j] == NONBASIC).then(|| self.d[j])
    }

    /// Changes the bounds of a structural column, keeping nonbasic columns at
    /// the corresponding bound and updating basic values accordingly.
    pub fn set_bounds(&mut self, j: usize, lb: f64, ub: f64) {
        let old_lb = self.lb[j];
        let old_ub = self.ub[j];
        self.lb[j] = lb;
        self.ub[j] = ub;
        if self.row_of[j] != NONBASIC {
            return;
        }
        let old = self.x[j];
        let new = if old_ub.is_finite() && old >= old_ub && old > old_lb {
            if ub.is_finite() { ub } else { initial_value(lb, ub) }
        } else if lb.is_finite() {
            lb
        } else {
            initial_value(lb, ub)
        };
        let delta = new - old;
        if delta != 0.0 {
            self.x[j] = new;
            for i in 0..self.m {
                let a = self.t[i * self.ncols + j];
                if a != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= a * delta;
                }
            }
        }
    }

    /// Recomputes `x_B = B^-1 (b - N x_N)` from the original rows.
    fn refresh_basic_values(&mut self) {
        let n = self.n_struct;
        let nc = self.ncols;
        let mut r = self.rhs.clone();
        for (k, terms) in self.rows.iter().enumerate() {
            let mut v = r[k];
            for &(j, a) in terms {
                if self.row_of[j] == NONBASIC {
                    v -= a * self.x[j];
                }
            }
            if self.row_of[n + k] == NONBASIC {
                v -= self.x[n + k];
            }
            r[k] = v;
        }
        for i in 0..self.m {
            let binv = &self.t[i * nc + n..(i + 1) * nc];
            let v: f64 = binv.iter().zip(&r).map(|(b, r)| b * r).sum();
            self.x[self.basis[i]] = v;
        }
        self.stale_x = 0;
    }

    fn refresh_reduced_costs(&mut self) {
        let nc = self.ncols;
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.m {
            let cb = self.cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * nc..(i + 1) * nc];
            for (dj, &a) in self.d.iter_mut().zip(row) {
                if a != 0.0 {
                    *dj -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.d[b] = 0.0;
        }
        self.stale_d = 0;
    }

    fn primal_infeasibility(&self, i: usize) -> f64 {
        let b = self.basis[i];
        let v = self.x[b];
        (self.lb[b] - v).max(v - self.ub[b]).max(0.0)
    }

    pub fn is_dual_feasible(&self, tol: f64) -> bool {
        (0..self.ncols).all(|j| {
            if self.row_of[j] != NONBASIC || self.lb[j] == self.ub[j] {
                return true;
            }
            let dj = self.d[j];
            let can_inc = self.x[j] < self.ub[j];
            let can_dec = self.x[j] > self.lb[j];
            !(can_inc && dj < -tol) && !(can_dec && dj > tol)
        })
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.ncols;
        let inv = 1.0 / self.t[r * nc + q];
        self.scratch.clear();
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            for (j, v) in row.iter_mut().enumerate() {
                if *v != 0.0 {
                    *v *= inv;
                    if v.abs() < 1e-14 {
                        *v = 0.0;
                    } else {
                        self.scratch.push((j, *v));
                    }
                }
            }
            row[q] = 1.0;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * nc + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * nc..(i + 1) * nc];
            for &(j, v) in &self.scratch {
                let nv = row[j] - f * v;
                row[j] = if nv.abs() < 1e-14 { 0.0 } else { nv };
            }
            row[q] = 0.0;
        }
        let f = self.d[q];
        if f != 0.0 {
            for &(j, v) in &self.scratch {
                self.d[j] -= f * v;
            }
        }
        self.d[q] = 0.0;

        let leaving = self.basis[r];
        self.row_of[leaving] = NONBASIC;
        self.basis[r] = q;
        self.row_of[q] = r;
        self.iterations += 1;
        self.stale_x += 1;
        self.stale_d += 1;
    }

    fn column(&self, q: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.m).map(|i| self.t[i * self.ncols + q]));
    }

    /// Composite phase 1 followed by phase 2 primal simplex.
    pub fn primal(&mut self, opts: &SolverOptions) -> LpOutcome {
        let tol = opts.tol;
        let mut alpha = Vec::with_capacity(self.m);
        let mut d1 = vec![0.0; self.ncols];
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut refreshed = false;

        loop {
            if self.iterations >= opts.max_iterations {
                return LpOutcome::IterationLimit;
            }
            // phase selection
            let mut phase1 = false;
            for i in 0..self.m {
                if self.primal_infeasibility(i) > tol.feasibility {
                    phase1 = true;
                    break;
                }
            }
            let reduced: &[f64] = if phase1 {
                d1.iter_mut().for_each(|v| *v = 0.0);
                for i in 0..self.m {
                    let b = self.basis[i];
                    let v = self.x[b];
                    let c = if v < self.lb[b] - tol.feasibility {
                        -1.0
                    } else if v > self.ub[b] + tol.feasibility {
                        1.0
                    } else {
                        continue;
                    };
                    let row = &self.t[i * self.ncols..(i + 1) * self.ncols];
                    for (dj, &a) in d1.iter_mut().zip(row) {
                        if a != 0.0 {
                            *dj -= c * a;
                        }
                    }
                }
                &d1
            } else {
                &self.d
            };

            // pricing
            let mut entering = None;
            let mut best = 0.0;
            for j in 0..self.ncols {
                if self.row_of[j] != NONBASIC || self.lb[j] == self.ub[j] {
                    continue;
                }
                let dj = reduced[j];
                let dir = if dj < -tol.optimality && self.x[j] < self.ub[j] {
                    1.0
                } else if dj > tol.optimality && self.x[j] > self.lb[j] {
                    -1.0
                } else {
                    continue;
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if dj.abs() > best {
                    best = dj.abs();
                    entering = Some((j, dir));
                }
            }

            let Some((q, sigma)) = entering else {
                if phase1 {
                    return LpOutcome::Infeasible;
                }
                // guard against drift before declaring optimality
                if !refreshed {
                    refreshed = true;
                    self.refresh_basic_values();
                    self.refresh_reduced_costs();
                    continue;
                }
                return LpOutcome::Optimal;
            };
            refreshed = false;

            self.column(q, &mut alpha);
            let step = self.primal_ratio_test(&alpha, sigma, phase1, bland, &tol);
            let flip = self.ub[q] - self.lb[q];

            let (theta, leave) = match step {
                Some((r, th, bound)) if th < flip => (th, Some((r, bound))),
                _ if flip.is_finite() => (flip, None),
                Some((r, th, bound)) => (th, Some((r, bound))),
                None => {
                    if phase1 {
                        return LpOutcome::Infeasible;
                    }
                    return LpOutcome::Unbounded;
                }
            };

            if theta <= DEGENERATE_STEP {
                degenerate += 1;
                if degenerate >= opts.degenerate_pivots_before_bland {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }

            self.x[q] += sigma * theta;
            for i in 0..self.m {
                let a = alpha[i];
                if a != 0.0 {
                    let b = self.basis[i];
                    self.x[b] -= sigma * a * theta;
                }
            }
            match leave {
                None => {
                    self.x[q] = if sigma > 0.0 { self.ub[q] } else { self.lb[q] };
                    self.iterations += 1;
                }
                Some((r, target)) => {
                    let b = self.basis[r];
                    self.pivot(r, q);
                    self.x[b] = target;
                }
            }
        }
    }

    /// Harris two-pass ratio test. Returns the leaving row, the step length
    /// and the bound the leaving column lands on.
    fn primal_ratio_test(
        &self,
        alpha: &[f64],
        sigma: f64,
        phase1: bool,
        bland: bool,
        tol: &crate::options::Tolerances,
    ) -> Option<(usize, f64, f64)> {
        let feas = tol.feasibility;
        // (row, distance, |rate|, bound)
        let mut cands: Vec<(usize, f64, f64, f64)> = Vec::new();
        for i in 0..self.m {
            let a = alpha[i];
            if a.abs() <= tol.pivot {
                continue;
            }
            let rate = -sigma * a;
            let b = self.basis[i];
            let v = self.x[b];
            let below = v < self.lb[b] - feas;
            let above = v > self.ub[b] + feas;
            let dist = if rate < 0.0 {
                if phase1 && below {
                    continue;
                }
                let bound = if phase1 && above { self.ub[b] } else { self.lb[b] };
                if !bound.is_finite() {
                    continue;
                }
                (v - bound, bound)
            } else {
                if phase1 && above {
                    continue;
                }
                let bound = if phase1 && below { self.lb[b] } else { self.ub[b] };
                if !bound.is_finite() {
                    continue;
                }
                (bound - v, bound)
            };
            cands.push((i, dist.0, rate.abs(), dist.1));
        }
        if cands.is_empty() {
            return None;
        }
        if bland {
            let min_ratio = cands
                .iter()
                .map(|&(_, dist, r, _)| dist.max(0.0) / r)
                .fold(f64::INFINITY, f64::min);
            let (row, dist, r, target) = cands
                .iter()
                .filter(|&&(_, dist, r, _)| dist.max(0.0) / r <= min_ratio + 1e-12)
                .min_by_key(|&&(i, _, _, _)| self.basis[i])
                .copied()?;
            return Some((row, dist.max(0.0) / r, target));
        }
        let limit = cands
            .iter()
            .map(|&(_, dist, r, _)| (dist.max(0.0) + feas) / r)
            .fold(f64::INFINITY, f64::min);
        let (row, dist, r, target) = cands
            .iter()
            .filter(|&&(_, dist, r, _)| dist.max(0.0) / r <= limit)
            .fold(None::<(usize, f64, f64, f64)>, |acc, &c| match acc {
                Some(a) if a.2 >= c.2 => Some(a),
                _ => Some(c),
            })?;
        Some((row, dist.max(0.0) / r, target))
    }

    /// Dual simplex that gives up once the objective, a valid lower bound
    /// while the basis stays dual feasible, reaches `cutoff`.
    pub fn dual_with_cutoff(&mut self, opts: &SolverOptions, cutoff: f64) -> LpOutcome {
        let tol = opts.tol;
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut refreshed = false;
        let nc = self.ncols;
        let mut alpha = Vec::with_capacity(self.m);

        loop {
            if self.iterations >= opts.max_iterations {
                return LpOutcome::IterationLimit;
            }
            if cutoff.is_finite() && self.objective() >= cutoff {
                return LpOutcome::Cutoff;
            }
            // leaving row
            let mut leave = None;
            let mut worst = tol.feasibility;
            for i in 0..self.m {
                let inf = self.primal_infeasibility(i);
                if inf > tol.feasibility {
                    if bland {
                        match leave {
                            Some(r) if self.basis[r] <= self.basis[i] => {}
                            _ => leave = Some(i),
                        }
                    } else if inf > worst {
                        worst = inf;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                if !refreshed && self.stale_x >= REFRESH_AFTER {
                    refreshed = true;
                    self.refresh_basic_values();
                    continue;
                }
                return LpOutcome::Optimal;
            };
            refreshed = false;

            let b = self.basis[r];
            let below = self.x[b] < self.lb[b];
            let target = if below { self.lb[b] } else { self.ub[b] };

            // entering column: (col, ratio, |alpha|)
            let row = &self.t[r * nc..(r + 1) * nc];
            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            for (j, &a) in row.iter().enumerate() {
                if a.abs() <= tol.pivot || self.row_of[j] != NONBASIC || self.lb[j] == self.ub[j] {
                    continue;
                }
                let can_inc = self.x[j] < self.ub[j];
                let can_dec = self.x[j] > self.lb[j];
                // x_b moves by -a * dx_j
                let inc_ok = can_inc && ((below && a < 0.0) || (!below && a > 0.0));
                let dec_ok = can_dec && ((below && a > 0.0) || (!below && a < 0.0));
                let dj = self.d[j];
                let ratio = if inc_ok {
                    dj.max(0.0) / a.abs()
                } else if dec_ok {
                    (-dj).max(0.0) / a.abs()
                } else {
                    continue;
                };
                cands.push((j, ratio, a.abs()));
            }
            if cands.is_empty() {
                return LpOutcome::Infeasible;
            }
            let q = if bland {
                let min_ratio = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
                cands
                    .iter()
                    .filter(|c| c.1 <= min_ratio + 1e-12)
                    .map(|c| c.0)
                    .min()
                    .unwrap()
            } else {
                let bound = cands
                    .iter()
                    .map(|c| c.1 + tol.optimality / c.2)
                    .fold(f64::INFINITY, f64::min);
                cands
                    .iter()
                    .filter(|c| c.1 <= bound)
                    .fold(None::<(usize, f64, f64)>, |acc, &c| match acc {
                        Some(a) if a.2 >= c.2 => Some(a),
                        _ => Some(c),
                    })
                    .unwrap()
                    .0
            };
            let ratio = cands.iter().find(|c| c.0 == q).unwrap().1;
            if ratio <= DEGENERATE_STEP {
                degenerate += 1;
                if degenerate >= opts.degenerate_pivots_before_bland {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }

            self.column(q, &mut alpha);
            let delta = (self.x[b] - target) / alpha[r];
            self.x[q] += delta;
            for i in 0..self.m {
                let a = alpha[i];
                if a != 0.0 {
                    let bi = self.basis[i];
                    self.x[bi] -= a * delta;
                }
            }
            self.pivot(r, q);
            self.x[b] = target;
        }
    }

    /// Re-solves after bound changes, preferring the dual simplex when the
    /// current basis is still dual feasible.
    pub fn reoptimize(&mut self, opts: &SolverOptions) -> LpOutcome {
        self.reoptimize_with_cutoff(opts, f64::INFINITY)
    }

    /// As [`Tableau::reoptimize`], but may stop early with
    /// [`LpOutcome::Cutoff`] once the bound reaches `cutoff`.
    pub fn reoptimize_with_cutoff(&mut self, opts: &SolverOptions, cutoff: f64) -> LpOutcome {
        if self.is_dual_feasible(opts.tol.optimality) {
            match self.dual_with_cutoff(opts, cutoff) {
                LpOutcome::Optimal => {}
                other => return other,
            }
            if self.stale_d >= REFRESH_AFTER {
                self.refresh_reduced_costs();
            }
            if self.is_dual_feasible(opts.tol.optimality) {
                return LpOutcome::Optimal;
            }
        }
        self.primal(opts)
    }
}

fn initial_value(lb: f64, ub: f64) -> f64 {
    if lb.is_finite() {
        lb
    } else if ub.is_finite() {
        ub
    } else {
        0.0
    }
}
