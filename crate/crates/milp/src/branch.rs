//! Best-first branch-and-bound over binary variables.
//!
//! Nodes are evaluated lazily: a child enters the queue with its parent's LP
//! bound and is re-optimized with the dual simplex when popped, starting from
//! a snapshot of the parent tableau (or a rebuilt basis once the snapshot
//! budget is exhausted). The last child of a node takes the parent tableau
//! over instead of copying it. The dual simplex stops early once its
//! objective reaches the incumbent, since the node can then be pruned.
//!
//! Rows of the form `sum z = 1` over binaries are treated as SOS1 groups and
//! branched as a whole, one child per member. The branching candidate is
//! chosen by pseudo-costs gathered from earlier child bounds. Reduced costs
//! fix binaries whose flip would exceed the incumbent. Rounding and a
//! fractional dive supply incumbents at the root and periodically after.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use log::debug;

use crate::error::MilpError;
use crate::options::SolverOptions;
use crate::problem::{LinearProgram, Sense};
use crate::solution::{Solution, Status};
use crate::tableau::{BasisState, LpOutcome, Prepared, Tableau};

pub fn solve_milp(lp: &LinearProgram) -> Result<Solution, MilpError> {
    solve_milp_with(lp, &SolverOptions::default(), None)
}

/// Branch-and-bound with explicit options. `start`, when given, is a full
/// assignment whose binary entries are tried as an initial incumbent.
pub fn solve_milp_with(
    lp: &LinearProgram,
    opts: &SolverOptions,
    start: Option<&[f64]>,
) -> Result<Solution, MilpError> {
    lp.validate()?;
    let begin = Instant::now();
    let mut sol = BranchAndBound::new(lp, opts).run(start);
    sol.wall_time = begin.elapsed();
    Ok(sol)
}

/// Disjoint `sum = 1` rows over binaries. Returned in row order.
pub fn sos1_groups(lp: &LinearProgram) -> Vec<Vec<usize>> {
    let mut taken = vec![false; lp.num_vars()];
    let mut groups = Vec::new();
    for row in &lp.constraints {
        if row.sense != Sense::Eq || row.rhs != 1.0 || row.terms.len() < 2 {
            continue;
        }
        let ok = row
            .terms
            .iter()
            .all(|&(v, c)| c == 1.0 && lp.variables[v.0].binary && !taken[v.0]);
        let mut members: Vec<usize> = row.terms.iter().map(|(v, _)| v.0).collect();
        members.sort_unstable();
        members.dedup();
        if !ok || members.len() != row.terms.len() {
            continue;
        }
        for &j in &members {
            taken[j] = true;
        }
        groups.push(members);
    }
    groups
}

struct Snapshot {
    tab: Tableau,
    live: Rc<Cell<usize>>,
}

impl Drop for Snapshot {
    fn drop(&mut self) {
        self.live.set(self.live.get() - 1);
    }
}

#[derive(Clone)]
enum WarmStart {
    Snapshot(Rc<Snapshot>),
    Basis(Rc<BasisState>),
}

struct Node {
    bound: f64,
    depth: usize,
    seq: u64,
    fixes: Vec<(usize, f64)>,
    warm: WarmStart,
    /// Variable whose fixing created this node, its direction and the
    /// distance it moved, for pseudo-cost updates.
    origin: Option<(usize, bool, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: "greater" pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

enum Branch {
    Group(usize),
    Single(usize),
}

struct BranchAndBound<'a> {
    lp: &'a LinearProgram,
    opts: &'a SolverOptions,
    prep: Prepared,
    groups: Vec<Vec<usize>>,
    grouped: Vec<bool>,
    incumbent: Option<(f64, Vec<f64>)>,
    heap: BinaryHeap<Node>,
    seq: u64,
    nodes: usize,
    iterations: usize,
    live_snapshots: Rc<Cell<usize>>,
    pseudo: PseudoCosts,
}

/// Average bound gain per unit of change when a binary is fixed up or down.
struct PseudoCosts {
    up: Vec<(f64, u32)>,
    down: Vec<(f64, u32)>,
    total: (f64, u32),
}

impl PseudoCosts {
    fn new(n: usize) -> Self {
        Self {
            up: vec![(0.0, 0); n],
            down: vec![(0.0, 0); n],
            total: (0.0, 0),
        }
    }

    fn record(&mut self, j: usize, up: bool, per_unit: f64) {
        let e = if up { &mut self.up[j] } else { &mut self.down[j] };
        e.0 += per_unit;
        e.1 += 1;
        self.total.0 += per_unit;
        self.total.1 += 1;
    }

    /// Estimated gain; unseen entries use the running mean.
    fn estimate(&self, j: usize, up: bool, dist: f64) -> f64 {
        let (sum, cnt) = if up { self.up[j] } else { self.down[j] };
        let psi = if cnt > 0 {
            sum / cnt as f64
        } else if self.total.1 > 0 {
            self.total.0 / self.total.1 as f64
        } else {
            1.0
        };
        psi * dist
    }
}

impl<'a> BranchAndBound<'a> {
    fn new(lp: &'a LinearProgram, opts: &'a SolverOptions) -> Self {
        let prep = Prepared::from_problem(lp, opts, false);
        let groups = sos1_groups(lp);
        let mut grouped = vec![false; lp.num_vars()];
        for g in &groups {
            for &j in g {
                grouped[j] = true;
            }
        }
        Self {
            lp,
            opts,
            prep,
            groups,
            grouped,
            incumbent: None,
            heap: BinaryHeap::new(),
            seq: 0,
            nodes: 0,
            iterations: 0,
            live_snapshots: Rc::new(Cell::new(0)),
            pseudo: PseudoCosts::new(lp.num_vars()),
        }
    }

    fn prune_threshold(&self) -> f64 {
        match &self.incumbent {
            Some((obj, _)) => obj - self.opts.tol.prune.max(self.opts.tol.mip_gap * obj.abs()),
            None => f64::INFINITY,
        }
    }

    fn run(mut self, start: Option<&[f64]>) -> Solution {
        if self.prep.infeasible {
            return Solution::without_point(Status::Infeasible, 0, 0);
        }
        let mut root = Tableau::new(&self.prep);
        let outcome = root.primal(self.opts);
        self.iterations += root.iterations;
        self.nodes = 1;
        match outcome {
            LpOutcome::Optimal => {}
            LpOutcome::Infeasible => {
                return Solution::without_point(Status::Infeasible, 1, self.iterations)
            }
            LpOutcome::Unbounded => {
                return Solution::without_point(Status::Unbounded, 1, self.iterations)
            }
            LpOutcome::IterationLimit | LpOutcome::Cutoff => {
                return Solution::without_point(Status::IterationLimit, 1, self.iterations)
            }
        }
        let root_bound = root.objective();
        if let Some(values) = start {
            self.try_start(&root, values);
        }

        let mut limit_hit = false;
        let mut final_bound = root_bound;
        match self.select_branch(&root, &[]) {
            None => self.offer(root.objective(), root.structural_values()),
            Some(branch) => {
                self.rounding_heuristic(&root, &[]);
                self.dive(&root);
                self.push_children(root, root_bound, 0, &[], branch);
                while let Some(node) = self.heap.pop() {
                    if node.bound >= self.prune_threshold() {
                        final_bound = node.bound;
                        self.heap.clear();
                        break;
                    }
                    if self.nodes >= self.opts.max_nodes {
                        limit_hit = true;
                        final_bound = node.bound;
                        break;
                    }
                    self.process(node);
                }
                if !limit_hit && self.heap.is_empty() {
                    final_bound = final_bound.max(root_bound);
                }
            }
        }

        let (status, objective, values) = match self.incumbent.take() {
            Some((obj, mut values)) => {
                for (j, v) in values.iter_mut().enumerate() {
                    if self.prep.binary[j] {
                        *v = v.round();
                    }
                }
                let status = if limit_hit { Status::IterationLimit } else { Status::Optimal };
                let _ = obj;
                (status, self.lp.objective_value(&values), values)
            }
            None => {
                let status = if limit_hit { Status::IterationLimit } else { Status::Infeasible };
                return Solution::without_point(status, self.nodes, self.iterations);
            }
        };
        let bound = if limit_hit { final_bound.min(objective) } else { objective.min(final_bound.max(root_bound)) };
        let gap = ((objective - bound) / objective.abs().max(1e-10)).max(0.0);
        debug!(
            "branch-and-bound: {} nodes, {} pivots, objective {objective}",
            self.nodes, self.iterations
        );
        Solution {
            status,
            objective,
            values,
            bound,
            gap,
            nodes: self.nodes,
            iterations: self.iterations,
            wall_time: Default::default(),
        }
    }

    fn process(&mut self, node: Node) {
        self.nodes += 1;
        let mut tab = match node.warm {
            // the last child of a snapshot takes it over instead of copying
            WarmStart::Snapshot(mut s) => match Rc::get_mut(&mut s) {
                Some(snap) => std::mem::take(&mut snap.tab),
                None => s.tab.clone(),
            },
            WarmStart::Basis(b) => Tableau::from_basis(&self.prep, &b, self.opts.tol.pivot)
                .unwrap_or_else(|| Tableau::new(&self.prep)),
        };
        tab.iterations = 0;
        for &(j, v) in &node.fixes {
            tab.set_bounds(j, v, v);
        }
        let outcome = tab.reoptimize_with_cutoff(self.opts, self.prune_threshold());
        self.iterations += tab.iterations;
        if outcome != LpOutcome::Optimal {
            return;
        }
        let obj = tab.objective();
        if let Some((j, up, dist)) = node.origin {
            if dist > 1e-9 {
                self.pseudo.record(j, up, (obj - node.bound).max(0.0) / dist);
            }
        }
        if obj >= self.prune_threshold() {
            return;
        }
        match self.select_branch(&tab, &node.fixes) {
            None => self.offer(obj, tab.structural_values()),
            Some(branch) => {
                if self.nodes % 16 == 0 {
                    self.rounding_heuristic(&tab, &node.fixes);
                }
                if self.nodes % 64 == 0 {
                    self.dive(&tab);
                }
                let mut fixes = node.fixes;
                self.reduced_cost_fixing(&tab, obj, &mut fixes);
                self.push_children(tab, obj, node.depth + 1, &fixes, branch);
            }
        }
    }

    /// Fixes nonbasic binaries whose reduced cost alone would push the bound
    /// past the incumbent. Valid for the whole subtree since the threshold
    /// only decreases.
    fn reduced_cost_fixing(&self, tab: &Tableau, obj: f64, fixes: &mut Vec<(usize, f64)>) {
        let gap = self.prune_threshold() - obj;
        if !gap.is_finite() {
            return;
        }
        for j in 0..self.prep.n {
            if !self.prep.binary[j] {
                continue;
            }
            let (lb, ub) = tab.bounds(j);
            if lb == ub {
                continue;
            }
            let Some(d) = tab.reduced_cost(j) else { continue };
            let v = tab.value(j);
            if v <= lb && d >= gap {
                fixes.push((j, lb));
            } else if v >= ub && -d >= gap {
                fixes.push((j, ub));
            }
        }
    }

    fn offer(&mut self, obj: f64, values: Vec<f64>) {
        let better = match &self.incumbent {
            Some((best, _)) => obj < *best,
            None => true,
        };
        if better {
            self.incumbent = Some((obj, values));
        }
    }

    fn is_integral(&self, tab: &Tableau) -> bool {
        (0..self.prep.n)
            .filter(|&j| self.prep.binary[j])
            .all(|j| {
                let v = tab.value(j);
                (v - v.round()).abs() <= self.opts.tol.integrality
            })
    }

    /// Branching candidate with the best pseudo-cost score: the product of
    /// the two smallest estimated child gains. Ties go to the more
    /// fractional candidate, then to the lowest variable index.
    fn select_branch(&self, tab: &Tableau, fixes: &[(usize, f64)]) -> Option<Branch> {
        let int_tol = self.opts.tol.integrality;
        let fixed_value = |j: usize| fixes.iter().rev().find(|f| f.0 == j).map(|f| f.1);
        let mut best: Option<(f64, f64, usize, Branch)> = None;
        let mut consider = |score: f64, frac: f64, first: usize, b: Branch| {
            let replace = match &best {
                None => true,
                Some((s, f, idx, _)) => {
                    let rel = 1e-9 * s.abs().max(1e-12);
                    score > s + rel
                        || (score > s - rel
                            && (frac > f + 1e-9 || (frac > f - 1e-9 && first < *idx)))
                }
            };
            if replace {
                best = Some((score, frac, first, b));
            }
        };
        let score_of = |mut gains: Vec<f64>| {
            gains.sort_by(f64::total_cmp);
            let a = gains.first().copied().unwrap_or(0.0).max(1e-6);
            let b = gains.get(1).copied().unwrap_or(a).max(1e-6);
            a * b
        };
        for (g, members) in self.groups.iter().enumerate() {
            let off_integer = members
                .iter()
                .map(|&j| {
                    let v = tab.value(j);
                    (v - v.round()).abs()
                })
                .fold(0.0, f64::max);
            if off_integer <= int_tol {
                continue;
            }
            let max = members.iter().map(|&j| tab.value(j)).fold(f64::MIN, f64::max);
            let gains: Vec<f64> = members
                .iter()
                .filter(|&&j| fixed_value(j) != Some(0.0) && self.prep.ub[j] >= 0.5)
                .map(|&j| self.pseudo.estimate(j, true, 1.0 - tab.value(j)))
                .collect();
            consider(score_of(gains), (1.0 - max).max(off_integer), members[0], Branch::Group(g));
        }
        for j in 0..self.prep.n {
            if self.prep.binary[j] && !self.grouped[j] {
                let v = tab.value(j);
                let frac = v.min(1.0 - v);
                if frac <= int_tol {
                    continue;
                }
                let gains = vec![
                    self.pseudo.estimate(j, true, 1.0 - v),
                    self.pseudo.estimate(j, false, v),
                ];
                consider(score_of(gains), frac, j, Branch::Single(j));
            }
        }
        best.map(|(_, _, _, b)| b)
    }

    fn warm_start(&self, tab: Tableau) -> WarmStart {
        let live = self.live_snapshots.get();
        if (live + 1) * tab.byte_size() <= self.opts.snapshot_budget_bytes {
            self.live_snapshots.set(live + 1);
            WarmStart::Snapshot(Rc::new(Snapshot {
                tab,
                live: Rc::clone(&self.live_snapshots),
            }))
        } else {
            WarmStart::Basis(Rc::new(tab.basis_state()))
        }
    }

    fn push_children(
        &mut self,
        tab: Tableau,
        bound: f64,
        depth: usize,
        fixes: &[(usize, f64)],
        branch: Branch,
    ) {
        let fixed_value = |j: usize| fixes.iter().rev().find(|f| f.0 == j).map(|f| f.1);
        let mut children: Vec<(f64, Vec<(usize, f64)>, (usize, bool, f64))> = Vec::new();
        match branch {
            Branch::Group(g) => {
                let members = &self.groups[g];
                let forced = members.iter().copied().find(|&j| fixed_value(j) == Some(1.0));
                for &on in members {
                    if fixed_value(on) == Some(0.0)
                        || self.prep.ub[on] < 0.5
                        || forced.is_some_and(|f| f != on)
                    {
                        continue;
                    }
                    let mut f = fixes.to_vec();
                    for &j in members {
                        f.push((j, if j == on { 1.0 } else { 0.0 }));
                    }
                    children.push((tab.value(on), f, (on, true, 1.0 - tab.value(on))));
                }
            }
            Branch::Single(j) => {
                let v = tab.value(j);
                let mut up = fixes.to_vec();
                up.push((j, 1.0));
                let mut down = fixes.to_vec();
                down.push((j, 0.0));
                children.push((v, up, (j, true, 1.0 - v)));
                children.push((1.0 - v, down, (j, false, v)));
            }
        }
        // stable sort keeps member order for equal values
        children.sort_by(|a, b| b.0.total_cmp(&a.0));
        if children.is_empty() {
            return;
        }
        let warm = self.warm_start(tab);
        for (_, fixes, origin) in children {
            self.seq += 1;
            self.heap.push(Node {
                bound,
                depth,
                seq: self.seq,
                fixes,
                warm: warm.clone(),
                origin: Some(origin),
            });
        }
    }

    /// Fixes every group to its largest member and rounds lone binaries, then
    /// re-solves the remaining LP for a feasible incumbent.
    fn rounding_heuristic(&mut self, tab: &Tableau, fixes: &[(usize, f64)]) {
        let mut trial = tab.clone();
        trial.iterations = 0;
        for &(j, v) in fixes {
            trial.set_bounds(j, v, v);
        }
        for members in &self.groups {
            let mut pick = members[0];
            for &j in members {
                if tab.value(j) > tab.value(pick) + 1e-12 {
                    pick = j;
                }
            }
            for &j in members {
                let v = if j == pick { 1.0 } else { 0.0 };
                trial.set_bounds(j, v, v);
            }
        }
        for j in 0..self.prep.n {
            if self.prep.binary[j] && !self.grouped[j] {
                let v = tab.value(j).round().clamp(self.prep.lb[j], self.prep.ub[j]);
                trial.set_bounds(j, v, v);
            }
        }
        self.finish_trial(trial);
    }

    /// Fractional diving: repeatedly fixes the fractional group or binary
    /// closest to integral and re-solves, until the LP is integral or the
    /// dive fails.
    fn dive(&mut self, tab: &Tableau) {
        let int_tol = self.opts.tol.integrality;
        let mut trial = tab.clone();
        trial.iterations = 0;
        loop {
            let mut pick: Option<(f64, usize, Vec<(usize, f64)>)> = None;
            let mut consider = |dist: f64, first: usize, fix: Vec<(usize, f64)>| {
                let better = match &pick {
                    None => true,
                    Some((d, i, _)) => dist < d - 1e-12 || (dist < d + 1e-12 && first < *i),
                };
                if better {
                    pick = Some((dist, first, fix));
                }
            };
            for members in &self.groups {
                let fractional = members.iter().any(|&j| {
                    let v = trial.value(j);
                    (v - v.round()).abs() > int_tol
                });
                if !fractional {
                    continue;
                }
                let mut top = members[0];
                for &j in members {
                    if trial.value(j) > trial.value(top) + 1e-12 {
                        top = j;
                    }
                }
                let fix = members.iter().map(|&j| (j, if j == top { 1.0 } else { 0.0 })).collect();
                consider(1.0 - trial.value(top), members[0], fix);
            }
            for j in 0..self.prep.n {
                if self.prep.binary[j] && !self.grouped[j] {
                    let v = trial.value(j);
                    let dist = v.min(1.0 - v);
                    if dist > int_tol {
                        consider(dist, j, vec![(j, v.round())]);
                    }
                }
            }
            let Some((_, _, fix)) = pick else {
                let obj = trial.objective();
                self.iterations += trial.iterations;
                self.offer(obj, trial.structural_values());
                return;
            };
            for (j, v) in fix {
                trial.set_bounds(j, v, v);
            }
            if trial.reoptimize_with_cutoff(self.opts, self.prune_threshold()) != LpOutcome::Optimal {
                self.iterations += trial.iterations;
                return;
            }
        }
    }

    fn try_start(&mut self, root: &Tableau, values: &[f64]) {
        if values.len() != self.prep.n {
            return;
        }
        let mut trial = root.clone();
        trial.iterations = 0;
        for j in 0..self.prep.n {
            if self.prep.binary[j] {
                let v = values[j].round().clamp(self.prep.lb[j], self.prep.ub[j]);
                trial.set_bounds(j, v, v);
            }
        }
        self.finish_trial(trial);
    }

    fn finish_trial(&mut self, mut trial: Tableau) {
        let outcome = trial.reoptimize(self.opts);
        self.iterations += trial.iterations;
        if outcome == LpOutcome::Optimal && self.is_integral(&trial) {
            let obj = trial.objective();
            self.offer(obj, trial.structural_values());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::LinearProgram;

    #[test]
    fn knapsack_picks_more_valuable_item() {
        // max 3x + 2y  s.t. x + y <= 1, binary  ==  min -3x - 2y
        let mut lp = LinearProgram::new();
        let x = lp.add_binary("x");
        let y = lp.add_binary("y");
        lp.add_objective(x, -3.0);
        lp.add_objective(y, -2.0);
        lp.add_constraint("cap", vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.0);
        let sol = solve_milp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.values, vec![1.0, 0.0]);
        assert!((sol.objective + 3.0).abs() < 1e-12);
    }

    #[test]
    fn integral_relaxation_stops_at_root() {
        let mut lp = LinearProgram::new();
        let x = lp.add_binary("x");
        let y = lp.add_binary("y");
        lp.add_objective(x, -1.0);
        lp.add_objective(y, 1.0);
        lp.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Sense::Le, 2.0);
        let sol = solve_milp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert_eq!(sol.nodes, 1);
        assert_eq!(sol.values, vec![1.0, 0.0]);
    }

    #[test]
    fn fractional_knapsack_needs_branching() {
        // min -5a -4b -3c  s.t. 2a + 3b + c <= 4, binaries. best: a + c = -8
        let mut lp = LinearProgram::new();
        let a = lp.add_binary("a");
        let b = lp.add_binary("b");
        let c = lp.add_binary("c");
        lp.add_objective(a, -5.0);
        lp.add_objective(b, -4.0);
        lp.add_objective(c, -3.0);
        lp.add_constraint("w", vec![(a, 2.0), (b, 3.0), (c, 1.0)], Sense::Le, 4.0);
        let sol = solve_milp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective + 8.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_integer_problem() {
        // x + y = 1.5 with binaries has no integral point
        let mut lp = LinearProgram::new();
        let x = lp.add_binary("x");
        let y = lp.add_binary("y");
        lp.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 1.5);
        assert_eq!(solve_milp(&lp).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn detects_sum_to_one_groups() {
        let mut lp = LinearProgram::new();
        let z: Vec<_> = (0..3).map(|i| lp.add_binary(format!("z{i}"))).collect();
        let w = lp.add_var("w", 0.0, 1.0);
        lp.add_constraint("g", z.iter().map(|&v| (v, 1.0)).collect(), Sense::Eq, 1.0);
        lp.add_constraint("not_group", vec![(z[0], 1.0), (w, 1.0)], Sense::Eq, 1.0);
        assert_eq!(sos1_groups(&lp), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn node_cap_reports_iteration_limit() {
        let mut lp = LinearProgram::new();
        let xs: Vec<_> = (0..8).map(|i| lp.add_binary(format!("x{i}"))).collect();
        for (i, &x) in xs.iter().enumerate() {
            lp.add_objective(x, -(1.0 + 0.1 * i as f64));
        }
        lp.add_constraint("w", xs.iter().map(|&x| (x, 2.0)).collect(), Sense::Le, 7.0);
        let opts = SolverOptions {
            max_nodes: 2,
            ..Default::default()
        };
        let sol = solve_milp_with(&lp, &opts, None).unwrap();
        assert_eq!(sol.status, Status::IterationLimit);
    }

    #[test]
    fn start_assignment_becomes_incumbent() {
        let mut lp = LinearProgram::new();
        let x = lp.add_binary("x");
        let y = lp.add_binary("y");
        lp.add_objective(x, -3.0);
        lp.add_objective(y, -2.0);
        lp.add_constraint("cap", vec![(x, 2.0), (y, 2.0)], Sense::Le, 3.0);
        let sol = solve_milp_with(&lp, &SolverOptions::default(), Some(&[1.0, 0.0])).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective + 3.0).abs() < 1e-12);
    }
}
