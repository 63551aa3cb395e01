use std::time::Duration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// A pivot or node cap was hit. `values` holds the best point found, if any.
    IterationLimit,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::IterationLimit => "iteration_limit",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: Status,
    /// Objective at `values`; `NaN` when no point is available.
    pub objective: f64,
    /// One entry per problem variable; empty when no point is available.
    pub values: Vec<f64>,
    /// Best proven lower bound on the objective.
    pub bound: f64,
    /// Relative gap between `objective` and `bound`.
    pub gap: f64,
    pub nodes: usize,
    pub iterations: usize,
    pub wall_time: Duration,
}

impl Solution {
    pub(crate) fn without_point(status: Status, nodes: usize, iterations: usize) -> Self {
        Self {
            status,
            objective: f64::NAN,
            values: Vec::new(),
            bound: f64::NAN,
            gap: f64::NAN,
            nodes,
            iterations,
            wall_time: Duration::ZERO,
        }
    }

    pub fn has_point(&self) -> bool {
        !self.values.is_empty()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}
