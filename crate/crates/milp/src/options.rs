/// Numerical tolerances shared by every solver entry point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Primal feasibility of rows and bounds.
    pub feasibility: f64,
    /// Reduced-cost sign test.
    pub optimality: f64,
    /// Distance from {0, 1} accepted as integral.
    pub integrality: f64,
    /// Smallest tableau entry accepted as a pivot.
    pub pivot: f64,
    /// Relative gap at which branch-and-bound stops.
    pub mip_gap: f64,
    /// Absolute slack used when pruning against the incumbent.
    pub prune: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-7,
            optimality: 1e-7,
            integrality: 1e-6,
            pivot: 1e-9,
            mip_gap: 1e-6,
            prune: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub tol: Tolerances,
    /// Simplex pivot cap for a single LP solve.
    pub max_iterations: usize,
    /// Branch-and-bound node cap.
    pub max_nodes: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_pivots_before_bland: usize,
    /// Memory budget for tableau snapshots kept for warm-starting nodes.
    pub snapshot_budget_bytes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: Tolerances::default(),
            max_iterations: 50_000,
            max_nodes: 100_000,
            degenerate_pivots_before_bland: 50,
            snapshot_budget_bytes: 256 << 20,
        }
    }
}
