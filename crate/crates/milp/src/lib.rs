//! A small dense MILP engine: bounded-variable primal/dual simplex plus
//! best-first branch-and-bound with grouped branching on `sum z = 1` rows,
//! and a brute-force oracle for testing.

mod branch;
mod brute;
mod error;
mod format;
mod lp;
mod options;
mod problem;
mod solution;
mod tableau;

pub use branch::{solve_milp, solve_milp_with, sos1_groups};
pub use brute::{brute_force_milp, DEFAULT_ENUMERATION_CAP};
pub use error::MilpError;
pub use format::{parse_lp, write_lp};
pub use lp::{solve_lp, solve_lp_with};
pub use options::{SolverOptions, Tolerances};
pub use problem::{Constraint, LinearProgram, Sense, VarId, Variable};
pub use solution::{Solution, Status};
