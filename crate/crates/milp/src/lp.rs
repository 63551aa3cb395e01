use std::time::Instant;

use log::warn;

use crate::error::MilpError;
use crate::options::SolverOptions;
use crate::problem::LinearProgram;
use crate::solution::{Solution, Status};
use crate::tableau::{LpOutcome, Prepared, Tableau};

/// Solves the continuous relaxation of `lp` (binary flags are ignored).
pub fn solve_lp(lp: &LinearProgram) -> Result<Solution, MilpError> {
    solve_lp_with(lp, &SolverOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SolverOptions) -> Result<Solution, MilpError> {
    lp.validate()?;
    let start = Instant::now();
    let prep = Prepared::from_problem(lp, opts, true);
    if prep.infeasible {
        let mut sol = Solution::without_point(Status::Infeasible, 1, 0);
        sol.wall_time = start.elapsed();
        return Ok(sol);
    }
    let mut tab = Tableau::new(&prep);
    let outcome = tab.primal(opts);
    let mut sol = match outcome {
        LpOutcome::Optimal => {
            let values = tab.structural_values();
            let objective = lp.objective_value(&values);
            let violation = lp.max_violation(&values);
            if violation > 1e-6 {
                warn!("LP optimum violates constraints by {violation:.3e}");
            }
            Solution {
                status: Status::Optimal,
                objective,
                values,
                bound: objective,
                gap: 0.0,
                nodes: 1,
                iterations: tab.iterations,
                wall_time: Default::default(),
            }
        }
        LpOutcome::Infeasible => Solution::without_point(Status::Infeasible, 1, tab.iterations),
        LpOutcome::Unbounded => Solution::without_point(Status::Unbounded, 1, tab.iterations),
        LpOutcome::IterationLimit | LpOutcome::Cutoff => {
            Solution::without_point(Status::IterationLimit, 1, tab.iterations)
        }
    };
    sol.wall_time = start.elapsed();
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Sense;

    #[test]
    fn lower_bound_row_is_active() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, 10.0);
        lp.add_objective(x, 1.0);
        lp.add_constraint("c", vec![(x, 1.0)], Sense::Ge, 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.values[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn two_variable_vertex() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, 1.0);
        let y = lp.add_var("y", 0.0, 1.0);
        lp.add_objective(x, -1.0);
        lp.add_objective(y, -1.0);
        lp.add_constraint("c", vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-9);
        assert!(lp.max_violation(&sol.values) < 1e-9);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
        let y = lp.add_var("y", 0.0, 1.0);
        lp.add_constraint("lo", vec![(x, 1.0), (y, 0.0)], Sense::Ge, 2.0);
        lp.add_constraint("hi", vec![(x, 1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, Status::Infeasible);

        // same contradiction kept as multi-variable rows so it reaches phase 1
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
        let y = lp.add_var("y", 0.0, 0.0);
        lp.add_constraint("lo", vec![(x, 1.0), (y, 1.0)], Sense::Ge, 2.0);
        lp.add_constraint("hi", vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn free_descent_direction_is_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
        let y = lp.add_var("y", 0.0, f64::INFINITY);
        lp.add_objective(x, 1.0);
        lp.add_constraint("c", vec![(x, 1.0), (y, -1.0)], Sense::Le, 4.0);
        assert_eq!(solve_lp(&lp).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn equality_rows_with_free_variables() {
        // min x + 2y  s.t. x + y = 3, x - y = 1  -> x = 2, y = 1
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
        let y = lp.add_var("y", f64::NEG_INFINITY, f64::INFINITY);
        lp.add_objective(x, 1.0);
        lp.add_objective(y, 2.0);
        lp.add_constraint("a", vec![(x, 1.0), (y, 1.0)], Sense::Eq, 3.0);
        lp.add_constraint("b", vec![(x, 1.0), (y, -1.0)], Sense::Eq, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.values[0] - 2.0).abs() < 1e-9);
        assert!((sol.values[1] - 1.0).abs() < 1e-9);
        assert!((sol.objective - 4.0).abs() < 1e-9);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let mut lp = LinearProgram::new();
        let vars: Vec<_> = (0..6).map(|i| lp.add_var(format!("x{i}"), 0.0, 10.0)).collect();
        for (i, &v) in vars.iter().enumerate() {
            lp.add_objective(v, -(i as f64 + 1.0));
        }
        lp.add_constraint("sum", vars.iter().map(|&v| (v, 1.0)).collect(), Sense::Le, 7.0);
        lp.add_constraint("pair", vec![(vars[0], 1.0), (vars[5], 2.0)], Sense::Ge, 1.0);
        let opts = SolverOptions {
            max_iterations: 1,
            ..Default::default()
        };
        let sol = solve_lp_with(&lp, &opts).unwrap();
        assert_eq!(sol.status, Status::IterationLimit);
    }

    #[test]
    fn binary_flags_are_relaxed() {
        let mut lp = LinearProgram::new();
        let x = lp.add_binary("x");
        let y = lp.add_binary("y");
        lp.add_objective(x, -1.0);
        lp.add_objective(y, -1.0);
        lp.add_constraint("c", vec![(x, 2.0), (y, 2.0)], Sense::Le, 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective + 1.5).abs() < 1e-9);
    }
}
