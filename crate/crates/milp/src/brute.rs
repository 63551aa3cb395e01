//! Exhaustive enumeration oracle for small MILPs.

use crate::branch::sos1_groups;
use crate::error::MilpError;
use crate::lp::solve_lp_with;
use crate::options::SolverOptions;
use crate::problem::LinearProgram;
use crate::solution::{Solution, Status};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 16;

/// Enumerates every binary assignment (SOS1 groups jointly, one member set
/// per group) and solves the remaining continuous LP from scratch for each.
///
/// Unbounded leaves make the whole problem unbounded. Leaves that hit the
/// pivot cap are skipped; if every leaf is skipped the status is
/// `IterationLimit`.
pub fn brute_force_milp(lp: &LinearProgram, cap: u128) -> Result<Solution, MilpError> {
    lp.validate()?;
    let start = std::time::Instant::now();
    let groups = sos1_groups(lp);
    let mut grouped = vec![false; lp.num_vars()];
    for g in &groups {
        for &j in g {
            grouped[j] = true;
        }
    }
    let singles: Vec<usize> = (0..lp.num_vars())
        .filter(|&j| lp.variables[j].binary && !grouped[j])
        .collect();

    // radix per digit: group size, or 2 for a lone binary
    let radix: Vec<usize> = groups
        .iter()
        .map(|g| g.len())
        .chain(singles.iter().map(|_| 2))
        .collect();
    let mut combinations: u128 = 1;
    for &r in &radix {
        combinations = combinations.saturating_mul(r as u128);
        if combinations > cap {
            return Err(MilpError::EnumerationCap { combinations, cap });
        }
    }

    let opts = SolverOptions::default();
    let mut leaf = lp.clone();
    let mut digits = vec![0usize; radix.len()];
    let mut best: Option<Solution> = None;
    let mut skipped = 0usize;
    let mut nodes = 0usize;
    let mut iterations = 0usize;

    loop {
        let mut admissible = true;
        for (d, g) in groups.iter().enumerate() {
            for (pos, &j) in g.iter().enumerate() {
                let v = if pos == digits[d] { 1.0 } else { 0.0 };
                admissible &= fix(&mut leaf, lp, j, v);
            }
        }
        for (s, &j) in singles.iter().enumerate() {
            admissible &= fix(&mut leaf, lp, j, digits[groups.len() + s] as f64);
        }
        nodes += 1;
        let sol = if admissible {
            solve_lp_with(&leaf, &opts)?
        } else {
            Solution::without_point(Status::Infeasible, 1, 0)
        };
        iterations += sol.iterations;
        match sol.status {
            Status::Optimal => {
                if best.as_ref().is_none_or(|b| sol.objective < b.objective) {
                    best = Some(sol);
                }
            }
            Status::Unbounded => {
                let mut out = Solution::without_point(Status::Unbounded, nodes, iterations);
                out.wall_time = start.elapsed();
                return Ok(out);
            }
            Status::IterationLimit => skipped += 1,
            Status::Infeasible => {}
        }

        // odometer increment
        let mut pos = 0;
        loop {
            if pos == radix.len() {
                let mut out = match best {
                    Some(mut s) => {
                        s.bound = s.objective;
                        s.gap = 0.0;
                        s
                    }
                    None if skipped > 0 => Solution::without_point(Status::IterationLimit, 0, 0),
                    None => Solution::without_point(Status::Infeasible, 0, 0),
                };
                out.nodes = nodes;
                out.iterations = iterations;
                out.wall_time = start.elapsed();
                return Ok(out);
            }
            digits[pos] += 1;
            if digits[pos] < radix[pos] {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Fixes binary `j` to `v`; returns false when `v` lies outside its bounds.
fn fix(leaf: &mut LinearProgram, original: &LinearProgram, j: usize, v: f64) -> bool {
    let var = &original.variables[j];
    if v < var.lower || v > var.upper {
        return false;
    }
    leaf.variables[j].lower = v;
    leaf.variables[j].upper = v;
    true
}
