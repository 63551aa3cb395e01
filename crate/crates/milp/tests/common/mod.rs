use quietpump_milp::{LinearProgram, Sense, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random MILP: up to 12 binaries, 20 bounded continuous variables and
/// 30 rows, with some binaries tied into `sum = 1` groups. Most rows are
/// built around a hidden point so that a fair share of instances is feasible.
pub fn random_milp(seed: u64) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = rng.random_range(0..=12usize);
    let nc = rng.random_range(if nb == 0 { 1 } else { 0 }..=20usize);
    let mut lp = LinearProgram::new();
    let mut hidden = Vec::new();
    for i in 0..nb {
        lp.add_binary(format!("b{i}"));
        hidden.push(rng.random_range(0..=1) as f64);
    }
    for i in 0..nc {
        let lo = if rng.random_bool(0.3) { -5.0 } else { 0.0 };
        let hi = rng.random_range(1..=6) as f64;
        lp.add_var(format!("x{i}"), lo, hi);
        hidden.push(rng.random_range(lo..hi));
    }
    let n = nb + nc;

    // sum-to-one groups over disjoint binaries
    let mut next = 0;
    let mut g = 0;
    while nb - next >= 2 && rng.random_bool(0.5) {
        let size = rng.random_range(2..=(nb - next).min(4));
        let members: Vec<usize> = (next..next + size).collect();
        let on = members[rng.random_range(0..size)];
        for &j in &members {
            hidden[j] = if j == on { 1.0 } else { 0.0 };
        }
        lp.add_constraint(
            format!("g{g}"),
            members.iter().map(|&j| (VarId(j), 1.0)).collect(),
            Sense::Eq,
            1.0,
        );
        next += size;
        g += 1;
    }

    let rows = rng.random_range(1..=30usize - g);
    for r in 0..rows {
        let mut terms = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.35) {
                let c = rng.random_range(-6..=6) as f64;
                if c != 0.0 {
                    terms.push((VarId(j), c));
                }
            }
        }
        if terms.is_empty() {
            continue;
        }
        let act: f64 = terms.iter().map(|&(v, c)| c * hidden[v.0]).sum();
        let (sense, rhs) = match rng.random_range(0..10) {
            0 => (Sense::Eq, act),
            1..=5 => (Sense::Le, act + rng.random_range(0.0..3.0)),
            6..=8 => (Sense::Ge, act - rng.random_range(0.0..3.0)),
            _ => (Sense::Le, act - rng.random_range(0.0..4.0)),
        };
        lp.add_constraint(format!("r{r}"), terms, sense, (rhs * 8.0).round() / 8.0);
    }
    for j in 0..n {
        let c = rng.random_range(-10..=10) as f64;
        if c != 0.0 {
            lp.add_objective(VarId(j), c);
        }
    }
    lp
}
