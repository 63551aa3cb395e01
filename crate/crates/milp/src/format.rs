//! Human-readable LP text format.
//!
//! ```text
//! \ comment lines start with a backslash
//! minimize
//!   obj: + 3 x - 2 y
//! subject to
//!   cap: + 1 x + 1 y <= 1
//! bounds
//!   0 <= x <= 1
//!   -inf <= y <= inf
//! binary
//!   x
//! end
//! ```
//!
//! Every variable appears in `bounds`, in index order, so a round trip keeps
//! variable indices. Terms are always `sign coefficient name` with
//! whitespace between tokens. Names must be non-empty and contain neither
//! whitespace nor `:`.

use std::fmt::Write as _;

use crate::error::MilpError;
use crate::problem::{LinearProgram, Sense, VarId};

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains(':') && !name.chars().any(char::is_whitespace)
}

fn write_terms(out: &mut String, lp: &LinearProgram, terms: &[(VarId, f64)]) {
    for &(v, c) in terms {
        let sign = if c.is_sign_negative() { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", c.abs(), lp.variables[v.0].name);
    }
}

/// Renders `lp`. Fails if a variable or row name cannot be represented.
pub fn write_lp(lp: &LinearProgram) -> Result<String, MilpError> {
    lp.validate()?;
    for name in lp
        .variables
        .iter()
        .map(|v| &v.name)
        .chain(lp.constraints.iter().map(|c| &c.name))
    {
        if !valid_name(name) {
            return Err(MilpError::Parse {
                line: 0,
                message: format!("name {name:?} cannot be written"),
            });
        }
    }
    let mut out = String::from("minimize\n  obj:");
    write_terms(&mut out, lp, &lp.objective);
    out.push_str("\nsubject to\n");
    for row in &lp.constraints {
        let _ = write!(out, "  {}:", row.name);
        write_terms(&mut out, lp, &row.terms);
        let _ = writeln!(out, " {} {}", row.sense, row.rhs);
    }
    out.push_str("bounds\n");
    for v in &lp.variables {
        let _ = writeln!(out, "  {} <= {} <= {}", v.lower, v.name, v.upper);
    }
    out.push_str("binary\n");
    for v in lp.variables.iter().filter(|v| v.binary) {
        let _ = writeln!(out, "  {}", v.name);
    }
    out.push_str("end\n");
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Objective,
    Rows,
    Bounds,
    Binary,
    End,
}

type RawTerms = Vec<(String, f64, usize)>;

fn err(line: usize, message: impl Into<String>) -> MilpError {
    MilpError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_number(tok: &str, line: usize) -> Result<f64, MilpError> {
    tok.parse::<f64>()
        .map_err(|_| err(line, format!("expected a number, found {tok:?}")))
}

/// Parses leading `sign coef name` triples; returns them with the number of
/// tokens consumed.
fn parse_terms(toks: &[&str], line: usize) -> Result<(RawTerms, usize), MilpError> {
    let mut terms = Vec::new();
    let mut i = 0;
    while i < toks.len() && (toks[i] == "+" || toks[i] == "-") {
        if i + 2 >= toks.len() {
            return Err(err(line, "incomplete term"));
        }
        let coef = parse_number(toks[i + 1], line)?;
        let coef = if toks[i] == "-" { -coef } else { coef };
        terms.push((toks[i + 2].to_string(), coef, line));
        i += 3;
    }
    Ok((terms, i))
}

fn parse_sense(tok: &str, line: usize) -> Result<Sense, MilpError> {
    match tok {
        "<=" => Ok(Sense::Le),
        ">=" => Ok(Sense::Ge),
        "=" => Ok(Sense::Eq),
        _ => Err(err(line, format!("expected <=, >= or =, found {tok:?}"))),
    }
}

/// Parses text produced by [`write_lp`] (or hand-written in the same grammar).
pub fn parse_lp(text: &str) -> Result<LinearProgram, MilpError> {
    let mut section = Section::Start;
    let mut objective: RawTerms = Vec::new();
    let mut rows: Vec<(String, RawTerms, Sense, f64)> = Vec::new();
    let mut lp = LinearProgram::new();
    let mut binaries: Vec<(String, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('\\') {
            continue;
        }
        let next = match trimmed {
            "minimize" => Some((Section::Start, Section::Objective)),
            "subject to" => Some((Section::Objective, Section::Rows)),
            "bounds" => Some((Section::Rows, Section::Bounds)),
            "binary" => Some((Section::Bounds, Section::Binary)),
            "end" => Some((Section::Binary, Section::End)),
            _ => None,
        };
        if let Some((from, to)) = next {
            if section != from {
                return Err(err(line, format!("unexpected section header {trimmed:?}")));
            }
            section = to;
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        match section {
            Section::Start | Section::End => {
                return Err(err(line, format!("text outside a section: {trimmed:?}")))
            }
            Section::Objective => {
                if toks[0] != "obj:" || !objective.is_empty() {
                    return Err(err(line, "expected a single `obj:` line"));
                }
                let (terms, used) = parse_terms(&toks[1..], line)?;
                if used + 1 != toks.len() {
                    return Err(err(line, "trailing tokens after objective"));
                }
                objective = terms;
            }
            Section::Rows => {
                let name = toks[0]
                    .strip_suffix(':')
                    .filter(|n| valid_name(n))
                    .ok_or_else(|| err(line, "row must start with `name:`"))?;
                let (terms, used) = parse_terms(&toks[1..], line)?;
                let rest = &toks[1 + used..];
                if rest.len() != 2 {
                    return Err(err(line, "row must end with `sense rhs`"));
                }
                let sense = parse_sense(rest[0], line)?;
                let rhs = parse_number(rest[1], line)?;
                rows.push((name.to_string(), terms, sense, rhs));
            }
            Section::Bounds => {
                if toks.len() != 5 || toks[1] != "<=" || toks[3] != "<=" || !valid_name(toks[2]) {
                    return Err(err(line, "bound must read `lower <= name <= upper`"));
                }
                if lp.var_by_name(toks[2]).is_some() {
                    return Err(err(line, format!("variable {} declared twice", toks[2])));
                }
                let lower = parse_number(toks[0], line)?;
                let upper = parse_number(toks[4], line)?;
                lp.add_var(toks[2], lower, upper);
            }
            Section::Binary => {
                for t in toks {
                    binaries.push((t.to_string(), line));
                }
            }
        }
    }
    if section != Section::End {
        return Err(err(text.lines().count(), "missing `end`"));
    }

    let resolve = |lp: &LinearProgram, name: &str, line: usize| {
        lp.var_by_name(name)
            .ok_or_else(|| err(line, format!("undeclared variable {name}")))
    };
    for (name, line) in binaries {
        let v = resolve(&lp, &name, line)?;
        lp.variables[v.0].binary = true;
    }
    for (name, coef, line) in objective {
        let v = resolve(&lp, &name, line)?;
        lp.objective.push((v, coef));
    }
    for (name, raw, sense, rhs) in rows {
        let mut terms = Vec::with_capacity(raw.len());
        for (var, coef, line) in raw {
            terms.push((resolve(&lp, &var, line)?, coef));
        }
        lp.add_constraint(name, terms, sense, rhs);
    }
    lp.validate()?;
    Ok(lp)
}
