//! DIMACS CNF output/input and solver solution lines.

use std::fmt::Write as _;

use super::cnf::{var_of, Assignment, Cnf, Lit};
use crate::error::{Error, Result};

pub fn export_dimacs(cnf: &Cnf) -> String {
    let mut out = String::with_capacity(16 + cnf.literal_count() * 4);
    let _ = writeln!(out, "p cnf {} {}", cnf.variable_count(), cnf.clause_count());
    for clause in cnf.clauses() {
        for &l in clause {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

/// Parses a DIMACS CNF. Comment lines (`c ...`) are skipped; clauses may
/// span lines and are terminated by `0`.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut cnf = Cnf::new(0);
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate problem line"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[1] != "cnf" {
                return Err(Error::parse(line_no, "expected `p cnf <vars> <clauses>`"));
            }
            let vars = fields[2]
                .parse()
                .map_err(|_| Error::parse(line_no, "bad variable count"))?;
            let clauses = fields[3]
                .parse()
                .map_err(|_| Error::parse(line_no, "bad clause count"))?;
            header = Some((vars, clauses));
            cnf = Cnf::new(vars);
            continue;
        }
        if header.is_none() {
            return Err(Error::parse(line_no, "clause before problem line"));
        }
        for tok in line.split_whitespace() {
            let lit: Lit = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                cnf.push_clause(&current)
                    .map_err(|e| Error::parse(line_no, e))?;
                current.clear();
            } else {
                current.push(lit);
            }
        }
    }
    let Some((_, clauses)) = header else {
        return Err(Error::parse(last_line.max(1), "missing problem line"));
    };
    if !current.is_empty() {
        return Err(Error::parse(last_line, "unterminated clause"));
    }
    if cnf.clause_count() != clauses {
        return Err(Error::parse(
            last_line,
            format!("header declares {clauses} clauses, found {}", cnf.clause_count()),
        ));
    }
    Ok(cnf)
}

/// Reads a solution in solver output format (`v`-prefixed or bare signed
/// integers). Every variable in `1..=variable_count` must be assigned.
pub fn import_assignment(text: &str, variable_count: usize) -> Result<Assignment> {
    let mut values: Vec<Option<bool>> = vec![None; variable_count];
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('v') {
            line = rest;
        }
        for tok in line.split_whitespace() {
            let lit: Lit = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                continue;
            }
            let v = var_of(lit);
            if v > variable_count {
                return Err(Error::parse(
                    line_no,
                    format!("variable {v} out of range 1..={variable_count}"),
                ));
            }
            let val = lit > 0;
            match values[v - 1] {
                Some(prev) if prev != val => {
                    return Err(Error::parse(line_no, format!("variable {v} assigned both ways")))
                }
                _ => values[v - 1] = Some(val),
            }
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            v.ok_or_else(|| Error::parse(0, format!("variable {} unassigned", i + 1)))
        })
        .collect::<Result<Vec<_>>>()
        .map(Assignment::new)
}

/// Solution lines for `assignment`, as a solver would print them.
pub fn export_assignment(assignment: &Assignment) -> String {
    let mut out = String::from("v");
    for (i, &b) in assignment.values().iter().enumerate() {
        let v = i + 1;
        let _ = write!(out, " {}", if b { v as i64 } else { -(v as i64) });
    }
    out.push_str(" 0\n");
    out
}
