//! Pasting at the level of primal cardinality vectors.
//!
//! Pasting `d` copies of a `(p-1, q; k)`-coloring succeeds when the crossing
//! edges can be colored, uniformly per vector, so that every `p`-subset
//! sees a blue crossing edge and every `q`-subset a red one. Subsets that
//! put `p - 1` (resp. `q`) vertices into a single block are already handled
//! by the block colorings, which leaves the `P_p(d)` and `Q_q(d)` families.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pcv::{enum_pp, enum_qq, enum_vk, FamilyKind, Pcv};
use crate::sat::{Assignment, Cnf, Lit};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn flipped(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Red => "red",
            Color::Blue => "blue",
        })
    }
}

impl FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Color> {
        match s {
            "red" => Ok(Color::Red),
            "blue" => Ok(Color::Blue),
            _ => Err(Error::Validation(format!("unknown color {s:?}"))),
        }
    }
}

/// A color per crossing vector of part-sum `k`, kept in canonical order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PcvColoring {
    k: u32,
    entries: Vec<(Pcv, Color)>,
}

impl PcvColoring {
    pub fn new(k: u32, entries: impl IntoIterator<Item = (Pcv, Color)>) -> Result<PcvColoring> {
        let mut entries: Vec<(Pcv, Color)> = entries.into_iter().collect();
        for (v, _) in &entries {
            if v.sum() != k {
                return Err(Error::Validation(format!("{v} does not sum to k = {k}")));
            }
            if !v.is_crossing() {
                return Err(Error::Validation(format!("{v} is not a crossing vector")));
            }
        }
        entries.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        if let Some(w) = entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Validation(format!("duplicate entry for {}", w[0].0)));
        }
        Ok(PcvColoring { k, entries })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn entries(&self) -> &[(Pcv, Color)] {
        &self.entries
    }

    pub fn get(&self, v: &Pcv) -> Option<Color> {
        self.entries
            .binary_search_by(|(u, _)| u.canonical_cmp(v))
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// First crossing member of `V_k(d)` without an entry.
    pub fn missing_on(&self, d: u32) -> Option<Pcv> {
        crossing_domain(self.k, d)
            .into_iter()
            .find(|v| self.get(v).is_none())
    }

    /// Restriction to the crossing members of `V_k(d)`.
    pub fn restricted_to(&self, d: u32) -> PcvColoring {
        PcvColoring {
            k: self.k,
            entries: self
                .entries
                .iter()
                .filter(|(v, _)| v.len() <= d as usize)
                .cloned()
                .collect(),
        }
    }

    /// Swaps red and blue everywhere.
    pub fn swapped(&self) -> PcvColoring {
        PcvColoring {
            k: self.k,
            entries: self.entries.iter().map(|(v, c)| (v.clone(), c.flipped())).collect(),
        }
    }

    /// Text form: a `pcv-coloring k=<k> d=<d>` header, then `<pcv> <color>`
    /// per line in canonical order.
    pub fn to_text(&self, d: u32) -> String {
        let mut out = format!("pcv-coloring k={} d={}\n", self.k, d);
        for (v, c) in &self.entries {
            let _ = writeln!(out, "{v} {c}");
        }
        out
    }

    /// Parses [`PcvColoring::to_text`] output, returning the coloring and `d`.
    /// Entries must appear in canonical order and use at most `d` parts.
    pub fn parse(text: &str) -> Result<(PcvColoring, u32)> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty coloring file"))?;
        let (k, d) = parse_header(header)?;
        let mut entries: Vec<(Pcv, Color)> = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let (pcv, color) = line
                .split_once(' ')
                .ok_or_else(|| Error::parse(line_no, "expected `<pcv> <red|blue>`"))?;
            let pcv: Pcv = pcv.parse().map_err(|e| Error::parse(line_no, e))?;
            let color: Color = color.parse().map_err(|e| Error::parse(line_no, e))?;
            if pcv.sum() != k || !pcv.is_crossing() || pcv.len() > d as usize {
                return Err(Error::parse(
                    line_no,
                    format!("{pcv} is not a crossing member of V_{k}({d})"),
                ));
            }
            if let Some((prev, _)) = entries.last() {
                if prev.canonical_cmp(&pcv) != std::cmp::Ordering::Less {
                    return Err(Error::parse(line_no, "entries out of canonical order"));
                }
            }
            entries.push((pcv, color));
        }
        Ok((PcvColoring { k, entries }, d))
    }
}

fn parse_header(line: &str) -> Result<(u32, u32)> {
    let bad = || Error::parse(1, "expected header `pcv-coloring k=<k> d=<d>`");
    let rest = line.strip_prefix("pcv-coloring k=").ok_or_else(bad)?;
    let (k, d) = rest.split_once(" d=").ok_or_else(bad)?;
    let k: u32 = k.parse().map_err(|_| bad())?;
    let d: u32 = d.parse().map_err(|_| bad())?;
    if k < 2 || d < 2 {
        return Err(Error::parse(1, "k and d must be at least 2"));
    }
    Ok((k, d))
}

/// Crossing members of `V_k(d)`, i.e. edge vectors meeting at least two blocks.
pub fn crossing_domain(k: u32, d: u32) -> Vec<Pcv> {
    enum_vk(k, d)
        .members
        .into_iter()
        .filter(Pcv::is_crossing)
        .collect()
}

/// Parameters of one pasting CNF and its variable numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PastingInstance {
    pub k: u32,
    pub p: u32,
    pub q: u32,
    pub d: u32,
    /// Variable `i` (1-based) is `variables[i - 1]`.
    variables: Vec<Pcv>,
}

impl PastingInstance {
    pub fn new(k: u32, p: u32, q: u32, d: u32) -> Result<PastingInstance> {
        if k < 2 || d < 2 || p < k + 1 || q < k + 1 {
            return Err(Error::Parameter(format!(
                "pasting needs k >= 2, d >= 2, p, q >= k + 1 (got k={k}, p={p}, q={q}, d={d})"
            )));
        }
        Ok(PastingInstance {
            k,
            p,
            q,
            d,
            variables: crossing_domain(k, d),
        })
    }

    pub fn variables(&self) -> &[Pcv] {
        &self.variables
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn variable_of(&self, v: &Pcv) -> Option<usize> {
        self.variables
            .binary_search_by(|u| u.canonical_cmp(v))
            .ok()
            .map(|i| i + 1)
    }

    fn clause_for(&self, v: &Pcv, positive: bool) -> Vec<Lit> {
        self.variables
            .iter()
            .enumerate()
            .filter(|(_, u)| v.contains(u))
            .map(|(i, _)| {
                let x = (i + 1) as Lit;
                if positive {
                    x
                } else {
                    -x
                }
            })
            .collect()
    }
}

/// Builds the pasting CNF: one positive clause per member of `P_p(d)` and
/// one negative clause per member of `Q_q(d)`, each over the crossing
/// vectors the member contains.
pub fn build_pasting_cnf(k: u32, p: u32, q: u32, d: u32) -> Result<(PastingInstance, Cnf)> {
    let inst = PastingInstance::new(k, p, q, d)?;
    let mut cnf = Cnf::new(inst.variable_count());
    for (family, positive) in [(enum_pp(p, d), true), (enum_qq(q, d), false)] {
        for v in family.iter() {
            let clause = inst.clause_for(v, positive);
            if clause.is_empty() {
                return Err(Error::EmptyClause {
                    kind: family.kind,
                    pcv: v.clone(),
                });
            }
            cnf.push_clause_unchecked(&clause);
        }
    }
    Ok((inst, cnf))
}

/// True variables become blue, false ones red.
pub fn decode_coloring(inst: &PastingInstance, assignment: &Assignment) -> Result<PcvColoring> {
    if assignment.len() < inst.variable_count() {
        return Err(Error::IncompleteAssignment(assignment.len() + 1));
    }
    let entries = inst.variables.iter().enumerate().map(|(i, v)| {
        let c = if assignment.value(i + 1) {
            Color::Blue
        } else {
            Color::Red
        };
        (v.clone(), c)
    });
    PcvColoring::new(inst.k, entries)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// `uncovered` is the first member of the `kind` family (canonical order)
    /// containing no crossing edge of the required color.
    Invalid { kind: FamilyKind, uncovered: Pcv },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

/// Checks that every member of `P_p(d)` contains a blue vector of `chi` and
/// every member of `Q_q(d)` contains a red one.
pub fn verify_pasting_coloring(chi: &PcvColoring, p: u32, q: u32, d: u32) -> Result<Verdict> {
    if let Some(v) = chi.missing_on(d) {
        return Err(Error::Domain(v));
    }
    let domain = chi.restricted_to(d);
    for (family, wanted) in [(enum_pp(p, d), Color::Blue), (enum_qq(q, d), Color::Red)] {
        for v in family.iter() {
            let covered = domain
                .entries
                .iter()
                .any(|(u, c)| *c == wanted && v.contains(u));
            if !covered {
                return Ok(Verdict::Invalid {
                    kind: family.kind,
                    uncovered: v.clone(),
                });
            }
        }
    }
    Ok(Verdict::Valid)
}

/// Hand-constructed colorings with known pasting parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// `k = 4`, `d = 2`: `(3,1)` red, `(2,2)` blue.
    Chi1,
    /// `k = 4`, `d = 5`: `(3,1)`, `(1,1,1,1)` red; `(2,2)`, `(2,1,1)` blue.
    Chi2,
    /// `d = 2` coloring for `k >= 4`, obtained from [`ClosedForm::Chi1`] by
    /// repeatedly shifting the first coordinate.
    TwoDivide(u32),
    /// Red only on `(k-1,1)`, over the crossing members of `V_k(d)`.
    LargeQ { k: u32, d: u32 },
}

fn pcv(parts: &[u32]) -> Pcv {
    Pcv::new(parts.to_vec()).expect("static pcv")
}

pub fn closed_form_coloring(family: ClosedForm) -> Result<PcvColoring> {
    match family {
        ClosedForm::Chi1 => PcvColoring::new(
            4,
            [(pcv(&[3, 1]), Color::Red), (pcv(&[2, 2]), Color::Blue)],
        ),
        ClosedForm::Chi2 => {
            let listed = [
                (pcv(&[3, 1]), Color::Red),
                (pcv(&[1, 1, 1, 1]), Color::Red),
                (pcv(&[2, 2]), Color::Blue),
                (pcv(&[2, 1, 1]), Color::Blue),
            ];
            // any crossing vector not listed above is blue
            let entries = crossing_domain(4, 5).into_iter().map(|v| {
                let c = listed
                    .iter()
                    .find(|(u, _)| *u == v)
                    .map_or(Color::Blue, |(_, c)| *c);
                (v, c)
            });
            PcvColoring::new(4, entries)
        }
        ClosedForm::TwoDivide(k) => {
            if k < 4 {
                return Err(Error::Parameter(format!("two_divide needs k >= 4, got {k}")));
            }
            let mut chi = closed_form_coloring(ClosedForm::Chi1)?;
            for next in 5..=k {
                chi = shift_two_block(&chi, next)?;
            }
            Ok(chi)
        }
        ClosedForm::LargeQ { k, d } => {
            if k < 4 {
                return Err(Error::Parameter(format!("large_q needs k >= 4, got {k}")));
            }
            if d < 2 {
                return Err(Error::Parameter(format!("large_q needs d >= 2, got {d}")));
            }
            let red = pcv(&[k - 1, 1]);
            let entries = crossing_domain(k, d).into_iter().map(|v| {
                let c = if v == red { Color::Red } else { Color::Blue };
                (v, c)
            });
            PcvColoring::new(k, entries)
        }
    }
}

/// `χ'(u1, u2) = χ(u1 - 1, u2)` on two blocks; the balanced vector, which
/// has no predecessor, takes the color opposite to `(u1 + 1, u2 - 1)`.
fn shift_two_block(chi: &PcvColoring, next: u32) -> Result<PcvColoring> {
    let mut entries: Vec<(Pcv, Color)> = Vec::new();
    // canonical order visits (u1 + 1, u2 - 1) before the balanced vector
    for v in crossing_domain(next, 2) {
        let (u1, u2) = (v.parts()[0], v.parts()[1]);
        let color = if u1 > u2 {
            let prev = pcv(&[u1 - 1, u2]);
            chi.get(&prev).ok_or(Error::Domain(prev))?
        } else {
            let companion = pcv(&[u1 + 1, u2 - 1]);
            entries
                .iter()
                .find(|(u, _)| *u == companion)
                .map(|(_, c)| c.flipped())
                .ok_or(Error::Domain(companion))?
        };
        entries.push((v, color));
    }
    PcvColoring::new(next, entries)
}
