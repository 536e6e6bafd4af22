//! Recurrence engine for lower bounds on `r_k(p, q)`.
//!
//! Every rule has the shape `r_k(p, q) >= d * (r_k(p - 1, q) - 1) + 1` for a
//! guard on `(k, p, q)` and a factor `d`. Seeds, rules, color-swap symmetry
//! and monotone padding are iterated to a fixpoint over a finite grid. Each
//! cell remembers the step that produced its value, so a full derivation
//! can be rebuilt and replayed.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;

use crate::direct::{verify_certificate, Certificate, CliqueVerdict};
use crate::error::{Error, Result};
use crate::pasting::{build_pasting_cnf, decode_coloring, verify_pasting_coloring, PcvColoring};
use crate::sat::{solve_complete, CompleteOutcome};

/// Largest `k` covered by the built-in pasting rules R3 and R4.
pub const BUILTIN_K_MAX: u32 = 25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeedKind {
    /// `r_k(p, k) = p` and `r_k(k, q) = q`.
    Trivial,
    /// `r_k(k + 1, k + 1) >= k + 1`.
    Diagonal,
    /// A verified coloring on `n` vertices.
    Certificate { n: u32 },
    /// Supplied by the caller without a certificate.
    Assumed,
}

impl fmt::Display for SeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedKind::Trivial => f.write_str("trivial"),
            SeedKind::Diagonal => f.write_str("diagonal base"),
            SeedKind::Certificate { n } => write!(f, "verified certificate on {n} vertices"),
            SeedKind::Assumed => f.write_str("assumed"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedFact {
    pub k: u32,
    pub p: u32,
    pub q: u32,
    pub value: BigUint,
    pub kind: SeedKind,
}

impl SeedFact {
    /// A fact taken on trust; derivations show it as `assumed`.
    pub fn assumed(k: u32, p: u32, q: u32, value: u64) -> SeedFact {
        SeedFact {
            k,
            p,
            q,
            value: BigUint::from(value),
            kind: SeedKind::Assumed,
        }
    }

    /// Checks `cert` and turns it into `r_k(p, q) >= n + 1`.
    pub fn from_certificate(cert: &Certificate) -> Result<SeedFact> {
        let c = &cert.coloring;
        if cert.p < c.k() || cert.q < c.k() {
            return Err(Error::Parameter(format!(
                "certificate clique sizes p={}, q={} are below k={}",
                cert.p,
                cert.q,
                c.k()
            )));
        }
        match verify_certificate(c, cert.p, cert.q) {
            CliqueVerdict::Valid => Ok(SeedFact {
                k: c.k(),
                p: cert.p,
                q: cert.q,
                value: BigUint::from(c.n() + 1),
                kind: SeedKind::Certificate { n: c.n() },
            }),
            CliqueVerdict::Invalid { clique, color } => {
                Err(Error::CertificateRejected { clique, color })
            }
        }
    }
}

/// Grid of cells `(k, p, q)` with `k_min <= k <= k_max`, `k <= p <= p_max`
/// and `k <= q <= q_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub k_min: u32,
    pub k_max: u32,
    pub p_max: u32,
    pub q_max: u32,
}

impl Limits {
    pub fn contains(&self, k: u32, p: u32, q: u32) -> bool {
        (self.k_min..=self.k_max).contains(&k)
            && (k..=self.p_max).contains(&p)
            && (k..=self.q_max).contains(&q)
    }
}

/// Trivial and diagonal facts for every `k` in range, plus one fact per
/// certificate. A certificate that fails verification is an error carrying
/// the offending clique.
pub fn seed_facts(limits: &Limits, certificates: &[Certificate]) -> Result<Vec<SeedFact>> {
    let mut facts = Vec::new();
    for k in limits.k_min.max(2)..=limits.k_max {
        for p in k..=limits.p_max {
            facts.push(SeedFact {
                k,
                p,
                q: k,
                value: BigUint::from(p),
                kind: SeedKind::Trivial,
            });
        }
        for q in k + 1..=limits.q_max {
            facts.push(SeedFact {
                k,
                p: k,
                q,
                value: BigUint::from(q),
                kind: SeedKind::Trivial,
            });
        }
        facts.push(SeedFact {
            k,
            p: k + 1,
            q: k + 1,
            value: BigUint::from(k + 1),
            kind: SeedKind::Diagonal,
        });
    }
    for cert in certificates {
        facts.push(SeedFact::from_certificate(cert)?);
    }
    Ok(facts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Two,
    PMinusOne,
    /// `floor((q - 1) / (k - 2))`
    QOverKMinusTwo,
}

impl Factor {
    pub fn eval(self, k: u32, p: u32, q: u32) -> u32 {
        match self {
            Factor::Two => 2,
            Factor::PMinusOne => p - 1,
            Factor::QOverKMinusTwo => {
                if k <= 2 {
                    0
                } else {
                    (q - 1) / (k - 2)
                }
            }
        }
    }

    fn describe(self, k: u32, p: u32, q: u32) -> String {
        let d = self.eval(k, p, q);
        match self {
            Factor::Two => "d = 2".to_string(),
            Factor::PMinusOne => format!("d = p - 1 = {d}"),
            Factor::QOverKMinusTwo => format!("d = floor((q - 1)/(k - 2)) = {d}"),
        }
    }
}

/// A solved pasting instance backing a rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub p: u32,
    pub q: u32,
    pub d: u32,
    pub coloring: PcvColoring,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Builtin(&'static str),
    Witnesses(Vec<Witness>),
}

#[derive(Clone, Copy, Debug)]
enum Guard {
    Builtin(fn(u32, u32, u32) -> bool),
    /// Fixed `k`, `p >= k + 2`, `q >= k + q_offset`.
    FixedK { k: u32, q_offset: u32 },
}

#[derive(Clone, Debug)]
pub struct RecurrenceRule {
    pub id: String,
    pub guard_text: String,
    guard: Guard,
    pub factor: Factor,
    pub justification: Justification,
}

impl RecurrenceRule {
    /// Whether the rule lifts `r_k(p - 1, q)` to `r_k(p, q)`. A factor below
    /// 2 would not lift anything, so it disables the rule.
    pub fn applies(&self, k: u32, p: u32, q: u32) -> bool {
        let guard = match self.guard {
            Guard::Builtin(g) => g(k, p, q),
            Guard::FixedK { k: gk, q_offset } => k == gk && p >= k + 2 && q >= k + q_offset,
        };
        guard && self.factor.eval(k, p, q) >= 2
    }

    /// Re-checks every stored witness coloring. Built-in rules have none.
    pub fn reverify(&self) -> Result<bool> {
        match &self.justification {
            Justification::Builtin(_) => Ok(true),
            Justification::Witnesses(ws) => {
                for w in ws {
                    if !verify_pasting_coloring(&w.coloring, w.p, w.q, w.d)?.is_valid() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

fn builtin(
    id: &str,
    guard_text: &str,
    guard: fn(u32, u32, u32) -> bool,
    factor: Factor,
    why: &'static str,
) -> RecurrenceRule {
    RecurrenceRule {
        id: id.to_string(),
        guard_text: guard_text.to_string(),
        guard: Guard::Builtin(guard),
        factor,
        justification: Justification::Builtin(why),
    }
}

/// The six built-in recurrence rules, in id order.
pub fn builtin_rules() -> Vec<RecurrenceRule> {
    vec![
        builtin(
            "R1",
            "k = 4, p >= 6, q >= 5",
            |k, p, q| k == 4 && p >= 6 && q >= 5,
            Factor::Two,
            "two copies pasted with chi1",
        ),
        builtin(
            "R2",
            "k = 4, p >= 6, q >= 7",
            |k, p, q| k == 4 && p >= 6 && q >= 7,
            Factor::PMinusOne,
            "p - 1 copies pasted with chi2",
        ),
        builtin(
            "R3",
            "5 <= k <= 25, p >= k + 2, q >= k + 2",
            |k, p, q| (5..=BUILTIN_K_MAX).contains(&k) && p >= k + 2 && q >= k + 2,
            Factor::PMinusOne,
            "solved pasting bases (k, k+2, k+2, k+1) and (k, k+3, k+2, k+2), lifted",
        ),
        builtin(
            "R4",
            "8 <= k <= 25, k != 9, p >= k + 2, q >= k + 1",
            |k, p, q| (8..=BUILTIN_K_MAX).contains(&k) && k != 9 && p >= k + 2 && q >= k + 1,
            Factor::PMinusOne,
            "solved pasting base (k, k+2, k+1, k+1), lifted",
        ),
        builtin(
            "R5",
            "even k >= 4: p >= k + 2, q >= k + 1; odd k >= 5: p >= k + 2, q >= k + 2",
            |k, p, q| {
                if k % 2 == 0 {
                    k >= 4 && p >= k + 2 && q >= k + 1
                } else {
                    k >= 5 && p >= k + 2 && q >= k + 2
                }
            },
            Factor::Two,
            "two copies pasted with the shifted two-block coloring",
        ),
        builtin(
            "R6",
            "k >= 4, p >= k + 2, q >= k + 1, d >= 2",
            |k, p, q| k >= 4 && p >= k + 2 && q >= k + 1,
            Factor::QOverKMinusTwo,
            "d copies pasted with (k-1,1) red, everything else blue",
        ),
    ]
}

/// Which pasting bases a solved rule rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftStyle {
    /// Bases `(k, k+2, k+2, k+1)` and `(k, k+3, k+2, k+2)`; rule needs `q >= k + 2`.
    Diagonal,
    /// Base `(k, k+2, k+1, k+1)`; rule needs `q >= k + 1`.
    OffDiagonal,
}

impl LiftStyle {
    /// Pasting instances `(p, q, d)` to solve for edge size `k`.
    pub fn instances(self, k: u32) -> Vec<(u32, u32, u32)> {
        match self {
            LiftStyle::Diagonal => vec![(k + 2, k + 2, k + 1), (k + 3, k + 2, k + 2)],
            LiftStyle::OffDiagonal => vec![(k + 2, k + 1, k + 1)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    Unsat,
    BudgetExceeded { nodes: u64 },
}

#[derive(Clone, Debug)]
pub enum ExtendOutcome {
    Installed(RecurrenceRule),
    Rejected {
        k: u32,
        p: u32,
        q: u32,
        d: u32,
        reason: RejectReason,
    },
}

/// Solves the pasting bases of `style` for edge size `k` with the complete
/// solver and, when all are satisfiable, returns a rule carrying the decoded
/// and verified colorings.
pub fn pasting_rule(k: u32, style: LiftStyle, budget: u64) -> Result<ExtendOutcome> {
    let mut witnesses = Vec::new();
    for (p, q, d) in style.instances(k) {
        let (inst, cnf) = build_pasting_cnf(k, p, q, d)?;
        let assignment = match solve_complete(&cnf, budget) {
            CompleteOutcome::Sat(a) => a,
            CompleteOutcome::Unsat => {
                return Ok(ExtendOutcome::Rejected {
                    k,
                    p,
                    q,
                    d,
                    reason: RejectReason::Unsat,
                })
            }
            CompleteOutcome::BudgetExceeded { nodes } => {
                return Ok(ExtendOutcome::Rejected {
                    k,
                    p,
                    q,
                    d,
                    reason: RejectReason::BudgetExceeded { nodes },
                })
            }
        };
        let coloring = decode_coloring(&inst, &assignment)?;
        if !verify_pasting_coloring(&coloring, p, q, d)?.is_valid() {
            return Err(Error::Validation(format!(
                "decoded coloring for ({k}, {p}, {q}, {d}) fails verification"
            )));
        }
        witnesses.push(Witness { p, q, d, coloring });
    }
    let (suffix, q_offset) = match style {
        LiftStyle::Diagonal => ("d", 2),
        LiftStyle::OffDiagonal => ("o", 1),
    };
    Ok(ExtendOutcome::Installed(RecurrenceRule {
        id: format!("S{k}{suffix}"),
        guard_text: format!("k = {k}, p >= {}, q >= {}", k + 2, k + q_offset),
        guard: Guard::FixedK { k, q_offset },
        factor: Factor::PMinusOne,
        justification: Justification::Witnesses(witnesses),
    }))
}

/// Adds a diagonal-style rule for `k` beyond the built-in range, provided
/// both pasting bases are solved within `budget` nodes each.
pub fn extend_rules(k: u32, budget: u64) -> Result<ExtendOutcome> {
    if k <= BUILTIN_K_MAX {
        return Err(Error::Parameter(format!(
            "k = {k} is covered by the built-in rules; extension starts at {}",
            BUILTIN_K_MAX + 1
        )));
    }
    pasting_rule(k, LiftStyle::Diagonal, budget)
}

/// How a cell got its value. Sources are implied by the step: rules and
/// `PadP` read `(p - 1, q)`, `PadQ` reads `(p, q - 1)`, symmetry reads `(q, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Step {
    Seed(SeedKind),
    Rule { index: usize, d: u32 },
    Symmetry,
    PadP,
    PadQ,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Cell {
    value: BigUint,
    step: Step,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Seed(SeedKind),
    Rule {
        id: String,
        guard: String,
        factor: String,
        d: u32,
        source: Box<BoundFact>,
    },
    Symmetry { source: Box<BoundFact> },
    Padding { source: Box<BoundFact> },
}

/// `r_k(p, q) >= value`, with the derivation that proves it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundFact {
    pub k: u32,
    pub p: u32,
    pub q: u32,
    pub value: BigUint,
    pub provenance: Provenance,
}

fn lift(d: u32, x: &BigUint) -> BigUint {
    BigUint::from(d) * (x - BigUint::one()) + BigUint::one()
}

impl BoundFact {
    /// Recomputes the value from the seed leaves, re-checking each guard
    /// and each source cell against `rules`.
    pub fn replay(&self, rules: &[RecurrenceRule]) -> std::result::Result<BigUint, String> {
        let (k, p, q) = (self.k, self.p, self.q);
        let expect_source = |s: &BoundFact, sp: u32, sq: u32| {
            if s.k != k || s.p != sp || s.q != sq {
                Err(format!(
                    "r_{k}({p},{q}) cites r_{}({},{}) instead of r_{k}({sp},{sq})",
                    s.k, s.p, s.q
                ))
            } else {
                s.replay(rules)
            }
        };
        let value = match &self.provenance {
            Provenance::Seed(kind) => {
                match kind {
                    SeedKind::Trivial if q == k => BigUint::from(p),
                    SeedKind::Trivial if p == k => BigUint::from(q),
                    SeedKind::Trivial => return Err(format!("r_{k}({p},{q}) is not trivial")),
                    SeedKind::Diagonal if p == k + 1 && q == k + 1 => BigUint::from(k + 1),
                    SeedKind::Diagonal => return Err(format!("r_{k}({p},{q}) is not diagonal")),
                    SeedKind::Certificate { n } => BigUint::from(n + 1),
                    SeedKind::Assumed => self.value.clone(),
                }
            }
            Provenance::Rule { id, d, source, .. } => {
                let rule = rules
                    .iter()
                    .find(|r| &r.id == id)
                    .ok_or_else(|| format!("unknown rule {id}"))?;
                if !rule.applies(k, p, q) {
                    return Err(format!("{id} does not apply at r_{k}({p},{q})"));
                }
                if rule.factor.eval(k, p, q) != *d {
                    return Err(format!("{id} at r_{k}({p},{q}) has the wrong factor {d}"));
                }
                lift(*d, &expect_source(source, p - 1, q)?)
            }
            Provenance::Symmetry { source } => expect_source(source, q, p)?,
            Provenance::Padding { source } => {
                if source.p == p && source.q + 1 == q {
                    expect_source(source, p, q - 1)?
                } else {
                    expect_source(source, p.wrapping_sub(1), q)?
                }
            }
        };
        if value != self.value {
            return Err(format!(
                "r_{k}({p},{q}) claims {} but replays to {value}",
                self.value
            ));
        }
        Ok(value)
    }

    /// Rule ids along the derivation, top first, ending in the seed kind.
    pub fn chain(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut node = self;
        loop {
            match &node.provenance {
                Provenance::Seed(kind) => {
                    out.push(
                        match kind {
                            SeedKind::Trivial => "trivial",
                            SeedKind::Diagonal => "diagonal",
                            SeedKind::Certificate { .. } => "cert",
                            SeedKind::Assumed => "assumed",
                        }
                        .to_string(),
                    );
                    return out;
                }
                Provenance::Rule { id, source, .. } => {
                    out.push(id.clone());
                    node = source;
                }
                Provenance::Symmetry { source } => {
                    out.push("sym".to_string());
                    node = source;
                }
                Provenance::Padding { source } => {
                    out.push("pad".to_string());
                    node = source;
                }
            }
        }
    }
}

impl fmt::Display for BoundFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r_{}({},{}) >= {}", self.k, self.p, self.q, self.value)
    }
}

/// Human-readable derivation, one line per step, indented by depth.
pub fn derivation(fact: &BoundFact) -> String {
    let mut out = String::new();
    let mut node = fact;
    let mut depth = 0;
    loop {
        let pad = "  ".repeat(depth);
        let next = match &node.provenance {
            Provenance::Seed(kind) => {
                let _ = writeln!(out, "{pad}{node}  [seed: {kind}]");
                return out;
            }
            Provenance::Rule {
                id,
                guard,
                factor,
                d,
                source,
            } => {
                let _ = writeln!(
                    out,
                    "{pad}{node}  [{id}: {guard}; {factor}; {d}*({} - 1) + 1 = {}]",
                    source.value, node.value
                );
                source
            }
            Provenance::Symmetry { source } => {
                let _ = writeln!(
                    out,
                    "{pad}{node}  [color swap of r_{}({},{})]",
                    source.k, source.p, source.q
                );
                source
            }
            Provenance::Padding { source } => {
                let _ = writeln!(
                    out,
                    "{pad}{node}  [padding from r_{}({},{})]",
                    source.k, source.p, source.q
                );
                source
            }
        };
        node = next;
        depth += 1;
    }
}

/// Fixpoint table of lower bounds.
#[derive(Clone, Debug)]
pub struct BoundTable {
    limits: Limits,
    rules: Vec<RecurrenceRule>,
    cells: BTreeMap<(u32, u32, u32), Cell>,
}

/// Seeds the grid with `facts` (out-of-grid facts are ignored), then
/// iterates rules, symmetry and padding until nothing changes.
pub fn compute_table(facts: &[SeedFact], rules: &[RecurrenceRule], limits: Limits) -> BoundTable {
    let mut table = BoundTable {
        limits,
        rules: rules.to_vec(),
        cells: BTreeMap::new(),
    };
    for f in facts {
        if !limits.contains(f.k, f.p, f.q) {
            continue;
        }
        let better = table
            .cells
            .get(&(f.k, f.p, f.q))
            .map_or(true, |c| f.value > c.value);
        if better {
            table.cells.insert(
                (f.k, f.p, f.q),
                Cell {
                    value: f.value.clone(),
                    step: Step::Seed(f.kind.clone()),
                },
            );
        }
    }
    table.saturate();
    table
}

impl BoundTable {
    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn rules(&self) -> &[RecurrenceRule] {
        &self.rules
    }

    pub fn value(&self, k: u32, p: u32, q: u32) -> Option<&BigUint> {
        self.cells.get(&(k, p, q)).map(|c| &c.value)
    }

    /// Occupied cells in `(k, p, q)` order.
    pub fn cells(&self) -> impl Iterator<Item = ((u32, u32, u32), &BigUint)> + '_ {
        self.cells.iter().map(|(&key, c)| (key, &c.value))
    }

    /// Sweeps until nothing changes and reports whether anything did. A
    /// table from [`compute_table`] is already saturated.
    pub fn saturate(&mut self) -> bool {
        let mut any = false;
        while self.sweep() {
            any = true;
        }
        any
    }

    fn candidates(&self, k: u32, p: u32, q: u32) -> Vec<(BigUint, Step)> {
        let mut out = Vec::new();
        if let Some(src) = self.cells.get(&(k, p.wrapping_sub(1), q)) {
            for (index, rule) in self.rules.iter().enumerate() {
                if rule.applies(k, p, q) {
                    let d = rule.factor.eval(k, p, q);
                    out.push((lift(d, &src.value), Step::Rule { index, d }));
                }
            }
            out.push((src.value.clone(), Step::PadP));
        }
        if let Some(src) = self.cells.get(&(k, q, p)) {
            out.push((src.value.clone(), Step::Symmetry));
        }
        if let Some(src) = self.cells.get(&(k, p, q.wrapping_sub(1))) {
            out.push((src.value.clone(), Step::PadQ));
        }
        out
    }

    /// Structural steps replace a cell only on a strict increase. A rule
    /// also wins ties against structural steps and rules of larger index,
    /// but never against a seed.
    fn replaces(current: Option<&Cell>, value: &BigUint, step: &Step) -> bool {
        let Some(cur) = current else { return true };
        if *value != cur.value {
            return *value > cur.value;
        }
        match (step, &cur.step) {
            (Step::Rule { index: i, .. }, Step::Rule { index: j, .. }) => i < j,
            (Step::Rule { .. }, Step::Symmetry | Step::PadP | Step::PadQ) => true,
            _ => false,
        }
    }

    fn sweep(&mut self) -> bool {
        let mut changed = false;
        let l = self.limits;
        for k in l.k_min..=l.k_max {
            for p in k..=l.p_max {
                for q in k..=l.q_max {
                    for (value, step) in self.candidates(k, p, q) {
                        let current = self.cells.get(&(k, p, q));
                        if Self::replaces(current, &value, &step) {
                            self.cells.insert((k, p, q), Cell { value, step });
                            changed = true;
                        }
                    }
                }
            }
        }
        changed
    }

    /// The derivation of a cell, or `None` outside the occupied grid.
    pub fn fact(&self, k: u32, p: u32, q: u32) -> Option<BoundFact> {
        let cell = self.cells.get(&(k, p, q))?;
        let provenance = match &cell.step {
            Step::Seed(kind) => Provenance::Seed(kind.clone()),
            Step::Rule { index, d } => {
                let rule = &self.rules[*index];
                Provenance::Rule {
                    id: rule.id.clone(),
                    guard: rule.guard_text.clone(),
                    factor: rule.factor.describe(k, p, q),
                    d: *d,
                    source: Box::new(self.fact(k, p - 1, q)?),
                }
            }
            Step::Symmetry => Provenance::Symmetry {
                source: Box::new(self.fact(k, q, p)?),
            },
            Step::PadP => Provenance::Padding {
                source: Box::new(self.fact(k, p - 1, q)?),
            },
            Step::PadQ => Provenance::Padding {
                source: Box::new(self.fact(k, p, q - 1)?),
            },
        };
        Some(BoundFact {
            k,
            p,
            q,
            value: cell.value.clone(),
            provenance,
        })
    }

    /// Rows `p`, columns `q`, for one `k`.
    pub fn to_text(&self, k: u32) -> String {
        let l = self.limits;
        let qs: Vec<u32> = (k..=l.q_max).collect();
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut header = vec![format!("r_{k}")];
        header.extend(qs.iter().map(|q| format!("q={q}")));
        rows.push(header);
        for p in k..=l.p_max {
            let mut row = vec![format!("p={p}")];
            row.extend(qs.iter().map(|&q| {
                self.value(k, p, q)
                    .map_or_else(|| "-".to_string(), |v| v.to_string())
            }));
            rows.push(row);
        }
        let cols = rows.first().map_or(0, Vec::len);
        let widths: Vec<usize> = (0..cols)
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (s, &w))| if i == 0 { format!("{s:<w$}") } else { format!("{s:>w$}") })
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    /// `k,p,q,value,chain` with the chain joined by `>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,p,q,value,chain\n");
        for (&(k, p, q), cell) in &self.cells {
            let chain = self
                .fact(k, p, q)
                .map(|f| f.chain().join(">"))
                .unwrap_or_default();
            let _ = writeln!(out, "{k},{p},{q},{},{chain}", cell.value);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k4_table(with_cert: bool) -> BoundTable {
        let limits = Limits {
            k_min: 4,
            k_max: 4,
            p_max: 13,
            q_max: 13,
        };
        let mut facts = seed_facts(&limits, &[]).unwrap();
        if with_cert {
            facts.push(SeedFact::assumed(4, 5, 5, 34));
        }
        compute_table(&facts, &builtin_rules(), limits)
    }

    fn v(t: &BoundTable, p: u32, q: u32) -> u64 {
        t.value(4, p, q).unwrap().try_into().unwrap()
    }

    #[test]
    fn reproduces_k4_rows() {
        let t = k4_table(true);
        assert_eq!(v(&t, 5, 6), 67);
        assert_eq!(v(&t, 6, 6), 133);
        assert_eq!(v(&t, 6, 7), 661);
        assert_eq!(v(&t, 6, 13), 50689);
        assert_eq!(v(&t, 7, 7), 3961);
        assert_eq!(v(&t, 8, 8), 194041);
    }

    #[test]
    fn r4_8_8_ends_in_factor_seven_and_replays() {
        let t = k4_table(true);
        let f = t.fact(4, 8, 8).unwrap();
        assert_eq!(f.chain()[0], "R2");
        match &f.provenance {
            Provenance::Rule { d, source, .. } => {
                assert_eq!(*d, 7);
                assert_eq!(source.value, BigUint::from(27721u32));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(f.replay(t.rules()).unwrap(), BigUint::from(194041u32));
    }

    #[test]
    fn r4_5_6_is_one_doubling_of_the_seed() {
        let t = k4_table(true);
        let f = t.fact(4, 5, 6).unwrap();
        assert_eq!(f.chain(), ["sym", "R1", "assumed"]);
        let text = derivation(&f);
        assert!(text.contains("2*(34 - 1) + 1 = 67"), "{text}");
    }

    #[test]
    fn trivial_fact_is_a_leaf() {
        let t = k4_table(false);
        let f = t.fact(4, 9, 4).unwrap();
        assert_eq!(f.provenance, Provenance::Seed(SeedKind::Trivial));
        assert_eq!(derivation(&f).lines().count(), 1);
    }

    #[test]
    fn diagonal_seed_for_k6() {
        let limits = Limits {
            k_min: 6,
            k_max: 6,
            p_max: 8,
            q_max: 8,
        };
        let facts = seed_facts(&limits, &[]).unwrap();
        let t = compute_table(&facts, &builtin_rules(), limits);
        assert_eq!(t.value(6, 7, 7), Some(&BigUint::from(7u32)));
    }

    #[test]
    fn guard_examples() {
        let rules = builtin_rules();
        let r = |id: &str| rules.iter().find(|r| r.id == id).unwrap();
        assert_eq!(r("R6").factor.eval(4, 6, 13), 6);
        assert!(!r("R2").applies(4, 6, 6));
        assert!(!r("R4").applies(9, 11, 10));
        assert!(r("R4").applies(10, 12, 11));
        // d = floor(5/3) = 1 lifts nothing
        assert!(!r("R6").applies(5, 7, 6));
    }

    #[test]
    fn saturated_table_is_stable() {
        let mut t = k4_table(true);
        let before: Vec<_> = t.cells().map(|(key, v)| (key, v.clone())).collect();
        assert!(!t.saturate());
        let after: Vec<_> = t.cells().map(|(key, v)| (key, v.clone())).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn text_and_csv_outputs() {
        let t = k4_table(true);
        let text = t.to_text(4);
        assert!(text.starts_with("r_4"));
        assert!(text.contains("194041"));
        let csv = t.to_csv();
        assert!(csv.contains("\n4,5,6,67,sym>R1>assumed\n"), "{csv}");
    }

    #[test]
    fn extension_needs_k_beyond_builtin_range() {
        assert!(extend_rules(25, 10).is_err());
    }

    #[test]
    fn off_diagonal_base_fails_for_k9() {
        let out = pasting_rule(9, LiftStyle::OffDiagonal, 1_000_000).unwrap();
        assert!(matches!(
            out,
            ExtendOutcome::Rejected {
                reason: RejectReason::Unsat,
                ..
            }
        ));
    }
}
