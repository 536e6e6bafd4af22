//! Complete backtracking search: unit propagation, branching on the most
//! constrained variable, chronological backtracking. Used for pasting
//! CNFs, which stay small enough that exhaustive search can certify UNSAT.

use super::cnf::{var_of, Assignment, Cnf, Lit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompleteOutcome {
    Sat(Assignment),
    Unsat,
    /// Carries the number of search nodes explored before giving up.
    BudgetExceeded { nodes: u64 },
}

impl CompleteOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, CompleteOutcome::Sat(_))
    }
}

struct Decision {
    trail_len: usize,
    lit: Lit,
    flipped: bool,
}

struct Dpll<'a> {
    cnf: &'a Cnf,
    occ_pos: Vec<Vec<u32>>,
    occ_neg: Vec<Vec<u32>>,
    // +1 true, -1 false, 0 unassigned
    value: Vec<i8>,
    // per clause, over processed trail entries only
    sat: Vec<u32>,
    free: Vec<u32>,
    trail: Vec<Lit>,
    qhead: usize,
    decisions: Vec<Decision>,
    mark: Vec<u32>,
    pos_count: Vec<u32>,
    neg_count: Vec<u32>,
}

impl<'a> Dpll<'a> {
    fn new(cnf: &'a Cnf) -> Self {
        let n = cnf.variable_count();
        let mut occ_pos = vec![Vec::new(); n + 1];
        let mut occ_neg = vec![Vec::new(); n + 1];
        let mut free = Vec::with_capacity(cnf.clause_count());
        for (ci, c) in cnf.clauses().enumerate() {
            for &l in c {
                if l > 0 {
                    occ_pos[var_of(l)].push(ci as u32);
                } else {
                    occ_neg[var_of(l)].push(ci as u32);
                }
            }
            free.push(c.len() as u32);
        }
        Dpll {
            cnf,
            occ_pos,
            occ_neg,
            value: vec![0; n + 1],
            sat: vec![0; cnf.clause_count()],
            free,
            trail: Vec::with_capacity(n),
            qhead: 0,
            decisions: Vec::new(),
            mark: vec![0; n + 1],
            pos_count: vec![0; n + 1],
            neg_count: vec![0; n + 1],
        }
    }

    #[inline]
    fn lit_value(&self, l: Lit) -> i8 {
        let v = self.value[var_of(l)];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    /// Returns false when `l` is already false.
    fn enqueue(&mut self, l: Lit) -> bool {
        match self.lit_value(l) {
            1 => true,
            -1 => false,
            _ => {
                self.value[var_of(l)] = if l > 0 { 1 } else { -1 };
                self.trail.push(l);
                true
            }
        }
    }

    /// Scans a clause with no processed true literal and at most one
    /// unprocessed literal. Returns false on conflict.
    fn inspect(&mut self, ci: usize) -> bool {
        let mut unassigned = None;
        for &l in self.cnf.clause(ci) {
            match self.lit_value(l) {
                1 => return true,
                0 => unassigned = Some(l),
                _ => {}
            }
        }
        match unassigned {
            Some(l) => self.enqueue(l),
            None => false,
        }
    }

    fn propagate(&mut self) -> bool {
        let mut ok = true;
        while self.qhead < self.trail.len() {
            let l = self.trail[self.qhead];
            self.qhead += 1;
            let v = var_of(l);
            let (sat_occ, unsat_occ) = if l > 0 {
                (std::mem::take(&mut self.occ_pos[v]), std::mem::take(&mut self.occ_neg[v]))
            } else {
                (std::mem::take(&mut self.occ_neg[v]), std::mem::take(&mut self.occ_pos[v]))
            };
            for &ci in &sat_occ {
                let ci = ci as usize;
                self.sat[ci] += 1;
                self.free[ci] -= 1;
            }
            // counts are always updated in full so that undo stays symmetric
            for &ci in &unsat_occ {
                let ci = ci as usize;
                self.free[ci] -= 1;
                if ok && self.sat[ci] == 0 && self.free[ci] <= 1 && !self.inspect(ci) {
                    ok = false;
                }
            }
            if l > 0 {
                self.occ_pos[v] = sat_occ;
                self.occ_neg[v] = unsat_occ;
            } else {
                self.occ_neg[v] = sat_occ;
                self.occ_pos[v] = unsat_occ;
            }
            if !ok {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let pos = self.trail.len() - 1;
            let l = self.trail.pop().unwrap();
            let v = var_of(l);
            if pos < self.qhead {
                let (sat_occ, unsat_occ) = if l > 0 {
                    (&self.occ_pos[v], &self.occ_neg[v])
                } else {
                    (&self.occ_neg[v], &self.occ_pos[v])
                };
                for &ci in sat_occ {
                    self.sat[ci as usize] -= 1;
                    self.free[ci as usize] += 1;
                }
                for &ci in unsat_occ {
                    self.free[ci as usize] += 1;
                }
            }
            self.value[v] = 0;
        }
        self.qhead = self.qhead.min(len);
    }

    /// Most constrained variable: most occurrences among the shortest open
    /// clauses, polarity by majority there. Ties go to the lower index.
    fn pick_branch(&mut self) -> Option<Lit> {
        let mut min_free = u32::MAX;
        for ci in 0..self.sat.len() {
            if self.sat[ci] == 0 && self.free[ci] < min_free {
                min_free = self.free[ci];
            }
        }
        if min_free == u32::MAX {
            return None;
        }
        let mut touched = Vec::new();
        for ci in 0..self.sat.len() {
            if self.sat[ci] != 0 || self.free[ci] != min_free {
                continue;
            }
            for &l in self.cnf.clause(ci) {
                let v = var_of(l);
                if self.value[v] != 0 {
                    continue;
                }
                if self.mark[v] == 0 {
                    touched.push(v);
                }
                self.mark[v] += 1;
                if l > 0 {
                    self.pos_count[v] += 1;
                } else {
                    self.neg_count[v] += 1;
                }
            }
        }
        let mut best: Option<(u32, usize)> = None;
        for &v in &touched {
            let c = self.mark[v];
            if best.map_or(true, |(bc, bv)| c > bc || (c == bc && v < bv)) {
                best = Some((c, v));
            }
        }
        let (_, v) = best?;
        let lit = if self.pos_count[v] >= self.neg_count[v] {
            v as Lit
        } else {
            -(v as Lit)
        };
        for &t in &touched {
            self.mark[t] = 0;
            self.pos_count[t] = 0;
            self.neg_count[t] = 0;
        }
        Some(lit)
    }

    /// Backtracks to the most recent decision with an untried branch.
    fn backtrack(&mut self) -> bool {
        while let Some(top) = self.decisions.last_mut() {
            if top.flipped {
                let len = top.trail_len;
                self.decisions.pop();
                self.undo_to(len);
                continue;
            }
            top.flipped = true;
            let len = top.trail_len;
            let lit = -top.lit;
            self.undo_to(len);
            self.enqueue(lit);
            return true;
        }
        false
    }

    fn run(&mut self, budget: u64) -> CompleteOutcome {
        for ci in 0..self.cnf.clause_count() {
            let c = self.cnf.clause(ci);
            if c.is_empty() {
                return CompleteOutcome::Unsat;
            }
            if c.len() == 1 && !self.enqueue(c[0]) {
                return CompleteOutcome::Unsat;
            }
        }
        let mut nodes: u64 = 0;
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    return CompleteOutcome::Unsat;
                }
                nodes += 1;
                if nodes > budget {
                    return CompleteOutcome::BudgetExceeded { nodes };
                }
                continue;
            }
            match self.pick_branch() {
                None => {
                    let values = (1..=self.cnf.variable_count())
                        .map(|v| self.value[v] > 0)
                        .collect();
                    return CompleteOutcome::Sat(Assignment::new(values));
                }
                Some(lit) => {
                    nodes += 1;
                    if nodes > budget {
                        return CompleteOutcome::BudgetExceeded { nodes };
                    }
                    self.decisions.push(Decision {
                        trail_len: self.trail.len(),
                        lit,
                        flipped: false,
                    });
                    self.enqueue(lit);
                }
            }
        }
    }
}

/// Decides `cnf` exhaustively, giving up after `budget` search nodes
/// (decisions plus backtrack flips). Deterministic for a fixed input.
pub fn solve_complete(cnf: &Cnf, budget: u64) -> CompleteOutcome {
    let outcome = Dpll::new(cnf).run(budget);
    if let CompleteOutcome::Sat(a) = &outcome {
        assert!(
            cnf.is_satisfied_by(a),
            "complete solver produced a non-satisfying assignment"
        );
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: usize, clauses: &[&[Lit]]) -> Cnf {
        Cnf::from_clauses(n, clauses.iter().copied()).unwrap()
    }

    #[test]
    fn empty_cnf_is_sat() {
        assert_eq!(
            solve_complete(&Cnf::new(0), 10),
            CompleteOutcome::Sat(Assignment::default())
        );
    }

    #[test]
    fn empty_clause_is_unsat() {
        assert_eq!(solve_complete(&cnf(1, &[&[1], &[]]), 10), CompleteOutcome::Unsat);
    }

    #[test]
    fn small_unsat() {
        let f = cnf(2, &[&[1, 2], &[-1, 2], &[1, -2], &[-1, -2]]);
        assert_eq!(solve_complete(&f, 100), CompleteOutcome::Unsat);
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // p(i,h) = 2*i + h + 1
        let p = |i: i32, h: i32| 2 * i + h + 1;
        let mut clauses: Vec<Vec<Lit>> = (0..3).map(|i| vec![p(i, 0), p(i, 1)]).collect();
        for h in 0..2 {
            for i in 0..3 {
                for j in i + 1..3 {
                    clauses.push(vec![-p(i, h), -p(j, h)]);
                }
            }
        }
        let f = Cnf::from_clauses(6, clauses).unwrap();
        assert_eq!(solve_complete(&f, 1000), CompleteOutcome::Unsat);
    }

    #[test]
    fn budget_is_reported() {
        let p = |i: i32, h: i32| 4 * i + h + 1;
        let mut clauses: Vec<Vec<Lit>> = (0..5).map(|i| (0..4).map(|h| p(i, h)).collect()).collect();
        for h in 0..4 {
            for i in 0..5 {
                for j in i + 1..5 {
                    clauses.push(vec![-p(i, h), -p(j, h)]);
                }
            }
        }
        let f = Cnf::from_clauses(20, clauses).unwrap();
        assert!(matches!(
            solve_complete(&f, 3),
            CompleteOutcome::BudgetExceeded { nodes: 4 }
        ));
    }

    #[test]
    fn finds_model() {
        let f = cnf(3, &[&[1, 2], &[-1, 3], &[-2, -3], &[2, 3]]);
        match solve_complete(&f, 100) {
            CompleteOutcome::Sat(a) => assert!(f.is_satisfied_by(&a)),
            other => panic!("expected SAT, got {other:?}"),
        }
    }
}
