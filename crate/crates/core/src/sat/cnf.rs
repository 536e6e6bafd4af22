use std::fmt;

use crate::error::{Error, Result};

/// A literal: a 1-based variable index, negative when negated.
pub type Lit = i32;

#[inline]
pub fn var_of(lit: Lit) -> usize {
    lit.unsigned_abs() as usize
}

/// Conjunction of clauses over variables `1..=variable_count`.
///
/// Clauses are stored back to back in one buffer; `offsets[i]..offsets[i + 1]`
/// delimits clause `i`.
#[derive(Clone, PartialEq, Eq)]
pub struct Cnf {
    variable_count: usize,
    lits: Vec<Lit>,
    offsets: Vec<usize>,
}

impl Cnf {
    pub fn new(variable_count: usize) -> Cnf {
        Cnf {
            variable_count,
            lits: Vec::new(),
            offsets: vec![0],
        }
    }

    pub fn from_clauses<C, I>(variable_count: usize, clauses: I) -> Result<Cnf>
    where
        C: AsRef<[Lit]>,
        I: IntoIterator<Item = C>,
    {
        let mut cnf = Cnf::new(variable_count);
        for c in clauses {
            cnf.push_clause(c.as_ref())?;
        }
        Ok(cnf)
    }

    /// Appends a clause, rejecting out-of-range variables, duplicate
    /// literals and tautologies.
    pub fn push_clause(&mut self, clause: &[Lit]) -> Result<()> {
        for (i, &l) in clause.iter().enumerate() {
            let v = var_of(l);
            if l == 0 || v > self.variable_count {
                return Err(Error::Validation(format!(
                    "literal {l} out of range 1..={}",
                    self.variable_count
                )));
            }
            for &m in &clause[..i] {
                if m == l {
                    return Err(Error::Validation(format!("duplicate literal {l}")));
                }
                if m == -l {
                    return Err(Error::Validation(format!("tautological clause on variable {v}")));
                }
            }
        }
        self.push_clause_unchecked(clause);
        Ok(())
    }

    pub(crate) fn push_clause_unchecked(&mut self, clause: &[Lit]) {
        self.lits.extend_from_slice(clause);
        self.offsets.push(self.lits.len());
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clause_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn literal_count(&self) -> usize {
        self.lits.len()
    }

    pub fn clause(&self, i: usize) -> &[Lit] {
        &self.lits[self.offsets[i]..self.offsets[i + 1]]
    }

    pub(crate) fn clause_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub(crate) fn literals(&self) -> &[Lit] {
        &self.lits
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = &[Lit]> + '_ {
        self.offsets.windows(2).map(move |w| &self.lits[w[0]..w[1]])
    }

    /// Per-variable list of clause indices; index 0 is unused.
    pub fn occurrences(&self) -> Vec<Vec<u32>> {
        let mut occ = vec![Vec::new(); self.variable_count + 1];
        for (ci, c) in self.clauses().enumerate() {
            for &l in c {
                occ[var_of(l)].push(ci as u32);
            }
        }
        occ
    }

    /// Index of the first clause `assignment` leaves unsatisfied.
    pub fn first_unsatisfied(&self, assignment: &Assignment) -> Option<usize> {
        self.clauses()
            .position(|c| !c.iter().any(|&l| assignment.satisfies(l)))
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        assignment.len() == self.variable_count && self.first_unsatisfied(assignment).is_none()
    }
}

impl fmt::Debug for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cnf")
            .field("variable_count", &self.variable_count)
            .field("clauses", &self.clauses().collect::<Vec<_>>())
            .finish()
    }
}

/// Total truth assignment over variables `1..=len`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment(values)
    }

    pub fn all(n: usize, value: bool) -> Assignment {
        Assignment(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value of 1-based variable `v`.
    pub fn value(&self, v: usize) -> bool {
        self.0[v - 1]
    }

    pub fn set(&mut self, v: usize, value: bool) {
        self.0[v - 1] = value;
    }

    #[inline]
    pub fn satisfies(&self, lit: Lit) -> bool {
        self.0[var_of(lit) - 1] == (lit > 0)
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn into_values(self) -> Vec<bool> {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_clauses() {
        let mut cnf = Cnf::new(2);
        assert!(cnf.push_clause(&[1, -1]).is_err());
        assert!(cnf.push_clause(&[2, 2]).is_err());
        assert!(cnf.push_clause(&[3]).is_err());
        assert!(cnf.push_clause(&[0]).is_err());
        cnf.push_clause(&[1, -2]).unwrap();
        cnf.push_clause(&[]).unwrap();
        assert_eq!(cnf.clause_count(), 2);
        assert_eq!(cnf.clause(0), &[1, -2]);
        assert!(cnf.clause(1).is_empty());
    }

    #[test]
    fn evaluation() {
        let cnf = Cnf::from_clauses(2, [vec![1, 2], vec![-1, -2]]).unwrap();
        assert!(cnf.is_satisfied_by(&Assignment::new(vec![true, false])));
        assert_eq!(cnf.first_unsatisfied(&Assignment::all(2, true)), Some(1));
        assert_eq!(cnf.first_unsatisfied(&Assignment::all(2, false)), Some(0));
    }
}
