//! Stochastic local search with neighborhood checking.
//!
//! Each step flips the best variable (under [`SearchState::tiebreak_h`])
//! among those with positive score whose neighborhood changed since their
//! own last flip; when there is none, a uniformly random unsatisfied clause
//! is picked and its best variable flipped. A try ends at the flip cutoff
//! and the next one starts from a fresh uniform random assignment.
//!
//! Random draws happen in a fixed order so a seed replays exactly: every try
//! first draws one `bool` per variable in index order (skipping variables
//! covered by a warm start), then each random-walk step draws one clause
//! index uniformly from the unsatisfied list.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cnf::{var_of, Assignment, Cnf};

/// Which variables count as neighbors for neighborhood checking.
#[derive(Clone, Debug)]
pub enum NeighborRelation {
    /// Adjacency lists indexed by 1-based variable (entry 0 unused).
    Explicit(Vec<Vec<u32>>),
    /// Variables are `k`-subsets of a vertex set; two are neighbors when the
    /// subsets share a vertex. `vertices` holds `k` entries per variable.
    SharedEndpoint { k: usize, vertices: Vec<u32> },
}

impl NeighborRelation {
    /// Builds an explicit relation, closing it under symmetry and dropping
    /// self-loops and duplicates.
    pub fn explicit(variable_count: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); variable_count + 1];
        for (a, b) in pairs {
            assert!(a >= 1 && a <= variable_count && b >= 1 && b <= variable_count);
            if a != b {
                adj[a].push(b as u32);
                adj[b].push(a as u32);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        NeighborRelation::Explicit(adj)
    }

    /// Variables are neighbors when they occur in a common clause.
    pub fn from_clauses(cnf: &Cnf) -> Self {
        let mut pairs = Vec::new();
        for c in cnf.clauses() {
            for (i, &a) in c.iter().enumerate() {
                for &b in &c[i + 1..] {
                    pairs.push((var_of(a), var_of(b)));
                }
            }
        }
        Self::explicit(cnf.variable_count(), pairs)
    }

    pub fn variable_count(&self) -> usize {
        match self {
            NeighborRelation::Explicit(adj) => adj.len() - 1,
            NeighborRelation::SharedEndpoint { k, vertices } => vertices.len() / k,
        }
    }

    fn edge(&self, v: usize) -> &[u32] {
        match self {
            NeighborRelation::SharedEndpoint { k, vertices } => &vertices[(v - 1) * k..v * k],
            NeighborRelation::Explicit(_) => unreachable!(),
        }
    }

    pub fn are_neighbors(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        match self {
            NeighborRelation::Explicit(adj) => adj[u].binary_search(&(v as u32)).is_ok(),
            NeighborRelation::SharedEndpoint { .. } => {
                let (a, b) = (self.edge(u), self.edge(v));
                a.iter().any(|x| b.contains(x))
            }
        }
    }

    /// Neighbors of `v` in increasing order. Linear in the variable count
    /// for the implicit relation.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        match self {
            NeighborRelation::Explicit(adj) => adj[v].iter().map(|&u| u as usize).collect(),
            NeighborRelation::SharedEndpoint { .. } => (1..=self.variable_count())
                .filter(|&u| self.are_neighbors(u, v))
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
enum NcTracker {
    Flags(Vec<bool>),
    // nc(v) iff v never flipped, or some vertex of v was touched by a later flip
    Stamps { vertex_stamp: Vec<u64> },
}

/// Incrementally maintained local-search state.
pub struct SearchState<'a> {
    cnf: &'a Cnf,
    neighbors: &'a NeighborRelation,
    occ_start: Vec<usize>,
    occ: Vec<u32>,
    value: Vec<bool>,
    score: Vec<i32>,
    subscore: Vec<i32>,
    last_flip: Vec<u64>,
    step: u64,
    nc: NcTracker,
    true_count: Vec<u32>,
    unsat: Vec<u32>,
    unsat_pos: Vec<u32>,
    good: Vec<u32>,
    good_pos: Vec<u32>,
    touched: Vec<u32>,
    touched_mark: Vec<bool>,
}

const ABSENT: u32 = u32::MAX;

impl<'a> SearchState<'a> {
    pub fn new(cnf: &'a Cnf, neighbors: &'a NeighborRelation, assignment: &Assignment) -> Self {
        let n = cnf.variable_count();
        assert_eq!(neighbors.variable_count(), n, "neighbor relation size mismatch");
        let mut counts = vec![0usize; n + 2];
        for c in cnf.clauses() {
            for &l in c {
                counts[var_of(l) + 1] += 1;
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let occ_start = counts.clone();
        let mut fill = counts;
        let mut occ = vec![0u32; cnf.literal_count()];
        for (ci, c) in cnf.clauses().enumerate() {
            for &l in c {
                let v = var_of(l);
                occ[fill[v]] = ci as u32;
                fill[v] += 1;
            }
        }
        let nc = match neighbors {
            NeighborRelation::Explicit(_) => NcTracker::Flags(vec![true; n + 1]),
            NeighborRelation::SharedEndpoint { vertices, .. } => {
                let max_vertex = vertices.iter().copied().max().unwrap_or(0) as usize;
                NcTracker::Stamps {
                    vertex_stamp: vec![0; max_vertex + 1],
                }
            }
        };
        let mut state = SearchState {
            cnf,
            neighbors,
            occ_start,
            occ,
            value: vec![false; n + 1],
            score: vec![0; n + 1],
            subscore: vec![0; n + 1],
            last_flip: vec![0; n + 1],
            step: 0,
            nc,
            true_count: vec![0; cnf.clause_count()],
            unsat: Vec::new(),
            unsat_pos: vec![ABSENT; cnf.clause_count()],
            good: Vec::new(),
            good_pos: vec![ABSENT; n + 1],
            touched: Vec::new(),
            touched_mark: vec![false; n + 1],
        };
        state.reset(assignment);
        state
    }

    /// Reinitializes from `assignment`: ages 0, every nc flag true.
    pub fn reset(&mut self, assignment: &Assignment) {
        let n = self.cnf.variable_count();
        assert_eq!(assignment.len(), n);
        self.value[1..].copy_from_slice(assignment.values());
        self.score.fill(0);
        self.subscore.fill(0);
        self.last_flip.fill(0);
        self.step = 0;
        match &mut self.nc {
            NcTracker::Flags(f) => f.fill(true),
            NcTracker::Stamps { vertex_stamp } => vertex_stamp.fill(0),
        }
        self.unsat.clear();
        self.unsat_pos.fill(ABSENT);
        self.good.clear();
        self.good_pos.fill(ABSENT);
        for ci in 0..self.cnf.clause_count() {
            let tc = self
                .cnf
                .clause(ci)
                .iter()
                .filter(|&&l| self.lit_true(l))
                .count() as u32;
            self.true_count[ci] = tc;
            if tc == 0 {
                self.unsat_insert(ci);
            }
            self.apply_contribution(ci, 1);
        }
        for &u in &self.touched {
            self.touched_mark[u as usize] = false;
        }
        self.touched.clear();
        for v in 1..=n {
            if self.score[v] > 0 {
                self.good_insert(v);
            }
        }
    }

    #[inline]
    fn lit_true(&self, l: i32) -> bool {
        self.value[var_of(l)] == (l > 0)
    }

    /// Adds (`sign = 1`) or removes (`sign = -1`) clause `ci`'s share of the
    /// score and subscore of its variables under the current assignment.
    #[inline]
    fn apply_contribution(&mut self, ci: usize, sign: i32) {
        let tc = self.true_count[ci];
        if tc > 2 {
            return;
        }
        for idx in self.cnf.clause_range(ci) {
            let l = self.cnf.literals()[idx];
            let v = var_of(l);
            let is_true = self.lit_true(l);
            let (ds, dss) = match (tc, is_true) {
                (0, _) => (1, 0),
                (1, true) => (-1, 0),
                (1, false) => (0, 1),
                (2, true) => (0, -1),
                _ => (0, 0),
            };
            if ds != 0 || dss != 0 {
                self.score[v] += sign * ds;
                self.subscore[v] += sign * dss;
                if !self.touched_mark[v] {
                    self.touched_mark[v] = true;
                    self.touched.push(v as u32);
                }
            }
        }
    }

    fn unsat_insert(&mut self, ci: usize) {
        self.unsat_pos[ci] = self.unsat.len() as u32;
        self.unsat.push(ci as u32);
    }

    fn unsat_remove(&mut self, ci: usize) {
        let pos = self.unsat_pos[ci] as usize;
        let last = self.unsat.pop().unwrap();
        if last as usize != ci {
            self.unsat[pos] = last;
            self.unsat_pos[last as usize] = pos as u32;
        }
        self.unsat_pos[ci] = ABSENT;
    }

    fn good_insert(&mut self, v: usize) {
        self.good_pos[v] = self.good.len() as u32;
        self.good.push(v as u32);
    }

    fn good_remove(&mut self, v: usize) {
        let pos = self.good_pos[v] as usize;
        let last = self.good.pop().unwrap();
        if last as usize != v {
            self.good[pos] = last;
            self.good_pos[last as usize] = pos as u32;
        }
        self.good_pos[v] = ABSENT;
    }

    /// Flips `v`, updating every derived quantity incrementally.
    pub fn flip(&mut self, v: usize) {
        let (lo, hi) = (self.occ_start[v], self.occ_start[v + 1]);
        for i in lo..hi {
            let ci = self.occ[i] as usize;
            self.apply_contribution(ci, -1);
        }
        self.value[v] = !self.value[v];
        let now_true_sign = self.value[v];
        for i in lo..hi {
            let ci = self.occ[i] as usize;
            // the literal of v in ci is true now iff its sign matches
            let positive = self.cnf.clause(ci).iter().any(|&l| l == v as i32);
            let became_true = positive == now_true_sign;
            let before = self.true_count[ci];
            if became_true {
                self.true_count[ci] += 1;
                if before == 0 {
                    self.unsat_remove(ci);
                }
            } else {
                self.true_count[ci] -= 1;
                if before == 1 {
                    self.unsat_insert(ci);
                }
            }
            self.apply_contribution(ci, 1);
        }
        for i in 0..self.touched.len() {
            let u = self.touched[i] as usize;
            self.touched_mark[u] = false;
            let is_good = self.good_pos[u] != ABSENT;
            if self.score[u] > 0 && !is_good {
                self.good_insert(u);
            } else if self.score[u] <= 0 && is_good {
                self.good_remove(u);
            }
        }
        self.touched.clear();

        self.step += 1;
        self.last_flip[v] = self.step;
        match &mut self.nc {
            NcTracker::Flags(flags) => {
                flags[v] = false;
                if let NeighborRelation::Explicit(adj) = self.neighbors {
                    for &u in &adj[v] {
                        flags[u as usize] = true;
                    }
                }
            }
            NcTracker::Stamps { vertex_stamp } => {
                if let NeighborRelation::SharedEndpoint { k, vertices } = self.neighbors {
                    for &x in &vertices[(v - 1) * k..v * k] {
                        vertex_stamp[x as usize] = self.step;
                    }
                }
            }
        }
    }

    pub fn value(&self, v: usize) -> bool {
        self.value[v]
    }

    pub fn assignment(&self) -> Assignment {
        Assignment::new(self.value[1..].to_vec())
    }

    /// Change in the number of satisfied clauses if `v` were flipped.
    pub fn score(&self, v: usize) -> i32 {
        self.score[v]
    }

    /// Change in the number of clauses with at least two true literals.
    pub fn subscore(&self, v: usize) -> i32 {
        self.subscore[v]
    }

    /// Flips since the last flip of `v` (or since the reset).
    pub fn age(&self, v: usize) -> u64 {
        self.step - self.last_flip[v]
    }

    pub fn flips(&self) -> u64 {
        self.step
    }

    /// Neighborhood-checking flag of `v`.
    pub fn nc(&self, v: usize) -> bool {
        match &self.nc {
            NcTracker::Flags(f) => f[v],
            NcTracker::Stamps { vertex_stamp } => {
                let last = self.last_flip[v];
                if last == 0 {
                    return true;
                }
                match self.neighbors {
                    NeighborRelation::SharedEndpoint { k, vertices } => vertices
                        [(v - 1) * k..v * k]
                        .iter()
                        .any(|&x| vertex_stamp[x as usize] > last),
                    NeighborRelation::Explicit(_) => unreachable!(),
                }
            }
        }
    }

    pub fn true_literal_count(&self, clause: usize) -> u32 {
        self.true_count[clause]
    }

    /// Indices of the currently unsatisfied clauses (arbitrary order).
    pub fn unsat_clauses(&self) -> &[u32] {
        &self.unsat
    }

    pub fn unsat_count(&self) -> usize {
        self.unsat.len()
    }

    /// Variables with positive score (arbitrary order).
    pub fn positive_score_vars(&self) -> &[u32] {
        &self.good
    }

    /// `Less` when `a` is preferred over `b`: greater score, then smaller
    /// subscore, then greater age, then smaller index.
    fn h_cmp(&self, a: usize, b: usize) -> Ordering {
        self.score[b]
            .cmp(&self.score[a])
            .then(self.subscore[a].cmp(&self.subscore[b]))
            .then(self.last_flip[a].cmp(&self.last_flip[b]))
            .then(a.cmp(&b))
    }

    /// The tie-breaking function H over a non-empty candidate set.
    pub fn tiebreak_h(&self, candidates: impl IntoIterator<Item = usize>) -> usize {
        candidates
            .into_iter()
            .min_by(|&a, &b| self.h_cmp(a, b))
            .expect("tiebreak_h needs at least one candidate")
    }

    /// Greedy candidate: best eligible variable with positive score.
    pub fn greedy_choice(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for &v in &self.good {
            let v = v as usize;
            if !self.nc(v) {
                continue;
            }
            if best.map_or(true, |b| self.h_cmp(v, b) == Ordering::Less) {
                best = Some(v);
            }
        }
        best
    }

    /// Best variable of clause `ci` under H.
    pub fn clause_choice(&self, ci: usize) -> usize {
        self.tiebreak_h(self.cnf.clause(ci).iter().map(|&l| var_of(l)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalSearchParams {
    pub seed: u64,
    pub cutoff_flips: u64,
    /// Total number of tries, each from a fresh random assignment.
    pub max_restarts: u64,
    /// Optional fixed prefix for the first try's assignment; later
    /// variables are still drawn at random.
    pub warm_start: Option<Vec<bool>>,
}

impl LocalSearchParams {
    pub fn new(seed: u64, cutoff_flips: u64, max_restarts: u64) -> Self {
        LocalSearchParams {
            seed,
            cutoff_flips,
            max_restarts,
            warm_start: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalOutcome {
    Sat { assignment: Assignment, tries: u64, flips: u64 },
    Timeout { flips: u64 },
    /// Another worker raised the stop signal.
    Stopped { flips: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct Progress {
    pub seed: u64,
    pub try_index: u64,
    pub flips: u64,
    pub unsat: usize,
    pub best_unsat: usize,
}

/// Optional hooks for a search run.
#[derive(Default)]
pub struct SearchControl<'a> {
    pub stop: Option<&'a AtomicBool>,
    pub progress: Option<&'a (dyn Fn(Progress) + Sync)>,
    /// Report progress every this many flips (0 disables reporting).
    pub progress_every: u64,
}

pub fn solve_local_search(
    cnf: &Cnf,
    neighbors: &NeighborRelation,
    params: &LocalSearchParams,
) -> LocalOutcome {
    solve_local_search_with(cnf, neighbors, params, &SearchControl::default())
}

pub fn solve_local_search_with(
    cnf: &Cnf,
    neighbors: &NeighborRelation,
    params: &LocalSearchParams,
    control: &SearchControl<'_>,
) -> LocalOutcome {
    let n = cnf.variable_count();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut total_flips = 0u64;
    let mut state: Option<SearchState<'_>> = None;
    let stopped = || control.stop.is_some_and(|s| s.load(AtomicOrdering::Relaxed));

    for try_index in 0..params.max_restarts {
        let prefix: &[bool] = match (&params.warm_start, try_index) {
            (Some(w), 0) => &w[..w.len().min(n)],
            _ => &[],
        };
        let mut values = Vec::with_capacity(n);
        values.extend_from_slice(prefix);
        while values.len() < n {
            values.push(rng.gen::<bool>());
        }
        let init = Assignment::new(values);
        let st = match &mut state {
            Some(st) => {
                st.reset(&init);
                st
            }
            None => state.insert(SearchState::new(cnf, neighbors, &init)),
        };
        let mut best_unsat = st.unsat_count();
        for flip_no in 0..params.cutoff_flips {
            if st.unsat_count() == 0 {
                break;
            }
            if flip_no % 4096 == 0 && stopped() {
                return LocalOutcome::Stopped {
                    flips: total_flips + flip_no,
                };
            }
            let v = match st.greedy_choice() {
                Some(v) => v,
                None => {
                    let pick = rng.gen_range(0..st.unsat_count());
                    let ci = st.unsat_clauses()[pick] as usize;
                    if cnf.clause(ci).is_empty() {
                        // nothing to flip; this try can never succeed
                        break;
                    }
                    st.clause_choice(ci)
                }
            };
            st.flip(v);
            best_unsat = best_unsat.min(st.unsat_count());
            if control.progress_every > 0 && (flip_no + 1) % control.progress_every == 0 {
                if let Some(report) = control.progress {
                    report(Progress {
                        seed: params.seed,
                        try_index,
                        flips: total_flips + flip_no + 1,
                        unsat: st.unsat_count(),
                        best_unsat,
                    });
                }
            }
        }
        total_flips += st.flips();
        if st.unsat_count() == 0 {
            let assignment = st.assignment();
            assert!(
                cnf.is_satisfied_by(&assignment),
                "local search produced a non-satisfying assignment"
            );
            return LocalOutcome::Sat {
                assignment,
                tries: try_index + 1,
                flips: total_flips,
            };
        }
    }
    LocalOutcome::Timeout { flips: total_flips }
}

/// Runs one independent search per seed on the rayon pool; the first to
/// succeed stops the rest. Returns the lowest-indexed successful seed.
pub fn solve_local_search_parallel(
    cnf: &Cnf,
    neighbors: &NeighborRelation,
    params: &LocalSearchParams,
    seeds: &[u64],
    progress: Option<&(dyn Fn(Progress) + Sync)>,
    progress_every: u64,
) -> (Option<u64>, LocalOutcome) {
    use rayon::prelude::*;
    let stop = AtomicBool::new(false);
    let results: Vec<(u64, LocalOutcome)> = seeds
        .par_iter()
        .map(|&seed| {
            let p = LocalSearchParams {
                seed,
                ..params.clone()
            };
            let control = SearchControl {
                stop: Some(&stop),
                progress,
                progress_every,
            };
            let out = solve_local_search_with(cnf, neighbors, &p, &control);
            if matches!(out, LocalOutcome::Sat { .. }) {
                stop.store(true, AtomicOrdering::Relaxed);
            }
            (seed, out)
        })
        .collect();
    let mut flips = 0;
    for (seed, out) in results {
        match out {
            LocalOutcome::Sat { .. } => return (Some(seed), out),
            LocalOutcome::Timeout { flips: f } | LocalOutcome::Stopped { flips: f } => flips += f,
        }
    }
    (None, LocalOutcome::Timeout { flips })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// From-scratch score and subscore of flipping `v`.
    fn oracle_scores(cnf: &Cnf, a: &Assignment, v: usize) -> (i32, i32) {
        let count = |a: &Assignment| {
            let mut sat = 0;
            let mut sat2 = 0;
            for c in cnf.clauses() {
                let t = c.iter().filter(|&&l| a.satisfies(l)).count();
                sat += (t >= 1) as i32;
                sat2 += (t >= 2) as i32;
            }
            (sat, sat2)
        };
        let before = count(a);
        let mut b = a.clone();
        b.set(v, !b.value(v));
        let after = count(&b);
        (after.0 - before.0, after.1 - before.1)
    }

    fn random_cnf(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Cnf {
        let mut cnf = Cnf::new(n);
        for _ in 0..m {
            let len = rng.gen_range(1..=5.min(n));
            let mut vars: Vec<usize> = Vec::new();
            while vars.len() < len {
                let v = rng.gen_range(1..=n);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            let clause: Vec<i32> = vars
                .iter()
                .map(|&v| if rng.gen() { v as i32 } else { -(v as i32) })
                .collect();
            cnf.push_clause(&clause).unwrap();
        }
        cnf
    }

    fn check_against_oracle(st: &SearchState<'_>, cnf: &Cnf) {
        let a = st.assignment();
        for v in 1..=cnf.variable_count() {
            assert_eq!((st.score(v), st.subscore(v)), oracle_scores(cnf, &a, v), "var {v}");
        }
        let mut unsat: Vec<u32> = st.unsat_clauses().to_vec();
        unsat.sort_unstable();
        let expected: Vec<u32> = cnf
            .clauses()
            .enumerate()
            .filter(|(_, c)| !c.iter().any(|&l| a.satisfies(l)))
            .map(|(i, _)| i as u32)
            .collect();
        assert_eq!(unsat, expected);
        let mut good: Vec<u32> = st.positive_score_vars().to_vec();
        good.sort_unstable();
        let expected: Vec<u32> = (1..=cnf.variable_count() as u32)
            .filter(|&v| st.score(v as usize) > 0)
            .collect();
        assert_eq!(good, expected);
    }

    #[test]
    fn incremental_state_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..20 {
            let n = rng.gen_range(2..=20);
            let m = rng.gen_range(1..=60);
            let cnf = random_cnf(&mut rng, n, m);
            let nb = NeighborRelation::from_clauses(&cnf);
            let init = Assignment::new((0..n).map(|_| rng.gen()).collect());
            let mut st = SearchState::new(&cnf, &nb, &init);
            check_against_oracle(&st, &cnf);
            for _ in 0..200 {
                st.flip(rng.gen_range(1..=n));
            }
            check_against_oracle(&st, &cnf);
            let _ = round;
        }
    }

    #[test]
    fn flip_updates_nc_and_age() {
        let cnf = Cnf::from_clauses(3, [vec![1, 2], vec![2, 3]]).unwrap();
        let nb = NeighborRelation::from_clauses(&cnf);
        let mut st = SearchState::new(&cnf, &nb, &Assignment::all(3, false));
        assert!((1..=3).all(|v| st.nc(v) && st.age(v) == 0));
        st.flip(1);
        assert!(!st.nc(1));
        assert!(st.nc(2));
        assert_eq!((st.age(1), st.age(2), st.age(3)), (0, 1, 1));
        st.flip(3);
        // 1 and 3 are not neighbors, so 1 stays blocked
        assert!(!st.nc(1) && !st.nc(3) && st.nc(2));
        st.flip(2);
        assert!(st.nc(1) && st.nc(3) && !st.nc(2));
        assert_eq!((st.age(1), st.age(2), st.age(3)), (2, 0, 1));
    }

    #[test]
    fn single_clause_flip_clears_unsat() {
        let cnf = Cnf::from_clauses(2, [vec![1, 2]]).unwrap();
        let nb = NeighborRelation::from_clauses(&cnf);
        let mut st = SearchState::new(&cnf, &nb, &Assignment::all(2, false));
        assert_eq!(st.unsat_clauses(), &[0]);
        st.flip(1);
        assert!(st.unsat_clauses().is_empty());
        assert_eq!(st.true_literal_count(0), 1);
    }

    #[test]
    fn double_flip_restores_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cnf = random_cnf(&mut rng, 10, 40);
        let nb = NeighborRelation::from_clauses(&cnf);
        let init = Assignment::new((0..10).map(|_| rng.gen()).collect());
        let mut st = SearchState::new(&cnf, &nb, &init);
        for v in 1..=10 {
            let before = st.unsat_count();
            st.flip(v);
            st.flip(v);
            assert_eq!(st.unsat_count(), before);
        }
    }

    #[test]
    fn tiebreak_h_examples() {
        // two variables a=1, b=2 sharing clauses that produce the wanted scores
        let cnf = Cnf::from_clauses(2, [vec![1], vec![1, 2], vec![-2]]).unwrap();
        let nb = NeighborRelation::from_clauses(&cnf);
        let st = SearchState::new(&cnf, &nb, &Assignment::all(2, false));
        // score(1) = +2, score(2) = 1 - 1 = 0
        assert_eq!((st.score(1), st.score(2)), (2, 0));
        assert_eq!(st.tiebreak_h([1, 2]), 1);
        assert_eq!(st.tiebreak_h([2, 1]), 1);
    }

    #[test]
    fn tiebreak_h_subscore_then_age() {
        // (1 ∨ 3) and (2 ∨ 3) with everything false except x3:
        // flipping 1 or 2 gains no clause but makes one 2-satisfied
        let cnf = Cnf::from_clauses(4, [vec![1, 3], vec![2, 3], vec![2, 4], vec![-4]]).unwrap();
        let nb = NeighborRelation::from_clauses(&cnf);
        let init = Assignment::new(vec![false, false, true, false]);
        let mut st = SearchState::new(&cnf, &nb, &init);
        assert_eq!((st.score(1), st.score(2)), (0, 1));
        assert_eq!(st.tiebreak_h([1, 2]), 2);
        // equal score and subscore: greater age wins, then smaller index
        let cnf = Cnf::from_clauses(2, [vec![1], vec![2]]).unwrap();
        let nb = NeighborRelation::from_clauses(&cnf);
        st = SearchState::new(&cnf, &nb, &Assignment::all(2, true));
        assert_eq!(st.tiebreak_h([2, 1]), 1);
        st.flip(1);
        st.flip(1);
        st.flip(2);
        st.flip(2);
        // both restored; 1 was flipped longer ago
        assert_eq!((st.age(1), st.age(2)), (2, 0));
        assert_eq!(st.tiebreak_h([2, 1]), 1);
    }

    #[test]
    fn empty_clause_never_sat() {
        let cnf = Cnf::from_clauses(2, [vec![1, 2], vec![]]).unwrap();
        let nb = NeighborRelation::from_clauses(&cnf);
        let out = solve_local_search(&cnf, &nb, &LocalSearchParams::new(1, 100, 3));
        assert!(matches!(out, LocalOutcome::Timeout { .. }));
    }

    #[test]
    fn solves_easy_formula_reproducibly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // planted: all-true satisfies every clause with a positive literal
        let mut cnf = Cnf::new(30);
        for _ in 0..90 {
            let mut vars: Vec<usize> = Vec::new();
            while vars.len() < 3 {
                let v = rng.gen_range(1..=30);
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
            cnf.push_clause(&[vars[0] as i32, -(vars[1] as i32), vars[2] as i32]).unwrap();
        }
        let nb = NeighborRelation::from_clauses(&cnf);
        let params = LocalSearchParams::new(5, 10_000, 10);
        let a = solve_local_search(&cnf, &nb, &params);
        let b = solve_local_search(&cnf, &nb, &params);
        assert_eq!(a, b);
        match a {
            LocalOutcome::Sat { assignment, .. } => assert!(cnf.is_satisfied_by(&assignment)),
            other => panic!("expected SAT, got {other:?}"),
        }
    }
}
