//! Direct encoding of `r_k(p, q) > n`: one variable per hyperedge of the
//! complete `k`-graph on `n` vertices, and certificates that exhibit a
//! coloring with no red `p`-clique and no blue `q`-clique.
//!
//! Hyperedges are numbered by colexicographic rank, so the edges on the
//! first `n` vertices keep their numbers when vertices are added.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pasting::Color;
use crate::sat::{Assignment, Cnf, Lit, NeighborRelation};

/// `C(n, k)`, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Precomputed `C(a, b)` for `a <= n`, `b <= k`.
#[derive(Clone, Debug)]
struct BinomialTable {
    k: usize,
    table: Vec<u64>,
}

impl BinomialTable {
    fn new(n: usize, k: usize) -> Self {
        let mut table = vec![0u64; (n + 1) * (k + 1)];
        for a in 0..=n {
            for b in 0..=k {
                table[a * (k + 1) + b] = binomial(a as u64, b as u64);
            }
        }
        BinomialTable { k, table }
    }

    #[inline]
    fn get(&self, a: usize, b: usize) -> u64 {
        self.table[a * (self.k + 1) + b]
    }
}

/// Colexicographic rank of a strictly increasing `k`-subset of `1..=n`.
pub fn rank_edge(subset: &[u32], n: u32, k: u32) -> Result<u64> {
    if subset.len() != k as usize || k == 0 {
        return Err(Error::Validation(format!(
            "expected a {k}-subset, got {} elements",
            subset.len()
        )));
    }
    if subset[0] < 1 || subset.windows(2).any(|w| w[0] >= w[1]) || subset[subset.len() - 1] > n {
        return Err(Error::Validation(format!(
            "{subset:?} is not a strictly increasing subset of 1..={n}"
        )));
    }
    Ok(subset
        .iter()
        .enumerate()
        .map(|(i, &s)| binomial(u64::from(s - 1), i as u64 + 1))
        .sum())
}

/// Inverse of [`rank_edge`].
pub fn unrank_edge(rank: u64, n: u32, k: u32) -> Result<Vec<u32>> {
    if rank >= binomial(u64::from(n), u64::from(k)) {
        return Err(Error::Validation(format!("rank {rank} out of range for C({n},{k})")));
    }
    let mut out = vec![0u32; k as usize];
    let mut r = rank;
    let mut hi = n;
    for i in (1..=k).rev() {
        // largest c < hi with C(c, i) <= r
        let mut c = hi - 1;
        while binomial(u64::from(c), u64::from(i)) > r {
            c -= 1;
        }
        r -= binomial(u64::from(c), u64::from(i));
        out[(i - 1) as usize] = c + 1;
        hi = c;
    }
    Ok(out)
}

/// Advances `c` (0-based, strictly increasing) to its colex successor
/// among subsets of `0..n`. Returns false after the last subset.
fn next_colex(c: &mut [u32], n: u32) -> bool {
    let m = c.len();
    for i in 0..m {
        let limit = if i + 1 < m { c[i + 1] } else { n };
        if c[i] + 1 < limit {
            c[i] += 1;
            for (j, x) in c.iter_mut().take(i).enumerate() {
                *x = j as u32;
            }
            return true;
        }
    }
    false
}

/// A red/blue coloring of every `k`-subset of `n` vertices, one bit per
/// edge in colex rank order (set = blue).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeColoring {
    n: u32,
    k: u32,
    len: u64,
    words: Vec<u64>,
}

impl EdgeColoring {
    pub fn new(n: u32, k: u32, color: Color) -> Result<EdgeColoring> {
        if k == 0 || n < k {
            return Err(Error::Parameter(format!("need 1 <= k <= n (got n={n}, k={k})")));
        }
        let len = binomial(u64::from(n), u64::from(k));
        let fill = if color == Color::Blue { u64::MAX } else { 0 };
        let mut c = EdgeColoring {
            n,
            k,
            len,
            words: vec![fill; len.div_ceil(64) as usize],
        };
        c.clear_tail();
        Ok(c)
    }

    pub fn from_bits(n: u32, k: u32, bits: &[bool]) -> Result<EdgeColoring> {
        let mut c = EdgeColoring::new(n, k, Color::Red)?;
        if bits.len() as u64 != c.len {
            return Err(Error::Validation(format!(
                "expected C({n},{k}) = {} bits, got {}",
                c.len,
                bits.len()
            )));
        }
        for (i, &b) in bits.iter().enumerate() {
            if b {
                c.words[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(c)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of hyperedges, `C(n, k)`.
    pub fn edge_count(&self) -> u64 {
        self.len
    }

    #[inline]
    pub fn is_blue(&self, rank: u64) -> bool {
        (self.words[(rank / 64) as usize] >> (rank % 64)) & 1 == 1
    }

    pub fn color(&self, rank: u64) -> Color {
        if self.is_blue(rank) {
            Color::Blue
        } else {
            Color::Red
        }
    }

    pub fn set(&mut self, rank: u64, color: Color) {
        let (w, b) = ((rank / 64) as usize, rank % 64);
        match color {
            Color::Blue => self.words[w] |= 1 << b,
            Color::Red => self.words[w] &= !(1 << b),
        }
    }

    /// Color of the edge on the given 1-based vertices.
    pub fn color_of(&self, subset: &[u32]) -> Result<Color> {
        Ok(self.color(rank_edge(subset, self.n, self.k)?))
    }

    /// Red and blue exchanged.
    pub fn swapped(&self) -> EdgeColoring {
        let mut c = self.clone();
        for w in &mut c.words {
            *w = !*w;
        }
        c.clear_tail();
        c
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.len).map(|r| self.is_blue(r)).collect()
    }

    pub fn bitstring(&self) -> String {
        (0..self.len)
            .map(|r| if self.is_blue(r) { '1' } else { '0' })
            .collect()
    }

    /// Variable assignment for the direct CNF (blue = true).
    pub fn to_assignment(&self) -> Assignment {
        Assignment::new(self.bits())
    }
}

/// Blue edges become true variables.
pub fn coloring_from_assignment(assignment: &Assignment, n: u32, k: u32) -> Result<EdgeColoring> {
    EdgeColoring::from_bits(n, k, assignment.values())
}

/// A coloring with the clique sizes it claims to avoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub coloring: EdgeColoring,
    pub p: u32,
    pub q: u32,
}

impl Certificate {
    /// Two lines: `ramsey-cert n=<n> k=<k> p=<p> q=<q>` and the bitstring.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "ramsey-cert n={} k={} p={} q={}",
            self.coloring.n, self.coloring.k, self.p, self.q
        );
        out.push_str(&self.coloring.bitstring());
        out.push('\n');
        out
    }

    pub fn parse(text: &str) -> Result<Certificate> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse(1, "empty certificate"))?;
        let bad = || Error::parse(1, "expected `ramsey-cert n=<n> k=<k> p=<p> q=<q>`");
        let fields: Vec<&str> = header.split(' ').collect();
        if fields.len() != 5 || fields[0] != "ramsey-cert" {
            return Err(bad());
        }
        let mut vals = [0u32; 4];
        for (slot, (field, key)) in vals.iter_mut().zip(fields[1..].iter().zip(["n=", "k=", "p=", "q="])) {
            *slot = field
                .strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(bad)?;
        }
        let [n, k, p, q] = vals;
        if k == 0 || n < k || p < k || q < k {
            return Err(Error::parse(1, "need 1 <= k <= n and p, q >= k"));
        }
        let body = lines.next().ok_or_else(|| Error::parse(2, "missing bitstring"))?;
        let bits = body
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(2, format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        let coloring = EdgeColoring::from_bits(n, k, &bits).map_err(|e| Error::parse(2, e))?;
        if let Some(extra) = lines.next() {
            if !extra.is_empty() || lines.next().is_some() {
                return Err(Error::parse(3, "trailing content"));
            }
        }
        Ok(Certificate { coloring, p, q })
    }
}

/// Direct CNF for `r_k(k+1, k+1) > n`: per `(k+1)`-subset, a clause of its
/// `k+1` edges positive and one negative. Variable `i` is the edge of colex
/// rank `i - 1`. The neighbor relation links edges sharing a vertex.
pub fn build_direct_cnf(n: u32, k: u32) -> Result<(Cnf, NeighborRelation)> {
    if k == 0 || n <= k {
        return Err(Error::Parameter(format!("direct encoding needs n > k >= 1 (got n={n}, k={k})")));
    }
    let edges = binomial(u64::from(n), u64::from(k));
    if edges > i32::MAX as u64 {
        return Err(Error::Parameter(format!("C({n},{k}) = {edges} variables is too many")));
    }
    let table = BinomialTable::new(n as usize, k as usize + 1);
    let m = (k + 1) as usize;
    let mut cnf = Cnf::new(edges as usize);
    let mut c: Vec<u32> = (0..m as u32).collect();
    let mut pos: Vec<Lit> = vec![0; m];
    loop {
        // dropping element `skip` leaves a k-subset whose colex rank is the
        // sum of C(c_j, index-after-removal)
        for skip in 0..m {
            let mut r = 0u64;
            let mut idx = 1;
            for (j, &x) in c.iter().enumerate() {
                if j == skip {
                    continue;
                }
                r += table.get(x as usize, idx);
                idx += 1;
            }
            pos[m - 1 - skip] = r as Lit + 1;
        }
        cnf.push_clause_unchecked(&pos);
        let neg: Vec<Lit> = pos.iter().map(|l| -l).collect();
        cnf.push_clause_unchecked(&neg);
        if !next_colex(&mut c, n) {
            break;
        }
    }
    let mut vertices = Vec::with_capacity((edges * u64::from(k)) as usize);
    let mut e: Vec<u32> = (0..k).collect();
    loop {
        vertices.extend(e.iter().map(|x| x + 1));
        if !next_colex(&mut e, n) {
            break;
        }
    }
    Ok((
        cnf,
        NeighborRelation::SharedEndpoint {
            k: k as usize,
            vertices,
        },
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliqueVerdict {
    Valid,
    /// `clique` (1-based, increasing) has every edge colored `color`.
    Invalid { clique: Vec<u32>, color: Color },
}

impl CliqueVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, CliqueVerdict::Valid)
    }
}

/// Depth-first clique search over increasing vertex sequences. A branch is
/// abandoned once neither color can still close a monochromatic clique.
struct CliqueSearch<'a> {
    coloring: &'a EdgeColoring,
    table: BinomialTable,
    p: usize,
    q: usize,
    k: usize,
    n: u32,
}

impl CliqueSearch<'_> {
    /// Colex rank of the k-subset of `chosen[..]` made of the newest vertex
    /// and the positions in `combo` (all earlier, increasing).
    fn rank_with_last(&self, chosen: &[u32], combo: &[usize], last: u32) -> u64 {
        let mut r = 0;
        for (i, &ci) in combo.iter().enumerate() {
            r += self.table.get(chosen[ci] as usize, i + 1);
        }
        r + self.table.get(last as usize, self.k)
    }

    /// Whether all new edges through `last` (with k-1 earlier vertices) have
    /// color `blue`. Returns (all_red, all_blue) restricted to the flags asked.
    fn new_edges_mono(&self, chosen: &[u32], last: u32, want_red: bool, want_blue: bool) -> (bool, bool) {
        let mut red = want_red;
        let mut blue = want_blue;
        let j = chosen.len();
        let need = self.k - 1;
        let mut combo: Vec<usize> = (0..need).collect();
        loop {
            let blue_edge = self.coloring.is_blue(self.rank_with_last(chosen, &combo, last));
            if blue_edge {
                red = false;
            } else {
                blue = false;
            }
            if !red && !blue {
                return (false, false);
            }
            // next combination of `need` positions out of `j`
            let mut i = need;
            loop {
                if i == 0 {
                    return (red, blue);
                }
                i -= 1;
                if combo[i] < j - need + i {
                    combo[i] += 1;
                    for t in i + 1..need {
                        combo[t] = combo[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Extends `chosen` (0-based vertices) with vertices above its last.
    /// `visited` counts enumerated cliques at the deepest level.
    fn search(
        &self,
        chosen: &mut Vec<u32>,
        red: bool,
        blue: bool,
        prune: bool,
        found: &mut Option<(Vec<u32>, Color)>,
        visited: &mut u64,
    ) -> bool {
        let depth = chosen.len();
        let start = chosen.last().map_or(0, |&x| x + 1);
        let max_depth = self.p.max(self.q);
        for v in start..self.n {
            // not enough vertices left to reach the smaller target
            if (self.n - v) as usize + depth < self.p.min(self.q) {
                break;
            }
            let (r, b) = if depth + 1 >= self.k {
                let want_red = red && depth < self.p;
                let want_blue = blue && depth < self.q;
                if prune {
                    self.new_edges_mono(chosen, v, want_red, want_blue)
                } else {
                    let (r, b) = self.new_edges_mono(chosen, v, true, true);
                    (r && want_red, b && want_blue)
                }
            } else {
                (red, blue)
            };
            let new_depth = depth + 1;
            if r && new_depth == self.p {
                let mut clique = chosen.clone();
                clique.push(v);
                *found = Some((clique, Color::Red));
                if prune {
                    return true;
                }
            }
            if b && new_depth == self.q {
                let mut clique = chosen.clone();
                clique.push(v);
                *found = Some((clique, Color::Blue));
                if prune {
                    return true;
                }
            }
            if new_depth == max_depth {
                *visited += 1;
                continue;
            }
            let red_open = r && new_depth < self.p;
            let blue_open = b && new_depth < self.q;
            if prune && !red_open && !blue_open {
                continue;
            }
            chosen.push(v);
            let stop = self.search(chosen, red_open || !prune, blue_open || !prune, prune, found, visited);
            chosen.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

fn clique_is_mono(coloring: &EdgeColoring, clique: &[u32], color: Color) -> bool {
    let k = coloring.k() as usize;
    let mut c: Vec<u32> = (0..k as u32).collect();
    loop {
        let edge: Vec<u32> = c.iter().map(|&i| clique[i as usize]).collect();
        if coloring.color_of(&edge).ok() != Some(color) {
            return false;
        }
        if !next_colex(&mut c, clique.len() as u32) {
            return true;
        }
    }
}

/// Checks that no `p`-subset is all red and no `q`-subset all blue.
///
/// The search fans out over the smallest clique vertex on the rayon pool;
/// the reported witness is the one with the smallest first vertex.
pub fn verify_certificate(coloring: &EdgeColoring, p: u32, q: u32) -> CliqueVerdict {
    let k = coloring.k();
    assert!(p >= k && q >= k, "clique sizes must be at least k");
    let search = CliqueSearch {
        coloring,
        table: BinomialTable::new(coloring.n() as usize, k as usize),
        p: p as usize,
        q: q as usize,
        k: k as usize,
        n: coloring.n(),
    };
    let witness = (0..coloring.n()).into_par_iter().find_map_first(|first| {
        let mut found = None;
        let mut visited = 0;
        let mut chosen = Vec::with_capacity(p.max(q) as usize);
        chosen.push(first);
        search.search(&mut chosen, true, true, true, &mut found, &mut visited);
        found
    });
    match witness {
        None => CliqueVerdict::Valid,
        Some((clique, color)) => {
            let clique: Vec<u32> = clique.into_iter().map(|v| v + 1).collect();
            assert!(
                clique_is_mono(coloring, &clique, color),
                "clique search reported a non-monochromatic witness"
            );
            CliqueVerdict::Invalid { clique, color }
        }
    }
}

/// Walks every `max(p, q)`-subset without pruning and counts them. The
/// cost is an upper bound on what [`verify_certificate`] can spend.
pub fn exhaustive_clique_scan(coloring: &EdgeColoring, p: u32, q: u32) -> u64 {
    let k = coloring.k();
    assert!(p >= k && q >= k && p.max(q) >= 2);
    let search = CliqueSearch {
        coloring,
        table: BinomialTable::new(coloring.n() as usize, k as usize),
        p: p as usize,
        q: q as usize,
        k: k as usize,
        n: coloring.n(),
    };
    let total = AtomicU64::new(0);
    (0..coloring.n()).into_par_iter().for_each(|first| {
        let mut found = None;
        let mut visited = 0;
        let mut chosen = vec![first];
        search.search(&mut chosen, true, true, false, &mut found, &mut visited);
        total.fetch_add(visited, Ordering::Relaxed);
    });
    total.into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank_edge(&[1, 2, 3], 5, 3).unwrap(), 0);
        assert_eq!(rank_edge(&[1, 2, 4], 5, 3).unwrap(), 1);
        assert_eq!(rank_edge(&[3, 4, 5], 5, 3).unwrap(), binomial(5, 3) - 1);
        assert!(rank_edge(&[2, 1, 3], 5, 3).is_err());
        assert!(rank_edge(&[1, 2, 6], 5, 3).is_err());
        assert!(rank_edge(&[0, 2, 3], 5, 3).is_err());
        assert!(rank_edge(&[1, 2], 5, 3).is_err());
    }

    #[test]
    fn colex_ranks_follow_enumeration_order() {
        // oracle: sort all subsets by reversed element sequence
        for n in 1..=7u32 {
            for k in 1..=n {
                let mut all: Vec<Vec<u32>> = Vec::new();
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() == k {
                        all.push((1..=n).filter(|&i| mask & (1 << (i - 1)) != 0).collect());
                    }
                }
                all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
                for (r, s) in all.iter().enumerate() {
                    assert_eq!(rank_edge(s, n, k).unwrap(), r as u64);
                    assert_eq!(&unrank_edge(r as u64, n, k).unwrap(), s);
                }
            }
        }
    }

    #[test]
    fn direct_cnf_shape() {
        let (cnf, nb) = build_direct_cnf(12, 3).unwrap();
        assert_eq!(cnf.variable_count(), 220);
        assert_eq!(cnf.clause_count(), 990);
        assert!(cnf.clauses().all(|c| c.len() == 4));
        assert_eq!(nb.variable_count(), 220);
        assert!(build_direct_cnf(3, 3).is_err());
        // clause pair for the first (k+1)-subset {1,2,3,4}
        assert_eq!(cnf.clause(0), &[1, 2, 3, 4]);
        assert_eq!(cnf.clause(1), &[-1, -2, -3, -4]);
    }

    #[test]
    fn all_blue_is_invalid() {
        let c = EdgeColoring::new(4, 3, Color::Blue).unwrap();
        assert_eq!(
            verify_certificate(&c, 4, 4),
            CliqueVerdict::Invalid {
                clique: vec![1, 2, 3, 4],
                color: Color::Blue
            }
        );
        let a = Assignment::all(4, true);
        let c = coloring_from_assignment(&a, 4, 3).unwrap();
        assert!(!verify_certificate(&c, 4, 4).is_valid());
        assert!(coloring_from_assignment(&Assignment::all(3, true), 4, 3).is_err());
    }

    #[test]
    fn graph_case_matches_r33() {
        // pentagon / pentagram coloring of K5 has no monochromatic triangle
        let mut c = EdgeColoring::new(5, 2, Color::Red).unwrap();
        for i in 1..=5u32 {
            let j = i % 5 + 1;
            let (a, b) = (i.min(j), i.max(j));
            c.set(rank_edge(&[a, b], 5, 2).unwrap(), Color::Blue);
        }
        assert!(verify_certificate(&c, 3, 3).is_valid());
        assert!(verify_certificate(&c.swapped(), 3, 3).is_valid());
        assert_eq!(exhaustive_clique_scan(&c, 3, 3), 10);
    }

    #[test]
    fn asymmetric_clique_sizes() {
        // all-red K_4^(2): red triangle exists, no blue edge at all
        let c = EdgeColoring::new(4, 2, Color::Red).unwrap();
        assert_eq!(
            verify_certificate(&c, 3, 2),
            CliqueVerdict::Invalid {
                clique: vec![1, 2, 3],
                color: Color::Red
            }
        );
        assert!(verify_certificate(&c, 5, 2).is_valid());
    }

    #[test]
    fn certificate_text_round_trip() {
        let mut c = EdgeColoring::new(5, 3, Color::Red).unwrap();
        c.set(3, Color::Blue);
        let cert = Certificate {
            coloring: c,
            p: 4,
            q: 4,
        };
        let text = cert.to_text();
        assert_eq!(text, "ramsey-cert n=5 k=3 p=4 q=4\n0001000000\n");
        assert_eq!(Certificate::parse(&text).unwrap(), cert);
        assert!(Certificate::parse("ramsey-cert n=5 k=3 p=4 q=4\n000100000\n").is_err());
        assert!(Certificate::parse("ramsey-cert n=5 k=3 p=4\n0001000000\n").is_err());
        assert!(Certificate::parse("ramsey-cert n=5 k=3 p=4 q=4\n00010000x0\n").is_err());
    }
}
