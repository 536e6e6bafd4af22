//! Primal cardinality vectors.
//!
//! A [`Pcv`] records how a vertex subset meets the blocks of a disjoint
//! union `V_1 ∪ … ∪ V_d`: the positive intersection sizes, sorted
//! non-increasingly. Colorings that treat every block symmetrically only
//! depend on this vector, so pasting arguments can be carried out on the
//! (small) families of vectors instead of the (huge) pasted hypergraph.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Non-increasing sequence of positive block intersection sizes.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pcv(Vec<u32>);

impl Pcv {
    /// Builds a vector from raw per-block counts, dropping zeros and sorting.
    pub fn from_counts(counts: &[u32]) -> Result<Pcv> {
        let mut parts: Vec<u32> = counts.iter().copied().filter(|&c| c > 0).collect();
        if parts.is_empty() {
            return Err(Error::DegenerateSubset);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Pcv(parts))
    }

    /// Wraps `parts` after checking they already form a valid vector.
    pub fn new(parts: Vec<u32>) -> Result<Pcv> {
        if parts.is_empty() {
            return Err(Error::DegenerateSubset);
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::Validation(format!("zero part in {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Validation(format!("parts not non-increasing: {parts:?}")));
        }
        Ok(Pcv(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of blocks met (π in the usual notation).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn largest(&self) -> u32 {
        self.0[0]
    }

    /// Meets at least two blocks.
    pub fn is_crossing(&self) -> bool {
        self.0.len() >= 2
    }

    /// `other ≤_c self`: `other` is no longer than `self` and dominated
    /// coordinatewise on its own length.
    pub fn contains(&self, other: &Pcv) -> bool {
        other.0.len() <= self.0.len() && other.0.iter().zip(&self.0).all(|(b, a)| b <= a)
    }

    /// Decreasing lexicographic order used for every enumeration.
    pub fn canonical_cmp(&self, other: &Pcv) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl fmt::Display for Pcv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Pcv {
    type Err = Error;

    fn from_str(s: &str) -> Result<Pcv> {
        let inner = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Validation(format!("pcv must be parenthesised: {s:?}")))?;
        let parts = inner
            .split(',')
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| Error::Validation(format!("bad part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let pcv = Pcv::new(parts)?;
        // Only the exact canonical spelling round-trips.
        if pcv.to_string() != s {
            return Err(Error::Validation(format!("non-canonical pcv text {s:?}")));
        }
        Ok(pcv)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum FamilyKind {
    /// All partitions of `s` into at most `d` parts.
    Vk,
    /// Largest part at most `s - 2`.
    Pp,
    /// Largest part at most `s - 1`.
    Qq,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FamilyKind::Vk => "V",
            FamilyKind::Pp => "P",
            FamilyKind::Qq => "Q",
        })
    }
}

/// One of the vector families `V_s(d)`, `P_s(d)`, `Q_s(d)`, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcvFamily {
    pub kind: FamilyKind,
    pub s: u32,
    pub d: u32,
    pub members: Vec<Pcv>,
}

impl PcvFamily {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Pcv> {
        self.members.iter()
    }
}

/// Partitions of `s` into at most `d` parts, each at most `max_part`,
/// in decreasing lexicographic order.
fn partitions(s: u32, d: u32, max_part: u32) -> Vec<Pcv> {
    fn rec(rest: u32, slots: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Pcv>) {
        if rest == 0 {
            out.push(Pcv(cur.clone()));
            return;
        }
        if slots == 0 {
            return;
        }
        let hi = rest.min(cap);
        // the remaining slots must be able to absorb what is left
        let lo = rest.div_ceil(slots).max(1);
        for part in (lo..=hi).rev() {
            cur.push(part);
            rec(rest - part, slots - 1, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if s == 0 || d == 0 {
        return out;
    }
    rec(s, d, max_part, &mut Vec::with_capacity(d as usize), &mut out);
    out
}

pub fn enum_vk(s: u32, d: u32) -> PcvFamily {
    PcvFamily {
        kind: FamilyKind::Vk,
        s,
        d,
        members: partitions(s, d, s),
    }
}

/// `P_p(d)`: partitions of `p` with at most `d` parts and largest part at most `p - 2`.
pub fn enum_pp(p: u32, d: u32) -> PcvFamily {
    PcvFamily {
        kind: FamilyKind::Pp,
        s: p,
        d,
        members: partitions(p, d, p.saturating_sub(2)),
    }
}

/// `Q_q(d)`: partitions of `q` with at most `d` parts, excluding `(q)`.
pub fn enum_qq(q: u32, d: u32) -> PcvFamily {
    PcvFamily {
        kind: FamilyKind::Qq,
        s: q,
        d,
        members: partitions(q, d, q.saturating_sub(1)),
    }
}
