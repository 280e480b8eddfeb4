//! Hirzebruch–Jung resolution strings of cyclic quotient singularities and
//! blow-up / blow-down surgery on chains of rational curves.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exactnum::{cf_eval, mod_inverse_u64, ExactError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HjError {
    #[error("invalid group 1/{p}(1,{q}): need p >= 2, 1 <= q < p and gcd(p, q) = 1")]
    InvalidGroup { p: u64, q: u64 },
    #[error("group order does not fit in 64 bits")]
    OrderTooLarge,
    #[error("a resolution chain needs at least one curve")]
    EmptyChain,
    #[error("chain entries must be >= 1, got {0}")]
    NonPositiveEntry(u64),
    #[error("chain {0} is not minimal (contains an entry <= 1)")]
    NonMinimalChain(ResolutionChain),
    #[error("index {index} out of range for a chain of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("curve {index} is not a chain end on the requested side")]
    NotChainEnd { index: usize },
    #[error("curve {index} has self-intersection -{entry}, not -1")]
    NotMinusOneCurve { index: usize, entry: u64 },
    #[error("blowing down curve {index} would leave an empty chain or a 0-curve")]
    DegenerateResult { index: usize },
    #[error("non-minimal graph needs n >= 3, got {0}")]
    InvalidN(u64),
    #[error("cannot parse chain {0:?}")]
    Parse(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// The cyclic group `(1/p)(1, q)` acting by `(z1, z2) -> (w z1, w^q z2)`
/// with `w` a primitive p-th root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicQuotient {
    p: u64,
    q: u64,
}

impl CyclicQuotient {
    pub fn new(p: u64, q: u64) -> Result<Self, HjError> {
        if p < 2 || q == 0 || q >= p || p.gcd(&q) != 1 {
            return Err(HjError::InvalidGroup { p, q });
        }
        Ok(CyclicQuotient { p, q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `q^{-1}` modulo `p`.
    pub fn q_inverse(&self) -> u64 {
        mod_inverse_u64(self.q, self.p).expect("q is a unit mod p")
    }

    /// The same singularity with the coordinates swapped: `(1/p)(1, q^{-1})`.
    pub fn swapped(&self) -> CyclicQuotient {
        CyclicQuotient {
            p: self.p,
            q: self.q_inverse(),
        }
    }

    /// Whether the group lies in SU(2), i.e. `q = p - 1`.
    pub fn is_su2(&self) -> bool {
        self.q + 1 == self.p
    }
}

impl fmt::Display for CyclicQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}(1,{})", self.p, self.q)
    }
}

/// A linear chain of smooth rational curves, stored as minus their
/// self-intersections. A (-1)-curve is the entry 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResolutionChain(Vec<u64>);

impl ResolutionChain {
    pub fn new(entries: Vec<u64>) -> Result<Self, HjError> {
        if entries.is_empty() {
            return Err(HjError::EmptyChain);
        }
        if let Some(&bad) = entries.iter().find(|&&e| e == 0) {
            return Err(HjError::NonPositiveEntry(bad));
        }
        Ok(ResolutionChain(entries))
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<u64>) -> Self {
        debug_assert!(!entries.is_empty() && entries.iter().all(|&e| e >= 1));
        ResolutionChain(entries)
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_minimal(&self) -> bool {
        self.0.iter().all(|&e| e >= 2)
    }

    /// Sub-chain on the inclusive index range `[start, end]`.
    pub fn slice(&self, start: usize, end: usize) -> Option<ResolutionChain> {
        if start > end || end >= self.len() {
            return None;
        }
        Some(ResolutionChain(self.0[start..=end].to_vec()))
    }
}

impl fmt::Display for ResolutionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for ResolutionChain {
    type Err = HjError;

    /// Accepts `3,2,2` or `(3,2,2)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let inner = trimmed
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(trimmed);
        let entries = inner
            .split(',')
            .map(|tok| tok.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| HjError::Parse(s.to_string()))?;
        ResolutionChain::new(entries)
    }
}

/// Minimal resolution string of `(1/p)(1, q)` via the modified Euclidean
/// algorithm `p = e_1 q - a_1`, `q = e_2 a_1 - a_2`, ...
pub fn hj_resolve(g: &CyclicQuotient) -> ResolutionChain {
    let (mut num, mut den) = (g.p, g.q);
    let mut entries = Vec::new();
    while den > 0 {
        let e = num.div_ceil(den);
        entries.push(e);
        // remainder e*den - num is in [0, den)
        let rem = e * den - num;
        num = den;
        den = rem;
    }
    ResolutionChain(entries)
}

/// Recovers `(p, q)` with `q/p = [e_1, ..., e_k]` from a minimal chain.
pub fn chain_to_quotient(c: &ResolutionChain) -> Result<CyclicQuotient, HjError> {
    if !c.is_minimal() {
        return Err(HjError::NonMinimalChain(c.clone()));
    }
    let value = cf_eval(c.entries())?;
    let p = value.denom().to_u64().ok_or(HjError::OrderTooLarge)?;
    let q = value.numer().to_u64().ok_or(HjError::OrderTooLarge)?;
    CyclicQuotient::new(p, q)
}

/// `(p, q)` of a minimal chain as big integers, for chains whose order may
/// not fit in a machine word.
pub fn chain_to_quotient_big(c: &ResolutionChain) -> Result<(BigInt, BigInt), HjError> {
    if !c.is_minimal() {
        return Err(HjError::NonMinimalChain(c.clone()));
    }
    let value = cf_eval(c.entries())?;
    Ok((value.denom().clone(), value.numer().clone()))
}

pub fn reverse_chain(c: &ResolutionChain) -> ResolutionChain {
    ResolutionChain(c.0.iter().rev().copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Where to blow up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlowUpSite {
    /// A free point of curve `i`. Only the end curves have a free point that
    /// keeps the graph linear, so `i` must be the first curve with
    /// [`Side::Left`] or the last with [`Side::Right`].
    OnCurve(usize, Side),
    /// The intersection point of curves `i` and `i + 1`.
    AtNode(usize),
}

impl BlowUpSite {
    /// Index of the new (-1)-curve in the blown-up chain.
    pub fn exceptional_index(&self) -> usize {
        match *self {
            BlowUpSite::OnCurve(i, Side::Left) => i,
            BlowUpSite::OnCurve(i, Side::Right) => i + 1,
            BlowUpSite::AtNode(i) => i + 1,
        }
    }

    /// Every valid site on a chain of length `len`.
    pub fn all_for(len: usize) -> Vec<BlowUpSite> {
        let mut sites = vec![
            BlowUpSite::OnCurve(0, Side::Left),
            BlowUpSite::OnCurve(len - 1, Side::Right),
        ];
        sites.extend((0..len.saturating_sub(1)).map(BlowUpSite::AtNode));
        sites
    }
}

pub fn blow_up(c: &ResolutionChain, site: BlowUpSite) -> Result<ResolutionChain, HjError> {
    let len = c.len();
    let mut entries = c.0.clone();
    match site {
        BlowUpSite::OnCurve(i, side) => {
            if i >= len {
                return Err(HjError::IndexOutOfRange { index: i, len });
            }
            let at_end = match side {
                Side::Left => i == 0,
                Side::Right => i == len - 1,
            };
            if !at_end {
                return Err(HjError::NotChainEnd { index: i });
            }
            entries[i] += 1;
            entries.insert(site.exceptional_index(), 1);
        }
        BlowUpSite::AtNode(i) => {
            if i + 1 >= len {
                return Err(HjError::IndexOutOfRange { index: i + 1, len });
            }
            entries[i] += 1;
            entries[i + 1] += 1;
            entries.insert(i + 1, 1);
        }
    }
    Ok(ResolutionChain(entries))
}

/// Contracts the (-1)-curve at `i`; its neighbours each lose one.
pub fn blow_down(c: &ResolutionChain, i: usize) -> Result<ResolutionChain, HjError> {
    let len = c.len();
    let &entry = c.0.get(i).ok_or(HjError::IndexOutOfRange { index: i, len })?;
    if entry != 1 {
        return Err(HjError::NotMinusOneCurve { index: i, entry });
    }
    let mut entries = c.0.clone();
    entries.remove(i);
    if entries.is_empty() {
        return Err(HjError::DegenerateResult { index: i });
    }
    let mut neighbours = Vec::with_capacity(2);
    if i > 0 {
        neighbours.push(i - 1);
    }
    if i < entries.len() {
        neighbours.push(i);
    }
    for n in neighbours {
        if entries[n] <= 1 {
            return Err(HjError::DegenerateResult { index: i });
        }
        entries[n] -= 1;
    }
    Ok(ResolutionChain(entries))
}

/// The blow-up sequence behind [`non_minimal_graph`]: start from `(n)`,
/// blow up a free point of the (-n)-curve, then `n - 3` times a free point
/// of the newest (-1)-curve. Returns every intermediate chain, starting
/// with `(n)`.
pub fn non_minimal_sequence(n: u64) -> Result<Vec<ResolutionChain>, HjError> {
    if n < 3 {
        return Err(HjError::InvalidN(n));
    }
    let mut steps = vec![ResolutionChain(vec![n])];
    for _ in 0..n - 2 {
        let last = steps.last().expect("nonempty");
        // the newest (-1)-curve always sits at the left end
        steps.push(blow_up(last, BlowUpSite::OnCurve(0, Side::Left))?);
    }
    Ok(steps)
}

/// `(1, 2, ..., 2, n + 1)` with `n - 3` twos.
pub fn non_minimal_graph(n: u64) -> Result<ResolutionChain, HjError> {
    if n < 3 {
        return Err(HjError::InvalidN(n));
    }
    let mut entries = vec![1];
    entries.extend(std::iter::repeat_n(2, (n - 3) as usize));
    entries.push(n + 1);
    Ok(ResolutionChain(entries))
}
