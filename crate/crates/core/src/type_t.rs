//! Type T singularities `T(r, s, d) = (1/(r^2 s))(1, rsd - 1)`.
//!
//! Every type T string is obtained from a seed, `(4)` for `s = 1` and
//! `(3, 2, ..., 2, 3)` with `s - 2` twos for `s >= 2`, by repeating two
//! moves:
//!
//! * left:  `(e_1, ..., e_k) -> (2, e_1, ..., e_k + 1)`
//! * right: `(e_1, ..., e_k) -> (e_1 + 1, ..., e_k, 2)`
//!
//! On the pair `(d, r - d)` the moves act as the Calkin–Wilf tree: left
//! sends `(a, b)` to `(a + b, b)`, right sends it to `(a, a + b)`, and the
//! seed is the root `(1, 1)`. So the move word reaching `T(r, s, d)` is
//! unique, and its length is the chain length minus `s`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::eta::eta_type_t_closed_form;
use crate::exactnum::Rational;
use crate::hjres::{chain_to_quotient_big, hj_resolve, CyclicQuotient, ResolutionChain};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeTError {
    #[error("invalid type T parameters (r={r}, s={s}, d={d}): need r >= 2, s >= 1, gcd(r, d) = 1")]
    InvalidParams { r: u64, s: u64, d: u64 },
    #[error("type T group order r^2 s overflows 64 bits")]
    OrderTooLarge,
}

/// Parameters of `T(r, s, d)`, with `d` canonicalized into `[1, r - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeTParams {
    r: u64,
    s: u64,
    d: u64,
}

impl TypeTParams {
    /// `d` may be any positive integer coprime to `r`; it is reduced mod `r`.
    pub fn new(r: u64, s: u64, d: u64) -> Result<Self, TypeTError> {
        let invalid = TypeTError::InvalidParams { r, s, d };
        if r < 2 || s == 0 || d == 0 {
            return Err(invalid);
        }
        let d_canon = d % r;
        if d_canon == 0 || r.gcd(&d_canon) != 1 {
            return Err(invalid);
        }
        r.checked_mul(r)
            .and_then(|rr| rr.checked_mul(s))
            .ok_or(TypeTError::OrderTooLarge)?;
        Ok(TypeTParams { r, s, d: d_canon })
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// `r^2 s`
    pub fn order(&self) -> u64 {
        self.r * self.r * self.s
    }
}

impl fmt::Display for TypeTParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{},{})", self.r, self.s, self.d)
    }
}

pub fn type_t_group(t: &TypeTParams) -> CyclicQuotient {
    CyclicQuotient::new(t.order(), t.r * t.s * t.d - 1).expect("rsd - 1 is a unit mod r^2 s")
}

pub fn type_t_string(t: &TypeTParams) -> ResolutionChain {
    hj_resolve(&type_t_group(t))
}

/// Seed chain for `T_{s-1}`.
pub fn seed_chain(s: u64) -> ResolutionChain {
    assert!(s >= 1, "s must be positive");
    let entries = if s == 1 {
        vec![4]
    } else {
        let mut e = vec![3];
        e.extend(std::iter::repeat_n(2, (s - 2) as usize));
        e.push(3);
        e
    };
    ResolutionChain::from_vec_unchecked(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeTMove {
    /// `(2, e_1, ..., e_k + 1)`
    Left,
    /// `(e_1 + 1, ..., e_k, 2)`
    Right,
}

pub fn apply_move(c: &ResolutionChain, mv: TypeTMove) -> ResolutionChain {
    let mut e = c.entries().to_vec();
    match mv {
        TypeTMove::Left => {
            *e.last_mut().expect("nonempty") += 1;
            e.insert(0, 2);
        }
        TypeTMove::Right => {
            e[0] += 1;
            e.push(2);
        }
    }
    ResolutionChain::from_vec_unchecked(e)
}

/// Move word from the seed to `T(r, s, d)`: the Calkin–Wilf path from
/// `(1, 1)` to `(d, r - d)`.
pub fn move_word(t: &TypeTParams) -> Vec<TypeTMove> {
    let (mut a, mut b) = (t.d, t.r - t.d);
    let mut word = Vec::new();
    while (a, b) != (1, 1) {
        if a > b {
            word.push(TypeTMove::Left);
            a -= b;
        } else {
            word.push(TypeTMove::Right);
            b -= a;
        }
    }
    word.reverse();
    word
}

/// `T(r, s, d)` built from its seed by moves, independent of the group.
pub fn type_t_string_by_moves(t: &TypeTParams) -> ResolutionChain {
    move_word(t)
        .into_iter()
        .fold(seed_chain(t.s), |c, mv| apply_move(&c, mv))
}

/// Params reached by a move word from the seed of `T_{s-1}`.
fn params_from_word(s: u64, word: &[TypeTMove]) -> Option<TypeTParams> {
    let (mut a, mut b) = (1u64, 1u64);
    for mv in word {
        match mv {
            TypeTMove::Left => a = a.checked_add(b)?,
            TypeTMove::Right => b = b.checked_add(a)?,
        }
    }
    TypeTParams::new(a.checked_add(b)?, s, a).ok()
}

/// Every chain obtained by exactly `moves` moves from the seed of `T_{s-1}`.
///
/// There are `2^moves` of them, all type T, but with `r` ranging between
/// `moves + 2` and `Fib(moves + 3)`.
pub fn move_level_set(s: u64, moves: u32) -> Vec<ResolutionChain> {
    let mut level = vec![seed_chain(s)];
    for _ in 0..moves {
        level = level
            .iter()
            .flat_map(|c| [apply_move(c, TypeTMove::Left), apply_move(c, TypeTMove::Right)])
            .collect();
    }
    level.sort();
    level.dedup();
    level
}

/// Arithmetic recognizer. From `q/p = [e_1, ..., e_k]`: if the group is
/// `T(r, s, d)` then `gcd(p, q + 1) = rs·gcd(r, d) = rs`, which pins down
/// `r = p / gcd`, `s = gcd / r` and `d = (q + 1) / gcd`.
pub fn recognize_arithmetic(c: &ResolutionChain) -> Option<TypeTParams> {
    let (p, q) = chain_to_quotient_big(c).ok()?;
    let q1 = &q + BigInt::one();
    let rs = p.gcd(&q1);
    let (r, rem) = p.div_rem(&rs);
    if !rem.is_zero() || r < BigInt::from(2u8) {
        return None;
    }
    let (s, rem) = rs.div_rem(&r);
    if !rem.is_zero() || s.is_zero() {
        return None;
    }
    let d = &q1 / &rs;
    if d.is_zero() || d >= r || !r.gcd(&d).is_one() {
        return None;
    }
    TypeTParams::new(r.to_u64()?, s.to_u64()?, d.to_u64()?).ok()
}

fn seed_rank(e: &[u64]) -> Option<u64> {
    match e {
        [4] => Some(1),
        [3, middle @ .., 3] if middle.iter().all(|&x| x == 2) => Some(e.len() as u64),
        _ => None,
    }
}

fn peel(e: &[u64], undone: &mut Vec<TypeTMove>) -> Option<u64> {
    if let Some(s) = seed_rank(e) {
        return Some(s);
    }
    let n = e.len();
    if n < 2 {
        return None;
    }
    // undo a left move: drop the leading 2, lower the last entry
    if e[0] == 2 && e[n - 1] >= 3 {
        let mut next = e[1..].to_vec();
        *next.last_mut().expect("n >= 2") -= 1;
        undone.push(TypeTMove::Left);
        if let Some(s) = peel(&next, undone) {
            return Some(s);
        }
        undone.pop();
    }
    // undo a right move: drop the trailing 2, lower the first entry
    if e[n - 1] == 2 && e[0] >= 3 {
        let mut next = e[..n - 1].to_vec();
        next[0] -= 1;
        undone.push(TypeTMove::Right);
        if let Some(s) = peel(&next, undone) {
            return Some(s);
        }
        undone.pop();
    }
    None
}

/// Graph recognizer: peel moves off the ends until a seed remains, then
/// read the params off the move word.
pub fn recognize_peeling(c: &ResolutionChain) -> Option<TypeTParams> {
    if !c.is_minimal() {
        return None;
    }
    let mut undone = Vec::new();
    let s = peel(c.entries(), &mut undone)?;
    undone.reverse();
    params_from_word(s, &undone)
}

/// Runs both recognizers.
///
/// # Panics
///
/// If the two recognizers disagree; that is an internal bug.
pub fn recognize_type_t(c: &ResolutionChain) -> Option<TypeTParams> {
    let by_arithmetic = recognize_arithmetic(c);
    let by_peeling = recognize_peeling(c);
    assert_eq!(by_arithmetic, by_peeling, "type T recognizers disagree on {c}");
    by_arithmetic
}

/// All type T strings with `r <= r_max`, `s <= s_max`, generated by walking
/// the move tree from each seed and paired with their recovered params.
/// Sorted by `(r, s, d)`.
pub fn enumerate_type_t(r_max: u64, s_max: u64) -> Vec<(TypeTParams, ResolutionChain)> {
    let per_s: Vec<Vec<(TypeTParams, ResolutionChain)>> = (1..=s_max)
        .into_par_iter()
        .map(|s| {
            let mut found: BTreeMap<ResolutionChain, TypeTParams> = BTreeMap::new();
            let mut stack = vec![(seed_chain(s), 1u64, 1u64)];
            while let Some((chain, a, b)) = stack.pop() {
                if a + b > r_max {
                    continue;
                }
                let params =
                    recognize_type_t(&chain).unwrap_or_else(|| panic!("move tree produced a non type T chain {chain}"));
                found.insert(chain.clone(), params);
                stack.push((apply_move(&chain, TypeTMove::Left), a + b, b));
                stack.push((apply_move(&chain, TypeTMove::Right), a, a + b));
            }
            found.into_iter().map(|(c, t)| (t, c)).collect()
        })
        .collect();
    let mut out: Vec<_> = per_s.into_iter().flatten().collect();
    out.sort();
    out
}

/// Closed-form invariants of `T(r, s, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeTInvariants {
    /// `r + s - 2`
    pub length: u64,
    /// `3r + 2s - 4`
    pub sum: u64,
    pub eta: Rational,
    /// `4 / (r^2 s)`
    pub c: Rational,
}

/// Length and entry sum are exact for the extremal strings `d ∈ {1, r-1}`;
/// other `d` give shorter strings with the same `sum - 3·length = 2 - s`.
/// `eta` and `c` hold for every `d`.
pub fn importprop_invariants(t: &TypeTParams) -> TypeTInvariants {
    TypeTInvariants {
        length: t.r + t.s - 2,
        sum: 3 * t.r + 2 * t.s - 4,
        eta: eta_type_t_closed_form(t),
        c: Rational::new(4, t.order()).expect("order is positive"),
    }
}

/// `T(r, s, r - d)`, the same singularity with the string reversed.
pub fn conjugate(t: &TypeTParams) -> TypeTParams {
    TypeTParams {
        r: t.r,
        s: t.s,
        d: t.r - t.d,
    }
}
