//! Eta invariant of the lens space `S^3 / Γ` for cyclic `Γ = (1/p)(1, q)`.
//!
//! Two routes are provided. [`eta_exact`] evaluates the resolution-string
//! formula `η = (Σe_i + (q^{-1} + q)/p) / 3 - k` in exact arithmetic.
//! [`eta_cotangent`] sums `cot(r/2) cot(s/2)` over the rotation numbers of
//! the non-identity group elements in double precision. Neither depends on
//! the other, so each serves as an oracle for the other.

use std::f64::consts::PI;

use num_bigint::BigInt;

use crate::exactnum::Rational;
use crate::hjres::{hj_resolve, CyclicQuotient};
use crate::type_t::TypeTParams;

/// Rotation angles of the element `g^j`, acting on `C^2` by
/// `(e^{i angle1}, e^{i angle2})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElementRotation {
    pub j: u64,
    pub angle1: f64,
    pub angle2: f64,
}

/// Rotation numbers of every non-identity element, `j = 1..p-1`. Both
/// angles are reduced into `(0, 2π)`.
pub fn rotations(g: &CyclicQuotient) -> impl Iterator<Item = GroupElementRotation> + '_ {
    let p = g.p();
    (1..p).map(move |j| {
        let jq = ((j as u128 * g.q() as u128) % p as u128) as u64;
        GroupElementRotation {
            j,
            angle1: 2.0 * PI * j as f64 / p as f64,
            angle2: 2.0 * PI * jq as f64 / p as f64,
        }
    })
}

pub fn eta_exact(g: &CyclicQuotient) -> Rational {
    let chain = hj_resolve(g);
    let k = chain.len() as u64;
    let p = BigInt::from(g.p());
    let q_terms = BigInt::from(g.q_inverse()) + BigInt::from(g.q());
    let inner = Rational::from_integer(chain.sum()) + Rational::new(q_terms, p).expect("p >= 2");
    inner * Rational::new(1, 3).expect("nonzero") - Rational::from_integer(k)
}

fn cot(x: f64) -> f64 {
    x.cos() / x.sin()
}

/// `(1/p) Σ_{j=1}^{p-1} cot(πj/p) cot(πjq/p)` with compensated summation.
pub fn eta_cotangent(g: &CyclicQuotient) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for rot in rotations(g) {
        let term = cot(rot.angle1 / 2.0) * cot(rot.angle2 / 2.0);
        let y = term - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum / g.p() as f64
}

/// `η = (3 - s - 2/(r^2 s)) / 3` for a type T(r, s, d) group.
pub fn eta_type_t_closed_form(t: &TypeTParams) -> Rational {
    let order = BigInt::from(t.r()) * BigInt::from(t.r()) * BigInt::from(t.s());
    let inner = Rational::from_integer(3 - t.s() as i64) - Rational::new(2, order).expect("order is positive");
    inner * Rational::new(1, 3).expect("nonzero")
}
