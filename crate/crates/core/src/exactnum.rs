//! Exact rational and modular arithmetic.
//!
//! Everything here works on arbitrary-precision integers. The only place a
//! float appears is [`Rational::to_f64`], used for display and for comparing
//! against the floating-point eta oracle.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("{q} is not invertible modulo {p}")]
    NotInvertible { q: BigInt, p: BigInt },
    #[error("continued fraction has a vanishing nested denominator at position {position}")]
    DivisionByZero { position: usize },
    #[error("continued fraction needs at least one entry")]
    EmptyChain,
    #[error("rational with zero denominator")]
    ZeroDenominator,
}

/// An exact rational number, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, ExactError> {
        let den = den.into();
        if den.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Always `num/den`, even for integers.
    pub fn fraction_text(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    /// Decimal rendering rounded (half away from zero) to `sig` significant
    /// digits, computed exactly.
    pub fn to_decimal(&self, sig: usize) -> String {
        assert!(sig > 0, "need at least one significant digit");
        if self.is_zero() {
            return "0".to_string();
        }
        let negative = self.numer().sign() == Sign::Minus;
        let num = self.numer().abs();
        let den = self.denom().clone();
        let ten = BigInt::from(10u8);

        // exp10 = floor(log10(num/den))
        let mut exp10: i64 = num.to_string().len() as i64 - den.to_string().len() as i64;
        let pow = |e: i64| num_traits::pow(ten.clone(), e.unsigned_abs() as usize);
        let cmp_pow = |e: i64| -> Ordering {
            if e >= 0 {
                num.cmp(&(&den * pow(e)))
            } else {
                (&num * pow(e)).cmp(&den)
            }
        };
        while cmp_pow(exp10) == Ordering::Less {
            exp10 -= 1;
        }
        while cmp_pow(exp10 + 1) != Ordering::Less {
            exp10 += 1;
        }

        // digits = round(|x| * 10^(sig - 1 - exp10))
        let shift = sig as i64 - 1 - exp10;
        let (n, d) = if shift >= 0 {
            (&num * pow(shift), den.clone())
        } else {
            (num.clone(), &den * pow(shift))
        };
        let (quot, rem) = n.div_rem(&d);
        let mut digits = if BigInt::from(2u8) * rem >= d { quot + 1 } else { quot };
        if digits.to_string().len() > sig {
            digits /= 10;
            exp10 += 1;
        }
        let digits = digits.to_string();

        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if exp10 < 0 {
            out.push_str("0.");
            for _ in 0..(-exp10 - 1) {
                out.push('0');
            }
            out.push_str(&digits);
        } else {
            let int_len = exp10 as usize + 1;
            if int_len >= digits.len() {
                out.push_str(&digits);
                for _ in digits.len()..int_len {
                    out.push('0');
                }
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
        out
    }
}

impl fmt::Display for Rational {
    /// `n` for integers, `n/d` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom().is_one() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rational({})", self)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    /// Panics on division by zero, like the integer types.
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "rational division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// Inverse of `q` modulo `p`, in `[1, p-1]`.
///
/// `q` may be any integer (it is reduced mod `p` first).
pub fn mod_inverse(q: &BigInt, p: &BigInt) -> Result<BigInt, ExactError> {
    let not_invertible = || ExactError::NotInvertible {
        q: q.clone(),
        p: p.clone(),
    };
    if *p < BigInt::from(2u8) {
        return Err(not_invertible());
    }
    let q = q.mod_floor(p);
    if q.is_zero() {
        return Err(not_invertible());
    }

    // extended Euclid on (p, q), tracking only the coefficient of q
    let (mut old_r, mut r) = (p.clone(), q);
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let quot = &old_r / &r;
        let next_r = &old_r - &quot * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_t = &old_t - &quot * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if !old_r.is_one() {
        return Err(not_invertible());
    }
    Ok(old_t.mod_floor(p))
}

/// Convenience wrapper for word-sized inputs.
pub fn mod_inverse_u64(q: u64, p: u64) -> Result<u64, ExactError> {
    mod_inverse(&BigInt::from(q), &BigInt::from(p)).map(|x| x.to_u64().expect("inverse is below the modulus"))
}

/// Evaluates `[e_1, ..., e_k] = 1/(e_1 - 1/(e_2 - ... 1/e_k))`.
///
/// Evaluation runs right to left. A vanishing nested denominator (only
/// possible when some entry is 0 or 1) is reported with the position of the
/// entry where it happened.
pub fn cf_eval(chain: &[u64]) -> Result<Rational, ExactError> {
    if chain.is_empty() {
        return Err(ExactError::EmptyChain);
    }
    let mut value = Rational::zero();
    for (position, &e) in chain.iter().enumerate().rev() {
        let denominator = Rational::from_integer(e) - value;
        value = denominator.recip().ok_or(ExactError::DivisionByZero { position })?;
    }
    Ok(value)
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut result = n;
    let mut m = n;
    let mut f = 2u64;
    while f * f <= m {
        if m.is_multiple_of(f) {
            while m.is_multiple_of(f) {
                m /= f;
            }
            result -= result / f;
        }
        f += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}
