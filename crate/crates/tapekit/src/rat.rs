//! Exact rational arithmetic helpers. All probabilities in this crate are
//! `BigRational`s; nothing is ever rounded.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::Error;

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// 2^-n
pub fn half_pow(n: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2).pow(n))
}

pub fn is_unit(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

fn is_open_unit(r: &Rational) -> bool {
    r.is_positive() && *r < Rational::one()
}

use num_traits::Signed;

/// Parses `"num/den"` or a bare integer, the wire format for rationals.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("bad rational `{s}`: {e}")))
}

pub fn parse_unit_rational(s: &str) -> Result<Rational, Error> {
    let r = parse_rational(s)?;
    if is_unit(&r) {
        Ok(r)
    } else {
        Err(Error::ValueOutOfRange(format!("{r} not in [0,1]")))
    }
}

/// True when `r` lies in the open interval (0,1); used for the
/// nondegeneracy requirement of almost-sure reasoning.
pub fn nondegenerate(r: &Rational) -> bool {
    is_open_unit(r)
}
