//! Exact field arithmetic: arbitrary-precision rationals and prime fields.
//!
//! Every dimension the engine reports comes out of exact Gaussian elimination,
//! so there is no floating point anywhere in this crate. A [`Scalar`] is either
//! a `BigRational` or a residue mod a prime; the two variants never mix.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The ground field of a computation: ℚ or 𝔽_p.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum FieldSpec {
    Rational,
    ModP(u64),
}

impl FieldSpec {
    pub fn characteristic(self) -> u64 {
        match self {
            FieldSpec::Rational => 0,
            FieldSpec::ModP(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            FieldSpec::Rational => Scalar::Rational(BigRational::from(BigInt::from(v))),
            FieldSpec::ModP(p) => Scalar::ModP {
                value: v.rem_euclid(p as i64) as u64,
                modulus: p,
            },
        }
    }

    /// `num/den` in this field. Panics if `den` is not invertible.
    pub fn from_fraction(self, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        match self {
            FieldSpec::Rational => {
                Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
            }
            FieldSpec::ModP(_) => {
                let d = self.from_i64(den);
                let inv = d.inverse().expect("denominator not invertible mod p");
                self.from_i64(num).mul(&inv)
            }
        }
    }

    pub fn is_prime_modulus(self) -> bool {
        match self {
            FieldSpec::Rational => true,
            FieldSpec::ModP(p) => is_prime_u64(p),
        }
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact field element.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Rational(BigRational),
    ModP { value: u64, modulus: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rational(_) => FieldSpec::Rational,
            Scalar::ModP { modulus, .. } => FieldSpec::ModP(*modulus),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::ModP { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::ModP { value, .. } => *value == 1,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::ModP { value: a, modulus: p }, Scalar::ModP { value: b, modulus: q }) => {
                assert_eq!(p, q, "mixed moduli");
                Scalar::ModP {
                    value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                    modulus: *p,
                }
            }
            _ => panic!("mixed scalar variants"),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::ModP { value, modulus } => Scalar::ModP {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        // ±1 fast paths matter: most matrix entries in this engine are units.
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::ModP { value: a, modulus: p }, Scalar::ModP { value: b, modulus: q }) => {
                assert_eq!(p, q, "mixed moduli");
                Scalar::ModP {
                    value: ((*a as u128 * *b as u128) % *p as u128) as u64,
                    modulus: *p,
                }
            }
            _ => panic!("mixed scalar variants"),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::ModP { value, modulus } => Scalar::ModP {
                value: mod_inverse(*value, *modulus),
                modulus: *modulus,
            },
        })
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inverse().expect("division by zero"))
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = self.field().one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Parses `-3`, `5/7`, etc. in the given field.
    pub fn parse(field: FieldSpec, text: &str) -> Option<Scalar> {
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?),
            None => (text.trim().parse::<i64>().ok()?, 1),
        };
        if den == 0 {
            return None;
        }
        if let FieldSpec::ModP(_) = field {
            if field.from_i64(den).is_zero() {
                return None;
            }
        }
        Some(field.from_fraction(num, den))
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // extended Euclid
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "not invertible mod p");
    t.rem_euclid(p as i128) as u64
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::ModP { value, .. } => write!(f, "{value}"),
        }
    }
}

/// True when the rational value is negative (used only for printing).
pub fn is_negative(s: &Scalar) -> bool {
    match s {
        Scalar::Rational(r) => r.is_negative(),
        Scalar::ModP { .. } => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_invariants() {
        let f = FieldSpec::Rational;
        let x = f.from_fraction(2, -4);
        // num-rational keeps denominators positive and fractions reduced
        match &x {
            Scalar::Rational(r) => {
                assert_eq!(r.numer(), &BigInt::from(-1));
                assert_eq!(r.denom(), &BigInt::from(2));
            }
            _ => unreachable!(),
        }
        assert_eq!(x.add(&x), f.from_i64(-1));
    }

    #[test]
    fn mod_p_field_axioms_exhaustive() {
        for p in [2u64, 3, 5] {
            let f = FieldSpec::ModP(p);
            for a in 0..p {
                let sa = f.from_i64(a as i64);
                for b in 0..p {
                    let sb = f.from_i64(b as i64);
                    for c in 0..p {
                        let sc = f.from_i64(c as i64);
                        assert_eq!(sa.add(&sb).add(&sc), sa.add(&sb.add(&sc)));
                        assert_eq!(sa.mul(&sb).mul(&sc), sa.mul(&sb.mul(&sc)));
                        assert_eq!(sa.mul(&sb.add(&sc)), sa.mul(&sb).add(&sa.mul(&sc)));
                    }
                }
                if a != 0 {
                    assert!(sa.mul(&sa.inverse().unwrap()).is_one());
                }
            }
        }
    }

    #[test]
    fn primality() {
        assert!(FieldSpec::ModP(2).is_prime_modulus());
        assert!(FieldSpec::ModP(97).is_prime_modulus());
        assert!(!FieldSpec::ModP(1).is_prime_modulus());
        assert!(!FieldSpec::ModP(91).is_prime_modulus());
    }

    #[test]
    fn parse_round_trip() {
        let f = FieldSpec::Rational;
        for t in ["3", "-3", "5/7", "-1/2"] {
            let s = Scalar::parse(f, t).unwrap();
            assert_eq!(format!("{s}"), t);
        }
        let f2 = FieldSpec::ModP(5);
        assert_eq!(Scalar::parse(f2, "7").unwrap(), f2.from_i64(2));
        assert_eq!(Scalar::parse(f2, "1/2").unwrap(), f2.from_i64(3));
    }
}
