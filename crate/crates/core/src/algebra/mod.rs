//! Exact scalar arithmetic over prime fields and the rationals.
//!
//! Everything in this module is exact: residues modulo a prime `p` and
//! arbitrary-precision fractions in lowest terms. There is no numeric
//! tolerance anywhere in the crate.
//!
//! Scalars serialize as strings: `"p:3:2"` is the residue 2 in GF(3) and
//! `"q:-1/2"` is the rational -1/2 (integers are written `"q:5"`).

mod enumerate;
mod linear;
mod matrix;

pub use enumerate::{enumerate_field, enumerate_linear_forms, FieldEnumeration, LinearFormEnumeration};
pub use linear::{coefficients_of, LinearForm};
pub use matrix::{kernel_basis, orthogonal_complement, row_reduce, BilinearFragment, Rref};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse field descriptor `{0}`")]
    BadField(String),
    #[error("cannot parse scalar `{0}`")]
    BadScalar(String),
    #[error("scalar {scalar} does not belong to {field}")]
    WrongField { scalar: String, field: Field },
    #[error("index {index} is outside the enumeration of {field}")]
    IndexOutOfField { index: usize, field: Field },
    #[error("rule is not linear: value at {sample:?} is {got}, dot product gives {expected}")]
    NotLinear { sample: Vec<String>, got: String, expected: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("bilinear fragment is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
}

/// A field descriptor: GF(p) for a prime p, or the rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Field {
    Prime(u64),
    Rationals,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Self, AlgebraError> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(AlgebraError::NotPrime(p))
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(self) -> Option<u64> {
        match self {
            Field::Prime(p) => Some(p),
            Field::Rationals => None,
        }
    }

    pub fn is_finite(self) -> bool {
        self.order().is_some()
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        match self {
            Field::Prime(p) => Scalar::Mod { p, v: v.rem_euclid(p as i64) as u64 },
            Field::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn fraction(self, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        match self {
            Field::Prime(_) => {
                let d = self.from_i64(den).inv().expect("denominator vanishes in GF(p)");
                &self.from_i64(num) * &d
            }
            Field::Rationals => Scalar::Rat(BigRational::new(BigInt::from(num), BigInt::from(den))),
        }
    }

    pub fn contains(self, s: &Scalar) -> bool {
        match (self, s) {
            (Field::Prime(p), Scalar::Mod { p: q, v }) => p == *q && v < q,
            (Field::Rationals, Scalar::Rat(_)) => true,
            _ => false,
        }
    }

    pub fn check(self, s: &Scalar) -> Result<(), AlgebraError> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(AlgebraError::WrongField { scalar: s.to_string(), field: self })
        }
    }

    /// Residue `v` of GF(p) as a scalar; `None` for the rationals or `v >= p`.
    pub fn residue(self, v: u64) -> Option<Scalar> {
        match self {
            Field::Prime(p) if v < p => Some(Scalar::Mod { p, v }),
            _ => None,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "gf:{p}"),
            Field::Rationals => write!(f, "q"),
        }
    }
}

impl FromStr for Field {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        if t == "q" || t == "rationals" {
            return Ok(Field::Rationals);
        }
        let digits = t.strip_prefix("gf:").or_else(|| t.strip_prefix("gf")).unwrap_or(&t);
        let p: u64 = digits.parse().map_err(|_| AlgebraError::BadField(s.to_string()))?;
        Field::prime(p)
    }
}

impl TryFrom<String> for Field {
    type Error = AlgebraError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Field> for String {
    fn from(f: Field) -> String {
        f.to_string()
    }
}

/// An element of GF(p) or of the rationals, always in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scalar {
    Mod { p: u64, v: u64 },
    Rat(BigRational),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Mod { p, .. } => Field::Prime(*p),
            Scalar::Rat(_) => Field::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { v, .. } => *v == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { v, .. } => *v == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Mod { p, v } => Some(Scalar::Mod { p: *p, v: pow_mod(*v, *p - 2, *p) }),
            Scalar::Rat(r) => Some(Scalar::Rat(r.recip())),
        }
    }

    /// The residue of a GF(p) element.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Scalar::Mod { v, .. } => Some(*v),
            Scalar::Rat(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Mod { .. } => None,
        }
    }
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc = 1u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("field mismatch: {a} and {b}")
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { p, v }, Scalar::Mod { p: q, v: w }) if p == q => {
                Scalar::Mod { p: *p, v: ((*v as u128 + *w as u128) % *p as u128) as u64 }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { p, v }, Scalar::Mod { p: q, v: w }) if p == q => {
                Scalar::Mod { p: *p, v: ((*v as u128 * *w as u128) % *p as u128) as u64 }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { p, v } => Scalar::Mod { p: *p, v: (*p - *v) % *p },
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -(&self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { p, v } => write!(f, "p:{p}:{v}"),
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "q:{}", r.numer())
                } else {
                    write!(f, "q:{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}

impl FromStr for Scalar {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AlgebraError::BadScalar(s.to_string());
        if let Some(rest) = s.strip_prefix("p:") {
            let (p, v) = rest.split_once(':').ok_or_else(bad)?;
            let p: u64 = p.parse().map_err(|_| bad())?;
            let v: u64 = v.parse().map_err(|_| bad())?;
            if !is_prime(p) || v >= p {
                return Err(bad());
            }
            return Ok(Scalar::Mod { p, v });
        }
        if let Some(rest) = s.strip_prefix("q:") {
            let (n, d) = match rest.split_once('/') {
                Some((n, d)) => (n, d),
                None => (rest, "1"),
            };
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Scalar::Rat(BigRational::new(n, d)));
        }
        Err(bad())
    }
}

impl TryFrom<String> for Scalar {
    type Error = AlgebraError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Scalar> for String {
    fn from(s: Scalar) -> String {
        s.to_string()
    }
}

/// Dot product of two equally long scalar slices over `field`.
pub fn dot(field: Field, a: &[Scalar], b: &[Scalar]) -> Scalar {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(field.zero(), |acc, (x, y)| &acc + &(x * y))
}

/// Rational p-adic valuation; `None` for zero.
pub fn p_adic_valuation(r: &BigRational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut k = 0i64;
        while (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    Some(count(r.numer()) - count(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scalar_strings() {
        let f3 = Field::prime(3).unwrap();
        assert_eq!(f3.from_i64(2).to_string(), "p:3:2");
        assert_eq!(Field::Rationals.fraction(-1, 2).to_string(), "q:-1/2");
        assert_eq!(Field::Rationals.fraction(2, -4).to_string(), "q:-1/2");
        assert_eq!("q:4/2".parse::<Scalar>().unwrap().to_string(), "q:2");
        assert!("p:4:1".parse::<Scalar>().is_err());
        assert!("p:3:3".parse::<Scalar>().is_err());
        assert!("q:1/0".parse::<Scalar>().is_err());
    }

    #[test]
    fn field_descriptors() {
        assert_eq!(Field::prime(4), Err(AlgebraError::NotPrime(4)));
        assert_eq!("gf:5".parse::<Field>().unwrap(), Field::Prime(5));
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rationals);
        assert!("gf:1".parse::<Field>().is_err());
    }

    #[test]
    fn inverses_mod_p() {
        let f = Field::prime(5).unwrap();
        for v in 1..5 {
            let s = f.from_i64(v);
            assert!((&s * &s.inv().unwrap()).is_one());
        }
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn valuation() {
        let r = BigRational::new(BigInt::from(12), BigInt::from(5));
        assert_eq!(p_adic_valuation(&r, 2), Some(2));
        assert_eq!(p_adic_valuation(&r, 5), Some(-1));
        assert_eq!(p_adic_valuation(&BigRational::zero(), 2), None);
    }

    fn field_strategy() -> impl Strategy<Value = Field> {
        prop_oneof![
            Just(Field::Prime(2)),
            Just(Field::Prime(3)),
            Just(Field::Prime(5)),
            Just(Field::Rationals)
        ]
    }

    fn element(field: Field) -> impl Strategy<Value = Scalar> {
        (-1000i64..=1000, 1i64..=1000).prop_map(move |(n, d)| match field {
            Field::Prime(_) => field.from_i64(n),
            Field::Rationals => field.fraction(n, d),
        })
    }

    fn triple() -> impl Strategy<Value = (Scalar, Scalar, Scalar)> {
        field_strategy().prop_flat_map(|f| (element(f), element(f), element(f)))
    }

    proptest! {
        #[test]
        fn field_axioms((a, b, c) in triple()) {
            let f = a.field();
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a + &(-&a)).is_zero());
            prop_assert_eq!(&a * &f.one(), a.clone());
            if let Some(inv) = a.inv() {
                prop_assert!((&a * &inv).is_one());
            }
        }

        #[test]
        fn scalar_string_roundtrip(a in field_strategy().prop_flat_map(element)) {
            let s = a.to_string();
            prop_assert_eq!(s.parse::<Scalar>().unwrap(), a);
        }
    }
}
