//! Exact arithmetic over prime fields F_p and the rationals, plus the dense
//! linear-algebra kernels (row reduction, rank, kernel basis) every other
//! module consumes.

pub mod matrix;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which field a computation runs over. Every scalar carries its spec so
/// mixed-field inputs are caught at the boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldSpec {
    Prime { p: u32 },
    Rational,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl FieldSpec {
    /// Prime field F_p; p must be prime and below 2^31.
    pub fn prime(p: u64) -> Result<Self> {
        if p >= (1 << 31) {
            return Err(Error::ModulusTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::Prime { p: p as u32 })
    }

    pub fn rational() -> Self {
        FieldSpec::Rational
    }

    pub fn is_prime_field(&self) -> bool {
        matches!(self, FieldSpec::Prime { .. })
    }

    pub fn modulus(&self) -> Option<u32> {
        match self {
            FieldSpec::Prime { p } => Some(*p),
            FieldSpec::Rational => None,
        }
    }

    /// Re-checks the invariants after raw deserialization.
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Prime { p } => FieldSpec::prime(*p as u64).map(|_| ()),
            FieldSpec::Rational => Ok(()),
        }
    }
}

/// An exact field element in canonical form: a residue in [0, p) for prime
/// fields, a reduced fraction with positive denominator for the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scalar {
    Prime { p: u32, value: u32 },
    Rational(BigRational),
}

impl Scalar {
    pub fn zero(spec: FieldSpec) -> Self {
        match spec {
            FieldSpec::Prime { p } => Scalar::Prime { p, value: 0 },
            FieldSpec::Rational => Scalar::Rational(BigRational::zero()),
        }
    }

    pub fn one(spec: FieldSpec) -> Self {
        match spec {
            FieldSpec::Prime { p } => Scalar::Prime { p, value: 1 },
            FieldSpec::Rational => Scalar::Rational(BigRational::one()),
        }
    }

    pub fn from_i64(v: i64, spec: FieldSpec) -> Self {
        match spec {
            FieldSpec::Prime { p } => {
                let m = p as i64;
                let r = ((v % m) + m) % m;
                Scalar::Prime { p, value: r as u32 }
            }
            FieldSpec::Rational => Scalar::Rational(BigRational::from(BigInt::from(v))),
        }
    }

    pub fn from_fraction(num: i64, den: i64, spec: FieldSpec) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = Scalar::from_i64(num, spec);
        let d = Scalar::from_i64(den, spec);
        n.div(&d)
    }

    pub fn spec(&self) -> FieldSpec {
        match self {
            Scalar::Prime { p, .. } => FieldSpec::Prime { p: *p },
            Scalar::Rational(_) => FieldSpec::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Prime { value, .. } => *value == 0,
            Scalar::Rational(r) => r.is_zero(),
        }
    }

    fn same_p(&self, rhs: &Scalar) -> u32 {
        match (self, rhs) {
            (Scalar::Prime { p: a, .. }, Scalar::Prime { p: b, .. }) if a == b => *a,
            _ => panic!("scalar arithmetic across field specs"),
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Prime { value: a, .. }, Scalar::Prime { value: b, .. }) => {
                let p = self.same_p(rhs) as u64;
                Scalar::Prime {
                    p: p as u32,
                    value: ((*a as u64 + *b as u64) % p) as u32,
                }
            }
            _ => panic!("scalar arithmetic across field specs"),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime { p, value } => Scalar::Prime {
                p: *p,
                value: if *value == 0 { 0 } else { p - value },
            },
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Prime { value: a, .. }, Scalar::Prime { value: b, .. }) => {
                let p = self.same_p(rhs) as u64;
                Scalar::Prime {
                    p: p as u32,
                    value: ((*a as u64 * *b as u64) % p) as u32,
                }
            }
            _ => panic!("scalar arithmetic across field specs"),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Scalar::Rational(a) => Ok(Scalar::Rational(a.recip())),
            Scalar::Prime { p, value } => {
                // extended Euclid on (value, p)
                let (mut r0, mut r1) = (*value as i64, *p as i64);
                let (mut s0, mut s1) = (1i64, 0i64);
                while r1 != 0 {
                    let q = r0 / r1;
                    (r0, r1) = (r1, r0 - q * r1);
                    (s0, s1) = (s1, s0 - q * s1);
                }
                debug_assert_eq!(r0, 1);
                let m = *p as i64;
                let v = ((s0 % m) + m) % m;
                Ok(Scalar::Prime {
                    p: *p,
                    value: v as u32,
                })
            }
        }
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(self.spec());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Prime { .. } => None,
        }
    }

    /// Parses the canonical serialization: a decimal integer or "a/b".
    pub fn parse(s: &str, spec: FieldSpec) -> Result<Scalar> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let n = BigInt::from_str(num.trim())
                .map_err(|_| Error::Parse(format!("bad numerator {num:?}")))?;
            let d = BigInt::from_str(den.trim())
                .map_err(|_| Error::Parse(format!("bad denominator {den:?}")))?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            match spec {
                FieldSpec::Rational => Ok(Scalar::Rational(BigRational::new(n, d))),
                FieldSpec::Prime { .. } => {
                    let nn = Scalar::from_bigint(&n, spec);
                    let dd = Scalar::from_bigint(&d, spec);
                    nn.div(&dd)
                }
            }
        } else {
            let n = BigInt::from_str(s).map_err(|_| Error::Parse(format!("bad scalar {s:?}")))?;
            Ok(Scalar::from_bigint(&n, spec))
        }
    }

    fn from_bigint(n: &BigInt, spec: FieldSpec) -> Scalar {
        match spec {
            FieldSpec::Rational => Scalar::Rational(BigRational::from(n.clone())),
            FieldSpec::Prime { p } => {
                let m = BigInt::from(p);
                let mut r = n % &m;
                if r.is_negative() {
                    r += &m;
                }
                let (_, digits) = r.to_u64_digits();
                let value = digits.first().copied().unwrap_or(0) as u32;
                Scalar::Prime { p, value }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Prime { value, .. } => write!(f, "{value}"),
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
        }
    }
}
