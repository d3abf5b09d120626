//! Exact coefficient scalars: rationals, or elements of a prime field.
//!
//! Rational and modular values can be mixed; a rational is coerced into the
//! prime field of its partner, which requires its denominator to be a unit
//! there. Integer literals such as `Scalar::one()` are rational, so they
//! combine with either kind.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Element of the prime field F_p, `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        if !is_prime(modulus) || modulus >= (1 << 31) {
            return Err(Error::Precondition(format!("{modulus} is not a supported prime")));
        }
        Ok(Fp { value: value.rem_euclid(modulus as i64) as u64, modulus })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn with(&self, value: u64) -> Fp {
        Fp { value: value % self.modulus, modulus: self.modulus }
    }

    fn inverse(&self) -> Option<Fp> {
        if self.value == 0 {
            return None;
        }
        Some(self.with(pow_mod(self.value, self.modulus - 2, self.modulus)))
    }
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact scalar.
#[derive(Clone, Debug)]
pub enum Scalar {
    Rational(BigRational),
    Modular(Fp),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Scalar::Rational(BigRational::from_integer(n))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn half() -> Self {
        Scalar::from_ratio(1, 2)
    }

    pub fn modular(value: i64, p: u64) -> Result<Self> {
        Ok(Scalar::Modular(Fp::new(value, p)?))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Modular(f) => f.value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Modular(f) => f.value == 1 % f.modulus,
        }
    }

    /// `Some(p)` for prime-field values, `None` for rationals.
    pub fn characteristic(&self) -> Option<u64> {
        match self {
            Scalar::Rational(_) => None,
            Scalar::Modular(f) => Some(f.modulus),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Modular(_) => None,
        }
    }

    /// Integer value, if this is a rational with denominator 1.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Rational(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    /// Reduce a rational modulo `p`. Fails when `p` divides the denominator.
    pub fn reduce_mod(&self, p: u64) -> Result<Scalar> {
        match self {
            Scalar::Rational(r) => {
                let pm = BigInt::from(p);
                let den = r.denom().mod_floor(&pm);
                if den.is_zero() {
                    return Err(Error::NonUnit(format!("{r} is not {p}-integral")));
                }
                let num = r.numer().mod_floor(&pm).to_i64().unwrap();
                let den = den.to_i64().unwrap();
                let den_inv = Fp::new(den, p)?.inverse().unwrap();
                Ok(Scalar::Modular(Fp::new(num, p)?.mul_fp(&den_inv)))
            }
            Scalar::Modular(f) if f.modulus == p => Ok(self.clone()),
            Scalar::Modular(f) => Err(Error::DatumMismatch(format!(
                "cannot move an F_{} value to F_{p}",
                f.modulus
            ))),
        }
    }

    /// True when the value is a rational whose denominator is prime to `p`.
    pub fn is_p_integral(&self, p: u64) -> bool {
        match self {
            Scalar::Rational(r) => !(r.denom() % BigInt::from(p)).is_zero(),
            Scalar::Modular(_) => true,
        }
    }

    /// True for rationals whose denominator is a power of two.
    pub fn in_dyadic_integers(&self) -> bool {
        match self {
            Scalar::Rational(r) => {
                let mut d = r.denom().clone();
                let two = BigInt::from(2);
                while d.is_even() {
                    d /= &two;
                }
                d.is_one()
            }
            Scalar::Modular(_) => true,
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Rational(r) => {
                if r.is_zero() {
                    Err(Error::NonUnit("0".into()))
                } else {
                    Ok(Scalar::Rational(r.recip()))
                }
            }
            Scalar::Modular(f) => f
                .inverse()
                .map(Scalar::Modular)
                .ok_or_else(|| Error::NonUnit(format!("0 mod {}", f.modulus))),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self * &other.inv()?)
    }

    /// Whether 2 is a unit in the ring this value lives in.
    pub fn two_is_unit(&self) -> bool {
        !matches!(self, Scalar::Modular(f) if f.modulus == 2)
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.abs()),
            Scalar::Modular(_) => self.clone(),
        }
    }

    fn coerce_pair<'a>(a: &'a Scalar, b: &'a Scalar) -> (Scalar, Scalar) {
        match (a, b) {
            (Scalar::Rational(_), Scalar::Modular(f)) => (
                a.reduce_mod(f.modulus).expect("rational is not integral in the partner field"),
                b.clone(),
            ),
            (Scalar::Modular(f), Scalar::Rational(_)) => (
                a.clone(),
                b.reduce_mod(f.modulus).expect("rational is not integral in the partner field"),
            ),
            _ => (a.clone(), b.clone()),
        }
    }

    fn binop(
        a: &Scalar,
        b: &Scalar,
        rat: impl Fn(&BigRational, &BigRational) -> BigRational,
        fp: impl Fn(&Fp, &Fp) -> Fp,
    ) -> Scalar {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(rat(x, y)),
            (Scalar::Modular(x), Scalar::Modular(y)) => {
                assert_eq!(x.modulus, y.modulus, "mixing scalars of different characteristic");
                Scalar::Modular(fp(x, y))
            }
            _ => {
                let (x, y) = Scalar::coerce_pair(a, b);
                Scalar::binop(&x, &y, rat, fp)
            }
        }
    }
}

impl Fp {
    fn add_fp(&self, o: &Fp) -> Fp {
        self.with(self.value + o.value)
    }
    fn sub_fp(&self, o: &Fp) -> Fp {
        self.with(self.value + self.modulus - o.value)
    }
    fn mul_fp(&self, o: &Fp) -> Fp {
        self.with(self.value * o.value)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Modular(a), Scalar::Modular(b)) => a == b,
            (Scalar::Rational(_), Scalar::Modular(f)) => {
                self.reduce_mod(f.modulus).map(|r| &r == other).unwrap_or(false)
            }
            (Scalar::Modular(_), Scalar::Rational(_)) => other == self,
        }
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.partial_cmp(b),
            _ => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Modular(x) => write!(f, "{}", x.value),
        }
    }
}

impl std::str::FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|e| Error::Parse(format!("{t}: {e}")));
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(Error::Parse("zero denominator".into()));
                }
                Ok(Scalar::Rational(BigRational::new(parse(n)?, d)))
            }
            None => Ok(Scalar::from_bigint(parse(s)?)),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        Scalar::binop(self, rhs, |a, b| a + b, |a, b| a.add_fp(b))
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        Scalar::binop(self, rhs, |a, b| a - b, |a, b| a.sub_fp(b))
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        Scalar::binop(self, rhs, |a, b| a * b, |a, b| a.mul_fp(b))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Modular(f) => Scalar::Modular(f.with(f.modulus - f.value)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => *a += b,
            _ => *self = &*self + rhs,
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => *a -= b,
            _ => *self = &*self - rhs,
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}
