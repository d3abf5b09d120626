use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Element of `Z[v, v^-1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentInt {
    terms: BTreeMap<i32, i64>,
}

impl LaurentInt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c * v^e`.
    pub fn monomial(c: i64, e: i32) -> Self {
        let mut t = BTreeMap::new();
        if c != 0 {
            t.insert(e, c);
        }
        LaurentInt { terms: t }
    }

    pub fn v() -> Self {
        Self::monomial(1, 1)
    }

    pub fn v_inv() -> Self {
        Self::monomial(1, -1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn add_term(&mut self, e: i32, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(e).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i32) -> i64 {
        self.terms.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// `v -> v^-1`.
    pub fn bar(&self) -> Self {
        LaurentInt { terms: self.terms.iter().map(|(&e, &c)| (-e, c)).collect() }
    }

    pub fn shift(&self, k: i32) -> Self {
        LaurentInt { terms: self.terms.iter().map(|(&e, &c)| (e + k, c)).collect() }
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(&e, &c)| (e, c * k)))
    }

    pub fn as_constant(&self) -> Option<i64> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&0).copied(),
            _ => None,
        }
    }

    pub fn has_nonnegative_coefficients(&self) -> bool {
        self.terms.values().all(|&c| c >= 0)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = || Error::Parse(format!("Laurent polynomial '{text}'"));
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "0" {
            return Ok(Self::zero());
        }
        // Split before every sign that does not belong to an exponent.
        let mut terms: Vec<String> = Vec::new();
        let mut prev = ' ';
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && prev != '^' && prev != '(' || terms.is_empty() {
                terms.push(String::new());
            }
            terms.last_mut().unwrap().push(ch);
            prev = ch;
        }
        let mut out = Self::zero();
        for term in terms {
            let (sign, body) = match term.as_bytes()[0] {
                b'-' => (-1, &term[1..]),
                b'+' => (1, &term[1..]),
                _ => (1, term.as_str()),
            };
            let (coef, mono) = match body.find('v') {
                None => (body, ""),
                Some(i) => (body[..i].trim_end_matches('*'), &body[i..]),
            };
            let c: i64 = if coef.is_empty() { 1 } else { coef.parse().map_err(|_| err())? };
            let e: i32 = if mono.is_empty() {
                0
            } else if mono == "v" {
                1
            } else {
                mono.strip_prefix("v^").ok_or_else(err)?.trim_matches(['(', ')']).parse().map_err(|_| err())?
            };
            out.add_term(e, sign * c);
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentInt {
    /// Highest power first, e.g. `v^3 + 2*v - v^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (&e, &c)) in self.terms.iter().rev().enumerate() {
            let mag = c.unsigned_abs();
            if k == 0 {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            }
            match e {
                0 => write!(f, "{mag}")?,
                _ => {
                    if mag != 1 {
                        write!(f, "{mag}*")?;
                    }
                    if e == 1 {
                        f.write_str("v")?;
                    } else {
                        write!(f, "v^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl AddAssign<&LaurentInt> for LaurentInt {
    fn add_assign(&mut self, rhs: &LaurentInt) {
        for (&e, &c) in &rhs.terms {
            self.add_term(e, c);
        }
    }
}

impl SubAssign<&LaurentInt> for LaurentInt {
    fn sub_assign(&mut self, rhs: &LaurentInt) {
        for (&e, &c) in &rhs.terms {
            self.add_term(e, -c);
        }
    }
}

impl Add for &LaurentInt {
    type Output = LaurentInt;
    fn add(self, rhs: &LaurentInt) -> LaurentInt {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &LaurentInt {
    type Output = LaurentInt;
    fn sub(self, rhs: &LaurentInt) -> LaurentInt {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &LaurentInt {
    type Output = LaurentInt;
    fn mul(self, rhs: &LaurentInt) -> LaurentInt {
        let mut out = LaurentInt::zero();
        for (&a, &c) in &self.terms {
            for (&b, &d) in &rhs.terms {
                out.add_term(a + b, c * d);
            }
        }
        out
    }
}

impl Neg for &LaurentInt {
    type Output = LaurentInt;
    fn neg(self) -> LaurentInt {
        self.scale(-1)
    }
}
