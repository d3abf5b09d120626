//! Graded polynomial arithmetic on the realization space.
//!
//! Variables are the basis vectors of `V*`; each has degree 2. The first
//! `rank` variables are the simple roots `x_s`, further variables (affine
//! data only) complete the realization.

mod scalar;

use std::collections::BTreeMap;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

pub use scalar::{is_prime, Fp, Scalar};

use crate::error::{Error, Result};

/// Exponent vector. Ordered graded-lexicographically: total degree first,
/// then lexicographically with `x_1 > x_2 > ...`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Box<[u16]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e.into_boxed_slice())
    }

    pub fn from_exponents(e: Vec<u16>) -> Self {
        Monomial(e.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// All monomials of total degree `k` (polynomial degree `2k`), in
    /// increasing order.
    pub fn all_of_degree(nvars: usize, k: u32) -> Vec<Monomial> {
        fn rec(nvars: usize, i: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
            if i + 1 == nvars {
                cur.push(left as u16);
                out.push(Monomial(cur.clone().into_boxed_slice()));
                cur.pop();
                return;
            }
            for e in 0..=left {
                cur.push(e as u16);
                rec(nvars, i + 1, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if k == 0 {
                out.push(Monomial(Box::new([])));
            }
            return out;
        }
        rec(nvars, 0, k, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial with exact coefficients. Zero coefficients are never
/// stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl GradedPoly {
    pub fn zero(nvars: usize) -> Self {
        GradedPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Scalar::one())
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), Scalar::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &GradedPoly) {
        self.check_arity(other);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub_assign_ref(&mut self, other: &GradedPoly) {
        self.check_arity(other);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), -c);
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &GradedPoly, other: &GradedPoly) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        for (m1, c1) in &c.terms {
            for (m2, c2) in &other.terms {
                self.add_term(m1.mul(m2), c1 * c2);
            }
        }
    }

    pub fn scale(&self, c: &Scalar) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly::zero(self.nvars);
        }
        GradedPoly::from_terms(self.nvars, self.terms.iter().map(|(m, a)| (m.clone(), a * c)))
    }

    pub fn mul_var(&self, i: usize) -> GradedPoly {
        let mut out = GradedPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut e = m.0.to_vec();
            e[i] += 1;
            out.terms.insert(Monomial::from_exponents(e), c.clone());
        }
        out
    }

    /// Exact division by the variable `x_i`; `None` if some term lacks it.
    pub fn div_var(&self, i: usize) -> Option<GradedPoly> {
        let mut out = GradedPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                return None;
            }
            let mut e = m.0.to_vec();
            e[i] -= 1;
            out.terms.insert(Monomial::from_exponents(e), c.clone());
        }
        Some(out)
    }

    /// Degree in the grading `deg x_i = 2`, if homogeneous and nonzero.
    pub fn degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|m| 2 * m.total_degree() as i32);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Homogeneous components keyed by degree.
    pub fn homogeneous_components(&self) -> BTreeMap<i32, GradedPoly> {
        let mut out: BTreeMap<i32, GradedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(2 * m.total_degree() as i32)
                .or_insert_with(|| GradedPoly::zero(self.nvars))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Substitute `x_j -> images[j]` (a ring endomorphism).
    pub fn substitute(&self, images: &[GradedPoly]) -> GradedPoly {
        assert_eq!(images.len(), self.nvars, "substitution arity");
        let mut powers: Vec<Vec<GradedPoly>> = images.iter().map(|g| vec![GradedPoly::one(g.nvars), g.clone()]).collect();
        let mut out = GradedPoly::zero(images.first().map_or(self.nvars, |g| g.nvars));
        for (m, c) in &self.terms {
            let mut term = GradedPoly::constant(out.nvars, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = &powers[j][powers[j].len() - 1] * &images[j];
                    powers[j].push(next);
                }
                term = &term * &powers[j][e as usize];
            }
            out.add_assign_ref(&term);
        }
        out
    }

    /// Evaluate at a point.
    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = &t * &point[j];
                }
            }
            acc += &t;
        }
        acc
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<GradedPoly> {
        let mut out = GradedPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Reduce every coefficient modulo `p`.
    pub fn reduce_mod(&self, p: u64) -> Result<GradedPoly> {
        self.map_coeffs(|c| c.reduce_mod(p))
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Scalar> {
        self.terms.values()
    }

    fn check_arity(&self, other: &GradedPoly) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different realizations");
    }
}

impl<'a> Add<&'a GradedPoly> for &'a GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &'a GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a GradedPoly> for &'a GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &'a GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl<'a> Mul<&'a GradedPoly> for &'a GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: &'a GradedPoly) -> GradedPoly {
        self.check_arity(rhs);
        let mut out = GradedPoly::zero(self.nvars);
        out.add_scaled(self, rhs);
        out
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        self.scale(&Scalar::from_int(-1))
    }
}

impl fmt::Display for GradedPoly {
    /// Canonical text form, highest monomial first: `x_1^2*x_2 - 1/2*x_2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = matches!(c, Scalar::Rational(r) if r < &num_rational::BigRational::from_integer(0.into()));
            let mag = if negative { -c } else { c.clone() };
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x_{}", i + 1) } else { format!("x_{}^{}", i + 1, e) })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl GradedPoly {
    /// Parse the canonical text form in `nvars` variables.
    pub fn parse(nvars: usize, text: &str) -> Result<GradedPoly> {
        let text = text.trim();
        if text == "0" {
            return Ok(GradedPoly::zero(nvars));
        }
        let mut out = GradedPoly::zero(nvars);
        // Split into signed terms.
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut sign = false;
        let mut cur = String::new();
        for (idx, tok) in text.split(' ').enumerate() {
            match tok {
                "+" | "-" if idx > 0 => {
                    pieces.push((sign, std::mem::take(&mut cur)));
                    sign = tok == "-";
                }
                _ => cur.push_str(tok),
            }
        }
        pieces.push((sign, cur));
        for (neg, piece) in pieces {
            let (neg, piece) = match piece.strip_prefix('-') {
                Some(rest) => (!neg, rest.to_string()),
                None => (neg, piece),
            };
            let mut coeff = Scalar::one();
            let mut exps = vec![0u16; nvars];
            for factor in piece.split('*') {
                if let Some(v) = factor.strip_prefix("x_") {
                    let (idx, e) = match v.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u16>().map_err(|e| Error::Parse(e.to_string()))?),
                        None => (v, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| Error::Parse(format!("bad variable {factor}")))?;
                    if idx == 0 || idx > nvars {
                        return Err(Error::Parse(format!("variable {factor} out of range")));
                    }
                    exps[idx - 1] += e;
                } else {
                    coeff = &coeff * &Scalar::from_str(factor)?;
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(Monomial::from_exponents(exps), coeff);
        }
        Ok(out)
    }
}

/// Element of `V*` in the variable basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinForm {
    coeffs: Vec<Scalar>,
}

impl LinForm {
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        LinForm { coeffs }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); dim];
        coeffs[i] = Scalar::one();
        LinForm { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn to_poly(&self) -> GradedPoly {
        let n = self.coeffs.len();
        GradedPoly::from_terms(n, self.coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(n, i), c.clone())))
    }
}
