//! Hecke algebra in the normalized standard basis `T~_x = v^{l(x)} T_x`,
//! the bar involution and the Kazhdan-Lusztig basis `C'_x`.

mod laurent;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

pub use laurent::LaurentInt;

use crate::coxeter::{CoxeterGroup, Element};
use crate::error::{Error, Result};

/// Finite combination of `T~_x` with Laurent polynomial coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeckeElt {
    terms: BTreeMap<Element, LaurentInt>,
}

impl HeckeElt {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `T~_x`.
    pub fn t(x: Element) -> Self {
        Self::term(x, LaurentInt::one())
    }

    pub fn term(x: Element, c: LaurentInt) -> Self {
        let mut h = Self::zero();
        h.add_term(x, &c);
        h
    }

    pub fn add_term(&mut self, x: Element, c: &LaurentInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(x).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&x);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, x: Element) -> LaurentInt {
        self.terms.get(&x).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Element, &LaurentInt)> {
        self.terms.iter().map(|(&x, c)| (x, c))
    }

    pub fn support(&self) -> impl Iterator<Item = Element> + '_ {
        self.terms.keys().copied()
    }

    pub fn add_assign(&mut self, other: &HeckeElt) {
        for (&x, c) in &other.terms {
            self.add_term(x, c);
        }
    }

    pub fn sub_assign(&mut self, other: &HeckeElt) {
        for (&x, c) in &other.terms {
            self.add_term(x, &-c);
        }
    }

    pub fn scale(&self, c: &LaurentInt) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for (&x, d) in &self.terms {
            out.add_term(x, &(c * d));
        }
        out
    }

    /// Text form `c_1 T(x_1) + ...` with elements formatted by `g`.
    pub fn display<'a>(&'a self, g: &'a CoxeterGroup) -> impl fmt::Display + 'a {
        struct D<'a>(&'a HeckeElt, &'a CoxeterGroup);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_zero() {
                    return f.write_str("0");
                }
                let parts: Vec<String> =
                    self.0.terms.iter().rev().map(|(&x, c)| format!("({c})*T[{}]", self.1.format(x))).collect();
                f.write_str(&parts.join(" + "))
            }
        }
        D(self, g)
    }
}

/// Hecke algebra of a group, caching bar images and the KL basis.
pub struct Hecke {
    group: Arc<CoxeterGroup>,
    kl: Mutex<HashMap<Element, Arc<HeckeElt>>>,
    bar_t: Mutex<HashMap<Element, Arc<HeckeElt>>>,
}

impl Hecke {
    pub fn new(group: Arc<CoxeterGroup>) -> Self {
        Hecke { group, kl: Mutex::default(), bar_t: Mutex::default() }
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        &self.group
    }

    /// `a * T~_s`.
    pub fn mul_t_right(&self, a: &HeckeElt, s: usize) -> Result<HeckeElt> {
        let g = &*self.group;
        let q = &LaurentInt::v_inv() - &LaurentInt::v();
        let mut out = HeckeElt::zero();
        for (&x, c) in &a.terms {
            let xs = g.right_mul(x, s)?;
            out.add_term(xs, c);
            if g.length(xs) < g.length(x) {
                out.add_term(x, &(&q * c));
            }
        }
        Ok(out)
    }

    /// `T~_s * a`.
    pub fn mul_t_left(&self, s: usize, a: &HeckeElt) -> Result<HeckeElt> {
        let g = &*self.group;
        let q = &LaurentInt::v_inv() - &LaurentInt::v();
        let mut out = HeckeElt::zero();
        for (&x, c) in &a.terms {
            let sx = g.left_mul(s, x)?;
            out.add_term(sx, c);
            if g.length(sx) < g.length(x) {
                out.add_term(x, &(&q * c));
            }
        }
        Ok(out)
    }

    /// `a * C'_s = a * (T~_s + v)`.
    pub fn mul_c_right(&self, a: &HeckeElt, s: usize) -> Result<HeckeElt> {
        let mut out = self.mul_t_right(a, s)?;
        out.add_assign(&a.scale(&LaurentInt::v()));
        Ok(out)
    }

    pub fn mul(&self, a: &HeckeElt, b: &HeckeElt) -> Result<HeckeElt> {
        let mut out = HeckeElt::zero();
        for (&y, c) in &b.terms {
            let mut part = a.clone();
            for &s in self.group.normal_form(y) {
                part = self.mul_t_right(&part, s)?;
            }
            out.add_assign(&part.scale(c));
        }
        Ok(out)
    }

    /// Product `C'_{w_1} ... C'_{w_n}`.
    pub fn c_word(&self, w: &[usize]) -> Result<HeckeElt> {
        let mut out = HeckeElt::t(Element::IDENTITY);
        for &s in w {
            out = self.mul_c_right(&out, s)?;
        }
        Ok(out)
    }

    fn bar_t(&self, x: Element) -> Result<Arc<HeckeElt>> {
        if let Some(b) = self.bar_t.lock().unwrap().get(&x) {
            return Ok(b.clone());
        }
        let g = &*self.group;
        let b = if x == Element::IDENTITY {
            HeckeElt::t(x)
        } else {
            let s = *g.normal_form(x).last().unwrap();
            let prev = self.bar_t(g.right_mul(x, s)?)?;
            // bar(T~_s) = T~_s + (v - v^-1)
            let mut b = self.mul_t_right(&prev, s)?;
            b.add_assign(&prev.scale(&(&LaurentInt::v() - &LaurentInt::v_inv())));
            b
        };
        let b = Arc::new(b);
        self.bar_t.lock().unwrap().insert(x, b.clone());
        Ok(b)
    }

    pub fn bar(&self, a: &HeckeElt) -> Result<HeckeElt> {
        let mut out = HeckeElt::zero();
        for (&x, c) in &a.terms {
            out.add_assign(&self.bar_t(x)?.scale(&c.bar()));
        }
        Ok(out)
    }

    /// Kazhdan-Lusztig basis element `C'_x`.
    pub fn kl_element(&self, x: Element) -> Result<Arc<HeckeElt>> {
        if let Some(c) = self.kl.lock().unwrap().get(&x) {
            return Ok(c.clone());
        }
        let g = &*self.group;
        let c = if x == Element::IDENTITY {
            HeckeElt::t(x)
        } else {
            let s = *g.normal_form(x).last().unwrap();
            let y = g.right_mul(x, s)?;
            let cy = self.kl_element(y)?;
            let mut c = self.mul_c_right(&*cy, s)?;
            for (&z, h) in &cy.terms {
                if z == y || !g.is_right_descent(z, s) {
                    continue;
                }
                let mu = h.coeff(1);
                if mu != 0 {
                    c.sub_assign(&self.kl_element(z)?.scale(&LaurentInt::monomial(mu, 0)));
                }
            }
            c
        };
        let c = Arc::new(c);
        self.kl.lock().unwrap().insert(x, c.clone());
        Ok(c)
    }

    /// `h_{y,x}`: coefficient of `T~_y` in `C'_x`.
    pub fn kl_polynomial(&self, y: Element, x: Element) -> Result<LaurentInt> {
        Ok(self.kl_element(x)?.coeff(y))
    }

    /// Coefficients of a bar invariant element in the KL basis.
    pub fn kl_decompose(&self, a: &HeckeElt) -> Result<BTreeMap<Element, LaurentInt>> {
        let mut rest = a.clone();
        let mut out = BTreeMap::new();
        while let Some((&z, c)) = rest.terms.iter().next_back() {
            let c = c.clone();
            if c.bar() != c {
                return Err(Error::TheoryViolation(format!(
                    "element is not bar invariant: leading coefficient {c} at {}",
                    self.group.format(z)
                )));
            }
            rest.sub_assign(&self.kl_element(z)?.scale(&c));
            out.insert(z, c);
        }
        Ok(out)
    }

    /// Multiplicities `m_y` in `C'_x C'_s = C'_{xs} + sum m_y C'_y`.
    pub fn kl_multiplicities(&self, x: Element, s: usize) -> Result<BTreeMap<Element, u64>> {
        let g = &*self.group;
        let xs = g.right_mul(x, s)?;
        if g.length(xs) < g.length(x) {
            return Err(Error::Precondition(format!("s{} is a right descent of {}", s + 1, g.format(x))));
        }
        let prod = self.mul_c_right(&*self.kl_element(x)?, s)?;
        let dec = self.kl_decompose(&prod)?;
        let mut out = BTreeMap::new();
        for (z, c) in dec {
            let m = c.as_constant().filter(|&m| m >= 0).ok_or_else(|| {
                Error::TheoryViolation(format!("KL multiplicity {c} at {} is not a nonnegative integer", g.format(z)))
            })?;
            if z == xs {
                if m != 1 {
                    return Err(Error::TheoryViolation("leading KL multiplicity is not 1".into()));
                }
            } else if m > 0 {
                out.insert(z, m as u64);
            }
        }
        Ok(out)
    }

    pub fn tau(x: Element, a: &HeckeElt) -> LaurentInt {
        a.coeff(x)
    }

    /// Graded rank of `Hom(B_s, B_r)`: `tau(C'_s C'_{r^op})`, cross-checked
    /// against `sum_x p_x^s p_x^r`.
    pub fn dlb_degree_oracle(&self, s: &[usize], r: &[usize]) -> Result<LaurentInt> {
        let mut w = s.to_vec();
        w.extend(r.iter().rev());
        let direct = Hecke::tau(Element::IDENTITY, &self.c_word(&w)?);
        let cs = self.c_word(s)?;
        let cr = self.c_word(r)?;
        let mut sum = LaurentInt::zero();
        for (x, p) in cs.terms() {
            sum += &(p * &cr.coeff(x));
        }
        if sum != direct {
            return Err(Error::TheoryViolation(format!("trace formulas disagree: {direct} vs {sum}")));
        }
        Ok(direct)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterDatum;

    fn hecke(label: &str) -> Hecke {
        Hecke::new(Arc::new(CoxeterGroup::new(CoxeterDatum::from_label(label).unwrap(), None).unwrap()))
    }

    fn lp(s: &str) -> LaurentInt {
        LaurentInt::parse(s).unwrap()
    }

    #[test]
    fn quadratic_relation() {
        let h = hecke("A1");
        let s = h.group().simple(0);
        let sq = h.mul(&HeckeElt::t(s), &HeckeElt::t(s)).unwrap();
        let mut expect = HeckeElt::t(Element::IDENTITY);
        expect.add_term(s, &lp("v^-1 - v"));
        assert_eq!(sq, expect);
    }

    #[test]
    fn bar_of_simple() {
        let h = hecke("A2");
        let s = h.group().simple(0);
        let mut expect = HeckeElt::t(s);
        expect.add_term(Element::IDENTITY, &lp("v - v^-1"));
        assert_eq!(h.bar(&HeckeElt::t(s)).unwrap(), expect);
        let x = HeckeElt::term(Element::IDENTITY, lp("v"));
        assert_eq!(h.bar(&x).unwrap(), HeckeElt::term(Element::IDENTITY, lp("v^-1")));
    }

    #[test]
    fn kl_elements_a2() {
        let h = hecke("A2");
        let g = h.group().clone();
        let s = g.simple(0);
        let cs = h.kl_element(s).unwrap();
        assert_eq!(cs.coeff(s), lp("1"));
        assert_eq!(cs.coeff(Element::IDENTITY), lp("v"));
        let sts = g.element_of(&[0, 1, 0]).unwrap();
        let c = h.kl_element(sts).unwrap();
        for (w, e) in [("121", "1"), ("12", "v"), ("21", "v"), ("1", "v^2"), ("2", "v^2"), ("e", "v^3")] {
            let x = g.element_of(&g.parse_word(w).unwrap()).unwrap();
            assert_eq!(c.coeff(x), lp(e), "{w}");
        }
    }

    #[test]
    fn multiplicities() {
        let h = hecke("A2");
        let g = h.group().clone();
        let st = g.element_of(&[0, 1]).unwrap();
        let m = h.kl_multiplicities(st, 0).unwrap();
        assert_eq!(m, BTreeMap::from([(g.simple(0), 1)]));
        assert!(h.kl_multiplicities(Element::IDENTITY, 1).unwrap().is_empty());
        let h2 = hecke("A1xA1");
        let s = h2.group().simple(0);
        assert!(h2.kl_multiplicities(s, 1).unwrap().is_empty());
        assert!(h.kl_multiplicities(st, 1).is_err());
    }

    #[test]
    fn trace_oracle() {
        let h = hecke("A2");
        assert_eq!(h.dlb_degree_oracle(&[0], &[0]).unwrap(), lp("v^2 + 1"));
        assert_eq!(h.dlb_degree_oracle(&[0], &[]).unwrap(), lp("v"));
        assert_eq!(h.dlb_degree_oracle(&[], &[]).unwrap(), lp("1"));
        assert_eq!(h.dlb_degree_oracle(&[0], &[1]).unwrap(), lp("v^2"));
    }
}
