use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::datum::CoxeterDatum;
use crate::error::{Error, Result};
use crate::poly::{GradedPoly, Monomial, Scalar};

/// Sequence of simple reflection indices (0-based internally).
pub type Word = Vec<usize>;

/// Group element, an index into the element table of a [`CoxeterGroup`].
/// Indices are sorted by length, then ShortLex order of normal forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub u32);

impl Element {
    pub const IDENTITY: Element = Element(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Refuse to enumerate finite groups larger than this.
pub const MAX_ELEMENTS: usize = 2_000_000;

/// A Coxeter group with its element table, enumerated completely for
/// finite types and up to a length bound otherwise.
pub struct CoxeterGroup {
    datum: Arc<CoxeterDatum>,
    bound: Option<usize>,
    words: Vec<Word>,
    lengths: Vec<usize>,
    mats: Vec<Box<[i64]>>,
    index: HashMap<Box<[i64]>, u32>,
    right: Vec<Vec<Option<u32>>>,
    left: Vec<Vec<Option<u32>>>,
    inv: Vec<u32>,
    simple_mats: Vec<Vec<i64>>,
}

impl fmt::Debug for CoxeterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoxeterGroup")
            .field("datum", &self.datum.label())
            .field("bound", &self.bound)
            .field("size", &self.words.len())
            .finish()
    }
}

fn mat_mul(d: usize, a: &[i64], b: &[i64]) -> Box<[i64]> {
    let mut out = vec![0i64; d * d];
    for i in 0..d {
        for k in 0..d {
            let x = a[i * d + k];
            if x == 0 {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += x * b[k * d + j];
            }
        }
    }
    out.into_boxed_slice()
}

impl CoxeterGroup {
    /// Finite groups are enumerated fully; infinite ones need `bound`.
    /// A bound on a finite group truncates it as well.
    pub fn new(datum: CoxeterDatum, bound: Option<usize>) -> Result<Self> {
        if !datum.is_finite() && bound.is_none() {
            return Err(Error::MissingTop);
        }
        let d = datum.dim();
        let r = datum.rank();
        let simple_mats: Vec<Vec<i64>> = (0..r).map(|i| datum.reflection_matrix(i)).collect();
        let mut id = vec![0i64; d * d];
        for i in 0..d {
            id[i * d + i] = 1;
        }
        let id: Box<[i64]> = id.into_boxed_slice();
        let mut g = CoxeterGroup {
            datum: Arc::new(datum),
            bound,
            words: vec![vec![]],
            lengths: vec![0],
            mats: vec![id.clone()],
            index: HashMap::from([(id, 0)]),
            right: vec![],
            left: vec![],
            inv: vec![],
            simple_mats,
        };
        let mut layer_start = 0;
        let mut layer_end = 1;
        let mut len = 0;
        loop {
            if bound.is_some_and(|b| len >= b) || layer_start == layer_end {
                break;
            }
            for x in layer_start..layer_end {
                for s in 0..r {
                    let m = mat_mul(d, &g.mats[x], &g.simple_mats[s]);
                    if g.index.contains_key(&m) {
                        continue;
                    }
                    let id = g.words.len() as u32;
                    let mut w = g.words[x].clone();
                    w.push(s);
                    g.words.push(w);
                    g.lengths.push(len + 1);
                    g.mats.push(m.clone());
                    g.index.insert(m, id);
                }
            }
            if g.words.len() > MAX_ELEMENTS {
                return Err(Error::InvalidDatum(format!("group exceeds {MAX_ELEMENTS} elements")));
            }
            layer_start = layer_end;
            layer_end = g.words.len();
            len += 1;
        }
        let n = g.words.len();
        g.right = (0..n)
            .map(|x| (0..r).map(|s| g.index.get(&mat_mul(d, &g.mats[x], &g.simple_mats[s])).copied()).collect())
            .collect();
        g.left = (0..n)
            .map(|x| (0..r).map(|s| g.index.get(&mat_mul(d, &g.simple_mats[s], &g.mats[x])).copied()).collect())
            .collect();
        g.inv = vec![0; n];
        for x in 1..n {
            let w = &g.words[x];
            let parent = g.lookup_word_prefix(&w[..w.len() - 1]);
            let s = *w.last().unwrap();
            // (ys)^-1 = s y^-1
            g.inv[x] = g.left[g.inv[parent as usize] as usize][s].expect("inverse has the same length");
        }
        Ok(g)
    }

    fn lookup_word_prefix(&self, w: &[usize]) -> u32 {
        let mut x = 0u32;
        for &s in w {
            x = self.right[x as usize][s].expect("prefix of a normal form");
        }
        x
    }

    pub fn datum(&self) -> &CoxeterDatum {
        &self.datum
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    /// Length bound of the enumeration (`None` when the whole finite group is present).
    pub fn bound(&self) -> Option<usize> {
        self.bound
    }

    pub fn is_complete(&self) -> bool {
        self.datum.is_finite() && self.bound.is_none_or(|b| b >= self.max_length())
    }

    pub fn size(&self) -> usize {
        self.words.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.words.len() as u32).map(Element)
    }

    pub fn identity(&self) -> Element {
        Element::IDENTITY
    }

    pub fn simple(&self, s: usize) -> Element {
        Element(self.right[0][s].expect("simple reflections are enumerated"))
    }

    pub fn length(&self, x: Element) -> usize {
        self.lengths[x.index()]
    }

    fn max_length(&self) -> usize {
        *self.lengths.last().unwrap()
    }

    /// ShortLex-minimal reduced word.
    pub fn normal_form(&self, x: Element) -> &Word {
        &self.words[x.index()]
    }

    pub fn matrix(&self, x: Element) -> &[i64] {
        &self.mats[x.index()]
    }

    pub fn inverse(&self, x: Element) -> Element {
        Element(self.inv[x.index()])
    }

    pub fn right_mul(&self, x: Element, s: usize) -> Result<Element> {
        match self.right[x.index()][s] {
            Some(y) => Ok(Element(y)),
            None => Err(Error::OutsideRegion(self.bound.unwrap_or(0))),
        }
    }

    pub fn left_mul(&self, s: usize, x: Element) -> Result<Element> {
        match self.left[x.index()][s] {
            Some(y) => Ok(Element(y)),
            None => Err(Error::OutsideRegion(self.bound.unwrap_or(0))),
        }
    }

    /// `l(xs) < l(x)`.
    pub fn is_right_descent(&self, x: Element, s: usize) -> bool {
        match self.right[x.index()][s] {
            Some(y) => self.lengths[y as usize] < self.lengths[x.index()],
            None => false,
        }
    }

    pub fn is_left_descent(&self, s: usize, x: Element) -> bool {
        match self.left[x.index()][s] {
            Some(y) => self.lengths[y as usize] < self.lengths[x.index()],
            None => false,
        }
    }

    fn check_word(&self, w: &[usize]) -> Result<()> {
        match w.iter().find(|&&s| s >= self.rank()) {
            Some(s) => Err(Error::InvalidWord(format!("letter {} exceeds rank {}", s + 1, self.rank()))),
            None => Ok(()),
        }
    }

    /// Product of the letters of `w`.
    pub fn element_of(&self, w: &[usize]) -> Result<Element> {
        self.check_word(w)?;
        let mut x = 0u32;
        for (k, &s) in w.iter().enumerate() {
            match self.right[x as usize][s] {
                Some(y) => x = y,
                None => return self.element_of_matrix(w, k, x),
            }
        }
        Ok(Element(x))
    }

    fn element_of_matrix(&self, w: &[usize], from: usize, x: u32) -> Result<Element> {
        let d = self.datum.dim();
        let mut m: Box<[i64]> = self.mats[x as usize].clone();
        for &s in &w[from..] {
            m = mat_mul(d, &m, &self.simple_mats[s]);
        }
        self.index.get(&m).map(|&i| Element(i)).ok_or(Error::OutsideRegion(self.bound.unwrap_or(0)))
    }

    pub fn is_reduced(&self, w: &[usize]) -> Result<bool> {
        Ok(self.length(self.element_of(w)?) == w.len())
    }

    pub fn mul(&self, x: Element, y: Element) -> Result<Element> {
        let mut z = x;
        for &s in self.normal_form(y) {
            z = match self.right[z.index()][s] {
                Some(v) => Element(v),
                None => {
                    let d = self.datum.dim();
                    let m = mat_mul(d, self.matrix(x), self.matrix(y));
                    return self.index.get(&m).map(|&i| Element(i)).ok_or(Error::OutsideRegion(self.bound.unwrap_or(0)));
                }
            };
        }
        Ok(z)
    }

    /// Product computed on matrices only; `None` when outside the table.
    pub fn lookup_matrix(&self, m: &[i64]) -> Option<Element> {
        self.index.get(m).map(|&i| Element(i))
    }

    /// Bruhat order `x <= y`.
    pub fn bruhat_leq(&self, x: Element, y: Element) -> bool {
        let (mut x, mut y) = (x, y);
        loop {
            if x == Element::IDENTITY {
                return true;
            }
            if self.length(x) > self.length(y) {
                return false;
            }
            if x == y {
                return true;
            }
            let s = *self.normal_form(y).last().unwrap();
            let ys = Element(self.right[y.index()][s].unwrap());
            if self.is_right_descent(x, s) {
                x = Element(self.right[x.index()][s].unwrap());
            }
            y = ys;
        }
    }

    /// Action of `w` on a polynomial: the ring automorphism extending the
    /// linear action on `V*`.
    pub fn act(&self, w: Element, f: &GradedPoly) -> Result<GradedPoly> {
        let d = self.datum.dim();
        if f.nvars() != d {
            return Err(Error::DatumMismatch(format!("polynomial has {} variables, datum has {d}", f.nvars())));
        }
        let m = self.matrix(w);
        let images: Vec<GradedPoly> = (0..d)
            .map(|j| {
                GradedPoly::from_terms(
                    d,
                    (0..d).filter(|&k| m[k * d + j] != 0).map(|k| (Monomial::var(d, k), Scalar::from_int(m[k * d + j]))),
                )
            })
            .collect();
        Ok(f.substitute(&images))
    }

    /// Formats an element as dotted letters, e.g. `s1.s2.s1`; identity is `e`.
    pub fn format_word(w: &[usize]) -> String {
        if w.is_empty() {
            return "e".into();
        }
        w.iter().map(|s| format!("s{}", s + 1)).collect::<Vec<_>>().join(".")
    }

    pub fn format(&self, x: Element) -> String {
        Self::format_word(self.normal_form(x))
    }

    /// Parses `s1.s2.s1`, `1.2.1`, `121` (single digit letters) or `e`.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "e" {
            return Ok(vec![]);
        }
        let tokens: Vec<&str> = if text.contains(['.', ',', ' ']) {
            text.split(['.', ',', ' ']).filter(|t| !t.is_empty()).collect()
        } else if text.starts_with('s') {
            text.split('s').filter(|t| !t.is_empty()).collect()
        } else {
            text.split("").filter(|t| !t.is_empty()).collect()
        };
        let mut w = Vec::new();
        for t in tokens {
            let t = t.trim_start_matches('s');
            let k: usize = t.parse().map_err(|_| Error::InvalidWord(format!("bad letter '{t}' in '{text}'")))?;
            if k == 0 || k > self.rank() {
                return Err(Error::InvalidWord(format!("letter {k} out of range 1..={}", self.rank())));
            }
            w.push(k - 1);
        }
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(label: &str) -> CoxeterGroup {
        CoxeterGroup::new(CoxeterDatum::from_label(label).unwrap(), None).unwrap()
    }

    #[test]
    fn group_orders() {
        assert_eq!(group("A1").size(), 2);
        assert_eq!(group("A2").size(), 6);
        assert_eq!(group("B2").size(), 8);
        assert_eq!(group("G2").size(), 12);
        assert_eq!(group("A3").size(), 24);
        assert_eq!(group("B3").size(), 48);
        assert_eq!(group("A1xA1").size(), 4);
    }

    #[test]
    fn element_of_words() {
        let g = group("A2");
        assert_eq!(g.element_of(&[0, 0]).unwrap(), g.identity());
        let sts = g.element_of(&[0, 1, 0]).unwrap();
        assert_eq!(g.length(sts), 3);
        assert_eq!(g.element_of(&[0, 1, 0, 1]).unwrap(), g.element_of(&[1, 0]).unwrap());
        assert!(g.element_of(&[2]).is_err());
    }

    #[test]
    fn affine_needs_bound() {
        let d = CoxeterDatum::from_label("A1~").unwrap();
        assert_eq!(CoxeterGroup::new(d.clone(), None).unwrap_err(), Error::MissingTop);
        let g = CoxeterGroup::new(d, Some(4)).unwrap();
        assert_eq!(g.size(), 9);
        let top = g.element_of(&[0, 1, 0, 1]).unwrap();
        assert!(g.right_mul(top, 0).is_err());
    }

    #[test]
    fn parse_and_format() {
        let g = group("A2");
        assert_eq!(g.parse_word("s1.s2.s1").unwrap(), vec![0, 1, 0]);
        assert_eq!(g.parse_word("121").unwrap(), vec![0, 1, 0]);
        assert_eq!(g.parse_word("e").unwrap(), Vec::<usize>::new());
        assert!(g.parse_word("s3").is_err());
        assert_eq!(g.format(g.element_of(&[1, 0, 1]).unwrap()), "s1.s2.s1");
    }

    #[test]
    fn action_on_polynomials() {
        let g = group("A2");
        let xs = GradedPoly::var(2, 0);
        let xt = GradedPoly::var(2, 1);
        let s = g.simple(0);
        assert_eq!(g.act(s, &xs).unwrap(), -&xs);
        assert_eq!(g.act(s, &xt).unwrap(), &xt + &xs);
        let st = g.element_of(&[0, 1]).unwrap();
        let f = &(&xs * &xt) + &xt;
        let lhs = g.act(st, &f).unwrap();
        let rhs = g.act(s, &g.act(g.simple(1), &f).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}
