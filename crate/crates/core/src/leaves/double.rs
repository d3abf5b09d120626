use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::{bits_string, Bits, Leaf, Leaves};
use crate::bimod::{BSElement, Bimod, Generator, Morphism, Step};
use crate::coxeter::{CoxeterGroup, Element, Word};
use crate::error::{Error, Result};
use crate::hecke::LaurentInt;
use crate::poly::GradedPoly;

/// Sort key of the pair `(i, j)`: `j` lexicographically, then the number of
/// ones in `i`, then `i` lexicographically read from its last letter (the
/// order in which the lower letters occur in the test elements).
pub fn order_key(i: &[u8], j: &[u8]) -> (Bits, usize, Bits) {
    (j.to_vec(), i.iter().filter(|&&b| b == 1).count(), i.iter().rev().copied().collect())
}

/// `lower^a o upper` for leaves with a common target.
#[derive(Clone, Debug)]
pub struct DoubleLeaf {
    pub upper: Leaf,
    pub lower: Leaf,
    pub target: Element,
    /// `i[k] = 1` iff step `k` of the lower leaf does not multiply; with this
    /// indexing the lower leaf sends `1 (x) x_{r_1}^{i_1} (x) ...` to `x^(x)` modulo
    /// positive degree.
    pub i: Bits,
    /// Join bits of the upper leaf.
    pub j: Bits,
    pub degree: i32,
    pub morphism: Arc<Morphism>,
}

impl DoubleLeaf {
    pub fn key(&self) -> (Bits, usize, Bits) {
        order_key(&self.i, &self.j)
    }

    pub fn label(&self) -> String {
        format!("i={} j={}", bits_string(&self.i), bits_string(&self.j))
    }
}

/// Evaluation of morphisms `B_s -> B_r` through the nested caps
/// `B_r B_{r^op} -> R` at the test elements
/// `x_{s_1}^{j_1} (x) ... (x) x_{s_n}^{j_n} (x) x_{r_p}^{i_p} (x) ... (x) x_{r_1}^{i_1} (x) 1`.
pub struct PairingTable {
    bimod: Arc<Bimod>,
    s: Word,
    r: Word,
    cap: Vec<GradedPoly>,
    tests: Mutex<HashMap<(Bits, Bits), Arc<BSElement>>>,
}

impl PairingTable {
    pub fn new(bimod: Arc<Bimod>, s: &[usize], r: &[usize]) -> Result<Self> {
        let p = r.len();
        let mut word = r.to_vec();
        word.extend(r.iter().rev());
        let mut steps = Vec::with_capacity(2 * p);
        for k in (0..p).rev() {
            steps.push(Step { offset: k, generator: Generator::Join(r[k]) });
            steps.push(Step { offset: k, generator: Generator::Mult(r[k]) });
        }
        let cap = bimod.from_steps(&word, &steps)?;
        let cap = cap.images.iter().map(|m| m.coeff(0).clone()).collect();
        Ok(PairingTable { bimod, s: s.to_vec(), r: r.to_vec(), cap, tests: Mutex::default() })
    }

    fn test_element(&self, j: &[u8], i: &[u8]) -> Result<Arc<BSElement>> {
        let key = (j.to_vec(), i.to_vec());
        if let Some(t) = self.tests.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let nv = self.bimod.nvars();
        let pow = |s: usize, b: u8| if b == 1 { GradedPoly::var(nv, s) } else { GradedPoly::one(nv) };
        let mut word = self.s.clone();
        word.extend(self.r.iter().rev());
        let mut slots: Vec<GradedPoly> = self.s.iter().zip(j).map(|(&s, &b)| pow(s, b)).collect();
        slots.extend(self.r.iter().zip(i).rev().map(|(&r, &b)| pow(r, b)));
        slots.push(GradedPoly::one(nv));
        let t = Arc::new(self.bimod.normal_form(&word, &slots)?);
        Ok(self.tests.lock().unwrap().entry(key).or_insert(t).clone())
    }

    /// `cap_r o (f (x) id)` at the test element indexed by `(j, i)`.
    pub fn eval(&self, f: &Morphism, j: &[u8], i: &[u8]) -> Result<GradedPoly> {
        if f.source != self.s || f.target != self.r {
            return Err(Error::Shape("pairing of a morphism with the wrong words".into()));
        }
        let n = self.s.len();
        let p = self.r.len();
        let t = self.test_element(j, i)?;
        let mut out = GradedPoly::zero(self.bimod.nvars());
        for (mask, c) in t.nonzero() {
            let e = mask & ((1 << n) - 1);
            let tail = mask >> n;
            for (e2, d) in f.images[e].nonzero() {
                let cap = &self.cap[e2 | (tail << p)];
                if !cap.is_zero() {
                    out.add_assign_ref(&(&(c * d) * cap));
                }
            }
        }
        Ok(out)
    }

    /// All values, keyed by `(j, i)`.
    pub fn pairing_eval(&self, f: &Morphism) -> Result<BTreeMap<(Bits, Bits), GradedPoly>> {
        let n = self.s.len();
        let p = self.r.len();
        let bits = |m: usize, len: usize| (0..len).map(|k| (m >> (len - 1 - k) & 1) as u8).collect::<Bits>();
        let mut out = BTreeMap::new();
        for a in 0..1usize << n {
            for b in 0..1usize << p {
                let (j, i) = (bits(a, n), bits(b, p));
                let v = self.eval(f, &j, &i)?;
                out.insert((j, i), v);
            }
        }
        Ok(out)
    }
}

/// Double leaves basis of `Hom(B_s, B_r)`, sorted by the order on `(i, j)`.
pub struct DoubleLeaves {
    pub s: Word,
    pub r: Word,
    pub leaves: Vec<DoubleLeaf>,
    pairing: PairingTable,
}

impl DoubleLeaves {
    pub fn new(leaves: &Leaves, s: &[usize], r: &[usize]) -> Result<Self> {
        Self::with_upper(leaves, s, r, |l| Ok(l.morphism().clone()))
    }

    /// Double leaves with each upper leaf replaced by `upper(l)`, a morphism
    /// `B_s -> B_x` for the target `x` of `l`.
    pub fn with_upper(
        leaves: &Leaves,
        s: &[usize],
        r: &[usize],
        mut upper: impl FnMut(&Leaf) -> Result<Arc<Morphism>>,
    ) -> Result<Self> {
        let up = leaves.light_leaves(s)?;
        let down = leaves.light_leaves(r)?;
        let mut by_target: HashMap<Element, Vec<&Leaf>> = HashMap::new();
        for l in down.iter() {
            by_target.entry(l.target).or_default().push(l);
        }
        let mut out = Vec::new();
        for u in up.iter() {
            let Some(lows) = by_target.get(&u.target) else { continue };
            let f = upper(u)?;
            for &l in lows {
                let adj = leaves.adjoint(l)?;
                out.push(DoubleLeaf {
                    upper: u.clone(),
                    lower: l.clone(),
                    target: u.target,
                    i: l.i.iter().map(|b| 1 - b).collect(),
                    j: u.j.clone(),
                    degree: u.degree + l.degree,
                    morphism: Arc::new(adj.compose(&f)?),
                });
            }
        }
        out.sort_by_key(DoubleLeaf::key);
        if out.windows(2).any(|w| w[0].key() == w[1].key()) {
            return Err(Error::TheoryViolation(format!(
                "two double leaves of {} -> {} share an index",
                CoxeterGroup::format_word(s),
                CoxeterGroup::format_word(r)
            )));
        }
        let pairing = PairingTable::new(leaves.bimod().clone(), s, r)?;
        Ok(DoubleLeaves { s: s.to_vec(), r: r.to_vec(), leaves: out, pairing })
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn pairing(&self) -> &PairingTable {
        &self.pairing
    }

    /// `sum v^deg` over the basis.
    pub fn degree_count(&self) -> LaurentInt {
        let mut c = LaurentInt::zero();
        for d in &self.leaves {
            c.add_term(d.degree, 1);
        }
        c
    }

    /// Entry `[t][d]`: double leaf `d` paired with the test element indexed by
    /// the key of double leaf `t`.
    pub fn pairing_matrix(&self) -> Result<Vec<Vec<GradedPoly>>> {
        self.leaves
            .iter()
            .map(|t| self.leaves.iter().map(|d| self.pairing.eval(&d.morphism, &t.j, &t.i)).collect())
            .collect()
    }

    /// Checks that the pairing matrix is lower unitriangular.
    pub fn check_unitriangular(&self) -> Result<()> {
        let m = self.pairing_matrix()?;
        let nv = self.pairing.bimod.nvars();
        for (t, row) in m.iter().enumerate() {
            for (d, v) in row.iter().enumerate().skip(t) {
                let ok = if d == t { *v == GradedPoly::one(nv) } else { v.is_zero() };
                if !ok {
                    return Err(Error::TheoryViolation(format!(
                        "pairing of {} at the test of {} is {v}",
                        self.leaves[d].label(),
                        self.leaves[t].label()
                    )));
                }
            }
        }
        Ok(())
    }

    /// `sum_d c_d d`.
    pub fn combine(&self, coeffs: &[GradedPoly]) -> Result<Morphism> {
        let nv = self.pairing.bimod.nvars();
        let mut out = Morphism::zero(nv, &self.s, &self.r, 0);
        let mut degree = None;
        for (c, d) in coeffs.iter().zip(&self.leaves) {
            if c.is_zero() {
                continue;
            }
            out.add_scaled(c, &d.morphism)?;
            if degree.is_none() {
                degree = c.degree().map(|k| k + d.degree);
            }
        }
        out.degree = degree.unwrap_or(0);
        Ok(out)
    }

    /// Left coefficients of `f` in the basis, by forward substitution against
    /// the unitriangular pairing, verified on every basis element.
    pub fn expand(&self, f: &Morphism) -> Result<Vec<GradedPoly>> {
        let nv = self.pairing.bimod.nvars();
        let mut coeffs: Vec<GradedPoly> = Vec::with_capacity(self.leaves.len());
        for t in &self.leaves {
            let mut v = self.pairing.eval(f, &t.j, &t.i)?;
            for (c, d) in coeffs.iter().zip(&self.leaves) {
                if !c.is_zero() {
                    v.sub_assign_ref(&(c * &self.pairing.eval(&d.morphism, &t.j, &t.i)?));
                }
            }
            coeffs.push(v);
        }
        let back = self.combine(&coeffs)?;
        if back.images != f.images {
            return Err(Error::TheoryViolation(format!(
                "morphism {} -> {} is not in the span of its double leaves",
                CoxeterGroup::format_word(&self.s),
                CoxeterGroup::format_word(&self.r)
            )));
        }
        debug_assert!(coeffs.iter().all(|c| c.nvars() == nv));
        Ok(coeffs)
    }

    /// Nonzero coefficients of `f`, keyed by position in the basis.
    pub fn expand_in_dlb(&self, f: &Morphism) -> Result<BTreeMap<usize, GradedPoly>> {
        Ok(self.expand(f)?.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
    }
}
