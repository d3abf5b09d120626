//! Bott-Samelson bimodules as free left modules, the generating morphisms
//! and their calculus.

mod braid;
mod element;
mod morphism;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

pub use element::BSElement;
pub use morphism::{Generator, Morphism, Step};

use crate::coxeter::{CoxeterDatum, CoxeterGroup, Element, Word};
use crate::error::{Error, Result};
use crate::poly::{GradedPoly, Scalar};

type FrameKey = (Word, usize, Generator, usize, usize);

/// Morphism from `B_w` to the twisted bimodule `R_x`, stored by the images
/// of the left basis (each a multiple of the generator `1_x`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedMorphism {
    pub source: Word,
    pub twist: Element,
    pub degree: i32,
    pub images: Vec<GradedPoly>,
}

/// Calculus of Bott-Samelson bimodules over a realization, with caches for
/// braid morphisms and framed generator coefficients.
pub struct Bimod {
    group: Arc<CoxeterGroup>,
    braid: RwLock<HashMap<(usize, usize), Arc<Morphism>>>,
    frames: RwLock<HashMap<FrameKey, Arc<BSElement>>>,
}

impl Bimod {
    pub fn new(group: Arc<CoxeterGroup>) -> Self {
        Bimod { group, braid: RwLock::default(), frames: RwLock::default() }
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        &self.group
    }

    pub fn datum(&self) -> &CoxeterDatum {
        self.group.datum()
    }

    pub fn nvars(&self) -> usize {
        self.datum().dim()
    }

    /// Rewrites the pure tensor `slots[0] (x) ... (x) slots[n]` of `B_w` on
    /// the left basis, splitting right to left with the Demazure operators.
    pub fn normal_form(&self, w: &[usize], slots: &[GradedPoly]) -> Result<BSElement> {
        let n = w.len();
        if slots.len() != n + 1 {
            return Err(Error::Shape(format!("{} slots for a word of length {n}", slots.len())));
        }
        let d = self.datum();
        let mut states: BTreeMap<usize, GradedPoly> = BTreeMap::from([(0, slots[n].clone())]);
        for k in (1..=n).rev() {
            let mut next: BTreeMap<usize, GradedPoly> = BTreeMap::new();
            for (mask, h) in states {
                if h.is_zero() {
                    continue;
                }
                let (plus, dd) = d.demazure_split(w[k - 1], &h)?;
                for (m, part) in [(mask, plus), (mask | 1 << (k - 1), dd)] {
                    if part.is_zero() {
                        continue;
                    }
                    let prod = &part * &slots[k - 1];
                    next.entry(m).or_insert_with(|| GradedPoly::zero(self.nvars())).add_assign_ref(&prod);
                }
            }
            states = next;
        }
        let mut out = BSElement::zero(self.nvars(), n);
        for (mask, h) in states {
            *out.coeff_mut(mask) = h;
        }
        Ok(out)
    }

    /// `beta^a * c` in `B_w`.
    pub fn basis_times(&self, w: &[usize], a: usize, c: &GradedPoly) -> Result<BSElement> {
        let nv = self.nvars();
        if let Some(k) = c.as_constant() {
            return Ok(BSElement::basis(nv, w.len(), a).scale(&k));
        }
        if w.is_empty() {
            return Ok(BSElement::from_coeffs(0, vec![c.clone()]));
        }
        let mut slots = vec![GradedPoly::one(nv)];
        for (k, &s) in w.iter().enumerate() {
            slots.push(if a >> k & 1 == 1 { GradedPoly::var(nv, s) } else { GradedPoly::one(nv) });
        }
        let last = slots.pop().unwrap();
        slots.push(&last * c);
        self.normal_form(w, &slots)
    }

    /// Right multiplication `m * r`.
    pub fn right_mul(&self, w: &[usize], m: &BSElement, r: &GradedPoly) -> Result<BSElement> {
        let mut out = BSElement::zero(self.nvars(), w.len());
        for (e, c) in m.nonzero() {
            out.add_scaled(c, &self.basis_times(w, e, r)?);
        }
        Ok(out)
    }

    /// The morphism of a single generator (no framing).
    pub fn generator(&self, g: Generator) -> Result<Arc<Morphism>> {
        let nv = self.nvars();
        let steps = Some(vec![Step { offset: 0, generator: g }]);
        let m = match g {
            Generator::Mult(s) => Morphism {
                source: vec![s],
                target: vec![],
                degree: 1,
                images: vec![BSElement::one(nv, 0), BSElement::from_coeffs(0, vec![GradedPoly::var(nv, s)])],
                steps,
            },
            Generator::Unit(s) => {
                let mut img = BSElement::basis(nv, 1, 1);
                *img.coeff_mut(0) = GradedPoly::var(nv, s);
                Morphism { source: vec![], target: vec![s], degree: 1, images: vec![img], steps }
            }
            Generator::Join(s) => Morphism {
                source: vec![s, s],
                target: vec![s],
                degree: -1,
                images: (0..4usize)
                    .map(|e| if e & 1 == 1 { BSElement::basis(nv, 1, e >> 1) } else { BSElement::zero(nv, 1) })
                    .collect(),
                steps,
            },
            Generator::Split(s) => Morphism {
                source: vec![s],
                target: vec![s, s],
                degree: -1,
                images: (0..2usize).map(|e| BSElement::basis(nv, 2, e << 1)).collect(),
                steps,
            },
            Generator::Braid(s, r) => return self.braid_morphism(s, r),
        };
        Ok(Arc::new(m))
    }

    fn braid_len(&self, g: Generator) -> Result<Option<usize>> {
        match g {
            Generator::Braid(s, r) => {
                if s == r {
                    return Err(Error::Precondition("braid morphism needs two distinct letters".into()));
                }
                self.datum()
                    .m(s, r)
                    .map(Some)
                    .ok_or_else(|| Error::Precondition(format!("m(s{}, s{}) is infinite", s + 1, r + 1)))
            }
            _ => Ok(None),
        }
    }

    /// Source and target words of a generator.
    pub fn shape(&self, g: Generator) -> Result<(Word, Word)> {
        Ok(g.shape(self.braid_len(g)?))
    }

    /// `(beta^a (x) c) (x) beta^{e'}`-style framing coefficient: `beta^a * c` in `B_left`,
    /// cached for generator images.
    fn framed_coeff(&self, left: &[usize], a: usize, key: Option<(Generator, usize, usize)>, c: &GradedPoly) -> Result<Arc<BSElement>> {
        let Some((g, e, e2)) = key else {
            return Ok(Arc::new(self.basis_times(left, a, c)?));
        };
        let k: FrameKey = (left.to_vec(), a, g, e, e2);
        if let Some(v) = self.frames.read().unwrap().get(&k) {
            return Ok(v.clone());
        }
        let v = Arc::new(self.basis_times(left, a, c)?);
        Ok(self.frames.write().unwrap().entry(k).or_insert(v).clone())
    }

    /// Applies `id_left (x) f (x) id_right` to `m` in `B_{left f.source right}`.
    fn frame_apply(&self, left: &[usize], f: &Morphism, gen: Option<Generator>, m: &BSElement) -> Result<BSElement> {
        let l = left.len();
        let ns = f.source.len();
        let nt = f.target.len();
        let nr = m
            .len()
            .checked_sub(l + ns)
            .ok_or_else(|| Error::Shape("element too short for the framed morphism".into()))?;
        let out_len = l + nt + nr;
        let mut out = BSElement::zero(self.nvars(), out_len);
        let lmask = (1usize << l) - 1;
        let smask = (1usize << ns) - 1;
        for (mask, coef) in m.nonzero() {
            let a = mask & lmask;
            let e = (mask >> l) & smask;
            let b = mask >> (l + ns);
            for (e2, c) in f.images[e].nonzero() {
                let high = (e2 << l) | (b << (l + nt));
                if let Some(k) = c.as_constant() {
                    out.coeff_mut(a | high).add_assign_ref(&coef.scale(&k));
                    continue;
                }
                let framed = self.framed_coeff(left, a, gen.map(|g| (g, e, e2)), c)?;
                for (a2, d) in framed.nonzero() {
                    out.coeff_mut(a2 | high).add_scaled(coef, d);
                }
            }
        }
        Ok(out)
    }

    /// Post-composes `f` with the framed generator `step`.
    pub fn then_step(&self, f: &Morphism, step: Step) -> Result<Morphism> {
        let g = self.generator(step.generator)?;
        let w = &f.target;
        let (src, tgt) = (&g.source, &g.target);
        if step.offset + src.len() > w.len() || &w[step.offset..step.offset + src.len()] != src.as_slice() {
            return Err(Error::Shape(format!(
                "step {} at offset {} does not match word {}",
                step.generator,
                step.offset,
                CoxeterGroup::format_word(w)
            )));
        }
        let left = &w[..step.offset];
        let images = f
            .images
            .iter()
            .map(|m| self.frame_apply(left, &g, Some(step.generator), m))
            .collect::<Result<Vec<_>>>()?;
        let mut target = left.to_vec();
        target.extend_from_slice(tgt);
        target.extend_from_slice(&w[step.offset + src.len()..]);
        let steps = f.steps.as_ref().map(|s| {
            let mut s = s.clone();
            s.push(step);
            s
        });
        Ok(Morphism { source: f.source.clone(), target, degree: f.degree + g.degree, images, steps })
    }

    /// Morphism given by a sequence of framed generators starting at `source`.
    pub fn from_steps(&self, source: &[usize], steps: &[Step]) -> Result<Morphism> {
        let mut f = Morphism::identity(self.nvars(), source);
        for &s in steps {
            f = self.then_step(&f, s)?;
        }
        Ok(f)
    }

    /// `id_left (x) f (x) id_right`.
    pub fn tensor3(&self, left: &[usize], f: &Morphism, right: &[usize]) -> Result<Morphism> {
        let l = left.len();
        let ns = f.source.len();
        let nr = right.len();
        let mut source = left.to_vec();
        source.extend_from_slice(&f.source);
        source.extend_from_slice(right);
        let mut target = left.to_vec();
        target.extend_from_slice(&f.target);
        target.extend_from_slice(right);
        let nv = self.nvars();
        let images = (0..1usize << (l + ns + nr))
            .map(|mask| self.frame_apply(left, f, None, &BSElement::basis(nv, l + ns + nr, mask)))
            .collect::<Result<Vec<_>>>()?;
        let steps = f.steps.as_ref().map(|s| {
            s.iter().map(|st| Step { offset: st.offset + l, generator: st.generator }).collect()
        });
        Ok(Morphism { source, target, degree: f.degree, images, steps })
    }

    /// Adjoint: reversed generator word with each generator replaced by its adjoint.
    pub fn adjoint(&self, f: &Morphism) -> Result<Morphism> {
        let steps = f.steps.as_ref().ok_or(Error::NoGeneratorWord)?;
        let adj: Vec<Step> =
            steps.iter().rev().map(|s| Step { offset: s.offset, generator: s.generator.adjoint() }).collect();
        let out = self.from_steps(&f.target, &adj)?;
        if out.degree != f.degree || out.target != f.source {
            return Err(Error::TheoryViolation("adjoint changed degree or shape".into()));
        }
        Ok(out)
    }

    /// Checks `f(m * x_i) = f(m) * x_i` on every basis element and variable.
    pub fn check_right_linear(&self, f: &Morphism) -> Result<()> {
        let nv = self.nvars();
        for e in 0..f.images.len() {
            for i in 0..nv {
                let x = GradedPoly::var(nv, i);
                let lhs = f.apply(&self.basis_times(&f.source, e, &x)?)?;
                let rhs = self.right_mul(&f.target, &f.images[e], &x)?;
                if lhs != rhs {
                    return Err(Error::TheoryViolation(format!(
                        "morphism {} -> {} is not right linear at basis {e}, variable {}",
                        CoxeterGroup::format_word(&f.source),
                        CoxeterGroup::format_word(&f.target),
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// `beta: B_w -> R_x` for a reduced word `w` of `x`, sending
    /// `p (x) q` to `p s(q)` letter by letter.
    pub fn beta(&self, w: &[usize]) -> Result<TwistedMorphism> {
        let g = &*self.group;
        let nv = self.nvars();
        let mut prefix = Element::IDENTITY;
        let mut factors = Vec::with_capacity(w.len());
        for &s in w {
            prefix = g.right_mul(prefix, s)?;
            factors.push(g.act(prefix, &GradedPoly::var(nv, s))?);
        }
        let images = (0..1usize << w.len())
            .map(|e| {
                let mut p = GradedPoly::one(nv);
                for (k, fk) in factors.iter().enumerate() {
                    if e >> k & 1 == 1 {
                        p = &p * fk;
                    }
                }
                p
            })
            .collect();
        Ok(TwistedMorphism { source: w.to_vec(), twist: g.element_of(w)?, degree: 0, images })
    }

    /// `beta o f` for `f: B_s -> B_w`.
    pub fn beta_after(&self, f: &Morphism) -> Result<TwistedMorphism> {
        let b = self.beta(&f.target)?;
        let images = f
            .images
            .iter()
            .map(|m| {
                let mut p = GradedPoly::zero(self.nvars());
                for (e, c) in m.nonzero() {
                    p.add_scaled(c, &b.images[e]);
                }
                p
            })
            .collect();
        Ok(TwistedMorphism { source: f.source.clone(), twist: b.twist, degree: f.degree, images })
    }

    /// Checks `phi(m * r) = x(r) phi(m)` for a morphism into `R_x`.
    pub fn check_twisted_linear(&self, phi: &TwistedMorphism) -> Result<()> {
        let nv = self.nvars();
        for e in 0..phi.images.len() {
            for i in 0..nv {
                let x = GradedPoly::var(nv, i);
                let m = self.basis_times(&phi.source, e, &x)?;
                let mut lhs = GradedPoly::zero(nv);
                for (e2, c) in m.nonzero() {
                    lhs.add_scaled(c, &phi.images[e2]);
                }
                let rhs = &phi.images[e] * &self.group.act(phi.twist, &x)?;
                if lhs != rhs {
                    return Err(Error::TheoryViolation("twisted morphism fails the twisted right action".into()));
                }
            }
        }
        Ok(())
    }

    /// Evaluation on `1 (x) ... (x) 1`.
    pub fn on_one(f: &Morphism) -> &BSElement {
        &f.images[0]
    }

    /// Helper for constant left coefficients.
    pub fn constant(&self, c: Scalar) -> GradedPoly {
        GradedPoly::constant(self.nvars(), c)
    }
}

#[cfg(test)]
mod tests;
