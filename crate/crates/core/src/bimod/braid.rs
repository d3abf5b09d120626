use std::collections::BTreeMap;
use std::sync::Arc;

use super::{BSElement, Bimod, Generator, Morphism, Step};
use crate::error::{Error, Result};
use crate::linalg::{solve_unique, SparseRow};
use crate::poly::{GradedPoly, Monomial, Scalar};

impl Bimod {
    /// The unique degree zero morphism `B_{srs...} -> B_{rsr...}` fixing
    /// `1 (x) ... (x) 1`, found by solving the right-linearity equations.
    pub fn braid_morphism(&self, s: usize, r: usize) -> Result<Arc<Morphism>> {
        if let Some(f) = self.braid.read().unwrap().get(&(s, r)) {
            return Ok(f.clone());
        }
        let f = Arc::new(self.solve_braid(s, r)?);
        Ok(self.braid.write().unwrap().entry((s, r)).or_insert(f).clone())
    }

    fn solve_braid(&self, s: usize, r: usize) -> Result<Morphism> {
        let g = Generator::Braid(s, r);
        let (src, tgt) = self.shape(g)?;
        let m = src.len();
        let nv = self.nvars();
        let n_basis = 1usize << m;
        let weight = |e: usize| e.count_ones() as i32;

        // Unknown coefficients of c_{e,e'}: monomials of degree |e| - |e'|.
        let mut offsets: BTreeMap<(usize, usize), (usize, Vec<Monomial>)> = BTreeMap::new();
        let mut count = 0;
        for e in 0..n_basis {
            for e2 in 0..n_basis {
                let k = weight(e) - weight(e2);
                if k < 0 {
                    continue;
                }
                let monos = Monomial::all_of_degree(nv, k as u32);
                let len = monos.len();
                offsets.insert((e, e2), (count, monos));
                count += len;
            }
        }

        let mut rows: Vec<(SparseRow, Scalar)> = Vec::new();
        // f(1) = 1.
        let (idx0, _) = &offsets[&(0, 0)];
        rows.push((SparseRow::from([(*idx0, Scalar::one())]), Scalar::one()));

        // Right multiplication tables by each variable, source and target.
        let var = |i: usize| GradedPoly::var(nv, i);
        let mut src_tab = Vec::with_capacity(n_basis);
        let mut tgt_tab = Vec::with_capacity(n_basis);
        for e in 0..n_basis {
            src_tab.push((0..nv).map(|i| self.basis_times(&src, e, &var(i))).collect::<Result<Vec<_>>>()?);
            tgt_tab.push((0..nv).map(|i| self.basis_times(&tgt, e, &var(i))).collect::<Result<Vec<_>>>()?);
        }

        for e in 0..n_basis {
            for i in 0..nv {
                // eqs[(target basis, monomial)] accumulates LHS - RHS.
                let mut eqs: BTreeMap<(usize, Monomial), SparseRow> = BTreeMap::new();
                let mut push = |key: (usize, Monomial), idx: usize, c: Scalar| {
                    let row = eqs.entry(key).or_default();
                    let entry = row.entry(idx).or_insert_with(Scalar::zero);
                    *entry += &c;
                };
                // LHS: f(beta^e x_i) = sum_{e''} d_{e''} c_{e'',e'}.
                for (e3, d) in src_tab[e][i].nonzero() {
                    for e2 in 0..n_basis {
                        let Some((off, monos)) = offsets.get(&(e3, e2)) else { continue };
                        for (k, mu) in monos.iter().enumerate() {
                            for (nu, coef) in d.terms() {
                                push((e2, nu.mul(mu)), off + k, coef.clone());
                            }
                        }
                    }
                }
                // RHS: f(beta^e) x_i = sum_{e'} c_{e,e'} (beta^{e'} x_i).
                for e2 in 0..n_basis {
                    let Some((off, monos)) = offsets.get(&(e, e2)) else { continue };
                    for (e4, t) in tgt_tab[e2][i].nonzero() {
                        for (k, mu) in monos.iter().enumerate() {
                            for (nu, coef) in t.terms() {
                                push((e4, nu.mul(mu)), off + k, -coef);
                            }
                        }
                    }
                }
                rows.extend(eqs.into_values().map(|r| (r, Scalar::zero())));
            }
        }

        let build = |sol: &[Scalar]| {
            let mut images = vec![BSElement::zero(nv, m); n_basis];
            for (&(e, e2), (off, monos)) in &offsets {
                let poly = GradedPoly::from_terms(nv, monos.iter().enumerate().map(|(k, mu)| (mu.clone(), sol[off + k].clone())));
                *images[e].coeff_mut(e2) = poly;
            }
            Morphism { source: src.clone(), target: tgt.clone(), degree: 0, images, steps: Some(vec![Step { offset: 0, generator: g }]) }
        };
        // Every candidate is checked exactly against all constraints.
        let sol = solve_unique(&rows, count, |sol| {
            let f = build(sol);
            f.images[0] == BSElement::one(nv, m) && self.check_right_linear(&f).is_ok()
        })
        .map_err(|e| {
            Error::TheoryViolation(format!(
                "no unique degree zero braid morphism for (s{}, s{}): {e}",
                s + 1,
                r + 1
            ))
        })?;
        let f = build(&sol);
        if !f.is_homogeneous() {
            return Err(Error::TheoryViolation("braid morphism is not homogeneous".into()));
        }
        Ok(f)
    }
}
