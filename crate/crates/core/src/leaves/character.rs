use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::Leaves;
use crate::bimod::Morphism;
use crate::coxeter::{CoxeterGroup, Element};
use crate::error::{Error, Result};
use crate::hecke::{HeckeElt, LaurentInt};
use crate::linalg::{mat_mul, rank, Matrix};
use crate::poly::{GradedPoly, Scalar};

/// Graded ranks of `Hom(Im p, R_x)` and the resulting Hecke algebra element.
#[derive(Clone, Debug)]
pub struct RankedCharacter {
    pub ranks: BTreeMap<Element, LaurentInt>,
    pub character: HeckeElt,
}

/// Right coefficients of `phi_l o p` in the leaves basis of `Hom(B_s, R_x)`,
/// column `l`, together with the leaf degrees.
fn precomposition_matrix(leaves: &Leaves, p: &Morphism, x: Element) -> Result<(Vec<i32>, Vec<Vec<GradedPoly>>)> {
    let bimod = leaves.bimod();
    let nv = bimod.nvars();
    let s = &p.source;
    let mut basis = leaves.leaves_basis_rx(s, x)?;
    // Over F_q the leaves basis is reduced to the field of `p`.
    let q = p.images.iter().flat_map(|m| m.coeffs()).flat_map(|c| c.coefficients()).find_map(Scalar::characteristic);
    if let Some(q) = q {
        for (_, phi) in basis.iter_mut() {
            phi.images = phi.images.iter().map(|c| c.reduce_mod(q)).collect::<Result<_>>()?;
        }
    }
    // Test elements x_{s_1}^{j_1} (x) ... (x) x_{s_n}^{j_n} (x) 1, one per leaf.
    let tests = basis
        .iter()
        .map(|(l, _)| {
            let mut slots: Vec<GradedPoly> =
                s.iter().zip(&l.j).map(|(&a, &b)| if b == 1 { GradedPoly::var(nv, a) } else { GradedPoly::one(nv) }).collect();
            slots.push(GradedPoly::one(nv));
            let t = bimod.normal_form(s, &slots)?;
            match q {
                Some(q) => t.reduce_mod(q),
                None => Ok(t),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let eval = |images: &[GradedPoly], t: usize| {
        let mut v = GradedPoly::zero(nv);
        for (e, c) in tests[t].nonzero() {
            v.add_assign_ref(&(c * &images[e]));
        }
        v
    };
    let values: Vec<Vec<GradedPoly>> = basis.iter().map(|(_, phi)| (0..basis.len()).map(|t| eval(&phi.images, t)).collect()).collect();
    for t in 0..basis.len() {
        if values[t][t] != GradedPoly::one(nv) || (t + 1..basis.len()).any(|l| !values[l][t].is_zero()) {
            return Err(Error::TheoryViolation("leaves basis is not unitriangular on its test elements".into()));
        }
    }

    let mut cols = Vec::with_capacity(basis.len());
    for (_, phi) in &basis {
        let psi: Vec<GradedPoly> = p
            .images
            .iter()
            .map(|m| {
                let mut v = GradedPoly::zero(nv);
                for (e, c) in m.nonzero() {
                    v.add_assign_ref(&(c * &phi.images[e]));
                }
                v
            })
            .collect();
        let mut b: Vec<GradedPoly> = Vec::with_capacity(basis.len());
        for t in 0..basis.len() {
            let mut v = eval(&psi, t);
            for (k, bk) in b.iter().enumerate() {
                if !bk.is_zero() {
                    v.sub_assign_ref(&(bk * &values[k][t]));
                }
            }
            b.push(v);
        }
        for (e, target) in psi.iter().enumerate() {
            let mut back = GradedPoly::zero(nv);
            for (bk, (_, phik)) in b.iter().zip(&basis) {
                back.add_assign_ref(&(bk * &phik.images[e]));
            }
            if &back != target {
                return Err(Error::TheoryViolation(format!(
                    "precomposition with the projector leaves the span of the leaves basis of {} at {}",
                    CoxeterGroup::format_word(s),
                    leaves.group().format(x)
                )));
            }
        }
        cols.push(b);
    }
    let degrees = basis.iter().map(|(l, _)| l.degree).collect();
    // Transpose so that entry [l'][l] is the coefficient of phi_{l'} in phi_l o p.
    let n = cols.len();
    let m = (0..n).map(|a| (0..n).map(|l| cols[l][a].clone()).collect()).collect();
    Ok((degrees, m))
}

/// Graded ranks of `Hom(Im p, R_x)` for every `x`, from the idempotent matrix
/// of `p` on the leaves basis reduced modulo the positive-degree ideal.
pub fn graded_ranks(leaves: &Leaves, p: &Morphism) -> Result<BTreeMap<Element, LaurentInt>> {
    if p.source != p.target {
        return Err(Error::Shape("character of a non-endomorphism".into()));
    }
    if p.compose(p)?.images != p.images {
        return Err(Error::Precondition("character of a non-idempotent".into()));
    }
    let mut targets: Vec<Element> = leaves.light_leaves(&p.source)?.iter().map(|l| l.target).collect();
    targets.sort();
    targets.dedup();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut out = BTreeMap::new();
    for x in targets {
        let (degrees, m) = precomposition_matrix(leaves, p, x)?;
        let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (k, &d) in degrees.iter().enumerate() {
            by_degree.entry(d).or_default().push(k);
        }
        let mut ranks = LaurentInt::zero();
        let mut total = 0usize;
        for (d, idx) in by_degree {
            let c: Matrix = idx
                .iter()
                .map(|&a| {
                    idx.iter()
                        .map(|&b| {
                            m[a][b].as_constant().ok_or_else(|| {
                                Error::TheoryViolation("same-degree coefficient is not a scalar".into())
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            if mat_mul(&c, &c) != c {
                return Err(Error::TheoryViolation("reduced projector matrix is not idempotent".into()));
            }
            let r = rank(&c);
            total += r;
            if r > 0 {
                ranks.add_term(d, r as i64);
            }
        }
        // Image of an idempotent over the polynomial ring is free, so its rank
        // at a generic point agrees with the reduced count.
        let nv = leaves.bimod().nvars();
        let point: Vec<Scalar> = (0..nv).map(|_| Scalar::from_int(rng.gen_range(-1000..=1000))).collect();
        let at_point: Matrix = m.iter().map(|row| row.iter().map(|e| e.evaluate(&point)).collect()).collect();
        if rank(&at_point) != total {
            return Err(Error::TheoryViolation(format!(
                "rank of the projector on Hom(-, R_{}) is not stable under evaluation",
                leaves.group().format(x)
            )));
        }
        if !ranks.is_zero() {
            out.insert(x, ranks);
        }
    }
    Ok(out)
}

impl Leaves {
    /// `sum_x rk Hom(Im p, R_x) T_x`.
    pub fn character(&self, p: &Morphism) -> Result<RankedCharacter> {
        let ranks = graded_ranks(self, p)?;
        let mut character = HeckeElt::zero();
        for (x, r) in &ranks {
            character.add_term(*x, r);
        }
        Ok(RankedCharacter { ranks, character })
    }
}
