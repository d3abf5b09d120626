use std::sync::Arc;

use super::{Projector, ProjectorEngine};
use crate::bimod::Morphism;
use crate::coxeter::CoxeterGroup;
use crate::error::{Error, Result};
use crate::hecke::HeckeElt;
use crate::poly::{is_prime, GradedPoly};

/// A favorite projector reduced to `F_p`.
#[derive(Clone, Debug)]
pub struct ModProjector {
    pub p: u64,
    pub morphism: Arc<Morphism>,
    pub character: HeckeElt,
}

#[derive(Clone, Debug)]
pub enum Reduction {
    Reduced(ModProjector),
    /// Double leaves and coefficients whose denominators are divisible by `p`.
    NotLiftable { p: u64, offending: Vec<(String, String)> },
}

impl ProjectorEngine {
    /// Reduces the double leaves expansion of `proj` modulo `p` and checks
    /// that the result is an idempotent with the same character.
    pub fn reduce_mod_p(&self, proj: &Projector, p: u64) -> Result<Reduction> {
        if p == 2 || !is_prime(p) {
            return Err(Error::Precondition(format!("{p} is not an odd prime")));
        }
        let coeffs = self.dlb_coefficients(proj)?;
        let dlb = self.double_leaves(&proj.word)?;
        let offending: Vec<(String, String)> = coeffs
            .iter()
            .filter(|(_, c)| c.coefficients().any(|a| !a.is_p_integral(p)))
            .map(|(&k, c)| (dlb.leaves[k].label(), c.to_string()))
            .collect();
        if !offending.is_empty() {
            return Ok(Reduction::NotLiftable { p, offending });
        }
        let nv = self.bimod().nvars();
        let mut out = Morphism::zero(nv, &proj.word, &proj.word, 0);
        out = out.reduce_mod(p)?;
        for (&k, c) in coeffs.iter() {
            let c: GradedPoly = c.reduce_mod(p)?;
            let d = dlb.leaves[k].morphism.reduce_mod(p).map_err(|e| {
                Error::TheoryViolation(format!("double leaf {} is not defined over Z_({p}): {e}", dlb.leaves[k].label()))
            })?;
            out.add_scaled(&c, &d)?;
        }
        out.degree = 0;
        let word = CoxeterGroup::format_word(&proj.word);
        if out.compose(&out)?.images != out.images {
            return Err(Error::TheoryViolation(format!("reduction of the projector of {word} mod {p} is not idempotent")));
        }
        let character = self.leaves().character(&out)?.character;
        let expected = self.character(proj)?.character;
        if character != expected {
            return Err(Error::TheoryViolation(format!("character of the projector of {word} changes mod {p}")));
        }
        Ok(Reduction::Reduced(ModProjector { p, morphism: Arc::new(out), character }))
    }
}
