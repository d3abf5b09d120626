use std::fmt;

use serde::{Deserialize, Serialize};

use super::element::BSElement;
use crate::coxeter::Word;
use crate::error::{Error, Result};
use crate::poly::{GradedPoly, Scalar};

/// Generating morphisms between Bott-Samelson bimodules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    /// `B_s -> R`, multiplication, degree 1.
    Mult(usize),
    /// `R -> B_s`, `1 -> x_s (x) 1 + 1 (x) x_s`, degree 1.
    Unit(usize),
    /// `B_s B_s -> B_s`, `p (x) q (x) r -> p d_s(q) (x) r`, degree -1.
    Join(usize),
    /// `B_s -> B_s B_s`, `a (x) b -> a (x) 1 (x) b`, degree -1.
    Split(usize),
    /// Degree zero braid morphism from the alternating word starting with
    /// the first index to the one starting with the second.
    Braid(usize, usize),
}

impl Generator {
    pub fn adjoint(self) -> Generator {
        match self {
            Generator::Mult(s) => Generator::Unit(s),
            Generator::Unit(s) => Generator::Mult(s),
            Generator::Join(s) => Generator::Split(s),
            Generator::Split(s) => Generator::Join(s),
            Generator::Braid(s, r) => Generator::Braid(r, s),
        }
    }

    pub fn degree(self) -> i32 {
        match self {
            Generator::Mult(_) | Generator::Unit(_) => 1,
            Generator::Join(_) | Generator::Split(_) => -1,
            Generator::Braid(..) => 0,
        }
    }

    /// Source and target words; `m` is the braid length for `Braid`.
    pub fn shape(self, m: Option<usize>) -> (Word, Word) {
        let alt = |a: usize, b: usize, m: usize| (0..m).map(|k| if k % 2 == 0 { a } else { b }).collect::<Word>();
        match self {
            Generator::Mult(s) => (vec![s], vec![]),
            Generator::Unit(s) => (vec![], vec![s]),
            Generator::Join(s) => (vec![s, s], vec![s]),
            Generator::Split(s) => (vec![s], vec![s, s]),
            Generator::Braid(s, r) => {
                let m = m.expect("braid length");
                (alt(s, r, m), alt(r, s, m))
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Generator::Mult(s) => write!(f, "m{}", s + 1),
            Generator::Unit(s) => write!(f, "eps{}", s + 1),
            Generator::Join(s) => write!(f, "j{}", s + 1),
            Generator::Split(s) => write!(f, "p{}", s + 1),
            Generator::Braid(s, r) => write!(f, "f{}{}", s + 1, r + 1),
        }
    }
}

/// `id_offset (x) generator (x) id`, applied to the current word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub offset: usize,
    pub generator: Generator,
}

/// Graded bimodule morphism `B_source -> B_target`, stored by the images of
/// the left basis, optionally with a decomposition into generator steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub source: Word,
    pub target: Word,
    pub degree: i32,
    pub images: Vec<BSElement>,
    pub steps: Option<Vec<Step>>,
}

impl Morphism {
    pub fn identity(nvars: usize, w: &[usize]) -> Morphism {
        let n = w.len();
        Morphism {
            source: w.to_vec(),
            target: w.to_vec(),
            degree: 0,
            images: (0..1usize << n).map(|e| BSElement::basis(nvars, n, e)).collect(),
            steps: Some(vec![]),
        }
    }

    pub fn zero(nvars: usize, source: &[usize], target: &[usize], degree: i32) -> Morphism {
        Morphism {
            source: source.to_vec(),
            target: target.to_vec(),
            degree,
            images: vec![BSElement::zero(nvars, target.len()); 1 << source.len()],
            steps: None,
        }
    }

    pub fn nvars(&self) -> usize {
        self.images[0].nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(BSElement::is_zero)
    }

    /// Left-linear evaluation.
    pub fn apply(&self, m: &BSElement) -> Result<BSElement> {
        if m.len() != self.source.len() {
            return Err(Error::Shape(format!("element of length {} fed to source of length {}", m.len(), self.source.len())));
        }
        let mut out = BSElement::zero(self.nvars(), self.target.len());
        for (e, c) in m.nonzero() {
            out.add_scaled(c, &self.images[e]);
        }
        Ok(out)
    }

    /// `self o f`.
    pub fn compose(&self, f: &Morphism) -> Result<Morphism> {
        if f.target != self.source {
            return Err(Error::Shape("composition of morphisms with mismatched words".into()));
        }
        let images = f.images.iter().map(|m| self.apply(m)).collect::<Result<Vec<_>>>()?;
        let steps = match (&f.steps, &self.steps) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        Ok(Morphism { source: f.source.clone(), target: self.target.clone(), degree: f.degree + self.degree, images, steps })
    }

    pub fn add(&self, other: &Morphism) -> Result<Morphism> {
        self.check_same_shape(other)?;
        let mut images = self.images.clone();
        for (a, b) in images.iter_mut().zip(&other.images) {
            a.add_assign(b);
        }
        Ok(Morphism { images, steps: None, ..self.clone_shape() })
    }

    pub fn sub(&self, other: &Morphism) -> Result<Morphism> {
        self.check_same_shape(other)?;
        let mut images = self.images.clone();
        for (a, b) in images.iter_mut().zip(&other.images) {
            a.sub_assign(b);
        }
        Ok(Morphism { images, steps: None, ..self.clone_shape() })
    }

    pub fn scale(&self, c: &Scalar) -> Morphism {
        Morphism { images: self.images.iter().map(|m| m.scale(c)).collect(), steps: None, ..self.clone_shape() }
    }

    /// Left multiplication by a polynomial (changes the degree).
    pub fn scale_left(&self, c: &GradedPoly) -> Morphism {
        let mut out = Morphism { images: self.images.iter().map(|m| m.scale_left(c)).collect(), steps: None, ..self.clone_shape() };
        if let Some(d) = c.degree() {
            out.degree += d;
        }
        out
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: &GradedPoly, other: &Morphism) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.images.iter_mut().zip(&other.images) {
            a.add_scaled(c, b);
        }
        self.steps = None;
        Ok(())
    }

    fn clone_shape(&self) -> Morphism {
        Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            images: vec![],
            steps: None,
        }
    }

    fn check_same_shape(&self, other: &Morphism) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape("morphisms between different objects".into()));
        }
        Ok(())
    }

    /// Checks that every basis image is homogeneous of the right degree.
    pub fn is_homogeneous(&self) -> bool {
        let n = self.source.len();
        self.images
            .iter()
            .enumerate()
            .all(|(e, m)| m.is_homogeneous_of(BSElement::basis_degree(n, e) + self.degree))
    }

    pub fn reduce_mod(&self, p: u64) -> Result<Morphism> {
        let images = self.images.iter().map(|m| m.reduce_mod(p)).collect::<Result<_>>()?;
        Ok(Morphism { images, steps: self.steps.clone(), ..self.clone_shape() })
    }

    /// Stable text digest of the images, used for cache integrity checks.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        for m in &self.images {
            h.update(m.to_string().as_bytes());
            h.update(b"|");
        }
        hex::encode(h.finalize())
    }
}
