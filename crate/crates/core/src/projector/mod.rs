//! Favorite projectors of reduced Bott-Samelson bimodules, intersection
//! scalars, bad primes and reduction to positive characteristic.

mod modp;
mod primes;

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Condvar, Mutex, OnceLock, RwLock};

pub use modp::{ModProjector, Reduction};
pub use primes::{odd_part, odd_prime_divisors, BadPrimeEntry, BadPrimeReport};

use crate::bimod::{BSElement, Bimod, Morphism};
use crate::coxeter::{CoxeterGroup, Element, Word, WordCache};
use crate::error::{Error, Result};
use crate::hecke::Hecke;
use crate::leaves::{bits_string, Bits, DoubleLeaves, Leaf, Leaves, RankedCharacter};
use crate::linalg::{determinant, identity, inverse, mat_mul, rank, Matrix};
use crate::poly::{GradedPoly, Monomial, Scalar};

/// Data recorded for one summand `B_z^{m_z}` split off from `Im P`.
#[derive(Clone, Debug)]
pub struct ZBlock {
    pub z: Element,
    pub z_word: Word,
    pub multiplicity: u64,
    /// Size of `L_z`.
    pub candidates: usize,
    /// `(i, j)` bits of the selected leaves, in selection order.
    pub selected: Vec<(Bits, Bits)>,
    pub lambda: Matrix,
    /// Entries computed without the middle `P`.
    pub lambda_simple: Matrix,
    /// Whether `ker P` has no degree-zero summand `B_z` or `B_xs`, so that
    /// `lambda_simple` must agree with `lambda`.
    pub simple_applies: bool,
    pub eta: Matrix,
    pub det: Scalar,
    /// Determinant for the selection scanned in reverse leaf order.
    pub reversed_det: Scalar,
    /// The orthogonal idempotents `p_z^i`.
    pub pieces: Vec<Arc<Morphism>>,
}

#[derive(Debug)]
pub struct Projector {
    pub word: Word,
    pub target: Element,
    pub morphism: Arc<Morphism>,
    /// `p_{s'} (x) id`; `None` for words of length at most one.
    pub parent: Option<Arc<Morphism>>,
    pub blocks: Vec<ZBlock>,
    dlb: OnceLock<Arc<BTreeMap<usize, GradedPoly>>>,
}

impl Projector {
    pub fn is_identity(&self) -> bool {
        self.blocks.is_empty() && self.parent.as_ref().map_or(true, |p| p.images == Morphism::identity(p.nvars(), &p.source).images)
    }
}

enum Slot {
    Ready(Arc<Projector>),
    Pending,
}

thread_local! {
    static IN_PROGRESS: RefCell<Vec<(usize, Word)>> = const { RefCell::new(Vec::new()) };
}

/// Computes favorite projectors with a shared compute-or-wait cache keyed by
/// the word.
pub struct ProjectorEngine {
    leaves: Arc<Leaves>,
    hecke: Arc<Hecke>,
    cache: Mutex<HashMap<Word, Slot>>,
    ready: Condvar,
    dlbs: RwLock<HashMap<Word, Arc<DoubleLeaves>>>,
}

struct Candidate<'a> {
    leaf: &'a Leaf,
    adjoint: Arc<Morphism>,
    /// `P o l^a o p_z`
    up: Morphism,
    /// `p_z o l`
    down: Morphism,
}

impl ProjectorEngine {
    pub fn new(group: Arc<CoxeterGroup>) -> Self {
        let bimod = Arc::new(Bimod::new(group.clone()));
        let words = Arc::new(WordCache::new(group.clone()));
        Self::with_parts(Arc::new(Leaves::new(bimod, words)), Arc::new(Hecke::new(group)))
    }

    pub fn with_parts(leaves: Arc<Leaves>, hecke: Arc<Hecke>) -> Self {
        ProjectorEngine {
            leaves,
            hecke,
            cache: Mutex::default(),
            ready: Condvar::new(),
            dlbs: RwLock::default(),
        }
    }

    pub fn leaves(&self) -> &Arc<Leaves> {
        &self.leaves
    }

    pub fn hecke(&self) -> &Arc<Hecke> {
        &self.hecke
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        self.leaves.group()
    }

    pub fn bimod(&self) -> &Arc<Bimod> {
        self.leaves.bimod()
    }

    /// Favorite projector of the canonical word of `x`.
    pub fn projector_of(&self, x: Element) -> Result<Arc<Projector>> {
        self.favorite_projector(&self.leaves.words().canonical_word(x))
    }

    /// Number of projectors held in the cache.
    pub fn cached(&self) -> usize {
        self.cache.lock().unwrap().values().filter(|s| matches!(s, Slot::Ready(_))).count()
    }

    /// The idempotent of `End(B_s)` with image `B_x`, `x` the product of `s`.
    pub fn favorite_projector(&self, s: &[usize]) -> Result<Arc<Projector>> {
        let me = self as *const Self as usize;
        let key = (me, s.to_vec());
        if IN_PROGRESS.with(|st| st.borrow().contains(&key)) {
            return Err(Error::Cycle(CoxeterGroup::format_word(s)));
        }
        {
            let mut cache = self.cache.lock().unwrap();
            loop {
                match cache.get(s) {
                    Some(Slot::Ready(p)) => return Ok(p.clone()),
                    Some(Slot::Pending) => cache = self.ready.wait(cache).unwrap(),
                    None => {
                        cache.insert(s.to_vec(), Slot::Pending);
                        break;
                    }
                }
            }
        }
        IN_PROGRESS.with(|st| st.borrow_mut().push(key.clone()));
        let out = self.compute(s).map(Arc::new);
        IN_PROGRESS.with(|st| st.borrow_mut().retain(|k| k != &key));
        let mut cache = self.cache.lock().unwrap();
        match &out {
            Ok(p) => cache.insert(s.to_vec(), Slot::Ready(p.clone())),
            Err(_) => cache.remove(s),
        };
        self.ready.notify_all();
        out
    }

    fn compute(&self, s: &[usize]) -> Result<Projector> {
        let g = &**self.group();
        let nv = self.bimod().nvars();
        if !g.is_reduced(s)? {
            return Err(Error::Precondition(format!("{} is not reduced", CoxeterGroup::format_word(s))));
        }
        let target = g.element_of(s)?;
        let n = s.len();
        if n <= 1 {
            return Ok(Projector {
                word: s.to_vec(),
                target,
                morphism: Arc::new(Morphism::identity(nv, s)),
                parent: None,
                blocks: vec![],
                dlb: OnceLock::new(),
            });
        }
        let prev = self.favorite_projector(&s[..n - 1])?;
        let x = prev.target;
        let last = s[n - 1];
        let parent = Arc::new(self.bimod().tensor3(&[], &prev.morphism, &[last])?);
        let mults = self.hecke.kl_multiplicities(x, last)?;
        let kernel = self.kernel_multiplicities(&s[..n - 1], x, last)?;
        let leaves = self.leaves.skeleton(s)?;

        let mut blocks = Vec::with_capacity(mults.len());
        for (&z, &m) in &mults {
            let zb = self.block(s, &parent, &leaves, z, m, &kernel, target).map_err(|e| match e {
                Error::TheoryViolation(msg) => Error::TheoryViolation(format!(
                    "{msg} (word {}, summand {})",
                    CoxeterGroup::format_word(s),
                    g.format(z)
                )),
                e => e,
            })?;
            blocks.push(zb);
        }

        let mut p = (*parent).clone();
        for b in &blocks {
            for piece in &b.pieces {
                p = p.sub(piece)?;
            }
        }
        p.degree = 0;
        let proj = Projector { word: s.to_vec(), target, morphism: Arc::new(p), parent: Some(parent), blocks, dlb: OnceLock::new() };
        self.check(&proj)?;
        Ok(proj)
    }

    /// Degree-zero multiplicities of `B_y` in `ker P`, from
    /// `(C'_{s'} - C'_x) C'_s`.
    fn kernel_multiplicities(&self, prefix: &[usize], x: Element, s: usize) -> Result<BTreeMap<Element, i64>> {
        let mut a = self.hecke.c_word(prefix)?;
        a.sub_assign(&*self.hecke.kl_element(x)?);
        let a = self.hecke.mul_c_right(&a, s)?;
        Ok(self
            .hecke
            .kl_decompose(&a)?
            .into_iter()
            .map(|(y, c)| (y, c.coeff(0)))
            .filter(|(_, c)| *c != 0)
            .collect())
    }

    #[allow(clippy::too_many_arguments)]
    fn block(
        &self,
        s: &[usize],
        parent: &Morphism,
        leaves: &[Leaf],
        z: Element,
        m: u64,
        kernel: &BTreeMap<Element, i64>,
        xs: Element,
    ) -> Result<ZBlock> {
        let nv = self.bimod().nvars();
        let pz = self.projector_of(z)?;
        let z_word = pz.word.clone();
        let mut cands = Vec::new();
        for l in leaves.iter().filter(|l| l.target == z && l.degree == 0) {
            let down = pz.morphism.compose(&*self.leaves.morphism_of(l)?)?;
            if down.compose(parent)?.is_zero() {
                continue;
            }
            let adjoint = self.leaves.adjoint(l)?;
            let up = parent.compose(&adjoint.compose(&pz.morphism)?)?;
            cands.push(Candidate { leaf: l, adjoint, up, down });
        }
        let m = m as usize;
        let forward = select(&cands, m, false)?;
        let reversed = select(&cands, m, true)?;

        let lambda = self.lambda(&cands, &forward, &pz, |c| Ok(c.up.clone()))?;
        let lambda_simple = self.lambda(&cands, &forward, &pz, |c| c.adjoint.compose(&pz.morphism))?;
        let simple_applies = !kernel.contains_key(&z) && !kernel.contains_key(&xs);
        if simple_applies && lambda_simple != lambda {
            return Err(Error::TheoryViolation("intersection forms with and without P disagree".into()));
        }
        let eta = inverse(&lambda).map_err(|_| Error::TheoryViolation("lambda matrix is singular".into()))?;
        if mat_mul(&lambda, &eta) != identity(m) {
            return Err(Error::TheoryViolation("lambda * eta is not the identity".into()));
        }
        let det = determinant(&lambda);
        let reversed_det = determinant(&self.lambda(&cands, &reversed, &pz, |c| Ok(c.up.clone()))?);

        let mut pieces = Vec::with_capacity(m);
        for (a, &i) in forward.iter().enumerate() {
            let mut right = Morphism::zero(nv, s, &z_word, 0);
            for (b, &j) in forward.iter().enumerate() {
                if !eta[a][b].is_zero() {
                    right.add_scaled(&GradedPoly::constant(nv, eta[a][b].clone()), &cands[j].down)?;
                }
            }
            let mut piece = cands[i].up.compose(&right.compose(parent)?)?;
            piece.degree = 0;
            pieces.push(Arc::new(piece));
        }
        Ok(ZBlock {
            z,
            z_word,
            multiplicity: m as u64,
            candidates: cands.len(),
            selected: forward.iter().map(|&i| (cands[i].leaf.i.clone(), cands[i].leaf.j.clone())).collect(),
            lambda,
            lambda_simple,
            simple_applies,
            eta,
            det,
            reversed_det,
            pieces,
        })
    }

    /// Entry `(a, b)`: the scalar `c` with `p_z o l_b o mid(l_a) = c p_z`.
    fn lambda(
        &self,
        cands: &[Candidate],
        sel: &[usize],
        pz: &Projector,
        mid: impl Fn(&Candidate) -> Result<Morphism>,
    ) -> Result<Matrix> {
        let mids = sel.iter().map(|&i| mid(&cands[i])).collect::<Result<Vec<_>>>()?;
        sel.iter()
            .enumerate()
            .map(|(a, _)| sel.iter().map(|&j| scalar_multiple(&cands[j].down.compose(&mids[a])?, &pz.morphism)).collect())
            .collect()
    }

    fn check(&self, proj: &Projector) -> Result<()> {
        let p = &*proj.morphism;
        let word = CoxeterGroup::format_word(&proj.word);
        let fail = |what: &str| Err(Error::TheoryViolation(format!("favorite projector of {word}: {what}")));
        if !p.is_homogeneous() || p.degree != 0 {
            return fail("not homogeneous of degree 0");
        }
        if p.compose(p)?.images != p.images {
            return fail("not idempotent");
        }
        if let Some(parent) = &proj.parent {
            if p.compose(parent)?.images != p.images || parent.compose(p)?.images != p.images {
                return fail("does not factor through P");
            }
        }
        let pieces: Vec<&Arc<Morphism>> = proj.blocks.iter().flat_map(|b| &b.pieces).collect();
        for (a, pa) in pieces.iter().enumerate() {
            if !p.compose(pa)?.is_zero() {
                return fail("does not kill a split summand");
            }
            for (b, pb) in pieces.iter().enumerate() {
                let c = pa.compose(pb)?;
                let ok = if a == b { c.images == pa.images } else { c.is_zero() };
                if !ok {
                    return fail("split idempotents are not orthogonal");
                }
            }
        }
        Ok(())
    }

    /// Coefficient of `1^(x)` in `(l o l2^a)(1^(x))` for degree-zero leaves
    /// with a common source and target.
    pub fn intersection_scalar(&self, l: &Leaf, l2: &Leaf) -> Result<Scalar> {
        if l.degree != 0 || l2.degree != 0 || l.source != l2.source || l.target != l2.target {
            return Err(Error::Precondition("intersection scalar of leaves that are not parallel of degree 0".into()));
        }
        let f = self.leaves.morphism_of(l)?.compose(&*self.leaves.adjoint(l2)?)?;
        Ok(f.images[0].coeff(0).constant_term())
    }

    /// Determinant of the intersection scalars over the leaves selected for
    /// `y` in the favorite projector of the canonical word of `x`.
    pub fn d_determinant(&self, x: Element, y: Element) -> Result<Scalar> {
        let g = self.group();
        if !g.bruhat_leq(y, x) {
            return Err(Error::Precondition(format!("{} is not below {}", g.format(y), g.format(x))));
        }
        if x == y {
            return Ok(Scalar::one());
        }
        let proj = self.projector_of(x)?;
        let Some(b) = proj.blocks.iter().find(|b| b.z == y) else { return Ok(Scalar::one()) };
        let leaves = self.leaves.skeleton(&proj.word)?;
        let chosen: Vec<&Leaf> = b
            .selected
            .iter()
            .map(|(i, _)| leaves.iter().find(|l| &l.i == i).expect("selected leaf"))
            .collect();
        let m: Matrix = chosen
            .iter()
            .map(|li| chosen.iter().map(|lj| self.intersection_scalar(li, lj)).collect())
            .collect::<Result<_>>()?;
        Ok(determinant(&m))
    }

    /// Graded character of the image of a projector.
    pub fn character(&self, proj: &Projector) -> Result<RankedCharacter> {
        self.leaves.character(&proj.morphism)
    }

    pub fn double_leaves(&self, s: &[usize]) -> Result<Arc<DoubleLeaves>> {
        if let Some(d) = self.dlbs.read().unwrap().get(s) {
            return Ok(d.clone());
        }
        let d = Arc::new(DoubleLeaves::new(&self.leaves, s, s)?);
        Ok(self.dlbs.write().unwrap().entry(s.to_vec()).or_insert(d).clone())
    }

    /// Nonzero coefficients of the projector in the double leaves basis of
    /// `End(B_s)`.
    pub fn dlb_coefficients(&self, proj: &Projector) -> Result<Arc<BTreeMap<usize, GradedPoly>>> {
        if let Some(c) = proj.dlb.get() {
            return Ok(c.clone());
        }
        let c = Arc::new(self.double_leaves(&proj.word)?.expand_in_dlb(&proj.morphism)?);
        Ok(proj.dlb.get_or_init(|| c).clone())
    }

    /// Human-readable summary of the split summands.
    pub fn describe(&self, proj: &Projector) -> Vec<String> {
        let g = self.group();
        proj.blocks
            .iter()
            .map(|b| {
                let sel: Vec<String> = b.selected.iter().map(|(i, j)| format!("i={} j={}", bits_string(i), bits_string(j))).collect();
                format!(
                    "z={} m={} |L_z|={} leaves=[{}] det={}",
                    g.format(b.z),
                    b.multiplicity,
                    b.candidates,
                    sel.join(", "),
                    b.det
                )
            })
            .collect()
    }
}

/// `c` with `f = c p`, read off at `1^(x)`.
fn scalar_multiple(f: &Morphism, p: &Morphism) -> Result<Scalar> {
    let c = f.images[0].coeff(0).constant_term();
    if f.images != p.scale(&c).images {
        return Err(Error::TheoryViolation("composite is not a scalar multiple of p_z".into()));
    }
    Ok(c)
}

fn coordinates(m: &BSElement) -> BTreeMap<(usize, Monomial), Scalar> {
    m.nonzero().flat_map(|(e, c)| c.terms().map(move |(mono, a)| ((e, mono.clone()), a.clone()))).collect()
}

/// Greedy choice of `m` candidates whose images of `1^(x)` are linearly
/// independent.
fn select(cands: &[Candidate], m: usize, reversed: bool) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    if reversed {
        order.reverse();
    }
    let mut chosen = Vec::new();
    let mut vecs: Vec<BTreeMap<(usize, Monomial), Scalar>> = Vec::new();
    for i in order {
        if chosen.len() == m {
            break;
        }
        let v = coordinates(&cands[i].up.images[0]);
        if v.is_empty() {
            continue;
        }
        vecs.push(v);
        let keys: BTreeSet<&(usize, Monomial)> = vecs.iter().flat_map(|v| v.keys()).collect();
        let mat: Matrix = vecs.iter().map(|v| keys.iter().map(|k| v.get(*k).cloned().unwrap_or_else(Scalar::zero)).collect()).collect();
        if rank(&mat) == vecs.len() {
            chosen.push(i);
        } else {
            vecs.pop();
        }
    }
    if chosen.len() < m {
        return Err(Error::TheoryViolation(format!("only {} of {m} independent leaves found", chosen.len())));
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests;
