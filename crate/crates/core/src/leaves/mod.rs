//! Light leaves, double leaves and the leaves basis of `Hom(B_s, R_x)`.

mod character;
mod double;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

pub use character::{graded_ranks, RankedCharacter};
pub use double::{order_key, DoubleLeaf, DoubleLeaves, PairingTable};

use crate::bimod::{Bimod, Generator, Morphism, Step, TwistedMorphism};
use crate::coxeter::{CoxeterGroup, Element, Word, WordCache};
use crate::error::{Error, Result};

/// 0/1 string indexed by the letters of a word.
pub type Bits = Vec<u8>;

pub fn bits_string(b: &[u8]) -> String {
    b.iter().map(|&x| if x == 1 { '1' } else { '0' }).collect()
}

/// Leaf of the tree `T_s`: `i[k] = 1` iff step `k` applies a multiplication,
/// `j[k] = 1` iff it applies a join.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub source: Word,
    pub i: Bits,
    pub j: Bits,
    pub target: Element,
    pub target_word: Word,
    pub degree: i32,
    /// `prefixes[p]` is the element spelled by the processed part of the word
    /// after `p` steps; the last entry is the target.
    pub prefixes: Vec<Element>,
    /// Generator steps spelling the leaf morphism.
    pub steps: Vec<Step>,
    /// `None` in skeleton mode.
    pub morphism: Option<Arc<Morphism>>,
}

impl Leaf {
    pub fn morphism(&self) -> &Arc<Morphism> {
        self.morphism.as_ref().expect("leaf built in skeleton mode")
    }
}

struct Node {
    t: Word,
    y: Element,
    i: Bits,
    j: Bits,
    prefixes: Vec<Element>,
    steps: Vec<Step>,
    morphism: Option<Morphism>,
}

/// Builder and cache for the trees `T_s` over a fixed realization.
pub struct Leaves {
    bimod: Arc<Bimod>,
    words: Arc<WordCache>,
    full: RwLock<HashMap<Word, Arc<Vec<Leaf>>>>,
    single: RwLock<HashMap<(Word, Bits), Arc<Morphism>>>,
    adjoints: RwLock<HashMap<(Word, Bits), Arc<Morphism>>>,
}

impl Leaves {
    pub fn new(bimod: Arc<Bimod>, words: Arc<WordCache>) -> Self {
        Leaves { bimod, words, full: RwLock::default(), single: RwLock::default(), adjoints: RwLock::default() }
    }

    pub fn bimod(&self) -> &Arc<Bimod> {
        &self.bimod
    }

    pub fn words(&self) -> &Arc<WordCache> {
        &self.words
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        self.bimod.group()
    }

    /// All `2^n` leaves of `T_s` with their morphisms, ordered by `i` as a
    /// binary counter.
    pub fn light_leaves(&self, s: &[usize]) -> Result<Arc<Vec<Leaf>>> {
        if let Some(l) = self.full.read().unwrap().get(s) {
            return Ok(l.clone());
        }
        let leaves = Arc::new(self.build(s, true)?);
        Ok(self.full.write().unwrap().entry(s.to_vec()).or_insert(leaves).clone())
    }

    /// Leaves without morphisms: bit strings, targets, degrees and prefixes.
    pub fn skeleton(&self, s: &[usize]) -> Result<Vec<Leaf>> {
        self.build(s, false)
    }

    fn build(&self, s: &[usize], with_morphisms: bool) -> Result<Vec<Leaf>> {
        let g = &**self.group();
        g.element_of(s)?;
        let nv = self.bimod.nvars();
        let root = Node {
            t: vec![],
            y: Element::IDENTITY,
            i: vec![],
            j: vec![],
            prefixes: vec![Element::IDENTITY],
            steps: vec![],
            morphism: with_morphisms.then(|| Morphism::identity(nv, s)),
        };
        let mut out = Vec::with_capacity(1 << s.len());
        self.descend(s, root, &mut out)?;
        Ok(out)
    }

    fn apply(&self, node: &mut Node, step: Step) -> Result<()> {
        node.steps.push(step);
        if let Some(f) = &node.morphism {
            node.morphism = Some(self.bimod.then_step(f, step)?);
        }
        Ok(())
    }

    fn braid_steps(&self, node: &mut Node, moves: &[crate::coxeter::BraidMove]) -> Result<()> {
        let g = &**self.group();
        for mv in moves {
            self.apply(node, Step { offset: mv.pos, generator: Generator::Braid(mv.first, mv.second) })?;
            node.t = mv.apply(g, &node.t);
        }
        Ok(())
    }

    fn descend(&self, s: &[usize], mut node: Node, out: &mut Vec<Leaf>) -> Result<()> {
        let g = &**self.group();
        let k = node.i.len();
        if k == s.len() {
            let canon = self.words.canonical_word(node.y);
            let path = self.words.path_between(&node.t, &canon)?;
            self.braid_steps(&mut node, &path)?;
            debug_assert_eq!(node.t, canon);
            let degree = node.i.iter().map(|&b| b as i32).sum::<i32>() - node.j.iter().map(|&b| b as i32).sum::<i32>();
            out.push(Leaf {
                source: s.to_vec(),
                i: node.i,
                j: node.j,
                target: node.y,
                target_word: node.t,
                degree,
                prefixes: node.prefixes,
                morphism: node.morphism.map(|mut f| {
                    f.steps = Some(node.steps.clone());
                    Arc::new(f)
                }),
                steps: node.steps,
            });
            return Ok(());
        }
        let letter = s[k];
        let descent = g.is_right_descent(node.y, letter);
        if descent {
            let path = self.words.braid_path(letter, &node.t)?;
            self.braid_steps(&mut node, &path)?;
            let pos = node.t.len() - 1;
            self.apply(&mut node, Step { offset: pos, generator: Generator::Join(letter) })?;
        }
        let jk = descent as u8;
        // Branch 0 (identity) comes first so that leaves are ordered by `i`.
        let mut keep = Node {
            t: node.t.clone(),
            y: node.y,
            i: node.i.clone(),
            j: node.j.clone(),
            prefixes: node.prefixes.clone(),
            steps: node.steps.clone(),
            morphism: node.morphism.clone(),
        };
        if !descent {
            keep.t.push(letter);
            keep.y = g.right_mul(keep.y, letter)?;
        }
        keep.i.push(0);
        keep.j.push(jk);
        keep.prefixes.push(keep.y);
        self.descend(s, keep, out)?;

        let mut cut = node;
        let pos = if descent { cut.t.len() - 1 } else { cut.t.len() };
        self.apply(&mut cut, Step { offset: pos, generator: Generator::Mult(letter) })?;
        if descent {
            cut.t.pop();
            cut.y = g.right_mul(cut.y, letter)?;
        }
        cut.i.push(1);
        cut.j.push(jk);
        cut.prefixes.push(cut.y);
        self.descend(s, cut, out)
    }

    /// Leaves of `T_s` ending at `x`.
    pub fn leaves_to(&self, s: &[usize], x: Element) -> Result<Vec<Leaf>> {
        Ok(self.light_leaves(s)?.iter().filter(|l| l.target == x).cloned().collect())
    }

    /// Morphism of a leaf, built from its steps when the leaf comes from a
    /// skeleton.
    pub fn morphism_of(&self, leaf: &Leaf) -> Result<Arc<Morphism>> {
        if let Some(f) = &leaf.morphism {
            return Ok(f.clone());
        }
        let key = (leaf.source.clone(), leaf.i.clone());
        if let Some(f) = self.single.read().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let f = Arc::new(self.bimod.from_steps(&leaf.source, &leaf.steps)?);
        Ok(self.single.write().unwrap().entry(key).or_insert(f).clone())
    }

    /// Adjoint leaf `B_x -> B_s`, cached.
    pub fn adjoint(&self, leaf: &Leaf) -> Result<Arc<Morphism>> {
        let key = (leaf.source.clone(), leaf.i.clone());
        if let Some(f) = self.adjoints.read().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let steps: Vec<Step> =
            leaf.steps.iter().rev().map(|s| Step { offset: s.offset, generator: s.generator.adjoint() }).collect();
        let f = self.bimod.from_steps(&leaf.target_word, &steps)?;
        if f.target != leaf.source || f.degree != leaf.degree {
            return Err(Error::TheoryViolation("adjoint leaf changed degree or shape".into()));
        }
        let f = Arc::new(f);
        Ok(self.adjoints.write().unwrap().entry(key).or_insert(f).clone())
    }

    /// Graded count `sum v^deg` of leaves per target.
    pub fn degree_counts(&self, s: &[usize]) -> Result<BTreeMap<Element, crate::hecke::LaurentInt>> {
        let mut out: BTreeMap<Element, crate::hecke::LaurentInt> = BTreeMap::new();
        for l in self.skeleton(s)? {
            out.entry(l.target).or_default().add_term(l.degree, 1);
        }
        Ok(out)
    }

    /// Graded count of the double leaves of `Hom(B_s, B_r)`, from the leaf
    /// skeletons.
    pub fn double_leaf_degrees(&self, s: &[usize], r: &[usize]) -> Result<crate::hecke::LaurentInt> {
        let down = self.degree_counts(r)?;
        let mut out = crate::hecke::LaurentInt::zero();
        for (x, up) in self.degree_counts(s)? {
            if let Some(d) = down.get(&x) {
                out += &(&up * d);
            }
        }
        Ok(out)
    }

    /// Checks that leaves sharing `j` have distinct targets. Returns the number
    /// of leaves checked.
    pub fn check_distinct_targets(&self, s: &[usize]) -> Result<usize> {
        let leaves = self.skeleton(s)?;
        let mut seen: HashMap<(Bits, Element), Bits> = HashMap::new();
        for l in &leaves {
            if let Some(other) = seen.insert((l.j.clone(), l.target), l.i.clone()) {
                return Err(Error::TheoryViolation(format!(
                    "leaves i={} and i={} of {} share j={} and target {}",
                    bits_string(&other),
                    bits_string(&l.i),
                    CoxeterGroup::format_word(s),
                    bits_string(&l.j),
                    self.group().format(l.target)
                )));
            }
        }
        Ok(leaves.len())
    }

    /// `{beta o l}` over the leaves of `T_s` with target `x`, ordered by `j`.
    pub fn leaves_basis_rx(&self, s: &[usize], x: Element) -> Result<Vec<(Leaf, TwistedMorphism)>> {
        let mut out = self
            .leaves_to(s, x)?
            .into_iter()
            .map(|l| {
                let phi = self.bimod.beta_after(l.morphism())?;
                Ok((l, phi))
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_by(|a, b| a.0.j.cmp(&b.0.j));
        Ok(out)
    }
}

#[cfg(test)]
mod tests;
