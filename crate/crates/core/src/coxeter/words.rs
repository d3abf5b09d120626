use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, RwLock};

use super::group::{CoxeterGroup, Element, Word};
use crate::error::{Error, Result};

/// Replaces the alternating factor `first, second, first, ...` of length
/// `m(first, second)` starting at `pos` by `second, first, second, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BraidMove {
    pub pos: usize,
    pub first: usize,
    pub second: usize,
}

impl BraidMove {
    pub fn len(&self, g: &CoxeterGroup) -> usize {
        g.datum().m(self.first, self.second).expect("finite braid relation")
    }

    pub fn apply(&self, g: &CoxeterGroup, w: &[usize]) -> Word {
        let m = self.len(g);
        let mut out = w.to_vec();
        for k in 0..m {
            out[self.pos + k] = if k % 2 == 0 { self.second } else { self.first };
        }
        out
    }
}

/// Braid moves applicable to `w`, in order of position then pair.
pub fn braid_moves(g: &CoxeterGroup, w: &[usize]) -> Vec<BraidMove> {
    let mut moves = Vec::new();
    for pos in 0..w.len().saturating_sub(1) {
        let (a, b) = (w[pos], w[pos + 1]);
        if a == b {
            continue;
        }
        let Some(m) = g.datum().m(a, b) else { continue };
        if pos + m > w.len() {
            continue;
        }
        if (0..m).all(|k| w[pos + k] == if k % 2 == 0 { a } else { b }) {
            moves.push(BraidMove { pos, first: a, second: b });
        }
    }
    moves
}

/// Graph of reduced expressions of an element, edges are braid moves.
#[derive(Clone, Debug)]
pub struct GreGraph {
    pub nodes: Vec<Word>,
    /// `(from, to, move)` with `from < to`; each undirected edge listed once.
    pub edges: Vec<(usize, usize, BraidMove)>,
}

pub fn gre_graph(g: &CoxeterGroup, x: Element) -> GreGraph {
    let start = g.normal_form(x).clone();
    let mut index: HashMap<Word, usize> = HashMap::from([(start.clone(), 0)]);
    let mut nodes = vec![start];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let w = nodes[i].clone();
        for mv in braid_moves(g, &w) {
            let v = mv.apply(g, &w);
            let j = match index.get(&v) {
                Some(&j) => j,
                None => {
                    let j = nodes.len();
                    index.insert(v.clone(), j);
                    nodes.push(v);
                    queue.push_back(j);
                    j
                }
            };
            if i < j {
                edges.push((i, j, mv));
            }
        }
    }
    GreGraph { nodes, edges }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum PathGoal {
    EndsWith(usize),
    Exactly(Word),
}

/// Canonical reduced word with a flag for involutions lacking a palindrome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalWord {
    pub word: Word,
    pub palindrome_fallback: bool,
}

/// Memoized braid paths and canonical words over a group.
pub struct WordCache {
    group: Arc<CoxeterGroup>,
    paths: RwLock<HashMap<(Word, PathGoal), Arc<Vec<BraidMove>>>>,
    canonical: RwLock<HashMap<Element, Arc<CanonicalWord>>>,
}

/// Version tag of the deterministic path tie-breaking rule; part of cache keys.
pub const PATH_RULE_VERSION: &str = "bfs-pos-pair-v1";

impl WordCache {
    pub fn new(group: Arc<CoxeterGroup>) -> Self {
        WordCache { group, paths: RwLock::default(), canonical: RwLock::default() }
    }

    pub fn group(&self) -> &Arc<CoxeterGroup> {
        &self.group
    }

    fn bfs(&self, start: &[usize], goal: &PathGoal) -> Option<Vec<BraidMove>> {
        let g = &*self.group;
        let done = |w: &[usize]| match goal {
            PathGoal::EndsWith(s) => w.last() == Some(s),
            PathGoal::Exactly(t) => w == t.as_slice(),
        };
        let start = start.to_vec();
        if done(&start) {
            return Some(vec![]);
        }
        let mut parent: HashMap<Word, Option<(Word, BraidMove)>> = HashMap::from([(start.clone(), None)]);
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            for mv in braid_moves(g, &w) {
                let v = mv.apply(g, &w);
                if parent.contains_key(&v) {
                    continue;
                }
                parent.insert(v.clone(), Some((w.clone(), mv)));
                if done(&v) {
                    let mut path = Vec::new();
                    let mut cur = v;
                    while let Some(Some((prev, mv))) = parent.get(&cur) {
                        path.push(*mv);
                        cur = prev.clone();
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
        None
    }

    fn cached_path(&self, start: &[usize], goal: PathGoal) -> Option<Arc<Vec<BraidMove>>> {
        let key = (start.to_vec(), goal);
        if let Some(p) = self.paths.read().unwrap().get(&key) {
            return Some(p.clone());
        }
        let path = Arc::new(self.bfs(&key.0, &key.1)?);
        Some(self.paths.write().unwrap().entry(key).or_insert(path).clone())
    }

    /// Braid path from the reduced word `t` to a reduced word ending in `s`.
    pub fn braid_path(&self, s: usize, t: &[usize]) -> Result<Arc<Vec<BraidMove>>> {
        let g = &*self.group;
        if !g.is_reduced(t)? {
            return Err(Error::Precondition(format!("{} is not reduced", CoxeterGroup::format_word(t))));
        }
        let x = g.element_of(t)?;
        if !g.is_right_descent(x, s) {
            return Err(Error::Precondition(format!(
                "s{} is not a right descent of {}",
                s + 1,
                CoxeterGroup::format_word(t)
            )));
        }
        self.cached_path(t, PathGoal::EndsWith(s))
            .ok_or_else(|| Error::TheoryViolation("reduced expression graph is disconnected".into()))
    }

    /// Braid path between two reduced words of the same element.
    pub fn path_between(&self, from: &[usize], to: &[usize]) -> Result<Arc<Vec<BraidMove>>> {
        self.cached_path(from, PathGoal::Exactly(to.to_vec())).ok_or_else(|| {
            Error::Precondition(format!(
                "{} and {} are not reduced words of one element",
                CoxeterGroup::format_word(from),
                CoxeterGroup::format_word(to)
            ))
        })
    }

    pub fn canonical(&self, x: Element) -> Arc<CanonicalWord> {
        if let Some(c) = self.canonical.read().unwrap().get(&x) {
            return c.clone();
        }
        let g = &*self.group;
        let xi = g.inverse(x);
        let c = if xi != x {
            let word = if x < xi {
                g.normal_form(x).clone()
            } else {
                g.normal_form(xi).iter().rev().copied().collect()
            };
            CanonicalWord { word, palindrome_fallback: false }
        } else {
            let graph = gre_graph(g, x);
            let pal = graph.nodes.iter().filter(|w| w.iter().eq(w.iter().rev())).min().cloned();
            match pal {
                Some(word) => CanonicalWord { word, palindrome_fallback: false },
                None => CanonicalWord { word: g.normal_form(x).clone(), palindrome_fallback: true },
            }
        };
        let c = Arc::new(c);
        self.canonical.write().unwrap().entry(x).or_insert(c).clone()
    }

    pub fn canonical_word(&self, x: Element) -> Word {
        self.canonical(x).word.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterDatum;

    fn cache(label: &str) -> WordCache {
        WordCache::new(Arc::new(CoxeterGroup::new(CoxeterDatum::from_label(label).unwrap(), None).unwrap()))
    }

    #[test]
    fn gre_graph_small() {
        let c = cache("A2");
        let g = c.group();
        let sts = g.element_of(&[0, 1, 0]).unwrap();
        let gr = gre_graph(g, sts);
        assert_eq!(gr.nodes.len(), 2);
        assert_eq!(gr.edges.len(), 1);
        let s = g.simple(0);
        assert_eq!(gre_graph(g, s).nodes, vec![vec![0]]);
    }

    #[test]
    fn braid_paths_are_deterministic() {
        let c = cache("A2");
        assert!(c.braid_path(0, &[0]).unwrap().is_empty());
        assert!(c.braid_path(0, &[0, 1, 0]).unwrap().is_empty());
        let p = c.braid_path(1, &[0, 1, 0]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0], BraidMove { pos: 0, first: 0, second: 1 });
        assert!(Arc::ptr_eq(&p, &c.braid_path(1, &[0, 1, 0]).unwrap()));
        assert!(c.braid_path(1, &[0]).is_err());
    }

    #[test]
    fn canonical_words_pair_with_inverse() {
        for label in ["A2", "B2", "A3", "G2"] {
            let c = cache(label);
            let g = c.group().clone();
            for x in g.elements() {
                let w = c.canonical_word(x);
                assert_eq!(g.element_of(&w).unwrap(), x);
                if c.canonical(x).palindrome_fallback {
                    assert_eq!(g.inverse(x), x);
                    assert_eq!(&w, g.normal_form(x));
                    continue;
                }
                let rev: Word = c.canonical_word(g.inverse(x)).into_iter().rev().collect();
                assert_eq!(w, rev, "{label}");
            }
        }
        let c = cache("A2");
        let g = c.group();
        assert_eq!(c.canonical_word(g.element_of(&[0, 1]).unwrap()), vec![0, 1]);
        assert_eq!(c.canonical_word(g.element_of(&[1, 0]).unwrap()), vec![1, 0]);
        assert_eq!(c.canonical_word(g.element_of(&[0, 1, 0]).unwrap()), vec![0, 1, 0]);
        let c = cache("B2");
        let top = c.group().element_of(&[0, 1, 0, 1]).unwrap();
        assert!(c.canonical(top).palindrome_fallback);
    }
}
