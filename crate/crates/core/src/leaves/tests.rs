use super::*;
use crate::coxeter::CoxeterDatum;
use crate::hecke::{Hecke, HeckeElt};
use crate::poly::GradedPoly;

fn setup(label: &str) -> (Leaves, Hecke) {
    let g = Arc::new(CoxeterGroup::new(CoxeterDatum::from_label(label).unwrap(), None).unwrap());
    let leaves = Leaves::new(Arc::new(Bimod::new(g.clone())), Arc::new(WordCache::new(g.clone())));
    (leaves, Hecke::new(g))
}

#[test]
fn single_letter_tree() {
    let (lv, _) = setup("A2");
    let ls = lv.light_leaves(&[0]).unwrap();
    assert_eq!(ls.len(), 2);
    assert_eq!((ls[0].i.clone(), ls[0].degree, ls[0].target_word.clone()), (vec![0], 0, vec![0]));
    assert_eq!((ls[1].i.clone(), ls[1].degree, ls[1].target), (vec![1], 1, Element::IDENTITY));
    assert_eq!(ls[1].morphism().images, lv.bimod().generator(Generator::Mult(0)).unwrap().images);
}

#[test]
fn leaf_degrees_match_traces() {
    for (label, words) in [
        ("A2", vec![vec![0, 0], vec![0, 1, 0], vec![0, 1, 0, 1], vec![1, 0, 0, 1]]),
        ("B2", vec![vec![0, 1, 0, 1], vec![0, 0, 1], vec![1, 0, 1, 0, 1]]),
    ] {
        let (lv, h) = setup(label);
        for w in words {
            let c = h.c_word(&w).unwrap();
            let counts = lv.degree_counts(&w).unwrap();
            let mut expect = HeckeElt::zero();
            for (x, p) in counts {
                expect.add_term(x, &p);
            }
            assert_eq!(expect, c, "{label} {w:?}");
        }
    }
}

#[test]
fn one_degree_zero_leaf_to_s_in_sts() {
    let (lv, h) = setup("A2");
    let s = h.group().simple(0);
    let leaves = lv.leaves_to(&[0, 1, 0], s).unwrap();
    assert_eq!(leaves.iter().filter(|l| l.degree == 0).count(), 1);
    assert_eq!(lv.light_leaves(&[0, 1, 0]).unwrap().len(), 8);
}

#[test]
fn leaf_morphisms_are_homogeneous_and_fix_one() {
    let (lv, _) = setup("B2");
    for l in lv.light_leaves(&[0, 1, 0, 1, 0]).unwrap().iter() {
        let f = l.morphism();
        assert_eq!(f.degree, l.degree);
        assert!(f.is_homogeneous());
        assert_eq!(f.target, l.target_word);
        assert_eq!(l.prefixes.len(), 6);
    }
}

#[test]
fn distinct_targets_for_fixed_join_bits() {
    let (lv, _) = setup("A2");
    assert_eq!(lv.check_distinct_targets(&[0, 1, 0, 1, 0]).unwrap(), 32);
    let (lv, _) = setup("B2");
    assert_eq!(lv.check_distinct_targets(&[1, 0, 1, 1, 0, 1]).unwrap(), 64);
}

#[test]
fn small_double_leaves() {
    let (lv, h) = setup("A2");
    let d = DoubleLeaves::new(&lv, &[0], &[0]).unwrap();
    assert_eq!(d.degree_count(), h.dlb_degree_oracle(&[0], &[0]).unwrap());
    let mut degs: Vec<i32> = d.leaves.iter().map(|x| x.degree).collect();
    degs.sort();
    assert_eq!(degs, vec![0, 2]);
    let d = DoubleLeaves::new(&lv, &[0], &[1]).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.leaves[0].degree, 2);
    let eps_m = lv.bimod().generator(Generator::Unit(1)).unwrap().compose(&lv.bimod().generator(Generator::Mult(0)).unwrap()).unwrap();
    assert_eq!(d.leaves[0].morphism.images, eps_m.images);
    let d = DoubleLeaves::new(&lv, &[], &[]).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.leaves[0].morphism.images, Morphism::identity(2, &[]).images);
}

#[test]
fn pairing_is_unitriangular() {
    let (lv, h) = setup("A2");
    for (s, r) in [(vec![0], vec![0]), (vec![0, 1], vec![0, 1]), (vec![0, 1, 0], vec![1, 0, 1]), (vec![0, 0], vec![0])] {
        let d = DoubleLeaves::new(&lv, &s, &r).unwrap();
        assert_eq!(d.degree_count(), h.dlb_degree_oracle(&s, &r).unwrap());
        d.check_unitriangular().unwrap();
    }
    let d = DoubleLeaves::new(&lv, &[], &[]).unwrap();
    let vals = d.pairing().pairing_eval(&d.leaves[0].morphism).unwrap();
    assert_eq!(vals.len(), 1);
    assert_eq!(vals[&(vec![], vec![])], GradedPoly::one(2));
}

#[test]
fn expansion_in_double_leaves() {
    let (lv, _) = setup("A2");
    let d = DoubleLeaves::new(&lv, &[0], &[0]).unwrap();
    let xs = GradedPoly::var(2, 0);
    let f = Morphism::identity(2, &[0]).scale_left(&xs);
    let c = d.expand(&f).unwrap();
    assert_eq!(d.combine(&c).unwrap().images, f.images);
    let id_pos = d.leaves.iter().position(|x| x.degree == 0).unwrap();
    assert_eq!(c[id_pos], xs);
    for (k, dl) in d.leaves.iter().enumerate() {
        let e = d.expand_in_dlb(&dl.morphism).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[&k], GradedPoly::one(2));
    }
    assert!(d.expand_in_dlb(&Morphism::zero(2, &[0], &[0], 0)).unwrap().is_empty());
}

#[test]
fn leaves_basis_of_twisted_bimodules() {
    let (lv, h) = setup("A2");
    let g = h.group().clone();
    let s = g.simple(0);
    let st = g.element_of(&[0, 1]).unwrap();
    let b = lv.leaves_basis_rx(&[0], Element::IDENTITY).unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].0.degree, 1);
    let b = lv.leaves_basis_rx(&[0], s).unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b[0].0.degree, 0);
    assert!(lv.leaves_basis_rx(&[0], st).unwrap().is_empty());
    for (_, phi) in lv.leaves_basis_rx(&[0, 1, 0], s).unwrap() {
        lv.bimod().check_twisted_linear(&phi).unwrap();
    }
}

#[test]
fn character_of_identity_is_product_of_kl_generators() {
    let (lv, h) = setup("A2");
    let ch = lv.character(&Morphism::identity(2, &[])).unwrap();
    assert_eq!(ch.character, HeckeElt::t(Element::IDENTITY));
    for w in [vec![0], vec![0, 1], vec![0, 1, 0], vec![0, 0]] {
        let ch = lv.character(&Morphism::identity(2, &w)).unwrap();
        assert_eq!(ch.character, h.c_word(&w).unwrap(), "{w:?}");
    }
}

