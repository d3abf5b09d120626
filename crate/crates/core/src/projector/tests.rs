use super::*;
use crate::coxeter::CoxeterDatum;

fn engine(label: &str) -> ProjectorEngine {
    ProjectorEngine::new(Arc::new(CoxeterGroup::new(CoxeterDatum::from_label(label).unwrap(), None).unwrap()))
}

#[test]
fn short_words_give_identity() {
    let e = engine("A2");
    for w in [vec![], vec![0], vec![0, 1], vec![1, 0]] {
        let p = e.favorite_projector(&w).unwrap();
        assert!(p.blocks.is_empty());
        assert_eq!(p.morphism.images, Morphism::identity(2, &w).images, "{w:?}");
    }
}

#[test]
fn sts_splits_off_one_copy_of_s() {
    let e = engine("A2");
    let p = e.favorite_projector(&[0, 1, 0]).unwrap();
    assert_eq!(p.blocks.len(), 1);
    let b = &p.blocks[0];
    assert_eq!(b.z, e.group().simple(0));
    assert_eq!((b.multiplicity, b.candidates, b.selected.len()), (1, 1, 1));
    assert!(!b.lambda[0][0].is_zero());
    assert_eq!(b.lambda, b.lambda_simple);
    assert_eq!(mat_mul(&b.lambda, &b.eta), identity(1));
    let ch = e.character(&p).unwrap().character;
    assert_eq!(ch, *e.hecke().kl_element(p.target).unwrap());
}

#[test]
fn non_reduced_word_is_rejected() {
    let e = engine("A2");
    assert!(matches!(e.favorite_projector(&[0, 0]), Err(Error::Precondition(_))));
}

#[test]
fn characters_match_kl_basis_in_b2() {
    let e = engine("B2");
    let g = e.group().clone();
    for x in g.elements() {
        let p = e.projector_of(x).unwrap();
        assert_eq!(e.character(&p).unwrap().character, *e.hecke().kl_element(x).unwrap(), "{}", g.format(x));
    }
}

#[test]
fn determinants_and_intersection_scalars() {
    let e = engine("A2");
    let g = e.group().clone();
    let sts = g.element_of(&[0, 1, 0]).unwrap();
    let s = g.simple(0);
    assert_eq!(e.d_determinant(sts, sts).unwrap(), Scalar::one());
    assert_eq!(e.d_determinant(s, Element::IDENTITY).unwrap(), Scalar::one());
    let d = e.d_determinant(sts, s).unwrap();
    assert_eq!(d, e.projector_of(sts).unwrap().blocks[0].det);
    let id = e.leaves().light_leaves(&[0]).unwrap()[0].clone();
    assert_eq!(e.intersection_scalar(&id, &id).unwrap(), Scalar::one());
}

#[test]
fn bad_primes_of_small_types() {
    for label in ["A1", "A1xA1"] {
        let e = engine(label);
        let region: Vec<Element> = e.group().elements().collect();
        let r = e.bad_primes(&region, None).unwrap();
        assert!(r.d.is_empty(), "{label}");
        assert!(r.entries.is_empty(), "{label}");
    }
    let e = engine("A2");
    let region: Vec<Element> = e.group().elements().collect();
    let r = e.bad_primes(&region, None).unwrap();
    assert_eq!(r.entries.len(), 1);
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"D\""));
}

#[test]
fn reduction_mod_p() {
    let e = engine("A2");
    let p = e.favorite_projector(&[0, 1, 0]).unwrap();
    match e.reduce_mod_p(&p, 5).unwrap() {
        Reduction::Reduced(m) => {
            assert_eq!(m.character, *e.hecke().kl_element(p.target).unwrap());
            assert_eq!(m.morphism.images, p.morphism.reduce_mod(5).unwrap().images);
        }
        Reduction::NotLiftable { .. } => panic!("not liftable"),
    }
    let id = e.favorite_projector(&[0]).unwrap();
    assert!(matches!(e.reduce_mod_p(&id, 3).unwrap(), Reduction::Reduced(_)));
    assert!(e.reduce_mod_p(&id, 2).is_err());
}

#[test]
fn cache_is_shared_between_threads() {
    let e = engine("B2");
    let region: Vec<Element> = e.group().elements().collect();
    std::thread::scope(|sc| {
        for _ in 0..4 {
            sc.spawn(|| {
                for &x in region.iter().rev() {
                    e.projector_of(x).unwrap();
                }
            });
        }
    });
    let a = e.projector_of(*region.last().unwrap()).unwrap();
    let b = e.projector_of(*region.last().unwrap()).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
}
