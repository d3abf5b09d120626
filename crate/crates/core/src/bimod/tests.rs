use super::*;
use crate::coxeter::CoxeterDatum;

fn bimod(label: &str) -> Bimod {
    Bimod::new(Arc::new(CoxeterGroup::new(CoxeterDatum::from_label(label).unwrap(), None).unwrap()))
}

fn p(b: &Bimod, text: &str) -> GradedPoly {
    GradedPoly::parse(b.nvars(), text).unwrap()
}

#[test]
fn normal_form_examples() {
    let b = bimod("A2");
    let nf = b.normal_form(&[0], &[p(&b, "x_1"), p(&b, "1")]).unwrap();
    assert_eq!(nf.coeff(0), &p(&b, "x_1"));
    assert!(nf.coeff(1).is_zero());
    let nf = b.normal_form(&[0], &[p(&b, "1"), p(&b, "x_1")]).unwrap();
    assert_eq!(nf, BSElement::basis(2, 1, 1));
    let nf = b.normal_form(&[0], &[p(&b, "1"), p(&b, "x_2")]).unwrap();
    assert_eq!(nf.coeff(0), &p(&b, "1/2*x_1 + x_2"));
    assert_eq!(nf.coeff(1), &p(&b, "-1/2"));
    // Check by multiplying out: m_s(nf) = x_t.
    let m = b.generator(Generator::Mult(0)).unwrap();
    assert_eq!(m.apply(&nf).unwrap().coeff(0), &p(&b, "x_2"));
}

#[test]
fn right_multiplication() {
    let b = bimod("A2");
    let one = BSElement::one(2, 1);
    assert_eq!(b.right_mul(&[0], &one, &p(&b, "1")).unwrap(), one);
    let b1 = BSElement::basis(2, 1, 1);
    assert_eq!(b.right_mul(&[0], &one, &p(&b, "x_1")).unwrap(), b1);
    let sq = b.right_mul(&[0], &b1, &p(&b, "x_1")).unwrap();
    assert_eq!(sq.coeff(0), &p(&b, "x_1^2"));
    assert!(sq.coeff(1).is_zero());
    // Two-step normal form agrees with one-step.
    let direct = b.normal_form(&[0], &[p(&b, "1"), p(&b, "x_1^2")]).unwrap();
    assert_eq!(direct, sq);
}

#[test]
fn generator_evaluations() {
    let b = bimod("A2");
    let m = b.generator(Generator::Mult(0)).unwrap();
    let eps = b.generator(Generator::Unit(0)).unwrap();
    assert_eq!(m.compose(&eps).unwrap().images[0].coeff(0), &p(&b, "2*x_1"));
    let j = b.generator(Generator::Join(0)).unwrap();
    assert_eq!(j.images[0b01], BSElement::basis(2, 1, 0));
    assert!(j.images[0].is_zero());
    assert_eq!(j.images[0b11], BSElement::basis(2, 1, 1));
    let pp = b.generator(Generator::Split(0)).unwrap();
    assert_eq!(pp.images[0], BSElement::one(2, 2));
    assert!(j.compose(&pp).unwrap().is_zero());
    assert_eq!(j.degree, pp.degree);
    assert_eq!(m.degree, eps.degree);
    for g in [Generator::Mult(0), Generator::Unit(1), Generator::Join(0), Generator::Split(1)] {
        let f = b.generator(g).unwrap();
        b.check_right_linear(&f).unwrap();
        assert!(f.is_homogeneous());
    }
}

#[test]
fn braid_morphisms() {
    for label in ["A1xA1", "A2", "B2", "A3"] {
        let b = bimod(label);
        let f = b.braid_morphism(0, 1).unwrap();
        let g = b.braid_morphism(1, 0).unwrap();
        assert_eq!(f.images[0], BSElement::one(b.nvars(), f.target.len()), "{label}");
        assert!(f.is_homogeneous());
        if label == "A1xA1" {
            let id = Morphism::identity(b.nvars(), &[0, 1]);
            assert_eq!(g.compose(&f).unwrap().images, id.images);
        }
        let fgf = f.compose(&g).unwrap().compose(&f).unwrap();
        assert_eq!(fgf.images[0], BSElement::one(b.nvars(), f.target.len()));
    }
}

#[test]
fn tensor_and_adjoint() {
    let b = bimod("A2");
    let m = b.generator(Generator::Mult(0)).unwrap();
    let framed = b.tensor3(&[1], &m, &[]).unwrap();
    assert_eq!(framed.images[0], BSElement::one(2, 1));
    assert_eq!(b.tensor3(&[], &m, &[]).unwrap().images, m.images);
    let id = Morphism::identity(2, &m.target);
    assert_eq!(id.compose(&m).unwrap().images, m.images);

    let adj = b.adjoint(&m).unwrap();
    assert_eq!(adj.images, b.generator(Generator::Unit(0)).unwrap().images);
    let f = b.from_steps(&[1, 0, 0], &[Step { offset: 1, generator: Generator::Join(0) }]).unwrap();
    let fa = b.adjoint(&f).unwrap();
    let expect = b.tensor3(&[1], &b.generator(Generator::Split(0)).unwrap(), &[]).unwrap();
    assert_eq!(fa.images, expect.images);
    assert_eq!(b.adjoint(&fa).unwrap().images, f.images);
}

#[test]
fn zigzag_is_identity() {
    let b = bimod("B2");
    // cup = p o eps : R -> B_s B_s, cap = m o j : B_s B_s -> R.
    let s = 0;
    let cup = [Step { offset: 1, generator: Generator::Unit(s) }, Step { offset: 1, generator: Generator::Split(s) }];
    let cap = [Step { offset: 0, generator: Generator::Join(s) }, Step { offset: 0, generator: Generator::Mult(s) }];
    let zig = b.from_steps(&[s], &[cup[0], cup[1], cap[0], cap[1]]).unwrap();
    assert_eq!(zig.images, Morphism::identity(b.nvars(), &[s]).images);
}

#[test]
fn beta_morphisms() {
    let b = bimod("A2");
    let bs = b.beta(&[0]).unwrap();
    assert_eq!(bs.images[0], p(&b, "1"));
    assert_eq!(bs.images[1], p(&b, "-x_1"));
    assert_eq!(b.beta(&[]).unwrap().images, vec![p(&b, "1")]);
    for w in [vec![0, 1], vec![0, 1, 0]] {
        b.check_twisted_linear(&b.beta(&w).unwrap()).unwrap();
    }
}

#[test]
#[ignore = "G2 braid solve takes minutes"]
fn braid_morphism_g2() {
    let b = bimod("G2");
    let f = b.braid_morphism(0, 1).unwrap();
    assert_eq!(f.images[0], BSElement::one(b.nvars(), 6));
}
