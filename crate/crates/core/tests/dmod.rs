mod common;

use common::*;
use dmod_core::bch::Bch;
use dmod_core::borel::borel_algebra;
use dmod_core::dmod::{
    flow_solution, hom_dimension, is_polynomial_solution, polynomial_flow, sl2_adjoint_fixture, GroupKind,
    InvariantDModule,
};
use dmod_core::generate::{Generator, NilpotentFamily};
use dmod_core::intertwine::{contains_invertible, intertwiner_space};
use dmod_core::lie::{LieAlgebra, Representation};
use dmod_core::matrix::AnyMatrix;
use dmod_core::mpoly::MPoly;
use dmod_core::unipotent::{gauge_equivalent, semisimplify};
use dmod_core::{CMatrix, Gq, Matrix, QMatrix, Ring, ToleranceConfig};
use proptest::prelude::*;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn module(rep: &Representation) -> InvariantDModule {
    InvariantDModule::new(rep.clone(), GroupKind::Unipotent).unwrap()
}

fn line(m: QMatrix) -> Representation {
    let n = m.rows();
    Representation::new(LieAlgebra::abelian(1), n, vec![m]).unwrap()
}

fn exact_basis(rep1: &Representation, rep2: &Representation) -> Vec<QMatrix> {
    hom_dimension(&module(rep1), &module(rep2), &cfg())
        .unwrap()
        .initial_value_basis
        .into_iter()
        .map(|m| m.as_exact().expect("exact spectra").clone())
        .collect()
}

fn eval_poly_matrix(m: &Matrix<MPoly<Gq>>, p: &[Gq]) -> QMatrix {
    m.map(|e| e.eval(p))
}

/// `v(X) = X·ρ₁(v) − ρ₂(v)·X` for every basis `v` at `p`, with the
/// invariant fields applied entrywise.
fn solves_flow(x: &Matrix<MPoly<Gq>>, r1: &Representation, r2: &Representation, bch: &Bch, p: &[Gq]) -> bool {
    let xp = eval_poly_matrix(x, p);
    (0..r1.algebra.dim()).all(|v| {
        let field = bch.invariant_field(&r1.algebra.basis_vector(v));
        let lhs = x.map(|e| field.apply(e).eval(p));
        lhs == &(&xp * &r1.images[v]) - &(&r2.images[v] * &xp)
    })
}

const FAMILIES: [NilpotentFamily; 4] = [
    NilpotentFamily::Abelian(1),
    NilpotentFamily::Abelian(2),
    NilpotentFamily::Heisenberg,
    NilpotentFamily::Filiform4,
];

#[test]
fn hom_dimension_examples() {
    let jordan = line(qm(&[&[0, 1], &[0, 0]]));
    let zero = line(qm(&[&[0]]));
    let one = line(qm(&[&[1]]));
    let h = hom_dimension(&module(&jordan), &module(&zero), &cfg()).unwrap();
    assert_eq!(h.dimension, 2);
    assert_eq!(h.initial_value_basis.len(), 2);
    assert_eq!(hom_dimension(&module(&one), &module(&zero), &cfg()).unwrap().dimension, 0);
    let h = hom_dimension(&module(&zero), &module(&jordan), &cfg()).unwrap();
    assert_eq!(h.dimension, 2);
}

#[test]
fn jordan_flow_is_one_p() {
    let jordan = line(qm(&[&[0, 1], &[0, 0]]));
    let zero = line(qm(&[&[0]]));
    let x0 = qm(&[&[1, 0]]);
    let p = gq("7/3");
    let x = flow_solution(&jordan, &zero, &x0, &[p.clone()], &cfg()).unwrap();
    assert_eq!(x, AnyMatrix::Exact(QMatrix::from_rows(vec![vec![Gq::one(), p]]).unwrap()));
    let poly = polynomial_flow(&jordan, &zero, &x0, &cfg()).unwrap();
    assert_eq!(poly.get(0, 0), &MPoly::one());
    assert_eq!(poly.get(0, 1), &MPoly::var(0));
    // not admissible: exp(p) is not polynomial
    let one = line(qm(&[&[1]]));
    assert!(!is_polynomial_solution(&one, &zero, &qm(&[&[1]]), &cfg()).unwrap());
    assert!(polynomial_flow(&one, &zero, &qm(&[&[1]]), &cfg()).is_err());
    let x = flow_solution(&one, &zero, &qm(&[&[1]]), &[Gq::one()], &cfg()).unwrap();
    assert!((x.to_c64().get(0, 0).re - std::f64::consts::E).abs() < 1e-12);
}

#[test]
fn module_construction_checks_the_group() {
    let h = Representation::zero(LieAlgebra::heisenberg(), 2);
    assert!(InvariantDModule::new(h.clone(), GroupKind::Torus).is_err());
    assert!(InvariantDModule::new(h.clone(), GroupKind::Borel).is_err());
    let b2 = borel_algebra(2).unwrap().defining();
    assert!(InvariantDModule::new(b2.clone(), GroupKind::Borel).is_ok());
    assert!(InvariantDModule::new(b2, GroupKind::Unipotent).is_err());
    let t = InvariantDModule::new(Representation::zero(LieAlgebra::abelian(2), 1), GroupKind::Torus).unwrap();
    assert!(hom_dimension(&t, &t, &cfg()).is_err());
}

#[test]
fn sl2_adjoint_fixture_holds() {
    let f = sl2_adjoint_fixture();
    assert!(f.matches_structure_constants && f.brackets_hold && f.identity_value && f.unimodular);
    assert_eq!(f.pde.len(), 3);
    assert!(f.passed());
}

#[test]
fn heisenberg_flow_satisfies_pde_at_exact_points() {
    let rho = Representation::new(
        LieAlgebra::heisenberg(),
        3,
        vec![QMatrix::unit(3, 0, 1), QMatrix::unit(3, 1, 2), QMatrix::unit(3, 0, 2)],
    )
    .unwrap();
    let zero = Representation::zero(LieAlgebra::heisenberg(), 1);
    let bch = Bch::new(&rho.algebra).unwrap();
    let mut g = Generator::new(21);
    for x0 in exact_basis(&rho, &zero) {
        let x = polynomial_flow(&rho, &zero, &x0, &cfg()).unwrap();
        for _ in 0..100 {
            let p: Vec<Gq> = (0..3).map(|_| g.rational(4)).collect();
            assert!(solves_flow(&x, &rho, &zero, &bch, &p));
            assert_eq!(flow_solution(&rho, &zero, &x0, &p, &cfg()).unwrap(), AnyMatrix::Exact(eval_poly_matrix(&x, &p)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hom_dimension_matches_brute_force(seed in any::<u64>(), fam in 0usize..3, n1 in 1usize..=3, n2 in 1usize..=3) {
        let mut g = Generator::new(seed);
        let fam = FAMILIES[fam];
        let (r1, r2) = (g.nilpotent_rep(fam, n1), g.nilpotent_rep(fam, n2));
        let h = hom_dimension(&module(&r1), &module(&r2), &cfg()).unwrap();
        let (s1, s2) = (semisimplify(&r1, &cfg()).unwrap(), semisimplify(&r2, &cfg()).unwrap());
        let exact = intertwiner_space(&s1.images, &s2.images, 0.0).unwrap();
        let c64 = |ms: &[QMatrix]| ms.iter().map(QMatrix::to_c64).collect::<Vec<CMatrix>>();
        let oracle = complex_intertwiners(&c64(&s1.images), &c64(&s2.images), 1e-9);
        prop_assert_eq!(h.dimension, exact.len());
        prop_assert_eq!(h.dimension, oracle.len());
        prop_assert_eq!(h.initial_value_basis.len(), h.dimension);
        let pairs: usize = h.block_matches.iter().map(|b| b.mult_source * b.mult_target).sum();
        prop_assert_eq!(pairs, h.dimension);
        for x0 in &h.initial_value_basis {
            prop_assert!(is_polynomial_solution(&r1, &r2, x0.as_exact().unwrap(), &cfg()).unwrap());
        }
    }

    #[test]
    fn polynomial_flows_solve_the_system(seed in any::<u64>(), fam in 0usize..4, n1 in 1usize..=3, n2 in 1usize..=3) {
        let mut g = Generator::new(seed);
        let fam = FAMILIES[fam];
        let (r1, r2) = (g.nilpotent_rep(fam, n1), g.nilpotent_rep(fam, n2));
        let basis = exact_basis(&r1, &r2);
        prop_assume!(!basis.is_empty());
        let x0 = basis.iter().fold(QMatrix::zeros(n2, n1), |acc, b| &acc + &b.scale(&g.rational(3)));
        let x = polynomial_flow(&r1, &r2, &x0, &cfg()).unwrap();
        let bch = Bch::new(&r1.algebra).unwrap();
        let m = r1.algebra.dim();
        prop_assert_eq!(eval_poly_matrix(&x, &vec![Gq::zero(); m]), x0.clone());
        for _ in 0..10 {
            let p: Vec<Gq> = (0..m).map(|_| g.rational(3)).collect();
            prop_assert!(solves_flow(&x, &r1, &r2, &bch, &p));
            prop_assert_eq!(flow_solution(&r1, &r2, &x0, &p, &cfg()).unwrap(), AnyMatrix::Exact(eval_poly_matrix(&x, &p)));
        }
    }

    #[test]
    fn homs_compose(seed in any::<u64>(), fam in 0usize..4, n in 1usize..=3, eq in any::<bool>()) {
        let mut g = Generator::new(seed);
        let (r1, r2) = g.nilpotent_pair(FAMILIES[fam], n, eq);
        let r3 = Representation::new(r1.algebra.clone(), n, g.conjugate_all(&r1.images)).unwrap();
        let (b12, b23) = (exact_basis(&r1, &r2), exact_basis(&r2, &r3));
        prop_assume!(!b12.is_empty() && !b23.is_empty());
        let x = g.pick(&b12);
        let y = g.pick(&b23);
        let yx = &y * &x;
        prop_assert!(is_polynomial_solution(&r1, &r3, &yx, &cfg()).unwrap());
        let composed = &polynomial_flow(&r2, &r3, &y, &cfg()).unwrap() * &polynomial_flow(&r1, &r2, &x, &cfg()).unwrap();
        prop_assert_eq!(composed, polynomial_flow(&r1, &r3, &yx, &cfg()).unwrap());
    }

    #[test]
    fn equivalence_means_an_invertible_hom(seed in any::<u64>(), fam in 0usize..4, n in 1usize..=4, eq in any::<bool>()) {
        let mut g = Generator::new(seed);
        let (r1, r2) = g.nilpotent_pair(FAMILIES[fam], n, eq);
        let verdict = gauge_equivalent(&r1, &r2, &cfg()).unwrap().verdict;
        let search = contains_invertible(&exact_basis(&r1, &r2), &cfg()).unwrap();
        prop_assert_eq!(verdict, search.found);
        if let Some(w) = search.witness {
            prop_assert!(!w.det().unwrap().is_zero());
            prop_assert!(is_polynomial_solution(&r1, &r2, &w, &cfg()).unwrap());
        }
    }
}
