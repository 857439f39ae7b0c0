use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nilform::catalog::{bcvary_balanced, bcvary_phi, bcvary_structure, catalog_load, At};
use nilform::complex::build_complex;
use nilform::deformation::{
    check_integrability, deform_complex, extension_map, kuranishi_expand, lie_brackets, vanishes_through, BeltramiDifferential,
    DeformMode,
};
use nilform::extension::{bc_nontriviality, pkahler_extend, solve_extension};
use nilform::form::{Form, Monomial, ParamMatrix};
use nilform::positivity::is_transverse;
use nilform::scalar::{Gq, ParamScalar};
use nilform::NilError;

fn gq() -> impl Strategy<Value = Gq> {
    (-9i64..=9, 1i64..=7, -9i64..=9, 1i64..=7).prop_map(|(a, b, c, d)| Gq::from_parts(a, b, c, d))
}

fn small_point(m: usize) -> impl Strategy<Value = Vec<Gq>> {
    prop::collection::vec((-5i64..=5, -5i64..=5).prop_map(|(a, b)| Gq::from_parts(a, 1000, b, 1000)), m)
}

fn linear_phi(n: usize, entries: &[(usize, usize, usize, Gq)]) -> BeltramiDifferential {
    let mut m = ParamMatrix::zero(n, n);
    for (i, j, k, c) in entries {
        m.set(*i, *j, ParamScalar::t(*k).scale(c));
    }
    BeltramiDifferential::from_matrix(&m)
}

fn torus_kahler() -> Form {
    catalog_load("torus3").unwrap().form.unwrap().form
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn deformed_bcvary_fibres_are_complexes(t in small_point(4)) {
        let se_t = deform_complex(&bcvary_structure(), &bcvary_phi(), &DeformMode::Point(t)).unwrap();
        prop_assert!(build_complex(&se_t).is_ok());
    }

    #[test]
    fn extension_map_commutes_with_conjugation(c in prop::collection::vec(gq(), 4)) {
        let phi = linear_phi(3, &[(0, 1, 1, c[0].clone()), (2, 0, 2, c[1].clone())]);
        let omega = Form::constant_monomial(Monomial::new(&[1], &[2]), c[2].clone())
            .add(&Form::constant_monomial(Monomial::new(&[3], &[3]), c[3].clone()));
        prop_assert_eq!(extension_map(&phi, &omega).conj(), extension_map(&phi, &omega.conj()));
    }

    #[test]
    fn commutator_identity_holds_for_any_constant_phi(
        entries in prop::collection::vec((0usize..3, 0usize..3, gq()), 1..5),
        i in prop::collection::vec(1usize..=3, 0..3),
        j in prop::collection::vec(1usize..=3, 0..3),
    ) {
        let mut m = ParamMatrix::zero(3, 3);
        for (a, b, c) in &entries {
            m.set(*a, *b, ParamScalar::constant(c.clone()));
        }
        let phi = BeltramiDifferential::from_matrix(&m);
        let mut i = i;
        let mut j = j;
        i.sort();
        i.dedup();
        j.sort();
        j.dedup();
        let alpha = Form::basis(&i, &j);
        let table = lie_brackets(&catalog_load("iwasawa3").unwrap().se).unwrap();
        prop_assert!(table.extension_commutator_residual(&phi, &alpha).is_zero());
    }

    #[test]
    fn torus_kahler_form_extends(c in prop::collection::vec(gq(), 3), t in small_point(2)) {
        let se = catalog_load("torus3").unwrap().se;
        let phi = linear_phi(3, &[(0, 0, 1, c[0].clone()), (1, 2, 2, c[1].clone()), (2, 1, 1, c[2].clone())]);
        let st = solve_extension(&se, &phi, &torus_kahler(), 3).unwrap();
        prop_assert!(st.closed_through_order);
        prop_assert!(st.graded_pieces_vanish);
        let ext = pkahler_extend(&se, &phi, &torus_kahler(), 3, &[t], 50, 3).unwrap();
        prop_assert!(ext.real_closed_through_order);
        prop_assert!(ext.verdicts.iter().all(|v| v.is_transverse()));
    }
}

#[test]
fn abelian_kuranishi_family_is_linear() {
    for name in ["torus3", "abelian_2"] {
        let table = lie_brackets(&catalog_load(name).unwrap().se).unwrap();
        let dirs: Vec<_> = nilform::deformation::harmonic_beltrami_basis(&table).into_iter().take(3).collect();
        let k = kuranishi_expand(&table, Some(dirs), 3).unwrap();
        assert!(k.obstructions.iter().all(|o| o.is_zero()), "{name}");
        assert!(k.defects.iter().all(|d| d.is_zero()), "{name}");
        for c in &k.phi.as_vector_form().components {
            assert!(c.by_exponent().keys().all(|e| e.degree() <= 1), "{name}");
        }
    }
}

#[test]
fn iwasawa_kuranishi_is_unobstructed() {
    let table = lie_brackets(&catalog_load("iwasawa3").unwrap().se).unwrap();
    let h = nilform::deformation::harmonic_beltrami_basis(&table);
    assert_eq!(h.len(), 6);
    let dirs: Vec<_> = h.into_iter().take(4).collect();
    let k = kuranishi_expand(&table, Some(dirs), 3).unwrap();
    assert!(k.obstructions.iter().all(|o| o.is_zero()));
    assert!(k.defects.iter().all(|d| d.is_zero()));
    let (_, res) = table.check_integrability(&k.phi.truncated(3));
    assert!(res.components.iter().all(|c| vanishes_through(c, 3)));
    assert!(!k.phi.is_zero());
}

#[test]
fn non_integrable_phi_is_rejected() {
    let se = catalog_load("iwasawa3").unwrap().se;
    // φ = t₁ γ̄³⊗θ₁ + t₂ γ̄¹⊗θ₂ has [φ,φ] ≠ 0 at second order.
    let phi = linear_phi(3, &[(0, 2, 1, Gq::one()), (1, 0, 2, Gq::one())]);
    let (ok, res) = check_integrability(&se, &phi).unwrap();
    assert!(!ok);
    assert!(!res.is_zero());
    assert!(matches!(
        deform_complex(&se, &phi, &DeformMode::Symbolic { order: 2 }),
        Err(NilError::NotIntegrable)
    ));
    let om = Form::basis(&[1, 2], &[1, 2]);
    assert!(matches!(solve_extension(&se, &phi, &om, 2), Err(NilError::NotIntegrable)));
}

#[test]
fn extension_preconditions() {
    let se = bcvary_structure();
    let om = bcvary_balanced();
    // Constant term in φ.
    let mut m = ParamMatrix::zero(5, 5);
    m.set(1, 3, ParamScalar::constant(Gq::from_frac(1, 3)));
    assert!(matches!(
        solve_extension(&se, &BeltramiDifferential::from_matrix(&m), &om, 2),
        Err(NilError::NotPerturbative)
    ));
    // Not closed.
    let bad = Monomial::basis(5, 4, 4)
        .into_iter()
        .map(|m| Form::constant_monomial(m, Gq::one()))
        .find(|f| !se.d(f).is_zero())
        .unwrap();
    assert!(matches!(solve_extension(&se, &bcvary_phi(), &bad, 2), Err(NilError::PreconditionFailed(_))));
    // Top degree and non-real inputs to the p-Kähler driver.
    let vol = Form::basis(&[1, 2, 3, 4, 5], &[1, 2, 3, 4, 5]);
    assert!(matches!(
        pkahler_extend(&se, &bcvary_phi(), &vol, 2, &[], 10, 1),
        Err(NilError::PreconditionFailed(_))
    ));
    let skew = om.scale(&Gq::i());
    assert!(matches!(
        pkahler_extend(&se, &bcvary_phi(), &skew, 2, &[], 10, 1),
        Err(NilError::PreconditionFailed(_))
    ));
    // Iwasawa (2,2): the (2,3)-th mild lemma fails.
    let iw = catalog_load("iwasawa3").unwrap().se;
    let phi = linear_phi(3, &[(0, 0, 1, Gq::one())]);
    let om2 = Form::basis(&[1, 2], &[1, 2]);
    assert!(matches!(solve_extension(&iw, &phi, &om2, 2), Err(NilError::PreconditionFailed(_))));
}

#[test]
fn solver_on_real_input_is_conjugation_symmetric() {
    let st = solve_extension(&bcvary_structure(), &bcvary_phi(), &bcvary_balanced(), 3).unwrap();
    assert!(st.closed_through_order);
    assert_eq!(st.omega.conj(), st.omega);
    assert_eq!(st.symmetrized(), st.omega);
}

#[test]
fn extension_stays_nontrivial_and_ddbar_images_do_not() {
    let e = catalog_load("bcvary10").unwrap();
    let st = solve_extension(&e.se, e.phi.as_ref().unwrap(), &bcvary_balanced(), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for at in [At::SmallP1, At::SmallP2] {
        let t = at.point(4);
        let se_t = deform_complex(&e.se, e.phi.as_ref().unwrap(), &DeformMode::Point(t.clone())).unwrap();
        let nc = build_complex(&se_t).unwrap().numeric();
        let x: Vec<Gq> = (0..nc.dim(3, 3)).map(|_| Gq::from_int(rng.gen_range(-3..=3))).collect();
        let y = nc.ddbar(3, 3).mul_vec(&x);
        assert!(!bc_nontriviality(&nc, &nc.form_of(4, 4, &y)).unwrap());
        let open = Monomial::basis(5, 4, 4)
            .into_iter()
            .map(|m| Form::constant_monomial(m, Gq::one()))
            .find(|f| !se_t.d(f).is_zero())
            .unwrap();
        assert!(matches!(bc_nontriviality(&nc, &open), Err(NilError::InvalidInput(_))));
        let g = st.at_point(&t);
        assert!(is_transverse(&g, 5, 50, 1).is_transverse());
    }
}
