use proptest::prelude::*;

use nilform::catalog::{catalog_load, At};
use nilform::cohomology::{
    bott_chern_representatives, canonical_ddbar_solution, conjugate_system_with_bar, is_ddbar_exact, HodgeContext,
    RankProfile,
};
use nilform::complex::{build_complex, NumericComplex};
use nilform::deformation::{deform_complex, DeformMode};
use nilform::linalg::{vec_add, vec_is_zero, vec_scale, Matrix};
use nilform::scalar::Gq;
use nilform::NilError;

fn nc_of(name: &str) -> NumericComplex {
    build_complex(&catalog_load(name).unwrap().se).unwrap().numeric()
}

fn bcvary_at(at: At) -> NumericComplex {
    let e = catalog_load("bcvary10").unwrap();
    let se = match at {
        At::Zero => e.se.clone(),
        _ => deform_complex(&e.se, e.phi.as_ref().unwrap(), &DeformMode::Point(at.point(4))).unwrap(),
    };
    build_complex(&se).unwrap().numeric()
}

fn gq() -> impl Strategy<Value = Gq> {
    (-9i64..=9, 1i64..=5, -9i64..=9, 1i64..=5).prop_map(|(a, b, c, d)| Gq::from_parts(a, b, c, d))
}

fn combo(vs: &[Vec<Gq>], cs: &[Gq], dim: usize) -> Vec<Gq> {
    vs.iter().zip(cs.iter().cycle()).fold(vec![Gq::zero(); dim], |acc, (v, c)| vec_add(&acc, &vec_scale(v, c)))
}

#[test]
fn conjugation_symmetries() {
    for nc in [nc_of("iwasawa3"), nc_of("torus3"), bcvary_at(At::Zero), bcvary_at(At::P1)] {
        let r = RankProfile::of(&nc);
        for p in 0..=nc.n {
            for q in 0..=nc.n {
                assert_eq!(r.h_bc(p, q), r.h_bc(q, p));
                assert_eq!(r.h_a(p, q), r.h_a(q, p));
                assert_eq!(r.h_delbar(p, q), r.h_del(q, p));
                assert!(r.h_delbar(p, q) <= nc.dim(p, q));
            }
        }
    }
}

#[test]
fn bott_chern_and_aeppli_are_dual() {
    let nc = nc_of("iwasawa3");
    let r = RankProfile::of(&nc);
    for p in 0..=3 {
        for q in 0..=3 {
            assert_eq!(r.h_bc(p, q), r.h_a(3 - q, 3 - p), "({p},{q})");
            assert_eq!(bott_chern_representatives(&nc, p, q).len(), r.h_bc(p, q));
        }
    }
}

#[test]
fn green_identities_on_iwasawa_every_bidegree() {
    let hc = HodgeContext::new(nc_of("iwasawa3"));
    let nc = &hc.nc;
    for p in 0..=3 {
        for q in 0..=3 {
            let h = hc.at(p, q);
            let id = Matrix::identity(nc.dim(p, q));
            assert_eq!(h.h_bc.add(&hc.box_bc(p, q).mul(&h.g_bc)), id);
            assert_eq!(h.h_a.add(&hc.box_a(p, q).mul(&h.g_a)), id);
            assert_eq!(h.h_bc.mul(&h.h_bc), h.h_bc);
            if p > 0 && q > 0 {
                let dd = nc.ddbar(p - 1, q - 1);
                assert_eq!(h.g_bc.mul(&dd), dd.mul(&hc.at(p - 1, q - 1).g_a), "({p},{q})");
            }
        }
    }
}

#[test]
fn unsolvable_right_hand_side_is_reported() {
    let hc = HodgeContext::new(nc_of("iwasawa3"));
    let y = nilform::Form::basis(&[1, 2], &[1]);
    assert!(matches!(canonical_ddbar_solution(&hc, 2, 1, &y), Err(NilError::NotSolvable(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_solution_is_minimal(p in 1usize..=3, q in 1usize..=3, cs in prop::collection::vec(gq(), 1..6), ks in prop::collection::vec(gq(), 20)) {
        let hc = HodgeContext::new(nc_of("iwasawa3"));
        let nc = &hc.nc;
        let dd = nc.ddbar(p - 1, q - 1);
        let x0 = combo(&Matrix::identity(nc.dim(p - 1, q - 1)).columns(), &cs, nc.dim(p - 1, q - 1));
        let y = dd.mul_vec(&x0);
        let x = canonical_ddbar_solution(&hc, p, q, &nc.form_of(p, q, &y)).unwrap();
        let xv = nc.vector_of(p - 1, q - 1, &x).unwrap();
        prop_assert_eq!(dd.mul_vec(&xv), y.clone());
        // Equals G_A(∂∂̄)*y.
        let alt = hc.at(p - 1, q - 1).g_a.mul(&dd.adjoint()).mul_vec(&y);
        prop_assert_eq!(&alt, &xv);
        let norm = |v: &[Gq]| v.iter().map(|c| c.norm_sqr()).fold(num_rational::BigRational::from_integer(0.into()), |a, b| a + b);
        let ker = dd.nullspace();
        for k in 0..20 {
            if ker.is_empty() {
                break;
            }
            let pert = vec_add(&xv, &vec_scale(&ker[k % ker.len()], &ks[k]));
            prop_assert!(norm(&pert) >= norm(&xv));
        }
        prop_assert!(is_ddbar_exact(nc, p, q, &nc.form_of(p, q, &y)).unwrap());
    }

    #[test]
    fn conjugate_system_on_bcvary(cz in prop::collection::vec(gq(), 1..5), cx in prop::collection::vec(gq(), 1..5)) {
        let hc = HodgeContext::new(bcvary_at(At::Zero));
        let nc = &hc.nc;
        let (p, q) = (4, 4);
        let zk = nc.ddbar(p + 1, q - 1).nullspace();
        let xk = nc.ddbar(p - 1, q + 1).nullspace();
        let z = combo(&zk, &cz, nc.dim(p + 1, q - 1));
        let xb = combo(&xk, &cx, nc.dim(p - 1, q + 1));
        let zeta = nc.form_of(p + 1, q - 1, &z);
        let xi_bar = nc.form_of(p - 1, q + 1, &xb);
        let x = conjugate_system_with_bar(&hc, p, q, &zeta, &xi_bar).unwrap();
        let xv = nc.vector_of(p, q, &x).unwrap();
        prop_assert_eq!(nc.del(p, q).mul_vec(&xv), nc.delbar(p + 1, q - 1).mul_vec(&z));
        prop_assert_eq!(nc.delbar(p, q).mul_vec(&xv), nc.del(p - 1, q + 1).mul_vec(&xb));
    }
}

#[test]
fn conjugate_system_on_torus_is_zero() {
    let hc = HodgeContext::new(nc_of("torus3"));
    let zeta = nilform::Form::basis(&[1, 2], &[]);
    let xi_bar = nilform::Form::basis(&[], &[1, 3]);
    let x = conjugate_system_with_bar(&hc, 1, 1, &zeta, &xi_bar).unwrap();
    assert!(x.is_zero());
}

#[test]
fn conjugate_system_refuses_when_mild_lemma_fails() {
    // Iwasawa: the (2,3)-th mild lemma fails, so (p,q) = (2,2) is refused.
    let hc = HodgeContext::new(nc_of("iwasawa3"));
    let r = conjugate_system_with_bar(&hc, 2, 2, &nilform::Form::zero(), &nilform::Form::zero());
    assert!(matches!(r, Err(NilError::PreconditionFailed(_))));
}

#[test]
fn ddbar_images_are_exact_at_generic_fiber() {
    let nc = bcvary_at(At::P2);
    for c in nc.ddbar_into(4, 4).columns() {
        if vec_is_zero(&c) {
            continue;
        }
        assert!(is_ddbar_exact(&nc, 4, 4, &nc.form_of(4, 4, &c)).unwrap());
    }
}
