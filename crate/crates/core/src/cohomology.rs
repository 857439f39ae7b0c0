//! Dolbeault, ∂-, Bott-Chern, Aeppli and de Rham cohomology of invariant forms,
//! together with the Hodge-theoretic solution operators.

use std::sync::OnceLock;

use serde::Serialize;

use crate::complex::{InvariantComplex, NumericComplex};
use crate::error::{NilError, Result};
use crate::form::Form;
use crate::linalg::{first_outside_span, Matrix};
use crate::scalar::Gq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CohomologyKind {
    Dolbeault,
    Del,
    BottChern,
    Aeppli,
    DeRham,
}

/// The ranks every cohomology number is derived from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankProfile {
    pub n: usize,
    dims: Vec<Vec<usize>>,
    del: Vec<Vec<usize>>,
    delbar: Vec<Vec<usize>>,
    /// rank of (∂, ∂̄) stacked, on (p,q)
    joint: Vec<Vec<usize>>,
    /// rank of ∂∂̄ on (p,q)
    ddbar: Vec<Vec<usize>>,
    /// rank of [∂ | ∂̄] landing in (p,q)
    exact: Vec<Vec<usize>>,
    /// rank of d on total degree k
    d_total: Vec<usize>,
}

impl RankProfile {
    pub fn of(nc: &NumericComplex) -> Self {
        let n = nc.n;
        let grid = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            (0..=n).map(|p| (0..=n).map(|q| f(p, q)).collect()).collect()
        };
        RankProfile {
            n,
            dims: grid(&|p, q| nc.dim(p, q)),
            del: grid(&|p, q| nc.del(p, q).rank()),
            delbar: grid(&|p, q| nc.delbar(p, q).rank()),
            joint: grid(&|p, q| nc.del(p, q).vstack(&nc.delbar(p, q)).rank()),
            ddbar: grid(&|p, q| nc.ddbar(p, q).rank()),
            exact: grid(&|p, q| nc.del_into(p, q).hstack(&nc.delbar_into(p, q)).rank()),
            d_total: (0..=2 * n).map(|k| nc.d_total(k).rank()).collect(),
        }
    }

    /// Rankwise maximum: the generic value when both profiles come from generic points.
    pub fn max(&self, o: &Self) -> Self {
        let mx = |a: &Vec<Vec<usize>>, b: &Vec<Vec<usize>>| -> Vec<Vec<usize>> {
            a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| *u.max(v)).collect()).collect()
        };
        RankProfile {
            n: self.n,
            dims: self.dims.clone(),
            del: mx(&self.del, &o.del),
            delbar: mx(&self.delbar, &o.delbar),
            joint: mx(&self.joint, &o.joint),
            ddbar: mx(&self.ddbar, &o.ddbar),
            exact: mx(&self.exact, &o.exact),
            d_total: self.d_total.iter().zip(&o.d_total).map(|(a, b)| *a.max(b)).collect(),
        }
    }

    fn at(v: &[Vec<usize>], p: isize, q: isize, n: usize) -> usize {
        if p < 0 || q < 0 || p as usize > n || q as usize > n {
            0
        } else {
            v[p as usize][q as usize]
        }
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.dims[p][q]
    }

    pub fn h_delbar(&self, p: usize, q: usize) -> usize {
        let (pi, qi) = (p as isize, q as isize);
        self.dims[p][q] - self.delbar[p][q] - Self::at(&self.delbar, pi, qi - 1, self.n)
    }

    pub fn h_del(&self, p: usize, q: usize) -> usize {
        let (pi, qi) = (p as isize, q as isize);
        self.dims[p][q] - self.del[p][q] - Self::at(&self.del, pi - 1, qi, self.n)
    }

    pub fn dclosed_dim(&self, p: usize, q: usize) -> usize {
        self.dims[p][q] - self.joint[p][q]
    }

    pub fn ddbar_image_dim(&self, p: usize, q: usize) -> usize {
        Self::at(&self.ddbar, p as isize - 1, q as isize - 1, self.n)
    }

    pub fn h_bc(&self, p: usize, q: usize) -> usize {
        self.dclosed_dim(p, q) - self.ddbar_image_dim(p, q)
    }

    pub fn h_a(&self, p: usize, q: usize) -> usize {
        self.dims[p][q] - self.ddbar[p][q] - self.exact[p][q]
    }

    pub fn betti(&self, k: usize) -> usize {
        let dim: usize = (0..=k.min(self.n)).filter(|p| k - p <= self.n).map(|p| self.dims[p][k - p]).sum();
        let prev = if k == 0 { 0 } else { self.d_total[k - 1] };
        dim - self.d_total[k] - prev
    }

    pub fn report(&self) -> CohomologyReport {
        let n = self.n;
        let grid = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> {
            (0..=n).map(|p| (0..=n).map(|q| f(p, q)).collect()).collect()
        };
        CohomologyReport {
            scope: "invariant".to_string(),
            n,
            h_bc: grid(&|p, q| self.h_bc(p, q)),
            h_a: grid(&|p, q| self.h_a(p, q)),
            h_dolbeault: grid(&|p, q| self.h_delbar(p, q)),
            h_del: grid(&|p, q| self.h_del(p, q)),
            betti: (0..=2 * n).map(|k| self.betti(k)).collect(),
        }
    }
}

/// Cohomology numbers of the invariant complex (all indexed `[p][q]`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    /// Always "invariant": these are the numbers of the left-invariant subcomplex.
    pub scope: String,
    pub n: usize,
    pub h_bc: Vec<Vec<usize>>,
    pub h_a: Vec<Vec<usize>>,
    pub h_dolbeault: Vec<Vec<usize>>,
    pub h_del: Vec<Vec<usize>>,
    pub betti: Vec<usize>,
}

pub fn cohomology_report(nc: &NumericComplex) -> CohomologyReport {
    RankProfile::of(nc).report()
}

/// Dimension of one cohomology group; `q` is ignored for de Rham (`p` is the degree).
pub fn cohomology(nc: &NumericComplex, which: CohomologyKind, p: usize, q: usize) -> usize {
    match which {
        CohomologyKind::Dolbeault => nc.dim(p, q) - nc.delbar(p, q).rank() - nc.delbar_into(p, q).rank(),
        CohomologyKind::Del => nc.dim(p, q) - nc.del(p, q).rank() - nc.del_into(p, q).rank(),
        CohomologyKind::BottChern => dclosed_dim(nc, p, q) - ddbar_image_dim(nc, p, q),
        CohomologyKind::Aeppli => {
            nc.dim(p, q) - nc.ddbar(p, q).rank() - nc.del_into(p, q).hstack(&nc.delbar_into(p, q)).rank()
        }
        CohomologyKind::DeRham => {
            let k = p;
            let prev = if k == 0 { 0 } else { nc.d_total(k - 1).rank() };
            nc.total_dim(k) - nc.d_total(k).rank() - prev
        }
    }
}

pub fn ddbar_image_dim(nc: &NumericComplex, p: usize, q: usize) -> usize {
    nc.ddbar_into(p, q).rank()
}

pub fn dclosed_dim(nc: &NumericComplex, p: usize, q: usize) -> usize {
    nc.dim(p, q) - nc.del(p, q).vstack(&nc.delbar(p, q)).rank()
}

/// Basis of the d-closed (p,q)-forms.
pub fn dclosed_basis(nc: &NumericComplex, p: usize, q: usize) -> Vec<Form> {
    nc.del(p, q).vstack(&nc.delbar(p, q)).nullspace().iter().map(|v| nc.form_of(p, q, v)).collect()
}

/// d-closed (p,q)-forms whose classes form a basis of H_BC^{p,q}.
pub fn bott_chern_representatives(nc: &NumericComplex, p: usize, q: usize) -> Vec<Form> {
    let dim = nc.dim(p, q);
    let closed = nc.del(p, q).vstack(&nc.delbar(p, q)).nullspace();
    let mut acc = nc.ddbar_into(p, q).column_basis();
    let mut reps = Vec::new();
    for v in closed {
        acc.push(v.clone());
        if crate::linalg::span_rank(dim, &acc) == acc.len() {
            reps.push(nc.form_of(p, q, &v));
        } else {
            acc.pop();
        }
    }
    reps
}

/// Whether a d-closed (p,q)-form is ∂∂̄-exact.
pub fn is_ddbar_exact(nc: &NumericComplex, p: usize, q: usize, a: &Form) -> Result<bool> {
    let v = nc.vector_of(p, q, a)?;
    Ok(nc.ddbar_into(p, q).in_column_space(&v))
}

/// The two generic sample points for `m` parameters.
pub fn generic_points(m: usize) -> [Vec<Gq>; 2] {
    const A: [(i64, i64); 4] = [(3, 7), (5, 11), (2, 13), (7, 17)];
    const B: [(i64, i64); 4] = [(2, 9), (-3, 13), (5, 19), (1, 23)];
    let mk = |base: &[(i64, i64); 4]| -> Vec<Gq> {
        (0..m)
            .map(|k| {
                let (a, b) = base[k % 4];
                Gq::from_frac(a, b * (k as i64 / 4 + 1))
            })
            .collect()
    };
    [mk(&A), mk(&B)]
}

/// Rank profile at generic t, from the maximum over both sample points.
pub fn generic_profile(cx: &InvariantComplex) -> RankProfile {
    let [a, b] = generic_points(cx.source.m);
    RankProfile::of(&cx.evaluate(&a)).max(&RankProfile::of(&cx.evaluate(&b)))
}

/// Laplacians, harmonic projectors and Green operators at one bidegree.
#[derive(Clone, Debug)]
pub struct BidegreeHodge {
    pub box_bc: Matrix,
    pub box_a: Matrix,
    pub h_bc: Matrix,
    pub h_a: Matrix,
    pub g_bc: Matrix,
    pub g_a: Matrix,
}

/// Hodge theory of a numeric complex with the monomial basis declared orthonormal.
/// Per-bidegree data is computed on first use.
#[derive(Debug)]
pub struct HodgeContext {
    pub nc: NumericComplex,
    cache: Vec<Vec<OnceLock<BidegreeHodge>>>,
}

pub fn build_hodge(cx: &InvariantComplex, t_point: Option<&[Gq]>) -> HodgeContext {
    let nc = match t_point {
        Some(t) => cx.evaluate(t),
        None => cx.at_zero(),
    };
    HodgeContext::new(nc)
}

fn harmonic_projector(lap: &Matrix) -> Matrix {
    let k = lap.nullspace();
    if k.is_empty() {
        return Matrix::zero(lap.rows(), lap.rows());
    }
    Matrix::from_columns(lap.rows(), &k).projector_onto_columns()
}

fn green(lap: &Matrix, h: &Matrix) -> Matrix {
    let inv = lap.add(h).inverse().expect("□ + H is invertible");
    inv.sub(h)
}

impl HodgeContext {
    pub fn new(nc: NumericComplex) -> Self {
        let n = nc.n;
        let cache = (0..=n).map(|_| (0..=n).map(|_| OnceLock::new()).collect()).collect();
        HodgeContext { nc, cache }
    }

    pub fn at(&self, p: usize, q: usize) -> &BidegreeHodge {
        self.cache[p][q].get_or_init(|| self.compute(p, q))
    }

    pub fn box_bc(&self, p: usize, q: usize) -> Matrix {
        let nc = &self.nc;
        let e = nc.ddbar_into(p, q);
        let f = nc.ddbar(p, q);
        let a = nc.del(p, q);
        let b = nc.delbar(p, q);
        let dp = nc.del_into(p, q + 1);
        let bq = nc.delbar_into(p + 1, q);
        let t1 = e.mul(&e.adjoint());
        let t2 = f.adjoint().mul(&f);
        let t3 = b.adjoint().mul(&dp.mul(&dp.adjoint())).mul(&b);
        let t4 = a.adjoint().mul(&bq.mul(&bq.adjoint())).mul(&a);
        let t5 = b.adjoint().mul(&b);
        let t6 = a.adjoint().mul(&a);
        t1.add(&t2).add(&t3).add(&t4).add(&t5).add(&t6)
    }

    pub fn box_a(&self, p: usize, q: usize) -> Matrix {
        let nc = &self.nc;
        let dim = nc.dim(p, q);
        let e = nc.ddbar_into(p, q);
        let f = nc.ddbar(p, q);
        let c = nc.delbar_into(p, q);
        let g = nc.del_into(p, q);
        let t1 = f.adjoint().mul(&f);
        let t2 = e.mul(&e.adjoint());
        let t3 = if q == 0 {
            Matrix::zero(dim, dim)
        } else {
            let a1 = nc.del(p, q - 1);
            c.mul(&a1.adjoint().mul(&a1)).mul(&c.adjoint())
        };
        let t4 = if p == 0 {
            Matrix::zero(dim, dim)
        } else {
            let bp = nc.delbar(p - 1, q);
            g.mul(&bp.adjoint().mul(&bp)).mul(&g.adjoint())
        };
        let t5 = c.mul(&c.adjoint());
        let t6 = g.mul(&g.adjoint());
        t1.add(&t2).add(&t3).add(&t4).add(&t5).add(&t6)
    }

    fn compute(&self, p: usize, q: usize) -> BidegreeHodge {
        let box_bc = self.box_bc(p, q);
        let box_a = self.box_a(p, q);
        let h_bc = harmonic_projector(&box_bc);
        let h_a = harmonic_projector(&box_a);
        let g_bc = green(&box_bc, &h_bc);
        let g_a = green(&box_a, &h_a);
        BidegreeHodge { box_bc, box_a, h_bc, h_a, g_bc, g_a }
    }

    /// (∂∂̄)* G_BC as a matrix (p,q) → (p-1,q-1).
    pub fn ddbar_solver(&self, p: usize, q: usize) -> Matrix {
        let e = self.nc.ddbar_into(p, q);
        e.adjoint().mul(&self.at(p, q).g_bc)
    }

    /// ∂̄(∂∂̄)*G_BC∂̄ : (p+1,q-1) → (p,q).
    pub fn conjugate_left(&self, p: usize, q: usize) -> Matrix {
        let nc = &self.nc;
        let b1 = nc.delbar(p + 1, q - 1);
        let s = self.ddbar_solver(p + 1, q);
        nc.delbar(p, q - 1).mul(&s).mul(&b1)
    }

    /// ∂(∂∂̄)*G_BC∂ : (p-1,q+1) → (p,q).
    pub fn conjugate_right(&self, p: usize, q: usize) -> Matrix {
        let nc = &self.nc;
        let a1 = nc.del(p - 1, q + 1);
        let s = self.ddbar_solver(p, q + 1);
        nc.del(p - 1, q).mul(&s).mul(&a1)
    }
}

/// The minimal-norm solution x = (∂∂̄)*G_BC y of ∂∂̄x = y, y of bidegree (p,q).
pub fn canonical_ddbar_solution(hc: &HodgeContext, p: usize, q: usize, y: &Form) -> Result<Form> {
    if p == 0 || q == 0 {
        return if y.is_zero() {
            Ok(Form::zero())
        } else {
            Err(NilError::NotSolvable(format!("nothing maps onto bidegree ({p},{q})")))
        };
    }
    let v = hc.nc.vector_of(p, q, y)?;
    if !hc.nc.ddbar_into(p, q).in_column_space(&v) {
        return Err(NilError::NotSolvable(format!("right-hand side is not ∂∂̄-exact in bidegree ({p},{q})")));
    }
    let x = hc.ddbar_solver(p, q).mul_vec(&v);
    Ok(hc.nc.form_of(p - 1, q - 1, &x))
}

/// Solve ∂x = ∂̄ζ, ∂̄x = ∂ξ̄ for x of bidegree (p,q), given ζ ∈ (p+1,q-1) and ξ ∈ (q+1,p-1).
pub fn solve_conjugate_system(hc: &HodgeContext, p: usize, q: usize, zeta: &Form, xi: &Form) -> Result<Form> {
    conjugate_system_with_bar(hc, p, q, zeta, &xi.conj())
}

/// As [`solve_conjugate_system`], with ξ̄ ∈ (p-1,q+1) supplied directly.
pub fn conjugate_system_with_bar(hc: &HodgeContext, p: usize, q: usize, zeta: &Form, xi_bar: &Form) -> Result<Form> {
    let nc = &hc.nc;
    let n = nc.n;
    if p > n || q > n {
        return Err(NilError::InvalidInput(format!("bidegree ({p},{q}) out of range")));
    }
    let zeta_ok = zeta.is_zero() || zeta.is_pure(p + 1, q.wrapping_sub(1));
    let xi_ok = xi_bar.is_zero() || xi_bar.is_pure(p.wrapping_sub(1), q + 1);
    if !zeta_ok || !xi_ok {
        return Err(NilError::InvalidInput("ζ or ξ has the wrong bidegree".into()));
    }
    for (a, b) in [(p, q + 1), (q, p + 1)] {
        if a <= n && b <= n && !crate::lemmata::mild(nc, a, b).holds {
            return Err(NilError::PreconditionFailed(format!("the ({a},{b})-th mild ∂∂̄-lemma fails")));
        }
    }
    let mut x = vec![Gq::zero(); nc.dim(p, q)];
    if !zeta.is_zero() {
        let z = nc.vector_of(p + 1, q - 1, zeta)?;
        if !crate::linalg::vec_is_zero(&nc.ddbar(p + 1, q - 1).mul_vec(&z)) {
            return Err(NilError::PreconditionFailed("∂∂̄ζ ≠ 0".into()));
        }
        let rhs = nc.delbar(p + 1, q - 1).mul_vec(&z);
        if !nc.ddbar_into(p + 1, q).in_column_space(&rhs) {
            return Err(NilError::PreconditionFailed("∂̄ζ is not ∂∂̄-exact".into()));
        }
        x = crate::linalg::vec_add(&x, &hc.conjugate_left(p, q).mul_vec(&z));
    }
    if !xi_bar.is_zero() {
        let w = nc.vector_of(p - 1, q + 1, xi_bar)?;
        if !crate::linalg::vec_is_zero(&nc.ddbar(p - 1, q + 1).mul_vec(&w)) {
            return Err(NilError::PreconditionFailed("∂̄∂ξ̄ ≠ 0".into()));
        }
        let rhs = nc.del(p - 1, q + 1).mul_vec(&w);
        if !nc.ddbar_into(p, q + 1).in_column_space(&rhs) {
            return Err(NilError::PreconditionFailed("∂ξ̄ is not ∂∂̄-exact".into()));
        }
        x = crate::linalg::vec_sub(&x, &hc.conjugate_right(p, q).mul_vec(&w));
    }
    Ok(nc.form_of(p, q, &x))
}

/// Whether every vector in `sub` lies in the column span of `m`; returns the first offender.
pub(crate) fn outside_image(m: &Matrix, sub: &[Vec<Gq>]) -> Option<usize> {
    first_outside_span(m.rows(), sub, &m.columns())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::structure::StructureEquations;

    fn iwasawa() -> InvariantComplex {
        let se =
            StructureEquations::new("iw", 3, 0, vec![Form::zero(), Form::zero(), Form::basis(&[1, 2], &[]).neg()])
                .unwrap();
        build_complex(&se).unwrap()
    }

    #[test]
    fn constants_have_bc_one() {
        let nc = iwasawa().numeric();
        assert_eq!(cohomology(&nc, CohomologyKind::BottChern, 0, 0), 1);
    }

    #[test]
    fn torus_numbers() {
        let cx = build_complex(&StructureEquations::abelian("t", 3)).unwrap();
        let r = cohomology_report(&cx.numeric());
        assert_eq!(r.h_bc[1][1], 9);
        assert_eq!(r.betti, vec![1, 6, 15, 20, 15, 6, 1]);
    }

    #[test]
    fn report_matches_single_queries() {
        let nc = iwasawa().numeric();
        let r = cohomology_report(&nc);
        for p in 0..=3 {
            for q in 0..=3 {
                assert_eq!(r.h_bc[p][q], cohomology(&nc, CohomologyKind::BottChern, p, q));
                assert_eq!(r.h_a[p][q], cohomology(&nc, CohomologyKind::Aeppli, p, q));
                assert_eq!(r.h_dolbeault[p][q], cohomology(&nc, CohomologyKind::Dolbeault, p, q));
            }
        }
        for k in 0..=6 {
            assert_eq!(r.betti[k], cohomology(&nc, CohomologyKind::DeRham, k, 0));
        }
    }

    #[test]
    fn iwasawa_betti_numbers() {
        // the Iwasawa manifold has b = 1, 4, 8, 10, 8, 4, 1
        let r = cohomology_report(&iwasawa().numeric());
        assert_eq!(r.betti, vec![1, 4, 8, 10, 8, 4, 1]);
    }

    #[test]
    fn torus_hodge_is_trivial() {
        let cx = build_complex(&StructureEquations::abelian("t", 2)).unwrap();
        let hc = build_hodge(&cx, None);
        let h = hc.at(1, 1);
        assert!(h.box_bc.is_zero());
        assert_eq!(h.h_bc, Matrix::identity(4));
        assert!(h.g_bc.is_zero());
    }

    #[test]
    fn harmonic_dimension_matches_quotient() {
        let cx = iwasawa();
        let hc = build_hodge(&cx, None);
        for p in 0..=3 {
            for q in 0..=3 {
                let h = hc.at(p, q);
                assert_eq!(h.box_bc.nullspace().len(), cohomology(&hc.nc, CohomologyKind::BottChern, p, q));
                assert_eq!(h.box_a.nullspace().len(), cohomology(&hc.nc, CohomologyKind::Aeppli, p, q));
            }
        }
    }
}
