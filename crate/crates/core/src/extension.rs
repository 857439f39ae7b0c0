//! Power-series extension of d-closed (p,q)-forms along a Beltrami family.
//!
//! With ψ = (1−φ̄φ)^{-1}φ̄ and Ω̃ = (1−φ̄φ)⨼Ω one has e^{ι_φ|ι_φ̄}Ω = e^{ι_φ}e^{ι_ψ}Ω̃,
//! and d of this vanishes iff the two graded systems in the ladder A_k = ι_ψ^k/k! Ω̃ vanish.
//! The solver fixes Ω̃ order by order with the canonical ∂∂̄-solutions.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::cohomology::HodgeContext;
use crate::complex::{build_complex, NumericComplex};
use crate::deformation::{extension_map, lie_brackets, vanishes_through, BeltramiDifferential, LieBracketTable};
use crate::error::{NilError, Result};
use crate::form::{contract, contract_pow, neumann_invert, simultaneous_contract, CoframeMap, Form, ParamMatrix, Valence, VectorValuedForm};
use crate::linalg::{vec_is_zero, Matrix};
use crate::scalar::{Exponent, Gq};
use crate::structure::StructureEquations;

/// The operators attached to φ at a fixed truncation order.
#[derive(Clone, Debug)]
pub struct Transforms {
    pub order: u32,
    pub phi: BeltramiDifferential,
    /// ψ = (1−φ̄φ)^{-1}φ̄, acting on (0,1)-factors.
    pub psi: VectorValuedForm,
    /// Ω ↦ Ω̃ = (1−φ̄φ)⨼Ω.
    pub to_tilde: CoframeMap,
    /// Ω̃ ↦ Ω = (1−φ̄φ)^{-1}⨼Ω̃.
    pub from_tilde: CoframeMap,
}

impl Transforms {
    pub fn new(phi: &BeltramiDifferential, order: u32) -> Result<Self> {
        let phi = phi.truncated(order);
        let m = phi.matrix();
        let n = phi.n();
        let pp = m.conj().mul(&m).truncated(order);
        let inv = neumann_invert(&pp, order)?;
        let psi = VectorValuedForm::from_matrix(Valence::Anti, &inv.mul(&m.conj()).truncated(order));
        Ok(Transforms {
            order,
            to_tilde: CoframeMap::on_anti(&ParamMatrix::identity(n).sub(&pp)),
            from_tilde: CoframeMap::on_anti(&inv),
            phi,
            psi,
        })
    }

    pub fn tilde(&self, omega: &Form) -> Form {
        simultaneous_contract(&self.to_tilde, omega).truncated(self.order)
    }

    pub fn untilde(&self, omega_tilde: &Form) -> Form {
        simultaneous_contract(&self.from_tilde, omega_tilde).truncated(self.order)
    }

    /// A_k = ι_ψ^k/k! Ω̃ for k = 0..=min(q, n−p).
    pub fn ladder(&self, omega_tilde: &Form) -> Vec<Form> {
        let mut out = vec![omega_tilde.clone()];
        let mut k = 1;
        loop {
            let a = contract_pow(&self.psi, k, omega_tilde).truncated(self.order);
            if a.is_zero() {
                break;
            }
            out.push(a);
            k += 1;
        }
        out
    }

    fn iphi(&self, k: u32, a: &Form) -> Form {
        contract_pow(self.phi.as_vector_form(), k, a).truncated(self.order)
    }

    /// (S1, S2, T) = (Σ_{k≥1} ι_φ^{k−1}/(k−1)! A_k, Σ_{k≥0} ι_φ^{k+1}/(k+1)! A_k, Σ_{k≥1} ι_φ^k/k! A_k).
    pub fn k_sums(&self, ladder: &[Form]) -> (Form, Form, Form) {
        let mut s1 = Form::zero();
        let mut s2 = Form::zero();
        let mut t = Form::zero();
        for (k, a) in ladder.iter().enumerate() {
            let k = k as u32;
            if k >= 1 {
                s1 = s1.add(&self.iphi(k - 1, a));
                t = t.add(&self.iphi(k, a));
            }
            s2 = s2.add(&self.iphi(k + 1, a));
        }
        (s1, s2, t)
    }
}

pub fn a_ladder(phi: &BeltramiDifferential, omega_tilde: &Form, order: u32) -> Result<Vec<Form>> {
    Ok(Transforms::new(phi, order)?.ladder(omega_tilde))
}

/// d e^{ι_φ|ι_φ̄}Ω and its (p+1,q), (p,q+1) components (types of the undeformed structure),
/// the latter computed directly and from the k-sums.
#[derive(Clone, Debug)]
pub struct ObstructionResidual {
    pub full: Form,
    pub r_left: Form,
    pub r_right: Form,
    pub direct_left: Form,
    pub direct_right: Form,
}

impl ObstructionResidual {
    pub fn routes_agree(&self) -> bool {
        self.r_left == self.direct_left && self.r_right == self.direct_right
    }

    /// The full residual vanishes exactly when both components do.
    pub fn components_vanish(&self) -> bool {
        self.r_left.is_zero() && self.r_right.is_zero()
    }
}

fn residual_from_tilde(se: &StructureEquations, tr: &Transforms, omega_tilde: &Form) -> Result<ObstructionResidual> {
    let (p, q) = omega_tilde.bidegree().unwrap_or((0, 0));
    let order = tr.order;
    let omega = tr.untilde(omega_tilde);
    let full = se.d(&extension_map(&tr.phi, &omega)).truncated(order);
    let ladder = tr.ladder(omega_tilde);
    let (s1, s2, t) = tr.k_sums(&ladder);
    let a0t = omega_tilde.add(&t);
    let r_left = se.delbar(&s1).add(&se.del(&a0t)).truncated(order);
    let r_right = se.delbar(&a0t).add(&se.del(&s2)).truncated(order);
    Ok(ObstructionResidual {
        direct_left: full.bidegree_part(p + 1, q),
        direct_right: full.bidegree_part(p, q + 1),
        full,
        r_left,
        r_right,
    })
}

pub fn obstruction_residual(
    se: &StructureEquations,
    phi: &BeltramiDifferential,
    omega: &Form,
    order: u32,
) -> Result<ObstructionResidual> {
    if !omega.is_zero() && omega.bidegree().is_none() {
        return Err(NilError::InvalidInput("Ω must have pure bidegree".into()));
    }
    let tr = Transforms::new(phi, order)?;
    residual_from_tilde(se, &tr, &tr.tilde(omega))
}

/// The graded pieces ∂̄_φA_0 and ∂A_k + ∂̄_φA_{k+1}, ∂̄_φ = ∂̄ + [∂, ι_φ].
pub fn graded_pieces(table: &LieBracketTable, tr: &Transforms, ladder: &[Form]) -> Vec<Form> {
    let se = &table.se;
    let phi = tr.phi.as_vector_form();
    let dbar_phi = |a: &Form| se.delbar(a).add(&se.del(&contract(phi, a))).sub(&contract(phi, &se.del(a)));
    let mut out = vec![dbar_phi(&ladder[0]).truncated(tr.order)];
    for k in 0..ladder.len() {
        let mut f = se.del(&ladder[k]);
        if k + 1 < ladder.len() {
            f = f.add(&dbar_phi(&ladder[k + 1]));
        }
        out.push(f.truncated(tr.order));
    }
    out
}

/// Solver output.
#[derive(Clone, Debug)]
pub struct ExtensionState {
    pub p: usize,
    pub q: usize,
    pub order: u32,
    pub omega0: Form,
    /// Primary unknown Ω̃, with Ω̃(0) = Ω₀.
    pub omega_tilde: Form,
    /// Ω = (1−φ̄φ)^{-1}⨼Ω̃; e^{ι_φ|ι_φ̄}Ω is the extension.
    pub omega: Form,
    pub ladder: Vec<Form>,
    /// Squared norms of the degree-l parts of the two components, l = 0..=order.
    pub residual_by_order: Vec<[BigRational; 2]>,
    /// d e^{ι_φ|ι_φ̄}Ω vanishes through `order`.
    pub closed_through_order: bool,
    /// Every graded piece of the ladder system vanishes through `order`.
    pub graded_pieces_vanish: bool,
}

impl ExtensionState {
    /// The extension as a form in the undeformed coframe.
    pub fn extension(&self, phi: &BeltramiDifferential) -> Form {
        extension_map(&phi.truncated(self.order), &self.omega).truncated(self.order)
    }

    /// Coefficients at t of the extension in the deformed coframe γ(t), γ̄(t).
    pub fn at_point(&self, t: &[Gq]) -> Form {
        self.omega.evaluate(t)
    }

    /// ½(Ω + conj Ω), whose extension is real.
    pub fn symmetrized(&self) -> Form {
        self.omega.add(&self.omega.conj()).scale(&Gq::from_frac(1, 2))
    }
}

fn split(f: &Form) -> BTreeMap<Exponent, Form> {
    f.by_exponent()
}

/// Apply a numeric operator, exponent by exponent.
fn apply_matrix(nc: &NumericComplex, m: &Matrix, from: (usize, usize), f: &Form) -> Result<BTreeMap<Exponent, Vec<Gq>>> {
    let mut out = BTreeMap::new();
    for (e, part) in split(f) {
        let v = nc.vector_of(from.0, from.1, &part)?;
        let w = m.mul_vec(&v);
        out.insert(e, w);
    }
    Ok(out)
}

fn join(nc: &NumericComplex, bideg: (usize, usize), parts: &BTreeMap<Exponent, Vec<Gq>>, order: u32) -> Form {
    let forms: BTreeMap<Exponent, Form> =
        parts.iter().map(|(e, v)| (*e, nc.form_of(bideg.0, bideg.1, v))).collect();
    Form::from_exponent_parts(&forms, order)
}

/// Solve for Ω̃ through `order` so that d e^{ι_φ|ι_φ̄}Ω vanishes through `order`.
pub fn solve_extension(
    se: &StructureEquations,
    phi: &BeltramiDifferential,
    omega0: &Form,
    order: u32,
) -> Result<ExtensionState> {
    let (p, q) = omega0
        .bidegree()
        .ok_or_else(|| NilError::InvalidInput("Ω₀ must be a nonzero form of pure bidegree".into()))?;
    if !omega0.is_constant() {
        return Err(NilError::InvalidInput("Ω₀ must have constant coefficients".into()));
    }
    let table = lie_brackets(se)?;
    let se0 = se.at_zero();
    if !se0.d(omega0).is_zero() {
        return Err(NilError::PreconditionFailed("Ω₀ is not d-closed".into()));
    }
    let residual = table.integrability_residual(&phi.truncated(order));
    if !residual.components.iter().all(|c| vanishes_through(c, order)) {
        return Err(NilError::NotIntegrable);
    }
    if !phi.vanishes_at_zero() {
        return Err(NilError::NotPerturbative);
    }
    let nc = build_complex(&se0)?.numeric();
    let n = nc.n;
    for (a, b) in [(p, q + 1), (q, p + 1)] {
        if a <= n && b <= n && !crate::lemmata::mild(&nc, a, b).holds {
            return Err(NilError::PreconditionFailed(format!("the ({a},{b})-th mild ∂∂̄-lemma fails")));
        }
    }
    let hc = HodgeContext::new(nc);
    let nc = &hc.nc;
    let tr = Transforms::new(phi, order)?;
    let mut omega_tilde = omega0.truncated(order);
    for l in 1..=order {
        let ladder = tr.ladder(&omega_tilde);
        let (s1, s2, t) = tr.k_sums(&ladder);
        let (s1, s2, t) = (s1.homogeneous_part(l), s2.homogeneous_part(l), t.homogeneous_part(l));
        let mut correction = t.neg();
        if !s1.is_zero() {
            let zeta = s1.neg();
            let (a, b) = (p + 1, q - 1);
            let dd = apply_matrix(nc, &nc.ddbar(a, b), (a, b), &zeta)?;
            if dd.values().any(|v| !vec_is_zero(v)) {
                return Err(NilError::ObstructionNonvanishing { order: l, component: "∂∂̄ of the (p+1,q-1) k-sum".into() });
            }
            let db = apply_matrix(nc, &nc.delbar(a, b), (a, b), &zeta)?;
            let target = nc.ddbar_into(a, b + 1);
            if db.values().any(|v| !target.in_column_space(v)) {
                return Err(NilError::ObstructionNonvanishing { order: l, component: "left".into() });
            }
            let x = apply_matrix(nc, &hc.conjugate_left(p, q), (a, b), &zeta)?;
            correction = correction.add(&join(nc, (p, q), &x, order));
        }
        if !s2.is_zero() {
            let xi_bar = s2.neg();
            let (a, b) = (p - 1, q + 1);
            let dd = apply_matrix(nc, &nc.ddbar(a, b), (a, b), &xi_bar)?;
            if dd.values().any(|v| !vec_is_zero(v)) {
                return Err(NilError::ObstructionNonvanishing { order: l, component: "∂∂̄ of the (p-1,q+1) k-sum".into() });
            }
            let d = apply_matrix(nc, &nc.del(a, b), (a, b), &xi_bar)?;
            let target = nc.ddbar_into(a + 1, b);
            if d.values().any(|v| !target.in_column_space(v)) {
                return Err(NilError::ObstructionNonvanishing { order: l, component: "right".into() });
            }
            let x = apply_matrix(nc, &hc.conjugate_right(p, q), (a, b), &xi_bar)?;
            correction = correction.sub(&join(nc, (p, q), &x, order));
        }
        omega_tilde = omega_tilde.add(&correction).truncated(order);
    }
    let res = residual_from_tilde(se, &tr, &omega_tilde)?;
    let ladder = tr.ladder(&omega_tilde);
    let residual_by_order = (0..=order)
        .map(|l| [res.r_left.homogeneous_part(l).norm_sqr(), res.r_right.homogeneous_part(l).norm_sqr()])
        .collect();
    let graded_pieces_vanish = graded_pieces(&table, &tr, &ladder).iter().all(|f| vanishes_through(f, order));
    Ok(ExtensionState {
        p,
        q,
        order,
        omega0: omega0.clone(),
        omega: tr.untilde(&omega_tilde),
        omega_tilde,
        ladder,
        residual_by_order,
        closed_through_order: vanishes_through(&res.full, order) && res.routes_agree(),
        graded_pieces_vanish,
    })
}

/// Whether a d-closed (p,q)-form of the deformed complex is not ∂_t∂̄_t-exact.
pub fn bc_nontriviality(nc_t: &NumericComplex, ext: &Form) -> Result<bool> {
    let Some((p, q)) = ext.bidegree() else { return Ok(false) };
    let v = nc_t.vector_of(p, q, ext)?;
    if !vec_is_zero(&nc_t.del(p, q).mul_vec(&v)) || !vec_is_zero(&nc_t.delbar(p, q).mul_vec(&v)) {
        return Err(NilError::InvalidInput("the form is not d-closed in the deformed complex".into()));
    }
    Ok(!nc_t.ddbar_into(p, q).in_column_space(&v))
}

/// Orthogonal projection onto the d-closed (p,q)-forms of a numeric complex.
pub fn project_to_closed(nc: &NumericComplex, p: usize, q: usize, v: &[Gq]) -> Vec<Gq> {
    let k = nc.del(p, q).vstack(&nc.delbar(p, q)).nullspace();
    if k.is_empty() {
        return vec![Gq::zero(); v.len()];
    }
    Matrix::from_columns(v.len(), &k).projector_onto_columns().mul_vec(v)
}

/// Number of Bott-Chern classes spanned by the given closed (p,q)-vectors.
pub fn bc_class_count(nc: &NumericComplex, p: usize, q: usize, closed: &[Vec<Gq>]) -> usize {
    let img = nc.ddbar_into(p, q).columns();
    let base = crate::linalg::span_rank(nc.dim(p, q), &img);
    let mut all = img;
    all.extend(closed.iter().cloned());
    crate::linalg::span_rank(nc.dim(p, q), &all) - base
}

/// p-Kähler extension: solved state, its real symmetrization and transversality at sample points.
#[derive(Clone, Debug)]
pub struct PkahlerExtension {
    pub state: ExtensionState,
    /// ½(Ω + conj Ω): the extension of this is real.
    pub real_omega: Form,
    pub real_closed_through_order: bool,
    pub verdicts: Vec<crate::positivity::PositivityVerdict>,
}

pub fn pkahler_extend(
    se: &StructureEquations,
    phi: &BeltramiDifferential,
    omega0: &Form,
    order: u32,
    t_points: &[Vec<Gq>],
    samples: usize,
    seed: u64,
) -> Result<PkahlerExtension> {
    let n = se.n;
    let (p, q) = omega0.bidegree().ok_or_else(|| NilError::InvalidInput("ω₀ must be a (p,p)-form".into()))?;
    if p != q {
        return Err(NilError::InvalidInput("ω₀ must be a (p,p)-form".into()));
    }
    if p >= n {
        return Err(NilError::PreconditionFailed(format!("p = {p} must be at most n−1 = {}", n - 1)));
    }
    if omega0.conj() != *omega0 {
        return Err(NilError::PreconditionFailed("ω₀ is not real".into()));
    }
    let v0 = crate::positivity::is_transverse(omega0, n, samples, seed);
    if !v0.is_transverse() {
        return Err(NilError::PreconditionFailed("ω₀ is not transverse".into()));
    }
    let state = solve_extension(se, phi, omega0, order)?;
    let real_omega = state.symmetrized();
    let ext = extension_map(&phi.truncated(order), &real_omega);
    let real_closed_through_order = vanishes_through(&se.d(&ext), order) && ext.conj() == ext;
    let verdicts = t_points
        .iter()
        .map(|t| crate::positivity::is_transverse(&real_omega.evaluate(t), n, samples, seed))
        .collect();
    Ok(PkahlerExtension { state, real_omega, real_closed_through_order, verdicts })
}

/// Squared norm of a residual as a plain number, for reports.
pub fn norm_is_zero(r: &[BigRational; 2]) -> bool {
    r[0].is_zero() && r[1].is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ParamScalar;

    fn bcvary() -> StructureEquations {
        StructureEquations::new(
            "bcvary",
            5,
            0,
            vec![Form::zero(), Form::zero(), Form::zero(), Form::basis(&[1], &[3]), Form::basis(&[3], &[4])],
        )
        .unwrap()
    }

    fn bcvary_phi() -> BeltramiDifferential {
        let t = |k| ParamScalar::t(k);
        let mut m = ParamMatrix::zero(5, 5);
        m.set(1, 3, t(1));
        m.set(1, 4, t(2));
        m.set(4, 3, t(3));
        m.set(4, 4, t(4));
        BeltramiDifferential::from_matrix(&m)
    }

    #[test]
    fn double_exponential_matches_extension_map() {
        let tr = Transforms::new(&bcvary_phi(), 4).unwrap();
        let omega = Form::basis(&[1, 2, 4, 5], &[1, 2, 4, 5]).add(&Form::basis(&[1, 3], &[2, 4]));
        let tilde = tr.tilde(&omega);
        let lhs: Form = tr.ladder(&tilde).iter().fold(Form::zero(), |acc, a| {
            acc.add(&crate::form::exp_contract(tr.phi.as_vector_form(), a))
        });
        let rhs = extension_map(&tr.phi, &omega);
        assert_eq!(lhs.truncated(4), rhs.truncated(4));
        assert_eq!(tr.untilde(&tilde).truncated(4), omega.truncated(4));
    }

    #[test]
    fn zero_phi_keeps_omega() {
        let se = bcvary();
        let om = Form::basis(&[1, 2, 3, 4], &[1, 2, 3, 4]);
        let st = solve_extension(&se, &BeltramiDifferential::zero(5), &om, 3).unwrap();
        assert_eq!(st.omega_tilde, om.truncated(3));
        assert!(st.closed_through_order);
    }

    #[test]
    fn bcvary_balanced_metric_extends() {
        let se = bcvary();
        let idx = [[1, 2, 3, 4], [1, 2, 3, 5], [1, 2, 4, 5], [1, 3, 4, 5], [2, 3, 4, 5]];
        let om = idx.iter().fold(Form::zero(), |acc, i| acc.add(&Form::basis(i, i)));
        let st = solve_extension(&se, &bcvary_phi(), &om, 3).unwrap();
        assert!(st.closed_through_order);
        assert!(st.graded_pieces_vanish);
        assert!(st.residual_by_order.iter().all(norm_is_zero));
    }
}
