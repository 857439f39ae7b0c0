//! Beltrami differentials on invariant complex structures: brackets, integrability,
//! deformed structure equations, the extension map and the Kuranishi recursion.

use std::collections::BTreeMap;

use crate::error::{NilError, Result};
use crate::form::{
    contract, exp_contract, neumann_invert, simultaneous_contract, Coframe, CoframeMap, Form, Monomial, ParamMatrix,
    Valence, VectorValuedForm,
};
use crate::linalg::Matrix;
use crate::scalar::{Exponent, Gq, ParamScalar, EXACT};
use crate::structure::StructureEquations;

/// φ ∈ A^{0,1}(T^{1,0}) with invariant coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BeltramiDifferential {
    phi: VectorValuedForm,
}

impl BeltramiDifferential {
    pub fn new(phi: VectorValuedForm) -> Result<Self> {
        if phi.valence != Valence::Hol {
            return Err(NilError::InvalidInput("a Beltrami differential takes values in T^{1,0}".into()));
        }
        for (i, c) in phi.components.iter().enumerate() {
            if !c.is_zero() && !c.is_pure(0, 1) {
                return Err(NilError::InvalidInput(format!("component {} is not a (0,1)-form", i + 1)));
            }
        }
        Ok(BeltramiDifferential { phi })
    }

    pub fn zero(n: usize) -> Self {
        BeltramiDifferential { phi: VectorValuedForm::zero(Valence::Hol, n) }
    }

    /// φ with φ⌟γ^i = Σ_j m[i][j] γ̄^j.
    pub fn from_matrix(m: &ParamMatrix) -> Self {
        BeltramiDifferential { phi: VectorValuedForm::from_matrix(Valence::Hol, m) }
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn matrix(&self) -> ParamMatrix {
        self.phi.to_matrix()
    }

    pub fn as_vector_form(&self) -> &VectorValuedForm {
        &self.phi
    }

    pub fn conj(&self) -> VectorValuedForm {
        self.phi.conj()
    }

    pub fn is_zero(&self) -> bool {
        self.phi.is_zero()
    }

    pub fn vanishes_at_zero(&self) -> bool {
        self.phi.components.iter().all(|c| c.at_zero().is_zero())
    }

    pub fn evaluate(&self, t: &[Gq]) -> Self {
        BeltramiDifferential { phi: self.phi.evaluate(t) }
    }

    pub fn truncated(&self, order: u32) -> Self {
        BeltramiDifferential { phi: self.phi.truncated(order) }
    }

    /// Number of deformation parameters appearing in the coefficients.
    pub fn param_span(&self) -> usize {
        self.phi.components.iter().map(|c| c.param_span()).max().unwrap_or(0)
    }
}

/// Structure constants [e_a, e_b] = Σ_c C[a][b][c] e_c over the slot basis θ_1..θ_n, θ̄_1..θ̄_n.
#[derive(Clone, Debug)]
pub struct LieBracketTable {
    pub se: StructureEquations,
    pub n: usize,
    table: Vec<Vec<Vec<ParamScalar>>>,
}

pub fn lie_brackets(se: &StructureEquations) -> Result<LieBracketTable> {
    let n = se.n;
    let dim = 2 * n;
    let mut table = vec![vec![vec![ParamScalar::zero(); dim]; dim]; dim];
    for c in 0..dim {
        let dc = se.d_of(Coframe::from_slot(n, c));
        for (mono, coef) in dc.terms() {
            // dω(e_a, e_b) = −ω([e_a, e_b]) with a < b the slot order of the factors
            let f = mono.factors();
            let (a, b) = (f[0].slot(n), f[1].slot(n));
            table[a][b][c] = -coef;
            table[b][a][c] = coef.clone();
        }
    }
    let t = LieBracketTable { se: se.clone(), n, table };
    t.check_jacobi()?;
    Ok(t)
}

impl LieBracketTable {
    /// [e_a, e_b] in slot coordinates (0-based).
    pub fn bracket(&self, a: usize, b: usize) -> &[ParamScalar] {
        &self.table[a][b]
    }

    /// [θ_i, θ_j], 1-based, as coefficients of θ_1..θ_n (the bracket stays in T^{1,0}).
    pub fn hol_bracket(&self, i: usize, j: usize) -> Vec<ParamScalar> {
        self.table[i - 1][j - 1][..self.n].to_vec()
    }

    /// [θ̄_j, θ_k]^{1,0}, 1-based.
    pub fn mixed_bracket_10(&self, j: usize, k: usize) -> Vec<ParamScalar> {
        self.table[self.n + j - 1][k - 1][..self.n].to_vec()
    }

    fn bracket_vec(&self, x: &[ParamScalar], y: &[ParamScalar]) -> Vec<ParamScalar> {
        let dim = 2 * self.n;
        let mut out = vec![ParamScalar::zero(); dim];
        for a in 0..dim {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..dim {
                if y[b].is_zero() {
                    continue;
                }
                let s = &x[a] * &y[b];
                for c in 0..dim {
                    if !self.table[a][b][c].is_zero() {
                        out[c] = &out[c] + &(&s * &self.table[a][b][c]);
                    }
                }
            }
        }
        out
    }

    fn check_jacobi(&self) -> Result<()> {
        let dim = 2 * self.n;
        let unit = |a: usize| {
            let mut v = vec![ParamScalar::zero(); dim];
            v[a] = ParamScalar::one();
            v
        };
        for a in 0..dim {
            for b in a + 1..dim {
                for c in b + 1..dim {
                    let ab = self.bracket_vec(&self.table[a][b], &unit(c));
                    let bc = self.bracket_vec(&self.table[b][c], &unit(a));
                    let ca = self.bracket_vec(&self.table[c][a], &unit(b));
                    if (0..dim).any(|k| !(&(&ab[k] + &bc[k]) + &ca[k]).is_zero()) {
                        return Err(NilError::JacobiError(a + 1, b + 1, c + 1));
                    }
                }
            }
        }
        Ok(())
    }

    /// ∂̄ on T^{1,0}-valued forms: ∂̄(α⊗θ_k) = ∂̄α⊗θ_k + (−1)^{|α|} α∧Σ_j γ̄^j⊗[θ̄_j,θ_k]^{1,0}.
    pub fn delbar_on_vectors(&self, v: &VectorValuedForm) -> VectorValuedForm {
        assert_eq!(v.valence, Valence::Hol, "∂̄ acts on T^{{1,0}}-valued forms");
        let n = self.n;
        let mut out = VectorValuedForm::zero(Valence::Hol, n);
        for (k, alpha) in v.components.iter().enumerate() {
            if alpha.is_zero() {
                continue;
            }
            out.components[k] = out.components[k].add(&self.se.delbar(alpha));
            for deg in 0..=2 * n {
                let a = alpha.degree_part(deg);
                if a.is_zero() {
                    continue;
                }
                let sign = if deg % 2 == 0 { Gq::one() } else { Gq::from_int(-1) };
                for j in 1..=n {
                    let br = self.mixed_bracket_10(j, k + 1);
                    let base = a.wedge(&Form::gamma_bar(j)).scale(&sign);
                    for (l, c) in br.iter().enumerate() {
                        if !c.is_zero() {
                            out.components[l] = out.components[l].add(&base.scale_param(c));
                        }
                    }
                }
            }
        }
        out
    }

    /// L_X ψ = ι_X dψ + d ι_X ψ for X = θ_k.
    fn lie_derivative(&self, k: usize, psi: &Form) -> Form {
        let f = Coframe::Hol(k);
        self.se.d(psi).interior(f).add(&self.se.d(&psi.interior(f)))
    }

    /// Frölicher–Nijenhuis bracket of T^{1,0}-valued forms.
    /// On A^{0,1}(T^{1,0}) it is [φ,ψ] = φ^i∧∂_iψ^j + ψ^i∧∂_iφ^j.
    pub fn schouten(&self, phi: &VectorValuedForm, psi: &VectorValuedForm) -> VectorValuedForm {
        assert!(phi.valence == Valence::Hol && psi.valence == Valence::Hol);
        let n = self.n;
        let mut out = VectorValuedForm::zero(Valence::Hol, n);
        for deg in 0..=2 * n {
            let sign = if deg % 2 == 0 { Gq::one() } else { Gq::from_int(-1) };
            for (i, w) in phi.components.iter().enumerate() {
                let w = w.degree_part(deg);
                if w.is_zero() {
                    continue;
                }
                let dw = self.se.d(&w);
                for (j, p) in psi.components.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    let (x, y) = (i + 1, j + 1);
                    // ω∧ψ ⊗ [X,Y]
                    let wp = w.wedge(p);
                    for (l, c) in self.hol_bracket(x, y).iter().enumerate() {
                        if !c.is_zero() {
                            out.components[l] = out.components[l].add(&wp.scale_param(c));
                        }
                    }
                    // ω∧L_Xψ ⊗ Y + (−1)^k dω∧ι_Xψ ⊗ Y
                    let to_y = w
                        .wedge(&self.lie_derivative(x, p))
                        .add(&dw.wedge(&p.interior(Coframe::Hol(x))).scale(&sign));
                    out.components[j] = out.components[j].add(&to_y);
                    // −L_Yω∧ψ ⊗ X + (−1)^k ι_Yω∧dψ ⊗ X
                    let to_x = self
                        .lie_derivative(y, &w)
                        .wedge(p)
                        .neg()
                        .add(&w.interior(Coframe::Hol(y)).wedge(&self.se.d(p)).scale(&sign));
                    out.components[i] = out.components[i].add(&to_x);
                }
            }
        }
        out
    }

    /// ∂̄φ − ½[φ,φ].
    pub fn integrability_residual(&self, phi: &BeltramiDifferential) -> VectorValuedForm {
        let p = phi.as_vector_form();
        let half = Gq::from_frac(1, 2);
        self.delbar_on_vectors(p).sub(&self.schouten(p, p).scale(&half))
    }

    pub fn check_integrability(&self, phi: &BeltramiDifferential) -> (bool, VectorValuedForm) {
        let r = self.integrability_residual(phi);
        (r.is_zero(), r)
    }

    /// d(e^{ι_φ}α) − e^{ι_φ}(d + ∂ι_φ − ι_φ∂ − ι_{∂̄φ−½[φ,φ]})α.
    ///
    /// Zero for integrable φ. For general φ the obstruction term enters with a plus sign
    /// under the conventions here, since [∂̄, ι_φ] = ι_{∂̄φ}; see [`Self::extension_commutator_residual`].
    pub fn main1_residual(&self, phi: &BeltramiDifferential, alpha: &Form) -> Form {
        let se = &self.se;
        let p = phi.as_vector_form();
        let lhs = se.d(&exp_contract(p, alpha));
        let obstruction = self.integrability_residual(phi);
        let inner = se
            .d(alpha)
            .add(&se.del(&contract(p, alpha)))
            .sub(&contract(p, &se.del(alpha)))
            .sub(&contract(&obstruction, alpha));
        lhs.sub(&exp_contract(p, &inner))
    }
}

impl LieBracketTable {
    /// d(e^{ι_φ}α) − e^{ι_φ}(d + ∂ι_φ − ι_φ∂ + ι_{∂̄φ−½[φ,φ]})α, which vanishes for every φ.
    pub fn extension_commutator_residual(&self, phi: &BeltramiDifferential, alpha: &Form) -> Form {
        let se = &self.se;
        let p = phi.as_vector_form();
        let lhs = se.d(&exp_contract(p, alpha));
        let inner = se
            .d(alpha)
            .add(&se.del(&contract(p, alpha)))
            .sub(&contract(p, &se.del(alpha)))
            .add(&contract(&self.integrability_residual(phi), alpha));
        lhs.sub(&exp_contract(p, &inner))
    }
}

pub fn delbar_on_vectors(se: &StructureEquations, v: &VectorValuedForm) -> Result<VectorValuedForm> {
    Ok(lie_brackets(se)?.delbar_on_vectors(v))
}

pub fn schouten(se: &StructureEquations, phi: &VectorValuedForm, psi: &VectorValuedForm) -> Result<VectorValuedForm> {
    Ok(lie_brackets(se)?.schouten(phi, psi))
}

pub fn check_integrability(se: &StructureEquations, phi: &BeltramiDifferential) -> Result<(bool, VectorValuedForm)> {
    Ok(lie_brackets(se)?.check_integrability(phi))
}

pub fn main1_residual(se: &StructureEquations, phi: &BeltramiDifferential, alpha: &Form) -> Result<Form> {
    Ok(lie_brackets(se)?.main1_residual(phi, alpha))
}

/// Whether every coefficient vanishes through total degree `order`.
pub fn vanishes_through(f: &Form, order: u32) -> bool {
    f.truncated(order).is_zero()
}

fn vector_vanishes_through(v: &VectorValuedForm, order: u32) -> bool {
    v.components.iter().all(|c| vanishes_through(c, order))
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeformMode {
    /// Power series in t, t̄ truncated at the given total degree.
    Symbolic { order: u32 },
    /// Exact coefficients at a parameter value.
    Point(Vec<Gq>),
}

/// P = 1 + E with E = [[0, Φ], [Φ̄, 0]]: the coframe change γ(t) = P γ.
pub fn coframe_change(phi: &BeltramiDifferential) -> CoframeMap {
    CoframeMap::extension(&phi.matrix())
}

/// Structure equations of the deformed coframe γ^i(t) = (1+φ)⌟γ^i.
pub fn deform_complex(se: &StructureEquations, phi: &BeltramiDifferential, mode: &DeformMode) -> Result<StructureEquations> {
    let table = lie_brackets(se)?;
    let n = se.n;
    let (phi, order) = match mode {
        DeformMode::Symbolic { order } => (phi.truncated(*order), *order),
        DeformMode::Point(t) => (phi.evaluate(t), EXACT),
    };
    let residual = table.integrability_residual(&phi);
    if !vector_vanishes_through(&residual, order) {
        return Err(NilError::NotIntegrable);
    }
    let p = coframe_change(&phi);
    let inverse = match mode {
        DeformMode::Symbolic { order } => {
            let e = p.matrix.sub(&ParamMatrix::identity(2 * n));
            neumann_invert(&e.neg(), *order)?
        }
        DeformMode::Point(_) => {
            let inv = p.matrix.at_zero().inverse().ok_or(NilError::NonInvertibleCoframe)?;
            ParamMatrix::from_constant(&inv)
        }
    };
    let back = CoframeMap::new(n, inverse);
    let m = phi.matrix();
    let mut d_new = Vec::with_capacity(n);
    for i in 1..=n {
        let mut f = se.d_coframe(i).clone();
        for j in 1..=n {
            let c = m.get(i - 1, j - 1);
            if !c.is_zero() {
                f = f.add(&se.d_of(Coframe::Anti(j)).scale_param(c));
            }
        }
        let g = simultaneous_contract(&back, &f);
        let g = if order == EXACT { g } else { g.truncated(order) };
        d_new.push(g);
    }
    let m_params = match mode {
        DeformMode::Symbolic { .. } => se.m.max(phi.param_span()),
        DeformMode::Point(_) => 0,
    };
    StructureEquations::new(format!("{}_t", se.name), n, m_params, d_new).map_err(|e| match e {
        NilError::IntegrabilityError(_) => NilError::NotIntegrable,
        other => other,
    })
}

/// e^{ι_φ|ι_φ̄}: e^{ι_φ} on (1,0)-factors and e^{ι_φ̄} on (0,1)-factors.
pub fn extension_map(phi: &BeltramiDifferential, omega: &Form) -> Form {
    simultaneous_contract(&coframe_change(phi), omega)
}

/// Rewrite a form given in the old coframe in terms of the deformed coframe
/// (the result is written with old-coframe symbols standing for γ(t), γ̄(t)).
pub fn to_deformed_coframe(phi: &BeltramiDifferential, a: &Form, order: u32) -> Result<Form> {
    let n = phi.n();
    let p = coframe_change(phi);
    let inv = if order == EXACT {
        let inv = p.matrix.at_zero().inverse().ok_or(NilError::NonInvertibleCoframe)?;
        if !phi.matrix().sub(&ParamMatrix::from_constant(&phi.matrix().at_zero())).is_zero() {
            return Err(NilError::InvalidInput("exact inversion needs constant coefficients".into()));
        }
        ParamMatrix::from_constant(&inv)
    } else {
        neumann_invert(&p.matrix.sub(&ParamMatrix::identity(2 * n)).neg(), order)?
    };
    Ok(simultaneous_contract(&CoframeMap::new(n, inv), a))
}

/// The matrix of φ̄φ acting on (0,1)-forms: γ̄^k ↦ Σ_l (Φ̄Φ)_{kl} γ̄^l.
pub fn phibar_phi(phi: &BeltramiDifferential) -> ParamMatrix {
    let m = phi.matrix();
    m.conj().mul(&m)
}

/// Left side minus right side of ∂̄_t(e α) = e((1−φ̄φ)^{-1}⨼([∂,ι_φ]+∂̄)(1−φ̄φ)⨼α),
/// both written in the deformed coframe, through `order`.
pub fn transport_residual(table: &LieBracketTable, phi: &BeltramiDifferential, alpha: &Form, order: u32) -> Result<Form> {
    let (p, q) = alpha
        .bidegree()
        .ok_or_else(|| NilError::InvalidInput("α must have pure bidegree".into()))?;
    let se = &table.se;
    let phi = phi.truncated(order);
    let d_ext = se.d(&extension_map(&phi, alpha));
    let lhs = to_deformed_coframe(&phi, &d_ext, order)?.bidegree_part(p, q + 1);
    let n = phi.n();
    let pp = phibar_phi(&phi).truncated(order);
    let one_minus = CoframeMap::on_anti(&ParamMatrix::identity(n).sub(&pp));
    let inv = CoframeMap::on_anti(&neumann_invert(&pp, order)?);
    let pv = phi.as_vector_form();
    let x = simultaneous_contract(&one_minus, alpha);
    let y = se.del(&contract(pv, &x)).sub(&contract(pv, &se.del(&x))).add(&se.delbar(&x));
    let rhs = simultaneous_contract(&inv, &y);
    Ok(lhs.sub(&rhs).truncated(order))
}

/// Coordinates for the invariant complex Λ^{0,q} ⊗ T^{1,0}.
struct VectorComplex {
    n: usize,
    bases: Vec<Vec<Monomial>>,
}

impl VectorComplex {
    fn new(n: usize) -> Self {
        VectorComplex { n, bases: (0..=n).map(|q| Monomial::basis(n, 0, q)).collect() }
    }

    fn dim(&self, q: usize) -> usize {
        if q > self.n {
            0
        } else {
            self.n * self.bases[q].len()
        }
    }

    fn to_vec(&self, q: usize, v: &VectorValuedForm) -> Vec<Gq> {
        let b = &self.bases[q];
        let mut out = vec![Gq::zero(); self.dim(q)];
        for (k, c) in v.components.iter().enumerate() {
            for (m, s) in c.terms() {
                let idx = b.iter().position(|x| x == m).expect("component of the expected bidegree");
                out[k * b.len() + idx] = s.constant_term();
            }
        }
        out
    }

    fn vector_form(&self, q: usize, x: &[Gq]) -> VectorValuedForm {
        let b = &self.bases[q];
        let comps = (0..self.n).map(|k| Form::from_vector(b, &x[k * b.len()..(k + 1) * b.len()])).collect();
        VectorValuedForm { valence: Valence::Hol, components: comps }
    }

    fn delbar_matrix(&self, table: &LieBracketTable, q: usize) -> Matrix {
        let rows = self.dim(q + 1);
        let cols: Vec<Vec<Gq>> = (0..self.dim(q))
            .map(|c| {
                let mut e = vec![Gq::zero(); self.dim(q)];
                e[c] = Gq::one();
                let img = table.delbar_on_vectors(&self.vector_form(q, &e));
                if q + 1 > self.n {
                    Vec::new()
                } else {
                    self.to_vec(q + 1, &img)
                }
            })
            .collect();
        if rows == 0 {
            return Matrix::zero(0, self.dim(q));
        }
        Matrix::from_columns(rows, &cols)
    }
}

/// Result of the Kuranishi recursion.
#[derive(Clone, Debug)]
pub struct KuranishiExpansion {
    pub harmonic_basis: Vec<VectorValuedForm>,
    /// φ(t) through the requested order, one parameter per direction.
    pub phi: BeltramiDifferential,
    /// H[φ,φ]_k for k = 2..=order.
    pub obstructions: Vec<VectorValuedForm>,
    /// (∂̄φ − ½[φ,φ])_k + ½H[φ,φ]_k for k = 1..=order; zero when the recursion is consistent.
    pub defects: Vec<VectorValuedForm>,
}

/// Invariant harmonic space ℍ^{0,1}(T^{1,0}) with the frame {γ̄^j⊗θ_i} orthonormal.
pub fn harmonic_beltrami_basis(table: &LieBracketTable) -> Vec<VectorValuedForm> {
    let vc = VectorComplex::new(table.n);
    let d0 = vc.delbar_matrix(table, 0);
    let d1 = vc.delbar_matrix(table, 1);
    let lap = d0.mul(&d0.adjoint()).add(&d1.adjoint().mul(&d1));
    lap.nullspace().iter().map(|v| vc.vector_form(1, v)).collect()
}

fn split_by_exponent(v: &VectorValuedForm) -> BTreeMap<Exponent, VectorValuedForm> {
    let n = v.n();
    let mut out: BTreeMap<Exponent, VectorValuedForm> = BTreeMap::new();
    for (k, c) in v.components.iter().enumerate() {
        for (e, f) in c.by_exponent() {
            out.entry(e).or_insert_with(|| VectorValuedForm::zero(Valence::Hol, n)).components[k] = f;
        }
    }
    out
}

fn join_exponents(parts: &BTreeMap<Exponent, VectorValuedForm>, n: usize, order: u32) -> VectorValuedForm {
    let mut comps = Vec::with_capacity(n);
    for k in 0..n {
        let m: BTreeMap<Exponent, Form> = parts.iter().map(|(e, v)| (*e, v.components[k].clone())).collect();
        comps.push(Form::from_exponent_parts(&m, order));
    }
    VectorValuedForm { valence: Valence::Hol, components: comps }
}

/// φ_1 = Σ t_ν η_ν, φ_k = ½∂̄*G[φ,φ]_k, with obstruction data H[φ,φ]_k.
pub fn kuranishi_expand(
    table: &LieBracketTable,
    directions: Option<Vec<VectorValuedForm>>,
    order: u32,
) -> Result<KuranishiExpansion> {
    let n = table.n;
    let harmonic = harmonic_beltrami_basis(table);
    let dirs = directions.unwrap_or_else(|| harmonic.clone());
    if dirs.len() > crate::scalar::MAX_PARAMS {
        return Err(NilError::InvalidInput(format!("{} directions exceed the parameter limit", dirs.len())));
    }
    let vc = VectorComplex::new(n);
    let d1 = vc.delbar_matrix(table, 1);
    let d2 = vc.delbar_matrix(table, 2);
    let lap2 = d1.mul(&d1.adjoint()).add(&d2.adjoint().mul(&d2));
    let ker = lap2.nullspace();
    let h2 = if ker.is_empty() {
        Matrix::zero(lap2.rows(), lap2.rows())
    } else {
        Matrix::from_columns(lap2.rows(), &ker).projector_onto_columns()
    };
    let g2 = lap2.add(&h2).inverse().expect("□ + H is invertible").sub(&h2);
    let half = Gq::from_frac(1, 2);
    let step = d1.adjoint().mul(&g2).scale(&half);

    let mut phi = VectorValuedForm::zero(Valence::Hol, n);
    for (nu, eta) in dirs.iter().enumerate() {
        let t = ParamScalar::t(nu + 1).truncated(order);
        phi = phi.add(&eta.map(|f| f.scale_param(&t)));
    }
    let mut obstructions = Vec::new();
    for k in 2..=order {
        let br = table.schouten(&phi, &phi).homogeneous_part(k);
        let mut next = BTreeMap::new();
        let mut obs = BTreeMap::new();
        for (e, part) in split_by_exponent(&br) {
            let v = vc.to_vec(2, &part);
            next.insert(e, vc.vector_form(1, &step.mul_vec(&v)));
            obs.insert(e, vc.vector_form(2, &h2.mul_vec(&v)));
        }
        phi = phi.add(&join_exponents(&next, n, order));
        obstructions.push(join_exponents(&obs, n, order));
    }
    let phi = BeltramiDifferential::new(phi)?;
    let residual = table.integrability_residual(&phi);
    let mut defects = Vec::new();
    for k in 1..=order {
        let mut d = residual.homogeneous_part(k);
        if k >= 2 {
            d = d.add(&obstructions[(k - 2) as usize].scale(&half));
        }
        defects.push(d);
    }
    Ok(KuranishiExpansion { harmonic_basis: harmonic, phi, obstructions, defects })
}
