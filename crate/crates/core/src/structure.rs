//! Structure equations: dγ^i for a (1,0)-coframe of a Lie algebra with complex structure.

use crate::error::{NilError, Result};
use crate::form::{Coframe, Form};
use crate::scalar::Gq;

/// d of the (1,0)-coframe. Coefficients may depend on deformation parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureEquations {
    pub name: String,
    pub n: usize,
    pub m: usize,
    d: Vec<Form>,
    del_parts: Vec<(Coframe, Form)>,
    delbar_parts: Vec<(Coframe, Form)>,
}

impl StructureEquations {
    /// `d[i-1]` is dγ^i. Each must be a 2-form without (0,2)-part.
    pub fn new(name: impl Into<String>, n: usize, m: usize, d: Vec<Form>) -> Result<Self> {
        if d.len() != n {
            return Err(NilError::InvalidInput(format!("expected {n} structure equations, got {}", d.len())));
        }
        if n == 0 || n > crate::form::MAX_DIM {
            return Err(NilError::InvalidInput(format!("dimension {n} out of range")));
        }
        for (i, f) in d.iter().enumerate() {
            for (mono, _) in f.terms() {
                if mono.degree() != 2 {
                    return Err(NilError::InvalidInput(format!("dγ^{} has a term of degree {}", i + 1, mono.degree())));
                }
                if mono.hol_bits() >= (1 << n) || mono.anti_bits() >= (1 << n) {
                    return Err(NilError::InvalidInput(format!("dγ^{} uses an index above {n}", i + 1)));
                }
            }
            if !f.bidegree_part(0, 2).is_zero() {
                return Err(NilError::IntegrabilityError(i + 1));
            }
        }
        let mut del_parts = Vec::new();
        let mut delbar_parts = Vec::new();
        for i in 1..=n {
            let dg = &d[i - 1];
            let dgb = dg.conj();
            let h = Coframe::Hol(i);
            let a = Coframe::Anti(i);
            push_nonzero(&mut del_parts, h, dg.bidegree_part(2, 0));
            push_nonzero(&mut delbar_parts, h, dg.bidegree_part(1, 1));
            push_nonzero(&mut del_parts, a, dgb.bidegree_part(1, 1));
            push_nonzero(&mut delbar_parts, a, dgb.bidegree_part(0, 2));
        }
        Ok(StructureEquations { name: name.into(), n, m, d, del_parts, delbar_parts })
    }

    pub fn abelian(name: impl Into<String>, n: usize) -> Self {
        Self::new(name, n, 0, vec![Form::zero(); n]).expect("abelian structure is valid")
    }

    /// dγ^i, 1-based.
    pub fn d_coframe(&self, i: usize) -> &Form {
        &self.d[i - 1]
    }

    pub fn d_coframes(&self) -> &[Form] {
        &self.d
    }

    pub fn d_of(&self, f: Coframe) -> Form {
        match f {
            Coframe::Hol(i) => self.d[i - 1].clone(),
            Coframe::Anti(j) => self.d[j - 1].conj(),
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.d.iter().all(|f| f.is_zero())
    }

    pub fn is_constant(&self) -> bool {
        self.d.iter().all(|f| f.is_constant())
    }

    /// d = Σ_f df ∧ ι_f over the 2n coframe elements.
    pub fn d(&self, a: &Form) -> Form {
        self.del(a).add(&self.delbar(a))
    }

    pub fn del(&self, a: &Form) -> Form {
        apply_parts(&self.del_parts, a)
    }

    pub fn delbar(&self, a: &Form) -> Form {
        apply_parts(&self.delbar_parts, a)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Form) -> Form) -> Result<Self> {
        Self::new(self.name.clone(), self.n, self.m, self.d.iter().map(f).collect())
    }

    /// Specialize parameter-dependent coefficients at a point.
    pub fn evaluate(&self, t: &[Gq]) -> Self {
        self.map_coeffs(|f| f.evaluate(t)).expect("evaluation preserves bidegrees")
    }

    pub fn at_zero(&self) -> Self {
        self.map_coeffs(|f| f.at_zero()).expect("restriction preserves bidegrees")
    }

    pub fn truncated(&self, order: u32) -> Self {
        self.map_coeffs(|f| f.truncated(order)).expect("truncation preserves bidegrees")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

fn push_nonzero(v: &mut Vec<(Coframe, Form)>, f: Coframe, form: Form) {
    if !form.is_zero() {
        v.push((f, form));
    }
}

fn apply_parts(parts: &[(Coframe, Form)], a: &Form) -> Form {
    let mut r = Form::zero();
    for (f, df) in parts {
        let inner = a.interior(*f);
        if !inner.is_zero() {
            r = r.add(&df.wedge(&inner));
        }
    }
    r
}
