//! Positivity of (q,q)-forms and transversality of (p,p)-forms.
//!
//! A (q,q)-form is written Θ = σ_q Σ Θ_{IJ} β_I∧β̄_J over β_I = γ^I, and volumes are
//! measured against σ_n γ^{1..n}∧γ̄^{1..n}.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::NumericComplex;
use crate::form::{subsets, Form, Monomial};
use crate::linalg::Matrix;
use crate::scalar::Gq;

/// σ_q = 2^{-q} i^{q²}.
pub fn sigma_q(q: usize) -> Gq {
    let two = Gq::from_int(2);
    let inv = two.pow(q as u32).inv().expect("nonzero");
    &inv * &Gq::i().pow((q * q) as u32)
}

fn subset_monomials(n: usize, q: usize, hol: bool) -> Vec<Monomial> {
    subsets(n, q)
        .into_iter()
        .map(|b| if hol { Monomial::from_bits(b, 0) } else { Monomial::from_bits(0, b) })
        .collect()
}

/// Θ_{IJ} = coeff(γ^I∧γ̄^J)/σ_q.
pub fn hermitian_matrix_of(theta: &Form, n: usize, q: usize) -> Matrix {
    let hol = subset_monomials(n, q, true);
    let inv = sigma_q(q).inv().expect("nonzero");
    let rows = hol
        .iter()
        .map(|i| {
            hol.iter()
                .map(|j| {
                    let m = Monomial::from_bits(i.hol_bits(), j.hol_bits());
                    &theta.coeff(m).constant_term() * &inv
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows)
}

/// Inverse of [`hermitian_matrix_of`].
pub fn form_of_matrix(m: &Matrix, n: usize, q: usize) -> Form {
    let hol = subset_monomials(n, q, true);
    let s = sigma_q(q);
    let mut f = Form::zero();
    for (a, i) in hol.iter().enumerate() {
        for (b, j) in hol.iter().enumerate() {
            let c = m.get(a, b);
            if !c.is_zero() {
                f = f.add(&Form::constant_monomial(Monomial::from_bits(i.hol_bits(), j.hol_bits()), c * &s));
            }
        }
    }
    f
}

/// Coefficient of a top-degree form relative to σ_n γ^{1..n}∧γ̄^{1..n}.
pub fn volume_coefficient(top: &Form, n: usize) -> Gq {
    &top.coeff(Monomial::top(n)).constant_term() * &sigma_q(n).inv().expect("nonzero")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityKind {
    StrictlyPositive,
    Transverse,
    WeaklyPositive,
    NotPositive,
    NotTransverse,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// LDL* pivots, all positive.
    Pivots(Vec<BigRational>),
    /// The elimination hit a non-positive pivot at this index.
    FailingPivot { index: usize, value: BigRational },
    NotHermitian { row: usize, col: usize },
    /// A decomposable (q,0)-form τ with non-positive volume coefficient of Γ∧σ_q τ∧τ̄.
    Falsifier { tau: Form, volume: Gq },
    /// Smallest normalized volume seen over the samples.
    Sampled { min_margin: BigRational },
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityVerdict {
    pub kind: PositivityKind,
    pub exact: bool,
    pub certificate: Certificate,
    pub samples_used: usize,
}

impl PositivityVerdict {
    pub fn is_transverse(&self) -> bool {
        matches!(self.kind, PositivityKind::Transverse | PositivityKind::StrictlyPositive)
    }
}

fn first_non_hermitian(m: &Matrix) -> Option<(usize, usize)> {
    for i in 0..m.rows() {
        for j in i..m.cols() {
            if *m.get(i, j) != m.get(j, i).conj() {
                return Some((i, j));
            }
        }
    }
    None
}

/// Exact positive-definiteness of the coefficient matrix of a (q,q)-form.
pub fn is_strictly_positive(theta: &Form, n: usize) -> PositivityVerdict {
    let q = match theta.bidegree() {
        Some((p, q)) if p == q => q,
        _ => {
            return PositivityVerdict {
                kind: PositivityKind::NotPositive,
                exact: true,
                certificate: Certificate::None,
                samples_used: 0,
            }
        }
    };
    let m = hermitian_matrix_of(theta, n, q);
    if let Some((row, col)) = first_non_hermitian(&m) {
        return PositivityVerdict {
            kind: PositivityKind::NotPositive,
            exact: true,
            certificate: Certificate::NotHermitian { row, col },
            samples_used: 0,
        };
    }
    let (_, d) = m.ldl_positive_prefix();
    let bad = d.iter().position(|x| !x.is_positive());
    match bad {
        None => PositivityVerdict {
            kind: PositivityKind::StrictlyPositive,
            exact: true,
            certificate: Certificate::Pivots(d),
            samples_used: 0,
        },
        Some(index) => PositivityVerdict {
            kind: PositivityKind::NotPositive,
            exact: true,
            certificate: Certificate::FailingPivot { index, value: d[index].clone() },
            samples_used: 0,
        },
    }
}

/// The Hermitian form τ ↦ vol(Γ∧σ_q τ∧τ̄) on (q,0)-forms, in the β_I basis:
/// vol(Γ∧σ_q τ∧τ̄) = Σ v_I conj(v_J) M_IJ for τ = Σ v_I β_I.
pub fn transversality_matrix(gamma: &Form, n: usize, q: usize) -> Matrix {
    let s = sigma_q(q);
    let hol = subset_monomials(n, q, true);
    let anti = subset_monomials(n, q, false);
    let rows = hol
        .iter()
        .map(|i| {
            anti.iter()
                .map(|j| {
                    let bij = Form::constant_monomial(Monomial::from_bits(i.hol_bits(), j.anti_bits()), s.clone());
                    volume_coefficient(&gamma.wedge(&bij), n)
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(rows)
}

/// vol(Γ∧σ_q τ∧τ̄), computed by direct wedge products.
pub fn pairing_volume(gamma: &Form, tau: &Form, n: usize) -> Gq {
    let q = tau.bidegree().map(|b| b.0).unwrap_or(0);
    let f = gamma.wedge(&tau.wedge(&tau.conj()).scale(&sigma_q(q)));
    volume_coefficient(&f, n)
}

fn tau_from_coords(n: usize, q: usize, v: &[Gq]) -> Form {
    Form::from_vector(&subset_monomials(n, q, true), v)
}

/// Transversality of a real (p,p)-form. Exact when every (q,0)-form is decomposable
/// (q ∈ {0, 1, n−1, n}, q = n−p); sampled otherwise.
pub fn is_transverse(gamma: &Form, n: usize, samples: usize, seed: u64) -> PositivityVerdict {
    let p = match gamma.bidegree() {
        Some((a, b)) if a == b => a,
        _ => {
            return PositivityVerdict {
                kind: PositivityKind::NotTransverse,
                exact: true,
                certificate: Certificate::None,
                samples_used: 0,
            }
        }
    };
    let q = n - p;
    if q <= 1 || q + 1 >= n {
        exact_transverse(gamma, n, q)
    } else {
        sampled_transverse(gamma, n, q, samples, seed)
    }
}

fn exact_transverse(gamma: &Form, n: usize, q: usize) -> PositivityVerdict {
    let m = transversality_matrix(gamma, n, q);
    if let Some((row, col)) = first_non_hermitian(&m) {
        return PositivityVerdict {
            kind: PositivityKind::NotTransverse,
            exact: true,
            certificate: Certificate::NotHermitian { row, col },
            samples_used: 0,
        };
    }
    let (l, d) = m.ldl_positive_prefix();
    match d.iter().position(|x| !x.is_positive()) {
        None => PositivityVerdict {
            kind: PositivityKind::Transverse,
            exact: true,
            certificate: Certificate::Pivots(d),
            samples_used: 0,
        },
        Some(k) => {
            let x = Matrix::solve_unit_lower_adjoint(&l, k);
            let v: Vec<Gq> = x.iter().map(|c| c.conj()).collect();
            let tau = tau_from_coords(n, q, &v);
            let volume = pairing_volume(gamma, &tau, n);
            PositivityVerdict {
                kind: PositivityKind::NotTransverse,
                exact: true,
                certificate: Certificate::Falsifier { tau, volume },
                samples_used: 0,
            }
        }
    }
}

/// Margins below this (volume over ‖τ‖²) make a sampled verdict indeterminate.
pub fn margin_floor() -> BigRational {
    BigRational::new(1.into(), 1_000_000.into())
}

fn random_gq(rng: &mut ChaCha8Rng) -> Gq {
    let a: i64 = rng.gen_range(-6..=6);
    let b: i64 = rng.gen_range(-6..=6);
    let d: i64 = rng.gen_range(1..=4);
    Gq::from_parts(a, d, b, d)
}

/// A random decomposable (q,0)-form v₁∧…∧v_q.
pub fn random_decomposable(n: usize, q: usize, rng: &mut ChaCha8Rng) -> Form {
    let mut tau = Form::one();
    for _ in 0..q {
        let v = (1..=n).fold(Form::zero(), |acc, i| acc.add(&Form::gamma(i).scale(&random_gq(rng))));
        tau = tau.wedge(&v);
    }
    tau
}

fn sampled_transverse(gamma: &Form, n: usize, q: usize, samples: usize, seed: u64) -> PositivityVerdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_margin: Option<BigRational> = None;
    let mut used = 0;
    while used < samples {
        let tau = random_decomposable(n, q, &mut rng);
        if tau.is_zero() {
            continue;
        }
        used += 1;
        let vol = pairing_volume(gamma, &tau, n);
        if !vol.im.is_zero() || !vol.re.is_positive() {
            return PositivityVerdict {
                kind: PositivityKind::NotTransverse,
                exact: true,
                certificate: Certificate::Falsifier { tau, volume: vol },
                samples_used: used,
            };
        }
        let margin = &vol.re / &tau.norm_sqr();
        if min_margin.as_ref().is_none_or(|m| margin < *m) {
            min_margin = Some(margin);
        }
    }
    let min_margin = min_margin.unwrap_or_else(BigRational::one);
    let kind = if min_margin < margin_floor() { PositivityKind::Indeterminate } else { PositivityKind::Transverse };
    PositivityVerdict { kind, exact: false, certificate: Certificate::Sampled { min_margin }, samples_used: used }
}

/// A falsifier re-verifies when it is a nonzero (q,0)-form with non-positive volume.
pub fn confirm_falsifier(gamma: &Form, tau: &Form, n: usize) -> bool {
    if tau.is_zero() {
        return false;
    }
    let v = pairing_volume(gamma, tau, n);
    v.im.is_zero() && !v.re.is_positive()
}

/// dΓ = 0 and Γ transverse; p must be at most n−1.
pub fn pkahler_check(
    se: &crate::structure::StructureEquations,
    gamma: &Form,
    p: usize,
    samples: usize,
    seed: u64,
) -> crate::error::Result<bool> {
    if p >= se.n {
        return Err(crate::error::NilError::PreconditionFailed(format!("p = {p} must be at most n−1")));
    }
    if !gamma.is_zero() && !gamma.is_pure(p, p) {
        return Err(crate::error::NilError::InvalidInput("Γ must be a (p,p)-form".into()));
    }
    Ok(se.d(gamma).is_zero() && is_transverse(gamma, se.n, samples, seed).is_transverse())
}

/// Real basis of the d-closed real (p,p)-forms.
pub fn closed_real_basis(nc: &NumericComplex, p: usize) -> Vec<Form> {
    let rb = crate::lemmata::real_basis(nc, p);
    if rb.is_empty() {
        return Vec::new();
    }
    let d = nc.del(p, p).vstack(&nc.delbar(p, p));
    let imgs: Vec<Vec<Gq>> = rb.iter().map(|r| d.mul_vec(r)).collect();
    let mut rows = Vec::new();
    for i in 0..d.rows() {
        rows.push(imgs.iter().map(|v| Gq::from_rational(v[i].re.clone())).collect());
        rows.push(imgs.iter().map(|v| Gq::from_rational(v[i].im.clone())).collect());
    }
    let coeffs = if rows.is_empty() { Matrix::identity(rb.len()).columns() } else { Matrix::from_rows(rows).nullspace() };
    coeffs
        .iter()
        .map(|s| {
            let v = s.iter().zip(&rb).fold(vec![Gq::zero(); nc.dim(p, p)], |acc, (c, r)| {
                crate::linalg::vec_add(&acc, &crate::linalg::vec_scale(r, c))
            });
            nc.form_of(p, p, &v)
        })
        .collect()
}

/// A (q,0)-form τ ≠ 0 with vol(Γ∧σ_q τ∧τ̄) = 0 for every d-closed real (p,p)-form Γ,
/// which rules out p-Kähler invariant forms. Only attempted where transversality is exact.
pub fn no_pkahler_certificate(nc: &NumericComplex, p: usize) -> Option<Form> {
    let n = nc.n;
    let q = n - p;
    if !(q <= 1 || q + 1 >= n) {
        return None;
    }
    let basis = closed_real_basis(nc, p);
    let dim = subsets(n, q).len();
    let mut stacked: Option<Matrix> = None;
    for g in &basis {
        let m = transversality_matrix(g, n, q);
        stacked = Some(match stacked {
            None => m,
            Some(s) => s.vstack(&m),
        });
    }
    let common = match stacked {
        None => Matrix::identity(dim).columns(),
        Some(s) => s.nullspace(),
    };
    let x = common.into_iter().next()?;
    let v: Vec<Gq> = x.iter().map(|c| c.conj()).collect();
    Some(tau_from_coords(n, q, &v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_complex;
    use crate::structure::StructureEquations;

    fn kahler(n: usize) -> Form {
        (1..=n).fold(Form::zero(), |acc, i| acc.add(&Form::basis(&[i], &[i]).scale(&sigma_q(1))))
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma_q(0), Gq::one());
        assert_eq!(sigma_q(1), Gq::from_parts(0, 1, 1, 2));
        assert_eq!(sigma_q(2), Gq::from_frac(1, 4));
    }

    #[test]
    fn standard_kahler_is_identity() {
        assert_eq!(hermitian_matrix_of(&kahler(2), 2, 1), Matrix::identity(2));
        assert!(is_transverse(&kahler(3), 3, 10, 1).exact);
        assert!(is_transverse(&kahler(3), 3, 10, 1).is_transverse());
    }

    #[test]
    fn degenerate_form_has_falsifier() {
        let g = Form::basis(&[1], &[1]).scale(&sigma_q(1));
        let v = is_transverse(&g, 2, 10, 1);
        assert_eq!(v.kind, PositivityKind::NotTransverse);
        match v.certificate {
            Certificate::Falsifier { tau, volume } => {
                assert!(volume.is_zero());
                assert!(confirm_falsifier(&g, &tau, 2));
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn off_diagonal_only_is_not_hermitian() {
        let t = Form::basis(&[1], &[2]).scale(&sigma_q(1));
        assert!(matches!(is_strictly_positive(&t, 2).certificate, Certificate::NotHermitian { .. }));
    }

    #[test]
    fn iwasawa_has_no_invariant_kahler_form() {
        let se =
            StructureEquations::new("iw", 3, 0, vec![Form::zero(), Form::zero(), Form::basis(&[1, 2], &[]).neg()])
                .unwrap();
        let nc = build_complex(&se).unwrap().numeric();
        let tau = no_pkahler_certificate(&nc, 1).expect("certificate");
        for g in closed_real_basis(&nc, 1) {
            assert!(pairing_volume(&g, &tau, 3).is_zero());
        }
    }

    #[test]
    fn sampled_path_on_middle_degree() {
        let n = 4;
        let g = kahler(n);
        let g2 = g.wedge(&g);
        let v = is_transverse(&g2, n, 30, 7);
        assert!(!v.exact);
        assert_eq!(v.kind, PositivityKind::Transverse);
    }
}
