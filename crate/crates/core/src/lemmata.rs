//! Variants of the ∂∂̄-lemma on a numeric invariant complex, with explicit witnesses of failure.

use serde::Serialize;

use crate::cohomology::outside_image;
use crate::complex::NumericComplex;
use crate::form::Form;
use crate::linalg::{vec_is_zero, Matrix};
use crate::scalar::Gq;

/// A form that violates a lemma: it satisfies the hypothesis but is not ∂∂̄-exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub bidegree: (usize, usize),
    /// The offending form.
    pub form: Form,
    /// A form whose image under ∂, ∂̄ or d produces `form`.
    pub source: Form,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn pass() -> Self {
        Verdict { holds: true, witness: None }
    }

    fn fail(w: Witness) -> Self {
        Verdict { holds: false, witness: Some(w) }
    }
}

/// Check that `image_of(srcs)` sits inside im ∂∂̄ at (p,q).
fn image_check(
    nc: &NumericComplex,
    p: usize,
    q: usize,
    map: &Matrix,
    srcs: &[Vec<Gq>],
    src_bideg: (usize, usize),
) -> Verdict {
    let imgs: Vec<Vec<Gq>> = srcs.iter().map(|s| map.mul_vec(s)).collect();
    match outside_image(&nc.ddbar_into(p, q), &imgs) {
        None => Verdict::pass(),
        Some(k) => Verdict::fail(Witness {
            bidegree: (p, q),
            form: nc.form_of(p, q, &imgs[k]),
            source: nc.form_of(src_bideg.0, src_bideg.1, &srcs[k]),
        }),
    }
}

/// ∂(ker ∂∂̄ on (p-1,q)) ⊆ im ∂∂̄ on (p,q).
pub fn mild(nc: &NumericComplex, p: usize, q: usize) -> Verdict {
    if p == 0 || p > nc.n || q > nc.n {
        return Verdict::pass();
    }
    let k = nc.ddbar(p - 1, q).nullspace();
    image_check(nc, p, q, &nc.del(p - 1, q), &k, (p - 1, q))
}

/// ∂̄(ker ∂∂̄ on (p,q-1)) ⊆ im ∂∂̄ on (p,q).
pub fn dual_mild(nc: &NumericComplex, p: usize, q: usize) -> Verdict {
    if q == 0 || p > nc.n || q > nc.n {
        return Verdict::pass();
    }
    let k = nc.ddbar(p, q - 1).nullspace();
    image_check(nc, p, q, &nc.delbar(p, q - 1), &k, (p, q - 1))
}

/// (im ∂ + im ∂̄) ∩ ker ∂ ∩ ker ∂̄ ⊆ im ∂∂̄ on (p,q).
///
/// The witness source is the pair (a, b) packed as a + b with a ∈ (p-1,q), b ∈ (p,q-1).
pub fn strong(nc: &NumericComplex, p: usize, q: usize) -> Verdict {
    if p > nc.n || q > nc.n {
        return Verdict::pass();
    }
    let c = nc.del_into(p, q).hstack(&nc.delbar_into(p, q));
    let j = nc.del(p, q).vstack(&nc.delbar(p, q));
    let x = j.mul(&c).nullspace();
    let imgs: Vec<Vec<Gq>> = x.iter().map(|v| c.mul_vec(v)).collect();
    match outside_image(&nc.ddbar_into(p, q), &imgs) {
        None => Verdict::pass(),
        Some(k) => {
            let split = nc.del_into(p, q).cols();
            let (a, b) = x[k].split_at(split);
            let mut src = Form::zero();
            if p > 0 {
                src = src.add(&nc.form_of(p - 1, q, a));
            }
            if q > 0 {
                src = src.add(&nc.form_of(p, q - 1, b));
            }
            Verdict::fail(Witness { bidegree: (p, q), form: nc.form_of(p, q, &imgs[k]), source: src })
        }
    }
}

/// Coordinates of a real basis of the (p,p)-forms.
pub fn real_basis(nc: &NumericComplex, p: usize) -> Vec<Vec<Gq>> {
    let mons = nc.monomials(p, p);
    let dim = mons.len();
    let mut cands = Vec::new();
    for (k, m) in mons.iter().enumerate() {
        let (s, mc) = m.conj();
        let kc = nc.basis(p, p).position(&mc).expect("conjugate stays in (p,p)");
        let s = Gq::from_int(s as i64);
        let mut plus = vec![Gq::zero(); dim];
        let mut minus = vec![Gq::zero(); dim];
        plus[k] += &Gq::one();
        plus[kc] += &s;
        minus[k] += &Gq::i();
        minus[kc] -= &(&Gq::i() * &s);
        cands.push(plus);
        cands.push(minus);
    }
    let mut basis: Vec<Vec<Gq>> = Vec::new();
    for v in cands {
        if vec_is_zero(&v) {
            continue;
        }
        basis.push(v);
        if crate::linalg::span_rank(dim, &basis) < basis.len() {
            basis.pop();
        }
    }
    basis
}

/// For real ψ of bidegree (p,p) with ∂̄ψ ∈ im ∂: ∂̄ψ ∈ im ∂∂̄.
pub fn weak(nc: &NumericComplex, p: usize) -> Verdict {
    let q = p + 1;
    if q > nc.n {
        return Verdict::pass();
    }
    let rb = real_basis(nc, p);
    let us: Vec<Vec<Gq>> = rb.iter().map(|r| nc.delbar(p, p).mul_vec(r)).collect();
    // w with wᵀ A = 0 cut out im ∂ inside (p,q)
    let ann = nc.del_into(p, q).transpose().nullspace();
    let mut rows: Vec<Vec<Gq>> = Vec::new();
    for w in &ann {
        let vals: Vec<Gq> = us.iter().map(|u| w.iter().zip(u).fold(Gq::zero(), |acc, (a, b)| acc + a * b)).collect();
        rows.push(vals.iter().map(|z| Gq::from_rational(z.re.clone())).collect());
        rows.push(vals.iter().map(|z| Gq::from_rational(z.im.clone())).collect());
    }
    let coeffs = if rows.is_empty() {
        Matrix::identity(rb.len()).columns()
    } else {
        Matrix::from_rows(rows).nullspace()
    };
    let dim = nc.dim(p, p);
    let psis: Vec<Vec<Gq>> = coeffs
        .iter()
        .map(|s| {
            let mut v = vec![Gq::zero(); dim];
            for (c, r) in s.iter().zip(&rb) {
                v = crate::linalg::vec_add(&v, &crate::linalg::vec_scale(r, c));
            }
            v
        })
        .collect();
    image_check(nc, p, q, &nc.delbar(p, p), &psis, (p, p))
}

/// im d ∩ Λ^{p,q} ⊆ im ∂∂̄ for every (p,q).
pub fn standard(nc: &NumericComplex) -> Verdict {
    for k in 1..=2 * nc.n {
        let d = nc.d_total(k - 1);
        for (p, q, off) in nc.total_layout(k) {
            let dim = nc.dim(p, q);
            let others: Vec<Vec<Gq>> =
                (0..d.rows()).filter(|r| *r < off || *r >= off + dim).map(|r| d.row(r)).collect();
            let ys = if others.is_empty() { Matrix::identity(d.cols()).columns() } else { Matrix::from_rows(others).nullspace() };
            let proj = Matrix::from_rows((off..off + dim).map(|r| d.row(r)).collect());
            let proj = if dim == 0 { Matrix::zero(0, d.cols()) } else { proj };
            let imgs: Vec<Vec<Gq>> = ys.iter().map(|y| proj.mul_vec(y)).collect();
            if let Some(i) = outside_image(&nc.ddbar_into(p, q), &imgs) {
                let mut src = Form::zero();
                for (pp, qq, o) in nc.total_layout(k - 1) {
                    src = src.add(&nc.form_of(pp, qq, &ys[i][o..o + nc.dim(pp, qq)]));
                }
                return Verdict::fail(Witness { bidegree: (p, q), form: nc.form_of(p, q, &imgs[i]), source: src });
            }
        }
    }
    Verdict::pass()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BidegreeLemmas {
    pub p: usize,
    pub q: usize,
    pub mild: bool,
    pub dual_mild: bool,
    pub strong: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub bidegrees: Vec<BidegreeLemmas>,
    /// weak(p) for p = 0..n-1.
    pub weak: Vec<bool>,
    pub standard: bool,
}

impl LemmaReport {
    pub fn get(&self, p: usize, q: usize) -> Option<&BidegreeLemmas> {
        self.bidegrees.iter().find(|b| b.p == p && b.q == q)
    }
}

pub fn lemma_report(nc: &NumericComplex) -> LemmaReport {
    let n = nc.n;
    let mut bidegrees = Vec::new();
    for p in 0..=n {
        for q in 0..=n {
            bidegrees.push(BidegreeLemmas {
                p,
                q,
                mild: mild(nc, p, q).holds,
                dual_mild: dual_mild(nc, p, q).holds,
                strong: strong(nc, p, q).holds,
            });
        }
    }
    LemmaReport { n, bidegrees, weak: (0..n).map(|p| weak(nc, p).holds).collect(), standard: standard(nc).holds }
}

/// Independent confirmation of a witness: d-closed, in the claimed image, and not ∂∂̄-exact.
pub fn confirm_witness(nc: &NumericComplex, w: &Witness) -> bool {
    let (p, q) = w.bidegree;
    let Ok(v) = nc.vector_of(p, q, &w.form) else { return false };
    if vec_is_zero(&v) {
        return false;
    }
    let closed = vec_is_zero(&nc.del(p, q).mul_vec(&v)) && vec_is_zero(&nc.delbar(p, q).mul_vec(&v));
    let exact_image = {
        let mut img = Form::zero();
        for (pp, qq) in [(p.wrapping_sub(1), q), (p, q.wrapping_sub(1))] {
            if pp > nc.n || qq > nc.n {
                continue;
            }
            let part = w.source.bidegree_part(pp, qq);
            if part.is_zero() {
                continue;
            }
            let Ok(s) = nc.vector_of(pp, qq, &part) else { return false };
            let m = if pp + 1 == p { nc.del(pp, qq) } else { nc.delbar(pp, qq) };
            img = img.add(&nc.form_of(p, q, &m.mul_vec(&s)));
        }
        img == w.form
    };
    let not_ddbar = !nc.ddbar_into(p, q).in_column_space(&v);
    closed && exact_image && not_ddbar
}
