//! The bigraded exterior algebra on the coframe γ¹..γⁿ, γ̄¹..γ̄ⁿ.
//!
//! Indices in the public API are 1-based, matching the usual γ^i notation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{NilError, Result};
use crate::linalg::Matrix;
use crate::scalar::{inv_factorial, Gq, ParamScalar, EXACT};

/// Upper bound on the complex dimension (bitmask width).
pub const MAX_DIM: usize = 16;

/// γ^I ∧ γ̄^J with I, J stored as bitmasks (bit i-1 for index i).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    hol: u32,
    anti: u32,
}

fn set_cmp(a: u32, b: u32) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let x = a ^ b;
    let low = x & x.wrapping_neg();
    if a & low != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        self.p()
            .cmp(&o.p())
            .then(self.q().cmp(&o.q()))
            .then(set_cmp(self.hol, o.hol))
            .then(set_cmp(self.anti, o.anti))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn bits_of(idx: &[usize]) -> u32 {
    let mut b = 0u32;
    let mut last = 0;
    for &i in idx {
        assert!(i > last && i <= MAX_DIM, "indices must be strictly ascending and in 1..={MAX_DIM}");
        b |= 1 << (i - 1);
        last = i;
    }
    b
}

fn indices_of(mut b: u32) -> Vec<usize> {
    let mut v = Vec::with_capacity(b.count_ones() as usize);
    while b != 0 {
        v.push(b.trailing_zeros() as usize + 1);
        b &= b - 1;
    }
    v
}

/// Number of pairs (x ∈ a, y ∈ b) with x > y.
fn inversions(a: u32, mut b: u32) -> u32 {
    let mut c = 0;
    while b != 0 {
        let y = b.trailing_zeros();
        c += (a >> y >> 1).count_ones();
        b &= b - 1;
    }
    c
}

fn sign(parity: u32) -> i32 {
    if parity.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl Monomial {
    pub const ONE: Monomial = Monomial { hol: 0, anti: 0 };

    /// Strictly ascending 1-based index lists.
    pub fn new(i: &[usize], j: &[usize]) -> Self {
        Monomial { hol: bits_of(i), anti: bits_of(j) }
    }

    pub fn from_bits(hol: u32, anti: u32) -> Self {
        Monomial { hol, anti }
    }

    pub fn hol_bits(self) -> u32 {
        self.hol
    }

    pub fn anti_bits(self) -> u32 {
        self.anti
    }

    pub fn p(self) -> usize {
        self.hol.count_ones() as usize
    }

    pub fn q(self) -> usize {
        self.anti.count_ones() as usize
    }

    pub fn bidegree(self) -> (usize, usize) {
        (self.p(), self.q())
    }

    pub fn degree(self) -> usize {
        self.p() + self.q()
    }

    pub fn hol_indices(self) -> Vec<usize> {
        indices_of(self.hol)
    }

    pub fn anti_indices(self) -> Vec<usize> {
        indices_of(self.anti)
    }

    /// Factors in canonical order.
    pub fn factors(self) -> Vec<Coframe> {
        let mut v: Vec<Coframe> = self.hol_indices().into_iter().map(Coframe::Hol).collect();
        v.extend(self.anti_indices().into_iter().map(Coframe::Anti));
        v
    }

    /// self ∧ o = sign · result, or None if a factor repeats.
    pub fn wedge(self, o: Monomial) -> Option<(i32, Monomial)> {
        if self.hol & o.hol != 0 || self.anti & o.anti != 0 {
            return None;
        }
        let par = self.q() as u32 * o.p() as u32 + inversions(self.hol, o.hol) + inversions(self.anti, o.anti);
        Some((sign(par), Monomial { hol: self.hol | o.hol, anti: self.anti | o.anti }))
    }

    /// self ∧ f, appending one coframe factor on the right.
    pub fn append(self, f: Coframe) -> Option<(i32, Monomial)> {
        match f {
            Coframe::Hol(k) => {
                let b = 1u32 << (k - 1);
                if self.hol & b != 0 {
                    return None;
                }
                let par = self.q() as u32 + (self.hol >> k).count_ones();
                Some((sign(par), Monomial { hol: self.hol | b, anti: self.anti }))
            }
            Coframe::Anti(k) => {
                let b = 1u32 << (k - 1);
                if self.anti & b != 0 {
                    return None;
                }
                let par = (self.anti >> k).count_ones();
                Some((sign(par), Monomial { hol: self.hol, anti: self.anti | b }))
            }
        }
    }

    /// Left interior product with the vector dual to `f`.
    pub fn interior(self, f: Coframe) -> Option<(i32, Monomial)> {
        match f {
            Coframe::Hol(k) => {
                let b = 1u32 << (k - 1);
                if self.hol & b == 0 {
                    return None;
                }
                let par = (self.hol & (b - 1)).count_ones();
                Some((sign(par), Monomial { hol: self.hol & !b, anti: self.anti }))
            }
            Coframe::Anti(k) => {
                let b = 1u32 << (k - 1);
                if self.anti & b == 0 {
                    return None;
                }
                let par = self.p() as u32 + (self.anti & (b - 1)).count_ones();
                Some((sign(par), Monomial { hol: self.hol, anti: self.anti & !b }))
            }
        }
    }

    /// conj(γ^I∧γ̄^J) = γ̄^I∧γ^J = sign · γ^J∧γ̄^I.
    pub fn conj(self) -> (i32, Monomial) {
        (sign(self.p() as u32 * self.q() as u32), Monomial { hol: self.anti, anti: self.hol })
    }

    /// The top monomial γ^{1..n}∧γ̄^{1..n}.
    pub fn top(n: usize) -> Monomial {
        let b = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        Monomial { hol: b, anti: b }
    }

    /// All monomials of bidegree (p,q) on n generators, in canonical order.
    pub fn basis(n: usize, p: usize, q: usize) -> Vec<Monomial> {
        let hs = subsets(n, p);
        let as_ = subsets(n, q);
        let mut v = Vec::with_capacity(hs.len() * as_.len());
        for &h in &hs {
            for &a in &as_ {
                v.push(Monomial { hol: h, anti: a });
            }
        }
        v
    }
}

/// k-subsets of {1..n} as bitmasks, lexicographic.
pub fn subsets(n: usize, k: usize) -> Vec<u32> {
    fn rec(start: usize, n: usize, k: usize, cur: u32, out: &mut Vec<u32>) {
        if k == 0 {
            out.push(cur);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            rec(i + 1, n, k - 1, cur | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, 0, &mut out);
    }
    out
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hol == 0 && self.anti == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors().iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join("∧"))
    }
}

/// A single coframe 1-form, 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Coframe {
    Hol(usize),
    Anti(usize),
}

impl Coframe {
    /// Position in the 2n-dimensional coframe (γ's first).
    pub fn slot(self, n: usize) -> usize {
        match self {
            Coframe::Hol(i) => i - 1,
            Coframe::Anti(j) => n + j - 1,
        }
    }

    pub fn from_slot(n: usize, s: usize) -> Coframe {
        if s < n {
            Coframe::Hol(s + 1)
        } else {
            Coframe::Anti(s - n + 1)
        }
    }

    pub fn monomial(self) -> Monomial {
        match self {
            Coframe::Hol(i) => Monomial::new(&[i], &[]),
            Coframe::Anti(j) => Monomial::new(&[], &[j]),
        }
    }

    pub fn conj(self) -> Coframe {
        match self {
            Coframe::Hol(i) => Coframe::Anti(i),
            Coframe::Anti(j) => Coframe::Hol(j),
        }
    }
}

impl fmt::Display for Coframe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coframe::Hol(i) => write!(f, "γ{i}"),
            Coframe::Anti(j) => write!(f, "γ̄{j}"),
        }
    }
}

/// Sparse element of the exterior algebra with (t,t̄)-polynomial coefficients.
/// Mixed bidegrees are allowed; zero coefficients are never stored.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Form {
    terms: BTreeMap<Monomial, ParamScalar>,
}

impl Form {
    pub fn zero() -> Self {
        Form { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Monomial::ONE, ParamScalar::one())
    }

    pub fn monomial(m: Monomial, c: ParamScalar) -> Self {
        let mut f = Form::zero();
        f.add_term(m, c);
        f
    }

    pub fn constant_monomial(m: Monomial, c: Gq) -> Self {
        Self::monomial(m, ParamScalar::constant(c))
    }

    /// Basis monomial with coefficient 1, from 1-based index lists.
    pub fn basis(i: &[usize], j: &[usize]) -> Self {
        Self::monomial(Monomial::new(i, j), ParamScalar::one())
    }

    pub fn gamma(i: usize) -> Self {
        Self::basis(&[i], &[])
    }

    pub fn gamma_bar(j: usize) -> Self {
        Self::basis(&[], &[j])
    }

    pub fn coframe(f: Coframe) -> Self {
        Self::monomial(f.monomial(), ParamScalar::one())
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, ParamScalar)>) -> Self {
        let mut f = Form::zero();
        for (m, c) in it {
            f.add_term(m, c);
        }
        f
    }

    /// Build a constant-coefficient form from a coordinate vector on `basis`.
    pub fn from_vector(basis: &[Monomial], v: &[Gq]) -> Self {
        Form::from_terms(basis.iter().zip(v).map(|(m, c)| (*m, ParamScalar::constant(c.clone()))))
    }

    pub fn add_term(&mut self, m: Monomial, c: ParamScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x = x.add_ref(&c);
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ParamScalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: Monomial) -> ParamScalar {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common bidegree, if the form is nonzero and pure.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(|m| m.bidegree());
        let first = it.next()?;
        if it.all(|b| b == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn is_pure(&self, p: usize, q: usize) -> bool {
        self.terms.keys().all(|m| m.bidegree() == (p, q))
    }

    pub fn bidegree_part(&self, p: usize, q: usize) -> Form {
        self.filter(|m| m.bidegree() == (p, q))
    }

    pub fn degree_part(&self, k: usize) -> Form {
        self.filter(|m| m.degree() == k)
    }

    fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Form {
        Form { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (*m, c.clone())).collect() }
    }

    pub fn map_coeffs(&self, f: impl Fn(&ParamScalar) -> ParamScalar) -> Form {
        Form::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// The total-degree-k part in the parameters.
    pub fn homogeneous_part(&self, k: u32) -> Form {
        self.map_coeffs(|c| c.homogeneous_part(k))
    }

    pub fn truncated(&self, order: u32) -> Form {
        self.map_coeffs(|c| c.clone().truncated(order))
    }

    /// Coefficients at t = 0.
    pub fn at_zero(&self) -> Form {
        self.map_coeffs(|c| ParamScalar::constant(c.constant_term()))
    }

    pub fn evaluate(&self, t: &[Gq]) -> Form {
        self.map_coeffs(|c| ParamScalar::constant(c.eval(t)))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.values().all(|c| c.is_constant())
    }

    pub fn max_order(&self) -> u32 {
        self.terms.values().map(|c| c.max_degree()).max().unwrap_or(0)
    }

    /// Smallest truncation order among the coefficients.
    pub fn order(&self) -> u32 {
        self.terms.values().map(|c| c.order()).min().unwrap_or(EXACT)
    }

    pub fn param_span(&self) -> usize {
        self.terms.values().map(|c| c.param_span()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Form) -> Form {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Form) -> Form {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c);
        }
        r
    }

    pub fn neg(&self) -> Form {
        self.scale(&Gq::from_int(-1))
    }

    pub fn scale(&self, c: &Gq) -> Form {
        self.map_coeffs(|x| x.scale(c))
    }

    pub fn scale_rat(&self, r: &BigRational) -> Form {
        self.map_coeffs(|x| x.scale_rat(r))
    }

    pub fn scale_param(&self, c: &ParamScalar) -> Form {
        self.map_coeffs(|x| x.mul_ref(c))
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut r = Form::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if let Some((s, m)) = ma.wedge(*mb) {
                    let c = ca.mul_ref(cb);
                    r.add_term(m, if s < 0 { -&c } else { c });
                }
            }
        }
        r
    }

    /// Complex conjugation; coefficients have t and t̄ swapped.
    pub fn conj(&self) -> Form {
        Form::from_terms(self.terms.iter().map(|(m, c)| {
            let (s, mc) = m.conj();
            let cc = c.conj();
            (mc, if s < 0 { -&cc } else { cc })
        }))
    }

    /// Left interior product with the vector dual to `f`.
    pub fn interior(&self, f: Coframe) -> Form {
        let mut r = Form::zero();
        for (m, c) in &self.terms {
            if let Some((s, mm)) = m.interior(f) {
                r.add_term(mm, if s < 0 { -c } else { c.clone() });
            }
        }
        r
    }

    /// Σ |coefficient|² over every form monomial and parameter monomial.
    pub fn norm_sqr(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c.norm_sqr())
    }

    /// Coordinates of a constant-coefficient form on `basis` (extra monomials are an error).
    pub fn to_vector(&self, basis: &[Monomial]) -> Result<Vec<Gq>> {
        let index: std::collections::HashMap<Monomial, usize> = basis.iter().enumerate().map(|(k, m)| (*m, k)).collect();
        let mut v = vec![Gq::zero(); basis.len()];
        for (m, c) in &self.terms {
            let k = index
                .get(m)
                .ok_or_else(|| NilError::InvalidInput(format!("monomial {m} outside the target basis")))?;
            if !c.is_constant() {
                return Err(NilError::InvalidInput("form has parameter-dependent coefficients".into()));
            }
            v[*k] = c.constant_term();
        }
        Ok(v)
    }

    /// Split into constant-coefficient forms, one per parameter monomial.
    pub fn by_exponent(&self) -> BTreeMap<crate::scalar::Exponent, Form> {
        let mut out: BTreeMap<crate::scalar::Exponent, Form> = BTreeMap::new();
        for (m, c) in &self.terms {
            for (e, x) in c.terms() {
                out.entry(*e).or_default().add_term(*m, ParamScalar::constant(x.clone()));
            }
        }
        out
    }

    /// Inverse of [`Form::by_exponent`].
    pub fn from_exponent_parts(parts: &BTreeMap<crate::scalar::Exponent, Form>, order: u32) -> Form {
        let mut r = Form::zero();
        for (e, f) in parts {
            for (m, c) in f.terms() {
                r.add_term(*m, ParamScalar::monomial(c.constant_term(), *e).truncated(order));
            }
        }
        r
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("[{c}] {m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Which tangent bundle a vector-valued form takes values in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Valence {
    /// T^{1,0}: components are the coefficients of θ_i.
    Hol,
    /// T^{0,1}: components are the coefficients of θ̄_i.
    Anti,
}

/// Σ_i components[i-1] ⊗ θ_i (or θ̄_i).
#[derive(Clone, PartialEq, Debug)]
pub struct VectorValuedForm {
    pub valence: Valence,
    pub components: Vec<Form>,
}

impl VectorValuedForm {
    pub fn zero(valence: Valence, n: usize) -> Self {
        VectorValuedForm { valence, components: vec![Form::zero(); n] }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// `form ⊗ θ_i` (1-based i).
    pub fn single(valence: Valence, n: usize, i: usize, form: Form) -> Self {
        let mut v = Self::zero(valence, n);
        v.components[i - 1] = form;
        v
    }

    /// φ with φ^i = Σ_j M[i][j] γ̄^j for T^{1,0}; Σ_j M[i][j] γ^j for T^{0,1}.
    pub fn from_matrix(valence: Valence, m: &ParamMatrix) -> Self {
        let n = m.rows();
        let components = (0..n)
            .map(|i| {
                Form::from_terms((0..m.cols()).map(|j| {
                    let mono = match valence {
                        Valence::Hol => Monomial::new(&[], &[j + 1]),
                        Valence::Anti => Monomial::new(&[j + 1], &[]),
                    };
                    (mono, m.get(i, j).clone())
                }))
            })
            .collect();
        VectorValuedForm { valence, components }
    }

    /// Inverse of [`VectorValuedForm::from_matrix`] for 1-form components of the opposite type.
    pub fn to_matrix(&self) -> ParamMatrix {
        let n = self.n();
        let mut m = ParamMatrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let mono = match self.valence {
                    Valence::Hol => Monomial::new(&[], &[j + 1]),
                    Valence::Anti => Monomial::new(&[j + 1], &[]),
                };
                m.set(i, j, self.components[i].coeff(mono));
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn conj(&self) -> Self {
        VectorValuedForm {
            valence: match self.valence {
                Valence::Hol => Valence::Anti,
                Valence::Anti => Valence::Hol,
            },
            components: self.components.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.valence, o.valence);
        VectorValuedForm {
            valence: self.valence,
            components: self.components.iter().zip(&o.components).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.valence, o.valence);
        VectorValuedForm {
            valence: self.valence,
            components: self.components.iter().zip(&o.components).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        self.map(|f| f.scale(c))
    }

    pub fn map(&self, f: impl Fn(&Form) -> Form) -> Self {
        VectorValuedForm { valence: self.valence, components: self.components.iter().map(f).collect() }
    }

    pub fn homogeneous_part(&self, k: u32) -> Self {
        self.map(|f| f.homogeneous_part(k))
    }

    pub fn truncated(&self, order: u32) -> Self {
        self.map(|f| f.truncated(order))
    }

    pub fn evaluate(&self, t: &[Gq]) -> Self {
        self.map(|f| f.evaluate(t))
    }

    fn dual(&self, i: usize) -> Coframe {
        match self.valence {
            Valence::Hol => Coframe::Hol(i),
            Valence::Anti => Coframe::Anti(i),
        }
    }
}

impl fmt::Display for VectorValuedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.valence == Valence::Hol { "θ" } else { "θ̄" };
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("({c})⊗{v}{}", i + 1))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// ι_θ a = Σ_i θ^i ∧ (θ_i ⌟ a), with the left interior product.
pub fn contract(theta: &VectorValuedForm, a: &Form) -> Form {
    let mut r = Form::zero();
    for (i, comp) in theta.components.iter().enumerate() {
        if comp.is_zero() {
            continue;
        }
        let inner = a.interior(theta.dual(i + 1));
        if !inner.is_zero() {
            r = r.add(&comp.wedge(&inner));
        }
    }
    r
}

/// ι_θ^k / k!.
pub fn contract_pow(theta: &VectorValuedForm, k: u32, a: &Form) -> Form {
    let mut x = a.clone();
    for _ in 0..k {
        if x.is_zero() {
            return x;
        }
        x = contract(theta, &x);
    }
    x.scale_rat(&inv_factorial(k))
}

/// e^{ι_θ} a = Σ_k ι_θ^k a / k!.
pub fn exp_contract(theta: &VectorValuedForm, a: &Form) -> Form {
    let mut total = a.clone();
    let mut x = a.clone();
    let mut k = 0u32;
    loop {
        k += 1;
        x = contract(theta, &x);
        if x.is_zero() {
            break;
        }
        total = total.add(&x.scale_rat(&inv_factorial(k)));
        assert!(k < 64, "contraction series does not terminate");
    }
    total
}

/// Dense matrix of truncated polynomials.
#[derive(Clone, PartialEq, Debug)]
pub struct ParamMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ParamScalar>,
}

impl ParamMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ParamMatrix { rows, cols, data: vec![ParamScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, ParamScalar::one());
        }
        m
    }

    pub fn from_constant(m: &Matrix) -> Self {
        let mut r = Self::zero(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                r.set(i, j, ParamScalar::constant(m.get(i, j).clone()));
            }
        }
        r
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &ParamScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ParamScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn map(&self, f: impl Fn(&ParamScalar) -> ParamScalar) -> Self {
        ParamMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Elementwise conjugation (t ↔ t̄, coefficients conjugated).
    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    pub fn truncated(&self, order: u32) -> Self {
        self.map(|x| x.clone().truncated(order))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ParamMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        ParamMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        let mut r = Self::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = r.get(i, j).add_ref(&a.mul_ref(b));
                    r.set(i, j, v);
                }
            }
        }
        r
    }

    pub fn evaluate(&self, t: &[Gq]) -> Matrix {
        let mut m = Matrix::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).eval(t));
            }
        }
        m
    }

    pub fn at_zero(&self) -> Matrix {
        let mut m = Matrix::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).constant_term());
            }
        }
        m
    }

    pub fn has_constant_term(&self) -> bool {
        self.data.iter().any(|x| !x.constant_term().is_zero())
    }

    pub fn min_order(&self) -> u32 {
        self.data.iter().map(|x| x.order()).min().unwrap_or(EXACT)
    }
}

/// (1 − E)^{-1} = Σ_k E^k, truncated at `order` (and at E's own truncation).
pub fn neumann_invert(e: &ParamMatrix, order: u32) -> Result<ParamMatrix> {
    assert_eq!(e.rows(), e.cols());
    if e.has_constant_term() {
        return Err(NilError::NotPerturbative);
    }
    let order = order.min(e.min_order());
    let e = e.truncated(order);
    let mut total = ParamMatrix::identity(e.rows()).truncated(order);
    let mut pow = total.clone();
    for _ in 0..=order {
        pow = pow.mul(&e);
        if pow.is_zero() {
            break;
        }
        total = total.add(&pow);
    }
    Ok(total)
}

/// An endomorphism of the 2n-dimensional coframe span, given by the image of
/// each coframe element (row k = image of slot k in the slot basis).
#[derive(Clone, PartialEq, Debug)]
pub struct CoframeMap {
    pub n: usize,
    pub matrix: ParamMatrix,
}

impl CoframeMap {
    pub fn identity(n: usize) -> Self {
        CoframeMap { n, matrix: ParamMatrix::identity(2 * n) }
    }

    pub fn new(n: usize, matrix: ParamMatrix) -> Self {
        assert_eq!(matrix.rows(), 2 * n);
        assert_eq!(matrix.cols(), 2 * n);
        CoframeMap { n, matrix }
    }

    /// Identity on the γ block, `m` on the γ̄ block (γ̄^k ↦ Σ_l m[k][l] γ̄^l).
    pub fn on_anti(m: &ParamMatrix) -> Self {
        let n = m.rows();
        let mut r = ParamMatrix::identity(2 * n);
        for k in 0..n {
            for l in 0..n {
                r.set(n + k, n + l, m.get(k, l).clone());
            }
        }
        CoframeMap { n, matrix: r }
    }

    /// The map γ^i ↦ γ^i + φ^i, γ̄^i ↦ γ̄^i + conj(φ^i) for φ with matrix Φ.
    pub fn extension(phi: &ParamMatrix) -> Self {
        let n = phi.rows();
        let mut r = ParamMatrix::identity(2 * n);
        let phibar = phi.conj();
        for i in 0..n {
            for j in 0..n {
                r.set(i, n + j, phi.get(i, j).clone());
                r.set(n + i, j, phibar.get(i, j).clone());
            }
        }
        CoframeMap { n, matrix: r }
    }

    pub fn image(&self, f: Coframe) -> Vec<(Coframe, &ParamScalar)> {
        let k = f.slot(self.n);
        (0..2 * self.n)
            .filter(|&l| !self.matrix.get(k, l).is_zero())
            .map(|l| (Coframe::from_slot(self.n, l), self.matrix.get(k, l)))
            .collect()
    }

    pub fn compose(&self, after: &CoframeMap) -> CoframeMap {
        // (after ∘ self)(f) = after applied to each slot of self(f)
        CoframeMap { n: self.n, matrix: self.matrix.mul(&after.matrix) }
    }
}

/// The algebra homomorphism induced by applying `b` to every coframe factor.
pub fn simultaneous_contract(b: &CoframeMap, a: &Form) -> Form {
    let images: Vec<Vec<(Coframe, &ParamScalar)>> =
        (0..2 * b.n).map(|s| b.image(Coframe::from_slot(b.n, s))).collect();
    let mut out = Form::zero();
    for (m, c) in a.terms() {
        let mut acc: BTreeMap<Monomial, ParamScalar> = BTreeMap::new();
        acc.insert(Monomial::ONE, c.clone());
        for f in m.factors() {
            let mut next: BTreeMap<Monomial, ParamScalar> = BTreeMap::new();
            for (mm, cc) in &acc {
                for (g, s) in &images[f.slot(b.n)] {
                    if let Some((sg, nm)) = mm.append(*g) {
                        let v = cc.mul_ref(s);
                        let v = if sg < 0 { -&v } else { v };
                        let e = next.entry(nm).or_default();
                        *e = e.add_ref(&v);
                    }
                }
            }
            next.retain(|_, v| !v.is_zero());
            acc = next;
            if acc.is_empty() {
                break;
            }
        }
        for (mm, cc) in acc {
            out.add_term(mm, cc);
        }
    }
    out
}
