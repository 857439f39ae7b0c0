//! Exact scalars: Gaussian rationals and truncated polynomials in (t, t̄).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::NilError;

/// An element of Q(i).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

pub type Gq = GaussianRational;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        GaussianRational { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational { re: rat(n, 1), im: BigRational::zero() }
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        GaussianRational { re: rat(n, d), im: BigRational::zero() }
    }

    /// `a/b + (c/d) i`
    pub fn from_parts(a: i64, b: i64, c: i64, d: i64) -> Self {
        GaussianRational { re: rat(a, b), im: rat(c, d) }
    }

    pub fn from_rational(r: BigRational) -> Self {
        GaussianRational { re: r, im: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|².
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussianRational { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        GaussianRational { re: &self.re * r, im: &self.im * r }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Default for GaussianRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl<'a> Add<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn add(self, o: &Gq) -> Gq {
        Gq { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}
impl<'a> Sub<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn sub(self, o: &Gq) -> Gq {
        Gq { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}
impl<'a> Mul<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn mul(self, o: &Gq) -> Gq {
        if self.im.is_zero() && o.im.is_zero() {
            return Gq { re: &self.re * &o.re, im: BigRational::zero() };
        }
        Gq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}
impl<'a> Div<&'a Gq> for &'a Gq {
    type Output = Gq;
    fn div(self, o: &Gq) -> Gq {
        self * &o.inv().expect("division by zero in Q(i)")
    }
}
impl Neg for Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: -self.re, im: -self.im }
    }
}
impl Neg for &Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: -self.re.clone(), im: -self.im.clone() }
    }
}
impl Add for Gq {
    type Output = Gq;
    fn add(self, o: Gq) -> Gq {
        &self + &o
    }
}
impl Sub for Gq {
    type Output = Gq;
    fn sub(self, o: Gq) -> Gq {
        &self - &o
    }
}
impl Mul for Gq {
    type Output = Gq;
    fn mul(self, o: Gq) -> Gq {
        &self * &o
    }
}
impl Div for Gq {
    type Output = Gq;
    fn div(self, o: Gq) -> Gq {
        &self / &o
    }
}
impl AddAssign<&Gq> for Gq {
    fn add_assign(&mut self, o: &Gq) {
        self.re += &o.re;
        self.im += &o.im;
    }
}
impl SubAssign<&Gq> for Gq {
    fn sub_assign(&mut self, o: &Gq) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imag = |r: &BigRational| -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", fmt_rat(r))
            }
        };
        if self.im.is_zero() {
            write!(f, "{}", fmt_rat(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}", imag(&self.im))
        } else if self.im.is_positive() {
            write!(f, "{}+{}", fmt_rat(&self.re), imag(&self.im))
        } else {
            write!(f, "{}{}", fmt_rat(&self.re), imag(&self.im))
        }
    }
}

fn parse_rat(s: &str) -> Result<BigRational, NilError> {
    let bad = || NilError::Parse(format!("bad rational `{s}`"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((a, b)) => {
            let n = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

fn parse_imag(s: &str) -> Result<BigRational, NilError> {
    let body = s.strip_suffix('i').unwrap_or(s);
    match body.trim() {
        "" | "+" => Ok(BigRational::one()),
        "-" => Ok(-BigRational::one()),
        b => parse_rat(b),
    }
}

impl FromStr for GaussianRational {
    type Err = NilError;

    /// Accepts `a`, `a/b`, `bi`, `a+bi`, `a-b/ci`, `i`, `-i`.
    fn from_str(s: &str) -> Result<Self, NilError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(NilError::Parse("empty coefficient".into()));
        }
        if !s.ends_with('i') {
            return Ok(Gq::from_rational(parse_rat(&s)?));
        }
        // split at the last sign that is not the leading one
        let bytes = s.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'/' {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => Ok(Gq { re: parse_rat(&s[..k])?, im: parse_imag(&s[k..])? }),
            None => Ok(Gq { re: BigRational::zero(), im: parse_imag(&s)? }),
        }
    }
}

/// Number of parameter slots available in an [`Exponent`].
pub const MAX_PARAMS: usize = 15;
const NIB: u32 = 4;
const HALF: u32 = 60;
const DEG_SHIFT: u32 = 120;
const HALF_MASK: u128 = (1u128 << HALF) - 1;

/// Packed multi-degree in (t₁..t_m, t̄₁..t̄_m). The total degree sits in the top
/// byte, so the derived ordering sorts terms by degree first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Exponent(u128);

impl Exponent {
    pub const ZERO: Exponent = Exponent(0);

    pub fn new(t: &[u32], tbar: &[u32]) -> Self {
        assert!(t.len() <= MAX_PARAMS && tbar.len() <= MAX_PARAMS, "too many parameters");
        let mut raw = 0u128;
        let mut deg = 0u32;
        for (k, &e) in t.iter().enumerate() {
            assert!(e < 16, "exponent too large");
            raw |= (e as u128) << (NIB * k as u32);
            deg += e;
        }
        for (k, &e) in tbar.iter().enumerate() {
            assert!(e < 16, "exponent too large");
            raw |= (e as u128) << (HALF + NIB * k as u32);
            deg += e;
        }
        assert!(deg < 16, "total degree too large");
        Exponent(raw | ((deg as u128) << DEG_SHIFT))
    }

    /// t_ν, with ν counted from 1.
    pub fn t(nu: usize) -> Self {
        let mut v = vec![0; nu];
        v[nu - 1] = 1;
        Self::new(&v, &[])
    }

    pub fn tbar(nu: usize) -> Self {
        let mut v = vec![0; nu];
        v[nu - 1] = 1;
        Self::new(&[], &v)
    }

    pub fn degree(self) -> u32 {
        (self.0 >> DEG_SHIFT) as u32
    }

    pub fn t_exp(self, nu: usize) -> u32 {
        ((self.0 >> (NIB * (nu as u32 - 1))) & 0xf) as u32
    }

    pub fn tbar_exp(self, nu: usize) -> u32 {
        ((self.0 >> (HALF + NIB * (nu as u32 - 1))) & 0xf) as u32
    }

    /// Caller guarantees the combined degree stays below 16.
    fn mul(self, o: Exponent) -> Exponent {
        Exponent(self.0 + o.0)
    }

    pub fn conj(self) -> Exponent {
        let lo = self.0 & HALF_MASK;
        let hi = (self.0 >> HALF) & HALF_MASK;
        let deg = self.0 >> DEG_SHIFT;
        Exponent(hi | (lo << HALF) | (deg << DEG_SHIFT))
    }

    /// Largest parameter index with a nonzero exponent (0 for constants).
    pub fn span(self) -> usize {
        (1..=MAX_PARAMS)
            .rev()
            .find(|&nu| self.t_exp(nu) > 0 || self.tbar_exp(nu) > 0)
            .unwrap_or(0)
    }

    pub fn t_vec(self, m: usize) -> Vec<u32> {
        (1..=m).map(|nu| self.t_exp(nu)).collect()
    }

    pub fn tbar_vec(self, m: usize) -> Vec<u32> {
        (1..=m).map(|nu| self.tbar_exp(nu)).collect()
    }
}

/// Exact order marker for [`ParamScalar`].
pub const EXACT: u32 = u32::MAX;

/// A polynomial in t and t̄ (independent commuting variables), truncated above
/// `order` in total degree. `order == EXACT` means no truncation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParamScalar {
    order: u32,
    terms: BTreeMap<Exponent, Gq>,
}

impl ParamScalar {
    pub fn zero() -> Self {
        ParamScalar { order: EXACT, terms: BTreeMap::new() }
    }

    pub fn constant(c: Gq) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Exponent::ZERO, c);
        }
        ParamScalar { order: EXACT, terms }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Gq::from_int(n))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn monomial(c: Gq, e: Exponent) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        ParamScalar { order: EXACT, terms }
    }

    pub fn t(nu: usize) -> Self {
        Self::monomial(Gq::one(), Exponent::t(nu))
    }

    pub fn tbar(nu: usize) -> Self {
        Self::monomial(Gq::one(), Exponent::tbar(nu))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order == EXACT
    }

    /// Truncate to total degree `order` (never raises the current order).
    pub fn truncated(mut self, order: u32) -> Self {
        let o = order.min(self.order);
        self.terms.retain(|e, _| e.degree() <= o);
        self.order = o;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.degree() == 0)
    }

    pub fn constant_term(&self) -> Gq {
        self.terms.get(&Exponent::ZERO).cloned().unwrap_or_else(Gq::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Gq)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: Exponent) -> Gq {
        self.terms.get(&e).cloned().unwrap_or_else(Gq::zero)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.degree()).max().unwrap_or(0)
    }

    /// Smallest degree present (None for zero).
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().next().map(|e| e.degree())
    }

    /// Largest parameter index used.
    pub fn param_span(&self) -> usize {
        self.terms.keys().map(|e| e.span()).max().unwrap_or(0)
    }

    pub fn homogeneous_part(&self, k: u32) -> Self {
        ParamScalar {
            order: self.order,
            terms: self.terms.iter().filter(|(e, _)| e.degree() == k).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    pub fn insert_term(&mut self, e: Exponent, c: Gq) {
        if e.degree() > self.order {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Gq::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn conj(&self) -> Self {
        ParamScalar { order: self.order, terms: self.terms.iter().map(|(e, c)| (e.conj(), c.conj())).collect() }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return ParamScalar { order: self.order, terms: BTreeMap::new() };
        }
        ParamScalar { order: self.order, terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    pub fn scale_rat(&self, r: &BigRational) -> Self {
        self.scale(&Gq::from_rational(r.clone()))
    }

    pub fn add_ref(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut out = self.clone().truncated(order);
        for (e, c) in &o.terms {
            out.insert_term(*e, c.clone());
        }
        out
    }

    pub fn sub_ref(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut out = self.clone().truncated(order);
        for (e, c) in &o.terms {
            out.insert_term(*e, -c);
        }
        out
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut out = ParamScalar { order, terms: BTreeMap::new() };
        for (ea, ca) in &self.terms {
            let da = ea.degree();
            if da > order {
                break;
            }
            for (eb, cb) in &o.terms {
                let d = da + eb.degree();
                if d > order {
                    break;
                }
                assert!(d < 16, "total degree overflow in exact product");
                out.insert_term(ea.mul(*eb), ca * cb);
            }
        }
        out
    }

    /// Evaluate with t̄ set to the complex conjugate of t.
    pub fn eval(&self, t: &[Gq]) -> Gq {
        let tbar: Vec<Gq> = t.iter().map(|x| x.conj()).collect();
        self.eval_pair(t, &tbar)
    }

    /// Evaluate treating t̄ as an independent point.
    pub fn eval_pair(&self, t: &[Gq], tbar: &[Gq]) -> Gq {
        let mut acc = Gq::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for nu in 1..=e.span() {
                let a = e.t_exp(nu);
                let b = e.tbar_exp(nu);
                if a > 0 {
                    term = &term * &t.get(nu - 1).expect("evaluation point too short").pow(a);
                }
                if b > 0 {
                    term = &term * &tbar.get(nu - 1).expect("evaluation point too short").pow(b);
                }
            }
            acc += &term;
        }
        acc
    }

    /// Σ |c|² over all terms.
    pub fn norm_sqr(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c.norm_sqr())
    }
}

impl Default for ParamScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Gq> for ParamScalar {
    fn from(c: Gq) -> Self {
        ParamScalar::constant(c)
    }
}

impl<'a> Add<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn add(self, o: &ParamScalar) -> ParamScalar {
        self.add_ref(o)
    }
}
impl<'a> Sub<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn sub(self, o: &ParamScalar) -> ParamScalar {
        self.sub_ref(o)
    }
}
impl<'a> Mul<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn mul(self, o: &ParamScalar) -> ParamScalar {
        self.mul_ref(o)
    }
}
impl Neg for &ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        self.scale(&Gq::from_int(-1))
    }
}
impl Add for ParamScalar {
    type Output = ParamScalar;
    fn add(self, o: ParamScalar) -> ParamScalar {
        self.add_ref(&o)
    }
}
impl Sub for ParamScalar {
    type Output = ParamScalar;
    fn sub(self, o: ParamScalar) -> ParamScalar {
        self.sub_ref(&o)
    }
}
impl Mul for ParamScalar {
    type Output = ParamScalar;
    fn mul(self, o: ParamScalar) -> ParamScalar {
        self.mul_ref(&o)
    }
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for nu in 1..=e.span() {
                match e.t_exp(nu) {
                    0 => {}
                    1 => write!(f, "·t{nu}")?,
                    a => write!(f, "·t{nu}^{a}")?,
                }
                match e.tbar_exp(nu) {
                    0 => {}
                    1 => write!(f, "·t̄{nu}")?,
                    a => write!(f, "·t̄{nu}^{a}")?,
                }
            }
        }
        Ok(())
    }
}

/// Multiply by 1/k!.
pub fn inv_factorial(k: u32) -> BigRational {
    let mut f = BigInt::one();
    for j in 2..=k {
        f *= BigInt::from(j);
    }
    BigRational::new(BigInt::one(), f)
}
