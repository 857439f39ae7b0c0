//! Versioned JSON files for structure equations, Beltrami differentials and forms.
//!
//! A term is `{"coeff": "a+bi", "factors": ["1", "bar3"], "t": [..], "tbar": [..]}`;
//! the exponent vectors are optional and default to zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::deformation::BeltramiDifferential;
use crate::error::{NilError, Result};
use crate::form::{Coframe, Form, Valence, VectorValuedForm};
use crate::scalar::{Exponent, Gq, ParamScalar, EXACT, MAX_PARAMS};
use crate::structure::StructureEquations;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: String,
    pub factors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tbar: Option<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureJson {
    #[serde(default = "default_version")]
    pub version: u32,
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    pub d: BTreeMap<String, Vec<TermJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeltramiJson {
    #[serde(default = "default_version")]
    pub version: u32,
    pub n: usize,
    #[serde(default)]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    /// Component i is the (0,1)-form φ⌟γ^i.
    pub components: BTreeMap<String, Vec<TermJson>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    #[serde(default = "default_version")]
    pub version: u32,
    pub n: usize,
    #[serde(default)]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    pub terms: Vec<TermJson>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

fn parse_factor(s: &str, n: usize) -> Result<Coframe> {
    let (anti, idx) = match s.strip_prefix("bar") {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let i: usize = idx.parse().map_err(|_| NilError::Parse(format!("bad factor {s:?}")))?;
    if i == 0 || i > n {
        return Err(NilError::Parse(format!("factor {s:?} out of range 1..{n}")));
    }
    Ok(if anti { Coframe::Anti(i) } else { Coframe::Hol(i) })
}

fn factor_name(f: Coframe) -> String {
    match f {
        Coframe::Hol(i) => i.to_string(),
        Coframe::Anti(j) => format!("bar{j}"),
    }
}

fn parse_exps(v: &Option<Vec<u32>>, m: usize) -> Result<Vec<u32>> {
    let v = v.clone().unwrap_or_default();
    if v.len() > m.min(MAX_PARAMS) {
        return Err(NilError::Parse(format!("exponent vector {v:?} longer than m = {m}")));
    }
    Ok(v)
}

fn parse_terms(terms: &[TermJson], n: usize, m: usize, order: Option<u32>) -> Result<Form> {
    let order = order.unwrap_or(EXACT);
    let mut out = Form::zero();
    for t in terms {
        let c: Gq = t.coeff.parse()?;
        let (te, tb) = (parse_exps(&t.t, m)?, parse_exps(&t.tbar, m)?);
        if te.iter().chain(&tb).sum::<u32>() >= 16 {
            return Err(NilError::Parse(format!("term degree too large in {:?}", t.coeff)));
        }
        let e = Exponent::new(&te, &tb);
        let mut f = Form::monomial(crate::form::Monomial::ONE, ParamScalar::monomial(c, e).truncated(order));
        if f.is_zero() {
            continue;
        }
        for s in &t.factors {
            f = f.wedge(&Form::coframe(parse_factor(s, n)?));
        }
        out = out.add(&f);
    }
    Ok(out)
}

fn emit_terms(f: &Form, m: usize) -> Vec<TermJson> {
    let mut out = Vec::new();
    for (mono, c) in f.terms() {
        let factors: Vec<String> = mono.factors().into_iter().map(factor_name).collect();
        for (e, g) in c.terms() {
            let t = e.t_vec(m);
            let tb = e.tbar_vec(m);
            out.push(TermJson {
                coeff: g.to_string(),
                factors: factors.clone(),
                t: if t.iter().any(|&x| x != 0) { Some(t) } else { None },
                tbar: if tb.iter().any(|&x| x != 0) { Some(tb) } else { None },
            });
        }
    }
    out
}

fn order_of(forms: &[&Form]) -> Option<u32> {
    let o = forms.iter().map(|f| f.order()).min().unwrap_or(EXACT);
    (o != EXACT).then_some(o)
}

fn indexed<T>(map: &BTreeMap<String, T>, n: usize, what: &str) -> Result<Vec<Option<T>>>
where
    T: Clone,
{
    let mut out = vec![None; n];
    for (k, v) in map {
        let i: usize = k.parse().map_err(|_| NilError::Parse(format!("{what} key {k:?} is not an index")))?;
        if i == 0 || i > n {
            return Err(NilError::Parse(format!("{what} key {k} out of range 1..{n}")));
        }
        out[i - 1] = Some(v.clone());
    }
    Ok(out)
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(NilError::Parse(format!("unsupported format version {v}")));
    }
    Ok(())
}

pub fn structure_from_json(j: &StructureJson) -> Result<StructureEquations> {
    check_version(j.version)?;
    let d = indexed(&j.d, j.n, "d")?
        .into_iter()
        .map(|t| parse_terms(&t.unwrap_or_default(), j.n, j.m, j.order))
        .collect::<Result<Vec<_>>>()?;
    StructureEquations::new(j.name.clone(), j.n, j.m, d)
}

pub fn structure_to_json(se: &StructureEquations) -> StructureJson {
    let forms: Vec<&Form> = se.d_coframes().iter().collect();
    StructureJson {
        version: FORMAT_VERSION,
        name: se.name.clone(),
        n: se.n,
        m: se.m,
        order: order_of(&forms),
        d: (1..=se.n).map(|i| (i.to_string(), emit_terms(se.d_coframe(i), se.m))).collect(),
    }
}

pub fn beltrami_from_json(j: &BeltramiJson) -> Result<BeltramiDifferential> {
    check_version(j.version)?;
    let comps = indexed(&j.components, j.n, "component")?
        .into_iter()
        .map(|t| parse_terms(&t.unwrap_or_default(), j.n, j.m, j.order))
        .collect::<Result<Vec<_>>>()?;
    BeltramiDifferential::new(VectorValuedForm { valence: Valence::Hol, components: comps })
}

pub fn beltrami_to_json(phi: &BeltramiDifferential, m: usize) -> BeltramiJson {
    let v = phi.as_vector_form();
    let forms: Vec<&Form> = v.components.iter().collect();
    BeltramiJson {
        version: FORMAT_VERSION,
        n: v.n(),
        m,
        order: order_of(&forms),
        components: v
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| ((i + 1).to_string(), emit_terms(c, m)))
            .collect(),
    }
}

pub fn form_from_json(j: &FormJson) -> Result<Form> {
    check_version(j.version)?;
    parse_terms(&j.terms, j.n, j.m, j.order)
}

pub fn form_to_json(f: &Form, n: usize, m: usize) -> FormJson {
    FormJson { version: FORMAT_VERSION, n, m, order: order_of(&[f]), terms: emit_terms(f, m) }
}

/// Pretty JSON with a trailing newline: the canonical file layout.
pub fn to_canonical_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| NilError::Parse(e.to_string()))
}

pub fn parse_structure(s: &str) -> Result<StructureEquations> {
    structure_from_json(&parse_json(s)?)
}

pub fn parse_beltrami(s: &str) -> Result<(BeltramiDifferential, usize)> {
    let j: BeltramiJson = parse_json(s)?;
    Ok((beltrami_from_json(&j)?, j.m))
}

pub fn parse_form(s: &str) -> Result<(Form, usize)> {
    let j: FormJson = parse_json(s)?;
    Ok((form_from_json(&j)?, j.n))
}

pub fn emit_structure(se: &StructureEquations) -> String {
    to_canonical_string(&structure_to_json(se))
}

pub fn emit_beltrami(phi: &BeltramiDifferential, m: usize) -> String {
    to_canonical_string(&beltrami_to_json(phi, m))
}

pub fn emit_form(f: &Form, n: usize, m: usize) -> String {
    to_canonical_string(&form_to_json(f, n, m))
}

/// Parse "3/7, 5/11, 1+2i" as a parameter point.
pub fn parse_point(s: &str) -> Result<Vec<Gq>> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| x.trim().parse()).collect()
}
