//! Built-in manifolds, their expected results, and the scenario runner.
//!
//! Every expected value carries a [`Source`]. Golden files without one are refused.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cohomology::{generic_points, RankProfile};
use crate::complex::{build_complex, NumericComplex};
use crate::deformation::{check_integrability, deform_complex, BeltramiDifferential, DeformMode};
use crate::error::{NilError, Result};
use crate::extension::{pkahler_extend, PkahlerExtension};
use crate::form::{Form, ParamMatrix, MAX_DIM};
use crate::lemmata;
use crate::positivity::{pkahler_check, sigma_q};
use crate::scalar::{Gq, ParamScalar};
use crate::structure::StructureEquations;

/// Seed and sample count for sampled transversality checks in catalog scenarios.
pub const SAMPLE_SEED: u64 = 0x6e69_6c66;
pub const SAMPLES: usize = 200;

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Stated in the literature this tool reproduces.
    Literature,
    /// Computed independently (by hand or by a second method).
    Derivation,
    /// Follows from elementary facts, such as the torus having trivial differentials.
    Elementary,
}

/// Where to evaluate a quantity on a deformation family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum At {
    Zero,
    /// The two fixed generic rational points.
    P1,
    P2,
    /// The generic points scaled by 1/100.
    SmallP1,
    SmallP2,
}

impl At {
    pub const ALL: [At; 5] = [At::Zero, At::P1, At::P2, At::SmallP1, At::SmallP2];

    pub fn point(self, m: usize) -> Vec<Gq> {
        let [p1, p2] = generic_points(m);
        let small = |v: Vec<Gq>| v.iter().map(|c| c * &Gq::from_frac(1, 100)).collect();
        match self {
            At::Zero => vec![Gq::zero(); m],
            At::P1 => p1,
            At::P2 => p2,
            At::SmallP1 => small(p1),
            At::SmallP2 => small(p2),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "quantity", rename_all = "snake_case")]
pub enum Quantity {
    HBc { p: usize, q: usize, at: At },
    HA { p: usize, q: usize, at: At },
    DclosedDim { p: usize, q: usize, at: At },
    DdbarImageDim { p: usize, q: usize, at: At },
    Betti { k: usize },
    Mild { p: usize, q: usize },
    DualMild { p: usize, q: usize },
    Strong { p: usize, q: usize },
    Weak { p: usize },
    Standard,
    /// The mild lemma fails at (p,q) and its witness is independently confirmed.
    MildWitnessConfirmed { p: usize, q: usize },
    /// The family φ(t) is integrable through the given order.
    Integrable { order: u32 },
    /// The distinguished form is p-Kähler on the central fiber.
    PKahler,
    /// The distinguished form extends to a real d-closed form through `order`.
    ExtensionClosed { order: u32 },
    /// The extension at `at` is transverse (sampled where not exact).
    ExtensionTransverse { order: u32, at: At },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Golden {
    #[serde(flatten)]
    pub quantity: Quantity,
    pub expected: Value,
    pub source: Source,
}

/// A golden expectation as read from a file; the source is optional here only so
/// that untagged entries can be reported instead of silently accepted.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct GoldenExpectation {
    #[serde(flatten)]
    pub quantity: Quantity,
    pub expected: Value,
    #[serde(default)]
    pub source: Option<Source>,
}

fn golden(quantity: Quantity, expected: impl Into<Value>, source: Source) -> Golden {
    Golden { quantity, expected: expected.into(), source }
}

#[derive(Clone, Debug)]
pub struct DistinguishedForm {
    pub label: String,
    pub p: usize,
    pub form: Form,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub se: StructureEquations,
    pub phi: Option<BeltramiDifferential>,
    pub form: Option<DistinguishedForm>,
    pub golden: Vec<Golden>,
}

pub const CATALOG: [&str; 4] = ["torus3", "iwasawa3", "bcvary10", "abelian_n"];

/// Entries named in the literature whose structure equations are not printed there.
pub const OMITTED: [(&str, &str); 2] = [
    ("Ugarte-Villacampa family I_λ", "Ugarte, Villacampa: balanced Hermitian geometry on 6-dimensional nilmanifolds"),
    ("Nakamura solvmanifold", "Nakamura: complex parallelisable manifolds and their small deformations"),
];

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn sum_diag(n: usize, k: usize) -> Form {
    crate::form::subsets(n, k).into_iter().fold(Form::zero(), |acc, bits| {
        let idx: Vec<usize> = (0..n).filter(|i| bits >> i & 1 == 1).map(|i| i + 1).collect();
        acc.add(&Form::basis(&idx, &idx))
    })
}

fn abelian(name: &str, n: usize) -> CatalogEntry {
    use Quantity::*;
    use Source::Elementary as E;
    let mut g = Vec::new();
    for p in 0..=n {
        for q in 0..=n {
            g.push(golden(HBc { p, q, at: At::Zero }, binom(n, p) * binom(n, q), E));
        }
    }
    for k in 0..=2 * n {
        g.push(golden(Betti { k }, binom(2 * n, k), E));
    }
    g.push(golden(Standard, true, E));
    let kahler = sum_diag(n, 1).scale(&sigma_q(1));
    if n >= 2 {
        g.push(golden(PKahler, true, E));
    }
    CatalogEntry {
        name: name.into(),
        description: format!("complex torus of dimension {n}"),
        se: StructureEquations::abelian(name, n),
        phi: None,
        form: (n >= 2).then(|| DistinguishedForm { label: "Kähler form".into(), p: 1, form: kahler }),
        golden: g,
    }
}

fn iwasawa() -> CatalogEntry {
    use Quantity::*;
    use Source::*;
    let se = StructureEquations::new(
        "iwasawa3",
        3,
        0,
        vec![Form::zero(), Form::zero(), Form::basis(&[1, 2], &[]).neg()],
    )
    .expect("valid");
    let mut g = vec![
        golden(Weak { p: 2 }, true, Literature),
        golden(DualMild { p: 2, q: 3 }, true, Literature),
        golden(Mild { p: 2, q: 3 }, false, Literature),
        golden(MildWitnessConfirmed { p: 2, q: 3 }, true, Derivation),
        golden(Mild { p: 2, q: 1 }, false, Literature),
        golden(MildWitnessConfirmed { p: 2, q: 1 }, true, Derivation),
        golden(Standard, false, Derivation),
    ];
    for (k, b) in [1, 4, 8, 10, 8, 4, 1].into_iter().enumerate() {
        g.push(golden(Betti { k }, b, Derivation));
    }
    CatalogEntry {
        name: "iwasawa3".into(),
        description: "Iwasawa manifold: dη³ = −η¹∧η²".into(),
        se,
        phi: None,
        form: None,
        golden: g,
    }
}

/// The ten-dimensional nilmanifold whose (4,4) Bott-Chern number jumps.
pub fn bcvary_structure() -> StructureEquations {
    StructureEquations::new(
        "bcvary10",
        5,
        0,
        vec![Form::zero(), Form::zero(), Form::zero(), Form::basis(&[1], &[3]), Form::basis(&[3], &[4])],
    )
    .expect("valid")
}

/// φ(t) = (t₁γ̄⁴ + t₂γ̄⁵)⊗θ₂ + (t₃γ̄⁴ + t₄γ̄⁵)⊗θ₅.
pub fn bcvary_phi() -> BeltramiDifferential {
    let mut m = ParamMatrix::zero(5, 5);
    m.set(1, 3, ParamScalar::t(1));
    m.set(1, 4, ParamScalar::t(2));
    m.set(4, 3, ParamScalar::t(3));
    m.set(4, 4, ParamScalar::t(4));
    BeltramiDifferential::from_matrix(&m)
}

/// Ω = Σ_{|I|=4} γ^I∧γ̄^I.
pub fn bcvary_balanced() -> Form {
    sum_diag(5, 4)
}

/// Truncation order used for extension checks in the catalog.
pub const EXTENSION_ORDER: u32 = 3;

fn bcvary() -> CatalogEntry {
    use Quantity::*;
    use Source::*;
    let mut g = vec![
        golden(HBc { p: 4, q: 4, at: At::Zero }, 19, Literature),
        golden(HBc { p: 4, q: 4, at: At::P1 }, 17, Literature),
        golden(HBc { p: 4, q: 4, at: At::P2 }, 17, Literature),
        golden(DdbarImageDim { p: 4, q: 4, at: At::Zero }, 2, Literature),
        golden(DdbarImageDim { p: 4, q: 4, at: At::P1 }, 4, Literature),
        golden(DdbarImageDim { p: 4, q: 4, at: At::P2 }, 4, Literature),
        golden(Mild { p: 4, q: 5 }, true, Literature),
        golden(Strong { p: 4, q: 5 }, false, Literature),
        golden(Integrable { order: 4 }, true, Literature),
        golden(PKahler, true, Literature),
        golden(ExtensionClosed { order: EXTENSION_ORDER }, true, Literature),
        golden(ExtensionTransverse { order: EXTENSION_ORDER, at: At::SmallP1 }, true, Literature),
        golden(ExtensionTransverse { order: EXTENSION_ORDER, at: At::SmallP2 }, true, Literature),
    ];
    for at in At::ALL {
        g.push(golden(DclosedDim { p: 4, q: 4, at }, 21, Literature));
    }
    CatalogEntry {
        name: "bcvary10".into(),
        description: "balanced nilmanifold with varying (4,4) Bott-Chern number".into(),
        se: bcvary_structure(),
        phi: Some(bcvary_phi()),
        form: Some(DistinguishedForm { label: "balanced metric Ω".into(), p: 4, form: bcvary_balanced() }),
        golden: g,
    }
}

/// Load a catalog entry; `abelian_k` gives the k-dimensional torus.
pub fn catalog_load(name: &str) -> Result<CatalogEntry> {
    let entry = match name {
        "torus3" => abelian("torus3", 3),
        "iwasawa3" => iwasawa(),
        "bcvary10" => bcvary(),
        _ => match name.strip_prefix("abelian_").and_then(|k| k.parse::<usize>().ok()) {
            Some(k) if (1..=MAX_DIM).contains(&k) => abelian(name, k),
            _ => return Err(NilError::UnknownEntry(name.into())),
        },
    };
    build_complex(&entry.se)?;
    Ok(entry)
}

/// Lazily computed data shared by the quantities of one entry.
pub struct Evaluator<'a> {
    pub entry: &'a CatalogEntry,
    complexes: HashMap<At, NumericComplex>,
    extensions: HashMap<u32, PkahlerExtension>,
}

impl<'a> Evaluator<'a> {
    pub fn new(entry: &'a CatalogEntry) -> Self {
        Evaluator { entry, complexes: HashMap::new(), extensions: HashMap::new() }
    }

    pub fn complex(&mut self, at: At) -> Result<&NumericComplex> {
        if !self.complexes.contains_key(&at) {
            let se = match (at, &self.entry.phi) {
                (At::Zero, _) => self.entry.se.clone(),
                (_, Some(phi)) => {
                    let t = at.point(phi.param_span().max(1));
                    deform_complex(&self.entry.se, phi, &DeformMode::Point(t))?
                }
                (_, None) => {
                    return Err(NilError::InvalidInput(format!("{} has no deformation family", self.entry.name)))
                }
            };
            self.complexes.insert(at, build_complex(&se)?.numeric());
        }
        Ok(&self.complexes[&at])
    }

    fn distinguished(&self) -> Result<&DistinguishedForm> {
        self.entry.form.as_ref().ok_or_else(|| NilError::InvalidInput(format!("{} has no distinguished form", self.entry.name)))
    }

    fn extension(&mut self, order: u32) -> Result<&PkahlerExtension> {
        if !self.extensions.contains_key(&order) {
            let phi = self.entry.phi.clone().ok_or_else(|| NilError::InvalidInput("no deformation family".into()))?;
            let f = self.distinguished()?.form.clone();
            let m = phi.param_span().max(1);
            let pts: Vec<Vec<Gq>> = At::ALL.iter().map(|a| a.point(m)).collect();
            let ext = pkahler_extend(&self.entry.se, &phi, &f, order, &pts, SAMPLES, SAMPLE_SEED)?;
            self.extensions.insert(order, ext);
        }
        Ok(&self.extensions[&order])
    }

    pub fn evaluate(&mut self, q: &Quantity) -> Result<Value> {
        use Quantity::*;
        Ok(match *q {
            HBc { p, q, at } => json!(RankProfile::of(self.complex(at)?).h_bc(p, q)),
            HA { p, q, at } => json!(RankProfile::of(self.complex(at)?).h_a(p, q)),
            DclosedDim { p, q, at } => json!(crate::cohomology::dclosed_dim(self.complex(at)?, p, q)),
            DdbarImageDim { p, q, at } => json!(crate::cohomology::ddbar_image_dim(self.complex(at)?, p, q)),
            Betti { k } => json!(RankProfile::of(self.complex(At::Zero)?).betti(k)),
            Mild { p, q } => json!(lemmata::mild(self.complex(At::Zero)?, p, q).holds),
            DualMild { p, q } => json!(lemmata::dual_mild(self.complex(At::Zero)?, p, q).holds),
            Strong { p, q } => json!(lemmata::strong(self.complex(At::Zero)?, p, q).holds),
            Weak { p } => json!(lemmata::weak(self.complex(At::Zero)?, p).holds),
            Standard => json!(lemmata::standard(self.complex(At::Zero)?).holds),
            MildWitnessConfirmed { p, q } => {
                let nc = self.complex(At::Zero)?;
                let v = lemmata::mild(nc, p, q);
                json!(v.witness.is_some_and(|w| lemmata::confirm_witness(nc, &w)))
            }
            Integrable { order } => {
                let phi = self.entry.phi.as_ref().ok_or_else(|| NilError::InvalidInput("no deformation family".into()))?;
                let (_, res) = check_integrability(&self.entry.se, &phi.truncated(order))?;
                json!(res.components.iter().all(|c| crate::deformation::vanishes_through(c, order)))
            }
            PKahler => {
                let f = self.distinguished()?.clone();
                json!(pkahler_check(&self.entry.se, &f.form, f.p, SAMPLES, SAMPLE_SEED)?)
            }
            ExtensionClosed { order } => {
                let e = self.extension(order)?;
                json!(e.state.closed_through_order && e.state.graded_pieces_vanish && e.real_closed_through_order)
            }
            ExtensionTransverse { order, at } => {
                let idx = At::ALL.iter().position(|a| *a == at).expect("listed");
                json!(self.extension(order)?.verdicts[idx].is_transverse())
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    #[serde(flatten)]
    pub quantity: Quantity,
    pub expected: Value,
    pub actual: Value,
    pub source: Source,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub entry: String,
    pub checks: Vec<CheckOutcome>,
    pub pass: bool,
}

/// Evaluate golden expectations against an entry. Untagged expectations are refused.
pub fn check_goldens(scenario: &str, entry: &CatalogEntry, specs: &[GoldenExpectation]) -> Result<ScenarioReport> {
    let tagged: Vec<Golden> = specs
        .iter()
        .map(|s| match s.source {
            Some(source) => Ok(Golden { quantity: s.quantity.clone(), expected: s.expected.clone(), source }),
            None => Err(NilError::InvalidInput(format!("expectation {:?} has no source tag", s.quantity))),
        })
        .collect::<Result<_>>()?;
    run_goldens(scenario, entry, &tagged)
}

pub fn run_goldens(scenario: &str, entry: &CatalogEntry, goldens: &[Golden]) -> Result<ScenarioReport> {
    let mut ev = Evaluator::new(entry);
    let mut checks = Vec::new();
    for g in goldens {
        let actual = ev.evaluate(&g.quantity)?;
        checks.push(CheckOutcome {
            quantity: g.quantity.clone(),
            pass: actual == g.expected,
            expected: g.expected.clone(),
            actual,
            source: g.source,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(ScenarioReport { scenario: scenario.into(), entry: entry.name.clone(), checks, pass })
}

pub const SCENARIOS: [&str; 4] = ["bcvary_bc_jump", "iwasawa_lemma_taxonomy", "bcvary_dclosed_21", "pkahler_extension_demo"];

pub fn run_scenario(name: &str) -> Result<ScenarioReport> {
    use Quantity::*;
    let (entry, keep): (&str, fn(&Quantity) -> bool) = match name {
        "bcvary_bc_jump" => ("bcvary10", |q| matches!(q, HBc { .. } | DdbarImageDim { .. })),
        "iwasawa_lemma_taxonomy" => ("iwasawa3", |q| {
            matches!(q, Weak { p: 2 } | DualMild { p: 2, q: 3 } | Mild { p: 2, q: 3 } | MildWitnessConfirmed { p: 2, q: 3 })
        }),
        "bcvary_dclosed_21" => ("bcvary10", |q| matches!(q, DclosedDim { .. })),
        "pkahler_extension_demo" => {
            ("bcvary10", |q| matches!(q, Integrable { .. } | PKahler | ExtensionClosed { .. } | ExtensionTransverse { .. }))
        }
        _ => return Err(NilError::UnknownEntry(name.into())),
    };
    let entry = catalog_load(entry)?;
    let goldens: Vec<Golden> = entry.golden.iter().filter(|g| keep(&g.quantity)).cloned().collect();
    run_goldens(name, &entry, &goldens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_entry() {
        assert!(matches!(catalog_load("kodaira"), Err(NilError::UnknownEntry(_))));
        assert!(matches!(catalog_load("abelian_0"), Err(NilError::UnknownEntry(_))));
        assert!(matches!(run_scenario("nope"), Err(NilError::UnknownEntry(_))));
    }

    #[test]
    fn entries_load() {
        assert_eq!(catalog_load("iwasawa3").unwrap().se.d_coframe(3), &Form::basis(&[1, 2], &[]).neg());
        let b = catalog_load("bcvary10").unwrap();
        assert_eq!(b.se.n, 5);
        assert_eq!(b.phi.unwrap().param_span(), 4);
        assert!(catalog_load("torus3").unwrap().se.is_abelian());
        assert_eq!(catalog_load("abelian_2").unwrap().se.n, 2);
    }

    #[test]
    fn torus_goldens_pass() {
        let e = catalog_load("torus3").unwrap();
        let r = run_goldens("torus", &e, &e.golden).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn untagged_golden_is_refused() {
        let e = catalog_load("torus3").unwrap();
        let specs: Vec<GoldenExpectation> =
            serde_json::from_str(r#"[{"quantity":"betti","k":1,"expected":6}]"#).unwrap();
        assert!(matches!(check_goldens("x", &e, &specs), Err(NilError::InvalidInput(_))));
        let specs: Vec<GoldenExpectation> =
            serde_json::from_str(r#"[{"quantity":"betti","k":1,"expected":6,"source":"elementary"}]"#).unwrap();
        assert!(check_goldens("x", &e, &specs).unwrap().pass);
    }

    #[test]
    fn mismatch_is_reported() {
        let e = catalog_load("torus3").unwrap();
        let g = [golden(Quantity::Betti { k: 1 }, 5, Source::Elementary)];
        let r = run_goldens("x", &e, &g).unwrap();
        assert!(!r.pass);
        assert_eq!(r.checks[0].actual, json!(6));
    }

    #[test]
    fn iwasawa_taxonomy_scenario() {
        let r = run_scenario("iwasawa_lemma_taxonomy").unwrap();
        assert_eq!(r.checks.len(), 4);
        assert!(r.pass, "{r:?}");
    }
}
