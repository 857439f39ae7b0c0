//! `nilform` command-line tool.
//!
//! Every command builds JSON records. `--json` prints one compact record per line;
//! otherwise the same records are rendered as indented text.

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use nilform::catalog::{self, At, CatalogEntry, GoldenExpectation};
use nilform::cohomology::{cohomology_report, dclosed_dim, ddbar_image_dim};
use nilform::complex::{build_complex, NumericComplex};
use nilform::deformation::{deform_complex, BeltramiDifferential, DeformMode};
use nilform::extension::{bc_class_count, pkahler_extend, project_to_closed, solve_extension};
use nilform::io;
use nilform::lemmata::{lemma_report, mild};
use nilform::positivity::{is_transverse, Certificate};
use nilform::{Form, Gq, StructureEquations};

#[derive(Parser)]
#[command(name = "nilform", version, about = "Invariant cohomology, deformations and extensions on nilmanifolds")]
struct Cli {
    /// Print line-oriented JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone)]
struct Target {
    /// Catalog name (optionally `catalog:NAME`) or path to a structure-equation JSON file.
    #[arg(long, short)]
    manifold: String,
    /// Beltrami differential JSON file; defaults to the catalog family, if any.
    #[arg(long)]
    beltrami: Option<String>,
    /// Parameter point, e.g. "3/7,5/11,2/13,7/17". Without it the central fiber is used.
    #[arg(long)]
    t: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Catalog listing and structure equations of an entry.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
    /// Bott-Chern, Aeppli, Dolbeault, ∂- and de Rham numbers.
    Cohomology {
        #[command(flatten)]
        target: Target,
        /// Also report d-closed and ∂∂̄-image dimensions at this bidegree, e.g. "4,4".
        #[arg(long)]
        bidegree: Option<String>,
    },
    /// ∂∂̄-lemma variants at every bidegree, or at one with --bidegree.
    Lemmata {
        #[command(flatten)]
        target: Target,
        /// Report only this bidegree, e.g. "4,5".
        #[arg(long)]
        bidegree: Option<String>,
        /// Report the full table even when --bidegree is given.
        #[arg(long)]
        all: bool,
        /// Print the witness of a failing mild lemma at this bidegree, e.g. "2,3".
        #[arg(long)]
        witness: Option<String>,
    },
    /// Structure equations of the deformed complex.
    Deform {
        #[command(flatten)]
        target: Target,
        /// Truncation order for the symbolic expansion.
        #[arg(long, default_value_t = 4, conflicts_with = "t")]
        order: u32,
        /// Symbolic power series in t, t̄ (the default without --t).
        #[arg(long, conflicts_with = "t")]
        symbolic: bool,
    },
    /// Extend a d-closed form along the deformation.
    Extend {
        #[command(flatten)]
        target: Target,
        /// Form JSON file; defaults to the catalog's distinguished form.
        #[arg(long)]
        form: Option<String>,
        #[arg(long, default_value_t = 4)]
        order: u32,
        /// Points at which to test Bott-Chern nontriviality (repeatable); defaults to the generic points scaled by 1/100.
        #[arg(long = "at")]
        at: Vec<String>,
        /// Treat the form as a p-Kähler form: symmetrize and test transversality at the --at points.
        #[arg(long)]
        pkahler: Option<usize>,
        #[arg(long, default_value_t = catalog::SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = catalog::SAMPLE_SEED)]
        seed: u64,
    },
    /// Transversality and p-Kähler check of a (p,p)-form.
    Positivity {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        form: Option<String>,
        /// Expected p; the form must be of bidegree (p,p).
        #[arg(long = "p")]
        p: Option<usize>,
        #[arg(long, default_value_t = catalog::SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = catalog::SAMPLE_SEED)]
        seed: u64,
    },
    /// Run a named scenario, or a golden file against a manifold.
    Scenario {
        /// Scenario name; `all` runs every scenario.
        name: Option<String>,
        /// Golden JSON file (array of tagged expectations).
        #[arg(long, requires = "manifold")]
        golden: Option<String>,
        #[arg(long)]
        manifold: Option<String>,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    /// Structure equations, Beltrami differential, distinguished form and goldens of an entry.
    Show { name: String },
    /// Write an entry's structure equations (or its Beltrami differential) as a loadable file.
    Export {
        name: String,
        #[arg(long)]
        beltrami: bool,
    },
}

enum Outcome {
    Ok(Vec<Value>),
    Mismatch(Vec<Value>),
    /// A canonical file, written verbatim regardless of --json.
    File(String),
}

fn main() -> ExitCode {
    // Usage errors are input errors (exit 1); 2 is reserved for golden mismatches.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let json = cli.json;
    match run(cli.cmd) {
        Ok(Outcome::Ok(recs)) => {
            emit(&recs, json);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Mismatch(recs)) => {
            emit(&recs, json);
            ExitCode::from(2)
        }
        Ok(Outcome::File(text)) => {
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            if json {
                println!("{}", json!({ "error": format!("{e:#}") }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(1)
        }
    }
}

fn emit(recs: &[Value], json: bool) {
    let mut out = std::io::stdout().lock();
    for r in recs {
        let text = if json {
            format!("{r}\n")
        } else {
            let mut s = String::new();
            render(r, 0, &mut s);
            s + "\n"
        };
        if out.write_all(text.as_bytes()).is_err() {
            return;
        }
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(x, indent + 1, out);
                    }
                    Value::Array(a) if a.iter().any(|e| e.is_object() || e.is_array()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for e in a {
                            match e {
                                Value::Object(_) => {
                                    out.push_str(&format!("{pad}  -\n"));
                                    render(e, indent + 2, out);
                                }
                                _ => out.push_str(&format!("{pad}  - {}\n", inline(e))),
                            }
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", inline(x))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", inline(other))),
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::Array(a) => format!("[{}]", a.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => scalar_text(other),
    }
}

struct Loaded {
    entry: Option<CatalogEntry>,
    se: StructureEquations,
    phi: Option<BeltramiDifferential>,
    t: Option<Vec<Gq>>,
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn load(target: &Target) -> Result<Loaded> {
    let (entry, se) = if let Some(name) = target.manifold.strip_prefix("catalog:") {
        let e = catalog::catalog_load(name)?;
        let se = e.se.clone();
        (Some(e), se)
    } else if Path::new(&target.manifold).is_file() {
        (None, io::parse_structure(&read(&target.manifold)?)?)
    } else {
        let e = catalog::catalog_load(&target.manifold)?;
        let se = e.se.clone();
        (Some(e), se)
    };
    let phi = match &target.beltrami {
        Some(p) => {
            let (phi, _) = io::parse_beltrami(&read(p)?)?;
            if phi.n() != se.n {
                bail!("Beltrami differential has n = {}, manifold has n = {}", phi.n(), se.n);
            }
            Some(phi)
        }
        None => entry.as_ref().and_then(|e| e.phi.clone()),
    };
    let t = target.t.as_deref().map(io::parse_point).transpose()?;
    if t.is_some() && phi.is_none() {
        bail!("--t needs a deformation family (--beltrami or a catalog entry with one)");
    }
    Ok(Loaded { entry, se, phi, t })
}

impl Loaded {
    /// Structure equations of the fiber selected by --t.
    fn fiber(&self) -> Result<StructureEquations> {
        Ok(match (&self.phi, &self.t) {
            (Some(phi), Some(t)) => deform_complex(&self.se, phi, &DeformMode::Point(t.clone()))?,
            _ => self.se.clone(),
        })
    }

    fn numeric(&self) -> Result<NumericComplex> {
        Ok(build_complex(&self.fiber()?)?.numeric())
    }

    fn point_label(&self) -> Value {
        match &self.t {
            Some(t) => json!(t.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
            None => json!("0"),
        }
    }

    fn form(&self, path: &Option<String>) -> Result<(Form, usize)> {
        if let Some(p) = path {
            let (f, n) = io::parse_form(&read(p)?)?;
            if n != self.se.n {
                bail!("form has n = {n}, manifold has n = {}", self.se.n);
            }
            let (p, _) = f.bidegree().context("form must be nonzero of pure bidegree")?;
            return Ok((f, p));
        }
        let d = self
            .entry
            .as_ref()
            .and_then(|e| e.form.clone())
            .context("no --form given and the manifold has no distinguished form")?;
        Ok((d.form, d.p))
    }
}

fn parse_bidegree(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(',').context("bidegree must look like \"p,q\"")?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn rat(r: &impl std::fmt::Display) -> String {
    r.to_string()
}

fn run(cmd: Cmd) -> Result<Outcome> {
    match cmd {
        Cmd::Catalog { cmd: CatalogCmd::List } => {
            let mut recs: Vec<Value> = catalog::CATALOG
                .iter()
                .map(|name| {
                    let e = catalog::catalog_load(if *name == "abelian_n" { "abelian_2" } else { name });
                    let desc = match (*name, e) {
                        ("abelian_n", _) => "complex torus of dimension n (use abelian_<n>)".to_string(),
                        (_, Ok(e)) => e.description,
                        (_, Err(err)) => err.to_string(),
                    };
                    json!({ "entry": name, "description": desc })
                })
                .collect();
            for (name, source) in catalog::OMITTED {
                recs.push(json!({ "omitted": name, "needs": source }));
            }
            Ok(Outcome::Ok(recs))
        }
        Cmd::Catalog { cmd: CatalogCmd::Show { name } } => {
            let e = catalog::catalog_load(&name)?;
            let mut v: Value = serde_json::to_value(io::structure_to_json(&e.se))?;
            if let Some(phi) = &e.phi {
                v["beltrami"] = serde_json::to_value(io::beltrami_to_json(phi, phi.param_span()))?;
            }
            if let Some(f) = &e.form {
                v["distinguished_form"] = json!({ "label": f.label, "p": f.p, "form": io::form_to_json(&f.form, e.se.n, 0) });
            }
            v["golden"] = serde_json::to_value(&e.golden)?;
            Ok(Outcome::Ok(vec![v]))
        }
        Cmd::Catalog { cmd: CatalogCmd::Export { name, beltrami } } => {
            let e = catalog::catalog_load(&name)?;
            let text = if beltrami {
                let phi = e.phi.as_ref().ok_or_else(|| anyhow::anyhow!("`{name}` has no Beltrami differential"))?;
                io::emit_beltrami(phi, phi.param_span())
            } else {
                io::emit_structure(&e.se)
            };
            Ok(Outcome::File(text))
        }
        Cmd::Cohomology { target, bidegree } => {
            let l = load(&target)?;
            let nc = l.numeric()?;
            let mut v = serde_json::to_value(cohomology_report(&nc))?;
            v["t"] = l.point_label();
            if let Some(b) = bidegree {
                let (p, q) = parse_bidegree(&b)?;
                v["bidegree"] = json!({ "p": p, "q": q, "dclosed_dim": dclosed_dim(&nc, p, q), "ddbar_image_dim": ddbar_image_dim(&nc, p, q) });
            }
            Ok(Outcome::Ok(vec![v]))
        }
        Cmd::Lemmata { target, witness, bidegree, all } => {
            let l = load(&target)?;
            let nc = l.numeric()?;
            let report = lemma_report(&nc);
            let mut v = match &bidegree {
                Some(b) if !all => {
                    let (p, q) = parse_bidegree(b)?;
                    let row = report.get(p, q).with_context(|| format!("bidegree ({p},{q}) out of range"))?;
                    let mut v = serde_json::to_value(row)?;
                    v["n"] = json!(report.n);
                    if p == q && p < report.n {
                        v["weak"] = json!(report.weak[p]);
                    }
                    v["standard"] = json!(report.standard);
                    v
                }
                _ => serde_json::to_value(&report)?,
            };
            v["t"] = l.point_label();
            if let Some(b) = witness {
                let (p, q) = parse_bidegree(&b)?;
                let verdict = mild(&nc, p, q);
                v["witness"] = match verdict.witness {
                    Some(w) => json!({
                        "p": p,
                        "q": q,
                        "form": w.form.to_string(),
                        "source": w.source.to_string(),
                        "confirmed": nilform::lemmata::confirm_witness(&nc, &w),
                    }),
                    None => Value::Null,
                };
            }
            Ok(Outcome::Ok(vec![v]))
        }
        Cmd::Deform { target, order, symbolic: _ } => {
            let l = load(&target)?;
            let phi = l.phi.clone().context("deform needs a Beltrami differential")?;
            let mode = match &l.t {
                Some(t) => DeformMode::Point(t.clone()),
                None => DeformMode::Symbolic { order },
            };
            let se_t = deform_complex(&l.se, &phi, &mode)?;
            Ok(Outcome::Ok(vec![serde_json::to_value(io::structure_to_json(&se_t))?]))
        }
        Cmd::Extend { target, form, order, at, pkahler, samples, seed } => {
            let l = load(&target)?;
            let phi = l.phi.clone().context("extend needs a Beltrami differential")?;
            let (omega0, _) = l.form(&form)?;
            if let Some(p) = pkahler {
                if !omega0.is_pure(p, p) {
                    bail!("--pkahler {p} needs a ({p},{p})-form");
                }
            }
            let state = solve_extension(&l.se, &phi, &omega0, order)?;
            let m = phi.param_span().max(1);
            let points: Vec<Vec<Gq>> = if at.is_empty() {
                vec![At::SmallP1.point(m), At::SmallP2.point(m)]
            } else {
                at.iter().map(|s| io::parse_point(s)).collect::<nilform::Result<_>>()?
            };
            let pk = match pkahler {
                Some(p) => {
                    let ext = pkahler_extend(&l.se, &phi, &omega0, order, &points, samples, seed)?;
                    let verdicts: Vec<Value> = points
                        .iter()
                        .zip(&ext.verdicts)
                        .map(|(t, v)| {
                            json!({
                                "t": t.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                                "kind": v.kind,
                                "exact": v.exact,
                                "transverse": v.is_transverse(),
                            })
                        })
                        .collect();
                    json!({ "p": p, "real_closed_through_order": ext.real_closed_through_order, "transverse_at": verdicts })
                }
                None => Value::Null,
            };
            let mut bc = Vec::new();
            for t in &points {
                let se_t = deform_complex(&l.se, &phi, &DeformMode::Point(t.clone()))?;
                let nc_t = build_complex(&se_t)?.numeric();
                let v = nc_t.vector_of(state.p, state.q, &state.at_point(t))?;
                let closed = project_to_closed(&nc_t, state.p, state.q, &v);
                let nontrivial = bc_class_count(&nc_t, state.p, state.q, &[closed]) == 1;
                bc.push(json!({ "t": t.iter().map(|c| c.to_string()).collect::<Vec<_>>(), "nontrivial": nontrivial }));
            }
            let residual: Vec<Value> =
                state.residual_by_order.iter().map(|[a, b]| json!([rat(a), rat(b)])).collect();
            let mut v = json!({
                "residual_by_order": residual,
                "closed_through_order": state.closed_through_order,
                "graded_pieces_vanish": state.graded_pieces_vanish,
                "extended_form": io::form_to_json(&state.omega, l.se.n, m),
                "bc_nontrivial_at": bc,
            });
            if pkahler.is_some() {
                v["pkahler"] = pk;
            }
            Ok(Outcome::Ok(vec![v]))
        }
        Cmd::Positivity { target, form, p: want, samples, seed } => {
            let l = load(&target)?;
            let (gamma, p) = l.form(&form)?;
            if let Some(w) = want {
                if w != p {
                    bail!("--p {w} given but the form has bidegree ({p},{p})");
                }
            }
            let se = l.fiber()?;
            let n = se.n;
            if !gamma.is_pure(p, p) {
                bail!("positivity needs a (p,p)-form");
            }
            let verdict = is_transverse(&gamma, n, samples, seed);
            let closed = se.d(&gamma).is_zero();
            let certificate = match &verdict.certificate {
                Certificate::Pivots(ps) => json!({ "pivots": ps.iter().map(rat).collect::<Vec<_>>() }),
                Certificate::FailingPivot { index, value } => json!({ "failing_pivot": index, "value": rat(value) }),
                Certificate::NotHermitian { row, col } => json!({ "not_hermitian": [row, col] }),
                Certificate::Falsifier { tau, volume } => json!({ "falsifier": tau.to_string(), "volume": volume.to_string() }),
                Certificate::Sampled { min_margin } => json!({ "sampled_min_margin": rat(min_margin) }),
                Certificate::None => Value::Null,
            };
            let v = json!({
                "n": n,
                "p": p,
                "t": l.point_label(),
                "kind": verdict.kind,
                "exact": verdict.exact,
                "samples_used": verdict.samples_used,
                "certificate": certificate,
                "d_closed": closed,
                "p_kahler": closed && verdict.is_transverse() && p < n,
            });
            Ok(Outcome::Ok(vec![v]))
        }
        Cmd::Scenario { name, golden, manifold } => {
            let reports = match (golden, name.as_deref()) {
                (Some(g), _) => {
                    let m = manifold.expect("clap requires --manifold");
                    let entry = if Path::new(&m).is_file() {
                        let se = io::parse_structure(&read(&m)?)?;
                        CatalogEntry { name: se.name.clone(), description: String::new(), se, phi: None, form: None, golden: vec![] }
                    } else {
                        catalog::catalog_load(&m)?
                    };
                    let specs: Vec<GoldenExpectation> = serde_json::from_str(&read(&g)?).context("parsing golden file")?;
                    vec![catalog::check_goldens(&g, &entry, &specs)?]
                }
                (None, Some("all")) => catalog::SCENARIOS.iter().map(|s| catalog::run_scenario(s)).collect::<nilform::Result<_>>()?,
                (None, Some(s)) => vec![catalog::run_scenario(s)?],
                (None, None) => bail!("give a scenario name ({}) or --golden", catalog::SCENARIOS.join(", ")),
            };
            let mut recs = Vec::new();
            let mut all = true;
            for r in reports {
                for c in &r.checks {
                    let mut v = serde_json::to_value(c)?;
                    v["scenario"] = json!(r.scenario);
                    recs.push(v);
                }
                recs.push(json!({ "scenario": r.scenario, "entry": r.entry, "pass": r.pass }));
                all &= r.pass;
            }
            Ok(if all { Outcome::Ok(recs) } else { Outcome::Mismatch(recs) })
        }
    }
}
