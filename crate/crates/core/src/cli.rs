//! The `deforge` command line.
//!
//! Every subcommand writes one report (see [`crate::report`]). Exit codes:
//! 0 when all checks in the report pass, 1 when one fails, 2 on usage or
//! input errors. A lemma that does not hold is a result, not a failure.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::calculus::IdentityId;
use crate::catalog::{self, CatalogEntry};
use crate::deformation::{
    extend_balanced, extend_dclosed_projection, extend_kahler, fixed_point_residuals, integrability_residuals,
    kuranishi, majorant_report, series_json, verify_extension_closed, verify_projection, verify_reduction,
    BiSeries, ClosedKind, ExtensionError, Kuranishi, MajorantParams,
};
use crate::exterior::{Form, VectorForm};
use crate::fuzz::fuzz_report;
use crate::hodge::{HermitianMetric, Hodge, Theory};
use crate::lemmata::{classify, nilpotent_filtration_length, LemmaKind, Lemmata};
use crate::positivity::{
    canonical_form, construct_extremal, extremal_report, hermitian_rep, pluecker_codim, positive_index_bound_check,
    ExtremalKind, SampleConfig, Verdict,
};
use crate::report::{form_json, vector_json, Provenance, Report};
use crate::scalar::{GaussRat as Q, Scalar, C64};

#[derive(Parser, Debug)]
#[command(name = "deforge", version, about = "Exact deformation calculus on nilmanifold Lie algebras")]
struct Cli {
    /// Scalar backend.
    #[arg(long, global = true, value_enum, default_value_t = Backend::Exact)]
    backend: Backend,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Structure {
    Kahler,
    Balanced,
    Dclosed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Closedness {
    D,
    Ddbar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Construct {
    ExactIndex,
    NegativeIndex,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions of a cohomology theory of the Lie algebra.
    Cohomology {
        src: String,
        /// dolbeault, del, bc or aeppli.
        #[arg(long)]
        theory: String,
        #[arg(long, value_parser = parse_bidegree, conflicts_with = "all")]
        bidegree: Option<(usize, usize)>,
        /// Every bidegree (the default).
        #[arg(long)]
        all: bool,
    },
    /// Decide one of the ∂∂̄-lemma variants.
    Lemma {
        src: String,
        /// mild, dual-mild, weak, strong or full.
        #[arg(long)]
        kind: String,
        #[arg(long, value_parser = parse_bidegree)]
        bidegree: Option<(usize, usize)>,
    },
    /// Classify the complex structure.
    Classify { src: String },
    /// Kuranishi series of integrable Beltrami differentials.
    Kuranishi {
        src: String,
        #[arg(long, default_value_t = 3)]
        order: u32,
        /// Comma-separated coefficients on the harmonic basis (default: all ones).
        #[arg(long)]
        direction: Option<String>,
    },
    /// Extend a Kähler, balanced or closed form along a Kuranishi family.
    Extend {
        src: String,
        #[arg(long, value_enum)]
        structure: Structure,
        #[arg(long, default_value_t = 3)]
        order: u32,
        /// Metric file; defaults to the entry's metric.
        #[arg(long)]
        metric: Option<PathBuf>,
        /// Form file for the initial form; defaults to the metric's fundamental form.
        #[arg(long)]
        form: Option<PathBuf>,
        #[arg(long)]
        direction: Option<String>,
        /// Closedness preserved by `--structure dclosed`.
        #[arg(long, value_enum, default_value_t = Closedness::D)]
        closed: Closedness,
    },
    /// Transversality of a real (p,p)-form, or construct an extremal one.
    Positivity {
        /// Algebra whose fundamental form's p-th power is tested.
        src: Option<String>,
        /// Form file to test instead.
        #[arg(long, conflicts_with = "src")]
        form: Option<PathBuf>,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, value_enum)]
        construct: Option<Construct>,
    },
    /// Check the calculus identities on random exact inputs.
    Fuzz {
        src: String,
        /// `all` or a comma-separated list of identity keys.
        #[arg(long, default_value = "all")]
        identities: String,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
    /// The majorant series A(t) and its square bound.
    Majorant {
        #[arg(long)]
        beta: String,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        order: u32,
        /// Coefficient file to test for domination by A(t).
        #[arg(long)]
        against: Option<PathBuf>,
    },
}

/// A usage or input error (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl ToString) -> UsageError {
    UsageError(e.to_string())
}

fn parse_bidegree(s: &str) -> Result<(usize, usize), String> {
    let (p, q) = s.split_once(',').ok_or_else(|| format!("expected `p,q`, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid degree `{t}`"));
    Ok((num(p)?, num(q)?))
}

fn parse_direction(s: &str) -> Result<Vec<Q>, UsageError> {
    s.split(',').map(|t| t.trim().parse::<Q>().map_err(usage)).collect()
}

fn parse_rational(s: &str) -> Result<BigRational, UsageError> {
    let q: Q = s.parse().map_err(usage)?;
    if !q.is_real() {
        return Err(usage(format!("`{s}` is not real")));
    }
    Ok(q.re)
}

fn read_file(path: &Path) -> Result<String, UsageError> {
    catalog::read(path).map_err(usage)
}

/// Parse `argv` (including the program name), run the command and write its
/// report. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = match std::env::var("DEFORGE_THREADS") {
        Ok(v) => match v.parse::<usize>() {
            Ok(k) if k > 0 => k,
            _ => {
                eprintln!("error: DEFORGE_THREADS must be a positive integer, got `{v}`");
                return 2;
            }
        },
        Err(_) => 0,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let report = match pool.install(|| execute(&cli)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = report.emit();
    match &cli.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    if report.all_passed() {
        0
    } else {
        1
    }
}

fn execute(cli: &Cli) -> Result<Report, UsageError> {
    let float = cli.backend == Backend::Float;
    let exact_only = |what: &str| -> Result<(), UsageError> {
        if float {
            Err(usage(format!("`{what}` only supports the exact backend")))
        } else {
            Ok(())
        }
    };
    let mut report = match &cli.command {
        Command::Cohomology { src, theory, bidegree, .. } => {
            let entry = catalog::resolve(src).map_err(usage)?;
            let theory: Theory = theory.parse().map_err(usage)?;
            if float {
                cohomology::<C64>(&entry, theory, *bidegree)?
            } else {
                cohomology::<Q>(&entry, theory, *bidegree)?
            }
        }
        Command::Lemma { src, kind, bidegree } => {
            exact_only("lemma")?;
            let entry = catalog::resolve(src).map_err(usage)?;
            let kind: LemmaKind = kind.parse().map_err(usage)?;
            lemma(&entry, kind, *bidegree)?
        }
        Command::Classify { src } => {
            exact_only("classify")?;
            classify_cmd(&catalog::resolve(src).map_err(usage)?)
        }
        Command::Kuranishi { src, order, direction } => {
            let entry = catalog::resolve(src).map_err(usage)?;
            let dir = direction.as_deref().map(parse_direction).transpose()?;
            if float {
                kuranishi_cmd::<C64>(&entry, *order, dir)?
            } else {
                kuranishi_cmd::<Q>(&entry, *order, dir)?
            }
        }
        Command::Extend { src, structure, order, metric, form, direction, closed } => {
            let entry = catalog::resolve(src).map_err(usage)?;
            let metric = match metric {
                Some(p) => catalog::parse_metric(&read_file(p)?).map_err(usage)?,
                None => entry.metric.clone(),
            };
            if metric.n() != entry.algebra.n() {
                return Err(usage("metric dimension does not match the algebra"));
            }
            let form = form.as_deref().map(|p| catalog::parse_form(&read_file(p)?).map_err(usage)).transpose()?;
            let dir = direction.as_deref().map(parse_direction).transpose()?;
            let closed = match closed {
                Closedness::D => ClosedKind::D,
                Closedness::Ddbar => ClosedKind::DdBar,
            };
            let job = ExtendJob { entry: &entry, metric, structure: *structure, order: *order, form, direction: dir, closed };
            if float {
                job.run::<C64>()?
            } else {
                job.run::<Q>()?
            }
        }
        Command::Positivity { src, form, p, samples, construct } => {
            exact_only("positivity")?;
            let omega = match (src, form) {
                (_, Some(path)) => catalog::parse_form(&read_file(path)?).map_err(usage)?,
                (Some(src), None) => {
                    let entry = catalog::resolve(src).map_err(usage)?;
                    let w = entry.omega();
                    (1..(*p).max(1)).fold(w.clone(), |acc, _| acc.wedge(&w))
                }
                (None, None) => return Err(usage("positivity needs an algebra or --form")),
            };
            let cfg = SampleConfig { count: *samples, seed: cli.seed, ..SampleConfig::default() };
            match construct {
                Some(kind) => construct_cmd(omega.n(), *p, *kind, cli.seed, &cfg)?,
                None => positivity(&omega, *p, &cfg)?,
            }
        }
        Command::Fuzz { src, identities, cases } => {
            let entry = catalog::resolve(src).map_err(usage)?;
            let which: Vec<IdentityId> = if identities == "all" {
                IdentityId::ALL.to_vec()
            } else {
                identities
                    .split(',')
                    .map(|k| IdentityId::from_key(k.trim()).ok_or_else(|| usage(format!("unknown identity `{k}`"))))
                    .collect::<Result<_, _>>()?
            };
            if float {
                fuzz_report::<C64>(&entry.algebra, &which, *cases, cli.seed)
            } else {
                fuzz_report::<Q>(&entry.algebra, &which, *cases, cli.seed)
            }
        }
        Command::Majorant { beta, gamma, order, against } => {
            exact_only("majorant")?;
            let params = MajorantParams::new(parse_rational(beta)?, parse_rational(gamma)?, *order).map_err(usage)?;
            let against = against.as_deref().map(|p| catalog::parse_series(&read_file(p)?).map_err(usage)).transpose()?;
            majorant_report(&params, against.as_deref())
        }
    };
    report.config("backend", if float { "float" } else { "exact" });
    Ok(report)
}

fn expected_fact(r: &mut Report, entry: &CatalogEntry, key: &str) -> Option<bool> {
    let kf = entry.expected(key)?;
    r.fact_with(&format!("expected.{key}"), json!(kf.fact.value()), kf.provenance);
    Some(kf.fact.value() == "true")
}

fn cohomology<S: Scalar>(
    entry: &CatalogEntry,
    theory: Theory,
    bidegree: Option<(usize, usize)>,
) -> Result<Report, UsageError> {
    let n = entry.algebra.n();
    let hodge: Hodge<S> = Hodge::new(&entry.algebra, &HermitianMetric::identity(n));
    let mut r = Report::new("cohomology", entry.name());
    r.config("theory", theory.key());
    let degrees: Vec<(usize, usize)> = match bidegree {
        Some((p, q)) if p > n || q > n => return Err(usage(format!("bidegree ({p},{q}) outside 0..={n}"))),
        Some(b) => vec![b],
        None => (0..=n).flat_map(|p| (0..=n).map(move |q| (p, q))).collect(),
    };
    for (p, q) in degrees {
        r.fact(&format!("h^{p},{q}"), json!(hodge.cohomology_dim(theory, p, q)));
    }
    Ok(r)
}

fn witness_json(w: &crate::lemmata::Witness) -> Value {
    let mut v = json!({"form": form_json(&w.form), "note": w.note});
    if let Some(s) = &w.source {
        v["source"] = form_json(s);
    }
    v
}

fn lemma(entry: &CatalogEntry, kind: LemmaKind, bidegree: Option<(usize, usize)>) -> Result<Report, UsageError> {
    let n = entry.algebra.n();
    if let Some((p, q)) = bidegree {
        if p > n || q > n {
            return Err(usage(format!("bidegree ({p},{q}) outside 0..={n}")));
        }
    }
    let v = Lemmata::new(&entry.algebra).check(kind, bidegree);
    let mut r = Report::new("lemma", entry.name());
    r.config("kind", kind.key()).config("bidegree", format!("{},{}", v.bidegree.0, v.bidegree.1));
    r.fact("holds", json!(v.holds)).fact("lift", json!(v.lift));
    if let Some(w) = &v.witness {
        r.fact("witness", witness_json(w));
    }
    if let Some(ok) = v.cross_check {
        r.check("cross-check", ok, "dimension count against subspace containment");
    }
    if bidegree.is_none() || kind == LemmaKind::Full {
        let key = format!("lemma.{}", kind.key());
        if let Some(want) = expected_fact(&mut r, entry, &key) {
            let prov = entry.expected(&key).map(|k| k.provenance).unwrap_or(Provenance::Derived);
            r.check_with("matches expected", want == v.holds, format!("expected holds={want}"), prov);
        }
    }
    Ok(r)
}

fn classify_cmd(entry: &CatalogEntry) -> Report {
    let c = classify(&entry.algebra);
    let mut r = Report::new("classify", entry.name());
    r.fact("classification", json!(c.key()));
    r.fact("nilpotent_filtration_length", json!(nilpotent_filtration_length(&entry.algebra)));
    if let Some(kf) = entry.expected("classification") {
        r.fact_with("expected.classification", json!(kf.fact.value()), kf.provenance);
        r.check_with("matches expected", kf.fact.value() == c.key(), "", kf.provenance);
    }
    r
}

fn vector_series_json<S: Scalar>(s: &BiSeries<VectorForm<S>>) -> Value {
    let map: serde_json::Map<String, Value> =
        s.coeffs().map(|((i, j), v)| (format!("t^{i} tbar^{j}"), vector_json(v))).collect();
    Value::Object(map)
}

fn family<S: Scalar>(hodge: &Hodge<S>, order: u32, direction: Option<Vec<Q>>) -> Result<Kuranishi<S>, UsageError> {
    let len = hodge.harmonic_beltrami_basis().len();
    let dir: Vec<S> = match direction {
        Some(d) => d.iter().map(S::from_gauss).collect(),
        None => vec![S::one(); len],
    };
    kuranishi(hodge, order, &dir).map_err(usage)
}

fn kuranishi_cmd<S: Scalar>(entry: &CatalogEntry, order: u32, direction: Option<Vec<Q>>) -> Result<Report, UsageError> {
    let hodge: Hodge<S> = Hodge::new(&entry.algebra, &entry.metric);
    let k = family(&hodge, order, direction)?;
    let mut r = Report::new("kuranishi", entry.name());
    r.config("order", order);
    r.fact("harmonic_basis_size", json!(k.basis.len()));
    r.fact("phi", vector_series_json(&k.phi));
    let obs: serde_json::Map<String, Value> =
        k.obstructions.iter().map(|(d, h)| (d.to_string(), vector_json(h))).collect();
    r.fact("obstructions", Value::Object(obs));
    r.fact("first_obstruction", json!(k.first_obstruction()));
    for (d, v) in fixed_point_residuals(&hodge, &k) {
        r.check(&format!("fixed-point[{d}]"), v.is_zero(), if v.is_zero() { String::new() } else { vector_json(&v).to_string() });
    }
    // The defect at order d vanishes as long as no obstruction appeared up to d.
    let clean_through = k.first_obstruction().map_or(order, |o| o - 1);
    for (d, v) in integrability_residuals(&entry.algebra, &k.phi) {
        if d <= clean_through {
            r.check(&format!("integrable[{d}]"), v.is_zero(), if v.is_zero() { String::new() } else { vector_json(&v).to_string() });
        }
    }
    Ok(r)
}

struct ExtendJob<'a> {
    entry: &'a CatalogEntry,
    metric: HermitianMetric,
    structure: Structure,
    order: u32,
    form: Option<Form<Q>>,
    direction: Option<Vec<Q>>,
    closed: ClosedKind,
}

fn outcome<S: Scalar>(r: &mut Report, e: &ExtensionError<S>) {
    match e {
        ExtensionError::Precondition(msg) => {
            r.fact("outcome", json!("precondition-failed")).fact("reason", json!(msg));
        }
        ExtensionError::Obstruction(h) => {
            r.fact("outcome", json!("obstructed")).fact(
                "obstruction",
                json!({"order": h.order, "equation": h.equation, "witness": form_json(&h.witness)}),
            );
        }
    }
}

impl ExtendJob<'_> {
    fn run<S: Scalar>(&self) -> Result<Report, UsageError> {
        let alg = &self.entry.algebra;
        let n = alg.n();
        let hodge: Hodge<S> = Hodge::new(alg, &self.metric);
        let k = family(&hodge, self.order, self.direction.clone())?;
        let omega0: Form<S> = self.form.clone().unwrap_or_else(|| self.metric.fundamental_form()).map(S::from_gauss);
        if omega0.n() != n {
            return Err(usage("form dimension does not match the algebra"));
        }
        let order = self.order;
        let mut r = Report::new("extend", self.entry.name());
        r.config("order", order);
        r.fact("initial", form_json(&omega0));
        r.fact("first_obstruction_of_phi", json!(k.first_obstruction()));
        match self.structure {
            Structure::Kahler => {
                r.config("structure", "kahler");
                expected_fact(&mut r, self.entry, "kahler");
                match extend_kahler(&hodge, &omega0, &k.phi, order) {
                    Ok(w) => {
                        r.fact("outcome", json!("extended")).fact("omega", series_json(&w));
                        r.check("real", w.is_real(), "");
                        verify_reduction(alg, &w, &k.phi, order).add_to(&mut r);
                        verify_extension_closed(alg, &w, &k.phi, order).add_to(&mut r);
                    }
                    Err(e) => outcome(&mut r, &e),
                }
            }
            Structure::Balanced => {
                r.config("structure", "balanced");
                expected_fact(&mut r, self.entry, "balanced");
                match extend_balanced(&hodge, &omega0, &k.phi, order) {
                    Ok(b) => {
                        r.fact("outcome", json!("extended")).fact("omega", series_json(&b.omega_real));
                        r.check("real", b.omega_real.is_real(), "");
                        let start = (1..n - 1).fold(omega0.clone(), |acc, _| acc.wedge(&omega0));
                        r.check("initial value", b.omega_real.coeff(0, 0) == start, "");
                        crate::deformation::balanced_system_residuals(alg, &b.omega_tilde, &k.phi, order).add_to(&mut r);
                        verify_projection(alg, &b.omega_real, &k.phi, order, ClosedKind::D).add_to(&mut r);
                    }
                    Err(e) => outcome(&mut r, &e),
                }
            }
            Structure::Dclosed => {
                r.config("structure", "dclosed");
                r.config("closed", if self.closed == ClosedKind::D { "d" } else { "ddbar" });
                match extend_dclosed_projection(&hodge, &omega0, &k.phi, order, self.closed) {
                    Ok(w) => {
                        r.fact("outcome", json!("extended")).fact("omega", series_json(&w));
                        r.check("initial value", w.coeff(0, 0) == omega0, "");
                        verify_projection(alg, &w, &k.phi, order, self.closed).add_to(&mut r);
                    }
                    Err(e) => outcome(&mut r, &e),
                }
            }
        }
        Ok(r)
    }
}

fn positivity(omega: &Form<Q>, p: usize, cfg: &SampleConfig) -> Result<Report, UsageError> {
    let rep = hermitian_rep(omega, p).map_err(usage)?;
    let mut r = positive_index_bound_check(omega, p, cfg).map_err(usage)?;
    r.subject = "form".into();
    r.fact("omega", form_json(omega));
    r.check("hermitian representation", rep.is_hermitian() && rep.reassemble() == *omega, "");
    Ok(r)
}

fn construct_cmd(n: usize, p: usize, kind: Construct, seed: u64, cfg: &SampleConfig) -> Result<Report, UsageError> {
    let kind = match kind {
        Construct::ExactIndex => ExtremalKind::ExactIndex,
        Construct::NegativeIndex => ExtremalKind::NegativeIndex,
    };
    let e = construct_extremal(n, p, kind, seed, cfg).map_err(usage)?;
    let mut r = extremal_report(&e, n, kind);
    r.config("samples", cfg.count);
    let canon = canonical_form(&e.omega, p, &HermitianMetric::identity(n)).map_err(usage)?;
    let q = n - p;
    let bound = crate::exterior::binomial(n, q) - pluecker_codim(n, q);
    r.fact("positive_index", json!(canon.positive_index())).fact("negative_index", json!(canon.negative_index()));
    r.check("transverse (sampled)", e.verdict.verdict == Verdict::Transverse, format!("margin {:e}", e.verdict.margin));
    match kind {
        ExtremalKind::ExactIndex => {
            r.check_with("positive index = N-k", canon.positive_index() == bound, "", Provenance::Paper);
        }
        ExtremalKind::NegativeIndex => {
            r.check("one negative eigenvalue", canon.negative_index() == 1, "");
        }
    }
    Ok(r)
}
