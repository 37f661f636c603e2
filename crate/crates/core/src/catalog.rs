//! Built-in example algebras and the structure-equation file format.
//!
//! A structure file looks like
//!
//! ```text
//! # Iwasawa
//! name=iwasawa
//! n=3
//! d w1 = 0
//! d w2 = 0
//! d w3 = (1/1+0/1i)*w1^w2
//! ```
//!
//! Terms are `±`-separated; a coefficient is a parenthesized Gaussian
//! rational, a plain rational, or omitted. `w~j` is the conjugate of `wj`.
//! Differentials of the conjugate generators are derived.

use std::fmt;
use std::path::Path;

use num_rational::BigRational;
use thiserror::Error;

use crate::calculus::{AlgebraError, LieAlgebra};
use crate::exterior::Form;
use crate::hodge::HermitianMetric;
use crate::lemmata::{classify, Classification, Classification as Cl, LemmaKind, Lemmata};
use crate::report::Provenance;
use crate::scalar::{Coeff, GaussRat as Q};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Invariant(#[from] AlgebraError),
    #[error("unknown algebra `{0}`")]
    UnknownName(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("self-check of `{name}` failed: {detail}")]
    SelfCheck { name: String, detail: String },
}

/// A fact about an entry that its self-check can recompute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactKind {
    Class(Classification),
    Lemma(LemmaKind, bool),
    /// `d(ω^{n−1}) = 0` for the entry's metric.
    Balanced(bool),
    /// `dω = 0` for the entry's metric.
    Kahler(bool),
}

impl FactKind {
    pub fn key(&self) -> String {
        match self {
            FactKind::Class(_) => "classification".into(),
            FactKind::Lemma(k, _) => format!("lemma.{}", k.key()),
            FactKind::Balanced(_) => "balanced".into(),
            FactKind::Kahler(_) => "kahler".into(),
        }
    }

    pub fn value(&self) -> String {
        match self {
            FactKind::Class(c) => c.key().into(),
            FactKind::Lemma(_, b) | FactKind::Balanced(b) | FactKind::Kahler(b) => b.to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnownFact {
    pub fact: FactKind,
    pub provenance: Provenance,
}

/// Outcome of recomputing one known fact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactCheck {
    pub expected: KnownFact,
    pub actual: FactKind,
}

impl FactCheck {
    pub fn agrees(&self) -> bool {
        self.expected.fact == self.actual
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub algebra: LieAlgebra,
    pub metric: HermitianMetric,
    pub facts: Vec<KnownFact>,
    /// Conventions and sources for the structure equations.
    pub note: String,
}

impl CatalogEntry {
    pub fn name(&self) -> &str {
        self.algebra.name()
    }

    /// The fundamental form of the entry's metric.
    pub fn omega(&self) -> Form<Q> {
        self.metric.fundamental_form()
    }

    /// Recompute every known fact.
    pub fn self_check(&self) -> Vec<FactCheck> {
        let lem = Lemmata::new(&self.algebra);
        let n = self.algebra.n();
        let omega = self.omega();
        self.facts
            .iter()
            .map(|kf| {
                let actual = match kf.fact {
                    FactKind::Class(_) => FactKind::Class(classify(&self.algebra)),
                    FactKind::Lemma(k, _) => FactKind::Lemma(k, lem.check(k, None).holds),
                    FactKind::Balanced(_) => {
                        let pow = (1..n - 1).fold(omega.clone(), |acc, _| acc.wedge(&omega));
                        FactKind::Balanced(self.algebra.d(&pow).is_zero())
                    }
                    FactKind::Kahler(_) => FactKind::Kahler(self.algebra.d(&omega).is_zero()),
                };
                FactCheck { expected: *kf, actual }
            })
            .collect()
    }

    pub fn expected(&self, key: &str) -> Option<KnownFact> {
        self.facts.iter().copied().find(|f| f.fact.key() == key)
    }
}

/// Names accepted by [`builtin`], with `torus_n` for `n = 1..=6` and
/// `i_lambda(a/b)` for any rational λ.
pub const BUILTIN_NAMES: &[&str] =
    &["torus_3", "iwasawa", "abelian_I0", "category_iii", "i_lambda", "kodaira_thurston", "nilpotent_4"];

fn f(n: usize, hol: &[usize], anti: &[usize], c: Q) -> Form<Q> {
    Form::from_indices(n, hol, anti, c)
}

fn fact(fact: FactKind, provenance: Provenance) -> KnownFact {
    KnownFact { fact, provenance }
}

/// Look up a built-in entry and run its self-check.
pub fn builtin(name: &str) -> Result<CatalogEntry, CatalogError> {
    let entry = builtin_unchecked(name)?;
    let bad: Vec<String> = entry
        .self_check()
        .into_iter()
        .filter(|c| !c.agrees())
        .map(|c| format!("{} expected {} got {}", c.expected.fact.key(), c.expected.fact.value(), c.actual.value()))
        .collect();
    if !bad.is_empty() {
        return Err(CatalogError::SelfCheck { name: name.into(), detail: bad.join("; ") });
    }
    Ok(entry)
}

/// Like [`builtin`] without recomputing the known facts.
pub fn builtin_unchecked(name: &str) -> Result<CatalogEntry, CatalogError> {
    use FactKind::*;
    use LemmaKind::*;
    use Provenance::*;
    let unknown = || CatalogError::UnknownName(name.to_string());
    let one = Q::one();

    if let Some(rest) = name.strip_prefix("torus_") {
        let n: usize = rest.parse().map_err(|_| unknown())?;
        if !(1..=6).contains(&n) {
            return Err(unknown());
        }
        let alg = LieAlgebra::new(name, n, vec![Form::zero(n); n])?;
        let mut facts = vec![fact(Class(Cl::Abelian), Derived), fact(Kahler(true), Derived)];
        if n >= 2 {
            facts.extend([Mild, DualMild, Weak, Strong].map(|k| fact(Lemma(k, true), Derived)));
        }
        return Ok(entry(alg, facts, "flat torus: all differentials vanish"));
    }
    if name == "i_lambda" || name.starts_with("i_lambda(") {
        let lambda = match name.strip_prefix("i_lambda(").and_then(|s| s.strip_suffix(')')) {
            Some(s) => s.parse::<Q>().map_err(|_| unknown())?,
            None if name == "i_lambda" => Q::ratio(1, 2),
            None => return Err(unknown()),
        };
        if !lambda.is_real() {
            return Err(unknown());
        }
        let n = 3;
        let d3 = f(n, &[0], &[1], one.clone()) + f(n, &[0, 1], &[], lambda.clone());
        let alg = LieAlgebra::new(&format!("i_lambda({})", rat_text(&lambda)), n, vec![Form::zero(n), Form::zero(n), d3])?;
        let mut facts = vec![fact(Balanced(true), External)];
        if !lambda.is_zero() {
            facts.push(fact(Class(Cl::Nilpotent), Derived));
            facts.push(fact(Lemma(Weak, false), External));
            facts.push(fact(Lemma(Mild, false), Derived));
            facts.push(fact(Lemma(DualMild, false), Derived));
            facts.push(fact(Lemma(Strong, false), Derived));
        }
        return Ok(entry(alg, facts, "dω³ = ω^{12̄} + λω^{12} on the Iwasawa real algebra; λ = 0 is abelian_I0"));
    }

    let e = match name {
        "iwasawa" => {
            let n = 3;
            let alg = LieAlgebra::new(name, n, vec![Form::zero(n), Form::zero(n), f(n, &[0, 1], &[], one)])?;
            entry(
                alg,
                vec![
                    fact(Class(Cl::ComplexParallelizable), Paper),
                    fact(Lemma(Mild, false), Paper),
                    fact(Lemma(DualMild, true), Paper),
                    fact(Lemma(Weak, true), Paper),
                    fact(Lemma(Strong, false), Derived),
                    fact(Balanced(true), Derived),
                    fact(Kahler(false), Derived),
                ],
                "dω³ = ω¹ ∧ ω²",
            )
        }
        "abelian_I0" => {
            let n = 3;
            let alg = LieAlgebra::new(name, n, vec![Form::zero(n), Form::zero(n), f(n, &[0], &[1], one)])?;
            entry(
                alg,
                vec![
                    fact(Class(Cl::Abelian), Paper),
                    fact(Lemma(Mild, true), Paper),
                    fact(Lemma(DualMild, false), Derived),
                    fact(Lemma(Weak, true), Derived),
                    fact(Lemma(Strong, false), Derived),
                    fact(Balanced(true), Paper),
                ],
                "dω³ = ω^{12̄}, the abelian structure on the Iwasawa real algebra",
            )
        }
        "category_iii" => {
            let n = 3;
            let d2 = f(n, &[0, 2], &[], one.clone()) + f(n, &[0], &[2], one.clone());
            let d3 = (f(n, &[0], &[1], one.clone()) - f(n, &[1], &[0], one)).scale(&Q::i());
            let alg = LieAlgebra::new(name, n, vec![Form::zero(n), d2, d3])?;
            entry(
                alg,
                vec![
                    fact(Class(Cl::NonNilpotent), Paper),
                    fact(Lemma(Mild, true), Paper),
                    fact(Lemma(DualMild, false), Paper),
                    fact(Lemma(Weak, true), Derived),
                    fact(Lemma(Strong, false), Paper),
                ],
                "dω² = ω^{13} + ω^{13̄}, dω³ = i(ω^{12̄} − ω^{21̄})",
            )
        }
        "kodaira_thurston" => {
            let n = 2;
            let alg = LieAlgebra::new(name, n, vec![Form::zero(n), f(n, &[0], &[0], one)])?;
            entry(
                alg,
                vec![
                    fact(Class(Cl::Abelian), Derived),
                    fact(Kahler(false), Derived),
                    fact(Lemma(Mild, true), Derived),
                    fact(Lemma(DualMild, false), Derived),
                    fact(Lemma(Weak, true), Derived),
                    fact(Lemma(Strong, false), Derived),
                ],
                "dω² = ω^{11̄}",
            )
        }
        "nilpotent_4" => {
            let n = 4;
            let d = vec![
                Form::zero(n),
                f(n, &[0], &[0], one.clone()),
                f(n, &[0, 1], &[], one.clone()),
                f(n, &[0, 2], &[], one.clone()) + f(n, &[1], &[0], one),
            ];
            let alg = LieAlgebra::new(name, n, d)?;
            let mut facts = vec![fact(Class(Cl::Nilpotent), Derived)];
            facts.extend([Mild, DualMild, Weak, Strong].map(|k| fact(Lemma(k, false), Derived)));
            entry(alg, facts, "four-step nilpotent test algebra")
        }
        _ => return Err(unknown()),
    };
    Ok(e)
}

fn entry(algebra: LieAlgebra, facts: Vec<KnownFact>, note: &str) -> CatalogEntry {
    let metric = HermitianMetric::identity(algebra.n());
    CatalogEntry { algebra, metric, facts, note: note.to_string() }
}

fn rat_text(q: &Q) -> String {
    let r = &q.re;
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A built-in name or a path to a structure file.
pub fn resolve(src: &str) -> Result<CatalogEntry, CatalogError> {
    match builtin(src) {
        Err(CatalogError::UnknownName(_)) if Path::new(src).exists() => {
            let alg = load(Path::new(src))?;
            let metric = HermitianMetric::identity(alg.n());
            Ok(CatalogEntry { algebra: alg, metric, facts: Vec::new(), note: format!("loaded from {src}") })
        }
        other => other,
    }
}

pub fn load(path: &Path) -> Result<LieAlgebra, CatalogError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CatalogError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse(&text)
}

/// Parse a structure file.
pub fn parse(text: &str) -> Result<LieAlgebra, CatalogError> {
    let mut name: Option<String> = None;
    let mut n: Option<usize> = None;
    let mut d: Vec<Option<Form<Q>>> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let col0 = content.len() - content.trim_start().len() + 1;
        let t = content.trim();
        let err = |column: usize, message: String| CatalogError::Parse { line, column, message };
        if let Some(v) = t.strip_prefix("name=") {
            name = Some(v.trim().to_string());
        } else if let Some(v) = t.strip_prefix("n=") {
            let k: usize = v.trim().parse().map_err(|_| err(col0 + 2, format!("invalid dimension `{}`", v.trim())))?;
            if !(1..=6).contains(&k) {
                return Err(err(col0 + 2, format!("dimension {k} outside 1..=6")));
            }
            n = Some(k);
            d = vec![None; k];
        } else if t.starts_with('d') {
            let Some(dim) = n else {
                return Err(err(col0, "`n=` must precede the structure equations".into()));
            };
            let mut p = Parser { chars: content.chars().collect(), pos: col0 - 1, line, n: dim };
            p.expect('d')?;
            let (g, conj) = p.generator()?;
            if conj {
                return Err(p.error("differentials of conjugate generators are derived, not stated"));
            }
            p.expect('=')?;
            let form = p.poly()?;
            p.skip_ws();
            if p.pos < p.chars.len() {
                return Err(p.error(&format!("unexpected `{}`", p.chars[p.pos])));
            }
            if d[g].is_some() {
                return Err(err(col0, format!("d w{} given twice", g + 1)));
            }
            d[g] = Some(form);
        } else {
            return Err(err(col0, format!("unrecognized line `{t}`")));
        }
    }
    let name = name.ok_or(CatalogError::Parse { line: 1, column: 1, message: "missing `name=`".into() })?;
    let n = n.ok_or(CatalogError::Parse { line: 1, column: 1, message: "missing `n=`".into() })?;
    let mut forms = Vec::with_capacity(n);
    for (k, f) in d.into_iter().enumerate() {
        forms.push(f.ok_or_else(|| CatalogError::Parse {
            line: text.lines().count().max(1),
            column: 1,
            message: format!("missing equation for d w{}", k + 1),
        })?);
    }
    Ok(LieAlgebra::new(&name, n, forms)?)
}

/// Parse a form file: `n=<int>` followed by polynomial lines in the
/// structure-file syntax, which are summed.
///
/// ```text
/// n=3
/// i*w1^w~1 + i*w2^w~2
/// ```
pub fn parse_form(text: &str) -> Result<Form<Q>, CatalogError> {
    let mut n: Option<usize> = None;
    let mut out: Option<Form<Q>> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let t = content.trim();
        if t.is_empty() {
            continue;
        }
        let col0 = content.len() - content.trim_start().len() + 1;
        if let Some(v) = t.strip_prefix("n=") {
            let k: usize = v.trim().parse().ok().filter(|k| (1..=6).contains(k)).ok_or(CatalogError::Parse {
                line,
                column: col0 + 2,
                message: format!("invalid dimension `{}`", v.trim()),
            })?;
            n = Some(k);
            out = Some(Form::zero(k));
            continue;
        }
        let Some(dim) = n else {
            return Err(CatalogError::Parse { line, column: col0, message: "`n=` must come first".into() });
        };
        let mut p = Parser { chars: content.chars().collect(), pos: col0 - 1, line, n: dim };
        let f = p.poly()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error(&format!("unexpected `{}`", p.chars[p.pos])));
        }
        out = out.map(|acc| acc + f);
    }
    out.ok_or(CatalogError::Parse { line: 1, column: 1, message: "missing `n=`".into() })
}

/// Parse a metric file: `n` rows of `n` whitespace-separated Gaussian
/// rationals, the Gram matrix `⟨dz^k, dz^l⟩` of the coframe.
pub fn parse_metric(text: &str) -> Result<HermitianMetric, CatalogError> {
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let row = content
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Q>().map_err(|_| CatalogError::Parse {
                    line: ln + 1,
                    column: content.find(tok).unwrap_or(0) + 1,
                    message: format!("invalid entry `{tok}`"),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CatalogError::Parse { line: 1, column: 1, message: "metric must be a square matrix".into() });
    }
    HermitianMetric::new(crate::linalg::Matrix::from_rows(rows))
        .map_err(|e| CatalogError::Parse { line: 1, column: 1, message: e.to_string() })
}

/// Parse a coefficient list: one nonnegative rational per line, degree 0
/// first.
pub fn parse_series(text: &str) -> Result<Vec<BigRational>, CatalogError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let t = raw.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        let q: Q = t.parse().map_err(|_| CatalogError::Parse {
            line: ln + 1,
            column: 1,
            message: format!("invalid coefficient `{t}`"),
        })?;
        if !q.is_real() {
            return Err(CatalogError::Parse { line: ln + 1, column: 1, message: "coefficients must be real".into() });
        }
        out.push(q.re);
    }
    Ok(out)
}

/// Read a file for one of the parsers above.
pub fn read(path: &Path) -> Result<String, CatalogError> {
    std::fs::read_to_string(path).map_err(|e| CatalogError::Io { path: path.display().to_string(), message: e.to_string() })
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    n: usize,
}

impl Parser {
    fn error(&self, message: &str) -> CatalogError {
        CatalogError::Parse { line: self.line, column: self.pos + 1, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), CatalogError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    /// `w<k>` or `w~<k>`; returns the 0-based index and conjugation flag.
    fn generator(&mut self) -> Result<(usize, bool), CatalogError> {
        self.expect('w')?;
        let conj = self.chars.get(self.pos) == Some(&'~');
        if conj {
            self.pos += 1;
        }
        let at = self.pos;
        let k: usize = self.digits().parse().map_err(|_| self.error("expected generator index"))?;
        if k == 0 || k > self.n {
            self.pos = at;
            return Err(self.error(&format!("generator index {k} outside 1..={}", self.n)));
        }
        Ok((k - 1, conj))
    }

    fn coefficient(&mut self) -> Result<Q, CatalogError> {
        let start = self.pos;
        let text: String = if self.chars[self.pos] == '(' {
            let close = self.chars[self.pos..]
                .iter()
                .position(|&c| c == ')')
                .ok_or_else(|| self.error("unclosed `(`"))?;
            self.pos += close + 1;
            self.chars[start..self.pos].iter().collect()
        } else {
            let mut s = self.digits();
            if self.chars.get(self.pos) == Some(&'/') {
                self.pos += 1;
                s.push('/');
                s.push_str(&self.digits());
            }
            if self.chars.get(self.pos) == Some(&'i') {
                self.pos += 1;
                s.push('i');
            }
            s
        };
        text.parse().map_err(|_| {
            self.pos = start;
            self.error(&format!("invalid coefficient `{text}`"))
        })
    }

    fn term(&mut self) -> Result<Form<Q>, CatalogError> {
        let n = self.n;
        let mut coeff = Q::one();
        match self.peek() {
            Some('w') => {}
            Some(c) if c == '(' || c.is_ascii_digit() || c == 'i' => {
                coeff = self.coefficient()?;
                if self.peek() != Some('*') {
                    return Ok(Form::constant(n, coeff));
                }
                self.pos += 1;
            }
            _ => return Err(self.error("expected a term")),
        }
        let mut form = Form::constant(n, coeff);
        loop {
            let (g, conj) = self.generator()?;
            let gen = if conj { Form::dzb(n, g) } else { Form::dz(n, g) };
            form = form.wedge(&gen);
            if self.peek() == Some('^') {
                self.pos += 1;
            } else {
                return Ok(form);
            }
        }
    }

    fn poly(&mut self) -> Result<Form<Q>, CatalogError> {
        let n = self.n;
        self.skip_ws();
        let rest: String = self.chars[self.pos..].iter().collect();
        if rest.trim() == "0" {
            self.pos = self.chars.len();
            return Ok(Form::zero(n));
        }
        let mut out = Form::zero(n);
        let mut sign = 1;
        if let Some(c @ ('+' | '-')) = self.peek() {
            sign = if c == '-' { -1 } else { 1 };
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            out = if sign < 0 { out - t } else { out + t };
            match self.peek() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => return Ok(out),
            }
            self.pos += 1;
        }
    }
}

fn coeff_text(c: &Q) -> String {
    let (re, im) = (&c.re, &c.im);
    let sign = if im < &num_rational::BigRational::from_integer(0.into()) { '-' } else { '+' };
    let im_abs = if sign == '-' { -im } else { im.clone() };
    format!("({}/{}{}{}/{}i)", re.numer(), re.denom(), sign, im_abs.numer(), im_abs.denom())
}

fn mono_text(n: usize, m: &crate::exterior::Mono) -> String {
    m.generators(n)
        .into_iter()
        .map(|g| if g < n { format!("w{}", g + 1) } else { format!("w~{}", g - n + 1) })
        .collect::<Vec<_>>()
        .join("^")
}

/// Emit a structure file that [`parse`] reads back to the same algebra.
pub fn emit(alg: &LieAlgebra) -> String {
    let n = alg.n();
    let mut s = format!("name={}\nn={}\n", alg.name(), n);
    for (k, f) in alg.d_table().iter().enumerate() {
        let body = if f.is_zero() {
            "0".to_string()
        } else {
            f.terms().map(|(m, c)| format!("{}*{}", coeff_text(c), mono_text(n, m))).collect::<Vec<_>>().join(" + ")
        };
        s.push_str(&format!("d w{} = {}\n", k + 1, body));
    }
    s
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n={}): {}", self.name(), self.algebra.n(), self.note)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iwasawa_file_matches_builtin() {
        let text = "# Iwasawa\nname=iwasawa\nn=3\nd w1 = 0\nd w2 = 0\nd w3 = (1/1+0/1i)*w1^w2\n";
        let alg = parse(text).unwrap();
        let b = builtin_unchecked("iwasawa").unwrap();
        assert!(alg.same_structure(&b.algebra));
        assert!(parse(&emit(&alg)).unwrap().same_structure(&alg));
    }

    #[test]
    fn emit_round_trips_every_builtin() {
        for name in BUILTIN_NAMES {
            let e = builtin_unchecked(name).unwrap();
            let back = parse(&emit(&e.algebra)).unwrap();
            assert!(back.same_structure(&e.algebra), "{name}");
            assert_eq!(back.name(), e.name());
        }
    }

    #[test]
    fn integrability_is_enforced() {
        let text = "name=bad\nn=3\nd w1 = w~1^w~2\nd w2 = 0\nd w3 = 0\n";
        match parse(text) {
            Err(CatalogError::Invariant(AlgebraError::InvariantViolation { check, .. })) => {
                assert_eq!(check, "integrability")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let text = "name=x\nn=2\nd w1 = 0\nd w2 = 2*w1^w7\n";
        match parse(text) {
            Err(CatalogError::Parse { line, column, .. }) => assert_eq!((line, column), (4, 14)),
            other => panic!("{other:?}"),
        }
        let signed = parse("name=y\nn=3\nd w1 = 0\nd w2 = 0\nd w3 = -1/2*w1^w~2 + i*w2^w~1\n").unwrap();
        let want = Form::from_indices(3, &[0], &[1], Q::ratio(-1, 2)) + Form::from_indices(3, &[1], &[0], Q::i());
        assert_eq!(signed.d_gen(2), want);
    }

    #[test]
    fn builtins_pass_self_check() {
        for name in BUILTIN_NAMES.iter().chain(&["torus_2", "i_lambda(0)", "i_lambda(-3/2)"]) {
            builtin(name).unwrap();
        }
    }

    #[test]
    fn form_metric_and_series_files() {
        let f = parse_form("n=3\n# comment\ni*w1^w~1\n+ 1/2*w2^w~2 - w3^w~3\n").unwrap();
        let want = Form::from_indices(3, &[0], &[0], Q::i()) + Form::from_indices(3, &[1], &[1], Q::ratio(1, 2))
            - Form::from_indices(3, &[2], &[2], Q::one());
        assert_eq!(f, want);
        assert!(parse_form("i*w1^w~1\n").is_err());
        let m = parse_metric("2 i\n-i 2\n").unwrap();
        assert_eq!(m.n(), 2);
        assert!(parse_metric("1 2\n2 1\n").is_err());
        let s = parse_series("0\n1/16\n1/64\n").unwrap();
        assert_eq!(s[2], BigRational::new(1.into(), 64.into()));
        assert!(parse_series("1+i\n").is_err());
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(builtin("torus_9"), Err(CatalogError::UnknownName(_))));
        assert!(matches!(builtin("nope"), Err(CatalogError::UnknownName(_))));
        assert_eq!(builtin_unchecked("i_lambda(2)").unwrap().name(), "i_lambda(2)");
    }
}
