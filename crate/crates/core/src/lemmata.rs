//! The `(n−1,n)` family of ∂∂̄-lemmata, the full ∂∂̄-lemma at a bidegree,
//! and the classification of invariant complex structures.
//!
//! All checks are rank computations on the exact Lie-algebra complex.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::calculus::LieAlgebra;
use crate::exterior::{basis, Form};
use crate::hodge::{HermitianMetric, Hodge, Op, Space, Theory};
use crate::linalg::{self, Matrix};
use crate::scalar::{Coeff, GaussRat, Scalar};

type Q = GaussRat;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, PartialOrd, Ord)]
pub enum LemmaKind {
    Mild,
    DualMild,
    Weak,
    Strong,
    Full,
}

impl LemmaKind {
    pub const ALL: [LemmaKind; 5] =
        [LemmaKind::Mild, LemmaKind::DualMild, LemmaKind::Weak, LemmaKind::Strong, LemmaKind::Full];

    pub fn key(&self) -> &'static str {
        match self {
            LemmaKind::Mild => "mild",
            LemmaKind::DualMild => "dual-mild",
            LemmaKind::Weak => "weak",
            LemmaKind::Strong => "strong",
            LemmaKind::Full => "full",
        }
    }
}

impl fmt::Display for LemmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for LemmaKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        LemmaKind::ALL
            .into_iter()
            .find(|k| k.key() == s)
            .ok_or_else(|| format!("unknown lemma kind `{s}`"))
    }
}

/// A form violating the lemma, with the form it came from when relevant
/// (e.g. `Γ = ∂θ`).
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub source: Option<Form<Q>>,
    pub form: Form<Q>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaVerdict {
    pub kind: LemmaKind,
    pub bidegree: (usize, usize),
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Whether the independent second computation agreed (dimension count
    /// vs. subspace containment); `None` when there is no second route.
    pub cross_check: Option<bool>,
    /// What is needed to transfer the verdict to the nilmanifold.
    pub lift: &'static str,
}

/// Lemma checks for one algebra; wraps a cached operator factory.
pub struct Lemmata {
    hodge: Hodge<Q>,
}

fn to_form(n: usize, s: Space, v: &[Q]) -> Form<Q> {
    let (p, q) = s.bidegree();
    Form::from_vector(n, p as usize, q as usize, v)
}

fn image(m: &Matrix<Q>) -> Vec<Vec<Q>> {
    if m.rows() == 0 || m.cols() == 0 {
        Vec::new()
    } else {
        m.image()
    }
}

fn kernel(m: &Matrix<Q>) -> Vec<Vec<Q>> {
    if m.cols() == 0 {
        Vec::new()
    } else if m.rows() == 0 {
        (0..m.cols())
            .map(|i| {
                let mut v = vec![Q::zero(); m.cols()];
                v[i] = Q::one();
                v
            })
            .collect()
    } else {
        m.kernel()
    }
}

impl Lemmata {
    pub fn new(alg: &LieAlgebra) -> Self {
        Lemmata { hodge: Hodge::new(alg, &HermitianMetric::identity(alg.n())) }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.hodge.algebra()
    }

    fn n(&self) -> usize {
        self.hodge.n()
    }

    pub fn cohomology_dim(&self, theory: Theory, p: usize, q: usize) -> usize {
        self.hodge.cohomology_dim(theory, p, q)
    }

    /// `Im ∂∂̄` inside `Λ^{p,q}`.
    fn im_ddbar(&self, p: usize, q: usize) -> Vec<Vec<Q>> {
        if p == 0 || q == 0 {
            return Vec::new();
        }
        image(&self.hodge.ddbar(Space::forms(p - 1, q - 1)).mat)
    }

    /// First vector of `sub` outside `span(space)`.
    fn first_outside(&self, dim: usize, sub: &[Vec<Q>], space: &[Vec<Q>]) -> Option<usize> {
        (0..sub.len()).find(|&i| !linalg::contained_in(dim, &sub[i..=i], space))
    }

    /// `(n−1,n)` mild lemma: `∂(Λ^{n−2,n}) ⊆ ∂∂̄(Λ^{n−2,n−1})`.
    pub fn check_mild(&self) -> LemmaVerdict {
        let n = self.n();
        let (p, q) = (n - 1, n);
        let target = Space::forms(p, q);
        let dim = self.hodge.dim(target);
        let im_dd = self.im_ddbar(p, q);
        let mut witness = None;
        if n >= 2 {
            let src = Space::forms(n - 2, n);
            let del = self.hodge.op(Op::Del, src).mat;
            // Scan the monomial basis so witnesses are readable.
            for (j, mono) in basis(n, n - 2, n).iter().enumerate() {
                let col = del.col(j);
                if col.iter().all(Coeff::is_zero) {
                    continue;
                }
                if !linalg::contained_in(dim, std::slice::from_ref(&col), &im_dd) {
                    witness = Some(Witness {
                        source: Some(Form::monomial(n, *mono, Q::one())),
                        form: to_form(n, target, &col),
                        note: "∂θ is not ∂∂̄-exact".into(),
                    });
                    break;
                }
            }
        }
        let holds = witness.is_none();
        let dims_equal = self.cohomology_dim(Theory::BottChern, p, q) == self.cohomology_dim(Theory::Del, p, q);
        LemmaVerdict {
            kind: LemmaKind::Mild,
            bidegree: (p, q),
            holds,
            witness,
            cross_check: Some(dims_equal == holds),
            lift: if holds {
                "holds on the nilmanifold if H^{n-2,n}_dbar(M) is isomorphic to the invariant H^{n-2,n}_dbar"
            } else {
                "fails on the nilmanifold unconditionally"
            },
        }
    }

    /// `(n−1,n)` dual mild lemma: `ker∂ ∩ Im∂̄ ⊆ Im∂∂̄` at `(n−1,n)`.
    pub fn check_dual_mild(&self) -> LemmaVerdict {
        let n = self.n();
        let (p, q) = (n - 1, n);
        let target = Space::forms(p, q);
        let dim = self.hodge.dim(target);
        let ker_del = kernel(&self.hodge.op(Op::Del, target).mat);
        let im_dbar = image(&self.hodge.op(Op::Dbar, Space::forms(p, q - 1)).mat);
        let inter = linalg::intersect(dim, &ker_del, &im_dbar);
        let im_dd = self.im_ddbar(p, q);
        let witness = self.first_outside(dim, &inter, &im_dd).map(|i| Witness {
            source: None,
            form: to_form(n, target, &inter[i]),
            note: "∂-closed and ∂̄-exact but not ∂∂̄-exact".into(),
        });
        let holds = witness.is_none();
        // Im∂∂̄ ⊆ ker∂ ∩ Im∂̄ always, so injectivity is a dimension count.
        let dims_equal = inter.len() == im_dd.len();
        LemmaVerdict {
            kind: LemmaKind::DualMild,
            bidegree: (p, q),
            holds,
            witness,
            cross_check: Some(dims_equal == holds),
            lift: if holds {
                "holds on the nilmanifold if H^{n-1,n}_BC(M) is isomorphic to the invariant H^{n-1,n}_BC"
            } else {
                "fails on the nilmanifold unconditionally"
            },
        }
    }

    /// `(n−1,n)` weak lemma over the reals: for every real `(n−1,n−1)`-form
    /// `ψ` with `∂̄ψ ∈ Im∂`, `∂̄ψ ∈ Im∂∂̄`.
    pub fn check_weak(&self) -> LemmaVerdict {
        let n = self.n();
        let (p, q) = (n - 1, n - 1);
        let src = Space::forms(p, q);
        let d = self.hodge.dim(src);
        let target = Space::forms(p, q + 1);
        let dt = self.hodge.dim(target);
        let dbar = self.hodge.op(Op::Dbar, src).mat;
        // Left annihilator of Im ∂ in Λ^{n-1,n}: v ∈ Im∂ iff N v = 0.
        let im_del = image(&self.hodge.op(Op::Del, Space::forms(p - 1, q + 1)).mat);
        let ann: Vec<Vec<Q>> = if im_del.is_empty() {
            (0..dt)
                .map(|i| {
                    let mut v = vec![Q::zero(); dt];
                    v[i] = Q::one();
                    v
                })
                .collect()
        } else {
            kernel(&Matrix::from_cols(dt, &im_del).transpose())
        };
        let cond = if ann.is_empty() {
            Matrix::zeros(0, d)
        } else {
            &Matrix::from_rows(ann) * &dbar
        };
        // Reality: conj(ψ) = ψ with conj(v) = S·v̄ for a signed permutation S.
        let s = conj_matrix(n, p, q);
        let real_cond = realify(&cond).vstack(&realify_conj_minus_id(&s));
        let w = kernel(&real_cond);
        let im_dd = self.im_ddbar(p, q + 1);
        let mut witness = None;
        for xy in &w {
            let v: Vec<Q> = (0..d).map(|i| xy[i].add(&xy[d + i].mul(&Q::i()))).collect();
            let img = dbar.apply(&v);
            if !linalg::contained_in(dt, std::slice::from_ref(&img), &im_dd) {
                witness = Some(Witness {
                    source: Some(to_form(n, src, &v)),
                    form: to_form(n, target, &img),
                    note: "real ψ with ∂̄ψ ∂-exact but not ∂∂̄-exact".into(),
                });
                break;
            }
        }
        LemmaVerdict {
            kind: LemmaKind::Weak,
            bidegree: (n - 1, n),
            holds: witness.is_none(),
            witness,
            cross_check: None,
            lift: "invariant level only",
        }
    }

    /// `(n−1,n)` strong lemma: `H_BC → H_A` injective at `(n−1,n)`, decided by
    /// dimension equality and cross-checked against mild ∧ dual mild.
    pub fn check_strong(&self) -> LemmaVerdict {
        let n = self.n();
        let (p, q) = (n - 1, n);
        let holds = self.cohomology_dim(Theory::BottChern, p, q) == self.cohomology_dim(Theory::Aeppli, p, q);
        let mild = self.check_mild();
        let dual = self.check_dual_mild();
        let witness = if holds { None } else { mild.witness.or(dual.witness) };
        LemmaVerdict {
            kind: LemmaKind::Strong,
            bidegree: (p, q),
            holds,
            witness,
            cross_check: Some(holds == (mild.holds && dual.holds)),
            lift: "transfers when both the mild and dual mild verdicts transfer",
        }
    }

    /// Full ∂∂̄-lemma at `(p,q)`: `ker∂ ∩ ker∂̄ ∩ (Im∂ + Im∂̄) ⊆ Im∂∂̄`.
    pub fn check_full(&self, p: usize, q: usize) -> LemmaVerdict {
        let n = self.n();
        let s = Space::forms(p, q);
        let dim = self.hodge.dim(s);
        let stacked = self.hodge.op(Op::Del, s).mat.vstack(&self.hodge.op(Op::Dbar, s).mat);
        let closed = kernel(&stacked);
        let im_del = if p == 0 { Vec::new() } else { image(&self.hodge.op(Op::Del, Space::forms(p - 1, q)).mat) };
        let im_dbar = if q == 0 { Vec::new() } else { image(&self.hodge.op(Op::Dbar, Space::forms(p, q - 1)).mat) };
        let exact = linalg::span_sum(dim, &im_del, &im_dbar);
        let inter = linalg::intersect(dim, &closed, &exact);
        let im_dd = self.im_ddbar(p, q);
        let witness = self.first_outside(dim, &inter, &im_dd).map(|i| Witness {
            source: None,
            form: to_form(n, s, &inter[i]),
            note: "d-closed, ∂- or ∂̄-exact, not ∂∂̄-exact".into(),
        });
        LemmaVerdict {
            kind: LemmaKind::Full,
            bidegree: (p, q),
            holds: witness.is_none(),
            witness,
            cross_check: None,
            lift: "invariant level only",
        }
    }

    pub fn check(&self, kind: LemmaKind, bidegree: Option<(usize, usize)>) -> LemmaVerdict {
        match kind {
            LemmaKind::Mild => self.check_mild(),
            LemmaKind::DualMild => self.check_dual_mild(),
            LemmaKind::Weak => self.check_weak(),
            LemmaKind::Strong => self.check_strong(),
            LemmaKind::Full => {
                let (p, q) = bidegree.unwrap_or((self.n() - 1, self.n()));
                self.check_full(p, q)
            }
        }
    }
}

/// Matrix `S` with `conj(Σ v_a e_a) = Σ (S v̄)_a e_a` on `Λ^{p,p}`.
fn conj_matrix(n: usize, p: usize, q: usize) -> Matrix<Q> {
    assert_eq!(p, q, "reality only makes sense in bidegree (p,p)");
    let b = basis(n, p, q);
    let mut s = Matrix::zeros(b.len(), b.len());
    for (j, m) in b.iter().enumerate() {
        let img = Form::monomial(n, *m, Q::one()).conj().to_vector(p, q);
        for (i, c) in img.into_iter().enumerate() {
            s.set(i, j, c);
        }
    }
    s
}

/// Real form of a complex-linear map on `(x, y)` with `v = x + iy`.
fn realify(a: &Matrix<Q>) -> Matrix<Q> {
    let (r, c) = (a.rows(), a.cols());
    let mut m = Matrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = a.get(i, j);
            let (re, im) = (Scalar::re(z), Scalar::im(z));
            m.set(i, j, re.clone());
            m.set(i, c + j, im.neg());
            m.set(r + i, j, im);
            m.set(r + i, c + j, re);
        }
    }
    m
}

/// Real form of `v ↦ S v̄ − v` for a real matrix `S`.
fn realify_conj_minus_id(s: &Matrix<Q>) -> Matrix<Q> {
    let d = s.rows();
    let mut m = Matrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let v = s.get(i, j).clone();
            let id = if i == j { Q::one() } else { Q::zero() };
            m.set(i, j, v.sub(&id));
            m.set(d + i, d + j, v.neg().sub(&id));
        }
    }
    m
}

/// Classes of invariant complex structures, in the order they are tested.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Classification {
    Abelian,
    ComplexParallelizable,
    Nilpotent,
    NonNilpotent,
}

impl Classification {
    pub fn key(&self) -> &'static str {
        match self {
            Classification::Abelian => "abelian",
            Classification::ComplexParallelizable => "complex_parallelizable",
            Classification::Nilpotent => "nilpotent",
            Classification::NonNilpotent => "non_nilpotent",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Abelian and complex-parallelizable by containment of `d𝔤^{1,0}`;
/// nilpotent when the ascending filtration
/// `W_{k+1} = {α ∈ 𝔤^{1,0}* : dα ∈ Λ²(W_k ⊕ W̄_k)}` exhausts `𝔤^{1,0}*`.
pub fn classify(alg: &LieAlgebra) -> Classification {
    if alg.is_abelian_structure() {
        Classification::Abelian
    } else if alg.is_complex_parallelizable() {
        Classification::ComplexParallelizable
    } else if is_nilpotent_structure(alg) {
        Classification::Nilpotent
    } else {
        Classification::NonNilpotent
    }
}

/// The filtration test behind [`classify`]; returns the length of the
/// filtration when it exhausts the `(1,0)`-forms.
pub fn nilpotent_filtration_length(alg: &LieAlgebra) -> Option<usize> {
    let n = alg.n();
    // 2-forms in the basis of all degree-2 monomials.
    let two: Vec<_> = (0..=2).flat_map(|p| basis(n, p, 2 - p)).collect();
    let coords = |f: &Form<Q>| -> Vec<Q> { two.iter().map(|m| f.coeff(m)).collect() };
    let d_cols: Vec<Vec<Q>> = (0..n).map(|k| coords(&alg.d_gen(k))).collect();
    let d_mat = Matrix::from_cols(two.len(), &d_cols);
    let mut w: Vec<Vec<Q>> = Vec::new();
    for step in 1..=n + 1 {
        // Span of the 1-forms in W ⊕ W̄, then all wedges of pairs.
        let ones: Vec<Form<Q>> = w
            .iter()
            .flat_map(|v| {
                let f: Form<Q> = (0..n).fold(Form::zero(n), |acc, k| acc + Form::dz(n, k).scale(&v[k]));
                [f.clone(), f.conj()]
            })
            .collect();
        let mut wedges = Vec::new();
        for i in 0..ones.len() {
            for j in i + 1..ones.len() {
                let c = coords(&ones[i].wedge(&ones[j]));
                if c.iter().any(|x| !x.is_zero()) {
                    wedges.push(c);
                }
            }
        }
        // α = Σ a_k ω^k with dα ∈ span(wedges): solve [D | −wedges] (a, b) = 0.
        let m = if wedges.is_empty() { d_mat.clone() } else { d_mat.hstack(&-&Matrix::from_cols(two.len(), &wedges)) };
        let next: Vec<Vec<Q>> = kernel(&m).into_iter().map(|v| v[..n].to_vec()).collect();
        let next = if next.is_empty() { next } else { Matrix::from_cols(n, &next).image() };
        if next.len() == n {
            return Some(step);
        }
        if next.len() == w.len() {
            return None;
        }
        w = next;
    }
    None
}

pub fn is_nilpotent_structure(alg: &LieAlgebra) -> bool {
    nilpotent_filtration_length(alg).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(name: &str, d: Vec<Form<Q>>) -> LieAlgebra {
        LieAlgebra::new(name, 3, d).unwrap()
    }

    #[test]
    fn iwasawa_mild_witness() {
        let n = 3;
        let a = alg("iwasawa", vec![Form::zero(n), Form::zero(n), Form::from_indices(n, &[0, 1], &[], Q::one())]);
        let v = Lemmata::new(&a).check_mild();
        assert!(!v.holds);
        assert_eq!(v.cross_check, Some(true));
        let w = v.witness.unwrap();
        assert_eq!(w.source.unwrap(), Form::from_indices(n, &[2], &[0, 1, 2], Q::one()));
        assert_eq!(w.form, Form::from_indices(n, &[0, 1], &[0, 1, 2], Q::one()));
        assert_eq!(classify(&a), Classification::ComplexParallelizable);
    }

    #[test]
    fn torus_everything_holds() {
        let n = 3;
        let a = alg("torus", vec![Form::zero(n); 3]);
        let l = Lemmata::new(&a);
        for k in LemmaKind::ALL {
            assert!(l.check(k, None).holds, "{k}");
        }
        assert_eq!(classify(&a), Classification::Abelian);
    }

    #[test]
    fn non_nilpotent_filtration_stalls() {
        let n = 3;
        let f = |h: &[usize], a: &[usize], c: Q| Form::from_indices(n, h, a, c);
        let a = alg(
            "iii",
            vec![
                Form::zero(n),
                f(&[0, 2], &[], Q::one()) + f(&[0], &[2], Q::one()),
                (f(&[0], &[1], Q::one()) - f(&[1], &[0], Q::one())).scale(&Q::i()),
            ],
        );
        assert_eq!(classify(&a), Classification::NonNilpotent);
    }
}
