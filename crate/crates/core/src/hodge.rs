//! Metric-dependent operators on the finite-dimensional Dolbeault complex:
//! adjoints, Laplacians, harmonic projections, Green operators, minimal
//! solutions of `∂̄x = y` and `∂∂̄x = y`, and cohomology dimensions.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::calculus::{dbar_vec, Diff, LieAlgebra};
use crate::exterior::{basis, bits, binomial, Form, Mono, VectorForm};
use crate::linalg::{self, Matrix};
use crate::random::{self, FuzzRng};
use crate::scalar::{Coeff, GaussRat, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HodgeError {
    #[error("metric is not hermitian positive-definite: {0}")]
    NotPositive(String),
    #[error("unknown {what}: {name}")]
    Unknown { what: &'static str, name: String },
}

/// A hermitian metric, stored as the Gram matrix `g[k][l] = ⟨dz^k, dz^l⟩`
/// of the `(1,0)`-coframe.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMetric {
    n: usize,
    g: Matrix<GaussRat>,
}

impl HermitianMetric {
    /// The metric making the declared coframe orthonormal.
    pub fn identity(n: usize) -> Self {
        HermitianMetric { n, g: Matrix::identity(n) }
    }

    pub fn new(g: Matrix<GaussRat>) -> Result<Self, HodgeError> {
        if !g.is_square() || !g.is_hermitian() {
            return Err(HodgeError::NotPositive("matrix is not hermitian".into()));
        }
        let n = g.rows();
        // Sylvester's criterion on the leading principal minors.
        for k in 1..=n {
            let idx: Vec<usize> = (0..k).collect();
            let minor = Matrix::from_rows(
                idx.iter().map(|&i| idx.iter().map(|&j| g.get(i, j).clone()).collect()).collect(),
            );
            if minor.det().real_sign() <= 0 {
                return Err(HodgeError::NotPositive(format!("leading minor {k} is not positive")));
            }
        }
        Ok(HermitianMetric { n, g })
    }

    pub fn diagonal(weights: &[GaussRat]) -> Result<Self, HodgeError> {
        let n = weights.len();
        let mut g = Matrix::zeros(n, n);
        for (k, w) in weights.iter().enumerate() {
            g.set(k, k, w.clone());
        }
        HermitianMetric::new(g)
    }

    /// `𝟙 + C C^H` for a random small Gaussian-rational `C`; always positive.
    pub fn random(rng: &mut FuzzRng, n: usize) -> Self {
        let c = Matrix::from_rows((0..n).map(|_| (0..n).map(|_| random::gauss(rng, 2)).collect()).collect());
        let g = &Matrix::identity(n) + &(&c * &c.conj_transpose());
        HermitianMetric::new(g).expect("identity plus a Gram matrix is positive")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coframe_gram(&self) -> &Matrix<GaussRat> {
        &self.g
    }

    /// The fundamental form `ω = i Σ h_{kl̄} dz^k ∧ dz̄^l` where `h` is the
    /// metric on `T^{1,0}` dual to the coframe Gram matrix.
    pub fn fundamental_form(&self) -> Form<GaussRat> {
        let h = self.g.inverse().expect("positive metric").transpose();
        let mut out = Form::zero(self.n);
        for k in 0..self.n {
            for l in 0..self.n {
                let c = h.get(k, l).mul(&GaussRat::i());
                out = out + Form::from_indices(self.n, &[k], &[l], c);
            }
        }
        out
    }

    fn pair(&self, i: usize, k: usize) -> GaussRat {
        self.g.get(i, k).clone()
    }

    /// `⟨dz^I ∧ dz̄^J, dz^K ∧ dz̄^L⟩`.
    fn mono_inner(&self, a: &Mono, b: &Mono) -> GaussRat {
        let det_of = |x: u16, y: u16, conj: bool| {
            let xs: Vec<usize> = bits(x).collect();
            let ys: Vec<usize> = bits(y).collect();
            if xs.is_empty() {
                return GaussRat::one();
            }
            let m = Matrix::from_rows(
                xs.iter()
                    .map(|&i| {
                        ys.iter()
                            .map(|&k| if conj { self.pair(i, k).conj() } else { self.pair(i, k) })
                            .collect()
                    })
                    .collect(),
            );
            m.det()
        };
        if a.bidegree() != b.bidegree() {
            return GaussRat::zero();
        }
        det_of(a.hol, b.hol, false).mul(&det_of(a.anti, b.anti, true))
    }

    /// Gram matrix `G[a][b] = ⟨e_b, e_a⟩` of the monomial basis of `Λ^{p,q}`.
    pub fn gram(&self, p: usize, q: usize) -> Matrix<GaussRat> {
        let b = basis(self.n, p, q);
        let mut m = Matrix::zeros(b.len(), b.len());
        for (i, ei) in b.iter().enumerate() {
            for (j, ej) in b.iter().enumerate() {
                m.set(i, j, self.mono_inner(ej, ei));
            }
        }
        m
    }

    /// Gram matrix on `T^{1,0}`-valued `(p,q)`-forms in slot-major order.
    /// The vector part uses the metric dual to the coframe Gram matrix.
    pub fn gram_vectors(&self, p: usize, q: usize) -> Matrix<GaussRat> {
        let gf = self.gram(p, q);
        let gt = self.g.inverse().expect("positive metric");
        let d = gf.rows();
        let mut m = Matrix::zeros(self.n * d, self.n * d);
        for k in 0..self.n {
            for l in 0..self.n {
                for i in 0..d {
                    for j in 0..d {
                        m.set(k * d + i, l * d + j, gt.get(k, l).mul(gf.get(i, j)));
                    }
                }
            }
        }
        m
    }
}

/// A coordinate space: `Λ^{p,q}` or `T^{1,0}`-valued `(p,q)`-forms.
/// Out-of-range bidegrees are zero-dimensional.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum Space {
    Forms(isize, isize),
    Vectors(isize, isize),
}

impl Space {
    pub fn forms(p: usize, q: usize) -> Space {
        Space::Forms(p as isize, q as isize)
    }

    pub fn vectors(p: usize, q: usize) -> Space {
        Space::Vectors(p as isize, q as isize)
    }

    pub fn bidegree(&self) -> (isize, isize) {
        match *self {
            Space::Forms(p, q) | Space::Vectors(p, q) => (p, q),
        }
    }

    fn valid(&self, n: usize) -> bool {
        let (p, q) = self.bidegree();
        p >= 0 && q >= 0 && p as usize <= n && q as usize <= n
    }

    pub fn dim(&self, n: usize) -> usize {
        if !self.valid(n) {
            return 0;
        }
        let (p, q) = self.bidegree();
        let d = binomial(n, p as usize) * binomial(n, q as usize);
        match self {
            Space::Forms(..) => d,
            Space::Vectors(..) => n * d,
        }
    }

    fn shift(&self, dp: isize, dq: isize) -> Space {
        match *self {
            Space::Forms(p, q) => Space::Forms(p + dp, q + dq),
            Space::Vectors(p, q) => Space::Vectors(p + dp, q + dq),
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Forms(p, q) => write!(f, "({p},{q})"),
            Space::Vectors(p, q) => write!(f, "T({p},{q})"),
        }
    }
}

/// First-order operators and their adjoints.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Op {
    Del,
    Dbar,
    DelStar,
    DbarStar,
}

impl Op {
    fn shift(&self) -> (isize, isize) {
        match self {
            Op::Del => (1, 0),
            Op::Dbar => (0, 1),
            Op::DelStar => (-1, 0),
            Op::DbarStar => (0, -1),
        }
    }

    fn adjoint(&self) -> Op {
        match self {
            Op::Del => Op::DelStar,
            Op::Dbar => Op::DbarStar,
            Op::DelStar => Op::Del,
            Op::DbarStar => Op::Dbar,
        }
    }
}

/// A linear map between two coordinate spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<R> {
    pub src: Space,
    pub dst: Space,
    pub mat: Matrix<R>,
}

impl<R: Coeff> OperatorMatrix<R> {
    pub fn compose(&self, first: &OperatorMatrix<R>) -> OperatorMatrix<R> {
        assert_eq!(first.dst, self.src, "composition of mismatched spaces");
        OperatorMatrix { src: first.src, dst: self.dst, mat: &self.mat * &first.mat }
    }

    pub fn add(&self, other: &OperatorMatrix<R>) -> OperatorMatrix<R> {
        assert_eq!((self.src, self.dst), (other.src, other.dst));
        OperatorMatrix { src: self.src, dst: self.dst, mat: &self.mat + &other.mat }
    }
}

/// Laplacian kinds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum LapKind {
    /// `∂̄∂̄* + ∂̄*∂̄`
    Dbar,
    /// `∂∂* + ∂*∂`
    Del,
    /// The fourth-order Bott–Chern Laplacian.
    BottChern,
    /// The fourth-order Aeppli Laplacian.
    Aeppli,
}

/// Cohomology theories computed by rank arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum Theory {
    Dolbeault,
    Del,
    BottChern,
    Aeppli,
}

impl Theory {
    pub const ALL: [Theory; 4] = [Theory::Dolbeault, Theory::Del, Theory::BottChern, Theory::Aeppli];

    pub fn key(&self) -> &'static str {
        match self {
            Theory::Dolbeault => "dolbeault",
            Theory::Del => "del",
            Theory::BottChern => "bc",
            Theory::Aeppli => "aeppli",
        }
    }

    pub fn laplacian(&self) -> LapKind {
        match self {
            Theory::Dolbeault => LapKind::Dbar,
            Theory::Del => LapKind::Del,
            Theory::BottChern => LapKind::BottChern,
            Theory::Aeppli => LapKind::Aeppli,
        }
    }
}

impl FromStr for Theory {
    type Err = HodgeError;
    fn from_str(s: &str) -> Result<Self, HodgeError> {
        Theory::ALL
            .into_iter()
            .find(|t| t.key() == s)
            .ok_or_else(|| HodgeError::Unknown { what: "theory", name: s.to_string() })
    }
}

/// `y` is not in the image; carries the harmonic part and the full residual
/// `y − (image of the canonical candidate)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Unsolvable<T> {
    pub harmonic: T,
    pub residual: T,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Key {
    Op(Op, Space),
    Gram(Space),
    GramInv(Space),
    Green(LapKind, Space),
}

/// Harmonic projection and Green operator of a Laplacian.
#[derive(Clone, Debug)]
pub struct GreenPair<R> {
    pub harmonic: Matrix<R>,
    pub green: Matrix<R>,
}

/// Operator factory for one algebra and one metric; matrices are cached and
/// the cache is safe to share between threads.
pub struct Hodge<R> {
    alg: LieAlgebra,
    metric: HermitianMetric,
    cache: Mutex<HashMap<Key, Arc<Matrix<R>>>>,
    greens: Mutex<HashMap<Key, Arc<GreenPair<R>>>>,
}

impl<R: Coeff> Hodge<R> {
    pub fn new(alg: &LieAlgebra, metric: &HermitianMetric) -> Self {
        assert_eq!(alg.n(), metric.n(), "metric dimension does not match the algebra");
        Hodge {
            alg: alg.clone(),
            metric: metric.clone(),
            cache: Mutex::new(HashMap::new()),
            greens: Mutex::new(HashMap::new()),
        }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.alg
    }

    pub fn metric(&self) -> &HermitianMetric {
        &self.metric
    }

    pub fn n(&self) -> usize {
        self.alg.n()
    }

    pub fn dim(&self, s: Space) -> usize {
        s.dim(self.n())
    }

    fn cached(&self, key: Key, build: impl FnOnce() -> Matrix<R>) -> Arc<Matrix<R>> {
        if let Some(m) = self.cache.lock().expect("cache lock").get(&key) {
            return m.clone();
        }
        let m = Arc::new(build());
        self.cache.lock().expect("cache lock").insert(key, m.clone());
        m
    }

    /// Gram matrix of a space.
    pub fn gram(&self, s: Space) -> Arc<Matrix<R>> {
        self.cached(Key::Gram(s), || {
            if !s.valid(self.n()) {
                return Matrix::zeros(0, 0);
            }
            let (p, q) = s.bidegree();
            let g = match s {
                Space::Forms(..) => self.metric.gram(p as usize, q as usize),
                Space::Vectors(..) => self.metric.gram_vectors(p as usize, q as usize),
            };
            to_coeff(&g)
        })
    }

    fn gram_inv(&self, s: Space) -> Arc<Matrix<R>> {
        self.cached(Key::GramInv(s), || {
            let g = self.gram(s);
            if g.rows() == 0 {
                return Matrix::zeros(0, 0);
            }
            g.inverse().expect("Gram matrix is invertible")
        })
    }

    /// Matrix of `op` with source space `s`.
    pub fn op(&self, op: Op, s: Space) -> OperatorMatrix<R> {
        let (dp, dq) = op.shift();
        let dst = s.shift(dp, dq);
        let mat = self.cached(Key::Op(op, s), || match op {
            Op::Del | Op::Dbar => self.primitive(op, s, dst),
            Op::DelStar | Op::DbarStar => {
                // A* = G_src^{-1} A^H G_dst, with A the forward map dst → src.
                let a = self.op(op.adjoint(), dst).mat;
                let gi = self.gram_inv(dst);
                let gw = self.gram(s);
                &(&*gi * &a.conj_transpose()) * &*gw
            }
        });
        OperatorMatrix { src: s, dst, mat: (*mat).clone() }
    }

    fn primitive(&self, op: Op, s: Space, dst: Space) -> Matrix<R> {
        let n = self.n();
        let (rows, cols) = (self.dim(dst), self.dim(s));
        let mut m = Matrix::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        let (p, q) = s.bidegree();
        let (tp, tq) = dst.bidegree();
        let which = if op == Op::Del { Diff::Del } else { Diff::Dbar };
        match s {
            Space::Forms(..) => {
                let target = basis(n, tp as usize, tq as usize);
                let index: HashMap<Mono, usize> = target.iter().enumerate().map(|(i, m)| (*m, i)).collect();
                for (j, mono) in basis(n, p as usize, q as usize).iter().enumerate() {
                    for (m2, c) in self.alg.apply_mono(which, mono) {
                        m.set(index[m2], j, m.get(index[m2], j).add(&R::from_gauss(c)));
                    }
                }
            }
            Space::Vectors(..) => {
                assert_eq!(op, Op::Dbar, "only ∂̄ acts on vector-valued forms");
                let d = binomial(n, p as usize) * binomial(n, q as usize);
                for k in 0..n {
                    for (i, mono) in basis(n, p as usize, q as usize).iter().enumerate() {
                        let mut comps = vec![Form::zero(n); n];
                        comps[k] = Form::monomial(n, *mono, GaussRat::one());
                        let v = VectorForm::holomorphic(n, comps);
                        let img = dbar_vec(&self.alg, &v).to_vector(tp as usize, tq as usize);
                        for (r, c) in img.iter().enumerate() {
                            m.set(r, k * d + i, R::from_gauss(c));
                        }
                    }
                }
            }
        }
        m
    }

    /// Composite `ops[0] ∘ ops[1] ∘ … ∘ ops[last]` on source space `s`.
    pub fn chain(&self, ops: &[Op], s: Space) -> OperatorMatrix<R> {
        let mut cur = OperatorMatrix { src: s, dst: s, mat: Matrix::identity(self.dim(s)) };
        for op in ops.iter().rev() {
            cur = self.op(*op, cur.dst).compose(&cur);
        }
        cur
    }

    /// `∂∂̄` with source `s`.
    pub fn ddbar(&self, s: Space) -> OperatorMatrix<R> {
        self.chain(&[Op::Del, Op::Dbar], s)
    }

    /// `(∂∂̄)* = ∂̄*∂*` with source `s`.
    pub fn ddbar_star(&self, s: Space) -> OperatorMatrix<R> {
        self.chain(&[Op::DbarStar, Op::DelStar], s)
    }

    /// Adjoint with respect to the induced inner products.
    pub fn adjoint(&self, a: &OperatorMatrix<R>) -> OperatorMatrix<R> {
        let gi = self.gram_inv(a.src);
        let gw = self.gram(a.dst);
        OperatorMatrix { src: a.dst, dst: a.src, mat: &(&*gi * &a.mat.conj_transpose()) * &*gw }
    }

    pub fn laplacian(&self, kind: LapKind, s: Space) -> OperatorMatrix<R> {
        use Op::*;
        let terms: Vec<Vec<Op>> = match kind {
            LapKind::Dbar => vec![vec![DbarStar, Dbar], vec![Dbar, DbarStar]],
            LapKind::Del => vec![vec![DelStar, Del], vec![Del, DelStar]],
            LapKind::BottChern => vec![
                vec![Del, Dbar, DbarStar, DelStar],
                vec![DbarStar, DelStar, Del, Dbar],
                vec![DbarStar, Del, DelStar, Dbar],
                vec![DelStar, Dbar, DbarStar, Del],
                vec![DbarStar, Dbar],
                vec![DelStar, Del],
            ],
            LapKind::Aeppli => vec![
                vec![Del, DelStar],
                vec![Dbar, DbarStar],
                vec![DbarStar, DelStar, Del, Dbar],
                vec![Del, Dbar, DbarStar, DelStar],
                vec![Del, DbarStar, Dbar, DelStar],
                vec![Dbar, DelStar, Del, DbarStar],
            ],
        };
        let d = self.dim(s);
        let mut out = OperatorMatrix { src: s, dst: s, mat: Matrix::zeros(d, d) };
        for t in &terms {
            if matches!(s, Space::Vectors(..)) && t.iter().any(|o| matches!(o, Del | DelStar)) {
                continue;
            }
            out = out.add(&self.chain(t, s));
        }
        out
    }

    /// Harmonic projection and Green operator of the Laplacian at `s`.
    pub fn green(&self, kind: LapKind, s: Space) -> Arc<GreenPair<R>> {
        let key = Key::Green(kind, s);
        if let Some(g) = self.greens.lock().expect("cache lock").get(&key) {
            return g.clone();
        }
        let lap = self.laplacian(kind, s);
        let pair = Arc::new(green(&lap.mat, &self.gram(s)));
        self.greens.lock().expect("cache lock").insert(key, pair.clone());
        pair
    }

    pub fn inner(&self, s: Space, a: &[R], b: &[R]) -> R {
        let g = self.gram(s);
        let ga = g.apply(a);
        b.iter().zip(&ga).fold(R::zero(), |acc, (bi, gi)| acc.add(&bi.conj().mul(gi)))
    }

    fn bidegree_parts(f: &Form<R>) -> Vec<(usize, usize)> {
        f.bidegrees()
    }

    /// Apply `op` to a form, bidegree by bidegree.
    pub fn apply(&self, op: Op, f: &Form<R>) -> Form<R> {
        self.apply_forms(f, |s, v| self.op(op, s).mat.apply(v), op.shift())
    }

    fn apply_forms(
        &self,
        f: &Form<R>,
        map: impl Fn(Space, &[R]) -> Vec<R>,
        shift: (isize, isize),
    ) -> Form<R> {
        let n = self.n();
        let mut out = Form::zero(n);
        for (p, q) in Self::bidegree_parts(f) {
            let s = Space::forms(p, q);
            let dst = s.shift(shift.0, shift.1);
            if !dst.valid(n) {
                continue;
            }
            let v = map(s, &f.component(p, q).to_vector(p, q));
            let (tp, tq) = dst.bidegree();
            out = out + Form::from_vector(n, tp as usize, tq as usize, &v);
        }
        out
    }

    /// Green operator of `kind` applied to a form.
    pub fn green_apply(&self, kind: LapKind, f: &Form<R>) -> Form<R> {
        self.apply_forms(f, |s, v| self.green(kind, s).green.apply(v), (0, 0))
    }

    /// Harmonic projection for `kind` applied to a form.
    pub fn harmonic(&self, kind: LapKind, f: &Form<R>) -> Form<R> {
        self.apply_forms(f, |s, v| self.green(kind, s).harmonic.apply(v), (0, 0))
    }

    /// Minimal-norm solution `x = ∂̄*G y` of `∂̄x = y`.
    pub fn solve_dbar_minimal(&self, y: &Form<R>) -> Result<Form<R>, Unsolvable<Form<R>>> {
        let x = self.apply(Op::DbarStar, &self.green_apply(LapKind::Dbar, y));
        let residual = y - &self.apply(Op::Dbar, &x);
        if residual.is_zero() {
            Ok(x)
        } else {
            Err(Unsolvable { harmonic: self.harmonic(LapKind::Dbar, y), residual })
        }
    }

    /// Minimal-norm solution `x = ∂*G_∂ y` of `∂x = y`.
    pub fn solve_del_minimal(&self, y: &Form<R>) -> Result<Form<R>, Unsolvable<Form<R>>> {
        let x = self.apply(Op::DelStar, &self.green_apply(LapKind::Del, y));
        let residual = y - &self.apply(Op::Del, &x);
        if residual.is_zero() {
            Ok(x)
        } else {
            Err(Unsolvable { harmonic: self.harmonic(LapKind::Del, y), residual })
        }
    }

    /// `(∂∂̄)*` applied to a form.
    pub fn ddbar_star_apply(&self, f: &Form<R>) -> Form<R> {
        self.apply(Op::DbarStar, &self.apply(Op::DelStar, f))
    }

    pub fn ddbar_apply(&self, f: &Form<R>) -> Form<R> {
        self.apply(Op::Del, &self.apply(Op::Dbar, f))
    }

    /// Minimal-norm solution `x = (∂∂̄)*G_BC y` of `∂∂̄x = y`.
    pub fn solve_ddbar_minimal(&self, y: &Form<R>) -> Result<Form<R>, Unsolvable<Form<R>>> {
        let x = self.ddbar_star_apply(&self.green_apply(LapKind::BottChern, y));
        let residual = y - &self.ddbar_apply(&x);
        if residual.is_zero() {
            Ok(x)
        } else {
            Err(Unsolvable { harmonic: self.harmonic(LapKind::BottChern, y), residual })
        }
    }

    fn apply_vec(&self, v: &VectorForm<R>, map: impl Fn(Space, &[R]) -> Vec<R>, shift: (isize, isize)) -> VectorForm<R> {
        let n = self.n();
        let mut bidegs: Vec<(usize, usize)> = v.comps()[..n].iter().flat_map(|c| c.bidegrees()).collect();
        bidegs.sort_unstable();
        bidegs.dedup();
        let mut out = VectorForm::zero(n);
        for (p, q) in bidegs {
            let s = Space::vectors(p, q);
            let dst = s.shift(shift.0, shift.1);
            if !dst.valid(n) {
                continue;
            }
            let part = v.map_forms(|f| f.component(p, q));
            let w = map(s, &part.to_vector(p, q));
            let (tp, tq) = dst.bidegree();
            out = out + VectorForm::from_vector(n, tp as usize, tq as usize, &w);
        }
        out
    }

    /// `∂̄` on `T^{1,0}`-valued forms via the operator matrices.
    pub fn dbar_vec(&self, v: &VectorForm<R>) -> VectorForm<R> {
        self.apply_vec(v, |s, x| self.op(Op::Dbar, s).mat.apply(x), (0, 1))
    }

    pub fn dbar_star_vec(&self, v: &VectorForm<R>) -> VectorForm<R> {
        self.apply_vec(v, |s, x| self.op(Op::DbarStar, s).mat.apply(x), (0, -1))
    }

    pub fn green_vec(&self, v: &VectorForm<R>) -> VectorForm<R> {
        self.apply_vec(v, |s, x| self.green(LapKind::Dbar, s).green.apply(x), (0, 0))
    }

    pub fn harmonic_vec(&self, v: &VectorForm<R>) -> VectorForm<R> {
        self.apply_vec(v, |s, x| self.green(LapKind::Dbar, s).harmonic.apply(x), (0, 0))
    }

    /// Basis of the harmonic `T^{1,0}`-valued `(0,1)`-forms.
    pub fn harmonic_beltrami_basis(&self) -> Vec<VectorForm<R>> {
        let s = Space::vectors(0, 1);
        let lap = self.laplacian(LapKind::Dbar, s);
        lap.mat.kernel().into_iter().map(|v| VectorForm::from_vector(self.n(), 0, 1, &v)).collect()
    }

    /// Dimension of the kernel of a Laplacian.
    pub fn harmonic_dim(&self, kind: LapKind, s: Space) -> usize {
        let lap = self.laplacian(kind, s);
        self.dim(s) - if lap.mat.rows() == 0 { 0 } else { lap.mat.rank() }
    }

    /// Cohomology dimension via ranks of the differentials (no metric).
    pub fn cohomology_dim(&self, theory: Theory, p: usize, q: usize) -> usize {
        let s = Space::forms(p, q);
        let d = self.dim(s);
        let rank = |m: &OperatorMatrix<R>| if m.mat.rows() == 0 || m.mat.cols() == 0 { 0 } else { m.mat.rank() };
        match theory {
            Theory::Dolbeault => d - rank(&self.op(Op::Dbar, s)) - rank(&self.op(Op::Dbar, s.shift(0, -1))),
            Theory::Del => d - rank(&self.op(Op::Del, s)) - rank(&self.op(Op::Del, s.shift(-1, 0))),
            Theory::BottChern => {
                let stacked = self.op(Op::Del, s).mat.vstack(&self.op(Op::Dbar, s).mat);
                let ker = d - if stacked.rows() == 0 { 0 } else { stacked.rank() };
                ker - rank(&self.ddbar(s.shift(-1, -1)))
            }
            Theory::Aeppli => {
                let ker = d - rank(&self.ddbar(s));
                let a = self.op(Op::Del, s.shift(-1, 0)).mat.image();
                let b = self.op(Op::Dbar, s.shift(0, -1)).mat.image();
                ker - linalg::span_sum(d, &a, &b).len()
            }
        }
    }
}

/// Harmonic projection `H` and Green operator `G` of a Laplacian `L` that
/// is self-adjoint for the Gram matrix `gram`: `H = K(K^H Γ K)^{-1}K^H Γ`
/// and `G = (L + H)^{-1} − H`.
pub fn green<R: Coeff>(lap: &Matrix<R>, gram: &Matrix<R>) -> GreenPair<R> {
    let d = lap.rows();
    if d == 0 {
        return GreenPair { harmonic: Matrix::zeros(0, 0), green: Matrix::zeros(0, 0) };
    }
    let ker = lap.kernel();
    let harmonic = if ker.is_empty() {
        Matrix::zeros(d, d)
    } else {
        let k = Matrix::from_cols(d, &ker);
        let kh = k.conj_transpose();
        let middle = (&(&kh * gram) * &k).inverse().expect("Gram restricted to kernel is invertible");
        &(&(&k * &middle) * &kh) * gram
    };
    let green = &(lap + &harmonic).inverse().expect("L + H is invertible") - &harmonic;
    GreenPair { harmonic, green }
}

fn to_coeff<R: Coeff>(m: &Matrix<GaussRat>) -> Matrix<R> {
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, R::from_gauss(m.get(i, j)));
        }
    }
    out
}

/// Real part of an inner product, for exact comparisons of norms.
pub fn real_cmp<S: Scalar>(a: &S, b: &S) -> std::cmp::Ordering {
    match a.sub(b).real_sign() {
        -1 => std::cmp::Ordering::Less,
        0 => std::cmp::Ordering::Equal,
        _ => std::cmp::Ordering::Greater,
    }
}
