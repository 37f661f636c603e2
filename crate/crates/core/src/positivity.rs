//! Positivity of real `(p,p)`-forms.
//!
//! A `(p,p)`-form is stored as `Ω = σ_p Σ Θ_{IJ} dz^I ∧ dz̄^J` with
//! `σ_p = 2^{-p} i^{p²}`. Transversality is tested through the exact
//! pairing matrix `H` on `Λ^{q,0}`, `q = n − p`, defined by
//! `Ω ∧ σ_q τ ∧ τ̄ = (τ^H H τ) · vol` with `vol = σ_n dz^{1…n} ∧ dz̄^{1…n}`.
//! For `p ∈ {1, n−1}` every `(q,0)`-form is decomposable and the verdict is
//! an exact positive-definiteness test of `H`; for other `p` it comes from
//! sampling decomposable `τ` and refining the minimum by local descent.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::deformation::BiSeries;
use crate::exterior::{binomial, bits, exp_contract, extend, subsets, Form, Mono, VectorForm};
use crate::hodge::HermitianMetric;
use crate::linalg::Matrix;
use crate::report::{form_json, Provenance, Report};
use crate::scalar::{Coeff, GaussRat as Q, Scalar, C64};
use crate::series::Series;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PositivityError {
    #[error("expected a form of pure type ({p},{p})")]
    NotPure { p: usize },
    #[error("form is not real")]
    NotReal,
    #[error("basis of Λ^{{p,0}} does not span")]
    NotSpanning,
    #[error("invalid degree p = {p} for n = {n}")]
    InvalidDegree { n: usize, p: usize },
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
}

/// `σ_p = 2^{-p} i^{p²}`.
pub fn sigma(p: usize) -> Q {
    let scale = Q::new(BigRational::new(1.into(), BigInt::from(1u64) << p), BigRational::zero());
    if p % 2 == 1 {
        scale.mul(&Q::i())
    } else {
        scale
    }
}

fn check_degree(n: usize, p: usize) -> Result<(), PositivityError> {
    if p > n {
        return Err(PositivityError::InvalidDegree { n, p });
    }
    Ok(())
}

fn check_pure(omega: &Form<Q>, p: usize) -> Result<(), PositivityError> {
    if omega.terms().all(|(m, _)| m.bidegree() == (p, p)) {
        Ok(())
    } else {
        Err(PositivityError::NotPure { p })
    }
}

/// Hermitian representation of a `(p,p)`-form in a basis of `Λ^{p,0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PPFormRep {
    pub n: usize,
    pub p: usize,
    /// Basis `β_i` of `Λ^{p,0}`.
    pub basis: Vec<Form<Q>>,
    /// `Θ` with `Ω = σ_p Σ Θ_{ij} β_i ∧ β̄_j`.
    pub theta: Matrix<Q>,
}

impl PPFormRep {
    pub fn sigma(&self) -> Q {
        sigma(self.p)
    }

    pub fn is_hermitian(&self) -> bool {
        self.theta.is_hermitian()
    }

    /// `σ_p Σ Θ_{ij} β_i ∧ β̄_j`.
    pub fn reassemble(&self) -> Form<Q> {
        let s = self.sigma();
        let mut out = Form::zero(self.n);
        for (i, bi) in self.basis.iter().enumerate() {
            for (j, bj) in self.basis.iter().enumerate() {
                let c = self.theta.get(i, j);
                if !c.is_zero() {
                    out = out + bi.wedge(&bj.conj()).scale(&c.mul(&s));
                }
            }
        }
        out
    }
}

fn monomial_basis(n: usize, p: usize) -> Vec<Form<Q>> {
    subsets(n, p).into_iter().map(|h| Form::monomial(n, Mono::new(h, 0), Q::one())).collect()
}

/// Representation in the coordinate basis `dz^I`, `|I| = p`.
pub fn hermitian_rep(omega: &Form<Q>, p: usize) -> Result<PPFormRep, PositivityError> {
    let n = omega.n();
    check_degree(n, p)?;
    check_pure(omega, p)?;
    let idx = subsets(n, p);
    let inv_sigma = sigma(p).try_inv().expect("σ_p is nonzero");
    let mut theta = Matrix::zeros(idx.len(), idx.len());
    for (i, &h) in idx.iter().enumerate() {
        for (j, &a) in idx.iter().enumerate() {
            let c = omega.coeff(&Mono::new(h, a));
            if !c.is_zero() {
                theta.set(i, j, c.mul(&inv_sigma));
            }
        }
    }
    Ok(PPFormRep { n, p, basis: monomial_basis(n, p), theta })
}

/// Representation in a user basis of `(p,0)`-forms.
pub fn hermitian_rep_in(omega: &Form<Q>, p: usize, basis: &[Form<Q>]) -> Result<PPFormRep, PositivityError> {
    let n = omega.n();
    let std = hermitian_rep(omega, p)?;
    let idx = subsets(n, p);
    if basis.len() != idx.len() || basis.iter().any(|b| b.terms().any(|(m, _)| m.bidegree() != (p, 0))) {
        return Err(PositivityError::NotSpanning);
    }
    let cols: Vec<Vec<Q>> = basis.iter().map(|b| b.to_vector(p, 0)).collect();
    let b = Matrix::from_cols(idx.len(), &cols);
    let binv = b.inverse().ok_or(PositivityError::NotSpanning)?;
    let theta = &(&binv * &std.theta) * &binv.conj_transpose();
    Ok(PPFormRep { n, p, basis: basis.to_vec(), theta })
}

/// `Ω = σ_p Σ λ_j η_j ∧ η̄_j` with `η_j` orthonormal for the metric.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub n: usize,
    pub p: usize,
    pub lambdas: Vec<f64>,
    /// Exact eigenvalues when `Θ` is already diagonal in an orthonormal basis.
    pub exact_lambdas: Option<Vec<BigRational>>,
    pub etas: Vec<Form<C64>>,
    pub note: Option<String>,
}

impl CanonicalForm {
    fn cutoff(&self) -> f64 {
        let scale = self.lambdas.iter().fold(1.0f64, |m, l| m.max(l.abs()));
        1e-9 * scale
    }

    pub fn positive_index(&self) -> usize {
        match &self.exact_lambdas {
            Some(ls) => ls.iter().filter(|l| l.is_positive()).count(),
            None => self.lambdas.iter().filter(|&&l| l > self.cutoff()).count(),
        }
    }

    pub fn negative_index(&self) -> usize {
        match &self.exact_lambdas {
            Some(ls) => ls.iter().filter(|l| l.is_negative()).count(),
            None => self.lambdas.iter().filter(|&&l| l < -self.cutoff()).count(),
        }
    }

    pub fn reassemble(&self) -> Form<C64> {
        let s = C64(sigma(self.p).to_c64());
        self.lambdas.iter().zip(&self.etas).fold(Form::zero(self.n), |acc, (l, e)| {
            acc + e.wedge(&e.conj()).scale(&C64::new(*l, 0.0).mul(&s))
        })
    }
}

fn to_c64_form(f: &Form<Q>) -> Form<C64> {
    f.map(|c| C64(c.to_c64()))
}

/// Canonical form of a real `(p,p)`-form. Exact when `Θ` is diagonal and the
/// metric is the coordinate one, otherwise a float eigen-decomposition.
pub fn canonical_form(omega: &Form<Q>, p: usize, metric: &HermitianMetric) -> Result<CanonicalForm, PositivityError> {
    let rep = hermitian_rep(omega, p)?;
    if !rep.is_hermitian() {
        return Err(PositivityError::NotReal);
    }
    let n = rep.n;
    let dim = rep.basis.len();
    let gram = metric.gram(p, 0);
    let diagonal = (0..dim).all(|i| (0..dim).all(|j| i == j || rep.theta.get(i, j).is_zero()));
    if gram == Matrix::identity(dim) && diagonal {
        let exact: Vec<BigRational> = (0..dim).map(|i| rep.theta.get(i, i).re.clone()).collect();
        return Ok(CanonicalForm {
            n,
            p,
            lambdas: exact.iter().map(|l| l.to_f64().unwrap_or(f64::NAN)).collect(),
            exact_lambdas: Some(exact),
            etas: rep.basis.iter().map(to_c64_form).collect(),
            note: None,
        });
    }
    let g = gram.to_nalgebra();
    let l = g.clone().cholesky().expect("metric Gram matrix is positive").l();
    let a = l.adjoint() * rep.theta.to_nalgebra() * &l;
    let a = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = a.symmetric_eigen();
    let v = l.adjoint().try_inverse().expect("Cholesky factor is invertible") * eig.eigenvectors;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].partial_cmp(&eig.eigenvalues[x]).unwrap_or(std::cmp::Ordering::Equal));
    let etas = order
        .iter()
        .map(|&k| {
            rep.basis
                .iter()
                .enumerate()
                .fold(Form::zero(n), |acc, (i, b)| acc + to_c64_form(b).scale(&C64(v[(i, k)])))
        })
        .collect();
    Ok(CanonicalForm {
        n,
        p,
        lambdas: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        exact_lambdas: None,
        etas,
        note: Some("float eigen-decomposition".into()),
    })
}

/// `k = (N − 1) − pq` with `N = C(n,q)`, `p = n − q`: the codimension of the
/// decomposable locus in `P(Λ^{q,0})`.
pub fn pluecker_codim(n: usize, q: usize) -> usize {
    let p = n - q;
    binomial(n, q) - 1 - p * q
}

// ---------------------------------------------------------------------------
// Pairing with decomposable forms

/// `H` with `Ω ∧ σ_q τ ∧ τ̄ = (τ^H H τ) vol`, indexed by `q`-subsets.
pub fn pairing_matrix(omega: &Form<Q>, p: usize) -> Result<Matrix<Q>, PositivityError> {
    let n = omega.n();
    check_degree(n, p)?;
    check_pure(omega, p)?;
    let q = n - p;
    let idx = subsets(n, q);
    let top = Mono::new(((1u32 << n) - 1) as u16, ((1u32 << n) - 1) as u16);
    let scale = sigma(q).mul(&sigma(n).try_inv().expect("σ_n is nonzero"));
    let mut h = Matrix::zeros(idx.len(), idx.len());
    for (a, &ka) in idx.iter().enumerate() {
        for (b, &kb) in idx.iter().enumerate() {
            // Coefficient of τ_b conj(τ_a), i.e. of dz^{K_b} ∧ dz̄^{K_a}.
            let probe = Form::monomial(n, Mono::new(kb, ka), scale.clone());
            let c = omega.wedge(&probe).coeff(&top);
            if !c.is_zero() {
                h.set(a, b, c);
            }
        }
    }
    Ok(h)
}

/// A decomposable `(q,0)`-form `γ_1 ∧ … ∧ γ_q`, kept with its Plücker
/// coordinates over the `q`-subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposable {
    pub n: usize,
    pub gammas: Vec<Vec<Complex64>>,
    pub coords: Vec<Complex64>,
}

impl Decomposable {
    pub fn new(n: usize, gammas: Vec<Vec<Complex64>>) -> Self {
        let q = gammas.len();
        let coords = subsets(n, q)
            .into_iter()
            .map(|mask| {
                let cols: Vec<usize> = bits(mask).collect();
                DMatrix::from_fn(q, q, |r, c| gammas[r][cols[c]]).determinant()
            })
            .collect();
        Decomposable { n, gammas, coords }
    }

    pub fn q(&self) -> usize {
        self.gammas.len()
    }

    pub fn norm2(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn to_form(&self) -> Form<C64> {
        let mut f = Form::zero(self.n);
        for (mask, c) in subsets(self.n, self.q()).into_iter().zip(&self.coords) {
            f.add_term(Mono::new(mask, 0), C64(*c));
        }
        f
    }

    /// `γ_1 ∧ … ∧ γ_q` through the exterior algebra, for cross-checking.
    pub fn wedge_form(&self) -> Form<C64> {
        self.gammas.iter().fold(Form::constant(self.n, C64::one()), |acc, g| {
            let gf = g.iter().enumerate().fold(Form::zero(self.n), |a, (k, c)| a + Form::dz(self.n, k).scale(&C64(*c)));
            acc.wedge(&gf)
        })
    }
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> =
        (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

/// Coordinate monomials `dz^K` first, then seeded random wedges of unit
/// `(1,0)`-forms, `count` in total.
pub fn sample_decomposable(n: usize, q: usize, count: usize, seed: u64) -> Vec<Decomposable> {
    let mut out: Vec<Decomposable> = subsets(n, q)
        .into_iter()
        .take(count)
        .map(|mask| {
            let gammas = bits(mask)
                .map(|k| (0..n).map(|j| Complex64::new(if j == k { 1.0 } else { 0.0 }, 0.0)).collect())
                .collect();
            Decomposable::new(n, gammas)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        let gammas = (0..q).map(|_| unit_vector(&mut rng, n)).collect();
        out.push(Decomposable::new(n, gammas));
    }
    out
}

/// Rank test: `τ` is decomposable iff `{v : v ∧ τ = 0}` has dimension `q`.
pub fn is_decomposable(tau: &Form<C64>, q: usize, tol: f64) -> bool {
    let n = tau.n();
    let target = subsets(n, q + 1);
    let m = DMatrix::from_fn(target.len(), n, |r, k| {
        tau.wedge(&Form::dz(n, k)).coeff(&Mono::new(target[r], 0)).0
    });
    let sv = m.singular_values();
    let scale = sv.iter().fold(0.0f64, |a, &b| a.max(b)).max(1.0);
    let rank = sv.iter().filter(|&&s| s > tol * scale).count();
    n - rank == q
}

fn objective_h(h: &DMatrix<Complex64>, tau: &Decomposable) -> f64 {
    let v = DVector::from_column_slice(&tau.coords);
    (v.adjoint() * h * &v)[(0, 0)].re / tau.norm2()
}

/// `(Ω ∧ σ_q τ ∧ τ̄) / (|τ|² vol)` for an arbitrary `(p,p)`-form and `(q,0)`-form.
pub fn objective(omega: &Form<Q>, p: usize, tau: &Decomposable) -> Result<f64, PositivityError> {
    let h = pairing_matrix(omega, p)?.to_nalgebra();
    Ok(objective_h(&h, tau))
}

// ---------------------------------------------------------------------------
// Transversality

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Transverse,
    NotTransverse,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Transverse => "transverse",
            Verdict::NotTransverse => "not_transverse",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TransversalityVerdict {
    pub verdict: Verdict,
    /// Smallest objective seen (sampled, refined, or at the exact witness).
    pub margin: f64,
    /// Plücker coordinates of the minimizing `τ`.
    pub witness: Option<Vec<Complex64>>,
    pub samples: usize,
    /// Whether the verdict comes from the exact test.
    pub exact: bool,
    /// For exact verdicts, whether sampling agrees.
    pub cross_check: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub count: usize,
    pub seed: u64,
    pub refine: bool,
    pub extra: Vec<Decomposable>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { count: 2000, seed: 0, refine: true, extra: Vec::new() }
    }
}

/// Sampled minimum of the objective, refined by random local descent from
/// the best starting points.
pub fn sampled_minimum(h: &DMatrix<Complex64>, n: usize, q: usize, cfg: &SampleConfig) -> (f64, Decomposable, usize) {
    let mut samples = sample_decomposable(n, q, cfg.count, cfg.seed);
    samples.extend(cfg.extra.iter().cloned());
    let values: Vec<f64> = samples.par_iter().map(|t| objective_h(h, t)).collect();
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = (values[order[0]], samples[order[0]].clone());
    if cfg.refine && q > 0 {
        let starts: Vec<usize> = order.iter().take(8).copied().collect();
        let refined: Vec<(f64, Decomposable)> = starts
            .par_iter()
            .enumerate()
            .map(|(r, &s)| descend(h, &samples[s], values[s], cfg.seed ^ (0x9e37_79b9 + r as u64)))
            .collect();
        for (v, t) in refined {
            if v < best.0 {
                best = (v, t);
            }
        }
    }
    (best.0, best.1, samples.len())
}

fn descend(h: &DMatrix<Complex64>, start: &Decomposable, value: f64, seed: u64) -> (f64, Decomposable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cur, mut val) = (start.clone(), value);
    let n = start.n;
    // Three rounds, each restarting the step size.
    for _ in 0..3 {
        let mut step = 0.3;
        for _ in 0..150 {
            let gammas: Vec<Vec<Complex64>> = cur
                .gammas
                .iter()
                .map(|g| {
                    let d = unit_vector(&mut rng, n);
                    let v: Vec<Complex64> = g.iter().zip(&d).map(|(a, b)| a + b * step).collect();
                    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                    v.into_iter().map(|c| c / norm).collect()
                })
                .collect();
            let cand = Decomposable::new(n, gammas);
            if cand.norm2() < 1e-24 {
                continue;
            }
            let cv = objective_h(h, &cand);
            if cv < val {
                cur = cand;
                val = cv;
            } else {
                step *= 0.85;
            }
        }
    }
    (val, cur)
}

/// Exact positive-definiteness of a hermitian matrix by `LDL^H` without
/// pivoting. On failure returns `v` with `v^H H v ≤ 0`.
pub fn positive_definite_exact(h: &Matrix<Q>) -> Result<(), Vec<Q>> {
    let n = h.rows();
    let mut a = h.clone();
    let mut l = Matrix::<Q>::identity(n);
    for k in 0..n {
        let d = a.get(k, k).clone();
        if d.re.is_positive() {
            let dinv = d.inv();
            for i in k + 1..n {
                l.set(i, k, a.get(i, k).mul(&dinv));
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a.get(i, j).sub(&a.get(i, k).mul(&a.get(j, k).conj()).mul(&dinv));
                    a.set(i, j, v);
                }
            }
            continue;
        }
        // Solve L^H v = e_k on the leading block.
        let mut v = vec![Q::zero(); n];
        v[k] = Q::one();
        for i in (0..k).rev() {
            let s = (i + 1..=k).fold(Q::zero(), |acc, j| acc.add(&l.get(j, i).conj().mul(&v[j])));
            v[i] = s.neg();
        }
        return Err(v);
    }
    Ok(())
}

fn matrix_scale(h: &DMatrix<Complex64>) -> f64 {
    h.iter().fold(0.0f64, |m, c| m.max(c.norm()))
}

/// Transversality verdict for a real `(p,p)`-form.
pub fn transversality(omega: &Form<Q>, p: usize, cfg: &SampleConfig) -> Result<TransversalityVerdict, PositivityError> {
    let n = omega.n();
    let hq = pairing_matrix(omega, p)?;
    if !hq.is_hermitian() {
        return Err(PositivityError::NotReal);
    }
    let q = n - p;
    let h = hq.to_nalgebra();
    let (min, arg, samples) = sampled_minimum(&h, n, q, cfg);
    let exact_case = p == 1 || p + 1 == n || p == 0 || p == n;
    if exact_case {
        return Ok(match positive_definite_exact(&hq) {
            Ok(()) => TransversalityVerdict {
                verdict: Verdict::Transverse,
                margin: min,
                witness: Some(arg.coords),
                samples,
                exact: true,
                cross_check: Some(min > 0.0),
            },
            Err(v) => {
                let coords: Vec<Complex64> = v.iter().map(|c| c.to_c64()).collect();
                let w = Decomposable { n, gammas: Vec::new(), coords };
                let wv = objective_h(&h, &w);
                TransversalityVerdict {
                    verdict: Verdict::NotTransverse,
                    margin: wv.min(min),
                    witness: Some(w.coords),
                    samples,
                    exact: true,
                    cross_check: Some(true),
                }
            }
        });
    }
    let threshold = 1e-9 * matrix_scale(&h);
    let verdict = if min <= 0.0 {
        Verdict::NotTransverse
    } else if min > threshold {
        Verdict::Transverse
    } else {
        Verdict::Inconclusive
    };
    Ok(TransversalityVerdict { verdict, margin: min, witness: Some(arg.coords), samples, exact: false, cross_check: None })
}

/// Positive index against the bound `N − k` for a transverse form.
pub fn positive_index_bound_check(omega: &Form<Q>, p: usize, cfg: &SampleConfig) -> Result<Report, PositivityError> {
    let n = omega.n();
    let q = n - p;
    let canon = canonical_form(omega, p, &HermitianMetric::identity(n))?;
    let verdict = transversality(omega, p, cfg)?;
    let big_n = binomial(n, q);
    let k = pluecker_codim(n, q);
    let index = canon.positive_index();
    let mut r = Report::new("positivity", "index-bound");
    r.config("n", n).config("p", p).config("samples", cfg.count).config("seed", cfg.seed);
    r.fact("N", serde_json::json!(big_n))
        .fact("k", serde_json::json!(k))
        .fact("positive_index", serde_json::json!(index))
        .fact("negative_index", serde_json::json!(canon.negative_index()))
        .fact("verdict", serde_json::json!(verdict.verdict.to_string()))
        .fact("margin", serde_json::json!(verdict.margin));
    if verdict.verdict == Verdict::Transverse {
        r.check_with("index >= N-k", index >= big_n - k, format!("{index} >= {}", big_n - k), Provenance::Paper);
    }
    if let Some(ok) = verdict.cross_check {
        r.check("sampling agrees with exact verdict", ok, "");
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Extremal constructions

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtremalKind {
    /// Transverse with positive index exactly `N − k`.
    ExactIndex,
    /// Transverse with one negative eigenvalue.
    NegativeIndex,
}

#[derive(Clone, Debug)]
pub struct Extremal {
    pub omega: Form<Q>,
    pub p: usize,
    /// Eigenvalues along the columns of `basis`.
    pub lambdas: Vec<BigRational>,
    /// Unitary change of basis; column `j` is `η_j` in the `dz^I` basis.
    pub basis: Matrix<Q>,
    /// Sampled minimum of the exact-index form, for the negative kind.
    pub a: Option<f64>,
    pub verdict: TransversalityVerdict,
    /// Seed of the successful attempt.
    pub seed: u64,
}

/// Unitary `(𝟙 − A)(𝟙 + A)^{-1}` for a random skew-hermitian Gaussian-rational `A`.
pub fn cayley_unitary(dim: usize, seed: u64) -> Matrix<Q> {
    let mut rng = crate::random::rng(seed);
    let mut a = Matrix::<Q>::zeros(dim, dim);
    for i in 0..dim {
        a.set(i, i, Q::i().mul(&Q::ratio(rng.gen_range(-2..=2), 2)));
        for j in i + 1..dim {
            let z = Q::complex(rng.gen_range(-2..=2), 2, rng.gen_range(-2..=2), 2);
            a.set(i, j, z.clone());
            a.set(j, i, z.conj().neg());
        }
    }
    let id = Matrix::identity(dim);
    let inv = (&id + &a).inverse().expect("𝟙 + A is invertible for skew-hermitian A");
    &(&id - &a) * &inv
}

fn assemble(n: usize, p: usize, u: &Matrix<Q>, lambdas: &[BigRational]) -> Form<Q> {
    let dim = u.rows();
    let mut d = Matrix::zeros(dim, dim);
    for (j, l) in lambdas.iter().enumerate() {
        d.set(j, j, Q::new(l.clone(), BigRational::zero()));
    }
    let theta = &(u * &d) * &u.conj_transpose();
    PPFormRep { n, p, basis: monomial_basis(n, p), theta }.reassemble()
}

/// Largest `m / 2^20` not exceeding `x`.
fn rational_below(x: f64) -> BigRational {
    let den: i64 = 1 << 20;
    BigRational::new(BigInt::from((x * den as f64).floor() as i64), BigInt::from(den))
}

/// Build a transverse `(p,p)`-form of the requested kind on `C^n`. The
/// leading `N − k` eigenvectors of a random unitary basis carry `λ = 1`; the
/// negative kind adds `λ_{N−k+1} = −a/2` where `a` is the sampled minimum of
/// the exact-index form. Retries with fresh bases when sampling finds the
/// result not transverse.
pub fn construct_extremal(
    n: usize,
    p: usize,
    kind: ExtremalKind,
    seed: u64,
    cfg: &SampleConfig,
) -> Result<Extremal, PositivityError> {
    if p == 0 || p >= n {
        return Err(PositivityError::InvalidDegree { n, p });
    }
    let q = n - p;
    let big_n = binomial(n, q);
    let k = pluecker_codim(n, q);
    if kind == ExtremalKind::NegativeIndex && k == 0 {
        return Err(PositivityError::ConstructionFailed(format!(
            "a negative index needs k ≥ 1, but k = 0 for (n,p) = ({n},{p})"
        )));
    }
    let m = big_n - k;
    let mut last = String::new();
    for attempt in 0..8u64 {
        let s = seed.wrapping_add(attempt);
        let u = cayley_unitary(big_n, s);
        let mut lambdas: Vec<BigRational> =
            (0..big_n).map(|j| if j < m { BigRational::from_integer(1.into()) } else { BigRational::zero() }).collect();
        let base = assemble(n, p, &u, &lambdas);
        let sample_cfg = SampleConfig { seed: cfg.seed.wrapping_add(s), ..cfg.clone() };
        let base_verdict = transversality(&base, p, &sample_cfg)?;
        if base_verdict.verdict != Verdict::Transverse {
            last = format!("attempt {attempt}: exact-index form has sampled margin {:e}", base_verdict.margin);
            continue;
        }
        if kind == ExtremalKind::ExactIndex {
            return Ok(Extremal { omega: base, p, lambdas, basis: u, a: None, verdict: base_verdict, seed: s });
        }
        let a = base_verdict.margin;
        let lam = -rational_below(a / 2.0);
        if !lam.is_negative() {
            last = format!("attempt {attempt}: margin {a:e} too small for a rational λ");
            continue;
        }
        lambdas[m] = lam;
        let omega = assemble(n, p, &u, &lambdas);
        let verdict = transversality(&omega, p, &SampleConfig { seed: sample_cfg.seed ^ 0x5bd1, ..sample_cfg })?;
        if verdict.verdict == Verdict::Transverse {
            return Ok(Extremal { omega, p, lambdas, basis: u, a: Some(a), verdict, seed: s });
        }
        last = format!("attempt {attempt}: negative-index form has sampled margin {:e}", verdict.margin);
    }
    Err(PositivityError::ConstructionFailed(last))
}

/// Check a strong-positivity certificate `Ω = Σ w_k σ_p τ_k ∧ τ̄_k` with
/// `w_k ≥ 0` and `τ_k = γ_{k1} ∧ … ∧ γ_{kp}`.
pub fn verify_strong_certificate(omega: &Form<Q>, p: usize, terms: &[(BigRational, Vec<Form<Q>>)]) -> bool {
    let n = omega.n();
    let s = sigma(p);
    let mut sum = Form::zero(n);
    for (w, gammas) in terms {
        if w.is_negative() || gammas.len() != p || gammas.iter().any(|g| g.terms().any(|(m, _)| m.bidegree() != (1, 0))) {
            return false;
        }
        let tau = gammas.iter().fold(Form::constant(n, Q::one()), |acc, g| acc.wedge(g));
        let c = Q::new(w.clone(), BigRational::zero()).mul(&s);
        sum = sum + tau.wedge(&tau.conj()).scale(&c);
    }
    sum == *omega
}

// ---------------------------------------------------------------------------
// Persistence along a deformation

#[derive(Clone, Debug)]
pub struct PersistenceConfig {
    pub samples: SampleConfig,
    /// Increasing radii to test.
    pub radii: Vec<f64>,
    /// Number of arguments `e^{iθ}` per radius.
    pub angles: usize,
}

#[derive(Clone, Debug)]
pub struct Persistence {
    /// Largest tested radius up to which every sampled objective is positive.
    pub delta: f64,
    /// Minimum objective per radius, over all angles and samples.
    pub minima: Vec<(f64, f64)>,
}

fn eval_form(f: &Form<Series<Q>>, t: Complex64) -> Form<C64> {
    f.map(|s| C64(s.eval(t)))
}

fn eval_vector(v: &VectorForm<Series<Q>>, t: Complex64) -> VectorForm<C64> {
    VectorForm::from_components(v.n(), v.comps().iter().map(|f| eval_form(f, t)).collect())
}

/// Positivity of `e^{ι_φ|ι_φ̄}(Ω(t)) ∧ σ_q e^{ι_φ}τ ∧ conj(e^{ι_φ}τ)` over
/// sampled `τ` on a grid of `t`, normalized by `|τ|² vol`.
pub fn persistence(
    family: &BiSeries<Form<Q>>,
    phi: &BiSeries<VectorForm<Q>>,
    p: usize,
    cfg: &PersistenceConfig,
) -> Result<Persistence, PositivityError> {
    let n = family.n();
    check_degree(n, p)?;
    check_pure(&family.coeff(0, 0), p)?;
    let q = n - p;
    let order = family.order().min(phi.order());
    let lifted_phi = phi.lift(order);
    let ext = extend(&lifted_phi, &family.lift(order));
    let taus: Vec<Decomposable> = {
        let mut t = sample_decomposable(n, q, cfg.samples.count, cfg.samples.seed);
        t.extend(cfg.samples.extra.iter().cloned());
        t
    };
    let top = Mono::new(((1u32 << n) - 1) as u16, ((1u32 << n) - 1) as u16);
    let scale = C64(sigma(q).mul(&sigma(n).try_inv().expect("σ_n is nonzero")).to_c64());
    let mut minima = Vec::new();
    let mut delta = 0.0;
    let mut alive = true;
    for &r in &cfg.radii {
        let angles = cfg.angles.max(1);
        let per_angle: Vec<f64> = (0..angles)
            .into_par_iter()
            .map(|a| {
                let t = Complex64::from_polar(r, std::f64::consts::TAU * a as f64 / angles as f64);
                let omega_t = eval_form(&ext, t);
                let phi_t = eval_vector(&lifted_phi, t);
                taus.iter()
                    .map(|tau| {
                        let tt = exp_contract(&phi_t, &tau.to_form());
                        let v = omega_t.wedge(&tt.wedge(&tt.conj()).scale(&scale)).coeff(&top);
                        v.0.re / tau.norm2()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let min = per_angle.into_iter().fold(f64::INFINITY, f64::min);
        minima.push((r, min));
        if alive && min > 0.0 {
            delta = r;
        } else {
            alive = false;
        }
    }
    Ok(Persistence { delta, minima })
}

/// Report helper: the facts of a constructed extremal form.
pub fn extremal_report(e: &Extremal, n: usize, kind: ExtremalKind) -> Report {
    let q = n - e.p;
    let mut r = Report::new("positivity", "construct");
    r.config("n", n).config("p", e.p).config("seed", e.seed).config(
        "kind",
        match kind {
            ExtremalKind::ExactIndex => "exact-index",
            ExtremalKind::NegativeIndex => "negative-index",
        },
    );
    r.fact("omega", form_json(&e.omega))
        .fact("lambdas", serde_json::json!(e.lambdas.iter().map(|l| l.to_string()).collect::<Vec<_>>()))
        .fact("N", serde_json::json!(binomial(n, q)))
        .fact("k", serde_json::json!(pluecker_codim(n, q)))
        .fact("margin", serde_json::json!(e.verdict.margin));
    if let Some(a) = e.a {
        r.fact("a", serde_json::json!(a));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn omega0(n: usize) -> Form<Q> {
        (0..n).fold(Form::zero(n), |acc, k| acc + Form::from_indices(n, &[k], &[k], Q::i()))
    }

    fn diag_form(n: usize, entries: &[i64]) -> Form<Q> {
        let mut theta = Matrix::zeros(n, n);
        for (k, &e) in entries.iter().enumerate() {
            theta.set(k, k, Q::from_i64(e));
        }
        PPFormRep { n, p: 1, basis: monomial_basis(n, 1), theta }.reassemble()
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(1), Q::complex(0, 1, 1, 2));
        assert_eq!(sigma(2), Q::ratio(1, 4));
        assert_eq!(sigma(3), Q::complex(0, 1, 1, 8));
    }

    #[test]
    fn kahler_form_is_twice_identity() {
        let rep = hermitian_rep(&omega0(3), 1).unwrap();
        assert_eq!(rep.theta, Matrix::identity(3).scale(&Q::from_i64(2)));
        let zero = hermitian_rep(&Form::zero(3), 1).unwrap();
        assert!(zero.theta.is_zero());
    }

    #[test]
    fn rep_round_trip_in_random_basis() {
        let mut rng = random::rng(4);
        let omega = random::form(&mut rng, 4, 2, 2, 0.5);
        assert_eq!(hermitian_rep(&omega, 2).unwrap().reassemble(), omega);
        let basis: Vec<Form<Q>> = (0..6).map(|_| random::form(&mut rng, 4, 2, 0, 0.8)).collect();
        match hermitian_rep_in(&omega, 2, &basis) {
            Ok(rep) => assert_eq!(rep.reassemble(), omega),
            Err(e) => assert_eq!(e, PositivityError::NotSpanning),
        }
        let degenerate = vec![basis[0].clone(); 6];
        assert_eq!(hermitian_rep_in(&omega, 2, &degenerate), Err(PositivityError::NotSpanning));
    }

    #[test]
    fn canonical_forms() {
        let id = HermitianMetric::identity(3);
        let c = canonical_form(&diag_form(3, &[1, 1, -1]), 1, &id).unwrap();
        assert_eq!(c.positive_index(), 2);
        assert_eq!(c.negative_index(), 1);
        assert!(c.exact_lambdas.is_some());

        // ω₀²/2 on C³ with a non-diagonal change of basis.
        let w = omega0(3);
        let w2 = w.wedge(&w).scale(&Q::ratio(1, 2));
        let c = canonical_form(&w2, 2, &id).unwrap();
        assert_eq!(c.positive_index(), 3);
        let mut rng = random::rng(1);
        let metric = HermitianMetric::random(&mut rng, 3);
        let mixed = w + Form::from_indices(3, &[0], &[1], Q::i()) + Form::from_indices(3, &[1], &[0], Q::i());
        let c = canonical_form(&mixed, 1, &metric).unwrap();
        assert!(c.exact_lambdas.is_none());
        assert_eq!(c.reassemble(), to_c64_form(&mixed));
    }

    #[test]
    fn codimensions() {
        for (n, q) in [(3, 1), (3, 2), (4, 1), (4, 3)] {
            assert_eq!(binomial(n, q) - pluecker_codim(n, q), n);
        }
        assert_eq!(pluecker_codim(5, 3), 3);
        assert_eq!(pluecker_codim(4, 2), 1);
    }

    #[test]
    fn samples_are_decomposable_and_seeded() {
        let a = sample_decomposable(5, 3, 30, 9);
        assert_eq!(a, sample_decomposable(5, 3, 30, 9));
        assert_ne!(a, sample_decomposable(5, 3, 30, 10));
        for t in &a {
            assert_eq!(t.to_form(), t.wedge_form());
            assert!(is_decomposable(&t.to_form(), 3, 1e-9));
        }
        let not = Form::from_indices(4, &[0, 1], &[], C64::one()) + Form::from_indices(4, &[2, 3], &[], C64::one());
        assert!(!is_decomposable(&not, 2, 1e-9));
    }

    #[test]
    fn objective_is_normalized() {
        // σ_p dz^I ∧ dz̄^I paired with dz^{I^c} gives exactly 1.
        let n = 4;
        let f = Form::from_indices(n, &[0, 2], &[0, 2], sigma(2));
        let tau = sample_decomposable(n, 2, 6, 0).into_iter().find(|t| t.coords[4].norm() > 0.5).unwrap();
        assert!((objective(&f, 2, &tau).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p1_transversality_matches_definiteness() {
        let mut rng = random::rng(21);
        let cfg = SampleConfig { count: 200, refine: false, ..Default::default() };
        for _ in 0..100 {
            let c = Matrix::from_rows((0..3).map(|_| (0..3).map(|_| random::gauss(&mut rng, 2)).collect()).collect());
            let shift = Q::from_i64(rng.gen_range(-3..=3));
            let theta = &(&c * &c.conj_transpose()) + &Matrix::identity(3).scale(&shift);
            let pd = theta.to_nalgebra().symmetric_eigen().eigenvalues.iter().all(|&l| l > 1e-9);
            let omega = PPFormRep { n: 3, p: 1, basis: monomial_basis(3, 1), theta }.reassemble();
            let v = transversality(&omega, 1, &cfg).unwrap();
            assert_eq!(v.verdict == Verdict::Transverse, pd);
            if v.verdict == Verdict::NotTransverse {
                assert!(v.margin <= 0.0);
            }
        }
        let v = transversality(&diag_form(3, &[1, 1, 0]), 1, &cfg).unwrap();
        assert_eq!(v.verdict, Verdict::NotTransverse);
    }

    #[test]
    fn transversality_scales() {
        let w = omega0(4);
        let w2 = w.wedge(&w);
        let cfg = SampleConfig { count: 300, ..Default::default() };
        let a = transversality(&w2, 2, &cfg).unwrap();
        let b = transversality(&w2.scale(&Q::ratio(1, 1000)), 2, &cfg).unwrap();
        assert_eq!(a.verdict, Verdict::Transverse);
        assert_eq!(a.verdict, b.verdict);
        assert!((a.margin / 1000.0 - b.margin).abs() < 1e-9);
    }

    #[test]
    fn index_bound_report() {
        let cfg = SampleConfig { count: 200, ..Default::default() };
        let r = positive_index_bound_check(&omega0(3), 1, &cfg).unwrap();
        assert!(r.all_passed());
        assert!(r.checks.iter().any(|c| c.name == "index >= N-k"));
        let r = positive_index_bound_check(&diag_form(3, &[1, 1, 0]), 1, &cfg).unwrap();
        assert!(!r.checks.iter().any(|c| c.name == "index >= N-k"));
    }

    #[test]
    fn cayley_is_unitary() {
        let u = cayley_unitary(5, 3);
        assert_eq!(&u.conj_transpose() * &u, Matrix::identity(5));
    }

    #[test]
    fn extremal_small_cases() {
        let cfg = SampleConfig { count: 1500, ..Default::default() };
        let e = construct_extremal(3, 2, ExtremalKind::ExactIndex, 0, &cfg).unwrap();
        let c = canonical_form(&e.omega, 2, &HermitianMetric::identity(3)).unwrap();
        assert_eq!(c.positive_index(), 3);
        assert!(construct_extremal(3, 2, ExtremalKind::NegativeIndex, 0, &cfg).is_err());
        let e = construct_extremal(4, 2, ExtremalKind::NegativeIndex, 0, &cfg).unwrap();
        let c = canonical_form(&e.omega, 2, &HermitianMetric::identity(4)).unwrap();
        assert_eq!((c.positive_index(), c.negative_index()), (5, 1));
        assert!(e.verdict.margin > 0.0);
    }

    #[test]
    fn strong_certificate() {
        let n = 3;
        let g1 = Form::from_indices(n, &[0], &[], Q::one()) + Form::from_indices(n, &[1], &[], Q::i());
        let g2 = Form::from_indices(n, &[2], &[], Q::one());
        let w = BigRational::new(3.into(), 2.into());
        let tau = g1.wedge(&g2);
        let omega = tau.wedge(&tau.conj()).scale(&sigma(2).mul(&Q::ratio(3, 2)));
        assert!(verify_strong_certificate(&omega, 2, &[(w.clone(), vec![g1.clone(), g2.clone()])]));
        assert!(!verify_strong_certificate(&omega, 2, &[(-w, vec![g1, g2])]));
    }

    #[test]
    fn persistence_of_a_constant_family() {
        let n = 3;
        let w = omega0(n);
        let family = BiSeries::constant(n, 2, w.clone());
        let phi: BiSeries<VectorForm<Q>> = BiSeries::zero(n, 2);
        let cfg = PersistenceConfig {
            samples: SampleConfig { count: 50, ..Default::default() },
            radii: vec![0.1, 0.2, 0.4],
            angles: 3,
        };
        let r = persistence(&family, &phi, 1, &cfg).unwrap();
        assert_eq!(r.delta, 0.4);

        // An order-1 term that flips the sign of one direction.
        let mut flip = family.clone();
        let bump = Form::from_indices(n, &[0], &[0], Q::complex(0, 1, -10, 1));
        flip.set(1, 0, bump.clone());
        flip.set(0, 1, bump);
        let r = persistence(&flip, &phi, 1, &cfg).unwrap();
        assert_eq!(r.delta, 0.0);
        let mut mild = family.clone();
        let small = Form::from_indices(n, &[0], &[0], Q::complex(0, 1, -1, 1));
        mild.set(1, 0, small.clone());
        mild.set(0, 1, small);
        let r = persistence(&mild, &phi, 1, &cfg).unwrap();
        assert_eq!(r.delta, 0.4);
    }
}
