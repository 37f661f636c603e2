//! Truncated power-series deformation engine.
//!
//! Series in one complex parameter `t` are carried as forms whose
//! coefficients are [`Series`], so wedge products, contractions and the
//! Chevalley–Eilenberg differential truncate consistently for free. Metric
//! operators (Green operators, adjoints) act coefficient by coefficient
//! through [`BiSeries`], the exploded `(i, j) ↦ t^i t̄^j` coefficient view.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::calculus::{bracket, integrability_defect, LieAlgebra};
use crate::exterior::{basis, exp_contract, extend, extend_inverse, phi_phibar, phibar_phi, Form, FrameEndo, VectorForm};
use crate::hodge::{Hodge, LapKind, Op, Space};
use crate::linalg::Matrix;
use crate::report::{form_json, Provenance, Report};
use crate::scalar::{Coeff, GaussRat, Scalar};
use crate::series::Series;

pub type SForm<S> = Form<Series<S>>;
pub type SVector<S> = VectorForm<Series<S>>;

/// What a [`BiSeries`] holds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ValueKind {
    Form,
    Vector,
    Frame,
}

/// Values that can be the coefficients of a [`BiSeries`].
pub trait SeriesValue: Clone + PartialEq + fmt::Debug {
    type S: Scalar;
    /// The same value with series coefficients.
    type Lifted: Clone;
    const KIND: ValueKind;
    fn zero_value(n: usize) -> Self;
    fn is_zero_value(&self) -> bool;
    fn lift(coeffs: &BTreeMap<(u32, u32), Self>, n: usize, order: u32) -> Self::Lifted;
    /// Coefficient of `t^i t̄^j` of a lifted value.
    fn lower(lifted: &Self::Lifted, i: u32, j: u32) -> Self;
    /// All `(i, j)` with a nonzero coefficient.
    fn support(lifted: &Self::Lifted) -> Vec<(u32, u32)>;
}

fn lift_form<S: Scalar>(coeffs: &BTreeMap<(u32, u32), Form<S>>, n: usize, order: u32) -> SForm<S> {
    let mut out: SForm<S> = Form::zero(n);
    for (&(i, j), f) in coeffs {
        for (m, c) in f.terms() {
            out.add_term(*m, Series::monomial(c.clone(), i, j, order));
        }
    }
    // Terms that cancel still carry the truncation order.
    out.map(|s| s.clone().with_order(order))
}

fn support_form<S: Scalar>(f: &SForm<S>) -> Vec<(u32, u32)> {
    let mut keys: Vec<(u32, u32)> = f.terms().flat_map(|(_, s)| s.terms().map(|(k, _)| *k).collect::<Vec<_>>()).collect();
    keys.sort_unstable();
    keys.dedup();
    keys
}

impl<S: Scalar> SeriesValue for Form<S> {
    type S = S;
    type Lifted = SForm<S>;
    const KIND: ValueKind = ValueKind::Form;
    fn zero_value(n: usize) -> Self {
        Form::zero(n)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn lift(coeffs: &BTreeMap<(u32, u32), Self>, n: usize, order: u32) -> SForm<S> {
        lift_form(coeffs, n, order)
    }
    fn lower(lifted: &SForm<S>, i: u32, j: u32) -> Self {
        lifted.map(|s| s.coeff(i, j))
    }
    fn support(lifted: &SForm<S>) -> Vec<(u32, u32)> {
        support_form(lifted)
    }
}

impl<S: Scalar> SeriesValue for VectorForm<S> {
    type S = S;
    type Lifted = SVector<S>;
    const KIND: ValueKind = ValueKind::Vector;
    fn zero_value(n: usize) -> Self {
        VectorForm::zero(n)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn lift(coeffs: &BTreeMap<(u32, u32), Self>, n: usize, order: u32) -> SVector<S> {
        let comps = (0..2 * n)
            .map(|g| {
                let slot: BTreeMap<(u32, u32), Form<S>> = coeffs.iter().map(|(k, v)| (*k, v.comp(g).clone())).collect();
                lift_form(&slot, n, order)
            })
            .collect();
        VectorForm::from_components(n, comps)
    }
    fn lower(lifted: &SVector<S>, i: u32, j: u32) -> Self {
        let n = lifted.n();
        VectorForm::from_components(n, lifted.comps().iter().map(|c| c.map(|s| s.coeff(i, j))).collect())
    }
    fn support(lifted: &SVector<S>) -> Vec<(u32, u32)> {
        let mut keys: Vec<(u32, u32)> = lifted.comps().iter().flat_map(support_form).collect();
        keys.sort_unstable();
        keys.dedup();
        keys
    }
}

impl<S: Scalar> SeriesValue for FrameEndo<S> {
    type S = S;
    type Lifted = FrameEndo<Series<S>>;
    const KIND: ValueKind = ValueKind::Frame;
    fn zero_value(n: usize) -> Self {
        FrameEndo::zero(n)
    }
    fn is_zero_value(&self) -> bool {
        self.to_vector().is_zero()
    }
    fn lift(coeffs: &BTreeMap<(u32, u32), Self>, n: usize, order: u32) -> FrameEndo<Series<S>> {
        let v: BTreeMap<(u32, u32), VectorForm<S>> = coeffs.iter().map(|(k, e)| (*k, e.to_vector())).collect();
        FrameEndo::from_images(n, VectorForm::lift(&v, n, order).comps().to_vec())
    }
    fn lower(lifted: &FrameEndo<Series<S>>, i: u32, j: u32) -> Self {
        let v = VectorForm::lower(&lifted.to_vector(), i, j);
        FrameEndo::from_images(lifted.n(), v.comps().to_vec())
    }
    fn support(lifted: &FrameEndo<Series<S>>) -> Vec<(u32, u32)> {
        VectorForm::support(&lifted.to_vector())
    }
}

/// A series `Σ c_{ij} t^i t̄^j` truncated at total degree `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<T> {
    n: usize,
    order: u32,
    coeffs: BTreeMap<(u32, u32), T>,
}

impl<T> BiSeries<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&(u32, u32), &T)> {
        self.coeffs.iter()
    }

    pub fn get(&self, i: u32, j: u32) -> Option<&T> {
        self.coeffs.get(&(i, j))
    }
}

impl<T: SeriesValue> BiSeries<T> {
    pub fn zero(n: usize, order: u32) -> Self {
        BiSeries { n, order, coeffs: BTreeMap::new() }
    }

    pub fn constant(n: usize, order: u32, value: T) -> Self {
        let mut s = BiSeries::zero(n, order);
        s.set(0, 0, value);
        s
    }

    pub fn kind(&self) -> ValueKind {
        T::KIND
    }

    pub fn coeff(&self, i: u32, j: u32) -> T {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(|| T::zero_value(self.n))
    }

    /// Store a coefficient; degrees beyond the truncation order are dropped.
    pub fn set(&mut self, i: u32, j: u32, value: T) {
        if i + j > self.order || value.is_zero_value() {
            self.coeffs.remove(&(i, j));
        } else {
            self.coeffs.insert((i, j), value);
        }
    }

    /// The coefficients of total degree `k`, in increasing `i`.
    pub fn homogeneous(&self, k: u32) -> Vec<((u32, u32), T)> {
        (0..=k).filter_map(|i| self.get(i, k - i).map(|v| ((i, k - i), v.clone()))).collect()
    }

    pub fn is_zero_through(&self, k: u32) -> bool {
        self.coeffs.keys().all(|(i, j)| i + j > k)
    }

    pub fn truncate(&self, order: u32) -> Self {
        BiSeries {
            n: self.n,
            order: order.min(self.order),
            coeffs: self.coeffs.iter().filter(|((i, j), _)| i + j <= order).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// Series-coefficient view, truncated at `order` (which may exceed the
    /// stored order; missing coefficients are zero).
    pub fn lift(&self, order: u32) -> T::Lifted {
        T::lift(&self.coeffs, self.n, order)
    }

    pub fn from_lifted(lifted: &T::Lifted, n: usize, order: u32) -> Self {
        let mut s = BiSeries::zero(n, order);
        for (i, j) in T::support(lifted) {
            s.set(i, j, T::lower(lifted, i, j));
        }
        s
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        let mut out = BiSeries::zero(self.n, self.order);
        for (&(i, j), v) in &self.coeffs {
            out.set(i, j, f(v));
        }
        out
    }
}

impl<S: Scalar> BiSeries<Form<S>> {
    pub fn conj(&self) -> Self {
        let mut out = BiSeries::zero(self.n, self.order);
        for (&(i, j), v) in &self.coeffs {
            out.set(j, i, v.conj());
        }
        out
    }

    /// `c_{ij} = conj(c_{ji})` for all stored degrees.
    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        for (&(i, j), v) in &other.coeffs {
            let s = out.coeff(i, j) + v.clone();
            out.set(i, j, s);
        }
        out.truncate(out.order)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|f| f.scale(c))
    }
}

/// Apply a coefficientwise operator to a series form.
fn per_coeff<S: Scalar>(f: &SForm<S>, n: usize, order: u32, op: impl Fn(&Form<S>) -> Form<S>) -> SForm<S> {
    BiSeries::from_lifted(f, n, order).map(op).lift(order)
}

fn per_coeff_vec<S: Scalar>(
    v: &SVector<S>,
    n: usize,
    order: u32,
    op: impl Fn(&VectorForm<S>) -> VectorForm<S>,
) -> SVector<S> {
    BiSeries::from_lifted(v, n, order).map(op).lift(order)
}

fn homog<S: Scalar>(f: &SForm<S>, k: u32) -> SForm<S> {
    f.map(|s| s.homogeneous(k))
}

fn homog_vec<S: Scalar>(v: &SVector<S>, k: u32) -> SVector<S> {
    v.map_forms(|f| homog(f, k))
}

fn lift_const<S: Scalar>(f: &Form<S>, order: u32) -> SForm<S> {
    f.map(|c| Series::constant(c.clone()).with_order(order))
}

/// A `∂∂̄`-, `∂̄`- or `∂`-equation that has no solution at some order.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionHit<S> {
    pub order: u32,
    pub equation: &'static str,
    /// Harmonic part (or residual) of the right-hand side at the first
    /// failing coefficient.
    pub witness: Form<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExtensionError<S> {
    Precondition(String),
    Obstruction(ObstructionHit<S>),
}

impl<S: Scalar> fmt::Display for ExtensionError<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionError::Precondition(s) => write!(f, "precondition failed: {s}"),
            ExtensionError::Obstruction(h) => {
                write!(f, "obstruction at order {} ({}): witness {}", h.order, h.equation, h.witness)
            }
        }
    }
}

impl<S: Scalar> std::error::Error for ExtensionError<S> {}

/// One residual of a verification, by check name and total degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual<S> {
    pub check: &'static str,
    pub order: u32,
    pub coeffs: Vec<((u32, u32), Form<S>)>,
}

impl<S: Scalar> Residual<S> {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|(_, f)| f.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residuals<S> {
    pub rows: Vec<Residual<S>>,
}

impl<S: Scalar> Residuals<S> {
    fn push(&mut self, check: &'static str, order: u32, f: &SForm<S>, n: usize, series_order: u32) {
        let b = BiSeries::from_lifted(f, n, series_order);
        self.rows.push(Residual { check, order, coeffs: b.homogeneous(order) });
    }

    pub fn all_zero(&self) -> bool {
        self.rows.iter().all(Residual::is_zero)
    }

    pub fn failing(&self) -> Vec<&Residual<S>> {
        self.rows.iter().filter(|r| !r.is_zero()).collect()
    }

    /// Append one check per row to a report.
    pub fn add_to(&self, report: &mut Report) {
        for r in &self.rows {
            let detail = match r.coeffs.iter().find(|(_, f)| !f.is_zero()) {
                None => String::new(),
                Some(((i, j), f)) => format!("t^{i} tbar^{j}: {}", form_json(f)),
            };
            report.check(&format!("{}[{}]", r.check, r.order), r.is_zero(), detail);
        }
    }
}

// ---------------------------------------------------------------------------
// Kuranishi recursion

#[derive(Clone, Debug)]
pub struct Kuranishi<S> {
    /// Harmonic `T^{1,0}`-valued `(0,1)`-forms `η_ν`.
    pub basis: Vec<VectorForm<S>>,
    /// `φ(t) = Σ_k φ_k t^k`.
    pub phi: BiSeries<VectorForm<S>>,
    /// `H[φ,φ]_k` for `k = 2..=order`.
    pub obstructions: Vec<(u32, VectorForm<S>)>,
}

impl<S: Scalar> Kuranishi<S> {
    pub fn order(&self) -> u32 {
        self.phi.order()
    }

    /// First order with a nonzero obstruction.
    pub fn first_obstruction(&self) -> Option<u32> {
        self.obstructions.iter().find(|(_, h)| !h.is_zero()).map(|(k, _)| *k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionMismatch {
    pub expected: usize,
    pub got: usize,
}

impl fmt::Display for DirectionMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "direction has {} coefficients but the harmonic basis has {}", self.got, self.expected)
    }
}

impl std::error::Error for DirectionMismatch {}

/// `φ_1 = Σ c_ν η_ν`, `φ_k = ½ ∂̄*G Σ_{i+j=k} [φ_i, φ_j]`; obstructions are
/// the harmonic parts of the bracket sums.
pub fn kuranishi<S: Scalar>(hodge: &Hodge<S>, order: u32, direction: &[S]) -> Result<Kuranishi<S>, DirectionMismatch> {
    let n = hodge.n();
    let alg = hodge.algebra();
    let basis = hodge.harmonic_beltrami_basis();
    if direction.len() != basis.len() {
        return Err(DirectionMismatch { expected: basis.len(), got: direction.len() });
    }
    let mut phi: BiSeries<VectorForm<S>> = BiSeries::zero(n, order);
    let phi1 = basis.iter().zip(direction).fold(VectorForm::zero(n), |acc, (b, c)| acc + b.scale(c));
    phi.set(1, 0, phi1);
    let half = S::from_ratio(1, 2);
    let mut obstructions = Vec::new();
    for k in 2..=order {
        let mut sum = VectorForm::zero(n);
        for i in 1..k {
            sum = sum + bracket(alg, &phi.coeff(i, 0), &phi.coeff(k - i, 0));
        }
        obstructions.push((k, hodge.harmonic_vec(&sum)));
        let next = hodge.dbar_star_vec(&hodge.green_vec(&sum)).scale(&half);
        phi.set(k, 0, next);
    }
    Ok(Kuranishi { basis, phi, obstructions })
}

/// Per-order residuals of `φ − φ_1 − ½∂̄*G[φ,φ]`, evaluated with series
/// arithmetic rather than the per-order convolution.
pub fn fixed_point_residuals<S: Scalar>(hodge: &Hodge<S>, k: &Kuranishi<S>) -> Vec<(u32, VectorForm<S>)> {
    let n = hodge.n();
    let order = k.order();
    let phi = k.phi.lift(order);
    let br = bracket(hodge.algebra(), &phi, &phi);
    let corr = per_coeff_vec(&br, n, order, |v| hodge.dbar_star_vec(&hodge.green_vec(v)));
    let phi1 = BiSeries::constant(n, order, VectorForm::zero(n));
    let mut phi1 = phi1;
    phi1.set(1, 0, k.phi.coeff(1, 0));
    let rhs = phi1.lift(order) + corr.scale(&Series::constant(S::from_ratio(1, 2)));
    let diff = &phi - &rhs;
    (1..=order).map(|d| (d, VectorForm::lower(&homog_vec(&diff, d), d, 0))).collect()
}

/// Per-order `∂̄φ − ½[φ,φ]` for a holomorphic series `φ`.
pub fn integrability_residuals<S: Scalar>(alg: &LieAlgebra, phi: &BiSeries<VectorForm<S>>) -> Vec<(u32, VectorForm<S>)> {
    let order = phi.order();
    let lifted = phi.lift(order);
    let defect = integrability_defect(alg, &lifted);
    let b = BiSeries::from_lifted(&defect, phi.n(), order);
    (1..=order)
        .map(|d| {
            let sum = b.homogeneous(d).into_iter().fold(VectorForm::zero(phi.n()), |acc, (_, v)| acc + v);
            (d, sum)
        })
        .collect()
}

fn check_integrable<S: Scalar>(alg: &LieAlgebra, phi: &BiSeries<VectorForm<S>>, order: u32) -> Result<(), ExtensionError<S>> {
    let phi = phi.truncate(order);
    if let Some((k, _)) = integrability_residuals(alg, &phi).into_iter().find(|(_, v)| !v.is_zero()) {
        return Err(ExtensionError::Precondition(format!("φ is not integrable at order {k}")));
    }
    if phi.coeffs().any(|((_, j), _)| *j > 0) || !phi.coeff(0, 0).is_zero() {
        return Err(ExtensionError::Precondition("φ must be holomorphic in t with φ(0) = 0".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Kähler extension

/// Canonical real solution of the reduced Kähler obstruction system:
/// `ω_N = (φ̄φ⌟ω − φ⌟φ̄⌟ω)_N + ∂∂̄*G_∂̄(φ⌟ω)_N + ∂̄∂*G_∂(φ̄⌟ω)_N`.
pub fn extend_kahler<S: Scalar>(
    hodge: &Hodge<S>,
    omega0: &Form<S>,
    phi: &BiSeries<VectorForm<S>>,
    order: u32,
) -> Result<BiSeries<Form<S>>, ExtensionError<S>> {
    let alg = hodge.algebra();
    let n = hodge.n();
    if !omega0.is_of_type(1, 1) || omega0.conj() != *omega0 {
        return Err(ExtensionError::Precondition("ω₀ must be a real (1,1)-form".into()));
    }
    if !alg.d(omega0).is_zero() {
        return Err(ExtensionError::Precondition("ω₀ is not d-closed".into()));
    }
    check_integrable(alg, phi, order)?;
    let mut omega = BiSeries::constant(n, order, omega0.clone());
    for big_n in 1..=order {
        let w = omega.lift(big_n);
        let p = phi.lift(big_n);
        let pb = p.conj();
        let a = homog(&(phibar_phi(&p).contract(&w) - p.contract(&pb.contract(&w))), big_n);
        let b = homog(&p.contract(&w), big_n);
        let c = homog(&pb.contract(&w), big_n);
        let gb = per_coeff(&b, n, big_n, |f| {
            hodge.apply(Op::Del, &hodge.apply(Op::DbarStar, &hodge.green_apply(LapKind::Dbar, f)))
        });
        let gc = per_coeff(&c, n, big_n, |f| {
            hodge.apply(Op::Dbar, &hodge.apply(Op::DelStar, &hodge.green_apply(LapKind::Del, f)))
        });
        let next: BiSeries<Form<S>> = BiSeries::from_lifted(&(a + gb + gc), n, big_n);
        for (&(i, j), v) in next.coeffs() {
            omega.set(i, j, v.clone());
        }
        let res = reduced_residuals(alg, &omega.truncate(big_n), &phi.truncate(big_n), big_n);
        if let Some(r) = res.rows.iter().find(|r| r.order == big_n && !r.is_zero()) {
            let witness = r.coeffs.iter().find(|(_, f)| !f.is_zero()).map(|(_, f)| f.clone()).unwrap();
            return Err(ExtensionError::Obstruction(ObstructionHit { order: big_n, equation: r.check, witness }));
        }
    }
    Ok(omega)
}

/// Residuals of the reduced system
/// `∂̄ω = ∂̄(φ̄φ⌟ω − φ⌟φ̄⌟ω) − ∂(φ⌟ω)`, `∂ω = ∂(φφ̄⌟ω − φ̄⌟φ⌟ω) − ∂̄(φ̄⌟ω)`.
pub fn reduced_residuals<S: Scalar>(
    alg: &LieAlgebra,
    omega: &BiSeries<Form<S>>,
    phi: &BiSeries<VectorForm<S>>,
    order: u32,
) -> Residuals<S> {
    let n = alg.n();
    let w = omega.lift(order);
    let p = phi.lift(order);
    let pb = p.conj();
    let first = alg.delbar(&w) - alg.delbar(&(phibar_phi(&p).contract(&w) - p.contract(&pb.contract(&w))))
        + alg.del(&p.contract(&w));
    let second = alg.del(&w) - alg.del(&(phi_phibar(&p).contract(&w) - pb.contract(&p.contract(&w))))
        + alg.delbar(&pb.contract(&w));
    let mut out = Residuals { rows: Vec::new() };
    for k in 0..=order {
        out.push("reduced-dbar", k, &first, n, order);
        out.push("reduced-del", k, &second, n, order);
    }
    out
}

/// `[∂, ι_V]β = ∂(V⌟β) − V⌟∂β`.
fn del_commutator<R: Coeff>(alg: &LieAlgebra, v: &VectorForm<R>, beta: &Form<R>) -> Form<R> {
    alg.del(&v.contract(beta)) - v.contract(&alg.del(beta))
}

fn dbar_commutator<R: Coeff>(alg: &LieAlgebra, v: &VectorForm<R>, beta: &Form<R>) -> Form<R> {
    alg.delbar(&v.contract(beta)) - v.contract(&alg.delbar(beta))
}

/// Checks a Kähler-type solution: the reduced system through `order`, the
/// `d`-closedness obstruction pair
/// `([∂,ι_φ]+∂̄)(𝟙−φ̄φ)⨝ω = 0`, `([∂̄,ι_φ̄]+∂)(𝟙−φφ̄)⨝ω = 0` through `order`,
/// and `∂̄(φ⌟ω)_k = 0` for `k ≤ order + 1`.
pub fn verify_reduction<S: Scalar>(
    alg: &LieAlgebra,
    omega: &BiSeries<Form<S>>,
    phi: &BiSeries<VectorForm<S>>,
    order: u32,
) -> Residuals<S> {
    let n = alg.n();
    let mut out = reduced_residuals(alg, omega, phi, order);
    let w = omega.lift(order);
    let p = phi.lift(order);
    let pb = p.conj();
    let id = FrameEndo::identity(n);
    let a = id.sub(&FrameEndo::from_vector(&phibar_phi(&p))).apply(&w);
    let b = id.sub(&FrameEndo::from_vector(&phi_phibar(&p))).apply(&w);
    let first = del_commutator(alg, &p, &a) + alg.delbar(&a);
    let second = dbar_commutator(alg, &pb, &b) + alg.del(&b);
    for k in 0..=order {
        out.push("obstruction-first", k, &first, n, order);
        out.push("obstruction-second", k, &second, n, order);
    }
    let w1 = omega.lift(order + 1);
    let p1 = phi.lift(order + 1);
    let closed = alg.delbar(&p1.contract(&w1));
    for k in 0..=order + 1 {
        out.push("dbar-phi-omega", k, &closed, n, order + 1);
    }
    out
}

/// `d(e^{ι_φ|ι_φ̄}(α(t)))` per order, and agreement of that expansion with
/// `e^{ι_φ|ι_φ̄}(((𝟙−φ̄φ)^{-1} − (𝟙−φ̄φ)^{-1}φ̄) ⨝ ([∂,ι_φ]+∂̄+∂)(𝟙−φ̄φ+φ̄) ⨝ α)`.
pub fn verify_extension_closed<S: Scalar>(
    alg: &LieAlgebra,
    series: &BiSeries<Form<S>>,
    phi: &BiSeries<VectorForm<S>>,
    order: u32,
) -> Residuals<S> {
    let n = alg.n();
    let a = series.lift(order);
    let p = phi.lift(order);
    let lhs = alg.d(&extend(&p, &a));
    let mut out = Residuals { rows: Vec::new() };
    for k in 0..=order {
        out.push("d-extension", k, &lhs, n, order);
    }
    let rhs = extension_differential(alg, &p, &a, order, false);
    let diff = &lhs - &rhs;
    for k in 0..=order {
        out.push("expansion-agreement", k, &diff, n, order);
    }
    out
}

/// The conjugated-differential side of the extension identity.
fn extension_differential<S: Scalar>(
    alg: &LieAlgebra,
    p: &SVector<S>,
    a: &SForm<S>,
    order: u32,
    swapped: bool,
) -> SForm<S> {
    let n = alg.n();
    let pb = p.conj();
    let id = FrameEndo::identity(n);
    let b = FrameEndo::from_vector(&phibar_phi(p));
    let pb_endo = FrameEndo::from_vector(&pb);
    let inv = neumann_sum(&b, order);
    let left = inv.sub(&if swapped { pb_endo.then(&inv) } else { inv.then(&pb_endo) });
    let right = id.sub(&b).add(&pb_endo);
    let inner = right.apply(a);
    let mid = del_commutator(alg, p, &inner) + alg.d(&inner);
    extend(p, &left.apply(&mid))
}

fn frame_is_zero<R: Coeff>(e: &FrameEndo<R>) -> bool {
    e.to_vector().is_zero()
}

fn neumann_sum<S: Scalar>(b: &FrameEndo<Series<S>>, order: u32) -> FrameEndo<Series<S>> {
    let n = b.n();
    let mut sum = FrameEndo::identity(n);
    let mut power = FrameEndo::identity(n);
    for _ in 0..=order {
        power = power.then(b);
        if frame_is_zero(&power) {
            break;
        }
        sum = sum.add(&power);
    }
    sum
}

/// `(𝟙 − φ̄φ)^{-1} = Σ_k (φ̄φ)^k` as a series of frame endomorphisms.
pub fn neumann_inverse<S: Scalar>(phi: &BiSeries<VectorForm<S>>, order: u32) -> BiSeries<FrameEndo<S>> {
    let p = phi.lift(order);
    let b = FrameEndo::from_vector(&phibar_phi(&p));
    BiSeries::from_lifted(&neumann_sum(&b, order), phi.n(), order)
}

/// `(𝟙 − φ̄φ)^{-1}φ̄` as a `T^{0,1}`-valued `(1,0)`-form: `Σ_k φ̄ ⌟ (φ̄φ)^k`
/// with `(V ⌟ W)` the composite "apply `V`, then `W`".
pub fn psi_series<S: Scalar>(p: &SVector<S>, order: u32) -> SVector<S> {
    let b = phibar_phi(p);
    let mut term = p.conj();
    let mut sum = term.clone();
    for _ in 0..=order {
        term = term.contract_vec(&b);
        if term.is_zero() {
            break;
        }
        sum = sum + term.clone();
    }
    sum
}

// ---------------------------------------------------------------------------
// Balanced extension

#[derive(Clone, Debug)]
pub struct BalancedExtension<S> {
    /// `Ω̃(t)`, solving the transformed system with `Ω̃(0) = ω^{n−1}`.
    pub omega_tilde: BiSeries<Form<S>>,
    /// `Ω(t)` recovered from `Ω̃`.
    pub omega: BiSeries<Form<S>>,
    /// `½(Ω + Ω̄)`.
    pub omega_real: BiSeries<Form<S>>,
}

fn ddbar_solve<S: Scalar>(
    hodge: &Hodge<S>,
    y: &SForm<S>,
    order: u32,
    equation: &'static str,
) -> Result<SForm<S>, ExtensionError<S>> {
    let n = hodge.n();
    let b = BiSeries::from_lifted(y, n, order);
    let mut out = BiSeries::zero(n, order);
    for (&(i, j), f) in b.coeffs() {
        match hodge.solve_ddbar_minimal(f) {
            Ok(x) => out.set(i, j, x),
            Err(u) => {
                let witness = if u.harmonic.is_zero() { u.residual } else { u.harmonic };
                return Err(ExtensionError::Obstruction(ObstructionHit { order: i + j, equation, witness }));
            }
        }
    }
    Ok(out.lift(order))
}

/// The two transformed balanced equations applied to `Ω̃`, per order.
pub fn balanced_system_residuals<S: Scalar>(
    alg: &LieAlgebra,
    omega_tilde: &BiSeries<Form<S>>,
    phi: &BiSeries<VectorForm<S>>,
    order: u32,
) -> Residuals<S> {
    let n = alg.n();
    let w = omega_tilde.lift(order);
    let p = phi.lift(order);
    let psi = psi_series(&p, order);
    let x = psi.contract(&w);
    let half = Series::constant(S::from_ratio(1, 2));
    let first = alg.delbar(&w)
        + alg.del(&p.contract(&w))
        + alg.delbar(&p.contract(&x))
        + alg.del(&p.contract(&p.contract(&x))).scale(&half);
    let second = alg.del(&w) + alg.delbar(&x) + alg.del(&p.contract(&x));
    let mut out = Residuals { rows: Vec::new() };
    for k in 0..=order {
        out.push("balanced-first", k, &first, n, order);
        out.push("balanced-second", k, &second, n, order);
    }
    out
}

/// Canonical order-by-order solution of the transformed balanced system
/// with Bott–Chern Green operators, then `Ω = e^{ι_φ|ι_φ̄}⁻¹ e^{ι_φ} e^{ι_ψ} Ω̃`
/// with `ψ = (𝟙−φ̄φ)^{-1}φ̄`. Stops at the first order whose `∂∂̄`-equation
/// has no solution.
pub fn extend_balanced<S: Scalar>(
    hodge: &Hodge<S>,
    omega0: &Form<S>,
    phi: &BiSeries<VectorForm<S>>,
    order: u32,
) -> Result<BalancedExtension<S>, ExtensionError<S>> {
    let alg = hodge.algebra();
    let n = hodge.n();
    if n < 2 || !omega0.is_of_type(1, 1) || omega0.conj() != *omega0 {
        return Err(ExtensionError::Precondition("ω₀ must be a real (1,1)-form with n ≥ 2".into()));
    }
    let start = (1..n - 1).fold(omega0.clone(), |acc, _| acc.wedge(omega0));
    if !alg.d(&start).is_zero() {
        return Err(ExtensionError::Precondition("ω₀ is not balanced: d(ω₀^{n−1}) ≠ 0".into()));
    }
    check_integrable(alg, phi, order)?;
    let mut tilde = BiSeries::constant(n, order, start);
    let half = Series::constant(S::from_ratio(1, 2));
    for l in 1..=order {
        let w = tilde.lift(l);
        let p = phi.lift(l);
        let psi = psi_series(&p, l);
        let x = psi.contract(&w);
        let t1 = homog(&p.contract(&x), l);
        let y = p.contract(&w) + p.contract(&p.contract(&x)).scale(&half);
        let mu = ddbar_solve(hodge, &homog(&alg.delbar(&x), l).map(Coeff::neg), l, "ddbar from dbar")?;
        let nu = ddbar_solve(hodge, &homog(&alg.del(&y), l), l, "ddbar from del")?;
        let next = alg.delbar(&mu) + alg.del(&nu) - t1;
        let next: BiSeries<Form<S>> = BiSeries::from_lifted(&next, n, l);
        for (&(i, j), v) in next.coeffs() {
            tilde.set(i, j, v.clone());
        }
        let res = balanced_system_residuals(alg, &tilde.truncate(l), &phi.truncate(l), l);
        if let Some(r) = res.rows.iter().find(|r| r.order == l && !r.is_zero()) {
            let witness = r.coeffs.iter().find(|(_, f)| !f.is_zero()).map(|(_, f)| f.clone()).unwrap();
            return Err(ExtensionError::Obstruction(ObstructionHit { order: l, equation: r.check, witness }));
        }
    }
    let p = phi.lift(order);
    let psi = psi_series(&p, order);
    let w = tilde.lift(order);
    let lifted = extend_inverse(&p, &exp_contract(&p, &exp_contract(&psi, &w)))
        .map_err(|e| ExtensionError::Precondition(format!("extension map not invertible: {e}")))?;
    let omega = BiSeries::from_lifted(&lifted, n, order);
    let omega_real = omega.add(&omega.conj()).scale(&S::from_ratio(1, 2));
    Ok(BalancedExtension { omega_tilde: tilde, omega, omega_real })
}

// ---------------------------------------------------------------------------
// Projection extension of closed forms

/// Which closedness the projected extension preserves.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClosedKind {
    /// `d`-closed, via the projection onto `ker ∂_t ∩ ker ∂̄_t`.
    D,
    /// `∂∂̄`-closed, via the projection onto `ker ∂_t∂̄_t`.
    DdBar,
}

/// The pulled-back differential `e^{ι_φ|ι_φ̄}⁻¹ ∘ d ∘ e^{ι_φ|ι_φ̄}`.
fn pulled_back_d<S: Scalar>(alg: &LieAlgebra, p: &SVector<S>, beta: &SForm<S>) -> SForm<S> {
    extend_inverse(p, &alg.d(&extend(p, beta))).expect("extension map is invertible near t = 0")
}

fn stack<R: Coeff>(f: &Form<R>, parts: &[(usize, usize)]) -> Vec<R> {
    parts.iter().flat_map(|&(p, q)| f.to_vector(p, q)).collect()
}

fn unstack<R: Coeff>(n: usize, v: &[R], parts: &[(usize, usize)]) -> Form<R> {
    let mut out = Form::zero(n);
    let mut at = 0;
    for &(p, q) in parts {
        let d = basis(n, p, q).len();
        out = out + Form::from_vector(n, p, q, &v[at..at + d]);
        at += d;
    }
    out
}

fn coeff_matrix<S: Scalar>(m: &Matrix<Series<S>>, i: u32, j: u32) -> Matrix<S> {
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            out.set(r, c, m.get(r, c).coeff(i, j));
        }
    }
    out
}

/// Extend a closed `(r,s)`-form by projecting `e^{ι_φ|ι_φ̄}(Ω₀)` onto the
/// closed forms of the deformed structure, pulled back to the reference
/// structure. The deformed inner product is the reference one transported
/// by the extension map. Kernel vectors of the pulled-back operator are
/// continued order by order; an order where that fails is an obstruction.
pub fn extend_dclosed_projection<S: Scalar>(
    hodge: &Hodge<S>,
    input: &Form<S>,
    phi: &BiSeries<VectorForm<S>>,
    order: u32,
    kind: ClosedKind,
) -> Result<BiSeries<Form<S>>, ExtensionError<S>> {
    let alg = hodge.algebra();
    let n = hodge.n();
    let (r, s) = input
        .bidegree()
        .ok_or_else(|| ExtensionError::Precondition("input must be of pure type".into()))?;
    let closed = match kind {
        ClosedKind::D => alg.d(input).is_zero(),
        ClosedKind::DdBar => alg.del(&alg.delbar(input)).is_zero(),
    };
    if !closed {
        return Err(ExtensionError::Precondition("input is not closed".into()));
    }
    check_integrable(alg, phi, order)?;
    let p = phi.lift(order);
    let parts: Vec<(usize, usize)> = match kind {
        ClosedKind::D => (0..=r + s + 1).map(|a| (a, r + s + 1 - a)).filter(|&(a, b)| a <= n && b <= n).collect(),
        ClosedKind::DdBar => vec![(r + 1, s + 1)],
    };
    let op = |beta: &SForm<S>| -> SForm<S> {
        match kind {
            ClosedKind::D => pulled_back_d(alg, &p, beta),
            ClosedKind::DdBar => {
                let dbar_t = pulled_back_d(alg, &p, beta).component(r, s + 1);
                pulled_back_d(alg, &p, &dbar_t).component(r + 1, s + 1)
            }
        }
    };
    let src = basis(n, r, s);
    let dim = src.len();
    let cols: Vec<Vec<Series<S>>> = src
        .iter()
        .map(|m| {
            let e = lift_const(&Form::monomial(n, *m, S::one()), order);
            stack(&op(&e), &parts)
        })
        .collect();
    let rows = cols.first().map_or(0, Vec::len);
    let mt = Matrix::from_cols(rows, &cols);
    let m0 = coeff_matrix(&mt, 0, 0);
    let ker0 = if rows == 0 { (0..dim).map(|i| unit::<S>(dim, i)).collect() } else { m0.kernel() };
    let degrees: Vec<(u32, u32)> = (1..=order).flat_map(|k| (0..=k).map(move |i| (i, k - i))).collect();
    let mut kernel_series: Vec<Vec<Series<S>>> = Vec::new();
    for k0 in ker0 {
        let mut coeffs: BTreeMap<(u32, u32), Vec<S>> = BTreeMap::new();
        coeffs.insert((0, 0), k0);
        for &(i, j) in &degrees {
            let mut rhs = vec![S::zero(); rows];
            for (&(a, b), v) in &coeffs {
                if a > i || b > j || (a, b) == (i, j) {
                    continue;
                }
                let mij = coeff_matrix(&mt, i - a, j - b);
                for (x, y) in rhs.iter_mut().zip(mij.apply(v)) {
                    *x = x.sub(&y);
                }
            }
            if rows == 0 {
                continue;
            }
            match m0.solve(&rhs) {
                Some(x) => {
                    coeffs.insert((i, j), x);
                }
                None => {
                    return Err(ExtensionError::Obstruction(ObstructionHit {
                        order: i + j,
                        equation: "kernel continuation",
                        witness: unstack(n, &rhs, &parts),
                    }))
                }
            }
        }
        let series = (0..dim)
            .map(|c| {
                let mut sr = Series::zero_with_order(order);
                for (&(i, j), v) in &coeffs {
                    sr.set(i, j, v[c].clone());
                }
                sr
            })
            .collect();
        kernel_series.push(series);
    }
    if kernel_series.is_empty() {
        return Ok(BiSeries::zero(n, order));
    }
    // P = V (V^H Γ V)^{-1} V^H Γ applied to the input coordinates.
    let v = Matrix::from_cols(dim, &kernel_series);
    let gram = hodge.gram(Space::forms(r, s));
    let mut g = Matrix::zeros(dim, dim);
    for a in 0..dim {
        for b in 0..dim {
            g.set(a, b, Series::constant(gram.get(a, b).clone()));
        }
    }
    let vh = v.conj_transpose();
    let middle = (&(&vh * &g) * &v)
        .inverse()
        .ok_or_else(|| ExtensionError::Precondition("kernel Gram matrix is singular".into()))?;
    let x: Vec<Series<S>> = input.to_vector(r, s).into_iter().map(|c| Series::constant(c).with_order(order)).collect();
    let y = v.apply(&middle.apply(&vh.apply(&g.apply(&x))));
    let out = Form::from_vector(n, r, s, &y);
    Ok(BiSeries::from_lifted(&out, n, order))
}

fn unit<S: Scalar>(d: usize, i: usize) -> Vec<S> {
    let mut v = vec![S::zero(); d];
    v[i] = S::one();
    v
}

/// Per-order closedness residuals of a projected extension.
pub fn verify_projection<S: Scalar>(
    alg: &LieAlgebra,
    series: &BiSeries<Form<S>>,
    phi: &BiSeries<VectorForm<S>>,
    order: u32,
    kind: ClosedKind,
) -> Residuals<S> {
    let n = alg.n();
    let p = phi.lift(order);
    let a = series.lift(order);
    let res = match kind {
        ClosedKind::D => alg.d(&extend(&p, &a)),
        ClosedKind::DdBar => {
            let Some((r, s)) = series.coeff(0, 0).bidegree() else {
                return Residuals { rows: Vec::new() };
            };
            let dbar_t = pulled_back_d(alg, &p, &a).component(r, s + 1);
            pulled_back_d(alg, &p, &dbar_t).component(r + 1, s + 1)
        }
    };
    let mut out = Residuals { rows: Vec::new() };
    for k in 0..=order {
        out.push(if kind == ClosedKind::D { "d-closed" } else { "ddbar-closed" }, k, &res, n, order);
    }
    out
}

// ---------------------------------------------------------------------------
// Majorant series

/// Parameters of `A(t) = (β/16γ) Σ_{m≥1} (γt)^m / m²`.
#[derive(Clone, Debug, PartialEq)]
pub struct MajorantParams {
    pub beta: BigRational,
    pub gamma: BigRational,
    pub order: u32,
}

impl MajorantParams {
    pub fn new(beta: BigRational, gamma: BigRational, order: u32) -> Result<Self, String> {
        if !beta.is_positive() || !gamma.is_positive() {
            return Err("β and γ must be positive".into());
        }
        Ok(MajorantParams { beta, gamma, order })
    }

    pub fn from_ints(beta: i64, gamma: i64, order: u32) -> Result<Self, String> {
        Self::new(BigRational::from_integer(beta.into()), BigRational::from_integer(gamma.into()), order)
    }
}

/// Coefficients `A_0 = 0, A_m = (β/16γ) γ^m / m²` through the order.
pub fn majorant(p: &MajorantParams) -> Vec<BigRational> {
    let lead = &p.beta / (&p.gamma * BigRational::from_integer(16.into()));
    let mut out = vec![BigRational::zero()];
    let mut gpow = BigRational::from_integer(1.into());
    for m in 1..=p.order as i64 {
        gpow = &gpow * &p.gamma;
        out.push(&lead * &gpow / BigRational::from_integer(BigInt::from(m * m)));
    }
    out
}

/// Cauchy product of two coefficient lists, truncated to the shorter one.
pub fn series_product(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let len = a.len().min(b.len());
    (0..len)
        .map(|m| (0..=m).fold(BigRational::zero(), |acc, i| acc + &a[i] * &b[m - i]))
        .collect()
}

/// `b ≪ a`: `b_m ≤ a_m` for every `m` where both are defined.
pub fn dominates(a: &[BigRational], b: &[BigRational]) -> bool {
    a.iter().zip(b).all(|(x, y)| y <= x)
}

/// Per-degree sums `Σ_{i+j=m} max |c|` of coefficient max-norms, with
/// `|a + bi|` bounded above by the rational `|a| + |b|`.
pub fn norm_series(s: &BiSeries<Form<GaussRat>>) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); s.order() as usize + 1];
    for (&(i, j), f) in s.coeffs() {
        let max = f.terms().map(|(_, c)| c.re.abs() + c.im.abs()).max().unwrap_or_else(BigRational::zero);
        out[(i + j) as usize] += max;
    }
    out
}

/// Same as [`norm_series`] for vector-valued series.
pub fn norm_series_vec(s: &BiSeries<VectorForm<GaussRat>>) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); s.order() as usize + 1];
    for (&(i, j), v) in s.coeffs() {
        let max = v
            .comps()
            .iter()
            .flat_map(|f| f.terms().map(|(_, c)| c.re.abs() + c.im.abs()).collect::<Vec<_>>())
            .max()
            .unwrap_or_else(BigRational::zero);
        out[(i + j) as usize] += max;
    }
    out
}

/// Report helper: facts for a series with a provenance-free value.
pub fn series_json<S: Scalar>(s: &BiSeries<Form<S>>) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = s
        .coeffs()
        .map(|((i, j), f)| (format!("t^{i} tbar^{j}"), form_json(f)))
        .collect();
    serde_json::Value::Object(map)
}

/// Report helper: the majorant comparison as checks.
pub fn majorant_report(p: &MajorantParams, against: Option<&[BigRational]>) -> Report {
    let a = majorant(p);
    let mut r = Report::new("majorant", "A(t)");
    r.config("beta", &p.beta).config("gamma", &p.gamma).config("order", p.order);
    r.fact("coefficients", serde_json::json!(a.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
    let sq = series_product(&a, &a);
    let scaled: Vec<BigRational> = a.iter().map(|x| x * &p.beta / &p.gamma).collect();
    r.check_with("square-dominated", dominates(&scaled, &sq), "A² ≪ (β/γ)A", Provenance::Paper);
    if let Some(b) = against {
        let ok = dominates(&a, b);
        let detail = match a.iter().zip(b).position(|(x, y)| y > x) {
            Some(m) => format!("first violation at degree {m}: {} > {}", b[m], a[m]),
            None => String::new(),
        };
        r.check("dominated", ok, detail);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::random;
    use crate::scalar::GaussRat as Q;
    use num_complex::Complex64;

    fn setup(name: &str) -> (crate::catalog::CatalogEntry, Hodge<Q>) {
        let e = builtin(name).unwrap();
        let h = Hodge::new(&e.algebra, &e.metric);
        (e, h)
    }

    fn unit_dir(len: usize, at: usize) -> Vec<Q> {
        let mut d = vec![Q::zero(); len];
        d[at] = Q::one();
        d
    }

    #[test]
    fn torus_kuranishi_is_linear() {
        let (_, h) = setup("torus_3");
        let dir: Vec<Q> = (0..9).map(|i| Q::ratio(i - 4, 3)).collect();
        let k = kuranishi(&h, 4, &dir).unwrap();
        assert!(k.phi.coeffs().all(|((i, j), _)| (*i, *j) == (1, 0)));
        assert!(k.obstructions.iter().all(|(_, o)| o.is_zero()));
        let zero = kuranishi(&h, 4, &vec![Q::zero(); 9]).unwrap();
        assert!(zero.phi.is_zero_through(4));
        assert!(kuranishi(&h, 2, &[Q::one()]).is_err());
    }

    #[test]
    fn iwasawa_kuranishi_fixed_point() {
        let (e, h) = setup("iwasawa");
        let dir: Vec<Q> = (0..6).map(|i| Q::complex(i + 1, 1, i % 2, 1)).collect();
        let k = kuranishi(&h, 4, &dir).unwrap();
        assert!(fixed_point_residuals(&h, &k).iter().all(|(_, r)| r.is_zero()));
        assert_eq!(k.first_obstruction(), None);
        assert!(integrability_residuals(&e.algebra, &k.phi).iter().all(|(_, r)| r.is_zero()));
    }

    #[test]
    fn obstructed_direction_shows_up_in_the_defect() {
        let (e, h) = setup("abelian_I0");
        let k = kuranishi(&h, 3, &unit_dir(6, 3)).unwrap();
        assert_eq!(k.first_obstruction(), Some(2));
        let defect = integrability_residuals(&e.algebra, &k.phi);
        assert!(defect[0].1.is_zero());
        assert!(!defect[1].1.is_zero());
    }

    #[test]
    fn torus_kahler_low_orders() {
        let (e, h) = setup("torus_3");
        let k = kuranishi(&h, 4, &unit_dir(9, 4)).unwrap();
        let om = e.omega();
        let w = extend_kahler(&h, &om, &k.phi, 4).unwrap();
        assert_eq!(w.coeff(0, 0), om);
        assert!(w.homogeneous(1).is_empty());
        let p1 = k.phi.coeff(1, 0);
        let expect = phibar_phi(&p1).contract(&om) - p1.contract(&p1.conj().contract(&om));
        // (φ̄φ) and φ⌟φ̄ with φ = tη give a t·t̄ coefficient.
        assert_eq!(w.coeff(1, 1), expect);
        assert!(w.is_real());
        assert!(verify_reduction(&e.algebra, &w, &k.phi, 4).all_zero());
        assert!(verify_extension_closed(&e.algebra, &w, &k.phi, 4).all_zero());
    }

    #[test]
    fn perturbed_solution_is_caught() {
        // A closed real (1,1)-form on Iwasawa, so the differentials see the bump.
        let (e, h) = setup("iwasawa");
        let k = kuranishi(&h, 3, &unit_dir(6, 0)).unwrap();
        let w11 = Form::from_indices(3, &[0], &[0], Q::i());
        let mut w = extend_kahler(&h, &w11, &k.phi, 3).unwrap();
        assert!(verify_reduction(&e.algebra, &w, &k.phi, 3).all_zero());
        let bump = Form::from_indices(3, &[2], &[1], Q::one());
        w.set(1, 1, w.coeff(1, 1) + bump);
        let r = verify_reduction(&e.algebra, &w, &k.phi, 3);
        assert!(!r.all_zero());
        assert!(r.failing().iter().all(|f| f.order >= 2));
    }

    #[test]
    fn kahler_preconditions() {
        let (e, h) = setup("iwasawa");
        let k = kuranishi(&h, 2, &unit_dir(6, 0)).unwrap();
        assert!(matches!(extend_kahler(&h, &e.omega(), &k.phi, 2), Err(ExtensionError::Precondition(_))));
    }

    #[test]
    fn expansion_agreement_pins_the_composition_order() {
        let (e, _) = setup("iwasawa");
        let mut rng = random::rng(11);
        let n = 3;
        let h = Hodge::new(&e.algebra, &e.metric);
        let dir: Vec<Q> = (0..6).map(|_| random::gauss(&mut rng, 3)).collect();
        let phi = kuranishi(&h, 4, &dir).unwrap().phi;
        let alpha = random::form(&mut rng, n, 2, 1, 0.6);
        let a = BiSeries::constant(n, 4, alpha);
        let r = verify_extension_closed(&e.algebra, &a, &phi, 4);
        assert!(r.rows.iter().filter(|r| r.check == "expansion-agreement").all(Residual::is_zero));

        // The other composition order for (𝟙−φ̄φ)^{-1}φ̄ breaks agreement.
        let (p, a) = (phi.lift(4), a.lift(4));
        let lhs = e.algebra.d(&extend(&p, &a));
        assert_eq!(extension_differential(&e.algebra, &p, &a, 4, false), lhs);
        assert_ne!(extension_differential(&e.algebra, &p, &a, 4, true), lhs);
    }

    #[test]
    fn neumann_inverse_is_a_two_sided_inverse() {
        let mut rng = random::rng(3);
        let n = 3;
        let mut phi = BiSeries::zero(n, 6);
        phi.set(1, 0, random::beltrami(&mut rng, n, 0.7));
        let inv = neumann_inverse(&phi, 6).lift(6);
        let b = FrameEndo::from_vector(&phibar_phi(&phi.lift(6)));
        let one_minus_b = FrameEndo::identity(n).sub(&b);
        let id = FrameEndo::<Series<Q>>::identity(n).to_vector();
        assert_eq!(one_minus_b.then(&inv).to_vector(), id);
        assert_eq!(inv.then(&one_minus_b).to_vector(), id);

        let zero: BiSeries<VectorForm<Q>> = BiSeries::zero(n, 3);
        assert_eq!(neumann_inverse(&zero, 3).lift(3).to_vector(), id);
    }

    #[test]
    fn neumann_matches_float_inverse() {
        let mut rng = random::rng(5);
        let n = 2;
        let mut phi = BiSeries::zero(n, 6);
        phi.set(1, 0, random::beltrami(&mut rng, n, 1.0));
        let t = Complex64::new(0.002, 0.001);
        let eval = |m: &Matrix<Series<Q>>| {
            nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c).eval(t))
        };
        let b = FrameEndo::from_vector(&phibar_phi(&phi.lift(6)));
        let dim = 2 * n;
        let direct = (nalgebra::DMatrix::identity(dim, dim) - eval(&b.matrix())).try_inverse().unwrap();
        let series = eval(&neumann_inverse(&phi, 6).lift(6).matrix());
        assert!((direct - series).norm() < 1e-12);
    }

    #[test]
    fn psi_removes_the_mixed_part() {
        // e^{−ι_ψ} e^{−ι_φ} e^{ι_φ|ι_φ̄} α = (𝟙−φ̄φ)⨝α when ψ(𝟙−φ̄φ) = φ̄.
        let mut rng = random::rng(8);
        let n = 3;
        let mut phi = BiSeries::zero(n, 4);
        phi.set(1, 0, random::beltrami(&mut rng, n, 0.6));
        phi.set(2, 0, random::beltrami(&mut rng, n, 0.4));
        let p = phi.lift(4);
        let neg = Series::constant(Q::from_i64(-1));
        let psi = psi_series(&p, 4);
        for (pp, qq) in [(1, 1), (2, 1), (2, 2)] {
            let a = lift_const(&random::form(&mut rng, n, pp, qq, 0.5), 4);
            let lhs = exp_contract(&psi.scale(&neg), &exp_contract(&p.scale(&neg), &extend(&p, &a)));
            let rhs = FrameEndo::identity(n).sub(&FrameEndo::from_vector(&phibar_phi(&p))).apply(&a);
            assert_eq!(lhs, rhs, "({pp},{qq})");
        }
    }

    #[test]
    fn balanced_on_i0() {
        let (e, h) = setup("abelian_I0");
        let k = kuranishi(&h, 3, &unit_dir(6, 0)).unwrap();
        let om = e.omega();
        let b = extend_balanced(&h, &om, &k.phi, 3).unwrap();
        assert_eq!(b.omega_tilde.coeff(0, 0), om.wedge(&om));
        assert_eq!(b.omega.coeff(0, 0), om.wedge(&om));
        assert!(b.omega_real.is_real());
        assert!(balanced_system_residuals(&e.algebra, &b.omega_tilde, &k.phi, 3).all_zero());
        let closed = verify_extension_closed(&e.algebra, &b.omega, &k.phi, 3);
        assert!(closed.rows.iter().filter(|r| r.check == "d-extension").all(Residual::is_zero));
    }

    #[test]
    fn iwasawa_balanced_obstruction() {
        let (e, h) = setup("iwasawa");
        let k = kuranishi(&h, 2, &unit_dir(6, 1)).unwrap();
        match extend_balanced(&h, &e.omega(), &k.phi, 2) {
            Err(ExtensionError::Obstruction(hit)) => {
                assert_eq!(hit.order, 1);
                assert_eq!(hit.witness, Form::from_indices(3, &[0, 1, 2], &[0, 1], Q::from_i64(-2)));
            }
            other => panic!("expected an obstruction, got {other:?}"),
        }
    }

    #[test]
    fn projection_extensions() {
        let (e, h) = setup("torus_3");
        let k = kuranishi(&h, 2, &unit_dir(9, 2)).unwrap();
        let om = e.omega();
        let s = extend_dclosed_projection(&h, &om, &k.phi, 2, ClosedKind::DdBar).unwrap();
        assert_eq!(s.coeff(0, 0), om);
        assert!(verify_projection(&e.algebra, &s, &k.phi, 2, ClosedKind::DdBar).all_zero());
        let d = extend_dclosed_projection(&h, &om, &k.phi, 2, ClosedKind::D).unwrap();
        assert!(verify_projection(&e.algebra, &d, &k.phi, 2, ClosedKind::D).all_zero());

        let (e, h) = setup("iwasawa");
        let k = kuranishi(&h, 2, &unit_dir(6, 4)).unwrap();
        // d-exact: ω^{12} = d ω³.
        let exact = Form::from_indices(3, &[0, 1], &[], Q::one());
        let s = extend_dclosed_projection(&h, &exact, &k.phi, 2, ClosedKind::D).unwrap();
        assert!(verify_projection(&e.algebra, &s, &k.phi, 2, ClosedKind::D).all_zero());
        let w11 = Form::from_indices(3, &[0], &[0], Q::i());
        assert!(matches!(
            extend_dclosed_projection(&h, &e.omega(), &k.phi, 2, ClosedKind::DdBar),
            Err(ExtensionError::Precondition(_))
        ));
        let s = extend_dclosed_projection(&h, &w11, &k.phi, 2, ClosedKind::DdBar).unwrap();
        assert!(verify_projection(&e.algebra, &s, &k.phi, 2, ClosedKind::DdBar).all_zero());
    }

    #[test]
    fn majorant_instances() {
        let p = MajorantParams::from_ints(16, 1, 3).unwrap();
        let a = majorant(&p);
        let r = |n, d| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(a, vec![r(0, 1), r(1, 1), r(1, 4), r(1, 9)]);
        assert!(dominates(&a, &vec![BigRational::zero(); 4]));
        assert!(!dominates(&a, &[r(0, 1), r(2, 1)]));
        assert!(MajorantParams::from_ints(0, 1, 3).is_err());
        for (b, g) in [(16, 1), (1, 1), (3, 7)] {
            let p = MajorantParams::from_ints(b, g, 20).unwrap();
            let a = majorant(&p);
            let scaled: Vec<_> = a.iter().map(|x| x * &p.beta / &p.gamma).collect();
            assert!(dominates(&scaled, &series_product(&a, &a)));
        }
    }

    #[test]
    fn biseries_truncates_and_conjugates() {
        let n = 2;
        let mut s: BiSeries<Form<Q>> = BiSeries::zero(n, 2);
        s.set(2, 1, Form::from_indices(n, &[0], &[], Q::one()));
        assert!(s.is_zero_through(2));
        let f = Form::from_indices(n, &[0], &[1], Q::i());
        s.set(1, 0, f.clone());
        assert!(!s.is_real());
        s.set(0, 1, f.conj());
        assert!(s.is_real());
        assert_eq!(BiSeries::from_lifted(&s.lift(2), n, 2), s);
        assert_eq!(s.kind(), ValueKind::Form);
    }
}
