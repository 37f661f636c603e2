//! Chevalley–Eilenberg calculus on a Lie algebra with a complex structure.
//!
//! A [`LieAlgebra`] is presented by the differentials `d(dz^k)` of the
//! holomorphic coframe; the differentials of the conjugate generators are
//! derived. `d` extends to the whole exterior algebra by the graded Leibniz
//! rule and splits as `∂ + ∂̄`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::exterior::{gen_mono, phi_phibar, phibar_phi, Form, Mono, VectorForm};
use crate::scalar::{Coeff, GaussRat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("invariant violation ({check}): {detail}")]
    InvariantViolation { check: &'static str, detail: String },
}

/// A Lie algebra with a complex structure, given by the Chevalley–Eilenberg
/// differential of a `(1,0)`-coframe.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    name: String,
    n: usize,
    d_hol: Vec<Form<GaussRat>>,
    // d, ∂ and ∂̄ of every monomial with unit coefficient, indexed by
    // `hol | anti << n`.
    d_mono: Vec<Vec<(Mono, GaussRat)>>,
    del_mono: Vec<Vec<(Mono, GaussRat)>>,
    dbar_mono: Vec<Vec<(Mono, GaussRat)>>,
}

/// Which part of the differential to apply.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Diff {
    D,
    Del,
    Dbar,
}

impl LieAlgebra {
    /// Build and validate: every `d(dz^k)` must be a 2-form without
    /// `(0,2)` part, and `d² = 0` on all generators.
    pub fn new(name: &str, n: usize, d_hol: Vec<Form<GaussRat>>) -> Result<Self, AlgebraError> {
        if d_hol.len() != n || d_hol.iter().any(|f| f.n() != n) {
            return Err(AlgebraError::InvariantViolation {
                check: "shape",
                detail: format!("expected {n} differentials in dimension {n}"),
            });
        }
        if n > 6 {
            return Err(AlgebraError::InvariantViolation {
                check: "shape",
                detail: format!("dimension {n} exceeds the supported maximum 6"),
            });
        }
        for (k, f) in d_hol.iter().enumerate() {
            if f.terms().any(|(m, _)| m.degree() != 2) {
                return Err(AlgebraError::InvariantViolation {
                    check: "degree",
                    detail: format!("d(w{}) is not a 2-form", k + 1),
                });
            }
            if !f.component(0, 2).is_zero() {
                return Err(AlgebraError::InvariantViolation {
                    check: "integrability",
                    detail: format!("d(w{}) has a (0,2) component", k + 1),
                });
            }
        }
        let mut alg = LieAlgebra {
            name: name.to_string(),
            n,
            d_hol,
            d_mono: Vec::new(),
            del_mono: Vec::new(),
            dbar_mono: Vec::new(),
        };
        alg.build_tables();
        for g in 0..2 * n {
            let dd = alg.d(&alg.d_gen(g));
            if !dd.is_zero() {
                return Err(AlgebraError::InvariantViolation {
                    check: "d^2=0",
                    detail: format!("d(d(generator {g})) = {dd}"),
                });
            }
        }
        Ok(alg)
    }

    fn build_tables(&mut self) {
        let n = self.n;
        let total = 1usize << (2 * n);
        let mut d_gens: Vec<Form<GaussRat>> = self.d_hol.clone();
        d_gens.extend(self.d_hol.iter().map(Form::conj));
        let mut d_mono = Vec::with_capacity(total);
        let mut del_mono = Vec::with_capacity(total);
        let mut dbar_mono = Vec::with_capacity(total);
        for idx in 0..total {
            let m = Mono::new((idx & ((1 << n) - 1)) as u16, (idx >> n) as u16);
            let gens = m.generators(n);
            let mut out = Form::zero(n);
            for (pos, &g) in gens.iter().enumerate() {
                let mut term = Form::constant(n, GaussRat::one());
                for &h in &gens[..pos] {
                    term = term.wedge(&Form::gen(n, h));
                }
                term = term.wedge(&d_gens[g]);
                for &h in &gens[pos + 1..] {
                    term = term.wedge(&Form::gen(n, h));
                }
                out = if pos % 2 == 1 { out - term } else { out + term };
            }
            let (p, q) = m.bidegree();
            let all: Vec<(Mono, GaussRat)> = out.into_terms().collect();
            del_mono.push(all.iter().filter(|(m, _)| m.bidegree() == (p + 1, q)).cloned().collect());
            dbar_mono.push(all.iter().filter(|(m, _)| m.bidegree() == (p, q + 1)).cloned().collect());
            d_mono.push(all);
        }
        self.d_mono = d_mono;
        self.del_mono = del_mono;
        self.dbar_mono = dbar_mono;
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The stated differentials `d(dz^k)`.
    pub fn d_table(&self) -> &[Form<GaussRat>] {
        &self.d_hol
    }

    /// `d` of generator `g` (conjugate generators included).
    pub fn d_gen(&self, g: usize) -> Form<GaussRat> {
        if g < self.n {
            self.d_hol[g].clone()
        } else {
            self.d_hol[g - self.n].conj()
        }
    }

    fn index(&self, m: &Mono) -> usize {
        m.hol as usize | ((m.anti as usize) << self.n)
    }

    fn apply_table<R: Coeff>(&self, which: Diff, a: &Form<R>) -> Form<R> {
        assert_eq!(a.n(), self.n, "form dimension does not match the algebra");
        let table = match which {
            Diff::D => &self.d_mono,
            Diff::Del => &self.del_mono,
            Diff::Dbar => &self.dbar_mono,
        };
        let mut out = Form::zero(self.n);
        for (m, c) in a.terms() {
            for (m2, k) in &table[self.index(m)] {
                out.add_term(*m2, c.mul(&R::from_gauss(k)));
            }
        }
        out
    }

    /// Chevalley–Eilenberg differential.
    pub fn d<R: Coeff>(&self, a: &Form<R>) -> Form<R> {
        self.apply_table(Diff::D, a)
    }

    pub fn del<R: Coeff>(&self, a: &Form<R>) -> Form<R> {
        self.apply_table(Diff::Del, a)
    }

    pub fn delbar<R: Coeff>(&self, a: &Form<R>) -> Form<R> {
        self.apply_table(Diff::Dbar, a)
    }

    pub fn apply<R: Coeff>(&self, which: Diff, a: &Form<R>) -> Form<R> {
        self.apply_table(which, a)
    }

    /// The image of a monomial under `d`, `∂` or `∂̄`, with unit coefficient.
    pub fn apply_mono(&self, which: Diff, m: &Mono) -> &[(Mono, GaussRat)] {
        let table = match which {
            Diff::D => &self.d_mono,
            Diff::Del => &self.del_mono,
            Diff::Dbar => &self.dbar_mono,
        };
        &table[self.index(m)]
    }

    /// `d(dz^k) ∈ Λ^{1,1}` for all `k`.
    pub fn is_abelian_structure(&self) -> bool {
        self.d_hol.iter().all(|f| f.is_of_type(1, 1))
    }

    /// `d(dz^k) ∈ Λ^{2,0}` for all `k`.
    pub fn is_complex_parallelizable(&self) -> bool {
        self.d_hol.iter().all(|f| f.is_of_type(2, 0))
    }

    /// Whether this presentation equals another coefficient for coefficient.
    pub fn same_structure(&self, other: &LieAlgebra) -> bool {
        self.n == other.n && self.d_hol == other.d_hol
    }
}

impl fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (n={})", self.name, self.n)
    }
}

/// Right-hand side of the commutator formula f1:
/// `−∂(ψ⌟φ⌟α) − ψ⌟φ⌟∂α + φ⌟∂(ψ⌟α) + ψ⌟∂(φ⌟α)`.
pub fn f1_rhs<R: Coeff>(
    alg: &LieAlgebra,
    phi: &VectorForm<R>,
    psi: &VectorForm<R>,
    alpha: &Form<R>,
) -> Form<R> {
    let t1 = alg.del(&psi.contract(&phi.contract(alpha)));
    let t2 = psi.contract(&phi.contract(&alg.del(alpha)));
    let t3 = phi.contract(&alg.del(&psi.contract(alpha)));
    let t4 = psi.contract(&alg.del(&phi.contract(alpha)));
    t3 + t4 - t1 - t2
}

/// The bracket of two Beltrami differentials, defined on each generator by
/// f1: `[φ,ψ]^k = f1_rhs(φ, ψ, dz^k)`.
pub fn bracket<R: Coeff>(alg: &LieAlgebra, phi: &VectorForm<R>, psi: &VectorForm<R>) -> VectorForm<R> {
    let n = alg.n();
    let comps = (0..n).map(|k| f1_rhs(alg, phi, psi, &Form::dz(n, k))).collect();
    VectorForm::holomorphic(n, comps)
}

/// `∂̄` on vector-valued forms, characterised by `ι_{∂̄ψ} = [∂̄, ι_ψ]`
/// (graded commutator). On a coframe that is not holomorphic this adds the
/// correction `(−1)^{deg ψ} ψ⌟∂̄e` to the componentwise derivative.
pub fn dbar_vec<R: Coeff>(alg: &LieAlgebra, psi: &VectorForm<R>) -> VectorForm<R> {
    let n = alg.n();
    let mut out = VectorForm::zero(n);
    for deg in 0..=2 * n {
        let part = psi.map_forms(|f| f.degree_part(deg));
        if part.is_zero() {
            continue;
        }
        let sign_neg = deg % 2 == 1;
        let comps = (0..2 * n)
            .map(|g| {
                let base = alg.delbar(part.comp(g));
                let dbar_gen = Form::<R>::from_exact(&alg.delbar(&Form::monomial(n, gen_mono(n, g), GaussRat::one())));
                let corr = part.contract(&dbar_gen);
                if sign_neg {
                    base - corr
                } else {
                    base + corr
                }
            })
            .collect();
        out = out + VectorForm::from_components(n, comps);
    }
    out
}

/// `∂̄φ` computed componentwise, ignoring the frame correction. Agrees with
/// [`dbar_vec`] exactly when `∂̄` kills the holomorphic coframe.
pub fn dbar_componentwise<R: Coeff>(alg: &LieAlgebra, psi: &VectorForm<R>) -> VectorForm<R> {
    psi.map_forms(|f| alg.delbar(f))
}

/// `∂̄φ − ½[φ,φ]`; zero iff `φ` is integrable.
pub fn integrability_defect<R: Coeff>(alg: &LieAlgebra, phi: &VectorForm<R>) -> VectorForm<R> {
    let half = R::from_ratio(1, 2);
    &dbar_vec(alg, phi) - &bracket(alg, phi, phi).scale(&half)
}

/// The algebraic identities exposed to validation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, PartialOrd, Ord, Hash)]
pub enum IdentityId {
    /// `d∘e^{ι_φ} = e^{ι_φ}(d + ∂∘ι_φ − ι_φ∘∂ − ι_{∂̄φ−½[φ,φ]})` as usually
    /// printed. Holds for integrable `φ` only; see [`IdentityId::ExtOldSigned`].
    ExtOld,
    /// `d∘e^{ι_φ} = e^{ι_φ}(d + ∂∘ι_φ − ι_φ∘∂ + ι_{∂̄φ−½[φ,φ]})`, valid for
    /// every Beltrami differential.
    ExtOldSigned,
    /// Commutator formula for `[φ,ψ]⌟α`.
    F1,
    /// `φ⌟φ̄⌟α − (φ⌟φ̄)⌟α = φ̄⌟φ⌟α − (φ̄⌟φ)⌟α`.
    Seven1,
    /// `[φ,φ]⌟φ̄⌟α = 2φ⌟∂(φ⌟φ̄⌟α) − φ⌟φ⌟∂(φ̄⌟α)`.
    Seven3,
    /// `[φ,φ]⌟φ̄⌟α = 2φ⌟∂(φ⌟φ̄⌟α) − φ⌟φ⌟∂(φ̄⌟α) − ∂(φ⌟φ⌟φ̄⌟α)`, the
    /// instance of f1 at `φ̄⌟α`. Agrees with `Seven3` when the last term vanishes.
    Seven3Full,
    /// `∂̄(ψ⌟α) = (∂̄ψ)⌟α + (−1)^{r+s+1}ψ⌟∂̄α`.
    Seven5,
    /// `φ̄⌟φ̄⌟φ⌟α − φ⌟φ̄⌟φ̄⌟α = 2(φ̄⌟(φφ̄)⌟α − (φ̄φ)⌟φ̄⌟α)`.
    Seven7,
    /// The `(1,1)` case of `Seven7`: `φ̄⌟φ̄⌟φ⌟α = 2 φ̄⌟(φφ̄)⌟α`.
    Seven7Special,
    /// `ι_φ∘ι_{[φ,φ]} = ι_{[φ,φ]}∘ι_φ`.
    Commutator,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::ExtOld,
        IdentityId::ExtOldSigned,
        IdentityId::F1,
        IdentityId::Seven1,
        IdentityId::Seven3,
        IdentityId::Seven3Full,
        IdentityId::Seven5,
        IdentityId::Seven7,
        IdentityId::Seven7Special,
        IdentityId::Commutator,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            IdentityId::ExtOld => "ext-old",
            IdentityId::ExtOldSigned => "ext-old-signed",
            IdentityId::F1 => "f1",
            IdentityId::Seven1 => "7for-1",
            IdentityId::Seven3 => "7for-3",
            IdentityId::Seven3Full => "7for-3-full",
            IdentityId::Seven5 => "7for-5",
            IdentityId::Seven7 => "7for-7",
            IdentityId::Seven7Special => "7for-7-11",
            IdentityId::Commutator => "commutator",
        }
    }

    pub fn from_key(s: &str) -> Option<IdentityId> {
        IdentityId::ALL.iter().copied().find(|i| i.key() == s)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Both sides of an identity evaluated on one input.
#[derive(Clone, Debug)]
pub struct IdentityReport<R> {
    pub which: IdentityId,
    pub lhs: Form<R>,
    pub rhs: Form<R>,
}

impl<R: Coeff> IdentityReport<R> {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("{which}: expected {expected}, found {found:?}")]
    DegreeMismatch {
        which: IdentityId,
        expected: &'static str,
        found: Option<(usize, usize)>,
    },
}

/// `d(e^{ι_φ}α)` and `e^{ι_φ}(dα + ∂ι_φα − ι_φ∂α + s·ι_{∂̄φ−½[φ,φ]}α)` with
/// `s = sign`.
pub fn ext_old_sides<R: Coeff>(
    alg: &LieAlgebra,
    phi: &VectorForm<R>,
    alpha: &Form<R>,
    sign: i64,
) -> (Form<R>, Form<R>) {
    use crate::exterior::exp_contract;
    let lhs = alg.d(&exp_contract(phi, alpha));
    let defect = integrability_defect(alg, phi);
    let inner = alg.d(alpha) + alg.del(&phi.contract(alpha)) - phi.contract(&alg.del(alpha))
        + defect.contract(alpha).scale_i64(sign);
    (lhs, exp_contract(phi, &inner))
}

/// Evaluate both sides of `which`. `psi` is only used by `F1` (a Beltrami
/// differential) and `Seven5` (any `T^{1,0}`-valued form).
pub fn validate_identity<R: Coeff>(
    alg: &LieAlgebra,
    which: IdentityId,
    phi: &VectorForm<R>,
    psi: &VectorForm<R>,
    alpha: &Form<R>,
) -> Result<IdentityReport<R>, IdentityError> {
    let phibar = phi.conj();
    let c = |v: &VectorForm<R>, a: &Form<R>| v.contract(a);
    let (lhs, rhs) = match which {
        IdentityId::ExtOld => ext_old_sides(alg, phi, alpha, -1),
        IdentityId::ExtOldSigned => ext_old_sides(alg, phi, alpha, 1),
        IdentityId::F1 => {
            let br = bracket(alg, phi, psi);
            (c(&br, alpha), f1_rhs(alg, phi, psi, alpha))
        }
        IdentityId::Seven1 => {
            let pb = phi.contract_vec(&phibar);
            let bp = phibar.contract_vec(phi);
            (
                c(phi, &c(&phibar, alpha)) - c(&pb, alpha),
                c(&phibar, &c(phi, alpha)) - c(&bp, alpha),
            )
        }
        IdentityId::Seven3 | IdentityId::Seven3Full => {
            let br = bracket(alg, phi, phi);
            let x = c(&phibar, alpha);
            let lhs = c(&br, &x);
            let r1 = c(phi, &alg.del(&c(phi, &x))).scale_i64(2);
            let r2 = c(phi, &c(phi, &alg.del(&x)));
            if which == IdentityId::Seven3 {
                (lhs, r1 - r2)
            } else {
                (lhs, r1 - r2 - alg.del(&c(phi, &c(phi, &x))))
            }
        }
        IdentityId::Seven5 => {
            let deg = match psi.bidegree() {
                Some((r, s)) => r + s,
                None if psi.is_zero() => 0,
                None => {
                    return Err(IdentityError::DegreeMismatch {
                        which,
                        expected: "homogeneous vector form",
                        found: None,
                    })
                }
            };
            let lhs = alg.delbar(&c(psi, alpha));
            let t = c(psi, &alg.delbar(alpha));
            let second = if deg % 2 == 0 { -t } else { t };
            (lhs, c(&dbar_vec(alg, psi), alpha) + second)
        }
        IdentityId::Seven7 | IdentityId::Seven7Special => {
            if which == IdentityId::Seven7Special && !alpha.is_of_type(1, 1) {
                return Err(IdentityError::DegreeMismatch {
                    which,
                    expected: "(1,1)",
                    found: alpha.bidegree(),
                });
            }
            let ppb = phi_phibar(phi);
            let pbp = phibar_phi(phi);
            let l1 = c(&phibar, &c(&phibar, &c(phi, alpha)));
            let r1 = c(&phibar, &c(&ppb, alpha)).scale_i64(2);
            if which == IdentityId::Seven7Special {
                (l1, r1)
            } else {
                let l2 = c(phi, &c(&phibar, &c(&phibar, alpha)));
                let r2 = c(&pbp, &c(&phibar, alpha)).scale_i64(2);
                (l1 - l2, r1 - r2)
            }
        }
        IdentityId::Commutator => {
            let br = bracket(alg, phi, phi);
            (c(phi, &c(&br, alpha)), c(&br, &c(phi, alpha)))
        }
    };
    Ok(IdentityReport { which, lhs, rhs })
}
