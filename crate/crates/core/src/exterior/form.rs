use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::{basis, mask_of, ExteriorError, Mono, VectorForm};
use crate::scalar::{Coeff, GaussRat};

/// A sparse element of the exterior algebra `Λ(𝔤^*_ℂ)` in dimension `n`.
///
/// Forms need not be homogeneous; [`Form::bidegree`] reports the bidegree
/// when there is a single one and [`Form::component`] projects.
#[derive(Clone, PartialEq, Debug)]
pub struct Form<R> {
    n: usize,
    terms: BTreeMap<Mono, R>,
}

impl<R: Coeff> Form<R> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= super::MAX_DIM, "dimension {n} exceeds {}", super::MAX_DIM);
        Form { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: R) -> Self {
        Form::monomial(n, Mono::ONE, c)
    }

    pub fn monomial(n: usize, m: Mono, c: R) -> Self {
        let mut f = Form::zero(n);
        f.add_term(m, c);
        f
    }

    /// Generator `g` (`dz^g` for `g < n`, `dz̄^{g-n}` otherwise).
    pub fn gen(n: usize, g: usize) -> Self {
        assert!(g < 2 * n);
        let m = if g < n { Mono::new(1 << g, 0) } else { Mono::new(0, 1 << (g - n)) };
        Form::monomial(n, m, R::one())
    }

    pub fn dz(n: usize, k: usize) -> Self {
        Form::gen(n, k)
    }

    pub fn dzb(n: usize, k: usize) -> Self {
        Form::gen(n, n + k)
    }

    /// `c · dz^{i_1} ∧ … ∧ dz̄^{j_1} ∧ …` from unsorted index lists.
    pub fn from_indices(n: usize, hol: &[usize], anti: &[usize], c: R) -> Self {
        let mut f = Form::constant(n, c);
        for &i in hol {
            f = f.wedge(&Form::dz(n, i));
        }
        for &j in anti {
            f = f.wedge(&Form::dzb(n, j));
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &R)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Mono, R)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, m: &Mono) -> R {
        self.terms.get(m).cloned().unwrap_or_else(R::zero)
    }

    /// Coefficient of `dz^I ∧ dz̄^J` for sorted index lists.
    pub fn coeff_of(&self, hol: &[usize], anti: &[usize]) -> R {
        self.coeff(&Mono::new(mask_of(hol), mask_of(anti)))
    }

    pub fn add_term(&mut self, m: Mono, c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn add_signed(&mut self, m: Mono, c: &R, negate: bool) {
        self.add_term(m, if negate { c.neg() } else { c.clone() });
    }

    pub fn check_dim(&self, other: &Form<R>) -> Result<(), ExteriorError> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(ExteriorError::DimensionMismatch(self.n, other.n))
        }
    }

    pub fn scale(&self, c: &R) -> Self {
        if c.is_zero() {
            return Form::zero(self.n);
        }
        let mut out = Form::zero(self.n);
        for (m, v) in &self.terms {
            out.add_term(*m, v.mul(c));
        }
        out
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        self.scale(&R::from_i64(k))
    }

    /// Exterior product. Panics on dimension mismatch; see [`Form::try_wedge`].
    pub fn wedge(&self, other: &Form<R>) -> Form<R> {
        self.try_wedge(other).expect("wedge of forms in different dimensions")
    }

    pub fn try_wedge(&self, other: &Form<R>) -> Result<Form<R>, ExteriorError> {
        self.check_dim(other)?;
        let mut out = Form::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, neg)) = m1.wedge(m2) {
                    out.add_signed(m, &c1.mul(c2), neg);
                }
            }
        }
        Ok(out)
    }

    /// Complex conjugation: `(p,q)` parts go to `(q,p)` parts.
    pub fn conj(&self) -> Form<R> {
        let mut out = Form::zero(self.n);
        for (m, c) in &self.terms {
            // conj(dz^I dz̄^J) = dz̄^I dz^J = (-1)^{|I||J|} dz^J dz̄^I
            let neg = (m.p() * m.q()) % 2 == 1;
            out.add_signed(Mono::new(m.anti, m.hol), &c.conj(), neg);
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// The bidegree if the form is nonzero and homogeneous.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(|m| m.bidegree());
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// True when every term has bidegree `(p, q)` (vacuous for zero).
    pub fn is_of_type(&self, p: usize, q: usize) -> bool {
        self.terms.keys().all(|m| m.bidegree() == (p, q))
    }

    /// Projection to the `(p,q)` component.
    pub fn component(&self, p: usize, q: usize) -> Form<R> {
        Form {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.bidegree() == (p, q))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Projection to total degree `k`.
    pub fn degree_part(&self, k: usize) -> Form<R> {
        Form {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Every bidegree with a nonzero component.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<_> = self.terms.keys().map(|m| m.bidegree()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Interior derivative by the dual of generator `g` (an odd derivation).
    pub fn interior(&self, g: usize) -> Form<R> {
        let mut out = Form::zero(self.n);
        for (m, c) in &self.terms {
            if let Some((m2, neg)) = m.interior(g, self.n) {
                out.add_signed(m2, c, neg);
            }
        }
        out
    }

    /// `ι_V α` for a vector-valued form `V`; shorthand for `V.contract(self)`.
    pub fn contracted_by(&self, v: &VectorForm<R>) -> Form<R> {
        v.contract(self)
    }

    pub fn map<R2: Coeff>(&self, f: impl Fn(&R) -> R2) -> Form<R2> {
        let mut out = Form::zero(self.n);
        for (m, c) in &self.terms {
            out.add_term(*m, f(c));
        }
        out
    }

    /// Embed an exact form into this coefficient ring.
    pub fn from_exact(f: &Form<GaussRat>) -> Form<R> {
        f.map(R::from_gauss)
    }

    /// Coordinates in the ordered basis of `Λ^{p,q}`.
    pub fn to_vector(&self, p: usize, q: usize) -> Vec<R> {
        basis(self.n, p, q).iter().map(|m| self.coeff(m)).collect()
    }

    pub fn from_vector(n: usize, p: usize, q: usize, v: &[R]) -> Form<R> {
        let b = basis(n, p, q);
        assert_eq!(b.len(), v.len(), "coordinate vector has wrong length");
        let mut out = Form::zero(n);
        for (m, c) in b.into_iter().zip(v) {
            out.add_term(m, c.clone());
        }
        out
    }
}

impl<R: Coeff> Add for &Form<R> {
    type Output = Form<R>;
    fn add(self, rhs: &Form<R>) -> Form<R> {
        assert_eq!(self.n, rhs.n, "sum of forms in different dimensions");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<R: Coeff> Add for Form<R> {
    type Output = Form<R>;
    fn add(mut self, rhs: Form<R>) -> Form<R> {
        assert_eq!(self.n, rhs.n, "sum of forms in different dimensions");
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<R: Coeff> Sub for &Form<R> {
    type Output = Form<R>;
    fn sub(self, rhs: &Form<R>) -> Form<R> {
        assert_eq!(self.n, rhs.n, "difference of forms in different dimensions");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.neg());
        }
        out
    }
}

impl<R: Coeff> Sub for Form<R> {
    type Output = Form<R>;
    fn sub(self, rhs: Form<R>) -> Form<R> {
        &self - &rhs
    }
}

impl<R: Coeff> Neg for &Form<R> {
    type Output = Form<R>;
    fn neg(self) -> Form<R> {
        self.map(|c| c.neg())
    }
}

impl<R: Coeff> Neg for Form<R> {
    type Output = Form<R>;
    fn neg(self) -> Form<R> {
        -&self
    }
}

impl<R: Coeff + fmt::Display> fmt::Display for Form<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{}", m.label())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat as Q;

    #[test]
    fn wedge_and_conj_examples() {
        let n = 2;
        let dz1 = Form::<Q>::dz(n, 0);
        let dzb1 = Form::<Q>::dzb(n, 0);
        let a = dz1.wedge(&dzb1);
        assert_eq!(a.coeff_of(&[0], &[0]), Q::one());
        assert_eq!(dzb1.wedge(&dz1), -&a);
        assert!(a.wedge(&Form::zero(n)).is_zero());

        let dzb2 = Form::<Q>::dzb(n, 1);
        let dz2 = Form::<Q>::dz(n, 1);
        // conj(dz¹∧dz̄²) = dz̄¹∧dz² = −dz²∧dz̄¹
        assert_eq!(dz1.wedge(&dzb2).conj(), -dz2.wedge(&dzb1));

        let i = Q::i();
        let omega = (dz1.wedge(&dzb1) + dz2.wedge(&dzb2)).scale(&i);
        assert!(omega.is_real());
        assert_eq!(omega.bidegree(), Some((1, 1)));
    }

    #[test]
    fn from_indices_sorts_with_sign() {
        let f = Form::<Q>::from_indices(3, &[2, 0], &[1], Q::one());
        assert_eq!(f.coeff_of(&[0, 2], &[1]), Q::from_i64(-1));
    }

    #[test]
    fn vector_round_trip() {
        let f = Form::<Q>::from_indices(3, &[0], &[1, 2], Q::from_i64(5))
            + Form::from_indices(3, &[1], &[0, 2], Q::i());
        let v = f.to_vector(1, 2);
        assert_eq!(v.len(), 9);
        assert_eq!(Form::from_vector(3, 1, 2, &v), f);
    }
}
