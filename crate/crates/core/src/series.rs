//! Truncated power series in `t` and `t̄`.
//!
//! A [`Series`] is itself a [`Coeff`], so `Form<Series<S>>` is a form whose
//! coefficients are power series and every exterior operation becomes a
//! series operation for free.

use std::collections::BTreeMap;

use crate::scalar::{Coeff, GaussRat, Scalar};

/// Truncation order meaning "no truncation" (used for exact constants).
pub const EXACT_ORDER: u32 = u32::MAX;

/// Truncated bi-polynomial `Σ c_{ij} t^i t̄^j` with `i + j ≤ order`.
#[derive(Clone, Debug)]
pub struct Series<S> {
    order: u32,
    terms: BTreeMap<(u32, u32), S>,
}

impl<S: Scalar> Series<S> {
    pub fn constant(c: S) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0), c);
        }
        Series { order: EXACT_ORDER, terms }
    }

    pub fn zero_with_order(order: u32) -> Self {
        Series { order, terms: BTreeMap::new() }
    }

    /// The monomial `c · t^i t̄^j` truncated at `order`.
    pub fn monomial(c: S, i: u32, j: u32, order: u32) -> Self {
        let mut s = Series::zero_with_order(order);
        s.set(i, j, c);
        s
    }

    /// `t`, truncated at `order`.
    pub fn t(order: u32) -> Self {
        Series::monomial(S::one(), 1, 0, order)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = self.order.min(order);
        let o = self.order;
        self.terms.retain(|&(i, j), _| i as u64 + j as u64 <= o as u64);
        self
    }

    pub fn coeff(&self, i: u32, j: u32) -> S {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(S::zero)
    }

    pub fn set(&mut self, i: u32, j: u32, c: S) {
        if i as u64 + j as u64 > self.order as u64 || c.is_zero() {
            self.terms.remove(&(i, j));
        } else {
            self.terms.insert((i, j), c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &S)> {
        self.terms.iter()
    }

    /// The homogeneous part of total degree `k`.
    pub fn homogeneous(&self, k: u32) -> Series<S> {
        Series {
            order: self.order,
            terms: self
                .terms
                .iter()
                .filter(|((i, j), _)| i + j == k)
                .map(|(a, b)| (*a, b.clone()))
                .collect(),
        }
    }

    /// Lowest total degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).min()
    }

    /// Evaluate at a complex parameter value.
    pub fn eval(&self, t: num_complex::Complex64) -> num_complex::Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c.to_c64() * t.powu(i) * t.conj().powu(j))
            .sum()
    }
}

impl<S: Scalar> PartialEq for Series<S> {
    fn eq(&self, other: &Self) -> bool {
        let o = self.order.min(other.order);
        let keys: std::collections::BTreeSet<_> =
            self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.into_iter()
            .filter(|(i, j)| i + j <= o)
            .all(|(i, j)| self.coeff(i, j) == other.coeff(i, j))
    }
}

impl<S: Scalar> Coeff for Series<S> {
    fn zero() -> Self {
        Series::zero_with_order(EXACT_ORDER)
    }
    fn one() -> Self {
        Series::constant(S::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut out: Series<S> = Series::zero_with_order(order);
        for (&(i, j), c) in self.terms.iter().chain(o.terms.iter()) {
            if i + j <= order {
                let v = out.coeff(i, j).add(c);
                out.set(i, j, v);
            }
        }
        out
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut acc: BTreeMap<(u32, u32), S> = BTreeMap::new();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &o.terms {
                let (i, j) = (i1 + i2, j1 + j2);
                if i as u64 + j as u64 > order as u64 {
                    continue;
                }
                let e = acc.entry((i, j)).or_insert_with(S::zero);
                *e = e.add(&a.mul(b));
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Series { order, terms: acc }
    }
    fn neg(&self) -> Self {
        Series {
            order: self.order,
            terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect(),
        }
    }
    fn conj(&self) -> Self {
        Series {
            order: self.order,
            terms: self.terms.iter().map(|(&(i, j), c)| ((j, i), c.conj())).collect(),
        }
    }
    fn from_gauss(g: &GaussRat) -> Self {
        Series::constant(S::from_gauss(g))
    }
    /// Invertible iff the constant term is nonzero and the series is either
    /// constant or truncated.
    fn try_inv(&self) -> Option<Self> {
        let c0 = self.coeff(0, 0);
        let c0_inv = c0.try_inv()?;
        if self.terms.len() == 1 {
            return Some(Series::constant(c0_inv));
        }
        if self.order == EXACT_ORDER {
            return None;
        }
        // 1/(c0 (1 + u)) = c0^{-1} Σ (-u)^k
        let inv0 = Series::constant(c0_inv);
        let mut u = self.mul(&inv0);
        u.set(0, 0, S::zero());
        let neg_u = u.neg();
        let mut sum = Series::<S>::one().with_order(self.order);
        let mut power = Series::<S>::one().with_order(self.order);
        for _ in 0..self.order {
            power = power.mul(&neg_u);
            if power.is_zero() {
                break;
            }
            sum = sum.add(&power);
        }
        Some(sum.mul(&inv0))
    }
    fn pivot_weight(&self) -> Option<f64> {
        self.try_inv()?;
        self.coeff(0, 0).pivot_weight()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = GaussRat;

    #[test]
    fn truncated_product() {
        let t = Series::<Q>::t(3);
        let one = Series::<Q>::one();
        let x = one.add(&t);
        let mut p = x.clone();
        for _ in 0..4 {
            p = p.mul(&x);
        }
        // (1+t)^5 truncated at 3
        assert_eq!(p.coeff(3, 0), Q::from_i64(10));
        assert!(p.coeff(4, 0).is_zero());
        assert_eq!(p.order(), 3);
    }

    #[test]
    fn inverse_of_one_plus_t() {
        let t = Series::<Q>::t(5);
        let x = Series::<Q>::one().add(&t).add(&t.conj());
        let y = x.try_inv().unwrap();
        assert_eq!(x.mul(&y), Series::one().with_order(5));
        assert!(Series::<Q>::t(4).try_inv().is_none());
    }

    #[test]
    fn conjugation_swaps_degrees() {
        let s = Series::monomial(Q::complex(1, 1, 2, 1), 2, 1, 4);
        let c = s.conj();
        assert_eq!(c.coeff(1, 2), Q::complex(1, 1, -2, 1));
        assert_eq!(c.conj(), s);
    }
}
