use std::ops::{Add, Neg, Sub};

use super::Form;
use crate::scalar::Coeff;

/// A form valued in `T^{1,0} ⊕ T^{0,1}`: component `g < n` multiplies
/// `∂/∂z^g`, component `n + k` multiplies `∂/∂z̄^k`.
///
/// A Beltrami differential is a vector form whose only nonzero components
/// are `(0,1)`-forms in the holomorphic slots.
#[derive(Clone, PartialEq, Debug)]
pub struct VectorForm<R> {
    n: usize,
    comps: Vec<Form<R>>,
}

impl<R: Coeff> VectorForm<R> {
    pub fn zero(n: usize) -> Self {
        VectorForm { n, comps: vec![Form::zero(n); 2 * n] }
    }

    /// From the `2n` component forms.
    pub fn from_components(n: usize, comps: Vec<Form<R>>) -> Self {
        assert_eq!(comps.len(), 2 * n, "expected 2n components");
        assert!(comps.iter().all(|c| c.n() == n), "component dimension mismatch");
        VectorForm { n, comps }
    }

    /// `Σ_k comps[k] ⊗ ∂/∂z^k`.
    pub fn holomorphic(n: usize, comps: Vec<Form<R>>) -> Self {
        assert_eq!(comps.len(), n, "expected n components");
        let mut all = comps;
        all.extend((0..n).map(|_| Form::zero(n)));
        VectorForm::from_components(n, all)
    }

    /// `Σ_{k,j} m[k][j] dz̄^j ⊗ ∂/∂z^k`.
    pub fn beltrami_from_matrix(n: usize, m: &[Vec<R>]) -> Self {
        let comps = (0..n)
            .map(|k| {
                let mut f = Form::zero(n);
                for (j, c) in m[k].iter().enumerate().take(n) {
                    f = f + Form::dzb(n, j).scale(c);
                }
                f
            })
            .collect();
        VectorForm::holomorphic(n, comps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn comp(&self, g: usize) -> &Form<R> {
        &self.comps[g]
    }

    pub fn comps(&self) -> &[Form<R>] {
        &self.comps
    }

    pub fn set_comp(&mut self, g: usize, f: Form<R>) {
        assert_eq!(f.n(), self.n);
        self.comps[g] = f;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Form::is_zero)
    }

    /// True when only holomorphic vector slots are populated.
    pub fn is_type10(&self) -> bool {
        self.comps[self.n..].iter().all(Form::is_zero)
    }

    /// Common bidegree of the form parts, if homogeneous and nonzero.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut b = None;
        for c in self.comps.iter().filter(|c| !c.is_zero()) {
            let cb = c.bidegree()?;
            match b {
                None => b = Some(cb),
                Some(prev) if prev != cb => return None,
                _ => {}
            }
        }
        b
    }

    /// Beltrami differential: `(0,1)` form parts in holomorphic slots.
    pub fn is_beltrami(&self) -> bool {
        self.is_type10() && self.comps.iter().all(|c| c.is_of_type(0, 1))
    }

    /// Contraction `ι_V α = Σ_g V^g ∧ (∂_g ⌟ α)`.
    pub fn contract(&self, alpha: &Form<R>) -> Form<R> {
        assert_eq!(self.n, alpha.n(), "contraction across dimensions");
        let mut out = Form::zero(self.n);
        for (g, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let i = alpha.interior(g);
            if !i.is_zero() {
                out = out + c.wedge(&i);
            }
        }
        out
    }

    /// `ι_V^k α`.
    pub fn contract_pow(&self, alpha: &Form<R>, k: usize) -> Form<R> {
        let mut out = alpha.clone();
        for _ in 0..k {
            out = self.contract(&out);
        }
        out
    }

    /// Contraction into a vector form: `(V ⌟ W)^g = ι_V(W^g)`.
    pub fn contract_vec(&self, w: &VectorForm<R>) -> VectorForm<R> {
        VectorForm {
            n: self.n,
            comps: w.comps.iter().map(|c| self.contract(c)).collect(),
        }
    }

    /// Conjugate vector form: swaps holomorphic and antiholomorphic slots.
    pub fn conj(&self) -> VectorForm<R> {
        let n = self.n;
        let comps = (0..2 * n)
            .map(|g| self.comps[(g + n) % (2 * n)].conj())
            .collect();
        VectorForm { n, comps }
    }

    pub fn scale(&self, c: &R) -> Self {
        VectorForm { n: self.n, comps: self.comps.iter().map(|f| f.scale(c)).collect() }
    }

    pub fn map_forms(&self, f: impl Fn(&Form<R>) -> Form<R>) -> Self {
        VectorForm { n: self.n, comps: self.comps.iter().map(f).collect() }
    }

    pub fn map<R2: Coeff>(&self, f: impl Fn(&R) -> R2 + Copy) -> VectorForm<R2> {
        VectorForm { n: self.n, comps: self.comps.iter().map(|c| c.map(f)).collect() }
    }

    /// Coordinates of a `T^{1,0}`-valued `(p,q)` vector form, slot-major.
    pub fn to_vector(&self, p: usize, q: usize) -> Vec<R> {
        self.comps[..self.n].iter().flat_map(|c| c.to_vector(p, q)).collect()
    }

    pub fn from_vector(n: usize, p: usize, q: usize, v: &[R]) -> Self {
        let d = super::binomial(n, p) * super::binomial(n, q);
        assert_eq!(v.len(), n * d);
        let comps = (0..n).map(|k| Form::from_vector(n, p, q, &v[k * d..(k + 1) * d])).collect();
        VectorForm::holomorphic(n, comps)
    }
}

impl<R: Coeff> Add for &VectorForm<R> {
    type Output = VectorForm<R>;
    fn add(self, rhs: &VectorForm<R>) -> VectorForm<R> {
        assert_eq!(self.n, rhs.n);
        VectorForm {
            n: self.n,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<R: Coeff> Add for VectorForm<R> {
    type Output = VectorForm<R>;
    fn add(self, rhs: VectorForm<R>) -> VectorForm<R> {
        &self + &rhs
    }
}

impl<R: Coeff> Sub for &VectorForm<R> {
    type Output = VectorForm<R>;
    fn sub(self, rhs: &VectorForm<R>) -> VectorForm<R> {
        assert_eq!(self.n, rhs.n);
        VectorForm {
            n: self.n,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<R: Coeff> Sub for VectorForm<R> {
    type Output = VectorForm<R>;
    fn sub(self, rhs: VectorForm<R>) -> VectorForm<R> {
        &self - &rhs
    }
}

impl<R: Coeff> Neg for &VectorForm<R> {
    type Output = VectorForm<R>;
    fn neg(self) -> VectorForm<R> {
        self.map_forms(|f| -f)
    }
}
