use super::{gen_mono, ExteriorError, Form, VectorForm};
use crate::linalg::Matrix;
use crate::scalar::Coeff;

/// An endomorphism of the coframe: generator `g` is sent to the 1-form
/// `images[g]`. Its simultaneous contraction `A ⨝ α` replaces every factor
/// of every monomial at once, which is the algebra homomorphism extending
/// the map on generators.
///
/// Products follow left-to-right application: `a.then(&b)` applies `a`
/// first, matching `(AB) ⨝ α = B ⨝ (A ⨝ α)`. The identity endomorphism acts
/// as the literal identity on forms of every bidegree.
#[derive(Clone, PartialEq, Debug)]
pub struct FrameEndo<R> {
    n: usize,
    images: Vec<Form<R>>,
}

impl<R: Coeff> FrameEndo<R> {
    pub fn identity(n: usize) -> Self {
        FrameEndo { n, images: (0..2 * n).map(|g| Form::gen(n, g)).collect() }
    }

    pub fn zero(n: usize) -> Self {
        FrameEndo { n, images: vec![Form::zero(n); 2 * n] }
    }

    /// The endomorphism `g ↦ V^g` of a vector-valued 1-form.
    pub fn from_vector(v: &VectorForm<R>) -> Self {
        assert!(
            v.comps().iter().all(|c| c.terms().all(|(m, _)| m.degree() == 1)),
            "frame endomorphisms need 1-form components"
        );
        FrameEndo { n: v.n(), images: v.comps().to_vec() }
    }

    pub fn from_images(n: usize, images: Vec<Form<R>>) -> Self {
        assert_eq!(images.len(), 2 * n);
        FrameEndo { n, images }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image(&self, g: usize) -> &Form<R> {
        &self.images[g]
    }

    /// The vector-valued 1-form with the same action on generators.
    pub fn to_vector(&self) -> VectorForm<R> {
        VectorForm::from_components(self.n, self.images.clone())
    }

    /// `self ⨝ α`.
    pub fn apply(&self, alpha: &Form<R>) -> Form<R> {
        assert_eq!(alpha.n(), self.n, "frame action across dimensions");
        let mut out = Form::zero(self.n);
        for (m, c) in alpha.terms() {
            let mut prod = Form::constant(self.n, c.clone());
            for g in m.generators(self.n) {
                prod = prod.wedge(&self.images[g]);
                if prod.is_zero() {
                    break;
                }
            }
            out = out + prod;
        }
        out
    }

    /// Apply `self`, then `next`.
    pub fn then(&self, next: &FrameEndo<R>) -> FrameEndo<R> {
        FrameEndo { n: self.n, images: self.images.iter().map(|f| next.apply(f)).collect() }
    }

    pub fn add(&self, other: &FrameEndo<R>) -> FrameEndo<R> {
        FrameEndo {
            n: self.n,
            images: self.images.iter().zip(&other.images).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &FrameEndo<R>) -> FrameEndo<R> {
        FrameEndo {
            n: self.n,
            images: self.images.iter().zip(&other.images).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &R) -> FrameEndo<R> {
        FrameEndo { n: self.n, images: self.images.iter().map(|f| f.scale(c)).collect() }
    }

    /// Row `g` holds the coefficients of `images[g]` on the generators.
    pub fn matrix(&self) -> Matrix<R> {
        let n2 = 2 * self.n;
        let mut m = Matrix::zeros(n2, n2);
        for (g, img) in self.images.iter().enumerate() {
            for h in 0..n2 {
                m.set(g, h, img.coeff(&gen_mono(self.n, h)));
            }
        }
        m
    }

    pub fn from_matrix(n: usize, m: &Matrix<R>) -> Self {
        let images = (0..2 * n)
            .map(|g| {
                let mut f = Form::zero(n);
                for h in 0..2 * n {
                    f = f + Form::gen(n, h).scale(m.get(g, h));
                }
                f
            })
            .collect();
        FrameEndo { n, images }
    }

    /// Inverse endomorphism, or `FrameDegenerate` when singular.
    pub fn inverse(&self) -> Result<FrameEndo<R>, ExteriorError> {
        let m = self.matrix();
        let inv = m.inverse().ok_or(ExteriorError::FrameDegenerate)?;
        Ok(FrameEndo::from_matrix(self.n, &inv))
    }

    /// Conjugate endomorphism `ḡ ↦ conj(images[g])`.
    pub fn conj(&self) -> FrameEndo<R> {
        let n = self.n;
        FrameEndo {
            n,
            images: (0..2 * n).map(|g| self.images[(g + n) % (2 * n)].conj()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat as Q;

    #[test]
    fn identity_acts_trivially() {
        let n = 2;
        let a = Form::<Q>::from_indices(n, &[0, 1], &[1], Q::complex(1, 2, 1, 3));
        assert_eq!(FrameEndo::identity(n).apply(&a), a);
    }

    #[test]
    fn composition_order_and_inverse() {
        let n = 2;
        let m = vec![vec![Q::from_i64(1), Q::ratio(1, 2)], vec![Q::i(), Q::from_i64(0)]];
        let phi = VectorForm::beltrami_from_matrix(n, &m);
        let a = FrameEndo::identity(n).add(&FrameEndo::from_vector(&phi));
        let b = FrameEndo::identity(n).add(&FrameEndo::from_vector(&phi.conj()));
        let alpha = Form::<Q>::from_indices(n, &[0], &[1], Q::one());
        assert_eq!(a.then(&b).apply(&alpha), b.apply(&a.apply(&alpha)));
        let ab = a.then(&b);
        let inv = ab.inverse().unwrap();
        assert_eq!(inv.apply(&ab.apply(&alpha)), alpha);
        assert_eq!(FrameEndo::from_matrix(n, &ab.matrix()), ab);
    }

    #[test]
    fn degenerate_frame_is_reported() {
        assert_eq!(FrameEndo::<Q>::zero(2).inverse(), Err(ExteriorError::FrameDegenerate));
    }
}
