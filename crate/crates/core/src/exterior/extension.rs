//! The exponentiated contraction `e^{ι_φ}`, the extension map
//! `e^{ι_φ|ι_φ̄}` and its inverse, and the frame endomorphisms built from a
//! Beltrami differential.

use super::{ExteriorError, Form, FrameEndo, Mono, VectorForm};
use crate::scalar::Coeff;

/// `e^{ι_V}(α) = Σ_k ι_V^k(α)/k!`, summed until the powers vanish.
pub fn exp_contract<R: Coeff>(v: &VectorForm<R>, alpha: &Form<R>) -> Form<R> {
    let mut out = alpha.clone();
    let mut term = alpha.clone();
    let mut k: i64 = 1;
    // Each contraction lowers the degree in one block, so 2n steps suffice.
    while k as usize <= 2 * alpha.n() {
        term = v.contract(&term).scale(&R::from_ratio(1, k));
        if term.is_zero() {
            break;
        }
        out = out + term.clone();
        k += 1;
    }
    out
}

/// The extension map `e^{ι_φ|ι_φ̄}`: on each monomial `f dz^I ∧ dz̄^J`
/// it applies `e^{ι_φ}` to `dz^I` and `e^{ι_φ̄}` to `dz̄^J` separately.
pub fn extend<R: Coeff>(phi: &VectorForm<R>, alpha: &Form<R>) -> Form<R> {
    let n = alpha.n();
    let phibar = phi.conj();
    let mut out = Form::zero(n);
    for (m, c) in alpha.terms() {
        let hol = exp_contract(phi, &Form::monomial(n, Mono::new(m.hol, 0), R::one()));
        let anti = exp_contract(&phibar, &Form::monomial(n, Mono::new(0, m.anti), R::one()));
        out = out + hol.wedge(&anti).scale(c);
    }
    out
}

/// The frame endomorphism `𝟙 + φ + φ̄`.
pub fn extend_frame<R: Coeff>(phi: &VectorForm<R>) -> FrameEndo<R> {
    let n = phi.n();
    FrameEndo::identity(n)
        .add(&FrameEndo::from_vector(phi))
        .add(&FrameEndo::from_vector(&phi.conj()))
}

/// `(𝟙 + φ + φ̄) ⨝ α`, the frame form of the extension map.
pub fn extend_by_frame<R: Coeff>(phi: &VectorForm<R>, alpha: &Form<R>) -> Form<R> {
    extend_frame(phi).apply(alpha)
}

/// Inverse of [`extend`]: `(𝟙 + φ + φ̄)^{-1} ⨝ α`.
pub fn extend_inverse<R: Coeff>(
    phi: &VectorForm<R>,
    alpha: &Form<R>,
) -> Result<Form<R>, ExteriorError> {
    Ok(extend_frame(phi).inverse()?.apply(alpha))
}

/// `A ⨝ α`.
pub fn simul_contract<R: Coeff>(endo: &FrameEndo<R>, alpha: &Form<R>) -> Form<R> {
    endo.apply(alpha)
}

/// `φ̄φ`, the `T^{0,1}`-valued `(0,1)`-form `φ ⌟ φ̄` (apply `φ̄` then `φ`).
pub fn phibar_phi<R: Coeff>(phi: &VectorForm<R>) -> VectorForm<R> {
    phi.contract_vec(&phi.conj())
}

/// `φφ̄`, the `T^{1,0}`-valued `(1,0)`-form `φ̄ ⌟ φ`; the conjugate of
/// [`phibar_phi`].
pub fn phi_phibar<R: Coeff>(phi: &VectorForm<R>) -> VectorForm<R> {
    phi.conj().contract_vec(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRat as Q;

    fn phi2() -> VectorForm<Q> {
        VectorForm::beltrami_from_matrix(
            2,
            &[vec![Q::ratio(1, 2), Q::i()], vec![Q::from_i64(-1), Q::complex(1, 3, 1, 1)]],
        )
    }

    #[test]
    fn exp_contract_truncates() {
        let n = 1;
        let phi = VectorForm::holomorphic(n, vec![Form::<Q>::dzb(n, 0).scale_i64(3)]);
        let out = exp_contract(&phi, &Form::dz(n, 0));
        assert_eq!(out, Form::dz(n, 0) + Form::dzb(n, 0).scale_i64(3));
        assert_eq!(exp_contract(&VectorForm::<Q>::zero(n), &Form::dz(n, 0)), Form::dz(n, 0));
    }

    #[test]
    fn exp_contract_is_multiplicative_on_top_degree() {
        let n = 2;
        let phi = phi2();
        let a = Form::<Q>::dz(n, 0).wedge(&Form::dz(n, 1));
        let direct = exp_contract(&phi, &a);
        let product = (Form::dz(n, 0) + phi.contract(&Form::dz(n, 0)))
            .wedge(&(Form::dz(n, 1) + phi.contract(&Form::dz(n, 1))));
        assert_eq!(direct, product);
    }

    #[test]
    fn extend_matches_frame_and_conjugation() {
        let n = 2;
        let phi = phi2();
        let a = Form::<Q>::from_indices(n, &[0], &[1], Q::complex(2, 1, -1, 2))
            + Form::from_indices(n, &[0, 1], &[0], Q::i());
        assert_eq!(extend(&phi, &a), extend_by_frame(&phi, &a));
        assert_eq!(extend(&phi, &a.conj()), extend(&phi, &a).conj());
        let back = extend_inverse(&phi, &extend(&phi, &a)).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn single_monomial_extension() {
        let n = 1;
        let f1 = Form::<Q>::dzb(n, 0).scale(&Q::complex(1, 2, 1, 1));
        let phi = VectorForm::holomorphic(n, vec![f1.clone()]);
        let w = Form::<Q>::dz(n, 0).wedge(&Form::dzb(n, 0)).scale(&Q::i());
        let expected = (Form::dz(n, 0) + f1.clone())
            .wedge(&(Form::dzb(n, 0) + f1.conj()))
            .scale(&Q::i());
        assert_eq!(extend(&phi, &w), expected);
    }
}
