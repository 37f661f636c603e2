//! Closed extensions by projection, including an input that cannot be
//! extended.

use deform_forge::catalog::builtin;
use deform_forge::deformation::{extend_dclosed_projection, kuranishi, verify_projection, ClosedKind};
use deform_forge::exterior::Form;
use deform_forge::hodge::Hodge;
use deform_forge::scalar::{Coeff, GaussRat as Q};

fn main() {
    let e = builtin("iwasawa").unwrap();
    let hodge: Hodge<Q> = Hodge::new(&e.algebra, &e.metric);
    let mut dir = vec![Q::zero(); hodge.harmonic_beltrami_basis().len()];
    dir[4] = Q::one();
    let order = 2;
    let k = kuranishi(&hodge, order, &dir).unwrap();

    let inputs = [
        ("ω¹²", Form::from_indices(3, &[0, 1], &[], Q::one()), ClosedKind::D),
        ("iω^(11̄)", Form::from_indices(3, &[0], &[0], Q::i()), ClosedKind::D),
        ("iω^(11̄)", Form::from_indices(3, &[0], &[0], Q::i()), ClosedKind::DdBar),
    ];
    for (label, input, kind) in inputs {
        match extend_dclosed_projection(&hodge, &input, &k.phi, order, kind) {
            Ok(s) => {
                let ok = verify_projection(&e.algebra, &s, &k.phi, order, kind).all_zero();
                println!("{label} ({kind:?}): extended, residuals vanish = {ok}");
            }
            Err(err) => println!("{label} ({kind:?}): {err}"),
        }
    }
}
