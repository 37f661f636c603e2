//! Forms on a 3-dimensional frame, contraction by a Beltrami differential,
//! and the extension map `e^{ι_φ|ι_φ̄}` with its inverse.

use deform_forge::exterior::{exp_contract, extend, extend_inverse, Form, VectorForm};
use deform_forge::scalar::{Coeff, GaussRat as Q};

fn main() {
    let n = 3;
    let dz = |k| Form::<Q>::dz(n, k);
    let dzb = |k| Form::<Q>::dzb(n, k);

    let omega = (dz(0).wedge(&dzb(0)) + dz(1).wedge(&dzb(1)) + dz(2).wedge(&dzb(2))).scale(&Q::i());
    println!("ω = {omega}");
    println!("ω is real: {}", omega.is_real());
    println!("ω² = {}", omega.wedge(&omega));

    // φ = t·dz̄¹ ⊗ ∂/∂z² with t = 1/3.
    let third = Q::ratio(1, 3);
    let mut m = vec![vec![Q::zero(); n]; n];
    m[1][0] = third;
    let phi = VectorForm::beltrami_from_matrix(n, &m);

    println!("φ⌟ω = {}", phi.contract(&omega));
    println!("e^(ι_φ) ω = {}", exp_contract(&phi, &omega));

    let ext = extend(&phi, &omega);
    println!("e^(ι_φ|ι_φ̄) ω = {ext}");
    let back = extend_inverse(&phi, &ext).expect("invertible for small φ");
    println!("inverse recovers ω: {}", back == omega);
}
