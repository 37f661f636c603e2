//! Kuranishi family on the Iwasawa structure through order 4.

use deform_forge::catalog::builtin;
use deform_forge::deformation::{fixed_point_residuals, integrability_residuals, kuranishi};
use deform_forge::hodge::Hodge;
use deform_forge::scalar::{Coeff, GaussRat as Q};

fn main() {
    let e = builtin("iwasawa").unwrap();
    let hodge: Hodge<Q> = Hodge::new(&e.algebra, &e.metric);
    let basis = hodge.harmonic_beltrami_basis();
    println!("dim H^(0,1)(T^(1,0)) = {}", basis.len());

    let mut dir = vec![Q::zero(); basis.len()];
    dir[0] = Q::one();
    dir[3] = Q::ratio(1, 2);
    let k = kuranishi(&hodge, 4, &dir).unwrap();
    for (&(i, j), c) in k.phi.coeffs() {
        if !c.is_zero() {
            println!("φ[{i},{j}] components:");
            for (g, f) in c.comps().iter().enumerate().filter(|(_, f)| !f.is_zero()) {
                println!("  ∂/∂z{}: {f}", g + 1);
            }
        }
    }
    let fixed = fixed_point_residuals(&hodge, &k).iter().all(|(_, r)| r.is_zero());
    let integrable = integrability_residuals(&e.algebra, &k.phi).iter().all(|(_, r)| r.is_zero());
    println!("fixed point holds: {fixed}");
    println!("integrable through order 4: {integrable}");
    println!("first obstruction: {:?}", k.first_obstruction());
}
