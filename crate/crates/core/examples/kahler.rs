//! Kähler extension on the flat torus together with its residual checks.

use deform_forge::catalog::builtin;
use deform_forge::deformation::{extend_kahler, kuranishi, verify_extension_closed, verify_reduction};
use deform_forge::hodge::Hodge;
use deform_forge::scalar::GaussRat as Q;

fn main() {
    let e = builtin("torus_3").unwrap();
    let hodge: Hodge<Q> = Hodge::new(&e.algebra, &e.metric);
    let dir: Vec<Q> = (0..hodge.harmonic_beltrami_basis().len()).map(|i| Q::ratio(1, i as i64 + 2)).collect();
    let order = 4;
    let k = kuranishi(&hodge, order, &dir).unwrap();
    let omega = extend_kahler(&hodge, &e.omega(), &k.phi, order).unwrap();

    for (&(i, j), c) in omega.coeffs() {
        if !c.is_zero() {
            println!("ω[{i},{j}] = {c}");
        }
    }
    println!("real: {}", omega.is_real());
    let red = verify_reduction(&e.algebra, &omega, &k.phi, order);
    let closed = verify_extension_closed(&e.algebra, &omega, &k.phi, order);
    println!("reduction residuals vanish: {}", red.all_zero());
    println!("extension closed: {}", closed.all_zero());
}
