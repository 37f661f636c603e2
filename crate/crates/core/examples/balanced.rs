//! Balanced extension on an abelian nilmanifold structure.

use deform_forge::catalog::builtin;
use deform_forge::deformation::{balanced_system_residuals, extend_balanced, kuranishi, verify_projection, ClosedKind};
use deform_forge::hodge::Hodge;
use deform_forge::scalar::{Coeff, GaussRat as Q};

fn main() {
    let e = builtin("abelian_I0").unwrap();
    let hodge: Hodge<Q> = Hodge::new(&e.algebra, &e.metric);
    let mut dir = vec![Q::zero(); hodge.harmonic_beltrami_basis().len()];
    dir[1] = Q::one();
    let order = 3;
    let k = kuranishi(&hodge, order, &dir).unwrap();
    match extend_balanced(&hodge, &e.omega(), &k.phi, order) {
        Ok(b) => {
            let omega0 = e.omega();
            println!("Ω(0) = ω²: {}", b.omega_real.coeff(0, 0) == omega0.wedge(&omega0));
            for (&(i, j), c) in b.omega_real.coeffs() {
                if (i, j) != (0, 0) && !c.is_zero() {
                    println!("Ω[{i},{j}] = {c}");
                }
            }
            println!("real: {}", b.omega_real.is_real());
            let sys = balanced_system_residuals(&e.algebra, &b.omega_tilde, &k.phi, order);
            let closed = verify_projection(&e.algebra, &b.omega_real, &k.phi, order, ClosedKind::D);
            println!("transformed system residuals vanish: {}", sys.all_zero());
            println!("d(extension) vanishes: {}", closed.all_zero());
        }
        Err(err) => println!("no extension: {err}"),
    }
}
