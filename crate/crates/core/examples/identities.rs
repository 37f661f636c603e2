//! Exact checks of the calculus identities on a single input and a seeded
//! random batch.

use deform_forge::calculus::{validate_identity, IdentityId};
use deform_forge::catalog::builtin;
use deform_forge::fuzz::{fuzz_identity, random_case};
use deform_forge::random;
use deform_forge::scalar::GaussRat as Q;

fn main() {
    let alg = builtin("iwasawa").unwrap().algebra;
    let case = random_case(&mut random::rng(11), IdentityId::F1, alg.n());
    let rep = validate_identity(&alg, IdentityId::F1, &case.phi, &case.psi, &case.alpha).unwrap();
    println!("{alg}");
    println!("f1 on one case: lhs = {}", rep.lhs);
    println!("               holds = {}", rep.holds());

    println!("\n{:<22} {:>6} {:>8} {:>12}", "identity", "cases", "passed", "nontrivial");
    for which in IdentityId::ALL {
        let t = fuzz_identity::<Q>(&alg, which, 60, 2024);
        println!("{:<22} {:>6} {:>8} {:>12}", which.key(), t.cases, t.passed, t.nontrivial);
    }
}
