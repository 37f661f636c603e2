//! Dolbeault, ∂, Bott–Chern and Aeppli numbers of the Iwasawa structure.

use deform_forge::catalog::builtin;
use deform_forge::hodge::{Hodge, Theory};
use deform_forge::scalar::GaussRat as Q;

fn main() {
    let e = builtin("iwasawa").unwrap();
    let n = e.algebra.n();
    let hodge: Hodge<Q> = Hodge::new(&e.algebra, &e.metric);
    for theory in [Theory::Dolbeault, Theory::Del, Theory::BottChern, Theory::Aeppli] {
        println!("{}:", theory.key());
        for p in 0..=n {
            let row: Vec<String> = (0..=n).map(|q| hodge.cohomology_dim(theory, p, q).to_string()).collect();
            println!("  p={p}  {}", row.join(" "));
        }
    }
}
