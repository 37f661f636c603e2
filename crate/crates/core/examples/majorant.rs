//! The majorant series A(t) and the bound A² ≪ (β/γ)A.

use deform_forge::deformation::{dominates, majorant, series_product, MajorantParams};
use num_rational::BigRational;

fn main() {
    for (beta, gamma) in [(16, 1), (1, 1), (3, 7)] {
        let p = MajorantParams::from_ints(beta, gamma, 8).unwrap();
        let a = majorant(&p);
        let ratio = BigRational::new(beta.into(), gamma.into());
        let bound: Vec<BigRational> = a.iter().map(|c| c * &ratio).collect();
        let square = series_product(&a, &a);
        let shown: Vec<String> = a.iter().map(|c| c.to_string()).collect();
        println!("β={beta} γ={gamma}  A = [{}]", shown.join(", "));
        println!("  A² ≪ (β/γ)A: {}", dominates(&bound, &square[..bound.len()]));
    }
}
