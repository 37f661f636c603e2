//! Seeded random inputs for identity fuzzing and property checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exterior::{basis, Form, VectorForm};
use crate::scalar::GaussRat;

pub type FuzzRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FuzzRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A Gaussian rational with numerators in `[-bound, bound]` and small
/// denominators.
pub fn gauss(rng: &mut FuzzRng, bound: i64) -> GaussRat {
    let den = |rng: &mut FuzzRng| if rng.gen_bool(0.25) { rng.gen_range(2..=3) } else { 1 };
    let (a, b) = (rng.gen_range(-bound..=bound), den(rng));
    let (c, d) = (rng.gen_range(-bound..=bound), den(rng));
    GaussRat::complex(a, b, c, d)
}

/// A random `(p,q)`-form; each basis monomial is present with probability
/// `density`.
pub fn form(rng: &mut FuzzRng, n: usize, p: usize, q: usize, density: f64) -> Form<GaussRat> {
    let mut f = Form::zero(n);
    for m in basis(n, p, q) {
        if rng.gen_bool(density) {
            f.add_term(m, gauss(rng, 3));
        }
    }
    f
}

/// A random form of mixed bidegree with components up to total degree `max_deg`.
pub fn mixed_form(rng: &mut FuzzRng, n: usize, max_deg: usize, density: f64) -> Form<GaussRat> {
    let mut f = Form::zero(n);
    for p in 0..=n {
        for q in 0..=n {
            if p + q <= max_deg && rng.gen_bool(0.5) {
                f = f + form(rng, n, p, q, density);
            }
        }
    }
    f
}

/// A random Beltrami differential (`T^{1,0}`-valued `(0,1)`-form).
pub fn beltrami(rng: &mut FuzzRng, n: usize, density: f64) -> VectorForm<GaussRat> {
    let comps = (0..n).map(|_| form(rng, n, 0, 1, density)).collect();
    VectorForm::holomorphic(n, comps)
}

/// A random `T^{1,0}`-valued `(r,s)`-form.
pub fn vector_form(rng: &mut FuzzRng, n: usize, r: usize, s: usize, density: f64) -> VectorForm<GaussRat> {
    let comps = (0..n).map(|_| form(rng, n, r, s, density)).collect();
    VectorForm::holomorphic(n, comps)
}
