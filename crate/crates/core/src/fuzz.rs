//! Randomized exact checking of the calculus identities.
//!
//! Every case draws its inputs from its own ChaCha stream, derived from the
//! run seed, the identity and the case index, so results do not depend on
//! thread scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::calculus::{validate_identity, IdentityId, LieAlgebra};
use crate::exterior::{Form, VectorForm};
use crate::random::{self, FuzzRng};
use crate::report::{form_json, Report};
use crate::scalar::{Coeff, GaussRat, Scalar};

const DENSITY: f64 = 0.6;

/// Inputs for one evaluation of [`validate_identity`].
#[derive(Clone, Debug)]
pub struct FuzzCase<R> {
    pub phi: VectorForm<R>,
    pub psi: VectorForm<R>,
    pub alpha: Form<R>,
}

impl FuzzCase<GaussRat> {
    pub fn convert<R: Coeff>(&self) -> FuzzCase<R> {
        FuzzCase {
            phi: self.phi.map(R::from_gauss),
            psi: self.psi.map(R::from_gauss),
            alpha: self.alpha.map(R::from_gauss),
        }
    }
}

pub fn case_seed(seed: u64, which: IdentityId, index: usize) -> u64 {
    let tag = IdentityId::ALL.iter().position(|w| *w == which).unwrap_or(0) as u64;
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (tag << 48) ^ index as u64
}

/// Inputs of the right shape for `which`: `ψ` is a Beltrami differential
/// for f1 and a `T^{1,0}`-valued `(r,s)`-form for 7for-5; `α` is `(1,1)`
/// for the special case of 7for-7 and of random bidegree otherwise, biased
/// towards bidegrees where both sides can be nonzero.
pub fn random_case(rng: &mut FuzzRng, which: IdentityId, n: usize) -> FuzzCase<GaussRat> {
    let phi = random::beltrami(rng, n, DENSITY);
    let psi = match which {
        IdentityId::F1 => random::beltrami(rng, n, DENSITY),
        IdentityId::Seven5 => {
            let (r, s) = (rng.gen_range(0..=1), rng.gen_range(0..=2.min(n)));
            random::vector_form(rng, n, r, s, DENSITY)
        }
        _ => VectorForm::zero(n),
    };
    let (p, q) = match which {
        IdentityId::Seven7Special => (1, 1),
        IdentityId::Commutator => (rng.gen_range(2.min(n)..=n), rng.gen_range(0..=n.saturating_sub(3))),
        IdentityId::Seven5 => (rng.gen_range(1..=n), rng.gen_range(0..n)),
        _ => (rng.gen_range(0..=n), rng.gen_range(0..=n)),
    };
    let alpha = random::form(rng, n, p, q, DENSITY);
    FuzzCase { phi, psi, alpha }
}

#[derive(Clone, Debug)]
pub struct FuzzFailure<R> {
    pub index: usize,
    pub seed: u64,
    pub lhs: Form<R>,
    pub rhs: Form<R>,
}

/// Outcome of fuzzing one identity.
#[derive(Clone, Debug)]
pub struct Tally<R> {
    pub which: IdentityId,
    pub cases: usize,
    pub passed: usize,
    /// Cases where the left side is nonzero.
    pub nontrivial: usize,
    pub first_failure: Option<FuzzFailure<R>>,
}

impl<R> Tally<R> {
    pub fn all_passed(&self) -> bool {
        self.passed == self.cases
    }
}

/// Run `cases` random cases of `which` on `alg`, evaluated in `R`.
pub fn fuzz_identity<R: Coeff>(alg: &LieAlgebra, which: IdentityId, cases: usize, seed: u64) -> Tally<R> {
    let n = alg.n();
    let results: Vec<(bool, bool, Option<FuzzFailure<R>>)> = (0..cases)
        .into_par_iter()
        .map(|index| {
            let s = case_seed(seed, which, index);
            let case = random_case(&mut random::rng(s), which, n).convert::<R>();
            let rep = validate_identity(alg, which, &case.phi, &case.psi, &case.alpha)
                .expect("generated inputs have compatible degrees");
            let ok = rep.holds();
            let nontrivial = !rep.lhs.is_zero();
            let failure = (!ok).then(|| FuzzFailure { index, seed: s, lhs: rep.lhs, rhs: rep.rhs });
            (ok, nontrivial, failure)
        })
        .collect();
    let passed = results.iter().filter(|r| r.0).count();
    let nontrivial = results.iter().filter(|r| r.1).count();
    let first_failure = results.into_iter().find_map(|r| r.2);
    Tally { which, cases, passed, nontrivial, first_failure }
}

/// One check per identity; a failing check carries the first failing case.
pub fn fuzz_report<S: Scalar>(alg: &LieAlgebra, which: &[IdentityId], cases: usize, seed: u64) -> Report {
    let mut r = Report::new("fuzz", alg.name());
    r.config("cases", cases).config("seed", seed).config("backend", S::backend_name());
    r.config("identities", which.iter().map(|w| w.key()).collect::<Vec<_>>().join(","));
    for &w in which {
        let t = fuzz_identity::<S>(alg, w, cases, seed);
        r.fact(
            &format!("{w}.tally"),
            json!({"cases": t.cases, "passed": t.passed, "nontrivial": t.nontrivial}),
        );
        let detail = match &t.first_failure {
            None => String::new(),
            Some(f) => {
                let diff = &f.lhs - &f.rhs;
                json!({"case": f.index, "case_seed": f.seed, "lhs_minus_rhs": form_json(&diff)}).to_string()
            }
        };
        r.check(w.key(), t.all_passed(), detail);
    }
    r
}
