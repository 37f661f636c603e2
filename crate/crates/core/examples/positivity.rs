//! Transversality of (p,p)-forms and the extremal constructions.

use deform_forge::exterior::{binomial, Form};
use deform_forge::hodge::HermitianMetric;
use deform_forge::positivity::{
    canonical_form, construct_extremal, pluecker_codim, transversality, ExtremalKind, SampleConfig,
};
use deform_forge::scalar::GaussRat as Q;

fn main() {
    let n = 3;
    let cfg = SampleConfig { count: 1500, ..SampleConfig::default() };
    let omega = (0..n).fold(Form::zero(n), |acc, k| acc + Form::from_indices(n, &[k], &[k], Q::i()));
    let omega2 = omega.wedge(&omega);
    let t = transversality(&omega2, 2, &cfg).unwrap();
    println!("ω² on C³: {} (margin {:.4}, exact = {})", t.verdict, t.margin, t.exact);

    for (n, q) in [(3, 1), (3, 2), (4, 1), (4, 3)] {
        let k = pluecker_codim(n, q);
        println!("n={n} q={q}: N = {}, k = {k}, N - k = {}", binomial(n, q), binomial(n, q) - k);
    }

    for (n, p, kind) in [(3, 2, ExtremalKind::ExactIndex), (4, 2, ExtremalKind::NegativeIndex)] {
        let e = construct_extremal(n, p, kind, 0, &cfg).unwrap();
        let c = canonical_form(&e.omega, p, &HermitianMetric::identity(n)).unwrap();
        println!(
            "{kind:?} n={n} p={p}: {} with index (+{}, -{}), margin {:.4}",
            e.verdict.verdict,
            c.positive_index(),
            c.negative_index(),
            e.verdict.margin
        );
    }
}
