//! Property tests over seeded random inputs.

use proptest::prelude::*;

use deform_forge::calculus::{bracket, LieAlgebra};
use deform_forge::catalog::{builtin, BUILTIN_NAMES};
use deform_forge::deformation::*;
use deform_forge::exterior::{exp_contract, extend, extend_inverse, VectorForm};
use deform_forge::hodge::{HermitianMetric, Hodge};
use deform_forge::random;
use deform_forge::report::{form_json, Provenance, Report};
use deform_forge::scalar::{Coeff, GaussRat as Q};

fn algebra(k: usize) -> LieAlgebra {
    builtin(BUILTIN_NAMES[k % BUILTIN_NAMES.len()]).unwrap().algebra
}

fn random_direction(len: usize, seed: u64) -> Vec<Q> {
    let mut rng = random::rng(seed);
    (0..len).map(|_| random::gauss(&mut rng, 2)).collect()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn differentials_square_to_zero(k in 0usize..7, seed in any::<u64>()) {
        let alg = algebra(k);
        let mut rng = random::rng(seed);
        let a = random::mixed_form(&mut rng, alg.n(), 2 * alg.n(), 0.5);
        prop_assert!(alg.d(&alg.d(&a)).is_zero());
        prop_assert!(alg.del(&alg.del(&a)).is_zero());
        prop_assert!(alg.delbar(&alg.delbar(&a)).is_zero());
        prop_assert!((alg.del(&alg.delbar(&a)) + alg.delbar(&alg.del(&a))).is_zero());
        prop_assert_eq!(alg.d(&a), alg.del(&a) + alg.delbar(&a));
        prop_assert_eq!(alg.d(&a.conj()), alg.d(&a).conj());
    }

    #[test]
    fn bracket_is_symmetric_and_bilinear(k in 0usize..7, seed in any::<u64>()) {
        let alg = algebra(k);
        let n = alg.n();
        let mut rng = random::rng(seed);
        let (phi, psi, chi) = (random::beltrami(&mut rng, n, 0.6), random::beltrami(&mut rng, n, 0.6), random::beltrami(&mut rng, n, 0.6));
        let c = random::gauss(&mut rng, 3);
        prop_assert_eq!(bracket(&alg, &phi, &psi), bracket(&alg, &psi, &phi));
        let lhs = bracket(&alg, &(phi.scale(&c) + psi.clone()), &chi);
        let rhs = bracket(&alg, &phi, &chi).scale(&c) + bracket(&alg, &psi, &chi);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn wedge_is_graded_commutative_and_conj_is_an_involution(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (p, q, r, s) = (1, 2, 2, 0);
        let a = random::form(&mut rng, 3, p, q, 0.6);
        let b = random::form(&mut rng, 3, r, s, 0.6);
        let sign = if ((p + q) * (r + s)) % 2 == 1 { Q::from_i64(-1) } else { Q::one() };
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(&sign));
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!(a.wedge(&b).conj(), a.conj().wedge(&b.conj()));
    }

    #[test]
    fn extension_map_is_invertible(k in 0usize..7, seed in any::<u64>()) {
        let n = algebra(k).n();
        let mut rng = random::rng(seed);
        let phi = random::beltrami(&mut rng, n, 0.4).scale(&Q::ratio(1, 4));
        let a = random::mixed_form(&mut rng, n, n, 0.5);
        let back = extend_inverse(&phi, &extend(&phi, &a));
        prop_assume!(back.is_ok());
        prop_assert_eq!(back.unwrap(), a.clone());
        // e^{ι_φ} preserves total degree on homogeneous input.
        let h = random::form(&mut rng, n, 1, 1, 0.6);
        prop_assert!(exp_contract(&phi, &h).terms().all(|(m, _)| m.degree() == 2));
    }

    #[test]
    fn reports_round_trip(seed in any::<u64>(), name in "[a-z_]{1,12}") {
        let mut rng = random::rng(seed);
        let f = random::mixed_form(&mut rng, 3, 3, 0.4);
        let mut r = Report::new("fuzz", &name);
        r.config("seed", seed);
        r.fact_with("form", form_json(&f), Provenance::Derived);
        r.check("always", seed % 2 == 0, "");
        let text = r.emit();
        prop_assert_eq!(Report::parse(&text).unwrap(), r);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn kuranishi_is_integrable_under_random_metrics(seed in any::<u64>()) {
        let e = builtin("iwasawa").unwrap();
        let metric = HermitianMetric::random(&mut random::rng(seed), 3);
        let h: Hodge<Q> = Hodge::new(&e.algebra, &metric);
        let dir = random_direction(h.harmonic_beltrami_basis().len(), seed ^ 1);
        let k = kuranishi(&h, 3, &dir).unwrap();
        prop_assert!(fixed_point_residuals(&h, &k).iter().all(|(_, v)| v.is_zero()));
        prop_assert!(k.first_obstruction().is_none());
        prop_assert!(integrability_residuals(&e.algebra, &k.phi).iter().all(|(_, v)| v.is_zero()));
        let linear = k.basis.iter().zip(&dir).fold(VectorForm::zero(3), |acc, (b, c)| acc + b.scale(c));
        prop_assert_eq!(k.phi.coeff(1, 0), linear);
    }

    #[test]
    fn kahler_residuals_vanish_under_random_metrics(seed in any::<u64>()) {
        let e = builtin("torus_2").unwrap();
        let metric = HermitianMetric::random(&mut random::rng(seed), 2);
        let h: Hodge<Q> = Hodge::new(&e.algebra, &metric);
        let dir = random_direction(h.harmonic_beltrami_basis().len(), seed ^ 2);
        let k = kuranishi(&h, 3, &dir).unwrap();
        let w = extend_kahler(&h, &metric.fundamental_form(), &k.phi, 3).unwrap();
        prop_assert!(verify_reduction(&e.algebra, &w, &k.phi, 3).all_zero());
        prop_assert!(verify_extension_closed(&e.algebra, &w, &k.phi, 3).all_zero());
    }

    #[test]
    fn balanced_residuals_vanish_under_random_diagonal_metrics(seed in any::<u64>()) {
        let e = builtin("abelian_I0").unwrap();
        let mut rng = random::rng(seed);
        let weights: Vec<Q> = (0..3).map(|_| Q::ratio(rand::Rng::gen_range(&mut rng, 1..=4), rand::Rng::gen_range(&mut rng, 1..=3))).collect();
        let metric = HermitianMetric::diagonal(&weights).unwrap();
        let h: Hodge<Q> = Hodge::new(&e.algebra, &metric);
        let mut dir = vec![Q::zero(); h.harmonic_beltrami_basis().len()];
        dir[0] = random::gauss(&mut rng, 2);
        let k = kuranishi(&h, 2, &dir).unwrap();
        prop_assume!(k.first_obstruction().is_none());
        let omega = metric.fundamental_form();
        let b = extend_balanced(&h, &omega, &k.phi, 2).unwrap();
        prop_assert!(verify_projection(&e.algebra, &b.omega_real, &k.phi, 2, ClosedKind::D).all_zero());
        prop_assert!(b.omega_real.is_real());
    }

    #[test]
    fn series_outputs_are_prefix_stable(seed in any::<u64>()) {
        let e = builtin("iwasawa").unwrap();
        let h: Hodge<Q> = Hodge::new(&e.algebra, &e.metric);
        let dir = random_direction(h.harmonic_beltrami_basis().len(), seed);
        let short = kuranishi(&h, 2, &dir).unwrap();
        let long = kuranishi(&h, 4, &dir).unwrap();
        let cut = long.phi.truncate(2);
        prop_assert_eq!(cut.coeffs().collect::<Vec<_>>(), short.phi.coeffs().collect::<Vec<_>>());

        let t = builtin("torus_2").unwrap();
        let ht: Hodge<Q> = Hodge::new(&t.algebra, &t.metric);
        let dir = random_direction(ht.harmonic_beltrami_basis().len(), seed ^ 3);
        let phi = kuranishi(&ht, 4, &dir).unwrap().phi;
        let w2 = extend_kahler(&ht, &t.omega(), &phi, 2).unwrap();
        let w4 = extend_kahler(&ht, &t.omega(), &phi, 4).unwrap();
        let cut = w4.truncate(2);
        prop_assert_eq!(cut.coeffs().collect::<Vec<_>>(), w2.coeffs().collect::<Vec<_>>());

        let p10 = majorant(&MajorantParams::from_ints(3, 7, 10).unwrap());
        let p20 = majorant(&MajorantParams::from_ints(3, 7, 20).unwrap());
        prop_assert_eq!(&p20[..11], &p10[..]);
    }
}

#[test]
fn balanced_prefix_is_stable_on_i0() {
    let e = builtin("abelian_I0").unwrap();
    let h: Hodge<Q> = Hodge::new(&e.algebra, &e.metric);
    let mut dir = vec![Q::zero(); h.harmonic_beltrami_basis().len()];
    dir[1] = Q::one();
    let phi = kuranishi(&h, 3, &dir).unwrap().phi;
    let b2 = extend_balanced(&h, &e.omega(), &phi, 2).unwrap();
    let b3 = extend_balanced(&h, &e.omega(), &phi, 3).unwrap();
    let lo: Vec<_> = b3.omega_real.truncate(2).coeffs().map(|(k, v)| (*k, v.clone())).collect();
    let want: Vec<_> = b2.omega_real.coeffs().map(|(k, v)| (*k, v.clone())).collect();
    assert_eq!(lo, want);
}
