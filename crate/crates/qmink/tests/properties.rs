//! Property tests for geometric and algebraic invariants.

use proptest::prelude::*;
use qmink::berezin_quadrature::{integrate_mu_lambda, MCConfig};
use qmink::coherent_states::{amplitude, kernel_closed, QuantizationParam};
use qmink::conformal_geometry::{
    cayley, cayley_inv, exp_algebra, in_domain, mobius, operator_norm, AlgebraElement, EtaConvention,
};
use qmink::fock_basis::{Basis, Truncation};
use qmink::ladder_operators::LadderSet;
use qmink::{Complex64, Mat2C};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A point of the matrix ball with operator norm at most `radius`.
fn ball_point(radius: f64) -> impl Strategy<Value = Mat2C> {
    (prop::array::uniform8(-1.0f64..1.0), 0.0..radius).prop_filter_map("zero matrix", |(raw, r)| {
        let m = Mat2C::new(
            Complex64::new(raw[0], raw[1]),
            Complex64::new(raw[2], raw[3]),
            Complex64::new(raw[4], raw[5]),
            Complex64::new(raw[6], raw[7]),
        );
        let norm = operator_norm(&m);
        (norm > 1e-9).then(|| m * Complex64::new(r / norm, 0.0))
    })
}

fn group_element(seed: u64, scale: f64) -> qmink::conformal_geometry::GroupElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = AlgebraElement::random(&mut rng, EtaConvention::Diagonal, scale);
    exp_algebra(&x, 1.0)
}

fn max_abs(m: &Mat2C) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn lambda_strategy() -> impl Strategy<Value = QuantizationParam> {
    (4i64..=9).prop_map(|l| QuantizationParam::new(l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cayley_round_trip(z in ball_point(0.95)) {
        let w = cayley_inv(&z).unwrap();
        let back = cayley(&w).unwrap();
        prop_assert!(max_abs(&(back - z)) < 1e-10);
    }

    #[test]
    fn mobius_is_a_left_action(seed in any::<u64>(), z in ball_point(0.9)) {
        let g = group_element(seed, 0.3);
        let h = group_element(seed.wrapping_add(1), 0.3);
        let gh = g.compose(&h).unwrap();
        let direct = mobius(&gh, &z).unwrap();
        let nested = mobius(&g, &mobius(&h, &z).unwrap()).unwrap();
        prop_assert!(max_abs(&(direct - nested)) < 1e-9);
    }

    #[test]
    fn group_preserves_the_ball(seed in any::<u64>(), z in ball_point(0.9)) {
        let g = group_element(seed, 0.4);
        prop_assert!(in_domain(&mobius(&g, &z).unwrap()));
    }

    #[test]
    fn kernel_is_hermitian(lambda in lambda_strategy(), z in ball_point(0.9), v in ball_point(0.9)) {
        let a = kernel_closed(lambda, &z, &v).unwrap();
        let b = kernel_closed(lambda, &v, &z).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn amplitude_modulus_is_invariant(
        lambda in lambda_strategy(),
        seed in any::<u64>(),
        z in ball_point(0.8),
        v in ball_point(0.8),
    ) {
        let g = group_element(seed, 0.3);
        let before = amplitude(lambda, &z, &v).unwrap().norm();
        let after = amplitude(lambda, &mobius(&g, &z).unwrap(), &mobius(&g, &v).unwrap()).unwrap().norm();
        prop_assert!((before - after).abs() < 1e-9);
        prop_assert!(before <= 1.0 + 1e-12);
    }

    #[test]
    fn basis_shells_fill_the_truncation(max_degree in 0u32..=12) {
        let basis = Basis::enumerate(Truncation::new(max_degree));
        prop_assert_eq!(basis.len(), Truncation::new(max_degree).dimension());
        let mut total = 0;
        for d in 0..=max_degree {
            let range = basis.degree_range(d);
            prop_assert_eq!(range.len(), Basis::shell_size(d));
            prop_assert!(basis.indices()[range].iter().all(|i| i.degree() == d));
            total += Basis::shell_size(d);
        }
        prop_assert_eq!(total, basis.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn annihilators_commute(lambda in lambda_strategy(), k in 1usize..=2, l in 1usize..=2, m in 1usize..=2, n in 1usize..=2) {
        let ladders = LadderSet::new(lambda, Truncation::new(5));
        let comm = ladders.annihilator(k, l).unwrap().commutator(ladders.annihilator(m, n).unwrap()).unwrap();
        let worst = comm.to_dense().iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12, "{}", worst);
    }

    #[test]
    fn shard_count_never_changes_estimates(seed in any::<u64>(), samples in 1u64..5000, shards in 1usize..20) {
        let lambda = QuantizationParam::new(5).unwrap();
        let f = |z: &Mat2C| z[(0, 1)] * z[(1, 0)].conj() + Complex64::new(1.0, 0.0);
        let one = integrate_mu_lambda(f, lambda, &MCConfig::new(seed, samples, 1).unwrap());
        let many = integrate_mu_lambda(f, lambda, &MCConfig::new(seed, samples, shards).unwrap());
        prop_assert_eq!(one.value, many.value);
        prop_assert_eq!(one.stderr.to_bits(), many.stderr.to_bits());
        prop_assert_eq!(one.accepted, many.accepted);
    }
}
