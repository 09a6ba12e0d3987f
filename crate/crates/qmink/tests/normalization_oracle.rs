//! Normalization constants against exact rational arithmetic.
//!
//! For integer λ every Gamma factor is a factorial, so the constant is a
//! rational number that can be evaluated exactly from the Gamma form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use qmink::coherent_states::{log_norm_const, QuantizationParam};

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `Γ(n) = (n-1)!` for a positive integer `n`.
fn gamma(n: u64) -> BigInt {
    factorial(n - 1)
}

/// `(λ-1)(λ-2)²(λ-3) Γ(λ-2)Γ(λ-3) m!(m+2j+1)! / ((2j+1)! Γ(m+λ-1) Γ(m+2j+λ))`.
fn norm_const_exact(lambda: u64, two_j: u64, m: u64) -> BigRational {
    let num = BigInt::from((lambda - 1) * (lambda - 2) * (lambda - 2) * (lambda - 3))
        * gamma(lambda - 2)
        * gamma(lambda - 3)
        * factorial(m)
        * factorial(m + two_j + 1);
    let den = factorial(two_j + 1) * gamma(m + lambda - 1) * gamma(m + two_j + lambda);
    BigRational::new(num, den)
}

/// `ln` of a positive rational, accurate even when numerator and denominator
/// overflow `f64`.
fn ln_rational(r: &BigRational) -> f64 {
    let ln_big = |b: &BigInt| -> f64 {
        let bits = b.bits();
        let shift = bits.saturating_sub(60);
        let top: BigInt = b >> shift;
        top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln_big(r.numer()) - ln_big(r.denom())
}

#[test]
fn vacuum_constant_is_exactly_one() {
    for lambda in 4..=12 {
        assert!(norm_const_exact(lambda, 0, 0).is_one());
        let computed = log_norm_const(QuantizationParam::new(lambda as i64).unwrap(), 0, 0);
        assert_eq!(computed, 0.0);
    }
}

#[test]
fn log_norm_const_matches_rational_oracle() {
    for lambda in [4u64, 5, 6, 7, 10, 16] {
        let param = QuantizationParam::new(lambda as i64).unwrap();
        for degree in 0..=8u64 {
            for m in 0..=degree / 2 {
                let two_j = degree - 2 * m;
                let exact = ln_rational(&norm_const_exact(lambda, two_j, m));
                let computed = log_norm_const(param, two_j as u32, m as u32);
                let tol = 1e-13 * exact.abs().max(1.0);
                assert!(
                    (computed - exact).abs() <= tol,
                    "lambda {lambda}, 2j {two_j}, m {m}: {computed} vs {exact}"
                );
            }
        }
    }
}

#[test]
fn large_degrees_stay_accurate() {
    let param = QuantizationParam::new(5).unwrap();
    for (two_j, m) in [(24u64, 0u64), (0, 12), (10, 7), (31, 0)] {
        let exact = ln_rational(&norm_const_exact(5, two_j, m));
        let computed = log_norm_const(param, two_j as u32, m as u32);
        assert!((computed - exact).abs() <= 1e-12 * exact.abs().max(1.0), "{two_j} {m}");
    }
}
