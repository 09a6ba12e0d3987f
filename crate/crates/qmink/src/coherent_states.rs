//! Coefficient polynomials `Δ^{jm}_{j1j2}(Z)`, coherent vectors, the
//! reproducing kernel and transition amplitudes.

use crate::conformal_geometry::{in_domain, in_tube, minkowski_square};
use crate::fock_basis::{Basis, BasisIndex, Truncation};
use crate::{Complex64, Error, Mat2C, Result};
use std::collections::BTreeMap;
use std::fmt;

/// Integer quantization parameter `λ ≥ 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuantizationParam(u32);

impl QuantizationParam {
    pub fn new(lambda: i64) -> Result<Self> {
        if (4..=u32::MAX as i64).contains(&lambda) {
            Ok(Self(lambda as u32))
        } else {
            Err(Error::InvalidLambda(lambda))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl fmt::Display for QuantizationParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `ln n!` by direct summation; arguments here stay small.
pub fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `ln N^λ_{jm}` for the normalization constant of the `(j, m)` shell.
///
/// For integer `λ` the Gamma prefactor collapses to `(λ-1)!(λ-2)!`, leaving
/// `N = m!/(λ-1)_m · (2j+2)_m/(λ)_{m+2j}` in rising factorials. Evaluating the
/// ratios term by term keeps the vacuum value exactly `1`.
pub fn log_norm_const(lambda: QuantizationParam, two_j: u32, m: u32) -> f64 {
    let l = lambda.as_f64();
    let (tj, m) = (two_j as f64, m as f64);
    let rising = |start: f64, len: f64| -> f64 {
        (0..len as u64).map(|k| (start + k as f64).ln()).sum()
    };
    rising(1.0, m) - rising(l - 1.0, m) + rising(tj + 2.0, m) - rising(l, m + tj)
}

/// One monomial `c · z11^a z12^b z21^c z22^d` of the `S`-sum.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coeff: f64,
    exps: [u32; 4],
}

/// Precomputed expansion of `Δ` at one index: `prefactor · det(Z)^m · Σ terms`.
#[derive(Debug, Clone, PartialEq)]
struct DeltaExpansion {
    m: u32,
    terms: Vec<Term>,
}

fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

fn expansion(lambda: QuantizationParam, idx: &BasisIndex) -> DeltaExpansion {
    let two_j = idx.two_j() as i64;
    // j ± j1, j ± j2 are integers.
    let jp1 = (two_j + idx.two_j1() as i64) / 2;
    let jm1 = (two_j - idx.two_j1() as i64) / 2;
    let jp2 = (two_j + idx.two_j2() as i64) / 2;
    let jm2 = (two_j - idx.two_j2() as i64) / 2;
    let j12 = (idx.two_j1() as i64 + idx.two_j2() as i64) / 2;

    let log_pre = 0.5
        * (ln_factorial(jp1 as u64) + ln_factorial(jm1 as u64)
            - ln_factorial(jp2 as u64)
            - ln_factorial(jm2 as u64))
        - 0.5 * (log_norm_const(lambda, idx.two_j(), idx.m()) + ln_factorial(two_j as u64));
    let pre = log_pre.exp();

    let terms = (j12.max(0)..=jp1.min(jp2))
        .map(|s| Term {
            coeff: pre * binomial(jp2, s) * binomial(jm2, s - j12),
            exps: [s as u32, (jp1 - s) as u32, (jp2 - s) as u32, (s - j12) as u32],
        })
        .collect();
    DeltaExpansion { m: idx.m(), terms }
}

/// The `S`-sum of `Δ` at `idx` (prefactor included, `det(Z)^m` excluded) as
/// `(exponents of z11, z12, z21, z22; coefficient)`.
pub(crate) fn delta_terms(lambda: QuantizationParam, idx: &BasisIndex) -> Vec<([u32; 4], f64)> {
    expansion(lambda, idx).terms.into_iter().map(|t| (t.exps, t.coeff)).collect()
}

/// `Δ` at `idx` as a map from exponents of `(z11, z12, z21, z22)` to real
/// coefficients, with `det Z` expanded.
pub(crate) fn delta_monomials(
    lambda: QuantizationParam,
    idx: &BasisIndex,
) -> BTreeMap<[u32; 4], f64> {
    let mut out = BTreeMap::new();
    let base = delta_terms(lambda, idx);
    let m = idx.m();
    for (exps, c) in base {
        for k in 0..=m {
            // det^m = Σ C(m,k) (z11 z22)^{m-k} (-z12 z21)^k
            let binom = binomial(m as i64, k as i64);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let e = [exps[0] + m - k, exps[1] + k, exps[2] + k, exps[3] + m - k];
            *out.entry(e).or_insert(0.0) += c * binom * sign;
        }
    }
    out
}

/// Powers `z_kl^e` for `e ≤ max` of the four entries, plus powers of `det Z`.
struct PowerTable {
    entries: [Vec<Complex64>; 4],
    det: Vec<Complex64>,
}

impl PowerTable {
    fn new(z: &Mat2C, max: u32) -> Self {
        let powers = |base: Complex64| {
            let mut out = Vec::with_capacity(max as usize + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            for _ in 0..=max {
                out.push(acc);
                acc *= base;
            }
            out
        };
        Self {
            entries: [
                powers(z[(0, 0)]),
                powers(z[(0, 1)]),
                powers(z[(1, 0)]),
                powers(z[(1, 1)]),
            ],
            det: powers(z.determinant()),
        }
    }

    fn eval(&self, exp: &DeltaExpansion) -> Complex64 {
        let sum: Complex64 = exp
            .terms
            .iter()
            .map(|t| {
                (0..4).fold(Complex64::new(t.coeff, 0.0), |acc, k| {
                    acc * self.entries[k][t.exps[k] as usize]
                })
            })
            .sum();
        self.det[exp.m as usize] * sum
    }
}

/// `Δ^{jm}_{j1j2}(Z)` at a single index.
pub fn delta(lambda: QuantizationParam, idx: &BasisIndex, z: &Mat2C) -> Complex64 {
    let table = PowerTable::new(z, idx.degree());
    table.eval(&expansion(lambda, idx))
}

/// Cached expansions of every `Δ` in a truncated basis, for repeated
/// evaluation at many points.
#[derive(Debug, Clone)]
pub struct CoherentFactory {
    lambda: QuantizationParam,
    basis: Basis,
    expansions: Vec<DeltaExpansion>,
}

impl CoherentFactory {
    pub fn new(lambda: QuantizationParam, trunc: Truncation) -> Self {
        let basis = Basis::enumerate(trunc);
        let expansions = basis.indices().iter().map(|idx| expansion(lambda, idx)).collect();
        Self {
            lambda,
            basis,
            expansions,
        }
    }

    pub fn lambda(&self) -> QuantizationParam {
        self.lambda
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// `Δ` at every enumerated index, without a domain check.
    pub fn deltas(&self, z: &Mat2C) -> Vec<Complex64> {
        let table = PowerTable::new(z, self.basis.max_degree());
        self.expansions.iter().map(|e| table.eval(e)).collect()
    }

    /// Coherent vector `|Z; λ⟩` truncated to the basis.
    pub fn coherent(&self, z: &Mat2C) -> Result<CoherentVector> {
        if !in_domain(z) {
            return Err(Error::OutsideDomain);
        }
        Ok(CoherentVector {
            amplitudes: self.deltas(z),
            z: *z,
            lambda: self.lambda,
            trunc: self.basis.truncation(),
        })
    }
}

/// Truncated coherent vector; `amplitudes[k] = Δ_k(Z)` in enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentVector {
    pub amplitudes: Vec<Complex64>,
    pub z: Mat2C,
    pub lambda: QuantizationParam,
    pub trunc: Truncation,
}

impl CoherentVector {
    /// `Σ |Δ_k(Z)|²`.
    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `Σ conj(self_k) other_k`, the truncated kernel.
    pub fn overlap(&self, other: &CoherentVector) -> Result<Complex64> {
        if self.trunc != other.trunc || self.lambda != other.lambda {
            return Err(Error::TruncationMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Coherent vector at `Z`.
pub fn coherent_amplitudes(
    lambda: QuantizationParam,
    z: &Mat2C,
    trunc: Truncation,
) -> Result<CoherentVector> {
    CoherentFactory::new(lambda, trunc).coherent(z)
}

/// Reproducing kernel `det(E - Z†V)^{-λ}`.
pub fn kernel_closed(lambda: QuantizationParam, z: &Mat2C, v: &Mat2C) -> Result<Complex64> {
    let det = (Mat2C::identity() - z.adjoint() * v).determinant();
    if det.norm() < 1e-300 {
        return Err(Error::SingularMatrix("kernel_closed"));
    }
    Ok(det.powi(-(lambda.get() as i32)))
}

/// Truncated kernel `Σ conj(Δ(Z)) Δ(V)`.
pub fn kernel_series(
    lambda: QuantizationParam,
    z: &Mat2C,
    v: &Mat2C,
    trunc: Truncation,
) -> Result<Complex64> {
    let factory = CoherentFactory::new(lambda, trunc);
    factory.coherent(z)?.overlap(&factory.coherent(v)?)
}

/// Normalized transition amplitude between the coherent states at `Z` and `V`.
pub fn amplitude(lambda: QuantizationParam, z: &Mat2C, v: &Mat2C) -> Result<Complex64> {
    if !in_domain(z) || !in_domain(v) {
        return Err(Error::OutsideDomain);
    }
    let zz = kernel_closed(lambda, z, z)?.re;
    let vv = kernel_closed(lambda, v, v)?.re;
    Ok(kernel_closed(lambda, z, v)? / (zz * vv).sqrt())
}

/// Transition amplitude in tube coordinates,
/// `(((w-w̄)²(v-v̄)²)^{1/2} / (w-v̄)²)^λ`.
///
/// For points of the tube `(w-w̄)² = -4y²` is negative real, and the square
/// root is taken factorwise as `2i√(y²) · 2i√(u²)` so the amplitude is `1` on
/// the diagonal.
pub fn amplitude_tube(
    lambda: QuantizationParam,
    w: &[Complex64; 4],
    v: &[Complex64; 4],
) -> Result<Complex64> {
    let point = crate::conformal_geometry::from_components;
    if !in_tube(&point(w)) || !in_tube(&point(v)) {
        return Err(Error::OutsideDomain);
    }
    let diff = |a: &[Complex64; 4], b: &[Complex64; 4]| -> [Complex64; 4] {
        std::array::from_fn(|mu| a[mu] - b[mu].conj())
    };
    let num = minkowski_square(&diff(w, w)).sqrt() * minkowski_square(&diff(v, v)).sqrt();
    let den = minkowski_square(&diff(w, v));
    if den.norm() < 1e-300 {
        return Err(Error::SingularMatrix("amplitude_tube"));
    }
    Ok((num / den).powi(lambda.get() as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal_geometry::pauli;

    fn lam(l: i64) -> QuantizationParam {
        QuantizationParam::new(l).unwrap()
    }

    fn sample_z() -> Mat2C {
        Mat2C::new(
            Complex64::new(0.2, -0.1),
            Complex64::new(0.15, 0.3),
            Complex64::new(-0.25, 0.05),
            Complex64::new(0.1, 0.2),
        )
    }

    #[test]
    fn rejects_small_lambda() {
        assert_eq!(QuantizationParam::new(3), Err(Error::InvalidLambda(3)));
        assert!(QuantizationParam::new(4).is_ok());
    }

    #[test]
    fn norm_const_low_shells() {
        for l in [4, 5, 9] {
            assert!(log_norm_const(lam(l), 0, 0).abs() < 1e-13);
            let half = log_norm_const(lam(l), 1, 0).exp();
            assert!((half - 1.0 / l as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn degree_one_coefficients() {
        let z = sample_z();
        let l = lam(5);
        let s = 5f64.sqrt();
        let upper = delta(l, &BasisIndex::new(1, 0, 1, 1).unwrap(), &z);
        let z12 = delta(l, &BasisIndex::new(1, 0, 1, -1).unwrap(), &z);
        assert!((upper - z[(0, 0)] * s).norm() < 1e-14);
        assert!((z12 - z[(0, 1)] * s).norm() < 1e-14);
        assert_eq!(delta(l, &BasisIndex::vacuum(), &z), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn vacuum_at_origin() {
        let v = coherent_amplitudes(lam(5), &Mat2C::zeros(), Truncation::new(4)).unwrap();
        assert_eq!(v.amplitudes[0], Complex64::new(1.0, 0.0));
        assert!(v.amplitudes[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn diagonal_point_populates_matching_indices() {
        let factory = CoherentFactory::new(lam(5), Truncation::new(6));
        let v = factory.coherent(&(pauli(0) * Complex64::from(0.5))).unwrap();
        for (idx, a) in factory.basis().indices().iter().zip(&v.amplitudes) {
            if idx.two_j1() != idx.two_j2() {
                assert_eq!(a.norm(), 0.0, "{idx}");
            } else {
                assert!(a.norm() > 0.0, "{idx}");
            }
        }
    }

    #[test]
    fn outside_domain_is_rejected() {
        assert_eq!(
            coherent_amplitudes(lam(5), &Mat2C::identity(), Truncation::new(2)),
            Err(Error::OutsideDomain)
        );
    }

    #[test]
    fn kernel_examples() {
        let l = lam(5);
        let v = sample_z();
        assert_eq!(kernel_closed(l, &Mat2C::zeros(), &v).unwrap(), Complex64::new(1.0, 0.0));
        let r = 0.4;
        let d = pauli(0) * Complex64::from(r);
        let k = kernel_closed(l, &d, &d).unwrap();
        assert!((k.re - (1.0 - r * r).powi(-10)).abs() < 1e-10);
    }

    #[test]
    fn series_converges_to_closed_form() {
        let l = lam(5);
        let z = sample_z();
        let v = sample_z().adjoint() * Complex64::from(0.8);
        let closed = kernel_closed(l, &z, &v).unwrap();
        let series = kernel_series(l, &z, &v, Truncation::new(24)).unwrap();
        assert!((series - closed).norm() / closed.norm() < 1e-10);
    }

    #[test]
    fn amplitude_examples() {
        let l = lam(5);
        let v = pauli(0) * Complex64::from(0.5);
        let a = amplitude(l, &Mat2C::zeros(), &v).unwrap();
        assert!((a.norm_sqr() - 0.75f64.powi(10)).abs() < 1e-14);
        let z = sample_z();
        assert!((amplitude(l, &z, &z).unwrap() - 1.0).norm() < 1e-12);
        let i = Complex64::new(0.0, 1.0);
        let w = [i, 0.0.into(), 0.0.into(), 0.0.into()];
        assert!((amplitude_tube(l, &w, &w).unwrap() - 1.0).norm() < 1e-14);
    }
}
