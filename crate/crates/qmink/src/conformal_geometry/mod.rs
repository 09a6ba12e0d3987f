//! Classical side: tube and ball charts, the conformal group and its algebra,
//! momentum maps, observables and the Poisson bracket.
//!
//! Conventions used throughout:
//! - Pauli basis `σ0 = E`, `σ1 = [[0,1],[1,0]]`, `σ2 = [[0,i],[-i,0]]`,
//!   `σ3 = diag(1,-1)`; four-vector components of a 2x2 matrix are
//!   `w^μ = ½ Tr(W σ_μ)`.
//! - Metric `η = diag(+,-,-,-)`.
//! - Tube chart: twistor form `i[[0,E],[-E,0]]`; ball chart: `diag(E,-E)`.

mod group;
mod momentum;
mod observables;
mod poisson;

pub use group::{
    cayley_intertwiner, exp_algebra, mobius, mobius_matrix, AlgebraElement, EtaConvention,
    GroupElement,
};
pub use momentum::{momentum_j0, momentum_j_lambda, MomentumMethod};
pub use observables::{
    accel_transform, decompose_su22, dual_basis, observables_nilpotent, observables_tube,
    AccelModel, ObservableSet,
};
pub use poisson::{
    momentum_component, numeric_partials, poisson_bracket, poisson_matrix, Partials,
    FD_STEP,
};

use crate::{Complex64, Error, Mat2C, Mat4C, Result};
use nalgebra::Matrix2;

/// Eigenvalue magnitudes below this count as zero for signatures and cones.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Diagonal of the Minkowski metric.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pauli matrix `σ_μ`, `μ = 0..4`.
pub fn pauli(mu: usize) -> Mat2C {
    match mu {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, I, -I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {mu} out of range"),
    }
}

/// Components `w^μ = ½ Tr(W σ_μ)`.
pub fn components(w: &Mat2C) -> [Complex64; 4] {
    std::array::from_fn(|mu| (w * pauli(mu)).trace() * 0.5)
}

/// Inverse of [`components`]: `W = w^μ σ_μ`.
pub fn from_components(w: &[Complex64; 4]) -> Mat2C {
    (0..4).fold(Mat2C::zeros(), |acc, mu| acc + pauli(mu) * w[mu])
}

/// Hermitian matrix `x^μ σ_μ` from real components.
pub fn from_real_components(x: &[f64; 4]) -> Mat2C {
    from_components(&x.map(|v| Complex64::new(v, 0.0)))
}

/// Lowers (or raises) an index with the metric.
pub fn lower(v: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|mu| METRIC[mu] * v[mu])
}

/// Minkowski square `η_{μν} v^μ v^ν` for complex components.
pub fn minkowski_square(v: &[Complex64; 4]) -> Complex64 {
    (0..4).map(|mu| v[mu] * v[mu] * METRIC[mu]).sum()
}

/// Real and imaginary parts of `W` in the Hermitian sense: `X = (W+W†)/2`,
/// `Y = (W-W†)/2i`.
pub fn hermitian_parts(w: &Mat2C) -> (Mat2C, Mat2C) {
    let wd = w.adjoint();
    ((w + wd) * Complex64::from(0.5), (w - wd) * Complex64::new(0.0, -0.5))
}

/// Eigenvalues (ascending) of a Hermitian 2x2 matrix in closed form.
pub fn hermitian_eigenvalues(m: &Mat2C) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - rad, mean + rad]
}

/// Largest singular value of a 2x2 matrix.
pub fn operator_norm(z: &Mat2C) -> f64 {
    hermitian_eigenvalues(&(z.adjoint() * z))[1].max(0.0).sqrt()
}

/// Splits a 4x4 matrix into its 2x2 blocks `(A, B, C, D)`.
pub fn blocks(m: &Mat4C) -> (Mat2C, Mat2C, Mat2C, Mat2C) {
    (
        m.fixed_view::<2, 2>(0, 0).into_owned(),
        m.fixed_view::<2, 2>(0, 2).into_owned(),
        m.fixed_view::<2, 2>(2, 0).into_owned(),
        m.fixed_view::<2, 2>(2, 2).into_owned(),
    )
}

/// Assembles `[[A, B], [C, D]]`.
pub fn from_blocks(a: &Mat2C, b: &Mat2C, c: &Mat2C, d: &Mat2C) -> Mat4C {
    let mut m = Mat4C::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

pub(crate) fn inverse2(m: &Mat2C, context: &'static str) -> Result<Mat2C> {
    let det = m.determinant();
    let scale = m.iter().map(|v| v.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);
    if det.norm() <= 1e-14 * scale {
        return Err(Error::SingularMatrix(context));
    }
    Ok(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

/// True iff `Im W = (W - W†)/2i` is positive definite.
pub fn in_tube(w: &Mat2C) -> bool {
    hermitian_eigenvalues(&hermitian_parts(w).1)[0] > DEGENERACY_TOL
}

/// True iff `E - Z†Z` is positive definite.
pub fn in_domain(z: &Mat2C) -> bool {
    let gap = Mat2C::identity() - z.adjoint() * z;
    hermitian_eigenvalues(&gap)[0] > DEGENERACY_TOL
}

/// Cayley transform `Z = (W - iE)(W + iE)^{-1}` from the tube to the ball.
pub fn cayley(w: &Mat2C) -> Result<Mat2C> {
    let e = Mat2C::identity();
    Ok((w - e * I) * inverse2(&(w + e * I), "cayley")?)
}

/// Inverse Cayley transform `W = i(E + Z)(E - Z)^{-1}`.
pub fn cayley_inv(z: &Mat2C) -> Result<Mat2C> {
    let e = Mat2C::identity();
    Ok((e + z) * inverse2(&(e - z), "cayley_inv")? * I)
}

/// Signature of a Hermitian form restricted to a 2-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    /// True when some eigenvalue is numerically zero (cone or isotropic plane).
    pub fn is_degenerate(&self) -> bool {
        self.zero > 0
    }

    /// The `(k, l)` pair of positive and negative counts.
    pub fn pair(&self) -> (usize, usize) {
        (self.positive, self.negative)
    }
}

/// Signature of the tube-chart twistor form on the plane `{(Wζ, ζ)}`.
///
/// The Gram matrix in the column basis is `i(W† - W) = 2 Im W`.
pub fn plane_signature(w: &Mat2C) -> Signature {
    let gram = (w.adjoint() - w) * I;
    let mut sig = Signature {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for ev in hermitian_eigenvalues(&gram) {
        if ev.abs() < DEGENERACY_TOL {
            sig.zero += 1;
        } else if ev > 0.0 {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
    }
    sig
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_products_follow_the_sign_convention() {
        // σ1σ2 = -iσ3 with σ2 = [[0,i],[-i,0]]
        let lhs = pauli(1) * pauli(2);
        assert!((lhs - pauli(3) * c(0.0, -1.0)).norm() < 1e-15);
        for mu in 0..4 {
            assert!((pauli(mu) * pauli(mu) - Mat2C::identity()).norm() < 1e-15);
        }
    }

    #[test]
    fn components_roundtrip() {
        let w = Mat2C::new(c(1.0, 2.0), c(-0.5, 0.3), c(0.7, -1.1), c(0.2, 0.9));
        assert!((from_components(&components(&w)) - w).norm() < 1e-14);
    }

    #[test]
    fn cayley_maps_center_to_origin_and_back() {
        let w = Mat2C::identity() * I;
        assert!(cayley(&w).unwrap().norm() < 1e-15);
        assert!((cayley_inv(&Mat2C::zeros()).unwrap() - w).norm() < 1e-15);
    }

    #[test]
    fn cayley_singular_at_minus_i() {
        let w = Mat2C::identity() * (-I);
        assert_eq!(cayley(&w), Err(Error::SingularMatrix("cayley")));
        assert!(cayley_inv(&Mat2C::identity()).is_err());
    }

    #[test]
    fn unitary_is_on_boundary() {
        let u = pauli(1);
        assert!(!in_domain(&u));
        assert!(in_domain(&(u * Complex64::from(0.5))));
    }

    #[test]
    fn hermitian_w_is_not_in_tube() {
        let w = from_real_components(&[0.3, -1.0, 0.2, 0.5]);
        assert!(!in_tube(&w));
        assert!(plane_signature(&w).is_degenerate());
        assert_eq!(plane_signature(&w).pair(), (0, 0));
    }

    #[test]
    fn signature_examples() {
        assert_eq!(plane_signature(&(Mat2C::identity() * I)).pair(), (2, 0));
        assert_eq!(plane_signature(&(Mat2C::identity() * -I)).pair(), (0, 2));
    }

    #[test]
    fn eigenvalues_of_hermitian_2x2() {
        let m = Mat2C::new(c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0));
        let [lo, hi] = hermitian_eigenvalues(&m);
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
    }
}
