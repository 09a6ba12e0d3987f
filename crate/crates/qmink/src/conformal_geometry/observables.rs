use super::{components, from_blocks, hermitian_parts, inverse2, lower, pauli, METRIC};
use crate::{Complex64, Error, Mat2C, Mat4C, Result};
use serde::Serialize;

/// The fifteen conformal charges. All tensors carry lower indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSet {
    /// Four-momentum `p_μ`.
    pub p: [f64; 4],
    /// Relativistic angular momentum `m_μν`, antisymmetric.
    pub m: [[f64; 4]; 4],
    /// Dilation charge `d`.
    pub d: f64,
    /// Four-acceleration charge `a_μ`.
    pub a: [f64; 4],
}

impl ObservableSet {
    /// `p^μ`.
    pub fn p_upper(&self) -> [f64; 4] {
        lower(&self.p)
    }

    /// `a^μ`.
    pub fn a_upper(&self) -> [f64; 4] {
        lower(&self.a)
    }

    /// Minkowski square `p_μ p^μ`.
    pub fn p_squared(&self) -> f64 {
        (0..4).map(|mu| METRIC[mu] * self.p[mu] * self.p[mu]).sum()
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &ObservableSet) -> f64 {
        let mut diff = (self.d - other.d).abs();
        for mu in 0..4 {
            diff = diff.max((self.p[mu] - other.p[mu]).abs());
            diff = diff.max((self.a[mu] - other.a[mu]).abs());
            for nu in 0..4 {
                diff = diff.max((self.m[mu][nu] - other.m[mu][nu]).abs());
            }
        }
        diff
    }

    /// Reassembles `p_μ𝒫*_μ + m_μν ℒ*_μν + a^ν𝒜*_ν + d𝒟*` (double sum over
    /// ordered pairs in the angular-momentum term).
    pub fn to_matrix(&self) -> Mat4C {
        let coeffs = self.dual_coefficients();
        dual_basis()
            .iter()
            .zip(coeffs.iter())
            .fold(Mat4C::zeros(), |acc, ((_, b), c)| acc + b * *c)
    }

    fn dual_coefficients(&self) -> [Complex64; 15] {
        let a_up = self.a_upper();
        let mut c = [Complex64::new(0.0, 0.0); 15];
        for mu in 0..4 {
            c[mu] = self.p[mu].into();
            c[4 + mu] = a_up[mu].into();
        }
        c[8] = (2.0 * self.d).into();
        for k in 1..4 {
            c[8 + k] = (2.0 * self.m[0][k]).into();
        }
        for (slot, (k, l)) in ROTATION_PAIRS.iter().enumerate() {
            c[12 + slot] = Complex64::new(0.0, 2.0 * self.m[*k][*l]);
        }
        c
    }
}

/// `(k, l)` of the rotation duals, ordered so that `ε_klm = +1` with
/// `m = 3, 1, 2`.
const ROTATION_PAIRS: [(usize, usize); 3] = [(1, 2), (2, 3), (3, 1)];
const ROTATION_AXIS: [usize; 3] = [3, 1, 2];

/// Label of a dual-basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualLabel {
    Momentum(usize),
    Acceleration(usize),
    Dilation,
    Boost(usize),
    Rotation(usize, usize),
}

/// The fifteen dual-basis matrices in the order `𝒫*_0..3, 𝒜*_0..3, 𝒟*,
/// ℒ*_01..03, ℒ*_12, ℒ*_23, ℒ*_31`.
pub fn dual_basis() -> Vec<(DualLabel, Mat4C)> {
    let z = Mat2C::zeros();
    let half = Complex64::new(0.5, 0.0);
    let mut out = Vec::with_capacity(15);
    for mu in 0..4 {
        out.push((DualLabel::Momentum(mu), from_blocks(&z, &z, &pauli(mu), &z)));
    }
    for mu in 0..4 {
        out.push((DualLabel::Acceleration(mu), from_blocks(&z, &pauli(mu), &z, &z)));
    }
    out.push((
        DualLabel::Dilation,
        from_blocks(&pauli(0), &z, &z, &(-pauli(0))) * half,
    ));
    for k in 1..4 {
        out.push((DualLabel::Boost(k), from_blocks(&pauli(k), &z, &z, &(-pauli(k))) * half));
    }
    for ((k, l), m) in ROTATION_PAIRS.iter().zip(ROTATION_AXIS) {
        out.push((
            DualLabel::Rotation(*k, *l),
            from_blocks(&pauli(m), &z, &z, &pauli(m)) * half,
        ));
    }
    out
}

/// Decomposes a momentum-map value in the dual basis.
///
/// The dual basis is orthogonal for the Frobenius inner product, so each
/// coefficient is a single projection; a residual check rejects inputs
/// outside the span.
pub fn decompose_su22(j: &Mat4C) -> Result<ObservableSet> {
    let coef: Vec<Complex64> = dual_basis()
        .iter()
        .map(|(_, b)| b.dotc(j) / b.norm_squared())
        .collect();

    let mut obs = ObservableSet {
        p: [0.0; 4],
        m: [[0.0; 4]; 4],
        d: 0.5 * coef[8].re,
        a: [0.0; 4],
    };
    let mut a_up = [0.0; 4];
    for mu in 0..4 {
        obs.p[mu] = coef[mu].re;
        a_up[mu] = coef[4 + mu].re;
    }
    obs.a = lower(&a_up);
    for k in 1..4 {
        obs.m[0][k] = 0.5 * coef[8 + k].re;
        obs.m[k][0] = -obs.m[0][k];
    }
    for (slot, (k, l)) in ROTATION_PAIRS.iter().enumerate() {
        let v = (coef[12 + slot] / Complex64::new(0.0, 2.0)).re;
        obs.m[*k][*l] = v;
        obs.m[*l][*k] = -v;
    }

    let residual = (obs.to_matrix() - j).norm() / (1.0 + j.norm());
    if residual > 1e-9 {
        return Err(Error::NotInSpan(residual));
    }
    Ok(obs)
}

fn charges(x_up: &[f64; 4], p: &[f64; 4], accel_shift: f64) -> ObservableSet {
    let x = lower(x_up);
    let d: f64 = (0..4).map(|mu| x_up[mu] * p[mu]).sum();
    let x2: f64 = (0..4).map(|mu| x_up[mu] * x[mu]).sum();
    let mut m = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            m[mu][nu] = x[mu] * p[nu] - x[nu] * p[mu];
        }
    }
    let a = std::array::from_fn(|mu| -2.0 * d * x[mu] + x2 * p[mu] - accel_shift * p[mu]);
    ObservableSet { p: *p, m, d, a }
}

fn real_components(m: &Mat2C) -> [f64; 4] {
    components(m).map(|c| c.re)
}

/// Charges of the nilpotent model at `X = x^μσ_μ`, `S = p_μσ_μ`.
pub fn observables_nilpotent(x: &Mat2C, s: &Mat2C) -> ObservableSet {
    charges(&real_components(x), &real_components(s), 0.0)
}

/// Charges of the holomorphic model at `W ∈ 𝕋` with `p^ν = λ y^ν / y²`.
pub fn observables_tube(w: &Mat2C, lambda: f64) -> Result<ObservableSet> {
    let (x, y) = hermitian_parts(w);
    let y_up = real_components(&y);
    let y2: f64 = (0..4).map(|mu| METRIC[mu] * y_up[mu] * y_up[mu]).sum();
    if y2.abs() < super::DEGENERACY_TOL {
        return Err(Error::OnLightCone(y2));
    }
    let p_up = y_up.map(|v| lambda * v / y2);
    let p = lower(&p_up);
    let p2 = lambda * lambda / y2;
    Ok(charges(&real_components(&x), &p, lambda * lambda / p2))
}

/// Which phase-space model an acceleration acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccelModel {
    Standard,
    Holomorphic,
}

/// Four-acceleration by `C` acting on canonical coordinates `(X, P)` with
/// `P = p_μσ_μ`.
///
/// The holomorphic point is `W = X + iλP^{-1}`, moved by `[[E,0],[C,E]]`.
pub fn accel_transform(
    c: &Mat2C,
    x: &Mat2C,
    p: &Mat2C,
    model: AccelModel,
    lambda: f64,
) -> Result<(Mat2C, Mat2C)> {
    let e = Mat2C::identity();
    let left = c * x + e;
    let right = x * c + e;
    match model {
        AccelModel::Standard => Ok((x * inverse2(&left, "accel_transform")?, left * p * right)),
        AccelModel::Holomorphic => {
            let il = Complex64::new(0.0, lambda);
            let p_inv = inverse2(p, "accel_transform (momentum)")?;
            let q = c * x * p + c * il + p;
            let r = x * c - p_inv * c * il + e;
            let x_new = (x * p + e * il - inverse2(&r, "accel_transform")? * il)
                * inverse2(&q, "accel_transform")?;
            let p_new = left * p * right + c * p_inv * c * Complex64::from(lambda * lambda);
            Ok((x_new, p_new))
        }
    }
}
