use super::{blocks, from_blocks, inverse2, I, ONE};
use crate::{Complex64, Error, Mat2C, Mat4C, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Which twistor form the group preserves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum EtaConvention {
    /// `i[[0, E], [-E, 0]]`, acting on the tube.
    OffDiagonal,
    /// `diag(E, -E)`, acting on the ball.
    Diagonal,
}

impl EtaConvention {
    /// The 4x4 twistor form.
    pub fn eta(self) -> Mat4C {
        let e = Mat2C::identity();
        let z = Mat2C::zeros();
        match self {
            EtaConvention::OffDiagonal => from_blocks(&z, &(e * I), &(e * -I), &z),
            EtaConvention::Diagonal => from_blocks(&e, &z, &z, &(-e)),
        }
    }

    fn name(self) -> &'static str {
        match self {
            EtaConvention::OffDiagonal => "off-diagonal eta",
            EtaConvention::Diagonal => "diagonal eta",
        }
    }
}

/// Cayley intertwiner `K = s[[E, -iE], [E, iE]]` with `s = (-4)^{-1/4}` so that
/// `det K = 1`. Conjugation `g ↦ K g K^{-1}` carries the tube group onto the
/// ball group and `mobius(K, W) = cayley(W)`.
pub fn cayley_intertwiner() -> Mat4C {
    let e = Mat2C::identity();
    let scale = Complex64::from_polar(0.5f64.sqrt(), -std::f64::consts::FRAC_PI_4);
    from_blocks(&e, &(e * -I), &e, &(e * I)) * scale
}

fn cayley_intertwiner_inverse() -> Mat4C {
    // K^{-1} = s^{-1} ½[[E, E], [iE, -iE]]
    let e = Mat2C::identity();
    let scale = Complex64::from_polar(0.5f64.sqrt(), std::f64::consts::FRAC_PI_4);
    from_blocks(&e, &e, &(e * I), &(e * -I)) * scale
}

fn relative_defect(defect: f64, m: &Mat4C) -> f64 {
    defect / (1.0 + m.norm_squared())
}

/// Element of SU(2,2) in a fixed chart convention.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: Mat4C,
    convention: EtaConvention,
}

impl GroupElement {
    /// Validates `g†ηg = η` and `det g = 1` to `1e-10` (relative to `‖g‖²`).
    pub fn new(matrix: Mat4C, convention: EtaConvention) -> Result<Self> {
        let g = Self { matrix, convention };
        let defect = g.defect();
        if defect > 1e-10 {
            return Err(Error::NotInGroup(defect));
        }
        Ok(g)
    }

    pub(crate) fn new_unchecked(matrix: Mat4C, convention: EtaConvention) -> Self {
        Self { matrix, convention }
    }

    /// The identity in the given convention.
    pub fn identity(convention: EtaConvention) -> Self {
        Self::new_unchecked(Mat4C::identity(), convention)
    }

    /// Largest of the relative η-unitarity defect and `|det g - 1|`.
    pub fn defect(&self) -> f64 {
        let eta = self.convention.eta();
        let unit = relative_defect(
            (self.matrix.adjoint() * eta * self.matrix - eta).norm(),
            &self.matrix,
        );
        unit.max((self.matrix.determinant() - ONE).norm())
    }

    pub fn matrix(&self) -> &Mat4C {
        &self.matrix
    }

    pub fn convention(&self) -> EtaConvention {
        self.convention
    }

    /// Blocks `(A, B, C, D)` of this matrix.
    pub fn blocks(&self) -> (Mat2C, Mat2C, Mat2C, Mat2C) {
        blocks(&self.matrix)
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.convention != other.convention {
            return Err(Error::ConventionMismatch("matching chart"));
        }
        Ok(Self::new_unchecked(self.matrix * other.matrix, self.convention))
    }

    /// Inverse via `g^{-1} = η^{-1} g† η`.
    pub fn inverse(&self) -> GroupElement {
        let eta = self.convention.eta();
        let eta_inv = eta.try_inverse().expect("twistor form is invertible");
        Self::new_unchecked(eta_inv * self.matrix.adjoint() * eta, self.convention)
    }

    /// Moves a tube-chart element to the ball chart (`K g K^{-1}`) or back.
    pub fn to_convention(&self, target: EtaConvention) -> GroupElement {
        let k = cayley_intertwiner();
        let k_inv = cayley_intertwiner_inverse();
        let matrix = match (self.convention, target) {
            (a, b) if a == b => self.matrix,
            (EtaConvention::OffDiagonal, EtaConvention::Diagonal) => k * self.matrix * k_inv,
            _ => k_inv * self.matrix * k,
        };
        Self::new_unchecked(matrix, target)
    }
}

/// Element of su(2,2) in a fixed chart convention.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    matrix: Mat4C,
    convention: EtaConvention,
}

impl AlgebraElement {
    /// Validates `X†η + ηX = 0` and `Tr X = 0` to `1e-12` (relative to `‖X‖`).
    pub fn new(matrix: Mat4C, convention: EtaConvention) -> Result<Self> {
        let x = Self { matrix, convention };
        if x.defect() > 1e-12 {
            return Err(Error::ConventionMismatch(convention.name()));
        }
        Ok(x)
    }

    pub(crate) fn new_unchecked(matrix: Mat4C, convention: EtaConvention) -> Self {
        Self { matrix, convention }
    }

    /// Orthogonal projection of an arbitrary matrix onto su(2,2):
    /// `(M - η^{-1}M†η)/2` with the trace removed.
    pub fn project(matrix: &Mat4C, convention: EtaConvention) -> Self {
        let eta = convention.eta();
        let eta_inv = eta.try_inverse().expect("twistor form is invertible");
        let anti = (matrix - eta_inv * matrix.adjoint() * eta) * Complex64::new(0.5, 0.0);
        let tr = anti.trace() * 0.25;
        Self::new_unchecked(anti - Mat4C::identity() * tr, convention)
    }

    /// Random element with Gaussian entries of the given scale, projected
    /// onto the algebra.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, convention: EtaConvention, scale: f64) -> Self {
        let m = Mat4C::from_fn(|_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * scale, im * scale)
        });
        Self::project(&m, convention)
    }

    /// Relative size of the algebra-condition violations.
    pub fn defect(&self) -> f64 {
        let eta = self.convention.eta();
        let skew = (self.matrix.adjoint() * eta + eta * self.matrix).norm();
        (skew + self.matrix.trace().norm()) / (1.0 + self.matrix.norm())
    }

    pub fn matrix(&self) -> &Mat4C {
        &self.matrix
    }

    pub fn convention(&self) -> EtaConvention {
        self.convention
    }

    /// Blocks `(α, β, γ, δ)`.
    pub fn blocks(&self) -> (Mat2C, Mat2C, Mat2C, Mat2C) {
        blocks(&self.matrix)
    }

    /// Matrix commutator `[self, other]`.
    pub fn bracket(&self, other: &AlgebraElement) -> AlgebraElement {
        Self::new_unchecked(
            self.matrix * other.matrix - other.matrix * self.matrix,
            self.convention,
        )
    }

    /// Real linear combination.
    pub fn scaled_add(&self, s: f64, other: &AlgebraElement) -> AlgebraElement {
        Self::new_unchecked(
            self.matrix + other.matrix * Complex64::new(s, 0.0),
            self.convention,
        )
    }

    /// Same element expressed in the other chart (`K X K^{-1}`).
    pub fn to_convention(&self, target: EtaConvention) -> AlgebraElement {
        let k = cayley_intertwiner();
        let k_inv = cayley_intertwiner_inverse();
        let matrix = match (self.convention, target) {
            (a, b) if a == b => self.matrix,
            (EtaConvention::OffDiagonal, EtaConvention::Diagonal) => k * self.matrix * k_inv,
            _ => k_inv * self.matrix * k,
        };
        Self::new_unchecked(matrix, target)
    }
}

/// One-parameter subgroup `exp(tX)`.
pub fn exp_algebra(x: &AlgebraElement, t: f64) -> GroupElement {
    let scaled = x.matrix * Complex64::new(t, 0.0);
    GroupElement::new_unchecked(scaled.exp(), x.convention)
}

/// Fractional-linear action `(AZ + B)(CZ + D)^{-1}` with the blocks of `m`.
pub fn mobius_matrix(m: &Mat4C, z: &Mat2C) -> Result<Mat2C> {
    let (a, b, c, d) = blocks(m);
    Ok((a * z + b) * inverse2(&(c * z + d), "mobius")?)
}

/// Left action `σ_g(Z) = (AZ + B)(CZ + D)^{-1}` with `g = [[A, B], [C, D]]`;
/// satisfies `σ_{gh} = σ_g ∘ σ_h`.
pub fn mobius(g: &GroupElement, z: &Mat2C) -> Result<Mat2C> {
    mobius_matrix(&g.matrix, z)
}

#[cfg(test)]
mod tests {
    use super::super::{cayley, pauli};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn intertwiner_has_unit_determinant_and_maps_forms() {
        let k = cayley_intertwiner();
        assert!((k.determinant() - ONE).norm() < 1e-14);
        assert!((k * cayley_intertwiner_inverse() - Mat4C::identity()).norm() < 1e-14);
        let lhs = k.adjoint() * EtaConvention::Diagonal.eta() * k;
        let rhs = EtaConvention::OffDiagonal.eta() * Complex64::new(-1.0, 0.0);
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn intertwiner_acts_as_cayley() {
        let w = Mat2C::new(
            Complex64::new(0.3, 1.2),
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.4, 0.2),
            Complex64::new(0.5, 0.9),
        );
        let z = mobius_matrix(&cayley_intertwiner(), &w).unwrap();
        assert!((z - cayley(&w).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn translation_exponential_terminates() {
        let x = AlgebraElement::new(
            super::super::from_blocks(&Mat2C::zeros(), &pauli(0), &Mat2C::zeros(), &Mat2C::zeros()),
            EtaConvention::OffDiagonal,
        )
        .unwrap();
        let g = exp_algebra(&x, 1.0);
        let (a, b, c, d) = g.blocks();
        assert!((a - Mat2C::identity()).norm() < 1e-15);
        assert!((b - pauli(0)).norm() < 1e-15);
        assert!(c.norm() < 1e-15);
        assert!((d - Mat2C::identity()).norm() < 1e-15);
    }

    #[test]
    fn random_elements_exponentiate_into_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for conv in [EtaConvention::OffDiagonal, EtaConvention::Diagonal] {
            for _ in 0..20 {
                let x = AlgebraElement::random(&mut rng, conv, 0.5);
                assert!(x.defect() < 1e-14);
                let g = exp_algebra(&x, 0.3);
                assert!(g.defect() < 1e-10, "defect {}", g.defect());
                assert!(GroupElement::new(*g.matrix(), conv).is_ok());
            }
        }
    }

    #[test]
    fn inverse_is_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = exp_algebra(&AlgebraElement::random(&mut rng, EtaConvention::Diagonal, 0.6), 1.0);
        let prod = g.compose(&g.inverse()).unwrap();
        assert!((prod.matrix() - Mat4C::identity()).norm() < 1e-12);
    }

    #[test]
    fn algebra_check_rejects_wrong_convention() {
        let x = super::super::from_blocks(
            &Mat2C::zeros(),
            &pauli(0),
            &Mat2C::zeros(),
            &Mat2C::zeros(),
        );
        assert!(AlgebraElement::new(x, EtaConvention::OffDiagonal).is_ok());
        assert!(AlgebraElement::new(x, EtaConvention::Diagonal).is_err());
    }
}
