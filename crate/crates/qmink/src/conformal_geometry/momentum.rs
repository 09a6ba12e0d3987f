use super::{from_blocks, inverse2, EtaConvention};
use crate::{Complex64, Mat2C, Mat4C, Result};
use nalgebra::{Matrix2x4, Matrix4x2};

/// How `J_λ` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumMethod {
    /// Closed block formula in the matrix coordinate `W`.
    Block,
    /// `iλ(π_w - π_{w⊥})` from η-orthogonal projectors on the plane `{(Wζ, ζ)}`.
    Projector,
}

/// Holomorphic-model momentum map `J_λ(W)` (tube chart).
pub fn momentum_j_lambda(w: &Mat2C, lambda: f64, method: MomentumMethod) -> Result<Mat4C> {
    let il = Complex64::new(0.0, lambda);
    match method {
        MomentumMethod::Block => {
            let wd = w.adjoint();
            let q = inverse2(&(w - wd), "momentum_j_lambda")?;
            let e = Mat2C::identity();
            let two = Complex64::new(2.0, 0.0);
            Ok(from_blocks(
                &((w + wd) * q),
                &(-(w * q * wd) * two),
                &(q * two),
                &(-e - q * wd * two),
            ) * il)
        }
        MomentumMethod::Projector => {
            let eta = EtaConvention::OffDiagonal.eta();
            let mut frame = Matrix4x2::<Complex64>::zeros();
            frame.fixed_view_mut::<2, 2>(0, 0).copy_from(w);
            frame.fixed_view_mut::<2, 2>(2, 0).copy_from(&Mat2C::identity());
            let frame_adj: Matrix2x4<Complex64> = frame.adjoint();
            let gram = frame_adj * eta * frame;
            let gram_inv = inverse2(&gram, "momentum_j_lambda (degenerate plane)")?;
            let proj = frame * gram_inv * frame_adj * eta;
            Ok((proj * Complex64::new(2.0, 0.0) - Mat4C::identity()) * il)
        }
    }
}

/// Nilpotent-model momentum map `J_0(X, S) = [[XS, -XSX], [S, -SX]]`.
pub fn momentum_j0(x: &Mat2C, s: &Mat2C) -> Mat4C {
    from_blocks(&(x * s), &(-(x * s * x)), s, &(-(s * x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal_geometry::{from_real_components, pauli};
    use crate::Error;

    fn sample_w() -> Mat2C {
        from_real_components(&[0.3, -0.2, 0.5, 0.1])
            + from_real_components(&[1.4, 0.2, -0.3, 0.4]) * Complex64::new(0.0, 1.0)
    }

    #[test]
    fn center_of_tube() {
        let lambda = 3.0;
        let j = momentum_j_lambda(&(Mat2C::identity() * Complex64::new(0.0, 1.0)), lambda, MomentumMethod::Block)
            .unwrap();
        let expected = from_blocks(
            &Mat2C::zeros(),
            &(pauli(0) * Complex64::from(-lambda)),
            &(pauli(0) * Complex64::from(lambda)),
            &Mat2C::zeros(),
        );
        assert!((j - expected).norm() < 1e-14);
    }

    #[test]
    fn block_and_projector_agree() {
        let w = sample_w();
        let a = momentum_j_lambda(&w, 2.5, MomentumMethod::Block).unwrap();
        let b = momentum_j_lambda(&w, 2.5, MomentumMethod::Projector).unwrap();
        assert!((a - b).norm() < 1e-12, "{}", (a - b).norm());
    }

    #[test]
    fn square_is_minus_lambda_squared() {
        let j = momentum_j_lambda(&sample_w(), 1.7, MomentumMethod::Block).unwrap();
        assert!((j * j + Mat4C::identity() * Complex64::from(1.7 * 1.7)).norm() < 1e-12);
        assert!(j.trace().norm() < 1e-12);
    }

    #[test]
    fn j0_is_nilpotent() {
        let x = from_real_components(&[0.1, 0.4, -0.7, 0.2]);
        let s = from_real_components(&[1.0, 0.3, 0.2, -0.1]);
        let j = momentum_j0(&x, &s);
        assert!((j * j).norm() < 1e-14);
    }

    #[test]
    fn hermitian_w_is_singular() {
        let w = from_real_components(&[0.1, 0.4, -0.7, 0.2]);
        assert!(matches!(
            momentum_j_lambda(&w, 1.0, MomentumMethod::Block),
            Err(Error::SingularMatrix(_))
        ));
    }
}
