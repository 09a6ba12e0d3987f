use super::{Chart, DifferentialOperator, Poly4};
use crate::coherent_states::QuantizationParam;
use crate::conformal_geometry::{from_blocks, pauli, AlgebraElement, EtaConvention, METRIC};
use crate::{Complex64, Error, Mat2C, Mat4C, Result};
use nalgebra::{DMatrix, DVector};

/// Number of generator labels.
pub const GENERATOR_COUNT: usize = 15;

/// Named basis element of the conformal algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorLabel {
    /// Translation along `σ_μ`.
    Translation(usize),
    /// Lorentz generator `m_μν`, `μ < ν`.
    Lorentz(usize, usize),
    Dilation,
    /// Special conformal transformation along `σ_ν`.
    Acceleration(usize),
}

impl GeneratorLabel {
    /// All fifteen labels: translations, Lorentz (lexicographic pairs),
    /// dilation, accelerations.
    pub fn all() -> [GeneratorLabel; GENERATOR_COUNT] {
        use GeneratorLabel::*;
        [
            Translation(0),
            Translation(1),
            Translation(2),
            Translation(3),
            Lorentz(0, 1),
            Lorentz(0, 2),
            Lorentz(0, 3),
            Lorentz(1, 2),
            Lorentz(1, 3),
            Lorentz(2, 3),
            Dilation,
            Acceleration(0),
            Acceleration(1),
            Acceleration(2),
            Acceleration(3),
        ]
    }

    /// Tube-chart matrix `X` whose `i·dU(X)` is the differential operator of
    /// this label.
    pub fn tube_matrix(self) -> Mat4C {
        let z = Mat2C::zeros();
        let half = Complex64::new(0.5, 0.0);
        match self {
            GeneratorLabel::Translation(mu) => from_blocks(&z, &pauli(mu), &z, &z),
            GeneratorLabel::Dilation => from_blocks(&pauli(0), &z, &z, &(-pauli(0))),
            GeneratorLabel::Acceleration(nu) => {
                from_blocks(&z, &z, &(pauli(nu) * Complex64::from(METRIC[nu])), &z)
            }
            GeneratorLabel::Lorentz(0, k) => {
                from_blocks(&(pauli(k) * half), &z, &z, &(-pauli(k) * half))
            }
            GeneratorLabel::Lorentz(k, l) => {
                let (axis, sign) = rotation_axis(k, l);
                let s = pauli(axis) * Complex64::new(0.0, -0.5 * sign);
                from_blocks(&s, &z, &z, &s)
            }
        }
    }

    pub fn tube_element(self) -> AlgebraElement {
        AlgebraElement::new_unchecked(self.tube_matrix(), EtaConvention::OffDiagonal)
    }

    /// The same generator in the ball chart, `K X K^{-1}`.
    pub fn ball_element(self) -> AlgebraElement {
        self.tube_element().to_convention(EtaConvention::Diagonal)
    }
}

/// Third index `m` and sign `ε_klm` for a spatial pair `k < l`.
fn rotation_axis(k: usize, l: usize) -> (usize, f64) {
    match (k, l) {
        (1, 2) => (3, 1.0),
        (1, 3) => (2, -1.0),
        (2, 3) => (1, 1.0),
        _ => panic!("invalid Lorentz pair ({k}, {l})"),
    }
}

/// Coordinates of a 4x4 matrix in the fifteen tube generators (least squares
/// through the Gram matrix); fails with `NotInSpan` if the fit is inexact.
pub fn generator_coordinates(m: &Mat4C) -> Result<[Complex64; GENERATOR_COUNT]> {
    let gens: Vec<Mat4C> = GeneratorLabel::all().iter().map(|g| g.tube_matrix()).collect();
    let gram = DMatrix::from_fn(GENERATOR_COUNT, GENERATOR_COUNT, |a, b| gens[a].dotc(&gens[b]));
    let rhs = DVector::from_fn(GENERATOR_COUNT, |a, _| gens[a].dotc(m));
    let sol = gram.lu().solve(&rhs).ok_or(Error::SingularMatrix("generator Gram matrix"))?;
    let fit = gens.iter().zip(sol.iter()).fold(Mat4C::zeros(), |acc, (g, c)| acc + g * *c);
    let residual = (fit - m).norm() / (1.0 + m.norm());
    if residual > 1e-10 {
        return Err(Error::NotInSpan(residual));
    }
    Ok(std::array::from_fn(|k| sol[k]))
}

/// A tube-chart differential operator built from its explicit formula.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeOperator {
    pub label: GeneratorLabel,
    pub op: DifferentialOperator,
}

impl TubeOperator {
    pub fn apply(&self, psi: &Poly4) -> Result<Poly4> {
        self.op.apply(psi)
    }

    pub fn apply_at(&self, w: &[Complex64; 4], value: Complex64, gradient: &[Complex64; 4]) -> Complex64 {
        self.op.apply_at(w, value, gradient)
    }
}

/// The quantized observables as operators on tube polynomials:
/// `p̂_μ = -i∂_μ`, `m̂_μν = -i(w_μ∂_ν - w_ν∂_μ)`, `d̂ = -2iw^μ∂_μ - 2iλ`,
/// `â_ν = -i(w²δ^β_ν - 2w_νw^β)∂_β + 2iλw_ν`.
pub fn tube_diff_ops(label: GeneratorLabel, lambda: QuantizationParam) -> TubeOperator {
    let i = Complex64::new(0.0, 1.0);
    let zero = || Poly4::zero(Chart::Tube);
    let w = |mu: usize| Poly4::variable(Chart::Tube, mu);
    let w_low = |mu: usize| w(mu).scale(METRIC[mu].into());
    let lam = lambda.as_f64();

    let op = match label {
        GeneratorLabel::Translation(mu) => {
            let mut vector: [Poly4; 4] = std::array::from_fn(|_| zero());
            vector[mu] = Poly4::constant(Chart::Tube, -i);
            DifferentialOperator { scalar: zero(), vector }
        }
        GeneratorLabel::Lorentz(mu, nu) => {
            let mut vector: [Poly4; 4] = std::array::from_fn(|_| zero());
            vector[nu] = w_low(mu).scale(-i);
            vector[mu] = w_low(nu).scale(i);
            DifferentialOperator { scalar: zero(), vector }
        }
        GeneratorLabel::Dilation => DifferentialOperator {
            scalar: Poly4::constant(Chart::Tube, -i * 2.0 * lam),
            vector: std::array::from_fn(|mu| w(mu).scale(-i * 2.0)),
        },
        GeneratorLabel::Acceleration(nu) => {
            let w2 = (0..4).fold(zero(), |acc, mu| &acc + &(&w(mu) * &w_low(mu)));
            let vector = std::array::from_fn(|beta| {
                let mut coeff = (&w_low(nu) * &w(beta)).scale((-2.0).into());
                if beta == nu {
                    coeff = &coeff + &w2;
                }
                coeff.scale(-i)
            });
            DifferentialOperator {
                scalar: w_low(nu).scale(i * 2.0 * lam),
                vector,
            }
        }
    };
    TubeOperator { label, op }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::du_tube;

    fn lam(l: i64) -> QuantizationParam {
        QuantizationParam::new(l).unwrap()
    }

    fn test_poly() -> Poly4 {
        let w = |mu| Poly4::variable(Chart::Tube, mu);
        let c = |re: f64| Complex64::new(re, 0.0);
        &(&(&(&w(0) * &w(0)) * &w(1)) + &(&w(2) * &w(3)).scale(c(3.0)))
            + &(&(&w(0) * &(&w(3) * &w(3))) - &w(1))
    }

    #[test]
    fn generators_lie_in_algebra() {
        for label in GeneratorLabel::all() {
            assert!(label.tube_element().defect() < 1e-14, "{label:?}");
            assert!(label.ball_element().defect() < 1e-12, "{label:?}");
        }
    }

    #[test]
    fn documented_values() {
        let l = lam(5);
        let one = Poly4::constant(Chart::Tube, 1.0.into());
        let d = tube_diff_ops(GeneratorLabel::Dilation, l).apply(&one).unwrap();
        assert_eq!(d, Poly4::constant(Chart::Tube, Complex64::new(0.0, -10.0)));
        let p0 = tube_diff_ops(GeneratorLabel::Translation(0), l)
            .apply(&Poly4::variable(Chart::Tube, 0))
            .unwrap();
        assert_eq!(p0, Poly4::constant(Chart::Tube, Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn explicit_operators_equal_i_du() {
        let l = lam(5);
        let psi = test_poly();
        let i = Complex64::new(0.0, 1.0);
        for label in GeneratorLabel::all() {
            let explicit = tube_diff_ops(label, l).apply(&psi).unwrap();
            let via_du = du_tube(l, &label.tube_element()).unwrap().apply(&psi).unwrap().scale(i);
            assert!((&explicit - &via_du).max_abs() < 1e-12, "{label:?}");
        }
    }

    #[test]
    fn coordinates_round_trip() {
        for (k, label) in GeneratorLabel::all().iter().enumerate() {
            let c = generator_coordinates(&label.tube_matrix()).unwrap();
            for (n, v) in c.iter().enumerate() {
                let expected = if n == k { 1.0 } else { 0.0 };
                assert!((v - expected).norm() < 1e-12);
            }
        }
        assert!(generator_coordinates(&Mat4C::identity()).is_err());
    }
}
