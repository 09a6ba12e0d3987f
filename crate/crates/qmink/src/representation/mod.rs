//! The holomorphic discrete series: the group action on polynomials, its
//! infinitesimal generators by exact polynomial calculus, their matrices in
//! the orthonormal basis, and the tube-chart differential operators.
//!
//! The action of `g` is `ψ ↦ det(CZ+D)^{-λ} ψ((AZ+B)(CZ+D)^{-1})` with
//! `(A, B, C, D)` the blocks of `g^{-1}`. Differentiating at the identity
//! along `X = [[α, β], [γ, δ]]` gives
//! `dU(X)ψ = λ Tr(γZ+δ) ψ - Dψ[β + αZ - Zδ - ZγZ]`.

mod generators;
mod poly;

pub use generators::{
    generator_coordinates, tube_diff_ops, GeneratorLabel, TubeOperator, GENERATOR_COUNT,
};
pub use poly::{monomials_of_degree, Chart, Poly4};

use crate::coherent_states::{delta_monomials, kernel_closed, QuantizationParam};
use crate::conformal_geometry::{
    from_components, mobius, mobius_matrix, pauli, AlgebraElement, EtaConvention, GroupElement,
};
use crate::fock_basis::{Basis, BasisIndex, Truncation};
use crate::{Complex64, Error, Mat2C, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::collections::HashMap;

/// Residual above which a change of basis is reported as ill-conditioned.
pub const BASIS_SOLVE_TOL: f64 = 1e-8;

/// `Δ^{jm}_{j1j2}` as an exact polynomial in the ball entries.
pub fn delta_poly(lambda: QuantizationParam, idx: &BasisIndex) -> Poly4 {
    Poly4::from_terms(
        Chart::Ball,
        delta_monomials(lambda, idx)
            .into_iter()
            .map(|(e, c)| (e, Complex64::new(c, 0.0))),
    )
}

type PolyMat = [[Poly4; 2]; 2];

/// The coordinate matrix `Z` (ball) or `W = w^μσ_μ` (tube) with polynomial
/// entries.
fn coordinate_matrix(chart: Chart) -> PolyMat {
    match chart {
        Chart::Ball => std::array::from_fn(|k| std::array::from_fn(|l| Poly4::variable(chart, 2 * k + l))),
        Chart::Tube => std::array::from_fn(|k| {
            std::array::from_fn(|l| {
                (0..4).fold(Poly4::zero(chart), |acc, mu| {
                    &acc + &Poly4::variable(chart, mu).scale(pauli(mu)[(k, l)])
                })
            })
        }),
    }
}

fn const_times(c: &Mat2C, m: &PolyMat) -> PolyMat {
    std::array::from_fn(|k| {
        std::array::from_fn(|l| &m[0][l].scale(c[(k, 0)]) + &m[1][l].scale(c[(k, 1)]))
    })
}

fn times_const(m: &PolyMat, c: &Mat2C) -> PolyMat {
    std::array::from_fn(|k| {
        std::array::from_fn(|l| &m[k][0].scale(c[(0, l)]) + &m[k][1].scale(c[(1, l)]))
    })
}

fn poly_mat_mul(a: &PolyMat, b: &PolyMat) -> PolyMat {
    std::array::from_fn(|k| std::array::from_fn(|l| &(&a[k][0] * &b[0][l]) + &(&a[k][1] * &b[1][l])))
}

fn poly_mat_combine(a: &PolyMat, b: &PolyMat, sign: f64) -> PolyMat {
    std::array::from_fn(|k| std::array::from_fn(|l| &a[k][l] + &b[k][l].scale(sign.into())))
}

fn const_mat(chart: Chart, c: &Mat2C) -> PolyMat {
    std::array::from_fn(|k| std::array::from_fn(|l| Poly4::constant(chart, c[(k, l)])))
}

/// First-order differential operator `ψ ↦ scalar·ψ + Σ_k vector_k ∂_kψ` with
/// polynomial coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialOperator {
    pub scalar: Poly4,
    pub vector: [Poly4; 4],
}

impl DifferentialOperator {
    pub fn chart(&self) -> Chart {
        self.scalar.chart()
    }

    /// Exact application to a polynomial in the same chart.
    pub fn apply(&self, psi: &Poly4) -> Result<Poly4> {
        if psi.chart() != self.chart() {
            return Err(Error::ConventionMismatch("polynomial chart"));
        }
        Ok((0..4).fold(&self.scalar * psi, |acc, k| &acc + &(&self.vector[k] * &psi.derivative(k))))
    }

    /// Application at a point given the value and holomorphic gradient of a
    /// function there.
    pub fn apply_at(&self, x: &[Complex64; 4], value: Complex64, gradient: &[Complex64; 4]) -> Complex64 {
        (0..4).fold(self.scalar.eval(x) * value, |acc, k| acc + self.vector[k].eval(x) * gradient[k])
    }

    pub fn scale(&self, c: Complex64) -> DifferentialOperator {
        DifferentialOperator {
            scalar: self.scalar.scale(c),
            vector: std::array::from_fn(|k| self.vector[k].scale(c)),
        }
    }
}

/// The infinitesimal action `dU(X)` in the chart matching `X`'s convention.
fn infinitesimal(lambda: QuantizationParam, x: &AlgebraElement, chart: Chart) -> DifferentialOperator {
    let (alpha, beta, gamma, delta) = x.blocks();
    let z = coordinate_matrix(chart);
    let gz = const_times(&gamma, &z);
    let trace = &(&gz[0][0] + &gz[1][1]) + &Poly4::constant(chart, delta.trace());
    let scalar = trace.scale(lambda.as_f64().into());

    let field = poly_mat_combine(
        &poly_mat_combine(&const_mat(chart, &beta), &const_times(&alpha, &z), 1.0),
        &poly_mat_combine(&times_const(&z, &delta), &poly_mat_mul(&z, &gz), 1.0),
        -1.0,
    );
    let components: [Poly4; 4] = match chart {
        Chart::Ball => std::array::from_fn(|k| field[k / 2][k % 2].clone()),
        Chart::Tube => std::array::from_fn(|mu| {
            let s = pauli(mu);
            let mut acc = Poly4::zero(chart);
            for a in 0..2 {
                for b in 0..2 {
                    acc = &acc + &field[a][b].scale(s[(b, a)] * 0.5);
                }
            }
            acc
        }),
    };
    DifferentialOperator {
        scalar,
        vector: components.map(|p| -&p),
    }
}

/// `dU(X)` on ball-chart polynomials.
pub fn du(lambda: QuantizationParam, x: &AlgebraElement) -> Result<DifferentialOperator> {
    if x.convention() != EtaConvention::Diagonal {
        return Err(Error::ConventionMismatch("diagonal-eta algebra"));
    }
    Ok(infinitesimal(lambda, x, Chart::Ball))
}

/// `dU(X)` on tube-chart polynomials, same formula in the variable `W`.
pub fn du_tube(lambda: QuantizationParam, x: &AlgebraElement) -> Result<DifferentialOperator> {
    if x.convention() != EtaConvention::OffDiagonal {
        return Err(Error::ConventionMismatch("off-diagonal-eta algebra"));
    }
    Ok(infinitesimal(lambda, x, Chart::Tube))
}

/// `(U(g)ψ)(Z) = det(CZ+D)^{-λ} ψ(σ(Z))`, `(A, B, C, D)` the blocks of
/// `g^{-1}`, for a ball-chart polynomial.
pub fn group_action(
    lambda: QuantizationParam,
    g: &GroupElement,
    psi: &Poly4,
    z: &Mat2C,
) -> Result<Complex64> {
    if g.convention() != EtaConvention::Diagonal {
        return Err(Error::ConventionMismatch("diagonal-eta group"));
    }
    let inv = g.inverse();
    let (_, _, c, d) = inv.blocks();
    let factor = (c * z + d).determinant().powi(-(lambda.get() as i32));
    let moved = mobius_matrix(inv.matrix(), z)?;
    Ok(factor * psi.eval(&ball_point(&moved)))
}

/// Entries `(z11, z12, z21, z22)`.
pub fn ball_point(z: &Mat2C) -> [Complex64; 4] {
    [z[(0, 0)], z[(0, 1)], z[(1, 0)], z[(1, 1)]]
}

/// Kernel covariance under the group: relative mismatch between
/// `conj(det(CV+D)^{-λ}) det(CZ+D)^{-λ} K(σ_g V, σ_g Z)` and `K(V, Z)`.
pub fn rep_cocycle_check(
    lambda: QuantizationParam,
    g: &GroupElement,
    z: &Mat2C,
    v: &Mat2C,
) -> Result<f64> {
    if g.convention() != EtaConvention::Diagonal {
        return Err(Error::ConventionMismatch("diagonal-eta group"));
    }
    let (_, _, c, d) = g.blocks();
    let power = -(lambda.get() as i32);
    let jz = (c * z + d).determinant().powi(power);
    let jv = (c * v + d).determinant().powi(power);
    let lhs = jv.conj() * jz * kernel_closed(lambda, &mobius(g, v)?, &mobius(g, z)?)?;
    let rhs = kernel_closed(lambda, v, z)?;
    Ok((lhs - rhs).norm() / rhs.norm())
}

/// Per-degree change of basis between monomials and the `Δ` polynomials.
#[derive(Debug, Clone)]
pub struct DeltaBasisSolver {
    basis: Basis,
    shells: Vec<Shell>,
}

#[derive(Debug, Clone)]
struct Shell {
    monomial_rows: HashMap<[u32; 4], usize>,
    matrix: DMatrix<Complex64>,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl DeltaBasisSolver {
    pub fn new(lambda: QuantizationParam, trunc: Truncation) -> Self {
        let basis = Basis::enumerate(trunc);
        let shells = (0..=trunc.max_degree)
            .map(|degree| {
                let monomial_rows: HashMap<[u32; 4], usize> = monomials_of_degree(degree)
                    .into_iter()
                    .enumerate()
                    .map(|(row, e)| (e, row))
                    .collect();
                let range = basis.degree_range(degree);
                let mut matrix = DMatrix::zeros(monomial_rows.len(), range.len());
                for (col, pos) in range.enumerate() {
                    for (e, c) in delta_monomials(lambda, &basis.get(pos)) {
                        matrix[(monomial_rows[&e], col)] = Complex64::new(c, 0.0);
                    }
                }
                let lu = matrix.clone().lu();
                Shell {
                    monomial_rows,
                    matrix,
                    lu,
                }
            })
            .collect();
        Self { basis, shells }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Coefficients of `p` in the `Δ` basis (terms above the cutoff are
    /// ignored) and the worst relative solve residual.
    pub fn expand(&self, p: &Poly4) -> Result<(Vec<Complex64>, f64)> {
        if p.chart() != Chart::Ball {
            return Err(Error::ConventionMismatch("polynomial chart"));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.basis.len()];
        let mut worst: f64 = 0.0;
        for (degree, shell) in self.shells.iter().enumerate() {
            let part = p.homogeneous_part(degree as u32);
            if part.is_zero() {
                continue;
            }
            let mut rhs = DVector::zeros(shell.monomial_rows.len());
            for (e, c) in part.terms() {
                rhs[shell.monomial_rows[e]] = *c;
            }
            let sol = shell
                .lu
                .solve(&rhs)
                .ok_or(Error::IllConditioned(f64::INFINITY))?;
            let residual = (&shell.matrix * &sol - &rhs).norm() / (1.0 + rhs.norm());
            worst = worst.max(residual);
            for (k, pos) in self.basis.degree_range(degree as u32).enumerate() {
                coeffs[pos] = sol[k];
            }
        }
        if worst > BASIS_SOLVE_TOL {
            return Err(Error::IllConditioned(worst));
        }
        Ok((coeffs, worst))
    }
}

/// Matrix of `dU(X)` in the orthonormal basis. Column `c` holds the image of
/// basis vector `c`; `clipped[c]` marks columns whose image leaves the
/// truncation.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    pub matrix: DMatrix<Complex64>,
    pub clipped: Vec<bool>,
    pub trunc: Truncation,
    /// Worst change-of-basis residual over all columns.
    pub residual: f64,
}

impl GeneratorMatrix {
    /// Positions whose image stays inside the truncation.
    pub fn unclipped(&self) -> Vec<usize> {
        (0..self.clipped.len()).filter(|&k| !self.clipped[k]).collect()
    }
}

/// `dU(X)` expanded in the `Δ` basis.
pub fn du_matrix(
    lambda: QuantizationParam,
    x: &AlgebraElement,
    trunc: Truncation,
) -> Result<GeneratorMatrix> {
    let solver = DeltaBasisSolver::new(lambda, trunc);
    du_matrix_with(&solver, lambda, x)
}

/// [`du_matrix`] reusing a prebuilt change of basis.
pub fn du_matrix_with(
    solver: &DeltaBasisSolver,
    lambda: QuantizationParam,
    x: &AlgebraElement,
) -> Result<GeneratorMatrix> {
    let op = du(lambda, x)?;
    let basis = solver.basis();
    let columns: Vec<(Vec<Complex64>, f64)> = basis
        .indices()
        .par_iter()
        .map(|idx| {
            let image = op.apply(&delta_poly(lambda, idx))?;
            solver.expand(&image)
        })
        .collect::<Result<_>>()?;
    let n = basis.len();
    let mut matrix = DMatrix::zeros(n, n);
    let mut residual: f64 = 0.0;
    for (c, (col, res)) in columns.into_iter().enumerate() {
        residual = residual.max(res);
        for (r, v) in col.into_iter().enumerate() {
            matrix[(r, c)] = v;
        }
    }
    let clipped = basis
        .indices()
        .iter()
        .map(|idx| !basis.is_interior(idx, 1))
        .collect();
    Ok(GeneratorMatrix {
        matrix,
        clipped,
        trunc: basis.truncation(),
        residual,
    })
}

/// Holomorphic gradient by central differences along real steps.
pub fn numeric_gradient<F>(f: &F, x: &[Complex64; 4], step: f64) -> [Complex64; 4]
where
    F: Fn(&[Complex64; 4]) -> Complex64,
{
    std::array::from_fn(|k| {
        let mut plus = *x;
        let mut minus = *x;
        plus[k] += step;
        minus[k] -= step;
        (f(&plus) - f(&minus)) / (2.0 * step)
    })
}

/// Transport of a ball-chart generator to the tube.
///
/// With `Φ(W) = det(W + iE)^{-λ} ψ(cayley(W))`, compares the tube operator
/// of `label` applied to `Φ` at `w` against the transported
/// `i·dU(K X K^{-1})ψ`; returns the relative mismatch.
pub fn transport_residual(
    lambda: QuantizationParam,
    label: GeneratorLabel,
    psi: &Poly4,
    w: &[Complex64; 4],
    step: f64,
) -> Result<f64> {
    let i = Complex64::new(0.0, 1.0);
    let power = -(lambda.get() as i32);
    let phi = |v: &[Complex64; 4]| -> Complex64 {
        let wm = from_components(v);
        let jac = (wm + Mat2C::identity() * i).determinant().powi(power);
        match crate::conformal_geometry::cayley(&wm) {
            Ok(z) => jac * psi.eval(&ball_point(&z)),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let tube_op = tube_diff_ops(label, lambda);
    let lhs = tube_op.apply_at(w, phi(w), &numeric_gradient(&phi, w, step));

    let wm = from_components(w);
    let z = crate::conformal_geometry::cayley(&wm)?;
    let jac = (wm + Mat2C::identity() * i).determinant().powi(power);
    let ball_op = du(lambda, &label.ball_element())?;
    let rhs = jac * ball_op.apply(psi)?.eval(&ball_point(&z)) * i;
    Ok((lhs - rhs).norm() / rhs.norm().max(lhs.norm()).max(f64::MIN_POSITIVE))
}
