use super::{from_components, momentum_j_lambda, AlgebraElement, MomentumMethod, METRIC};
use crate::{Complex64, Result};

/// Default central-difference step for [`numeric_partials`].
pub const FD_STEP: f64 = 1e-5;

/// First partials `∂f/∂w^μ` and `∂f/∂w̄^μ` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub holo: [Complex64; 4],
    pub anti: [Complex64; 4],
}

/// The bracket tensor `(w-w̄)²η^{μν} - 2(w-w̄)^μ(w-w̄)^ν`.
pub fn poisson_matrix(w: &[Complex64; 4]) -> [[Complex64; 4]; 4] {
    let u: [Complex64; 4] = std::array::from_fn(|mu| w[mu] - w[mu].conj());
    let u2: Complex64 = (0..4).map(|mu| u[mu] * u[mu] * METRIC[mu]).sum();
    std::array::from_fn(|mu| {
        std::array::from_fn(|nu| {
            let diag = if mu == nu { u2 * METRIC[mu] } else { Complex64::new(0.0, 0.0) };
            diag - u[mu] * u[nu] * 2.0
        })
    })
}

/// Poisson bracket `{f, g}_λ` on the tube from the partials of `f` and `g`.
#[allow(clippy::needless_range_loop)]
pub fn poisson_bracket(df: &Partials, dg: &Partials, w: &[Complex64; 4], lambda: f64) -> Complex64 {
    let m = poisson_matrix(w);
    let mut acc = Complex64::new(0.0, 0.0);
    for mu in 0..4 {
        for nu in 0..4 {
            acc += m[mu][nu] * (df.holo[mu] * dg.anti[nu] - dg.holo[mu] * df.anti[nu]);
        }
    }
    acc * Complex64::new(0.0, 0.5 / lambda)
}

/// Wirtinger partials by central differences along the real and imaginary
/// directions of each component.
pub fn numeric_partials<F>(f: F, w: &[Complex64; 4], step: f64) -> Partials
where
    F: Fn(&[Complex64; 4]) -> Complex64,
{
    let mut holo = [Complex64::new(0.0, 0.0); 4];
    let mut anti = holo;
    for mu in 0..4 {
        let shifted = |delta: Complex64| {
            let mut p = *w;
            p[mu] += delta;
            f(&p)
        };
        let dx = (shifted(step.into()) - shifted((-step).into())) / (2.0 * step);
        let dy = (shifted(Complex64::new(0.0, step)) - shifted(Complex64::new(0.0, -step)))
            / (2.0 * step);
        let i = Complex64::new(0.0, 1.0);
        holo[mu] = (dx - i * dy) * 0.5;
        anti[mu] = (dx + i * dy) * 0.5;
    }
    Partials { holo, anti }
}

/// Momentum-map component `½ Tr(J_λ(W) X)` for a tube-chart algebra element.
pub fn momentum_component(x: &AlgebraElement, w: &[Complex64; 4], lambda: f64) -> Result<Complex64> {
    let j = momentum_j_lambda(&from_components(w), lambda, MomentumMethod::Block)?;
    Ok((j * x.matrix()).trace() * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn matrix_at_center_is_four_times_identity() {
        let w = [Complex64::new(0.0, 1.0), 0.0.into(), 0.0.into(), 0.0.into()];
        let m = poisson_matrix(&w);
        for mu in 0..4 {
            for nu in 0..4 {
                let expected = if mu == nu { 4.0 } else { 0.0 };
                assert!((m[mu][nu] - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bracket_is_antisymmetric() {
        let w = [Complex64::new(0.2, 1.3), Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.1), Complex64::new(0.5, -0.2)];
        let f = |v: &[Complex64; 4]| v[0] * v[1].conj() + v[2];
        let g = |v: &[Complex64; 4]| v[3] * v[3] - v[0].conj();
        let df = numeric_partials(f, &w, FD_STEP);
        let dg = numeric_partials(g, &w, FD_STEP);
        let fg = poisson_bracket(&df, &dg, &w, 2.0);
        let gf = poisson_bracket(&dg, &df, &w, 2.0);
        assert_eq!(fg, -gf);
        assert_eq!(poisson_bracket(&df, &df, &w, 2.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn numeric_partials_of_holomorphic_monomial() {
        let w = [Complex64::new(0.2, 1.3), 0.0.into(), 0.0.into(), 0.0.into()];
        let d = numeric_partials(|v| v[0] * v[0], &w, FD_STEP);
        assert!((d.holo[0] - w[0] * 2.0).norm() < 1e-9);
        assert!(d.anti[0].norm() < 1e-9);
    }
}
