use super::{hermitian_inv_sqrt, integrate_vector, MCConfig, MCEstimate};
use crate::coherent_states::QuantizationParam;
use crate::conformal_geometry::{
    cayley, cayley_inv, components, from_blocks, from_components, in_domain, mobius_matrix,
    numeric_partials, poisson_bracket, FD_STEP,
};
use crate::{Complex64, Error, Mat2C, Mat4C, Result};

/// The boost `φ_Z` of the ball sending `0` to `Z`:
/// `[[(E-ZZ†)^{-1/2}, Z(E-Z†Z)^{-1/2}], [Z†(E-ZZ†)^{-1/2}, (E-Z†Z)^{-1/2}]]`.
pub fn boost(z: &Mat2C) -> Result<Mat4C> {
    if !in_domain(z) {
        return Err(Error::OutsideDomain);
    }
    let e = Mat2C::identity();
    let left = hermitian_inv_sqrt(&(e - z * z.adjoint())).ok_or(Error::SingularMatrix("boost"))?;
    let right = hermitian_inv_sqrt(&(e - z.adjoint() * z)).ok_or(Error::SingularMatrix("boost"))?;
    Ok(from_blocks(&left, &(z * right), &(z.adjoint() * left), &right))
}

/// Berezin star product `(f ★ g)(Z)` of two-point symbols, where `f(Z, V)`
/// stands for `f(Z†, V)`.
///
/// The measure `|⟨Z|V⟩|²/⟨Z|Z⟩ dμ_λ(V)` is the image of `μ_λ` under the
/// boost `φ_Z`, so `V = φ_Z(U)` with `U` drawn from `μ_λ`.
pub fn star<F, G>(f: F, g: G, lambda: QuantizationParam, z: &Mat2C, cfg: &MCConfig) -> Result<MCEstimate>
where
    F: Fn(&Mat2C, &Mat2C) -> Complex64 + Sync,
    G: Fn(&Mat2C, &Mat2C) -> Complex64 + Sync,
{
    let phi = boost(z)?;
    let est = integrate_vector(
        |u, out| {
            out[0] = match mobius_matrix(&phi, u) {
                Ok(v) => f(z, &v) * g(&v, z),
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            }
        },
        1,
        lambda,
        cfg,
    );
    Ok(est[0])
}

/// One row of [`star_asymptotics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarRow {
    pub lambda: u32,
    pub star: MCEstimate,
    /// `f(Z)g(Z)` on the diagonal.
    pub product: Complex64,
    /// `|f★g - fg|`.
    pub star_deviation: f64,
    /// `f★g - g★f` from one sample stream.
    pub commutator: MCEstimate,
    /// `{f, g}_λ` at the tube image of `Z`.
    pub poisson: Complex64,
    /// `|commutator - iλ{f,g}_λ|`.
    pub literal_deviation: f64,
    /// `|commutator - (-i){f,g}_λ|`.
    pub calibrated_deviation: f64,
}

impl StarRow {
    /// `iλ{f,g}_λ`.
    pub fn literal(&self) -> Complex64 {
        Complex64::new(0.0, self.lambda as f64) * self.poisson
    }

    /// `-i{f,g}_λ`.
    pub fn calibrated(&self) -> Complex64 {
        Complex64::new(0.0, -1.0) * self.poisson
    }

    /// True iff the commutator agrees with `-i{f,g}_λ` within `n_sigma`.
    pub fn commutator_consistent(&self, n_sigma: f64) -> bool {
        self.commutator.within(self.calibrated(), n_sigma)
    }
}

/// Rows of [`star_asymptotics`] plus the fitted decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct StarTable {
    pub rows: Vec<StarRow>,
    /// Least-squares slope of `ln|f★g - fg|` against `ln λ`; `None` with
    /// fewer than two nonzero deviations.
    pub slope: Option<f64>,
}

impl StarTable {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].star_deviation < w[0].star_deviation)
    }
}

/// Least-squares slope of `ln y` against `ln x` over positive pairs.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn poisson_at<F, G>(f: &F, g: &G, z: &Mat2C, lambda: f64) -> Result<Complex64>
where
    F: Fn(&Mat2C, &Mat2C) -> Complex64,
    G: Fn(&Mat2C, &Mat2C) -> Complex64,
{
    let w = components(&cayley_inv(z)?);
    let lift = |h: &dyn Fn(&Mat2C, &Mat2C) -> Complex64| {
        numeric_partials(
            |p| match cayley(&from_components(p)) {
                Ok(zz) => h(&zz, &zz),
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            },
            &w,
            FD_STEP,
        )
    };
    Ok(poisson_bracket(&lift(f), &lift(g), &w, lambda))
}

/// Star product, commutator and Poisson bracket at `Z` for each `λ` in
/// `lambdas` (ascending).
pub fn star_asymptotics<F, G>(
    f: F,
    g: G,
    lambdas: &[QuantizationParam],
    z: &Mat2C,
    cfg: &MCConfig,
) -> Result<StarTable>
where
    F: Fn(&Mat2C, &Mat2C) -> Complex64 + Sync,
    G: Fn(&Mat2C, &Mat2C) -> Complex64 + Sync,
{
    if lambdas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("lambda list must be strictly ascending".into()));
    }
    let phi = boost(z)?;
    let product = f(z, z) * g(z, z);
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let est = integrate_vector(
            |u, out| match mobius_matrix(&phi, u) {
                Ok(v) => {
                    let fg = f(z, &v) * g(&v, z);
                    let gf = g(z, &v) * f(&v, z);
                    out[0] = fg;
                    out[1] = fg - gf;
                }
                Err(_) => out.fill(Complex64::new(f64::NAN, f64::NAN)),
            },
            2,
            lambda,
            cfg,
        );
        let poisson = poisson_at(&f, &g, z, lambda.as_f64())?;
        let lam = lambda.as_f64();
        let commutator = est[1];
        rows.push(StarRow {
            lambda: lambda.get(),
            star: est[0],
            product,
            star_deviation: (est[0].value - product).norm(),
            commutator,
            poisson,
            literal_deviation: (commutator.value - Complex64::new(0.0, lam) * poisson).norm(),
            calibrated_deviation: (commutator.value - Complex64::new(0.0, -1.0) * poisson).norm(),
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.lambda as f64, r.star_deviation)).collect();
    Ok(StarTable {
        slope: loglog_slope(&points),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berezin_quadrature::Sampler;
    use crate::conformal_geometry::mobius;
    use crate::conformal_geometry::{EtaConvention, GroupElement};

    fn lam(l: i64) -> QuantizationParam {
        QuantizationParam::new(l).unwrap()
    }

    fn haar(seed: u64, samples: u64) -> MCConfig {
        MCConfig::new(seed, samples, 4).unwrap().with_sampler(Sampler::TruncatedHaar)
    }

    fn hol(_: &Mat2C, v: &Mat2C) -> Complex64 {
        v[(0, 0)]
    }

    fn antihol(z: &Mat2C, _: &Mat2C) -> Complex64 {
        z[(0, 0)].conj()
    }

    fn point() -> Mat2C {
        Mat2C::new(
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.1, 0.2),
            Complex64::new(0.0, -0.2),
            Complex64::new(0.25, 0.0),
        )
    }

    #[test]
    fn boost_is_a_group_element_moving_origin() {
        let z = point();
        let g = GroupElement::new(boost(&z).unwrap(), EtaConvention::Diagonal).unwrap();
        assert!((mobius(&g, &Mat2C::zeros()).unwrap() - z).norm() < 1e-14);
    }

    #[test]
    fn unit_reproduces_symbol() {
        let z = point();
        let g = |a: &Mat2C, b: &Mat2C| a[(0, 1)].conj() * b[(1, 1)] + b[(0, 0)];
        let est = star(|_, _| 1.0.into(), g, lam(6), &z, &haar(4, 20_000)).unwrap();
        assert!(est.within(g(&z, &z), 3.0), "{est:?} vs {}", g(&z, &z));
        // For f ≡ 1 the integrand g(V, Z) is exactly reproduced.
        let cube = MCConfig::new(4, 20_000, 4).unwrap();
        let est = star(|_, _| 1.0.into(), g, lam(5), &z, &cube).unwrap();
        assert!(est.within(g(&z, &z), 3.0), "{est:?}");
    }

    #[test]
    fn vacuum_operator_product() {
        for l in [5, 6, 9] {
            let est = star(hol, antihol, lam(l), &Mat2C::zeros(), &haar(8, 40_000)).unwrap();
            assert!(est.within((1.0 / l as f64).into(), 3.0), "λ={l}: {est:?}");
            let rev = star(antihol, hol, lam(l), &Mat2C::zeros(), &haar(8, 1_000)).unwrap();
            assert!(rev.value.norm() < 1e-15);
        }
    }

    #[test]
    fn poisson_calibration_at_origin() {
        let l = 7.0;
        let p = poisson_at(&hol, &antihol, &Mat2C::zeros(), l).unwrap();
        assert!((p - Complex64::new(0.0, 1.0 / l)).norm() < 1e-8, "{p}");
    }

    #[test]
    fn asymptotic_table() {
        let lambdas = [lam(8), lam(16), lam(32)];
        let table = star_asymptotics(hol, antihol, &lambdas, &Mat2C::zeros(), &haar(2, 20_000)).unwrap();
        assert!(table.strictly_decreasing());
        let slope = table.slope.unwrap();
        assert!((slope + 1.0).abs() < 0.1, "{slope}");
        assert!(table.rows.iter().all(|r| r.commutator_consistent(3.0)));
    }

    #[test]
    fn constant_symbols_have_zero_deviation() {
        let c = |_: &Mat2C, _: &Mat2C| Complex64::new(2.0, -1.0);
        let table = star_asymptotics(c, c, &[lam(4), lam(8)], &point(), &haar(1, 500)).unwrap();
        for r in &table.rows {
            assert!(r.star_deviation < 1e-12 && r.commutator.value.norm() < 1e-12);
            assert!(r.poisson.norm() < 1e-8);
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 / x)).collect();
        assert!((loglog_slope(&pts).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&[(1.0, 1.0)]), None);
    }
}
