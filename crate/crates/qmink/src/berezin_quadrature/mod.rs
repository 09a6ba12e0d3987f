//! Monte-Carlo quadrature against the invariant measures of the ball, and the
//! Berezin symbol calculus built on it.
//!
//! `dμ_λ(Z) = c_λ det(E - Z†Z)^{λ-4} |dZ|` with
//! `c_λ = π^{-4}(λ-1)(λ-2)²(λ-3)` is a probability measure on the ball.
//!
//! Sampling is organized in [`MC_BLOCKS`] logical blocks. Block `b` draws from
//! its own ChaCha stream `(seed, b)`, and block sums are merged in index order,
//! so an estimate depends only on `(seed, samples, sampler)` and never on the
//! shard count. Error bars are delete-one-block jackknife.

mod star;
mod symbols;

pub use star::{boost, loglog_slope, star, star_asymptotics, StarRow, StarTable};
pub use symbols::{
    contravariant_quantize, covariant2, covariant_symbol, gram, toeplitz_matrix, ContravariantOptions,
    EstimateMatrix, MatrixComparison,
};

use crate::coherent_states::QuantizationParam;
use crate::conformal_geometry::in_domain;
use crate::{Complex64, Error, Mat2C, Result};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Number of logical sampling blocks.
pub const MC_BLOCKS: usize = 64;

/// Lebesgue volume of the cube `[-1, 1]^8` of real matrix entries.
pub const CUBE_VOLUME: f64 = 256.0;

/// How domain points are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    /// Uniform proposals in the entry cube, rejected outside the ball, with
    /// `c_λ det(E - Z†Z)^{λ-4}` as importance weight.
    #[default]
    CubeRejection,
    /// Exact draws from `μ_λ`: the top 2x2 block of the first two columns of
    /// a Haar unitary of size `λ`.
    TruncatedHaar,
}

impl Sampler {
    fn volume(self) -> f64 {
        match self {
            Sampler::CubeRejection => CUBE_VOLUME,
            Sampler::TruncatedHaar => 1.0,
        }
    }
}

/// Monte-Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MCConfig {
    pub seed: u64,
    /// Accepted domain points per integral.
    pub samples: u64,
    /// Parallel granularity; never changes results.
    pub shards: usize,
    pub sampler: Sampler,
}

impl MCConfig {
    pub fn new(seed: u64, samples: u64, shards: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidParameter("samples must be positive".into()));
        }
        if shards == 0 {
            return Err(Error::InvalidParameter("shards must be positive".into()));
        }
        Ok(Self {
            seed,
            samples,
            shards,
            sampler: Sampler::default(),
        })
    }

    pub fn with_sampler(self, sampler: Sampler) -> Self {
        Self { sampler, ..self }
    }

    pub fn with_samples(self, samples: u64) -> Self {
        Self {
            samples: samples.max(1),
            ..self
        }
    }

    pub(crate) fn block_count(&self) -> usize {
        (self.samples.min(MC_BLOCKS as u64)) as usize
    }

    pub(crate) fn block_quota(&self, block: usize) -> u64 {
        let blocks = self.block_count() as u64;
        self.samples / blocks + u64::from((block as u64) < self.samples % blocks)
    }

    pub(crate) fn block_rng(&self, block: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(block as u64);
        rng
    }

    /// Minimum number of blocks handed to one worker.
    pub(crate) fn granularity(&self) -> usize {
        self.block_count().div_ceil(self.shards).max(1)
    }
}

/// A Monte-Carlo estimate with its jackknife standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub value: Complex64,
    /// `sqrt(σ_re² + σ_im²)`.
    pub stderr: f64,
    pub accepted: u64,
    pub proposed: u64,
}

impl MCEstimate {
    /// `|value - target|` in units of `stderr`.
    pub fn sigma_distance(&self, target: Complex64) -> f64 {
        let err = (self.value - target).norm();
        if err == 0.0 {
            0.0
        } else {
            err / self.stderr
        }
    }

    /// True iff `|value - target| ≤ n_sigma · stderr`.
    pub fn within(&self, target: Complex64, n_sigma: f64) -> bool {
        (self.value - target).norm() <= n_sigma * self.stderr
    }

    pub fn acceptance(&self) -> f64 {
        self.accepted as f64 / self.proposed as f64
    }
}

/// `c_λ = π^{-4}(λ-1)(λ-2)²(λ-3)`.
pub fn c_lambda(lambda: QuantizationParam) -> f64 {
    let l = lambda.as_f64();
    (l - 1.0) * (l - 2.0).powi(2) * (l - 3.0) / PI.powi(4)
}

/// Density of `μ_λ` against Lebesgue measure; zero outside the ball.
pub fn density(lambda: QuantizationParam, z: &Mat2C) -> f64 {
    if !in_domain(z) {
        return 0.0;
    }
    let det = (Mat2C::identity() - z.adjoint() * z).determinant().re;
    c_lambda(lambda) * det.powi(lambda.get() as i32 - 4)
}

/// `M^{-1/2}` for a positive-definite Hermitian 2x2 matrix.
pub(crate) fn hermitian_inv_sqrt(m: &Mat2C) -> Option<Mat2C> {
    let det = m.determinant().re;
    let tr = m.trace().re;
    if det <= 0.0 || tr <= 0.0 {
        return None;
    }
    let s = det.sqrt();
    let t = (tr + 2.0 * s).sqrt();
    let root = (m + Mat2C::identity() * Complex64::from(s)) / Complex64::from(t);
    root.try_inverse()
}

fn cube_point<R: Rng + ?Sized>(rng: &mut R) -> Mat2C {
    let mut entries = [Complex64::new(0.0, 0.0); 4];
    for e in &mut entries {
        let re = rng.random_range(-1.0..1.0);
        let im = rng.random_range(-1.0..1.0);
        *e = Complex64::new(re, im);
    }
    Mat2C::new(entries[0], entries[1], entries[2], entries[3])
}

fn haar_point<R: Rng + ?Sized>(rng: &mut R, lambda: QuantizationParam) -> Mat2C {
    let n = lambda.get() as usize;
    let g = DMatrix::<Complex64>::from_fn(n, 2, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let gram = g.adjoint() * &g;
    let gram = Mat2C::new(gram[(0, 0)], gram[(0, 1)], gram[(1, 0)], gram[(1, 1)]);
    let top = Mat2C::new(g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    // A Gaussian Gram matrix is singular with probability zero.
    top * hermitian_inv_sqrt(&gram).unwrap_or_else(Mat2C::zeros)
}

/// One domain point with its importance weight and the number of proposals
/// it consumed.
pub(crate) struct Draw {
    pub z: Mat2C,
    pub weight: f64,
    pub proposals: u64,
}

pub(crate) fn draw<R: Rng + ?Sized>(rng: &mut R, sampler: Sampler, lambda: QuantizationParam) -> Draw {
    match sampler {
        Sampler::CubeRejection => {
            let mut proposals = 0;
            loop {
                proposals += 1;
                let z = cube_point(rng);
                let weight = density(lambda, &z);
                if weight > 0.0 {
                    return Draw { z, weight, proposals };
                }
            }
        }
        Sampler::TruncatedHaar => Draw {
            z: haar_point(rng, lambda),
            weight: 1.0,
            proposals: 1,
        },
    }
}

/// Weighted sums of one block.
pub(crate) struct BlockSums {
    pub sums: Vec<Complex64>,
    pub accepted: u64,
    pub proposed: u64,
}

/// Delete-one-block jackknife of the ratio estimator `volume · S / P`.
pub(crate) fn jackknife(blocks: &[BlockSums], volume: f64) -> Vec<MCEstimate> {
    let dim = blocks.first().map_or(0, |b| b.sums.len());
    let proposed: u64 = blocks.iter().map(|b| b.proposed).sum();
    let accepted: u64 = blocks.iter().map(|b| b.accepted).sum();
    let nb = blocks.len();
    (0..dim)
        .map(|k| {
            let total: Complex64 = blocks.iter().map(|b| b.sums[k]).sum();
            let value = total * (volume / proposed as f64);
            let stderr = if nb < 2 {
                f64::INFINITY
            } else {
                let loo: Vec<Complex64> = blocks
                    .iter()
                    .map(|b| (total - b.sums[k]) * (volume / (proposed - b.proposed) as f64))
                    .collect();
                jackknife_stderr(&loo)
            };
            MCEstimate {
                value,
                stderr,
                accepted,
                proposed,
            }
        })
        .collect()
}

/// Standard error from leave-one-out replicates.
pub(crate) fn jackknife_stderr(loo: &[Complex64]) -> f64 {
    let n = loo.len() as f64;
    let mean: Complex64 = loo.iter().sum::<Complex64>() / n;
    let (var_re, var_im) = loo.iter().fold((0.0, 0.0), |(r, i), t| {
        let d = t - mean;
        (r + d.re * d.re, i + d.im * d.im)
    });
    ((n - 1.0) / n * (var_re + var_im)).sqrt()
}

/// Integrates a vector-valued integrand of length `dim` against `μ_λ`.
///
/// The integrand writes its values at `Z` into the output slice, which is
/// zeroed before each call.
pub fn integrate_vector<F>(
    integrand: F,
    dim: usize,
    lambda: QuantizationParam,
    cfg: &MCConfig,
) -> Vec<MCEstimate>
where
    F: Fn(&Mat2C, &mut [Complex64]) + Sync,
{
    let blocks: Vec<BlockSums> = (0..cfg.block_count())
        .into_par_iter()
        .with_min_len(cfg.granularity())
        .map(|block| {
            let mut rng = cfg.block_rng(block);
            let mut sums = vec![Complex64::new(0.0, 0.0); dim];
            let mut buf = vec![Complex64::new(0.0, 0.0); dim];
            let mut proposed = 0;
            let quota = cfg.block_quota(block);
            for _ in 0..quota {
                let d = draw(&mut rng, cfg.sampler, lambda);
                proposed += d.proposals;
                buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
                integrand(&d.z, &mut buf);
                for (s, b) in sums.iter_mut().zip(&buf) {
                    *s += b * d.weight;
                }
            }
            BlockSums {
                sums,
                accepted: quota,
                proposed,
            }
        })
        .collect();
    jackknife(&blocks, cfg.sampler.volume())
}

/// `∫ f dμ_λ`.
pub fn integrate_mu_lambda<F>(f: F, lambda: QuantizationParam, cfg: &MCConfig) -> MCEstimate
where
    F: Fn(&Mat2C) -> Complex64 + Sync,
{
    integrate_vector(|z, out| out[0] = f(z), 1, lambda, cfg)[0]
}

/// A uniformly distributed point of the ball with its Lebesgue weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSample {
    pub z: Mat2C,
    /// `2^8 / proposals`, so `Σ weight · h(Z) ≈ ∫ h |dZ|`.
    pub weight: f64,
}

/// The accepted points of the cube rejection sampler in block order, each
/// weighted by the cube volume over the total number of proposals.
///
/// Always uses the cube sampler, whatever `cfg.sampler` says.
pub fn sample_domain(cfg: &MCConfig) -> Vec<DomainSample> {
    // The weight `density` is irrelevant here; any λ accepts the same points.
    let lambda = QuantizationParam::new(4).expect("4 is a valid parameter");
    let blocks: Vec<(Vec<Mat2C>, u64)> = (0..cfg.block_count())
        .into_par_iter()
        .with_min_len(cfg.granularity())
        .map(|block| {
            let mut rng = cfg.block_rng(block);
            let mut points = Vec::new();
            let mut proposed = 0;
            for _ in 0..cfg.block_quota(block) {
                let d = draw(&mut rng, Sampler::CubeRejection, lambda);
                proposed += d.proposals;
                points.push(d.z);
            }
            (points, proposed)
        })
        .collect();
    let proposed: u64 = blocks.iter().map(|b| b.1).sum();
    let weight = CUBE_VOLUME / proposed as f64;
    blocks
        .into_iter()
        .flat_map(|(points, _)| points)
        .map(|z| DomainSample { z, weight })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(l: i64) -> QuantizationParam {
        QuantizationParam::new(l).unwrap()
    }

    fn one(_: &Mat2C) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn c5_value() {
        assert!((c_lambda(lam(5)) - 72.0 / PI.powi(4)).abs() < 1e-15);
    }

    #[test]
    fn unit_mass_cube() {
        let cfg = MCConfig::new(7, 100_000, 4).unwrap();
        for l in [4, 5, 6] {
            let est = integrate_mu_lambda(one, lam(l), &cfg);
            assert!(est.within(1.0.into(), 3.0), "λ={l}: {est:?}");
            assert!(est.stderr < 2e-2);
        }
    }

    #[test]
    fn acceptance_matches_ball_volume() {
        // Lebesgue volume of the ball is 1/c_4 = π⁴/12.
        let cfg = MCConfig::new(3, 50_000, 2).unwrap();
        let est = integrate_mu_lambda(one, lam(4), &cfg);
        let expected = PI.powi(4) / 12.0 / CUBE_VOLUME;
        let p = est.acceptance();
        let sigma = (expected * (1.0 - expected) / est.proposed as f64).sqrt();
        assert!((p - expected).abs() < 4.0 * sigma, "{p} vs {expected}");
    }

    #[test]
    fn haar_sampler_moments() {
        // E|z11|² = 1/λ under μ_λ.
        let cfg = MCConfig::new(11, 40_000, 4).unwrap().with_sampler(Sampler::TruncatedHaar);
        for l in [4, 6, 16] {
            let est = integrate_mu_lambda(|z| z[(0, 0)].norm_sqr().into(), lam(l), &cfg);
            assert!(est.within((1.0 / l as f64).into(), 3.5), "λ={l}: {est:?}");
        }
    }

    #[test]
    fn shard_count_does_not_change_estimate() {
        let f = |z: &Mat2C| z[(0, 1)] * z[(1, 0)].conj() + z[(0, 0)].norm_sqr();
        let a = integrate_mu_lambda(f, lam(5), &MCConfig::new(42, 5_000, 1).unwrap());
        let b = integrate_mu_lambda(f, lam(5), &MCConfig::new(42, 5_000, 7).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn domain_samples_inside_ball() {
        let cfg = MCConfig::new(1, 2_000, 3).unwrap();
        let pts = sample_domain(&cfg);
        assert_eq!(pts.len(), 2_000);
        assert!(pts.iter().all(|p| in_domain(&p.z)));
        let volume: f64 = pts.iter().map(|p| p.weight).sum();
        assert!((volume - PI.powi(4) / 12.0).abs() < 0.5);
    }

    #[test]
    fn inverse_square_root() {
        let m = Mat2C::new(
            Complex64::new(2.0, 0.0),
            Complex64::new(0.3, 0.4),
            Complex64::new(0.3, -0.4),
            Complex64::new(1.0, 0.0),
        );
        let r = hermitian_inv_sqrt(&m).unwrap();
        let check = r * m * r;
        assert!((check - Mat2C::identity()).norm() < 1e-14);
    }
}
