use super::{draw, integrate_vector, jackknife_stderr, MCConfig, MCEstimate};
use crate::coherent_states::{CoherentFactory, QuantizationParam};
use crate::fock_basis::Truncation;
use crate::ladder_operators::SparseOperator;
use crate::{Complex64, Error, Mat2C, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Square matrix of Monte-Carlo estimates in basis enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateMatrix {
    dim: usize,
    entries: Vec<MCEstimate>,
}

/// Summary of an [`EstimateMatrix`] against an exact target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixComparison {
    pub entries: usize,
    pub max_abs_error: f64,
    /// Largest `|error| / stderr`.
    pub max_sigma: f64,
    /// Entries with `|error| > n_sigma · stderr`.
    pub exceedances: usize,
    pub max_stderr: f64,
}

impl EstimateMatrix {
    fn from_fn(dim: usize, f: impl Fn(usize, usize) -> MCEstimate) -> Self {
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &MCEstimate {
        &self.entries[row * self.dim + col]
    }

    pub fn values(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c).value)
    }

    /// Compares the entries selected by `mask(row, col)` with `target`,
    /// counting entries outside the `n_sigma` band.
    pub fn compare_masked(
        &self,
        target: &DMatrix<Complex64>,
        n_sigma: f64,
        mask: impl Fn(usize, usize) -> bool,
    ) -> MatrixComparison {
        let mut out = MatrixComparison {
            entries: 0,
            max_abs_error: 0.0,
            max_sigma: 0.0,
            exceedances: 0,
            max_stderr: 0.0,
        };
        for r in 0..self.dim {
            for c in 0..self.dim {
                if !mask(r, c) {
                    continue;
                }
                let est = self.get(r, c);
                let t = target[(r, c)];
                out.entries += 1;
                out.max_abs_error = out.max_abs_error.max((est.value - t).norm());
                out.max_sigma = out.max_sigma.max(est.sigma_distance(t));
                out.max_stderr = out.max_stderr.max(est.stderr);
                if !est.within(t, n_sigma) {
                    out.exceedances += 1;
                }
            }
        }
        out
    }

    pub fn compare(&self, target: &DMatrix<Complex64>, n_sigma: f64) -> MatrixComparison {
        self.compare_masked(target, n_sigma, |_, _| true)
    }
}

/// Gram matrix `G_ab = ∫ Δ_b conj(Δ_a) dμ_λ` of the truncated basis.
pub fn gram(lambda: QuantizationParam, trunc: Truncation, cfg: &MCConfig) -> EstimateMatrix {
    let factory = CoherentFactory::new(lambda, trunc);
    let n = factory.basis().len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|r| (r..n).map(move |c| (r, c))).collect();
    let est = integrate_vector(
        |z, out| {
            let d = factory.deltas(z);
            for (o, &(r, c)) in out.iter_mut().zip(&pairs) {
                *o = d[r].conj() * d[c];
            }
        },
        pairs.len(),
        lambda,
        cfg,
    );
    let upper = |r: usize, c: usize| r * n - r * (r + 1) / 2 + c;
    EstimateMatrix::from_fn(n, |r, c| {
        if r <= c {
            est[upper(r, c)]
        } else {
            let e = est[upper(c, r)];
            MCEstimate {
                value: e.value.conj(),
                ..e
            }
        }
    })
}

/// Toeplitz matrix `T_ab = ∫ conj(Δ_a) f Δ_b dμ_λ`.
pub fn toeplitz_matrix<F>(f: F, lambda: QuantizationParam, trunc: Truncation, cfg: &MCConfig) -> EstimateMatrix
where
    F: Fn(&Mat2C) -> Complex64 + Sync,
{
    let factory = CoherentFactory::new(lambda, trunc);
    let n = factory.basis().len();
    let est = integrate_vector(
        |z, out| {
            let d = factory.deltas(z);
            let fz = f(z);
            for r in 0..n {
                let left = d[r].conj() * fz;
                for c in 0..n {
                    out[r * n + c] = left * d[c];
                }
            }
        },
        n * n,
        lambda,
        cfg,
    );
    EstimateMatrix::from_fn(n, |r, c| est[r * n + c])
}

fn check_operator(op: &SparseOperator, lambda: QuantizationParam) -> Result<CoherentFactory> {
    if op.lambda() != lambda {
        return Err(Error::TruncationMismatch);
    }
    Ok(CoherentFactory::new(lambda, op.truncation()))
}

fn matrix_element(op: &SparseOperator, left: &[Complex64], right: &[Complex64]) -> Result<Complex64> {
    let image = op.apply(right)?;
    Ok(left.iter().zip(&image).map(|(a, b)| a.conj() * b).sum())
}

/// Berezin symbol `⟨Z|F|Z⟩/⟨Z|Z⟩` with truncated coherent vectors.
pub fn covariant_symbol(op: &SparseOperator, lambda: QuantizationParam, z: &Mat2C) -> Result<Complex64> {
    let factory = check_operator(op, lambda)?;
    let v = factory.coherent(z)?;
    Ok(matrix_element(op, &v.amplitudes, &v.amplitudes)? / v.norm_squared())
}

/// Two-point symbol `⟨Z|F|V⟩/⟨Z|V⟩` with truncated coherent vectors.
pub fn covariant2(op: &SparseOperator, lambda: QuantizationParam, z: &Mat2C, v: &Mat2C) -> Result<Complex64> {
    let factory = check_operator(op, lambda)?;
    let cz = factory.coherent(z)?;
    let cv = factory.coherent(v)?;
    let overlap = cz.overlap(&cv)?;
    if overlap.norm() < 1e-300 {
        return Err(Error::SingularMatrix("coherent overlap"));
    }
    Ok(matrix_element(op, &cz.amplitudes, &cv.amplitudes)? / overlap)
}

/// Settings for [`contravariant_quantize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContravariantOptions {
    /// Degree cutoff of the kernel `⟨Z|V⟩` inside the double integral;
    /// `None` uses the matrix truncation. For symbols holomorphic in `V` and
    /// antiholomorphic in `Z` any cutoff at or above the matrix truncation is
    /// exact.
    pub kernel_degree: Option<u32>,
    /// Largest allowed projected cost, in complex multiply-adds.
    pub max_cost: u128,
}

impl Default for ContravariantOptions {
    fn default() -> Self {
        Self {
            kernel_degree: None,
            max_cost: 20_000_000_000,
        }
    }
}

struct PointSet {
    weights: Vec<f64>,
    deltas: Vec<Vec<Complex64>>,
    kernel: Vec<Vec<Complex64>>,
    points: Vec<Mat2C>,
    proposed: u64,
}

/// Matrix elements `F_ab = ∫∫ f(Z,V) Δ_a(Z) ⟨Z|V⟩ conj(Δ_b(V)) dμ_λ(Z) dμ_λ(V)`
/// of the operator with 2-contravariant symbol `f`; `f(Z, V)` stands for
/// `f(Z†, V)`.
///
/// Each block draws its own `Z` and `V` points; all cross pairs are used and
/// the jackknife deletes one block from both sides.
pub fn contravariant_quantize<F>(
    f: F,
    lambda: QuantizationParam,
    trunc: Truncation,
    cfg: &MCConfig,
    options: &ContravariantOptions,
) -> Result<EstimateMatrix>
where
    F: Fn(&Mat2C, &Mat2C) -> Complex64 + Sync,
{
    let kernel_degree = options.kernel_degree.unwrap_or(trunc.max_degree);
    if kernel_degree < trunc.max_degree {
        return Err(Error::TruncationTooSmall {
            degree: trunc.max_degree,
            max_degree: kernel_degree,
        });
    }
    let factory = CoherentFactory::new(lambda, trunc);
    let kernel_factory = CoherentFactory::new(lambda, Truncation::new(kernel_degree));
    let n = factory.basis().len();
    let nk = kernel_factory.basis().len();
    let blocks = cfg.block_count();
    let samples = cfg.samples as u128;
    let projected =
        samples * samples * (n + nk) as u128 + samples * (blocks * n * n) as u128;
    if projected > options.max_cost {
        return Err(Error::BudgetExceeded {
            projected,
            limit: options.max_cost,
        });
    }

    let draw_set = |rng: &mut rand_chacha::ChaCha8Rng, count: u64| {
        let mut set = PointSet {
            weights: Vec::new(),
            deltas: Vec::new(),
            kernel: Vec::new(),
            points: Vec::new(),
            proposed: 0,
        };
        for _ in 0..count {
            let d = draw(rng, cfg.sampler, lambda);
            set.proposed += d.proposals;
            set.weights.push(d.weight);
            set.deltas.push(factory.deltas(&d.z));
            set.kernel.push(if kernel_degree == trunc.max_degree {
                Vec::new()
            } else {
                kernel_factory.deltas(&d.z)
            });
            set.points.push(d.z);
        }
        set
    };
    let sets: Vec<(PointSet, PointSet)> = (0..blocks)
        .into_par_iter()
        .with_min_len(cfg.granularity())
        .map(|b| {
            let mut rng = cfg.block_rng(b);
            let quota = cfg.block_quota(b);
            let zs = draw_set(&mut rng, quota);
            let vs = draw_set(&mut rng, quota);
            (zs, vs)
        })
        .collect();
    let kernel_vec = |set: &PointSet, i: usize| -> Vec<Complex64> {
        if set.kernel[i].is_empty() {
            set.deltas[i].clone()
        } else {
            set.kernel[i].clone()
        }
    };

    // partial[k][l] = Σ_{Z in block k, V in block l}, an n x n matrix.
    let partial: Vec<Vec<Vec<Complex64>>> = (0..blocks)
        .into_par_iter()
        .with_min_len(cfg.granularity())
        .map(|k| {
            let zs = &sets[k].0;
            let mut out = vec![vec![Complex64::new(0.0, 0.0); n * n]; blocks];
            for i in 0..zs.points.len() {
                let kz: Vec<Complex64> = kernel_vec(zs, i).iter().map(|c| c.conj()).collect();
                for (l, (_, vs)) in sets.iter().enumerate() {
                    let mut row = vec![Complex64::new(0.0, 0.0); n];
                    for j in 0..vs.points.len() {
                        let kv = if vs.kernel[j].is_empty() { &vs.deltas[j] } else { &vs.kernel[j] };
                        let k_zv: Complex64 = kz.iter().zip(kv).map(|(a, b)| a * b).sum();
                        let s = f(&zs.points[i], &vs.points[j]) * k_zv * vs.weights[j];
                        for (r, d) in row.iter_mut().zip(&vs.deltas[j]) {
                            *r += s * d.conj();
                        }
                    }
                    let dz = &zs.deltas[i];
                    let target = &mut out[l];
                    for a in 0..n {
                        let left = dz[a] * zs.weights[i];
                        for b in 0..n {
                            target[a * n + b] += left * row[b];
                        }
                    }
                }
            }
            out
        })
        .collect();

    let volume = cfg.sampler.volume();
    let pz: Vec<u64> = sets.iter().map(|s| s.0.proposed).collect();
    let pv: Vec<u64> = sets.iter().map(|s| s.1.proposed).collect();
    let (pz_total, pv_total): (u64, u64) = (pz.iter().sum(), pv.iter().sum());
    let accepted = 2 * cfg.samples;
    let proposed = pz_total + pv_total;
    let est = (0..n * n)
        .map(|e| {
            let total: Complex64 = partial.iter().flatten().map(|m| m[e]).sum();
            let norm = |p1: u64, p2: u64| volume * volume / (p1 as f64 * p2 as f64);
            let value = total * norm(pz_total, pv_total);
            let stderr = if blocks < 2 {
                f64::INFINITY
            } else {
                let loo: Vec<Complex64> = (0..blocks)
                    .map(|k| {
                        let row: Complex64 = partial[k].iter().map(|m| m[e]).sum();
                        let col: Complex64 = partial.iter().map(|p| p[k][e]).sum();
                        let kept = total - row - col + partial[k][k][e];
                        kept * norm(pz_total - pz[k], pv_total - pv[k])
                    })
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
        .collect::<Vec<_>>();
    Ok(EstimateMatrix::from_fn(n, |r, c| est[r * n + c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berezin_quadrature::Sampler;
    use crate::ladder_operators::LadderSet;

    fn lam(l: i64) -> QuantizationParam {
        QuantizationParam::new(l).unwrap()
    }

    fn point() -> Mat2C {
        Mat2C::new(
            Complex64::new(0.2, -0.1),
            Complex64::new(0.05, 0.15),
            Complex64::new(-0.1, 0.0),
            Complex64::new(0.1, 0.2),
        )
    }

    #[test]
    fn gram_is_identity() {
        let cfg = MCConfig::new(5, 40_000, 4).unwrap();
        let g = gram(lam(5), Truncation::new(2), &cfg);
        let cmp = g.compare(&DMatrix::identity(g.dim(), g.dim()), 3.0);
        assert!(cmp.max_abs_error < 0.1, "{cmp:?}");
        assert!(cmp.exceedances <= 3, "{cmp:?}");
    }

    #[test]
    fn toeplitz_of_z11_is_creator() {
        let l = lam(5);
        let trunc = Truncation::new(2);
        let cfg = MCConfig::new(9, 40_000, 4).unwrap();
        let t = toeplitz_matrix(|z| z[(0, 0)], l, trunc, &cfg);
        let ladders = LadderSet::new(l, trunc);
        let target = ladders.creator(1, 1).unwrap().to_dense();
        let cmp = t.compare(&target, 3.0);
        assert!(cmp.max_abs_error < 0.1, "{cmp:?}");
        assert!(cmp.exceedances <= 3, "{cmp:?}");
    }

    #[test]
    fn symbols_of_ladder_operators() {
        let l = lam(5);
        let trunc = Truncation::new(20);
        let ladders = LadderSet::new(l, trunc);
        let a = ladders.annihilator(1, 1).unwrap();
        let ad = ladders.creator(1, 1).unwrap();
        let z = point();
        let v = point().adjoint() * Complex64::from(0.8);
        assert!((covariant_symbol(a, l, &z).unwrap() - z[(0, 0)]).norm() < 1e-6);
        assert!((covariant_symbol(ad, l, &z).unwrap() - z[(0, 0)].conj()).norm() < 1e-6);
        assert!((covariant2(a, l, &z, &v).unwrap() - v[(0, 0)]).norm() < 1e-6);
        let id = SparseOperator::identity(l, trunc);
        assert!((covariant_symbol(&id, l, &z).unwrap() - 1.0).norm() < 1e-12);
        let diag = covariant2(ad, l, &z, &z).unwrap();
        assert!((diag - covariant_symbol(ad, l, &z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn contravariant_unit_and_a11() {
        let l = lam(5);
        let trunc = Truncation::new(1);
        let cfg = MCConfig::new(21, 1_500, 4).unwrap().with_sampler(Sampler::TruncatedHaar);
        let opts = ContravariantOptions::default();
        let unit = contravariant_quantize(|_, _| 1.0.into(), l, trunc, &cfg, &opts).unwrap();
        let n = unit.dim();
        let cmp = unit.compare(&DMatrix::identity(n, n), 3.0);
        assert!(cmp.max_abs_error < 0.15 && cmp.exceedances <= 2, "{cmp:?}");

        let f = contravariant_quantize(|_, v| v[(0, 0)], l, trunc, &cfg, &opts).unwrap();
        let target = LadderSet::new(l, trunc).annihilator(1, 1).unwrap().to_dense();
        let cmp = f.compare(&target, 3.0);
        assert!(cmp.max_abs_error < 0.15 && cmp.exceedances <= 2, "{cmp:?}");
    }

    #[test]
    fn contravariant_budget() {
        let cfg = MCConfig::new(1, 1_000_000, 1).unwrap();
        let err = contravariant_quantize(
            |_, _| 1.0.into(),
            lam(5),
            Truncation::new(2),
            &cfg,
            &ContravariantOptions::default(),
        );
        assert!(matches!(err, Err(Error::BudgetExceeded { .. })));
    }
}
