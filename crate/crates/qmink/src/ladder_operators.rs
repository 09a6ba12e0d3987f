//! Sparse matrices of the coordinate annihilation operators `a_kl`, their
//! adjoints, and the diagonal closed forms built from them.

use crate::coherent_states::{CoherentFactory, QuantizationParam};
use crate::conformal_geometry::{mobius, GroupElement};
use crate::fock_basis::{Basis, BasisIndex, Truncation};
use crate::{Complex64, Error, Mat2C, Result};
use nalgebra::DMatrix;
use std::collections::BTreeMap;

/// Row-compressed operator on a truncated basis. Row `r` lists `(col, value)`
/// pairs sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    lambda: QuantizationParam,
    trunc: Truncation,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOperator {
    pub fn zeros(lambda: QuantizationParam, trunc: Truncation) -> Self {
        Self {
            lambda,
            trunc,
            rows: vec![Vec::new(); trunc.dimension()],
        }
    }

    pub fn identity(lambda: QuantizationParam, trunc: Truncation) -> Self {
        Self::scalar(lambda, trunc, Complex64::new(1.0, 0.0))
    }

    /// `c · I`.
    pub fn scalar(lambda: QuantizationParam, trunc: Truncation, c: Complex64) -> Self {
        let rows = (0..trunc.dimension()).map(|r| vec![(r, c)]).collect();
        Self { lambda, trunc, rows }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates and
    /// dropping exact zeros.
    pub fn from_triplets(
        lambda: QuantizationParam,
        trunc: Truncation,
        triplets: impl IntoIterator<Item = (usize, usize, Complex64)>,
    ) -> Self {
        let dim = trunc.dimension();
        let mut acc: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "position ({r}, {c}) outside dimension {dim}");
            *acc[r].entry(c).or_default() += v;
        }
        let rows = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| *v != Complex64::new(0.0, 0.0)).collect())
            .collect();
        Self { lambda, trunc, rows }
    }

    pub fn lambda(&self) -> QuantizationParam {
        self.lambda
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, r: usize) -> &[(usize, Complex64)] {
        &self.rows[r]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// All stored `(row, col, value)` entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    /// Entry at `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.rows[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map(|k| self.rows[r][k].1)
            .unwrap_or_default()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dimension()).map(|r| self.get(r, r)).collect()
    }

    fn check_compatible(&self, other: &SparseOperator) -> Result<()> {
        if self.trunc != other.trunc || self.lambda != other.lambda {
            return Err(Error::TruncationMismatch);
        }
        Ok(())
    }

    /// Conjugate transpose in the orthonormal basis.
    pub fn adjoint(&self) -> SparseOperator {
        Self::from_triplets(
            self.lambda,
            self.trunc,
            self.iter().map(|(r, c, v)| (c, r, v.conj())),
        )
    }

    /// Sparse matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dimension() {
            return Err(Error::TruncationMismatch);
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(c, a)| a * v[c]).sum())
            .collect())
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.check_compatible(other)?;
        let triplets = self.iter().flat_map(|(r, k, a)| {
            other.rows[k].iter().map(move |&(c, b)| (r, c, a * b))
        });
        Ok(Self::from_triplets(self.lambda, self.trunc, triplets))
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, other: &SparseOperator, c: Complex64) -> Result<SparseOperator> {
        self.check_compatible(other)?;
        let triplets = self.iter().chain(other.iter().map(|(r, k, v)| (r, k, v * c)));
        Ok(Self::from_triplets(self.lambda, self.trunc, triplets))
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.add_scaled(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.add_scaled(other, Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> SparseOperator {
        Self::from_triplets(self.lambda, self.trunc, self.iter().map(|(r, k, v)| (r, k, v * c)))
    }

    /// `[self, other] = self·other - other·self`.
    pub fn commutator(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dimension(), self.dimension());
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }
}

/// `[A, B]` as a sparse operator.
pub fn commutator_matrix(a: &SparseOperator, b: &SparseOperator) -> Result<SparseOperator> {
    a.commutator(b)
}

fn check_kl(k: usize, l: usize) -> Result<()> {
    if (1..=2).contains(&k) && (1..=2).contains(&l) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "ladder indices must be in {{1, 2}}, got ({k}, {l})"
        )))
    }
}

/// Matrix of `a_kl` (`k, l ∈ {1, 2}`) on the truncated basis.
///
/// Each basis vector has at most two images: `(j+½, m-1)` and `(j-½, m)`,
/// both with `j1`, `j2` shifted by `-½` for index `1` and `+½` for index `2`.
/// Targets with invalid labels vanish before any coefficient is evaluated.
pub fn annihilation(
    lambda: QuantizationParam,
    k: usize,
    l: usize,
    trunc: Truncation,
) -> Result<SparseOperator> {
    check_kl(k, l)?;
    let basis = Basis::enumerate(trunc);
    Ok(annihilation_on(&basis, lambda, k, l))
}

fn annihilation_on(basis: &Basis, lambda: QuantizationParam, k: usize, l: usize) -> SparseOperator {
    let lam = lambda.as_f64();
    let shift1: i32 = if k == 1 { -1 } else { 1 };
    let shift2: i32 = if l == 1 { -1 } else { 1 };
    let sign = if k == l { 1.0 } else { -1.0 };
    let mut triplets = Vec::new();
    for (col, idx) in basis.indices().iter().enumerate() {
        let (two_j, m) = (idx.two_j() as i64, idx.m() as i64);
        let (j, j1, j2) = (idx.j(), idx.j1(), idx.j2());
        let mf = m as f64;
        let (t1, t2) = (idx.two_j1() + shift1, idx.two_j2() + shift2);

        if let Some(target) = BasisIndex::from_raw(two_j + 1, m - 1, t1, t2) {
            if let Some(row) = basis.index_lookup(&target) {
                let f1 = j + shift1 as f64 * j1 + 1.0;
                let f2 = j + shift2 as f64 * j2 + 1.0;
                let coeff = sign
                    * (f1 * f2 * mf / ((2.0 * j + 1.0) * (2.0 * j + 2.0) * (mf + lam - 2.0)))
                        .sqrt();
                triplets.push((row, col, Complex64::new(coeff, 0.0)));
            }
        }
        if let Some(target) = BasisIndex::from_raw(two_j - 1, m, t1, t2) {
            if let Some(row) = basis.index_lookup(&target) {
                let g1 = j - shift1 as f64 * j1;
                let g2 = j - shift2 as f64 * j2;
                let coeff = (g1 * g2 * (mf + 2.0 * j + 1.0)
                    / ((mf + 2.0 * j + lam - 1.0) * 2.0 * j * (2.0 * j + 1.0)))
                    .sqrt();
                triplets.push((row, col, Complex64::new(coeff, 0.0)));
            }
        }
    }
    SparseOperator::from_triplets(lambda, basis.truncation(), triplets)
}

/// The four annihilation operators and their adjoints for one `(λ, trunc)`.
#[derive(Debug, Clone)]
pub struct LadderSet {
    basis: Basis,
    annihilators: [[SparseOperator; 2]; 2],
    creators: [[SparseOperator; 2]; 2],
}

impl LadderSet {
    pub fn new(lambda: QuantizationParam, trunc: Truncation) -> Self {
        let basis = Basis::enumerate(trunc);
        let annihilators: [[SparseOperator; 2]; 2] = std::array::from_fn(|k| {
            std::array::from_fn(|l| annihilation_on(&basis, lambda, k + 1, l + 1))
        });
        let creators = std::array::from_fn(|k| std::array::from_fn(|l| annihilators[k][l].adjoint()));
        Self {
            basis,
            annihilators,
            creators,
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// `a_kl` with 1-based indices.
    pub fn annihilator(&self, k: usize, l: usize) -> Result<&SparseOperator> {
        check_kl(k, l)?;
        Ok(&self.annihilators[k - 1][l - 1])
    }

    /// `a_kl†` with 1-based indices.
    pub fn creator(&self, k: usize, l: usize) -> Result<&SparseOperator> {
        check_kl(k, l)?;
        Ok(&self.creators[k - 1][l - 1])
    }

    /// Iterates `((k, l), a_kl, a_kl†)` over the four index pairs.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), &SparseOperator, &SparseOperator)> {
        (0..4).map(move |n| {
            let (k, l) = (n / 2, n % 2);
            ((k + 1, l + 1), &self.annihilators[k][l], &self.creators[k][l])
        })
    }
}

fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖(a_kl - z_kl)|Z⟩‖ / ‖|Z⟩‖` for the truncated coherent vector, indexed
/// `[k-1][l-1]`.
pub fn eigen_residual(
    lambda: QuantizationParam,
    z: &Mat2C,
    trunc: Truncation,
) -> Result<[[f64; 2]; 2]> {
    Ok(eigen_residuals(lambda, std::slice::from_ref(z), trunc)?[0])
}

/// [`eigen_residual`] at several points, building the operators once.
pub fn eigen_residuals(
    lambda: QuantizationParam,
    points: &[Mat2C],
    trunc: Truncation,
) -> Result<Vec<[[f64; 2]; 2]>> {
    let ladders = LadderSet::new(lambda, trunc);
    let factory = CoherentFactory::new(lambda, trunc);
    points
        .iter()
        .map(|z| {
            let coherent = factory.coherent(z)?;
            let v = &coherent.amplitudes;
            let norm = vector_norm(v);
            let mut out = [[0.0; 2]; 2];
            for ((k, l), a, _) in ladders.pairs() {
                let av = a.apply(v)?;
                let zkl = z[(k - 1, l - 1)];
                let diff: Vec<Complex64> = av.iter().zip(v).map(|(x, y)| x - zkl * y).collect();
                out[k - 1][l - 1] = vector_norm(&diff) / norm;
            }
            Ok(out)
        })
        .collect()
}

/// Closed-form diagonal value of `[a11†, a11]` at `idx`.
pub fn comm_a11_diag_closed(lambda: QuantizationParam, idx: &BasisIndex) -> f64 {
    let lam = lambda.as_f64();
    let (j, j1, j2, m) = (idx.j(), idx.j1(), idx.j2(), idx.m() as f64);
    let top = m + 2.0 * j + lam;
    let num = (lam - 2.0)
        * ((j1 + j2) * top - top * (m + lam - 2.0) - (j + j1 + 1.0) * (j + j2 + 1.0));
    num / ((top - 1.0) * top * (m + lam - 2.0) * (m + lam - 1.0))
}

/// Closed-form diagonal value of the trace defect `:Tr(E - A†A):` at `idx`.
pub fn trace_defect_diag_closed(lambda: QuantizationParam, idx: &BasisIndex) -> f64 {
    let lam = lambda.as_f64();
    let (j, m) = (idx.j(), idx.m() as f64);
    2.0 * (lam - 2.0) * (m + j + lam - 1.0) / ((m + lam - 1.0) * (m + 2.0 * j + lam))
}

/// Operator ordering for the trace defect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// `2 - Σ a_kl† a_kl`.
    Normal,
    /// `2 - Σ a_kl a_kl†`.
    AntiNormal,
}

/// Trace defect `2 - Σ (products of a_kl and a_kl†)` in the given ordering.
pub fn trace_defect_matrix(
    lambda: QuantizationParam,
    trunc: Truncation,
    ordering: Ordering,
) -> Result<SparseOperator> {
    let ladders = LadderSet::new(lambda, trunc);
    let mut acc = SparseOperator::scalar(lambda, trunc, Complex64::new(2.0, 0.0));
    for (_, a, ad) in ladders.pairs() {
        let product = match ordering {
            Ordering::Normal => ad.mul(a)?,
            Ordering::AntiNormal => a.mul(ad)?,
        };
        acc = acc.sub(&product)?;
    }
    Ok(acc)
}

/// Approximate-spectrum points `(λ-2)/(m+λ-1)` for `m = 0..=m_max`, followed
/// by the limit point `0`.
pub fn sigma_a(lambda: QuantizationParam, m_max: u32) -> Vec<f64> {
    let lam = lambda.as_f64();
    (0..=m_max)
        .map(|m| (lam - 2.0) / (m as f64 + lam - 1.0))
        .chain(std::iter::once(0.0))
        .collect()
}

/// How the matrix of creation operators enters `Δ(·)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arrangement {
    /// `z_kl ↦ a_kl†`.
    SameIndex,
    /// `z_kl ↦ a_lk†`, the transposed placement.
    Transposed,
}

/// `Δ^{jm}_{j1j2}` evaluated on creation operators and applied to the vacuum.
///
/// Monomials are applied in the fixed order `z11, z12, z21, z22` (rightmost
/// first); the creation operators commute on the truncated space as long as
/// no intermediate state leaves it.
pub fn basis_from_vacuum(
    lambda: QuantizationParam,
    idx: &BasisIndex,
    trunc: Truncation,
    arrangement: Arrangement,
) -> Result<Vec<Complex64>> {
    if idx.degree() > trunc.max_degree {
        return Err(Error::TruncationTooSmall {
            degree: idx.degree(),
            max_degree: trunc.max_degree,
        });
    }
    let ladders = LadderSet::new(lambda, trunc);
    let slot = |k: usize, l: usize| match arrangement {
        Arrangement::SameIndex => (k, l),
        Arrangement::Transposed => (l, k),
    };
    let creators: [&SparseOperator; 4] = [
        ladders.creator(slot(1, 1).0, slot(1, 1).1)?,
        ladders.creator(slot(1, 2).0, slot(1, 2).1)?,
        ladders.creator(slot(2, 1).0, slot(2, 1).1)?,
        ladders.creator(slot(2, 2).0, slot(2, 2).1)?,
    ];

    let mut out = vec![Complex64::new(0.0, 0.0); trunc.dimension()];
    for (exps, coeff) in crate::coherent_states::delta_monomials(lambda, idx) {
        let mut v = vec![Complex64::new(0.0, 0.0); trunc.dimension()];
        v[0] = Complex64::new(1.0, 0.0);
        for (op, &e) in creators.iter().zip(&exps).rev() {
            for _ in 0..e {
                v = op.apply(&v)?;
            }
        }
        for (o, x) in out.iter_mut().zip(&v) {
            *o += x * coeff;
        }
    }
    Ok(out)
}

/// Kernel-level form of the covariance of the coordinate matrix under the
/// group: returns the relative mismatch between
/// `conj(det(CV+D)^{-λ}) det(CZ+D)^{-λ} σ_g(Z)_kl K(σ_g V, σ_g Z)` and
/// `σ_g(Z)_kl K(V, Z)`, with `g = [[A,B],[C,D]]` in the ball convention.
pub fn weak_intertwining_residual(
    lambda: QuantizationParam,
    g: &GroupElement,
    z: &Mat2C,
    v: &Mat2C,
    k: usize,
    l: usize,
) -> Result<f64> {
    check_kl(k, l)?;
    if g.convention() != crate::conformal_geometry::EtaConvention::Diagonal {
        return Err(Error::ConventionMismatch("weak intertwining needs the ball chart"));
    }
    let (_, _, c, d) = g.blocks();
    let power = -(lambda.get() as i32);
    let jz = (c * z + d).determinant().powi(power);
    let jv = (c * v + d).determinant().powi(power);
    let gz = mobius(g, z)?;
    let gv = mobius(g, v)?;
    let coord = gz[(k - 1, l - 1)];
    let lhs = jv.conj() * jz * coord * crate::coherent_states::kernel_closed(lambda, &gv, &gz)?;
    let rhs = coord * crate::coherent_states::kernel_closed(lambda, v, z)?;
    Ok((lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(l: i64) -> QuantizationParam {
        QuantizationParam::new(l).unwrap()
    }

    fn idx(two_j: u32, m: u32, a: i32, b: i32) -> BasisIndex {
        BasisIndex::new(two_j, m, a, b).unwrap()
    }

    #[test]
    fn vacuum_is_annihilated() {
        let trunc = Truncation::new(3);
        for k in 1..=2 {
            for l in 1..=2 {
                let a = annihilation(lam(5), k, l, trunc).unwrap();
                assert!(a.iter().all(|(_, c, _)| c != 0));
            }
        }
    }

    #[test]
    fn documented_matrix_elements() {
        let trunc = Truncation::new(3);
        let basis = Basis::enumerate(trunc);
        let a = annihilation(lam(5), 1, 1, trunc).unwrap();
        let pos = |i: BasisIndex| basis.index_lookup(&i).unwrap();
        let half = a.get(0, pos(idx(1, 0, 1, 1)));
        assert!((half.re - 5f64.powf(-0.5)).abs() < 1e-15);
        let from_m1 = a.get(pos(idx(1, 0, -1, -1)), pos(idx(0, 1, 0, 0)));
        assert!((from_m1.re - (1.0 / (2.0 * 4.0f64)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn adjoint_round_trip() {
        let a = annihilation(lam(6), 1, 2, Truncation::new(4)).unwrap();
        assert_eq!(a.adjoint().adjoint(), a);
        assert_eq!(a.commutator(&a).unwrap().nnz(), 0);
    }

    #[test]
    fn mismatched_truncations_are_rejected() {
        let a = annihilation(lam(5), 1, 1, Truncation::new(2)).unwrap();
        let b = annihilation(lam(5), 1, 1, Truncation::new(3)).unwrap();
        assert_eq!(a.mul(&b), Err(Error::TruncationMismatch));
        assert_eq!(a.apply(&[Complex64::new(1.0, 0.0)]), Err(Error::TruncationMismatch));
    }

    #[test]
    fn invalid_ladder_index() {
        assert!(matches!(
            annihilation(lam(5), 0, 1, Truncation::new(1)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn commutator_vacuum_value() {
        let l = lam(5);
        assert!((comm_a11_diag_closed(l, &BasisIndex::vacuum()) + 0.2).abs() < 1e-15);
        let ladders = LadderSet::new(l, Truncation::new(3));
        let a = ladders.annihilator(1, 1).unwrap();
        let c = ladders.creator(1, 1).unwrap().commutator(a).unwrap();
        assert!((c.get(0, 0).re + 0.2).abs() < 1e-15);
    }

    #[test]
    fn trace_defect_at_vacuum() {
        let l = lam(5);
        let trunc = Truncation::new(2);
        assert!((trace_defect_diag_closed(l, &BasisIndex::vacuum()) - 1.2).abs() < 1e-15);
        let anti = trace_defect_matrix(l, trunc, Ordering::AntiNormal).unwrap();
        assert!((anti.get(0, 0).re - 1.2).abs() < 1e-15);
        let normal = trace_defect_matrix(l, trunc, Ordering::Normal).unwrap();
        assert_eq!(normal.get(0, 0).re, 2.0);
    }

    #[test]
    fn sigma_a_values() {
        let s = sigma_a(lam(4), 3);
        assert_eq!(s.len(), 5);
        assert!((s[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(*s.last().unwrap(), 0.0);
    }

    #[test]
    fn eigen_residual_at_origin_is_zero() {
        let r = eigen_residual(lam(5), &Mat2C::zeros(), Truncation::new(4)).unwrap();
        assert!(r.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn single_creation_from_vacuum() {
        let l = lam(5);
        let trunc = Truncation::new(3);
        let target = idx(1, 0, 1, 1);
        let v = basis_from_vacuum(l, &target, trunc, Arrangement::SameIndex).unwrap();
        let pos = Basis::enumerate(trunc).index_lookup(&target).unwrap();
        for (k, x) in v.iter().enumerate() {
            let expected = if k == pos { 1.0 } else { 0.0 };
            assert!((x - expected).norm() < 1e-14);
        }
        assert!(matches!(
            basis_from_vacuum(l, &idx(4, 0, 0, 0), trunc, Arrangement::SameIndex),
            Err(Error::TruncationTooSmall { .. })
        ));
    }
}
