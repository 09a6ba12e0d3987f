//! Orthonormal basis `|j m; j1 j2⟩` under a polynomial-degree cutoff.
//!
//! Half-integers are stored doubled so all index arithmetic stays integral.

use crate::{Error, Result};
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;

/// Basis label `(j, m, j1, j2)` stored as `(2j, m, 2j1, 2j2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisIndex {
    two_j: u32,
    m: u32,
    two_j1: i32,
    two_j2: i32,
}

impl BasisIndex {
    /// Validates `|j1|, |j2| ≤ j` and matching parity of `2j1`, `2j2` with `2j`.
    pub fn new(two_j: u32, m: u32, two_j1: i32, two_j2: i32) -> Result<Self> {
        if Self::is_valid(two_j as i64, m as i64, two_j1, two_j2) {
            Ok(Self {
                two_j,
                m,
                two_j1,
                two_j2,
            })
        } else {
            Err(Error::InvalidIndex {
                two_j,
                m,
                two_j1,
                two_j2,
            })
        }
    }

    /// Index validity on raw (possibly negative) components; used to discard
    /// out-of-range ladder targets.
    pub fn is_valid(two_j: i64, m: i64, two_j1: i32, two_j2: i32) -> bool {
        two_j >= 0
            && m >= 0
            && (two_j1.unsigned_abs() as i64) <= two_j
            && (two_j2.unsigned_abs() as i64) <= two_j
            && (two_j - two_j1 as i64).rem_euclid(2) == 0
            && (two_j - two_j2 as i64).rem_euclid(2) == 0
    }

    /// Raw constructor for callers that already checked validity.
    pub(crate) fn from_raw(two_j: i64, m: i64, two_j1: i32, two_j2: i32) -> Option<Self> {
        Self::is_valid(two_j, m, two_j1, two_j2).then_some(Self {
            two_j: two_j as u32,
            m: m as u32,
            two_j1,
            two_j2,
        })
    }

    /// The vacuum `|0 0; 0 0⟩`.
    pub fn vacuum() -> Self {
        Self {
            two_j: 0,
            m: 0,
            two_j1: 0,
            two_j2: 0,
        }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn two_j1(&self) -> i32 {
        self.two_j1
    }

    pub fn two_j2(&self) -> i32 {
        self.two_j2
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn j1(&self) -> f64 {
        self.two_j1 as f64 / 2.0
    }

    pub fn j2(&self) -> f64 {
        self.two_j2 as f64 / 2.0
    }

    /// Polynomial degree `2m + 2j` of the coefficient function.
    pub fn degree(&self) -> u32 {
        2 * self.m + self.two_j
    }

    /// Label with `j1` and `j2` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            two_j1: self.two_j2,
            two_j2: self.two_j1,
            ..*self
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|j={}, m={}; j1={}, j2={}>",
            self.j(),
            self.m,
            self.j1(),
            self.j2()
        )
    }
}

/// Degree cutoff `2m + 2j ≤ max_degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Truncation {
    pub max_degree: u32,
}

impl Truncation {
    pub fn new(max_degree: u32) -> Self {
        Self { max_degree }
    }

    /// Dimension of the truncated space, `C(max_degree + 4, 4)`.
    pub fn dimension(&self) -> usize {
        let d = self.max_degree as usize;
        (d + 1) * (d + 2) * (d + 3) * (d + 4) / 24
    }
}

/// Ordered enumeration of a truncated basis with reverse lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    trunc: Truncation,
    indices: Vec<BasisIndex>,
    positions: HashMap<BasisIndex, usize>,
}

impl Basis {
    /// All indices with `degree ≤ max_degree`, ordered by
    /// `(degree, 2j, m, 2j1, 2j2)`.
    pub fn enumerate(trunc: Truncation) -> Self {
        let mut indices = Vec::with_capacity(trunc.dimension());
        for degree in 0..=trunc.max_degree {
            for two_j in (degree % 2..=degree).step_by(2) {
                let m = (degree - two_j) / 2;
                let range = -(two_j as i32)..=two_j as i32;
                for two_j1 in range.clone().step_by(2) {
                    for two_j2 in range.clone().step_by(2) {
                        indices.push(BasisIndex {
                            two_j,
                            m,
                            two_j1,
                            two_j2,
                        });
                    }
                }
            }
        }
        let positions = indices.iter().enumerate().map(|(pos, idx)| (*idx, pos)).collect();
        Self {
            trunc,
            indices,
            positions,
        }
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn max_degree(&self) -> u32 {
        self.trunc.max_degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[BasisIndex] {
        &self.indices
    }

    pub fn get(&self, pos: usize) -> BasisIndex {
        self.indices[pos]
    }

    /// Position of `idx`, or `None` when it lies outside the truncation.
    pub fn index_lookup(&self, idx: &BasisIndex) -> Option<usize> {
        self.positions.get(idx).copied()
    }

    /// True iff every ladder image within `shift` degrees of `idx` stays in
    /// the truncation.
    pub fn is_interior(&self, idx: &BasisIndex, shift: u32) -> bool {
        idx.degree() + shift <= self.trunc.max_degree
    }

    /// Positions of all indices of the given degree (contiguous range).
    pub fn degree_range(&self, degree: u32) -> std::ops::Range<usize> {
        if degree > self.trunc.max_degree {
            return self.len()..self.len();
        }
        let start = Truncation::new(degree).dimension() - Self::shell_size(degree);
        start..start + Self::shell_size(degree)
    }

    /// Number of indices of exactly the given degree, `C(degree + 3, 3)`.
    pub fn shell_size(degree: u32) -> usize {
        let d = degree as usize;
        (d + 1) * (d + 2) * (d + 3) / 6
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_dimensions() {
        assert_eq!(Basis::enumerate(Truncation::new(0)).indices(), &[BasisIndex::vacuum()]);
        assert_eq!(Basis::enumerate(Truncation::new(1)).len(), 5);
        assert_eq!(Basis::enumerate(Truncation::new(2)).len(), 15);
        assert_eq!(Basis::enumerate(Truncation::new(8)).len(), 495);
    }

    #[test]
    fn lookup_inverts_enumeration() {
        let basis = Basis::enumerate(Truncation::new(6));
        for (pos, idx) in basis.indices().iter().enumerate() {
            assert_eq!(basis.index_lookup(idx), Some(pos));
        }
    }

    #[test]
    fn degree_ranges_are_contiguous() {
        let basis = Basis::enumerate(Truncation::new(6));
        for degree in 0..=6 {
            for pos in basis.degree_range(degree) {
                assert_eq!(basis.get(pos).degree(), degree);
            }
        }
        assert_eq!(basis.degree_range(7), basis.len()..basis.len());
    }

    #[test]
    fn degree_and_interior() {
        let idx = BasisIndex::new(1, 1, 1, -1).unwrap();
        assert_eq!(idx.degree(), 3);
        let basis = Basis::enumerate(Truncation::new(4));
        assert!(basis.is_interior(&BasisIndex::vacuum(), 1));
        let top = *basis.indices().last().unwrap();
        assert!(!basis.is_interior(&top, 1));
    }

    #[test]
    fn invalid_indices_rejected() {
        assert!(BasisIndex::new(1, 0, 0, 1).is_err());
        assert!(BasisIndex::new(2, 0, 4, 0).is_err());
        assert!(BasisIndex::new(2, 0, -2, 2).is_ok());
    }
}
