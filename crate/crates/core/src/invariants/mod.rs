//! Coupling matrices: modular invariance and statistics symmetry checks, and
//! exhaustive enumeration of modular invariants.

mod checks;
mod document;
mod enumerate;
mod support;

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::IMatrix;

pub use checks::{
    check_modular_invariance, check_nondegenerate_symmetry, check_statistics_symmetry,
    check_x_intertwining, IntertwiningVerdict, ModularInvarianceVerdict,
    NondegenerateSymmetryVerdict, StatisticsSymmetryVerdict,
};
pub use document::{load_coupling_matrix, CouplingMatrixDocument, Labeling, MatrixEntry};
pub use enumerate::{
    enumerate_invariants, EntryBound, EnumeratedInvariant, EnumerationConstraints,
    EnumerationResult, SUSPECT_FACTOR,
};
pub use support::{t_compatible_support, TMatching, TSupport};

/// Nonnegative integer coupling matrix with `Z[0][0] = 1`; rows index left
/// sectors, columns right sectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CouplingMatrix {
    z: IMatrix,
    left_labels: Vec<String>,
    right_labels: Vec<String>,
}

impl CouplingMatrix {
    pub fn new(z: IMatrix, left_labels: Vec<String>, right_labels: Vec<String>) -> Result<Self> {
        if z.nrows() != left_labels.len() || z.ncols() != right_labels.len() {
            return Err(Error::dims(
                "coupling matrix",
                format!("{}x{}", left_labels.len(), right_labels.len()),
                format!("{}x{}", z.nrows(), z.ncols()),
            ));
        }
        if z.nrows() == 0 || z.ncols() == 0 || z[(0, 0)] != 1 {
            return Err(Error::validation("Z[0][0] = 1", 1.0));
        }
        Ok(CouplingMatrix {
            z,
            left_labels,
            right_labels,
        })
    }

    /// Square matrix over one label set, from rows.
    pub fn from_rows(rows: &[Vec<u32>], labels: Vec<String>) -> Result<Self> {
        let z = crate::linalg::rows_to_matrix(rows, |&v| v)
            .ok_or_else(|| Error::Parse("coupling matrix is not rectangular".into()))?;
        Self::new(z, labels.clone(), labels)
    }

    pub fn identity(labels: Vec<String>) -> Self {
        let n = labels.len();
        Self::new(IMatrix::identity(n, n), labels.clone(), labels).expect("identity is valid")
    }

    pub fn matrix(&self) -> &IMatrix {
        &self.z
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.z[(i, j)]
    }

    pub fn nrows(&self) -> usize {
        self.z.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.z.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.z.nrows() == self.z.ncols()
    }

    pub fn left_labels(&self) -> &[String] {
        &self.left_labels
    }

    pub fn right_labels(&self) -> &[String] {
        &self.right_labels
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        crate::linalg::int_matrix_to_rows(&self.z)
    }

    /// Entries in row-major order, vacuum row first.
    pub fn row_major(&self) -> Vec<u32> {
        (0..self.nrows())
            .flat_map(|i| (0..self.ncols()).map(move |j| self.z[(i, j)]))
            .collect()
    }

    /// Canonical order: vacuum-row lexicographic over the row-major entries.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.z
            .shape()
            .cmp(&other.z.shape())
            .then_with(|| self.row_major().cmp(&other.row_major()))
    }

    /// `Z P` for a permutation `P` of the right sectors (column `j` moves to `perm[j]`).
    pub fn permute_right(&self, perm: &[usize]) -> Self {
        let mut z = IMatrix::zeros(self.nrows(), self.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                z[(i, perm[j])] = self.z[(i, j)];
            }
        }
        CouplingMatrix {
            z,
            left_labels: self.left_labels.clone(),
            right_labels: self.right_labels.clone(),
        }
    }

    /// `P Z` for a permutation `P` of the left sectors.
    pub fn permute_left(&self, perm: &[usize]) -> Self {
        let mut z = IMatrix::zeros(self.nrows(), self.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                z[(perm[i], j)] = self.z[(i, j)];
            }
        }
        CouplingMatrix {
            z,
            left_labels: self.left_labels.clone(),
            right_labels: self.right_labels.clone(),
        }
    }
}
