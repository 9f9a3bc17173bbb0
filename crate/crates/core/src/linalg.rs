//! Small helpers over dense complex and integer matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type CMatrix = DMatrix<Complex64>;
pub type IMatrix = DMatrix<u32>;

/// Global tolerance for matrix residuals and integer rounding.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entrywise deviation `max |a_ij - b_ij|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn to_complex(m: &IMatrix) -> CMatrix {
    m.map(|v| Complex64::new(f64::from(v), 0.0))
}

pub fn diagonal(entries: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

pub fn permutation_matrix(perm: &[usize]) -> CMatrix {
    let n = perm.len();
    CMatrix::from_fn(n, n, |i, j| {
        if perm[i] == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn is_diagonal(m: &CMatrix, tol: f64) -> (bool, f64) {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    (worst <= tol, worst)
}

/// Wire form of a complex number in the JSON documents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexEntry {
    fn from(z: Complex64) -> Self {
        ComplexEntry { re: z.re, im: z.im }
    }
}

impl From<ComplexEntry> for Complex64 {
    fn from(e: ComplexEntry) -> Self {
        Complex64::new(e.re, e.im)
    }
}

pub fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<ComplexEntry>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].into()).collect())
        .collect()
}

pub fn int_matrix_to_rows(m: &IMatrix) -> Vec<Vec<u32>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Builds a matrix from rows, requiring a rectangular shape.
pub fn rows_to_matrix<T, U>(rows: &[Vec<T>], convert: impl Fn(&T) -> U) -> Option<DMatrix<U>>
where
    U: nalgebra::Scalar,
{
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(DMatrix::from_fn(nrows, ncols, |i, j| convert(&rows[i][j])))
}

/// One named residual of a relation check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub relation: String,
    pub value: f64,
}

/// Collection of residuals; passes iff every residual is within `tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub tolerance: f64,
    pub residuals: Vec<Residual>,
    pub pass: bool,
}

impl RelationReport {
    pub fn new(tolerance: f64, residuals: Vec<Residual>) -> Self {
        // NaN residuals never pass.
        let pass = residuals.iter().all(|r| r.value <= tolerance);
        RelationReport {
            tolerance,
            residuals,
            pass,
        }
    }

    pub fn get(&self, relation: &str) -> Option<f64> {
        self.residuals
            .iter()
            .find(|r| r.relation == relation)
            .map(|r| r.value)
    }

    pub fn worst(&self) -> Option<&Residual> {
        self.residuals
            .iter()
            .max_by(|a, b| a.value.total_cmp(&b.value))
    }

    /// Relations whose residual exceeds the tolerance.
    pub fn failures(&self) -> impl Iterator<Item = &Residual> {
        self.residuals
            .iter()
            .filter(move |r| !(r.value <= self.tolerance))
    }
}

pub(crate) fn residual(relation: &str, value: f64) -> Residual {
    Residual {
        relation: relation.to_string(),
        value,
    }
}
