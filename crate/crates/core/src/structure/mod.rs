//! Internal structure of coupling matrices: normality, fusion-isomorphism
//! permutations, block factorization `Z = B_L^t Zmax B_R`, branching
//! intertwining and ADE naming.

mod ade;
mod blocks;
mod classify;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{CouplingMatrix, IntertwiningVerdict};
use crate::linalg::{max_abs_diff, to_complex, CMatrix, IMatrix};
use crate::modular_data::FusionRing;

pub use ade::{ade_name, coxeter_exponents, diagonal_exponents};
pub use blocks::{
    find_block_structure, BlockFactorization, BlockOutcome, BlockSearchLimits,
};
pub use classify::{classify, ClassificationContext, ClassificationReport, SolutionType, TypeTag};

pub(crate) fn serialize_imatrix<S: serde::Serializer>(m: &IMatrix, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&crate::linalg::int_matrix_to_rows(m), s)
}

/// Vacuum row and vacuum column of `Z` are unit vectors.
pub fn check_normality(z: &CouplingMatrix) -> bool {
    (0..z.ncols()).all(|j| z.get(0, j) == u32::from(j == 0))
        && (0..z.nrows()).all(|i| z.get(i, 0) == u32::from(i == 0))
}

/// The bijection read off a sub-permutation coupling matrix, and whether it
/// is an isomorphism of fusion rules between closed supports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationIsoVerdict {
    /// `(left sector, right sector)` pairs of the bijection.
    pub sigma: Vec<(usize, usize)>,
    pub left_closed: bool,
    pub right_closed: bool,
    pub pass: bool,
    /// First violation found, if any.
    pub violation: Option<String>,
}

/// Returns the bijection if `Z` is a 0/1 matrix with at most one 1 per row and column.
pub fn sub_permutation(z: &CouplingMatrix) -> Option<Vec<(usize, usize)>> {
    let mut sigma = Vec::new();
    let mut col_used = vec![false; z.ncols()];
    for i in 0..z.nrows() {
        let mut image = None;
        for j in 0..z.ncols() {
            match z.get(i, j) {
                0 => {}
                1 if image.is_none() && !col_used[j] => {
                    image = Some(j);
                    col_used[j] = true;
                }
                _ => return None,
            }
        }
        if let Some(j) = image {
            sigma.push((i, j));
        }
    }
    Some(sigma)
}

pub fn check_permutation_fusion_iso(
    z: &CouplingMatrix,
    fr_l: &FusionRing,
    fr_r: &FusionRing,
) -> Result<PermutationIsoVerdict> {
    if fr_l.rank() != z.nrows() || fr_r.rank() != z.ncols() {
        return Err(Error::dims(
            "coupling matrix vs fusion rings",
            format!("{}x{}", fr_l.rank(), fr_r.rank()),
            format!("{}x{}", z.nrows(), z.ncols()),
        ));
    }
    let sigma = sub_permutation(z)
        .ok_or_else(|| Error::Inapplicable("coupling matrix is not a sub-permutation matrix".into()))?;
    let left: Vec<usize> = sigma.iter().map(|p| p.0).collect();
    let mut right: Vec<usize> = sigma.iter().map(|p| p.1).collect();
    right.sort_unstable();
    let left_closed = fr_l.is_closed(&left);
    let right_closed = fr_r.is_closed(&right);

    let map = |i: usize| sigma.iter().find(|p| p.0 == i).map(|p| p.1);
    let mut violation = None;
    if !left_closed {
        violation = Some("left support is not closed under fusion and conjugation".to_string());
    } else if !right_closed {
        violation = Some("right support is not closed under fusion and conjugation".to_string());
    } else {
        'outer: for &(i, si) in &sigma {
            if map(fr_l.conj()[i]) != Some(fr_r.conj()[si]) {
                violation = Some(format!("conjugation not preserved at left sector {i}"));
                break;
            }
            for &(j, sj) in &sigma {
                for &(k, sk) in &sigma {
                    let (nl, nr) = (fr_l.get(i, j, k), fr_r.get(si, sj, sk));
                    if nl != nr {
                        violation = Some(format!(
                            "N_L[{i}][{j}][{k}] = {nl} but N_R[{si}][{sj}][{sk}] = {nr}"
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(PermutationIsoVerdict {
        pass: violation.is_none(),
        sigma,
        left_closed,
        right_closed,
        violation,
    })
}

/// Nonnegative integer branching matrix: rows are extended sectors, columns
/// base sectors; the extended vacuum restricts to a sum containing the base
/// vacuum exactly once, and no other extended sector contains it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchingMatrix {
    #[serde(serialize_with = "serialize_imatrix")]
    b: IMatrix,
}

impl BranchingMatrix {
    pub fn new(b: IMatrix) -> Result<Self> {
        if b.nrows() == 0 || b.ncols() == 0 {
            return Err(Error::validation("nonempty branching matrix", 1.0));
        }
        if b[(0, 0)] != 1 || (1..b.nrows()).any(|r| b[(r, 0)] != 0) {
            return Err(Error::validation("branching vacuum column B[I][0] = delta_I0", 1.0));
        }
        if (0..b.nrows()).any(|r| b.row(r).iter().all(|&v| v == 0)) {
            return Err(Error::validation("every branching row nonzero", 1.0));
        }
        Ok(BranchingMatrix { b })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self> {
        let b = crate::linalg::rows_to_matrix(rows, |&v| v)
            .ok_or_else(|| Error::Parse("branching matrix is not rectangular".into()))?;
        Self::new(b)
    }

    pub fn matrix(&self) -> &IMatrix {
        &self.b
    }

    pub fn nrows(&self) -> usize {
        self.b.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.b.ncols()
    }
}

/// Residual of `(1/lambda) B Y = Y_max B`.
pub fn check_branching_intertwining(
    b: &BranchingMatrix,
    y: &CMatrix,
    y_max: &CMatrix,
    lambda: f64,
    tol: f64,
) -> Result<IntertwiningVerdict> {
    let (m, n) = (b.nrows(), b.ncols());
    if y.shape() != (n, n) {
        return Err(Error::dims("Y", format!("{n}x{n}"), format!("{:?}", y.shape())));
    }
    if y_max.shape() != (m, m) {
        return Err(Error::dims("Y_max", format!("{m}x{m}"), format!("{:?}", y_max.shape())));
    }
    if !(lambda > 0.0) {
        return Err(Error::validation("positive lambda", lambda));
    }
    let bc = to_complex(b.matrix());
    let left = &bc * y / num_complex::Complex64::new(lambda, 0.0);
    let residual = max_abs_diff(&left, &(y_max * &bc));
    Ok(IntertwiningVerdict {
        residual,
        pass: residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOLERANCE;
    use crate::modular_data::{su2_modular_data, verlinde_fusion};
    use crate::statistics::{statistics_from_modular_data, SubSystem};

    const EPS: f64 = DEFAULT_TOLERANCE;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|a| format!("a={a}")).collect()
    }

    fn sparse(n: usize, entries: &[(usize, usize, u32)]) -> CouplingMatrix {
        let mut z = IMatrix::zeros(n, n);
        for &(i, j, v) in entries {
            z[(i, j)] = v;
        }
        CouplingMatrix::new(z, labels(n), labels(n)).unwrap()
    }

    #[test]
    fn normality() {
        assert!(check_normality(&CouplingMatrix::identity(labels(4))));
        let eq310 = sparse(11, &[(0, 0, 1), (0, 6, 1), (6, 0, 1), (6, 6, 1)]);
        assert!(!check_normality(&eq310));
        let d4 = sparse(5, &[(0, 0, 1), (0, 4, 1), (4, 0, 1), (4, 4, 1), (2, 2, 2)]);
        assert!(!check_normality(&d4));
    }

    #[test]
    fn identity_is_a_fusion_isomorphism() {
        let md = su2_modular_data(6).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        let v = check_permutation_fusion_iso(&CouplingMatrix::identity(labels(7)), &fr, &fr).unwrap();
        assert!(v.pass);
        assert_eq!(v.sigma.len(), 7);
    }

    #[test]
    fn d_odd_permutation_at_level_ten() {
        let md = su2_modular_data(10).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        let entries: Vec<_> = (0..=10)
            .map(|a| if a % 2 == 0 || a == 5 { (a, a, 1) } else { (a, 10 - a, 1) })
            .collect();
        let v = check_permutation_fusion_iso(&sparse(11, &entries), &fr, &fr).unwrap();
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn non_isomorphism_reports_a_triple() {
        let md = su2_modular_data(4).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        // 1 <-> 2 breaks N[1][1][2] = 1 vs N[2][2][1] = 0
        let z = sparse(5, &[(0, 0, 1), (1, 2, 1), (2, 1, 1), (3, 3, 1), (4, 4, 1)]);
        let v = check_permutation_fusion_iso(&z, &fr, &fr).unwrap();
        assert!(!v.pass);
        assert!(v.violation.unwrap().starts_with("N_L["));
    }

    #[test]
    fn non_closed_support_fails() {
        let md = su2_modular_data(10).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        let z = sparse(11, &[(0, 0, 1), (6, 6, 1)]);
        let v = check_permutation_fusion_iso(&z, &fr, &fr).unwrap();
        assert!(!v.pass && !v.left_closed);
    }

    #[test]
    fn non_permutation_is_inapplicable() {
        let md = su2_modular_data(4).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        let d4 = sparse(5, &[(0, 0, 1), (0, 4, 1), (4, 0, 1), (4, 4, 1), (2, 2, 2)]);
        assert!(matches!(
            check_permutation_fusion_iso(&d4, &fr, &fr),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn branching_matrix_validation() {
        assert!(BranchingMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).is_ok());
        assert!(BranchingMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).is_err());
        assert!(BranchingMatrix::from_rows(&[vec![1, 0], vec![0, 0]]).is_err());
        assert!(BranchingMatrix::from_rows(&[vec![2, 1]]).is_err());
    }

    #[test]
    fn trivial_extension_intertwines() {
        let md = su2_modular_data(5).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        let sd = statistics_from_modular_data(&md, &fr, &SubSystem::full(&fr)).unwrap();
        let b = BranchingMatrix::new(IMatrix::identity(6, 6)).unwrap();
        assert!(check_branching_intertwining(&b, &sd.y, &sd.y, 1.0, EPS).unwrap().pass);
    }

    #[test]
    fn conformal_embedding_vacuum_row_sums() {
        let md = su2_modular_data(10).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        let sd = statistics_from_modular_data(&md, &fr, &SubSystem::new([0, 6], &fr).unwrap()).unwrap();
        let lambda = 3.0 + 3f64.sqrt();
        let y_max = CMatrix::identity(1, 1);
        // truncated Y = [[1, d6], [d6, 1]]: both column sums equal 1 + d6 = lambda
        let b = BranchingMatrix::from_rows(&[vec![1, 1]]).unwrap();
        let v = check_branching_intertwining(&b, &sd.y, &y_max, lambda, EPS).unwrap();
        assert!(v.pass, "{v:?}");
        let b = BranchingMatrix::from_rows(&[vec![1, 0]]).unwrap();
        let v = check_branching_intertwining(&b, &sd.y, &y_max, lambda, EPS).unwrap();
        assert!(!v.pass);
        // |(1/lambda)[1, d6] - [1, 0]| = max(1 - 1/lambda, d6/lambda)
        let d6 = 2.0 + 3f64.sqrt();
        assert!((v.residual - d6 / lambda).abs() < 1e-12);
    }

    #[test]
    fn branching_shape_mismatch() {
        let b = BranchingMatrix::from_rows(&[vec![1, 1]]).unwrap();
        let y = CMatrix::identity(3, 3);
        assert!(check_branching_intertwining(&b, &y, &CMatrix::identity(1, 1), 1.0, EPS).is_err());
    }
}
