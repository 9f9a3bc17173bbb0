//! Modular data of a rational chiral theory: sector labels, central charge,
//! conformal weights, the modular matrices `S`, `T` and charge conjugation.

mod format;
mod fusion;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    diagonal, is_diagonal, max_abs, max_abs_diff, permutation_matrix, residual, CMatrix,
    RelationReport, DEFAULT_TOLERANCE,
};

pub use format::{load_modular_data, parse_modular_data, ModularDataDocument};
pub use fusion::{verlinde_fusion, FusionRing};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SectorLabel {
    pub index: usize,
    pub name: String,
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Validated modular data. Index 0 is the vacuum.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularData {
    labels: Vec<SectorLabel>,
    central_charge: f64,
    weights: Vec<f64>,
    s: CMatrix,
    t: CMatrix,
    conjugation: Vec<usize>,
}

/// `exp(2 pi i (h - c/24))`.
pub fn t_phase(weight: f64, central_charge: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (weight - central_charge / 24.0))
}

impl ModularData {
    /// Builds and validates modular data. When `t` is absent it is derived from
    /// the weights and central charge.
    pub fn new(
        names: Vec<String>,
        central_charge: f64,
        weights: Vec<f64>,
        s: CMatrix,
        t: Option<CMatrix>,
        tol: f64,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Parse("modular data needs at least one sector".into()));
        }
        if weights.len() != n {
            return Err(Error::dims("weights", n, weights.len()));
        }
        if s.shape() != (n, n) {
            return Err(Error::dims("S", format!("{n}x{n}"), format!("{:?}", s.shape())));
        }
        let t = match t {
            Some(t) if t.shape() != (n, n) => {
                return Err(Error::dims("T", format!("{n}x{n}"), format!("{:?}", t.shape())))
            }
            Some(t) => t,
            None => {
                let phases: Vec<_> = weights.iter().map(|&h| t_phase(h, central_charge)).collect();
                diagonal(&phases)
            }
        };
        let labels = names
            .into_iter()
            .enumerate()
            .map(|(index, name)| SectorLabel { index, name })
            .collect();
        let mut md = ModularData {
            labels,
            central_charge,
            weights,
            s,
            t,
            conjugation: Vec::new(),
        };
        md.conjugation = md.validate(tol)?;
        Ok(md)
    }

    /// Checks every invariant and returns the charge conjugation permutation.
    fn validate(&self, tol: f64) -> Result<Vec<usize>> {
        let n = self.rank();
        let s = &self.s;

        if self.weights[0].abs() > tol {
            return Err(Error::validation("vacuum weight h[0] = 0", self.weights[0].abs()));
        }
        if !self.central_charge.is_finite() || self.weights.iter().any(|h| !h.is_finite()) {
            return Err(Error::validation("finite central charge and weights", f64::INFINITY));
        }

        let unit = CMatrix::identity(n, n);
        let unitarity = max_abs_diff(&(s * s.adjoint()), &unit);
        if !(unitarity <= tol) {
            return Err(Error::validation("S unitarity", unitarity));
        }
        let symmetry = max_abs_diff(s, &s.transpose());
        if !(symmetry <= tol) {
            return Err(Error::validation("S symmetry", symmetry));
        }
        for i in 0..n {
            let v = s[(0, i)];
            if v.im.abs() > tol || v.re <= tol {
                return Err(Error::validation(
                    "S vacuum row real and positive",
                    v.im.abs().max((-v.re).max(0.0)),
                ));
            }
        }

        let (diag, off) = is_diagonal(&self.t, tol);
        if !diag {
            return Err(Error::validation("T diagonal", off));
        }
        let mut phase_dev = 0.0f64;
        for i in 0..n {
            let expected = t_phase(self.weights[i], self.central_charge);
            phase_dev = phase_dev.max((self.t[(i, i)] - expected).norm());
        }
        if !(phase_dev <= tol) {
            return Err(Error::validation("T[i][i] = exp(2 pi i (h_i - c/24))", phase_dev));
        }

        let c = s * s;
        let conjugation = permutation_from_matrix(&c, tol)
            .ok_or_else(|| Error::validation("C = S^2 is a permutation", distance_to_01(&c)))?;
        let involution_dev = conjugation
            .iter()
            .enumerate()
            .filter(|&(i, &ci)| conjugation[ci] != i)
            .count();
        if involution_dev > 0 || conjugation[0] != 0 {
            return Err(Error::validation("C^2 = 1 and C[0][0] = 1", 1.0));
        }

        let ts = &self.t * s;
        let modular = max_abs_diff(&(&ts * &ts * &ts), &c);
        if !(modular <= tol) {
            return Err(Error::validation("(TS)^3 = S^2", modular));
        }
        Ok(conjugation)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[SectorLabel] {
        &self.labels
    }

    pub fn label_names(&self) -> Vec<String> {
        self.labels.iter().map(|l| l.name.clone()).collect()
    }

    pub fn central_charge(&self) -> f64 {
        self.central_charge
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }

    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    /// Charge conjugation as a permutation of sector indices.
    pub fn conjugation(&self) -> &[usize] {
        &self.conjugation
    }

    pub fn c_matrix(&self) -> CMatrix {
        permutation_matrix(&self.conjugation)
    }

    /// `d_i = S[0][i] / S[0][0]`.
    pub fn quantum_dimensions(&self) -> Vec<f64> {
        let s00 = self.s[(0, 0)].re;
        (0..self.rank()).map(|i| self.s[(0, i)].re / s00).collect()
    }

    /// `sum_i d_i^2 = 1 / S[0][0]^2`.
    pub fn global_index(&self) -> f64 {
        self.quantum_dimensions().iter().map(|d| d * d).sum()
    }

    /// Returns the SU(2) level if this data equals the built-in SU(2)_k data.
    pub fn su2_level(&self, tol: f64) -> Option<u32> {
        let k = u32::try_from(self.rank().checked_sub(1)?).ok()?;
        if k == 0 {
            return None;
        }
        let reference = su2_modular_data(i64::from(k)).ok()?;
        let same = (self.central_charge - reference.central_charge).abs() <= tol
            && max_abs_diff(&self.s, &reference.s) <= tol
            && max_abs_diff(&self.t, &reference.t) <= tol;
        same.then_some(k)
    }
}

fn permutation_from_matrix(m: &CMatrix, tol: f64) -> Option<Vec<usize>> {
    let n = m.nrows();
    let mut perm = Vec::with_capacity(n);
    for i in 0..n {
        let mut image = None;
        for j in 0..n {
            let v = m[(i, j)];
            if (v - Complex64::new(1.0, 0.0)).norm() <= tol {
                if image.is_some() {
                    return None;
                }
                image = Some(j);
            } else if v.norm() > tol {
                return None;
            }
        }
        perm.push(image?);
    }
    let mut seen = vec![false; n];
    for &j in &perm {
        if std::mem::replace(&mut seen[j], true) {
            return None;
        }
    }
    Some(perm)
}

fn distance_to_01(m: &CMatrix) -> f64 {
    m.iter()
        .map(|v| v.norm().min((v - Complex64::new(1.0, 0.0)).norm()))
        .fold(0.0, f64::max)
}

/// Kac-Peterson modular data of SU(2) at level `k`, sectors labelled by the
/// integrable weight `a = 0..k` (twice the spin).
pub fn su2_modular_data(k: i64) -> Result<ModularData> {
    if k < 1 {
        return Err(Error::InvalidLevel(k));
    }
    let n = (k + 1) as usize;
    let height = (k + 2) as f64;
    let norm = (2.0 / height).sqrt();
    let s = CMatrix::from_fn(n, n, |a, b| {
        let arg = PI * ((a + 1) * (b + 1)) as f64 / height;
        Complex64::new(norm * arg.sin(), 0.0)
    });
    let weights = (0..n)
        .map(|a| (a * (a + 2)) as f64 / (4.0 * height))
        .collect();
    let names = (0..n).map(|a| format!("a={a}")).collect();
    ModularData::new(names, 3.0 * k as f64 / height, weights, s, None, DEFAULT_TOLERANCE)
}

/// Residuals of the SL(2,Z) relations `TSTST = S`, `CT = TC`, `CS = S^-1`
/// and `C^2 = 1` with `C = S^2`.
pub fn verify_sl2z_relations(s: &CMatrix, t: &CMatrix, tol: f64) -> Result<RelationReport> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::dims("S", "square", format!("{:?}", s.shape())));
    }
    if t.shape() != (n, n) {
        return Err(Error::dims("T", format!("{n}x{n}"), format!("{:?}", t.shape())));
    }
    let c = s * s;
    let tst = t * s * t;
    let braid = max_abs_diff(&(&tst * s * t), s);
    let ct = max_abs_diff(&(&c * t), &(t * &c));
    let inverse = match s.clone().try_inverse() {
        Some(inv) => max_abs_diff(&(&c * s), &inv),
        None => f64::INFINITY,
    };
    let unit = CMatrix::identity(n, n);
    let involution = max_abs(&(&c * &c - unit));
    Ok(RelationReport::new(
        tol,
        vec![
            residual("TSTST = S", braid),
            residual("CT = TC", ct),
            residual("CS = S^-1", inverse),
            residual("C^2 = 1", involution),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = DEFAULT_TOLERANCE;

    #[test]
    fn su2_level_one_by_hand() {
        let md = su2_modular_data(1).unwrap();
        assert_eq!(md.rank(), 2);
        assert!((md.central_charge() - 1.0).abs() < 1e-15);
        assert_eq!(md.weights(), &[0.0, 0.25]);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [[r, r], [r, -r]];
        for a in 0..2 {
            for b in 0..2 {
                assert!((md.s()[(a, b)] - Complex64::new(expected[a][b], 0.0)).norm() < 1e-15);
            }
        }
        assert_eq!(md.conjugation(), &[0, 1]);
    }

    #[test]
    fn su2_level_two_by_hand() {
        let md = su2_modular_data(2).unwrap();
        assert_eq!(md.weights(), &[0.0, 3.0 / 16.0, 0.5]);
        let row0 = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (b, v) in row0.iter().enumerate() {
            assert!((md.s()[(0, b)].re - v).abs() < 1e-15);
        }
        assert_eq!(md.label_names(), vec!["a=0", "a=1", "a=2"]);
    }

    #[test]
    fn invalid_levels() {
        assert!(matches!(su2_modular_data(0), Err(Error::InvalidLevel(0))));
        assert!(matches!(su2_modular_data(-3), Err(Error::InvalidLevel(-3))));
    }

    #[test]
    fn su2_relations_hold_up_to_level_16() {
        for k in 1..=16 {
            let md = su2_modular_data(k).unwrap();
            let report = verify_sl2z_relations(md.s(), md.t(), EPS).unwrap();
            assert!(report.pass, "k={k}: {report:?}");
            assert!(md.conjugation().iter().enumerate().all(|(i, &c)| i == c));
            assert_eq!(md.su2_level(EPS), Some(k as u32));
        }
    }

    #[test]
    fn identity_pair_passes() {
        for n in 1..4 {
            let id = CMatrix::identity(n, n);
            assert!(verify_sl2z_relations(&id, &id, EPS).unwrap().pass);
        }
    }

    #[test]
    fn perturbed_s_fails_with_residual_of_perturbation_size() {
        let md = su2_modular_data(4).unwrap();
        let mut s = md.s().clone();
        s[(1, 2)] += Complex64::new(1e-3, 0.0);
        let report = verify_sl2z_relations(&s, md.t(), EPS).unwrap();
        assert!(!report.pass);
        let worst = report.worst().unwrap().value;
        assert!((1e-4..1e-2).contains(&worst), "worst residual {worst}");
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = CMatrix::identity(2, 2);
        let t = CMatrix::identity(3, 3);
        assert!(matches!(
            verify_sl2z_relations(&s, &t, EPS),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validation_names_the_failing_invariant() {
        let md = su2_modular_data(2).unwrap();
        let mut s = md.s().clone();
        s[(1, 1)] += Complex64::new(1e-4, 0.0);
        let err = ModularData::new(
            md.label_names(),
            md.central_charge(),
            md.weights().to_vec(),
            s,
            None,
            EPS,
        )
        .unwrap_err();
        match err {
            Error::Validation { invariant, residual } => {
                assert_eq!(invariant, "S unitarity");
                assert!(residual > 1e-5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quantum_dimensions_at_least_one() {
        for k in 1..=16 {
            let md = su2_modular_data(k).unwrap();
            let d = md.quantum_dimensions();
            assert!((d[0] - 1.0).abs() < 1e-15);
            assert!(d.iter().all(|&x| x >= 1.0 - 1e-12));
            let w: f64 = d.iter().map(|x| x * x).sum();
            assert!((w * md.s()[(0, 0)].re.powi(2) - 1.0).abs() < 1e-12);
        }
    }
}
