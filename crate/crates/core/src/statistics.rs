//! Statistics phases and dimensions, the matrices `X` and `Y` built from
//! fusion rules, their relations, and the statistics representation of SL(2,Z).

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{diagonal, max_abs_diff, permutation_matrix, residual, CMatrix, ComplexEntry, RelationReport};
use crate::modular_data::{FusionRing, ModularData};

/// Relative threshold on the smallest singular value of `Y` (scaled by `sqrt(w)`).
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

/// A set of sectors containing the vacuum, with its closure status.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubSystem {
    members: Vec<usize>,
    closed: bool,
}

impl SubSystem {
    pub fn new(members: impl IntoIterator<Item = usize>, fr: &FusionRing) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::InvalidSubsystem("empty subsystem".into()));
        }
        if members[0] != 0 {
            return Err(Error::InvalidSubsystem("subsystem must contain the vacuum 0".into()));
        }
        if let Some(&bad) = members.iter().find(|&&m| m >= fr.rank()) {
            return Err(Error::InvalidSubsystem(format!(
                "sector {bad} out of range for {} sectors",
                fr.rank()
            )));
        }
        let closed = fr.is_closed(&members);
        Ok(SubSystem { members, closed })
    }

    pub fn full(fr: &FusionRing) -> Self {
        SubSystem {
            members: (0..fr.rank()).collect(),
            closed: true,
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Statistics data over a subsystem; all vectors and matrices use local indices
/// (position within `members`).
#[derive(Clone, Debug, PartialEq)]
pub struct StatisticsData {
    pub members: Vec<usize>,
    pub closed: bool,
    pub kappa: Vec<Complex64>,
    pub dims: Vec<f64>,
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: Complex64,
    pub w: f64,
    pub degenerate: bool,
    pub smallest_singular_value: f64,
    /// Charge conjugation in local indices; absent when it does not preserve the subsystem.
    pub conj: Option<Vec<usize>>,
    pub central_charge: Option<f64>,
}

impl StatisticsData {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `kappa_i = exp(2 pi i h_i)`, `d_i = S_0i / S_00`.
pub fn statistics_from_modular_data(
    md: &ModularData,
    fr: &FusionRing,
    delta: &SubSystem,
) -> Result<StatisticsData> {
    if fr.rank() != md.rank() {
        return Err(Error::dims("fusion ring", md.rank(), fr.rank()));
    }
    let kappa: Vec<Complex64> = md
        .weights()
        .iter()
        .map(|&h| Complex64::from_polar(1.0, 2.0 * PI * h))
        .collect();
    statistics_from_parts(&kappa, &md.quantum_dimensions(), fr, delta, Some(md.central_charge()))
}

/// Assembles `X` and `Y` from phases, dimensions and fusion rules over the full
/// sector set, then truncates to `delta`.
pub fn statistics_from_parts(
    kappa: &[Complex64],
    dims: &[f64],
    fr: &FusionRing,
    delta: &SubSystem,
    central_charge: Option<f64>,
) -> Result<StatisticsData> {
    let n = fr.rank();
    if kappa.len() != n || dims.len() != n {
        return Err(Error::dims("kappa/d", n, format!("{}/{}", kappa.len(), dims.len())));
    }
    if delta.is_empty() || delta.members()[0] != 0 {
        return Err(Error::InvalidSubsystem("subsystem must contain the vacuum 0".into()));
    }
    if delta.members().iter().any(|&m| m >= n) {
        return Err(Error::InvalidSubsystem("sector out of range".into()));
    }
    let members = delta.members().to_vec();
    let m = members.len();

    let y = CMatrix::from_fn(m, m, |a, b| {
        let (i, j) = (members[a], members[b]);
        (0..n)
            .filter(|&k| fr.get(i, j, k) != 0)
            .map(|k| kappa[i] * kappa[j] / kappa[k] * (f64::from(fr.get(i, j, k)) * dims[k]))
            .sum()
    });
    let local_kappa: Vec<Complex64> = members.iter().map(|&i| kappa[i]).collect();
    let local_dims: Vec<f64> = members.iter().map(|&i| dims[i]).collect();
    let x = diagonal(&local_kappa);
    let z = local_kappa
        .iter()
        .zip(&local_dims)
        .map(|(k, d)| k * (d * d))
        .sum();
    let w: f64 = local_dims.iter().map(|d| d * d).sum();

    let smallest = y
        .clone()
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let degenerate = !(smallest > w.sqrt() * DEGENERACY_THRESHOLD);

    let position = |sector: usize| members.iter().position(|&s| s == sector);
    let conj = members
        .iter()
        .map(|&i| position(fr.conj()[i]))
        .collect::<Option<Vec<_>>>();

    Ok(StatisticsData {
        closed: fr.is_closed(&members),
        members,
        kappa: local_kappa,
        dims: local_dims,
        x,
        y,
        z,
        w,
        degenerate,
        smallest_singular_value: smallest,
        conj,
        central_charge,
    })
}

/// Residuals of `XYXYX = zY`, `CX = XC`, `CY = YC` and `CY = Y*` with `C`
/// restricted to the subsystem.
pub fn verify_statistics_relations(sd: &StatisticsData, tol: f64) -> Result<RelationReport> {
    let conj = sd.conj.as_ref().ok_or_else(|| {
        Error::Inapplicable("charge conjugation does not map the subsystem to itself".into())
    })?;
    let c = permutation_matrix(conj);
    let (x, y) = (&sd.x, &sd.y);
    let xyxyx = x * y * x * y * x;
    let cy = &c * y;
    Ok(RelationReport::new(
        tol,
        vec![
            residual("XYXYX = zY", max_abs_diff(&xyxyx, &(y * sd.z))),
            residual("CX = XC", max_abs_diff(&(&c * x), &(x * &c))),
            residual("CY = YC", max_abs_diff(&cy, &(y * &c))),
            residual("CY = Y*", max_abs_diff(&cy, &y.adjoint())),
        ],
    ))
}

/// Which cube root of `(z/|z|)^{-1}` was used for `T_stat`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeRootBranch {
    /// 0 is the principal root; `m` multiplies it by `exp(2 pi i m / 3)`.
    pub index: u8,
    pub phase: ComplexEntry,
    /// True when the branch was fixed by matching `exp(-2 pi i c / 24)`.
    pub matched_central_charge: bool,
    /// Distance from `exp(-2 pi i c / 24)` when a central charge is known.
    pub central_charge_mismatch: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatisticsRepresentation {
    pub s: CMatrix,
    pub t: CMatrix,
    pub branch: CubeRootBranch,
}

/// The three cube roots of `(z/|z|)^{-1}`, principal first.
pub fn inverse_cube_roots(z: Complex64) -> [Complex64; 3] {
    let principal = Complex64::from_polar(1.0, -z.arg() / 3.0);
    [0, 1, 2].map(|m| principal * Complex64::from_polar(1.0, 2.0 * PI * f64::from(m) / 3.0))
}

/// `S_stat = w^{-1/2} Y`, `T_stat = (z/|z|)^{-1/3} X`.
pub fn statistics_representation(sd: &StatisticsData, tol: f64) -> Result<StatisticsRepresentation> {
    if sd.degenerate {
        return Err(Error::Degenerate {
            smallest: sd.smallest_singular_value,
            threshold: sd.w.sqrt() * DEGENERACY_THRESHOLD,
        });
    }
    let roots = inverse_cube_roots(sd.z);
    let (index, matched, mismatch) = match sd.central_charge {
        Some(c) => {
            let target = Complex64::from_polar(1.0, -2.0 * PI * c / 24.0);
            let (best, dist) = roots
                .iter()
                .enumerate()
                .map(|(m, r)| (m, (r - target).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("three roots");
            let matched = dist <= tol.max(DEGENERACY_THRESHOLD);
            if matched {
                (best, true, Some(dist))
            } else {
                (0, false, Some(dist))
            }
        }
        None => (0, false, None),
    };
    let phase = roots[index];
    Ok(StatisticsRepresentation {
        s: &sd.y / Complex64::new(sd.w.sqrt(), 0.0),
        t: &sd.x * phase,
        branch: CubeRootBranch {
            index: index as u8,
            phase: phase.into(),
            matched_central_charge: matched,
            central_charge_mismatch: mismatch,
        },
    })
}

/// Statistics entered without modular data: phases, dimensions, fusion table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatisticsDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub kappa: Vec<ComplexEntry>,
    pub d: Vec<f64>,
    #[serde(rename = "N")]
    pub n: Vec<Vec<Vec<u32>>>,
}

/// Parsed statistics document.
#[derive(Clone, Debug, PartialEq)]
pub struct StatisticsInput {
    pub labels: Vec<String>,
    pub kappa: Vec<Complex64>,
    pub dims: Vec<f64>,
    pub fusion: FusionRing,
}

impl StatisticsDocument {
    pub fn into_input(self, tol: f64) -> Result<StatisticsInput> {
        let fusion = FusionRing::from_table(&self.n)?;
        let n = fusion.rank();
        if self.kappa.len() != n || self.d.len() != n {
            return Err(Error::dims("kappa/d", n, format!("{}/{}", self.kappa.len(), self.d.len())));
        }
        let kappa: Vec<Complex64> = self.kappa.into_iter().map(Complex64::from).collect();
        let modulus = kappa.iter().map(|k| (k.norm() - 1.0).abs()).fold(0.0, f64::max);
        if modulus > tol {
            return Err(Error::validation("unit-modulus kappa", modulus));
        }
        if (kappa[0] - 1.0).norm() > tol {
            return Err(Error::validation("kappa_0 = 1", (kappa[0] - 1.0).norm()));
        }
        if (self.d[0] - 1.0).abs() > tol {
            return Err(Error::validation("d_0 = 1", (self.d[0] - 1.0).abs()));
        }
        if let Some(small) = self.d.iter().find(|&&d| !(d >= 1.0 - tol)) {
            return Err(Error::validation("d_i >= 1", 1.0 - small));
        }
        let labels = match self.labels {
            Some(l) if l.len() != n => return Err(Error::dims("labels", n, l.len())),
            Some(l) => l,
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        Ok(StatisticsInput {
            labels,
            kappa,
            dims: self.d,
            fusion,
        })
    }
}

pub fn load_statistics(path: &Path, tol: f64) -> Result<StatisticsInput> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let doc: StatisticsDocument =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("statistics: {e}")))?;
    doc.into_input(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOLERANCE;
    use crate::modular_data::{su2_modular_data, verify_sl2z_relations, verlinde_fusion};

    const EPS: f64 = DEFAULT_TOLERANCE;

    fn su2(k: i64) -> (ModularData, FusionRing) {
        let md = su2_modular_data(k).unwrap();
        let fr = verlinde_fusion(&md, EPS).unwrap();
        (md, fr)
    }

    #[test]
    fn vacuum_only_system() {
        let (md, fr) = su2(5);
        let sd = statistics_from_modular_data(&md, &fr, &SubSystem::new([0], &fr).unwrap()).unwrap();
        assert_eq!(sd.len(), 1);
        assert!((sd.x[(0, 0)] - 1.0).norm() < 1e-15);
        assert!((sd.y[(0, 0)] - 1.0).norm() < 1e-15);
        assert!((sd.z - 1.0).norm() < 1e-15);
        assert_eq!(sd.w, 1.0);
        assert!(sd.closed);
        assert!(verify_statistics_relations(&sd, EPS).unwrap().pass);
        let rep = statistics_representation(&sd, EPS).unwrap();
        assert!((rep.s[(0, 0)] - 1.0).norm() < 1e-15);
        assert!((rep.t[(0, 0)] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn ising_statistics_by_hand() {
        let (md, fr) = su2(2);
        let sd = statistics_from_modular_data(&md, &fr, &SubSystem::full(&fr)).unwrap();
        let r2 = 2f64.sqrt();
        let kappa = [
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, PI * 3.0 / 8.0),
            Complex64::new(-1.0, 0.0),
        ];
        for (a, b) in sd.kappa.iter().zip(&kappa) {
            assert!((a - b).norm() < 1e-14);
        }
        for (a, b) in sd.dims.iter().zip(&[1.0, r2, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
        let expected = [[1.0, r2, 1.0], [r2, 0.0, -r2], [1.0, -r2, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (sd.y[(i, j)] - Complex64::new(expected[i][j], 0.0)).norm() < 1e-13,
                    "Y[{i}][{j}] = {}",
                    sd.y[(i, j)]
                );
            }
        }
        assert!((sd.z.norm_sqr() - 4.0).abs() < 1e-12);
        assert!((sd.w - 4.0).abs() < 1e-12);
        assert!(!sd.degenerate);
    }

    #[test]
    fn level_ten_pair_zero_six_is_not_closed() {
        let (md, fr) = su2(10);
        let delta = SubSystem::new([0, 6], &fr).unwrap();
        assert!(!delta.is_closed());
        let sd = statistics_from_modular_data(&md, &fr, &delta).unwrap();
        assert!(!sd.closed);
        for k in &sd.kappa {
            assert!((k - 1.0).norm() < 1e-12);
        }
        // truncation of the full Y
        let full = statistics_from_modular_data(&md, &fr, &SubSystem::full(&fr)).unwrap();
        assert!((sd.y[(1, 1)] - full.y[(6, 6)]).norm() < 1e-14);
        assert!((sd.y[(0, 1)] - full.y[(0, 6)]).norm() < 1e-14);
    }

    #[test]
    fn subsystem_errors() {
        let (_, fr) = su2(3);
        assert!(matches!(SubSystem::new([], &fr), Err(Error::InvalidSubsystem(_))));
        assert!(matches!(SubSystem::new([1, 2], &fr), Err(Error::InvalidSubsystem(_))));
        assert!(matches!(SubSystem::new([0, 9], &fr), Err(Error::InvalidSubsystem(_))));
    }

    #[test]
    fn corrupted_y_fails_braid_relation_only() {
        let (md, fr) = su2(4);
        let mut sd = statistics_from_modular_data(&md, &fr, &SubSystem::full(&fr)).unwrap();
        sd.y[(1, 1)] += Complex64::new(1e-3, 0.0);
        let report = verify_statistics_relations(&sd, EPS).unwrap();
        assert!(!report.pass);
        let failures: Vec<_> = report.failures().map(|r| r.relation.as_str()).collect();
        assert_eq!(failures, vec!["XYXYX = zY"]);
        let v = report.get("XYXYX = zY").unwrap();
        assert!((1e-4..1e-1).contains(&v), "residual {v}");
    }

    #[test]
    fn degenerate_representation_is_an_error() {
        let (md, fr) = su2(3);
        let mut sd = statistics_from_modular_data(&md, &fr, &SubSystem::full(&fr)).unwrap();
        sd.degenerate = true;
        assert!(matches!(
            statistics_representation(&sd, EPS),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn exactly_one_cube_root_matches_t_at_level_three() {
        let (md, fr) = su2(3);
        let sd = statistics_from_modular_data(&md, &fr, &SubSystem::full(&fr)).unwrap();
        let target = md.t()[(0, 0)];
        let matches = inverse_cube_roots(sd.z)
            .iter()
            .filter(|r| (*r - target).norm() < 1e-9)
            .count();
        assert_eq!(matches, 1);
        let rep = statistics_representation(&sd, EPS).unwrap();
        assert!(rep.branch.matched_central_charge);
        assert!(max_abs_diff(&rep.t, md.t()) < 1e-9);
        assert!(max_abs_diff(&rep.s, md.s()) < 1e-9);
        assert!(verify_sl2z_relations(&rep.s, &rep.t, EPS).unwrap().pass);
    }

    #[test]
    fn principal_branch_without_central_charge() {
        let (md, fr) = su2(3);
        let kappa: Vec<Complex64> = md
            .weights()
            .iter()
            .map(|&h| Complex64::from_polar(1.0, 2.0 * PI * h))
            .collect();
        let sd = statistics_from_parts(&kappa, &md.quantum_dimensions(), &fr, &SubSystem::full(&fr), None)
            .unwrap();
        let rep = statistics_representation(&sd, EPS).unwrap();
        assert_eq!(rep.branch.index, 0);
        assert!(!rep.branch.matched_central_charge);
    }

    #[test]
    fn statistics_document_checks() {
        let doc = StatisticsDocument {
            labels: None,
            kappa: vec![ComplexEntry { re: 1.0, im: 0.0 }, ComplexEntry { re: 0.0, im: 1.0 }],
            d: vec![1.0, 1.0],
            n: vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]],
        };
        let input = doc.clone().into_input(EPS).unwrap();
        assert_eq!(input.labels, vec!["0", "1"]);
        let sd = statistics_from_parts(&input.kappa, &input.dims, &input.fusion, &SubSystem::full(&input.fusion), None)
            .unwrap();
        // semion: z = 1 + i, |z|^2 = 2 = w
        assert!((sd.z.norm_sqr() - sd.w).abs() < 1e-12);
        assert!(verify_statistics_relations(&sd, EPS).unwrap().pass);

        let mut bad = doc;
        bad.d[1] = 0.5;
        assert!(bad.into_input(EPS).is_err());
    }
}
