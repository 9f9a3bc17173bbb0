use serde::{Deserialize, Serialize};

use crate::modular_data::ModularData;

/// How left and right `T` eigenvalues are matched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TMatching {
    /// `T_L[i][i] = T_R[j][j]` including the central-charge phase.
    #[default]
    Strict,
    /// `h_L[i] - h_R[j]` integral; ignores a central-charge phase mismatch.
    Relaxed,
}

/// Positions where a `T`-intertwining coupling matrix may be nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TSupport {
    pub pairs: Vec<(usize, usize)>,
    pub matching: TMatching,
    /// `(c_L - c_R)/24` modulo 1, in turns; zero when the central charges agree mod 24.
    pub phase_mismatch: f64,
}

impl TSupport {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.binary_search(&(i, j)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn distance_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

pub fn t_compatible_support(
    md_l: &ModularData,
    md_r: &ModularData,
    matching: TMatching,
    tol: f64,
) -> TSupport {
    let mut pairs = Vec::new();
    for i in 0..md_l.rank() {
        for j in 0..md_r.rank() {
            let ok = match matching {
                TMatching::Strict => (md_l.t()[(i, i)] - md_r.t()[(j, j)]).norm() <= tol,
                TMatching::Relaxed => {
                    distance_to_integer(md_l.weights()[i] - md_r.weights()[j]) <= tol
                }
            };
            if ok {
                pairs.push((i, j));
            }
        }
    }
    let mut phase_mismatch = ((md_l.central_charge() - md_r.central_charge()) / 24.0).rem_euclid(1.0);
    if phase_mismatch > 1.0 - tol || phase_mismatch < tol {
        phase_mismatch = 0.0;
    }
    TSupport {
        pairs,
        matching,
        phase_mismatch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOLERANCE;
    use crate::modular_data::su2_modular_data;

    const EPS: f64 = DEFAULT_TOLERANCE;

    #[test]
    fn level_four_support() {
        // h = 0, 1/8, 1/3, 5/8, 1
        let md = su2_modular_data(4).unwrap();
        let s = t_compatible_support(&md, &md, TMatching::Strict, EPS);
        assert_eq!(s.pairs, vec![(0, 0), (0, 4), (1, 1), (2, 2), (3, 3), (4, 0), (4, 4)]);
        assert_eq!(s.phase_mismatch, 0.0);
    }

    #[test]
    fn diagonal_always_supported() {
        for k in 1..=12 {
            let md = su2_modular_data(k).unwrap();
            for matching in [TMatching::Strict, TMatching::Relaxed] {
                let s = t_compatible_support(&md, &md, matching, EPS);
                assert!((0..md.rank()).all(|i| s.contains(i, i)));
            }
        }
    }

    #[test]
    fn heterotic_levels_one_and_two() {
        let l = su2_modular_data(1).unwrap();
        let r = su2_modular_data(2).unwrap();
        let relaxed = t_compatible_support(&l, &r, TMatching::Relaxed, EPS);
        assert_eq!(relaxed.pairs, vec![(0, 0)]);
        // c_L - c_R = -1/2, so the vacuum phases differ by 1/48 of a turn
        assert!((relaxed.phase_mismatch - (1.0 - 0.5 / 24.0)).abs() < 1e-12);
        let strict = t_compatible_support(&l, &r, TMatching::Strict, EPS);
        assert!(strict.is_empty());
    }
}
