use serde::{Deserialize, Serialize};

use super::ModularData;
use crate::error::{Error, Result};

/// Nonnegative integer fusion coefficients `N[i][j][k]` with vacuum unit and conjugation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionRing {
    n: usize,
    coefficients: Vec<u32>,
    conj: Vec<usize>,
}

impl FusionRing {
    /// Builds a fusion ring from a dense `n x n x n` table and checks its axioms.
    pub fn from_table(table: &[Vec<Vec<u32>>]) -> Result<Self> {
        let n = table.len();
        let mut coefficients = Vec::with_capacity(n * n * n);
        for (i, plane) in table.iter().enumerate() {
            if plane.len() != n || plane.iter().any(|row| row.len() != n) {
                return Err(Error::dims(format!("N[{i}]"), format!("{n}x{n}"), "ragged"));
            }
            for row in plane {
                coefficients.extend_from_slice(row);
            }
        }
        Self::from_flat(n, coefficients)
    }

    fn from_flat(n: usize, coefficients: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("fusion ring needs at least one sector".into()));
        }
        let mut ring = FusionRing {
            n,
            coefficients,
            conj: Vec::new(),
        };
        ring.conj = ring.derive_conjugation()?;
        ring.check_axioms()?;
        Ok(ring)
    }

    fn derive_conjugation(&self) -> Result<Vec<usize>> {
        (0..self.n)
            .map(|i| {
                let partners: Vec<usize> = (0..self.n).filter(|&j| self.get(i, j, 0) != 0).collect();
                match partners.as_slice() {
                    [j] if self.get(i, *j, 0) == 1 => Ok(*j),
                    _ => Err(Error::validation(
                        format!("unique conjugate of sector {i} (N[i][j][0] = delta)"),
                        partners.len() as f64,
                    )),
                }
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        self.coefficients[(i * self.n + j) * self.n + k]
    }

    pub fn conj(&self) -> &[usize] {
        &self.conj
    }

    pub fn to_table(&self) -> Vec<Vec<Vec<u32>>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| (0..self.n).map(|k| self.get(i, j, k)).collect())
                    .collect()
            })
            .collect()
    }

    /// Checks unit, commutativity, associativity and the conjugation pairing exactly.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.n;
        for j in 0..n {
            for k in 0..n {
                if self.get(0, j, k) != u32::from(j == k) {
                    return Err(Error::validation("vacuum unit N[0][j][k] = delta_jk", 1.0));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, j, k) != self.get(j, i, k) {
                        return Err(Error::validation(
                            format!("commutativity at ({i},{j},{k})"),
                            1.0,
                        ));
                    }
                }
            }
        }
        for i in 0..n {
            if self.conj[self.conj[i]] != i {
                return Err(Error::validation("conjugation is an involution", 1.0));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let left: u64 = (0..n)
                            .map(|m| u64::from(self.get(i, j, m)) * u64::from(self.get(m, k, l)))
                            .sum();
                        let right: u64 = (0..n)
                            .map(|m| u64::from(self.get(j, k, m)) * u64::from(self.get(i, m, l)))
                            .sum();
                        if left != right {
                            return Err(Error::validation(
                                format!("associativity at ({i},{j},{k},{l})"),
                                left.abs_diff(right) as f64,
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether `members` contains the vacuum and is closed under fusion and conjugation.
    pub fn is_closed(&self, members: &[usize]) -> bool {
        let mut inside = vec![false; self.n];
        for &m in members {
            if m >= self.n {
                return false;
            }
            inside[m] = true;
        }
        if !inside[0] || members.iter().any(|&m| !inside[self.conj[m]]) {
            return false;
        }
        members.iter().all(|&i| {
            members
                .iter()
                .all(|&j| (0..self.n).all(|k| self.get(i, j, k) == 0 || inside[k]))
        })
    }
}

/// Fusion rules from the Verlinde formula
/// `N_ij^k = sum_m S_im S_jm conj(S_km) / S_0m`, rounded to integers.
pub fn verlinde_fusion(md: &ModularData, tol: f64) -> Result<FusionRing> {
    let n = md.rank();
    let s = md.s();
    let mut coefficients = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let value: num_complex::Complex64 = (0..n)
                    .map(|m| s[(i, m)] * s[(j, m)] * s[(k, m)].conj() / s[(0, m)])
                    .sum();
                let rounded = value.re.round();
                if (value - rounded).norm() > tol || rounded < 0.0 {
                    return Err(Error::NonIntegralFusion {
                        i,
                        j,
                        k,
                        value: value.re,
                    });
                }
                coefficients.push(rounded as u32);
            }
        }
    }
    FusionRing::from_flat(n, coefficients)
}
