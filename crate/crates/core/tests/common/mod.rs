//! Reference data computed without the library: closed-form SU(2)_k modular
//! data, a brute-force enumerator of coupling matrices, and explicit ADE
//! matrices.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

pub const EPS: f64 = 1e-9;

pub type Rows = Vec<Vec<u32>>;

pub fn s_entry(k: usize, a: usize, b: usize) -> f64 {
    let h = (k + 2) as f64;
    (2.0 / h).sqrt() * (PI * ((a + 1) * (b + 1)) as f64 / h).sin()
}

pub fn weight(k: usize, a: usize) -> f64 {
    (a * (a + 2)) as f64 / (4.0 * (k + 2) as f64)
}

pub fn central_charge(k: usize) -> f64 {
    3.0 * k as f64 / (k + 2) as f64
}

pub fn t_entry(k: usize, a: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (weight(k, a) - central_charge(k) / 24.0))
}

pub fn dim(k: usize, a: usize) -> f64 {
    s_entry(k, 0, a) / s_entry(k, 0, 0)
}

/// Nested loops over the positions with `h_i - h_j` integral, with the
/// dimension sum `sum Z_ij d_i d_j = w` as the only pruning rule; every
/// complete assignment is tested against `SZ = ZS` entry by entry.
pub fn brute_force_invariants(k: usize) -> Vec<Rows> {
    let n = k + 1;
    let w: f64 = (0..n).map(|a| dim(k, a).powi(2)).sum();
    let slack = w.sqrt() * EPS;
    let mut positions: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let diff = weight(k, i) - weight(k, j);
            if (i, j) != (0, 0) && (diff - diff.round()).abs() < 1e-12 {
                positions.push((i, j));
            }
        }
    }
    positions.sort_by(|&(a, b), &(c, d)| {
        (dim(k, c) * dim(k, d))
            .partial_cmp(&(dim(k, a) * dim(k, b)))
            .unwrap()
            .then((a, b).cmp(&(c, d)))
    });
    let weights: Vec<f64> = positions.iter().map(|&(i, j)| dim(k, i) * dim(k, j)).collect();
    let mut z = vec![vec![0u32; n]; n];
    z[0][0] = 1;
    let mut out = Vec::new();
    descend(k, &positions, &weights, 0, 1.0, w, slack, &mut z, &mut out);
    out.sort();
    out.dedup();
    out
}

#[allow(clippy::too_many_arguments)]
fn descend(
    k: usize,
    positions: &[(usize, usize)],
    weights: &[f64],
    at: usize,
    sum: f64,
    w: f64,
    slack: f64,
    z: &mut Rows,
    out: &mut Vec<Rows>,
) {
    if at == positions.len() {
        if (sum - w).abs() <= slack && commutes_with_s(k, z) {
            out.push(z.clone());
        }
        return;
    }
    let (i, j) = positions[at];
    let mut value = 0u32;
    while sum + f64::from(value) * weights[at] <= w + slack {
        z[i][j] = value;
        descend(k, positions, weights, at + 1, sum + f64::from(value) * weights[at], w, slack, z, out);
        value += 1;
    }
    z[i][j] = 0;
}

fn commutes_with_s(k: usize, z: &Rows) -> bool {
    let n = k + 1;
    for a in 0..n {
        for b in 0..n {
            let left: f64 = (0..n).map(|c| s_entry(k, a, c) * f64::from(z[c][b])).sum();
            let right: f64 = (0..n).map(|c| f64::from(z[a][c]) * s_entry(k, c, b)).sum();
            if (left - right).abs() > EPS {
                return false;
            }
        }
    }
    true
}

fn from_families(n: usize, families: &[&[usize]], extra: &[(usize, usize)]) -> Rows {
    let mut z = vec![vec![0u32; n]; n];
    for f in families {
        for &i in *f {
            for &j in *f {
                z[i][j] += 1;
            }
        }
    }
    for &(i, j) in extra {
        z[i][j] += 1;
    }
    z
}

pub fn a_series(k: usize) -> Rows {
    let n = k + 1;
    (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect()
}

/// `sum_{a even < k/2} |chi_a + chi_{k-a}|^2 + 2 |chi_{k/2}|^2`, k = 0 mod 4.
pub fn d_even(k: usize) -> Rows {
    assert_eq!(k % 4, 0);
    let mut z = vec![vec![0u32; k + 1]; k + 1];
    for a in (0..k / 2).step_by(2) {
        for i in [a, k - a] {
            for j in [a, k - a] {
                z[i][j] += 1;
            }
        }
    }
    z[k / 2][k / 2] = 2;
    z
}

/// Permutation fixing even weights and `k/2`, sending other odd `a` to `k - a`; k = 2 mod 4.
pub fn d_odd(k: usize) -> Rows {
    assert_eq!(k % 4, 2);
    let mut z = vec![vec![0u32; k + 1]; k + 1];
    for a in 0..=k {
        let b = if a % 2 == 0 || a == k / 2 { a } else { k - a };
        z[a][b] = 1;
    }
    z
}

pub fn e6() -> Rows {
    from_families(11, &[&[0, 6], &[3, 7], &[4, 10]], &[])
}

pub fn e7() -> Rows {
    from_families(17, &[&[0, 16], &[4, 12], &[6, 10], &[8]], &[(2, 8), (14, 8), (8, 2), (8, 14)])
}

/// Expected invariants at level `k`, sorted row-major, with their ADE names.
pub fn golden(k: usize) -> Vec<(Rows, String)> {
    let mut set = vec![(a_series(k), format!("A{}", k + 1))];
    if k % 4 == 0 {
        set.push((d_even(k), format!("D{}", k / 2 + 2)));
    } else if k % 4 == 2 && k > 2 {
        set.push((d_odd(k), format!("D{}", k / 2 + 2)));
    }
    if k == 10 {
        set.push((e6(), "E6".into()));
    }
    if k == 16 {
        set.push((e7(), "E7".into()));
    }
    set.sort();
    set
}

/// The level-10 conformal-embedding coupling `|chi_0 + chi_6|^2`.
pub fn conformal_embedding() -> Rows {
    from_families(11, &[&[0, 6]], &[])
}

pub fn is_normal(z: &Rows) -> bool {
    (0..z.len()).all(|j| z[0][j] == u32::from(j == 0)) && (0..z.len()).all(|i| z[i][0] == u32::from(i == 0))
}
