//! Coxeter exponents of ADE diagrams and naming of SU(2)_k invariants by
//! their diagonal entries.

use crate::invariants::CouplingMatrix;

const E6: [u32; 6] = [1, 4, 5, 7, 8, 11];
const E7: [u32; 7] = [1, 5, 7, 9, 11, 13, 17];
const E8: [u32; 8] = [1, 7, 11, 13, 17, 19, 23, 29];

/// Sorted Coxeter exponents for a diagram name like `"A5"`, `"D4"`, `"E6"`.
pub fn coxeter_exponents(name: &str) -> Option<Vec<u32>> {
    let (series, rank) = name.split_at(1);
    let rank: u32 = rank.parse().ok()?;
    let mut exps = match (series, rank) {
        ("A", r) if r >= 1 => (1..=r).collect(),
        ("D", r) if r >= 3 => {
            let mut v: Vec<u32> = (0..r - 1).map(|m| 2 * m + 1).collect();
            v.push(r - 1);
            v
        }
        ("E", 6) => E6.to_vec(),
        ("E", 7) => E7.to_vec(),
        ("E", 8) => E8.to_vec(),
        _ => return None,
    };
    exps.sort_unstable();
    Some(exps)
}

/// Multiset `{i + 1}` with multiplicity `Z[i][i]`, sorted.
pub fn diagonal_exponents(z: &CouplingMatrix) -> Vec<u32> {
    (0..z.nrows().min(z.ncols()))
        .flat_map(|i| std::iter::repeat_n(i as u32 + 1, z.get(i, i) as usize))
        .collect()
}

/// Name of the ADE diagram with Coxeter number `k + 2` whose exponents equal
/// the diagonal multiset of `Z`. `A` is preferred when several match.
pub fn ade_name(z: &CouplingMatrix, level: u32) -> Option<String> {
    let diag = diagonal_exponents(z);
    let mut candidates = vec![format!("A{}", level + 1)];
    if level % 2 == 0 && level >= 2 {
        candidates.push(format!("D{}", level / 2 + 2));
    }
    match level {
        10 => candidates.push("E6".into()),
        16 => candidates.push("E7".into()),
        28 => candidates.push("E8".into()),
        _ => {}
    }
    candidates
        .into_iter()
        .find(|name| coxeter_exponents(name).as_deref() == Some(diag.as_slice()))
}
