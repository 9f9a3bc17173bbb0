//! Search for block factorizations `Z = B_L^t Zmax B_R` with `Zmax` a
//! permutation between extended sectors.
//!
//! Equivalently `Z = sum_I u_I v_I^t` over pairs of nonnegative integer
//! "family" vectors. The matrix is split into connected components of its
//! bipartite support graph and each component is decomposed with the
//! smallest number of pairs. For square components whose row and column
//! sectors coincide, decompositions whose left and right families agree as
//! multisets are searched first, so that `Zmax` becomes a permutation of one
//! family list.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{serialize_imatrix, BranchingMatrix};
use crate::error::{Error, Result};
use crate::invariants::CouplingMatrix;
use crate::linalg::IMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSearchLimits {
    pub max_blocks_per_component: usize,
    pub max_multiplicity: u32,
    pub node_budget: u64,
}

impl Default for BlockSearchLimits {
    fn default() -> Self {
        BlockSearchLimits {
            max_blocks_per_component: 8,
            max_multiplicity: 2,
            node_budget: 2_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockFactorization {
    pub b_left: BranchingMatrix,
    #[serde(serialize_with = "serialize_imatrix")]
    pub zmax: IMatrix,
    pub b_right: BranchingMatrix,
    /// `sigma[I] = J` when `B_R = B_L` and `Zmax` is the permutation matrix of
    /// `sigma`; absent when left and right families cannot be identified.
    pub sigma: Option<Vec<usize>>,
}

impl BlockFactorization {
    pub fn block_count(&self) -> usize {
        self.b_left.nrows()
    }

    pub fn is_type_one(&self) -> bool {
        self.sigma
            .as_ref()
            .is_some_and(|s| s.iter().enumerate().all(|(i, &j)| i == j))
    }

    /// Sectors of each left family, in block order.
    pub fn left_families(&self) -> Vec<Vec<usize>> {
        families(self.b_left.matrix())
    }

    pub fn right_families(&self) -> Vec<Vec<usize>> {
        families(self.b_right.matrix())
    }

    /// `B_L^t Zmax B_R` in exact integer arithmetic.
    pub fn product(&self) -> IMatrix {
        self.b_left.matrix().transpose() * &self.zmax * self.b_right.matrix()
    }
}

fn families(b: &IMatrix) -> Vec<Vec<usize>> {
    (0..b.nrows())
        .map(|r| (0..b.ncols()).filter(|&c| b[(r, c)] > 0).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum BlockOutcome {
    Factored(BlockFactorization),
    /// Exhaustive search within the limits found nothing.
    NoFactorization,
    /// Node budget exhausted; nothing is claimed.
    Undecided { nodes: u64 },
}

impl BlockOutcome {
    pub fn factorization(&self) -> Option<&BlockFactorization> {
        match self {
            BlockOutcome::Factored(f) => Some(f),
            _ => None,
        }
    }
}

type Pair = (Vec<u32>, Vec<u32>);

enum Search {
    Found(Vec<Pair>),
    Exhausted,
    Budget,
}

struct ComponentSearch<'a> {
    limits: &'a BlockSearchLimits,
    nodes: &'a mut u64,
    matched: bool,
    /// Local (row, col) of the vacuum entry when this component holds it.
    vacuum: Option<(usize, usize)>,
}

impl ComponentSearch<'_> {
    fn run(&mut self, target: &IMatrix) -> Search {
        for blocks in 1..=self.limits.max_blocks_per_component {
            let mut pairs = Vec::new();
            match self.dfs(target.clone(), &mut pairs, blocks) {
                Search::Exhausted => continue,
                other => return other,
            }
        }
        Search::Exhausted
    }

    fn leaf_ok(&self, pairs: &[Pair]) -> bool {
        if !self.matched {
            return true;
        }
        let mut left: Vec<&Vec<u32>> = pairs.iter().map(|p| &p.0).collect();
        let mut right: Vec<&Vec<u32>> = pairs.iter().map(|p| &p.1).collect();
        left.sort();
        right.sort();
        left == right
    }

    fn dfs(&mut self, residual: IMatrix, pairs: &mut Vec<Pair>, blocks: usize) -> Search {
        let Some((i, j)) = first_nonzero(&residual) else {
            return if self.leaf_ok(pairs) {
                Search::Found(pairs.clone())
            } else {
                Search::Exhausted
            };
        };
        if pairs.len() == blocks {
            return Search::Exhausted;
        }
        let (nr, nc) = residual.shape();
        let max = self.limits.max_multiplicity;
        // u[r] * v[j] <= R[r][j] with v[j] >= 1
        let u_caps: Vec<u32> = (0..nr).map(|r| residual[(r, j)].min(max)).collect();
        for u in boxes(&u_caps, i) {
            let v_caps: Vec<u32> = (0..nc)
                .map(|c| {
                    (0..nr)
                        .filter(|&r| u[r] > 0)
                        .map(|r| residual[(r, c)] / u[r])
                        .min()
                        .unwrap_or(0)
                        .min(max)
                })
                .collect();
            if v_caps[j] == 0 {
                continue;
            }
            for v in boxes(&v_caps, j) {
                *self.nodes += 1;
                if *self.nodes > self.limits.node_budget {
                    return Search::Budget;
                }
                if let Some((vr, vc)) = self.vacuum {
                    let (a, b) = (u[vr], v[vc]);
                    if (a > 0) != (b > 0) || a > 1 || b > 1 {
                        continue;
                    }
                }
                let mut next = residual.clone();
                for r in 0..nr {
                    for c in 0..nc {
                        next[(r, c)] -= u[r] * v[c];
                    }
                }
                pairs.push((u.clone(), v));
                match self.dfs(next, pairs, blocks) {
                    Search::Exhausted => {}
                    other => return other,
                }
                pairs.pop();
            }
        }
        Search::Exhausted
    }
}

fn first_nonzero(m: &IMatrix) -> Option<(usize, usize)> {
    (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
        .find(|&(r, c)| m[(r, c)] > 0)
}

/// All vectors `x` with `0 <= x[t] <= caps[t]` and `x[required] >= 1`.
fn boxes(caps: &[u32], required: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(caps.len())];
    for (t, &cap) in caps.iter().enumerate() {
        let lo = u32::from(t == required);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=cap).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

/// Connected components of the bipartite support graph: (rows, cols), sorted.
fn components(z: &IMatrix) -> Vec<(Vec<usize>, Vec<usize>)> {
    let (nr, nc) = z.shape();
    let mut row_seen = vec![false; nr];
    let mut col_seen = vec![false; nc];
    let mut out = Vec::new();
    for start in 0..nr {
        if row_seen[start] || (0..nc).all(|c| z[(start, c)] == 0) {
            continue;
        }
        let (mut rows, mut cols) = (vec![start], Vec::new());
        row_seen[start] = true;
        let mut stack = vec![(true, start)];
        while let Some((is_row, x)) = stack.pop() {
            if is_row {
                for c in 0..nc {
                    if z[(x, c)] > 0 && !col_seen[c] {
                        col_seen[c] = true;
                        cols.push(c);
                        stack.push((false, c));
                    }
                }
            } else {
                for r in 0..nr {
                    if z[(r, x)] > 0 && !row_seen[r] {
                        row_seen[r] = true;
                        rows.push(r);
                        stack.push((true, r));
                    }
                }
            }
        }
        rows.sort_unstable();
        cols.sort_unstable();
        out.push((rows, cols));
    }
    out
}

/// Pairs `I -> J` with `u_J = v_I`, preferring fixed points.
fn match_families(pairs: &[Pair]) -> Option<Vec<usize>> {
    let m = pairs.len();
    let mut sigma = vec![usize::MAX; m];
    let mut by_left: BTreeMap<&Vec<u32>, Vec<usize>> = BTreeMap::new();
    for (idx, (u, _)) in pairs.iter().enumerate() {
        by_left.entry(u).or_default().push(idx);
    }
    let mut taken = vec![false; m];
    for (idx, (u, v)) in pairs.iter().enumerate() {
        if u == v {
            sigma[idx] = idx;
            taken[idx] = true;
        }
    }
    for (idx, (_, v)) in pairs.iter().enumerate() {
        if sigma[idx] != usize::MAX {
            continue;
        }
        let target = by_left.get(v)?.iter().copied().find(|&t| !taken[t])?;
        taken[target] = true;
        sigma[idx] = target;
    }
    Some(sigma)
}

/// Searches for `Z = B_L^t Zmax B_R` with `Zmax` a permutation between
/// extended sectors, minimal block count per component, vacuum block first.
pub fn find_block_structure(z: &CouplingMatrix, limits: &BlockSearchLimits) -> Result<BlockOutcome> {
    let zm = z.matrix();
    let (n_l, n_r) = zm.shape();
    let mut nodes = 0u64;
    let mut pairs: Vec<Pair> = Vec::new();

    for (rows, cols) in components(zm) {
        let local = IMatrix::from_fn(rows.len(), cols.len(), |r, c| zm[(rows[r], cols[c])]);
        let vacuum = (rows.first() == Some(&0)).then(|| {
            (0, cols.iter().position(|&c| c == 0).expect("Z[0][0] = 1 links row 0 and column 0"))
        });
        let symmetric = n_l == n_r && rows == cols;
        let mut found = None;
        for matched in [true, false] {
            if matched && !symmetric {
                continue;
            }
            let mut search = ComponentSearch {
                limits,
                nodes: &mut nodes,
                matched,
                vacuum,
            };
            match search.run(&local) {
                Search::Found(p) => {
                    found = Some(p);
                    break;
                }
                Search::Budget => return Ok(BlockOutcome::Undecided { nodes }),
                Search::Exhausted => {}
            }
        }
        let Some(local_pairs) = found else {
            return Ok(BlockOutcome::NoFactorization);
        };
        for (u, v) in local_pairs {
            let mut uf = vec![0u32; n_l];
            let mut vf = vec![0u32; n_r];
            for (r, &x) in u.iter().enumerate() {
                uf[rows[r]] = x;
            }
            for (c, &x) in v.iter().enumerate() {
                vf[cols[c]] = x;
            }
            pairs.push((uf, vf));
        }
    }

    let first_sector = |u: &Vec<u32>| u.iter().position(|&x| x > 0).unwrap_or(usize::MAX);
    pairs.sort_by(|a, b| {
        first_sector(&a.0)
            .cmp(&first_sector(&b.0))
            .then_with(|| a.0.cmp(&b.0))
            .then_with(|| a.1.cmp(&b.1))
    });
    let m = pairs.len();
    let b_left = IMatrix::from_fn(m, n_l, |r, c| pairs[r].0[c]);
    let sigma = if n_l == n_r { match_families(&pairs) } else { None };
    let (zmax, b_right) = match &sigma {
        Some(s) => (IMatrix::from_fn(m, m, |i, j| u32::from(s[i] == j)), b_left.clone()),
        None => (IMatrix::identity(m, m), IMatrix::from_fn(m, n_r, |r, c| pairs[r].1[c])),
    };
    let factorization = BlockFactorization {
        b_left: BranchingMatrix::new(b_left)?,
        zmax,
        b_right: BranchingMatrix::new(b_right)?,
        sigma,
    };
    if factorization.zmax[(0, 0)] != 1 || &factorization.product() != zm {
        return Err(Error::Consistency("block factorization does not reproduce Z".into()));
    }
    Ok(BlockOutcome::Factored(factorization))
}
