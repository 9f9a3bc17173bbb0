//! Exhaustive enumeration of coupling matrices intertwining `S` and `T`.
//!
//! The unknowns are the entries of `Z` on the `T`-compatible support. The
//! linear constraints `S_L Z = Z S_R` together with `Z[0][0] = 1` are reduced
//! to row echelon form, which expresses every pivot entry as an affine
//! function of a handful of free entries. The search then runs depth-first
//! over the free entries only (largest `d_L d_R` first), with per-entry
//! bounds from the dimension-sum identity
//! `sum_ij Z_ij d_L[i] d_R[j] = sqrt(w_L w_R)` and interval pruning that
//! discards partial assignments forcing some pivot entry negative or above
//! its bound.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering as AtomicOrdering};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::check_modular_invariance;
use super::support::{t_compatible_support, TMatching, TSupport};
use super::CouplingMatrix;
use crate::error::{Error, Result};
use crate::linalg::{IMatrix, DEFAULT_TOLERANCE};
use crate::modular_data::ModularData;

/// Solutions with S-residual in `(tol, SUSPECT_FACTOR * tol]` are reported as suspect.
pub const SUSPECT_FACTOR: f64 = 1e3;

/// Pivot values farther than this from an integer are rejected before the exact residual check.
const INTEGRALITY_TOLERANCE: f64 = 1e-6;

/// Relative pivot threshold in the elimination.
const PIVOT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "cap")]
pub enum EntryBound {
    /// `Z[i][j] <= floor((W + sqrt(W) tol) / (d_L[i] d_R[j]))`.
    DerivedFromIndex,
    Explicit(u32),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerationConstraints {
    pub entry_bound: EntryBound,
    pub max_solutions: Option<usize>,
    pub tolerance: f64,
    pub node_budget: u64,
    pub t_matching: TMatching,
    /// Worker threads; `None` uses the global rayon pool. Not part of the result.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl Default for EnumerationConstraints {
    fn default() -> Self {
        EnumerationConstraints {
            entry_bound: EntryBound::DerivedFromIndex,
            max_solutions: None,
            tolerance: DEFAULT_TOLERANCE,
            node_budget: 50_000_000,
            t_matching: TMatching::Strict,
            workers: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumeratedInvariant {
    pub matrix: CouplingMatrix,
    pub s_residual: f64,
    pub t_residual: f64,
    pub dimension_sum: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumerationResult {
    pub invariants: Vec<EnumeratedInvariant>,
    /// Integer candidates whose S-residual lies just above the tolerance.
    pub suspect: Vec<EnumeratedInvariant>,
    pub support: TSupport,
    /// Number of free entries after elimination.
    pub free_dimension: usize,
    /// `sqrt(w_L w_R)`.
    pub index: f64,
    pub max_entry_bound: u32,
    pub nodes: u64,
}

impl EnumerationResult {
    pub fn matrices(&self) -> Vec<CouplingMatrix> {
        self.invariants.iter().map(|inv| inv.matrix.clone()).collect()
    }
}

/// Row echelon data: each pivot column as `base + sum_t coeff[t] * free[t]`.
struct Reduced {
    pivots: Vec<(usize, f64, Vec<f64>)>,
    free: Vec<usize>,
    consistent: bool,
}

/// Gauss-Jordan elimination with partial pivoting on `[a | b]`.
/// `free_order` lists the free columns in the order their coefficients are returned.
fn reduce(mut a: DMatrix<f64>, mut b: Vec<f64>, tol: f64) -> Reduced {
    let (rows, cols) = a.shape();
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let threshold = tol * scale;
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, best_val) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty");
        if best_val <= threshold {
            for i in r..rows {
                a[(i, c)] = 0.0;
            }
            continue;
        }
        a.swap_rows(r, best);
        b.swap(r, best);
        let p = a[(r, c)];
        for j in 0..cols {
            a[(r, j)] /= p;
        }
        b[r] /= p;
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in 0..cols {
                        a[(i, j)] -= f * a[(r, j)];
                    }
                    b[i] -= f * b[r];
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let consistent = (r..rows).all(|i| b[i].abs() <= threshold.max(1e-9));
    let is_pivot = |c: &usize| pivot_cols.contains(c);
    let free: Vec<usize> = (0..cols).filter(|c| !is_pivot(c)).collect();
    let pivots = pivot_cols
        .iter()
        .enumerate()
        .map(|(row, &c)| {
            let coeffs = free.iter().map(|&f| -a[(row, f)]).collect();
            (c, b[row], coeffs)
        })
        .collect();
    Reduced {
        pivots,
        free,
        consistent,
    }
}

fn numerical_rank(a: &DMatrix<f64>, tol: f64) -> usize {
    let sv = a.clone().singular_values();
    let top = sv.iter().copied().fold(0.0f64, f64::max).max(1.0);
    sv.iter().filter(|&&s| s > tol * top).count()
}

struct Pivot {
    position: usize,
    base: f64,
    /// Coefficient per free entry, in search order.
    coeffs: Vec<f64>,
    /// Range of `sum_{t >= depth} coeff[t] * z_t` over the remaining box.
    suffix_lo: Vec<f64>,
    suffix_hi: Vec<f64>,
}

struct SearchSpace {
    /// Support positions of the free entries, in search order.
    free: Vec<usize>,
    free_bounds: Vec<u32>,
    free_weights: Vec<f64>,
    pivots: Vec<Pivot>,
    bounds: Vec<u32>,
    index: f64,
    sum_slack: f64,
}

struct Shared<'a> {
    nodes: AtomicU64,
    aborted: AtomicBool,
    budget: u64,
    space: &'a SearchSpace,
}

impl Shared<'_> {
    fn tick(&self) -> bool {
        let n = self.nodes.fetch_add(1, AtomicOrdering::Relaxed) + 1;
        if n > self.budget {
            self.aborted.store(true, AtomicOrdering::Relaxed);
        }
        !self.aborted.load(AtomicOrdering::Relaxed)
    }
}

/// Depth-first search below a fixed prefix; `values[p]` is the current partial
/// value of pivot `p`.
fn search(
    shared: &Shared<'_>,
    depth: usize,
    assignment: &mut Vec<u32>,
    values: &mut Vec<f64>,
    dim_sum: f64,
    out: &mut Vec<Vec<u32>>,
) {
    if !shared.tick() {
        return;
    }
    let space = shared.space;
    for (p, pivot) in space.pivots.iter().enumerate() {
        let hi = values[p] + pivot.suffix_hi[depth];
        let lo = values[p] + pivot.suffix_lo[depth];
        if hi < -INTEGRALITY_TOLERANCE || lo > f64::from(space.bounds[pivot.position]) + INTEGRALITY_TOLERANCE {
            return;
        }
    }
    if depth == space.free.len() {
        let mut full = vec![0u32; space.bounds.len()];
        for (t, &pos) in space.free.iter().enumerate() {
            full[pos] = assignment[t];
        }
        for (p, pivot) in space.pivots.iter().enumerate() {
            let v = values[p];
            let r = v.round();
            if (v - r).abs() > INTEGRALITY_TOLERANCE || r < 0.0 || r > f64::from(space.bounds[pivot.position]) {
                return;
            }
            full[pivot.position] = r as u32;
        }
        out.push(full);
        return;
    }
    let weight = space.free_weights[depth];
    for value in 0..=space.free_bounds[depth] {
        let sum = dim_sum + weight * f64::from(value);
        if sum > space.index + space.sum_slack {
            break;
        }
        assignment.push(value);
        for (p, pivot) in space.pivots.iter().enumerate() {
            values[p] += pivot.coeffs[depth] * f64::from(value);
        }
        search(shared, depth + 1, assignment, values, sum, out);
        for (p, pivot) in space.pivots.iter().enumerate() {
            values[p] -= pivot.coeffs[depth] * f64::from(value);
        }
        assignment.pop();
        if shared.aborted.load(AtomicOrdering::Relaxed) {
            return;
        }
    }
}

/// Enumerates every nonnegative integer `Z` with `Z[0][0] = 1`, supported on
/// the `T`-compatible positions, with `max|S_L Z - Z S_R| <= tol`. Sorted
/// canonically and duplicate-free.
pub fn enumerate_invariants(
    md_l: &ModularData,
    md_r: &ModularData,
    constraints: &EnumerationConstraints,
) -> Result<EnumerationResult> {
    if let Some(w) = constraints.workers {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Consistency(format!("thread pool: {e}")))?;
        return pool.install(|| enumerate_in_pool(md_l, md_r, constraints));
    }
    enumerate_in_pool(md_l, md_r, constraints)
}

fn enumerate_in_pool(
    md_l: &ModularData,
    md_r: &ModularData,
    constraints: &EnumerationConstraints,
) -> Result<EnumerationResult> {
    let tol = constraints.tolerance;
    let support = t_compatible_support(md_l, md_r, constraints.t_matching, tol);
    let d_l = md_l.quantum_dimensions();
    let d_r = md_r.quantum_dimensions();
    let index = (md_l.global_index() * md_r.global_index()).sqrt();
    let sum_slack = index.sqrt() * tol;

    let mut result = EnumerationResult {
        invariants: Vec::new(),
        suspect: Vec::new(),
        support: support.clone(),
        free_dimension: 0,
        index,
        max_entry_bound: 0,
        nodes: 0,
    };
    let Some(vacuum) = support.pairs.iter().position(|&p| p == (0, 0)) else {
        return Ok(result);
    };

    // Unknowns in increasing d_L d_R, so that the large-dimension entries end
    // up as free variables with small bounds.
    let weight_of = |&(i, j): &(usize, usize)| d_l[i] * d_r[j];
    let mut order: Vec<usize> = (0..support.len()).collect();
    order.sort_by(|&a, &b| {
        weight_of(&support.pairs[a])
            .total_cmp(&weight_of(&support.pairs[b]))
            .then(support.pairs[a].cmp(&support.pairs[b]))
    });
    let positions: Vec<(usize, usize)> = order.iter().map(|&o| support.pairs[o]).collect();
    let vacuum_col = order.iter().position(|&o| o == vacuum).expect("vacuum present");
    let weights: Vec<f64> = positions.iter().map(weight_of).collect();
    let bounds: Vec<u32> = positions
        .iter()
        .zip(&weights)
        .map(|(&pos, &w)| {
            if pos == (0, 0) {
                return 1;
            }
            match constraints.entry_bound {
                EntryBound::DerivedFromIndex => ((index + sum_slack) / w).floor() as u32,
                EntryBound::Explicit(cap) => cap,
            }
        })
        .collect();
    result.max_entry_bound = bounds.iter().copied().max().unwrap_or(0);

    let (n_l, n_r) = (md_l.rank(), md_r.rank());
    let (s_l, s_r) = (md_l.s(), md_r.s());
    let p = positions.len();
    let mut a = DMatrix::<f64>::zeros(2 * n_l * n_r + 1, p);
    for ra in 0..n_l {
        for cb in 0..n_r {
            let row = 2 * (ra * n_r + cb);
            for (q, &(i, j)) in positions.iter().enumerate() {
                // coefficient of Z_ij in (S_L Z - Z S_R)_{ab}
                let mut coef = num_complex::Complex64::new(0.0, 0.0);
                if j == cb {
                    coef += s_l[(ra, i)];
                }
                if i == ra {
                    coef -= s_r[(j, cb)];
                }
                a[(row, q)] = coef.re;
                a[(row + 1, q)] = coef.im;
            }
        }
    }
    let last = 2 * n_l * n_r;
    a[(last, vacuum_col)] = 1.0;
    let mut b = vec![0.0; last + 1];
    b[last] = 1.0;

    let rank_check = numerical_rank(&a, PIVOT_TOLERANCE);
    let reduced = reduce(a, b, PIVOT_TOLERANCE);
    if reduced.pivots.len() != rank_check {
        return Err(Error::Consistency(format!(
            "elimination rank {} disagrees with singular-value rank {rank_check}",
            reduced.pivots.len()
        )));
    }
    if !reduced.consistent {
        return Ok(result);
    }

    // Free entries searched in decreasing d_L d_R.
    let mut free_order: Vec<usize> = (0..reduced.free.len()).collect();
    free_order.sort_by(|&x, &y| {
        weights[reduced.free[y]]
            .total_cmp(&weights[reduced.free[x]])
            .then(reduced.free[x].cmp(&reduced.free[y]))
    });
    let free: Vec<usize> = free_order.iter().map(|&t| reduced.free[t]).collect();
    let free_bounds: Vec<u32> = free.iter().map(|&c| bounds[c]).collect();
    let free_weights: Vec<f64> = free.iter().map(|&c| weights[c]).collect();
    let pivots: Vec<Pivot> = reduced
        .pivots
        .into_iter()
        .map(|(position, base, coeffs)| {
            let coeffs: Vec<f64> = free_order.iter().map(|&t| coeffs[t]).collect();
            let m = coeffs.len();
            let mut suffix_lo = vec![0.0; m + 1];
            let mut suffix_hi = vec![0.0; m + 1];
            for t in (0..m).rev() {
                let span = coeffs[t] * f64::from(free_bounds[t]);
                suffix_lo[t] = suffix_lo[t + 1] + span.min(0.0);
                suffix_hi[t] = suffix_hi[t + 1] + span.max(0.0);
            }
            Pivot {
                position,
                base,
                coeffs,
                suffix_lo,
                suffix_hi,
            }
        })
        .collect();
    result.free_dimension = free.len();

    let space = SearchSpace {
        free,
        free_bounds,
        free_weights,
        pivots,
        bounds,
        index,
        sum_slack,
    };
    let shared = Shared {
        nodes: AtomicU64::new(0),
        aborted: AtomicBool::new(false),
        budget: constraints.node_budget,
        space: &space,
    };
    let base_values: Vec<f64> = space.pivots.iter().map(|p| p.base).collect();

    let raw: Vec<Vec<u32>> = if space.free.is_empty() {
        let mut out = Vec::new();
        search(&shared, 0, &mut Vec::new(), &mut base_values.clone(), 0.0, &mut out);
        out
    } else {
        // Split at the first branching level.
        shared.tick();
        (0..=space.free_bounds[0])
            .into_par_iter()
            .flat_map_iter(|value| {
                let mut out = Vec::new();
                let sum = space.free_weights[0] * f64::from(value);
                if sum <= space.index + space.sum_slack {
                    let mut values = base_values.clone();
                    for (p, pivot) in space.pivots.iter().enumerate() {
                        values[p] += pivot.coeffs[0] * f64::from(value);
                    }
                    search(&shared, 1, &mut vec![value], &mut values, sum, &mut out);
                }
                out
            })
            .collect()
    };
    result.nodes = shared.nodes.load(AtomicOrdering::Relaxed);

    let unique: BTreeSet<Vec<u32>> = raw.into_iter().collect();
    for full in unique {
        let mut z = IMatrix::zeros(n_l, n_r);
        for (q, &(i, j)) in positions.iter().enumerate() {
            z[(i, j)] = full[q];
        }
        let matrix = CouplingMatrix::new(z, md_l.label_names(), md_r.label_names())?;
        let verdict = check_modular_invariance(&matrix, md_l, md_r, tol)?;
        let dimension_sum = (0..n_l)
            .flat_map(|i| (0..n_r).map(move |j| (i, j)))
            .map(|(i, j)| f64::from(matrix.get(i, j)) * d_l[i] * d_r[j])
            .sum();
        let inv = EnumeratedInvariant {
            matrix,
            s_residual: verdict.s_residual,
            t_residual: verdict.t_residual,
            dimension_sum,
        };
        if verdict.s_residual <= tol {
            result.invariants.push(inv);
        } else if verdict.s_residual <= SUSPECT_FACTOR * tol {
            result.suspect.push(inv);
        }
    }
    result.invariants.sort_by(|x, y| x.matrix.canonical_cmp(&y.matrix));
    result.suspect.sort_by(|x, y| x.matrix.canonical_cmp(&y.matrix));

    if shared.aborted.load(AtomicOrdering::Relaxed) {
        return Err(Error::SearchBudget {
            reason: format!("node budget {}", constraints.node_budget),
            nodes: result.nodes,
            found: result.matrices(),
        });
    }
    if let Some(max) = constraints.max_solutions {
        if result.invariants.len() > max {
            let found = result.matrices().into_iter().take(max).collect();
            return Err(Error::SearchBudget {
                reason: format!("more than {max} solutions"),
                nodes: result.nodes,
                found,
            });
        }
    }
    post_check(&result, md_l, md_r, sum_slack)?;
    Ok(result)
}

/// Dimension-sum identity and closure under conjugation on both sides.
fn post_check(
    result: &EnumerationResult,
    md_l: &ModularData,
    md_r: &ModularData,
    sum_slack: f64,
) -> Result<()> {
    let set: BTreeSet<Vec<u32>> = result.invariants.iter().map(|i| i.matrix.row_major()).collect();
    for inv in &result.invariants {
        if (inv.dimension_sum - result.index).abs() > sum_slack.max(1e-9 * result.index) {
            return Err(Error::Consistency(format!(
                "dimension sum {} differs from index {}",
                inv.dimension_sum, result.index
            )));
        }
        let right = inv.matrix.permute_right(md_r.conjugation());
        let left = inv.matrix.permute_left(md_l.conjugation());
        if !set.contains(&right.row_major()) || !set.contains(&left.row_major()) {
            return Err(Error::Consistency(
                "enumeration output is not closed under charge conjugation".into(),
            ));
        }
    }
    Ok(())
}
