use serde::Serialize;

use super::{
    ade_name, check_normality, check_permutation_fusion_iso, diagonal_exponents, find_block_structure,
    serialize_imatrix, BlockOutcome, BlockSearchLimits, PermutationIsoVerdict,
};
use crate::error::{Error, Result};
use crate::invariants::{
    check_modular_invariance, check_nondegenerate_symmetry, check_statistics_symmetry, CouplingMatrix,
    ModularInvarianceVerdict, NondegenerateSymmetryVerdict, StatisticsSymmetryVerdict,
};
use crate::linalg::IMatrix;
use crate::modular_data::{FusionRing, ModularData};
use crate::statistics::StatisticsData;

/// Everything `classify` needs about both chiral halves.
#[derive(Clone, Copy, Debug)]
pub struct ClassificationContext<'a> {
    pub md_l: &'a ModularData,
    pub md_r: &'a ModularData,
    pub fr_l: &'a FusionRing,
    pub fr_r: &'a FusionRing,
    pub sd_l: &'a StatisticsData,
    pub sd_r: &'a StatisticsData,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeTag {
    Diagonal,
    ConjugateDiagonal,
    Permutation,
    #[serde(rename = "block-type-I")]
    BlockTypeI,
    #[serde(rename = "block-type-II")]
    BlockTypeII,
    Unfactored,
}

impl TypeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TypeTag::Diagonal => "diagonal",
            TypeTag::ConjugateDiagonal => "conjugate-diagonal",
            TypeTag::Permutation => "permutation",
            TypeTag::BlockTypeI => "block-type-I",
            TypeTag::BlockTypeII => "block-type-II",
            TypeTag::Unfactored => "unfactored",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolutionType {
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub level: Option<u32>,
    #[serde(serialize_with = "serialize_imatrix")]
    pub matrix: IMatrix,
    pub heterotic: bool,
    pub modular_invariant: ModularInvarianceVerdict,
    pub statistics_symmetry: StatisticsSymmetryVerdict,
    pub nondegenerate_symmetry: Option<NondegenerateSymmetryVerdict>,
    pub normal: bool,
    pub permutation_iso: Option<PermutationIsoVerdict>,
    pub factorization: BlockOutcome,
    pub type_tag: TypeTag,
    pub solution_type: Option<SolutionType>,
    pub ade_name: Option<String>,
    pub notes: Vec<String>,
}

fn is_permutation(z: &IMatrix) -> Option<Vec<usize>> {
    if !z.is_square() {
        return None;
    }
    let n = z.nrows();
    let mut perm = vec![usize::MAX; n];
    for i in 0..n {
        let ones: Vec<usize> = (0..n).filter(|&j| z[(i, j)] != 0).collect();
        match ones.as_slice() {
            [j] if z[(i, *j)] == 1 => perm[i] = *j,
            _ => return None,
        }
    }
    let mut seen = vec![false; n];
    for &j in &perm {
        if std::mem::replace(&mut seen[j], true) {
            return None;
        }
    }
    Some(perm)
}

/// Orbits of `a -> k - a` on the support of each family.
fn families_are_simple_current_orbits(families: &[Vec<usize>], k: usize) -> bool {
    families.iter().all(|f| {
        let mut image: Vec<usize> = f.iter().map(|&a| k - a).collect();
        image.sort_unstable();
        &image == f
    })
}

pub fn classify(
    z: &CouplingMatrix,
    ctx: &ClassificationContext<'_>,
    tol: f64,
    limits: &BlockSearchLimits,
) -> Result<ClassificationReport> {
    let modular_invariant = check_modular_invariance(z, ctx.md_l, ctx.md_r, tol)?;
    let statistics_symmetry = check_statistics_symmetry(z, ctx.sd_l, ctx.sd_r, tol)?;
    let nondegenerate_symmetry = if statistics_symmetry.pass && !ctx.sd_l.degenerate && !ctx.sd_r.degenerate {
        Some(check_nondegenerate_symmetry(z, ctx.sd_l, ctx.sd_r, tol)?)
    } else {
        None
    };
    let normal = check_normality(z);
    let permutation_iso = match check_permutation_fusion_iso(z, ctx.fr_l, ctx.fr_r) {
        Ok(v) => Some(v),
        Err(Error::Inapplicable(_)) => None,
        Err(e) => return Err(e),
    };
    let factorization = find_block_structure(z, limits)?;

    let heterotic = ctx.md_l != ctx.md_r;
    let level = if heterotic { None } else { ctx.md_l.su2_level(tol) };
    let mut notes = Vec::new();

    let zm = z.matrix();
    let perm = if heterotic { None } else { is_permutation(zm) };
    let type_tag = match (&perm, factorization.factorization()) {
        (Some(p), _) if p.iter().enumerate().all(|(i, &j)| i == j) => TypeTag::Diagonal,
        (Some(p), _) if p.as_slice() == ctx.md_l.conjugation() => TypeTag::ConjugateDiagonal,
        (Some(_), _) => TypeTag::Permutation,
        (None, Some(f)) if f.is_type_one() => TypeTag::BlockTypeI,
        (None, Some(_)) => TypeTag::BlockTypeII,
        (None, None) => TypeTag::Unfactored,
    };

    let solution_type = if heterotic {
        notes.push("heterotic coupling: the Type I / Type II distinction does not apply".to_string());
        None
    } else {
        factorization.factorization().map(|f| {
            if f.is_type_one() {
                SolutionType::TypeI
            } else {
                SolutionType::TypeII
            }
        })
    };
    match &factorization {
        BlockOutcome::NoFactorization => {
            notes.push("no block factorization within the search limits".to_string())
        }
        BlockOutcome::Undecided { nodes } => notes.push(format!(
            "block factorization undecided: search stopped after {nodes} nodes"
        )),
        BlockOutcome::Factored(f) if f.sigma.is_none() => notes.push(
            "left and right families differ; Zmax is the identity between distinct family lists".to_string(),
        ),
        BlockOutcome::Factored(_) => {}
    }

    let ade = match level {
        Some(k) => {
            let name = ade_name(z, k);
            if name.is_none() {
                notes.push(format!(
                    "diagonal exponents {:?} match no ADE diagram with Coxeter number {}",
                    diagonal_exponents(z),
                    k + 2
                ));
            }
            name
        }
        None => {
            if !heterotic {
                notes.push("ADE naming is only available for built-in SU(2)_k data".to_string());
            }
            None
        }
    };

    if let (Some(k), Some(f)) = (level, factorization.factorization()) {
        if f.is_type_one()
            && type_tag != TypeTag::Diagonal
            && families_are_simple_current_orbits(&f.left_families(), k as usize)
        {
            notes.push("orbifold: every family is an orbit of the simple current a -> k - a".to_string());
        }
    }
    if modular_invariant.pass {
        notes.push(
            "modular invariant; realizability by a local two-dimensional theory is undecided".to_string(),
        );
    }

    Ok(ClassificationReport {
        level,
        matrix: zm.clone(),
        heterotic,
        modular_invariant,
        statistics_symmetry,
        nondegenerate_symmetry,
        normal,
        permutation_iso,
        factorization,
        type_tag,
        solution_type,
        ade_name: ade,
        notes,
    })
}
