use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CouplingMatrix;
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, to_complex, CMatrix};
use crate::modular_data::ModularData;
use crate::statistics::{statistics_representation, StatisticsData};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularInvarianceVerdict {
    pub t_residual: f64,
    pub s_residual: f64,
    pub t_pass: bool,
    pub s_pass: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntertwiningVerdict {
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatisticsSymmetryVerdict {
    pub x_part: IntertwiningVerdict,
    pub y_part: IntertwiningVerdict,
    pub lambda_l: f64,
    pub lambda_r: f64,
    pub pass: bool,
}

/// Intertwining of the statistics representations, with the scalar
/// cancellation `z_L / lambda_L = z_R / lambda_R` reported separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NondegenerateSymmetryVerdict {
    pub scalar_residual: f64,
    pub s_stat_residual: f64,
    pub t_stat_residual: f64,
    pub pass: bool,
}

fn check_shape(z: &CouplingMatrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if z.nrows() != rows || z.ncols() != cols {
        return Err(Error::dims(
            what,
            format!("{rows}x{cols}"),
            format!("{}x{}", z.nrows(), z.ncols()),
        ));
    }
    Ok(())
}

/// Residuals `max|T_L Z - Z T_R|` and `max|S_L Z - Z S_R|`.
pub fn check_modular_invariance(
    z: &CouplingMatrix,
    md_l: &ModularData,
    md_r: &ModularData,
    tol: f64,
) -> Result<ModularInvarianceVerdict> {
    check_shape(z, md_l.rank(), md_r.rank(), "coupling matrix vs modular data")?;
    let zc = to_complex(z.matrix());
    let t_residual = max_abs_diff(&(md_l.t() * &zc), &(&zc * md_r.t()));
    let s_residual = max_abs_diff(&(md_l.s() * &zc), &(&zc * md_r.s()));
    let t_pass = t_residual <= tol;
    let s_pass = s_residual <= tol;
    Ok(ModularInvarianceVerdict {
        t_residual,
        s_residual,
        t_pass,
        s_pass,
        pass: t_pass && s_pass,
    })
}

/// `X_L Z = Z X_R`.
pub fn check_x_intertwining(
    z: &CouplingMatrix,
    sd_l: &StatisticsData,
    sd_r: &StatisticsData,
    tol: f64,
) -> Result<IntertwiningVerdict> {
    check_shape(z, sd_l.len(), sd_r.len(), "coupling matrix vs statistics")?;
    let zc = to_complex(z.matrix());
    let residual = max_abs_diff(&(&sd_l.x * &zc), &(&zc * &sd_r.x));
    Ok(IntertwiningVerdict {
        residual,
        pass: residual <= tol,
    })
}

/// `lambda_L = sum_i Z[i][0] d_L[i]`, `lambda_R = sum_j Z[0][j] d_R[j]`.
fn lambdas(z: &CouplingMatrix, sd_l: &StatisticsData, sd_r: &StatisticsData) -> (f64, f64) {
    let lambda_l = (0..z.nrows()).map(|i| f64::from(z.get(i, 0)) * sd_l.dims[i]).sum();
    let lambda_r = (0..z.ncols()).map(|j| f64::from(z.get(0, j)) * sd_r.dims[j]).sum();
    (lambda_l, lambda_r)
}

/// `X_L Z = Z X_R` and `Y_L Z / lambda_L = Z Y_R / lambda_R`.
pub fn check_statistics_symmetry(
    z: &CouplingMatrix,
    sd_l: &StatisticsData,
    sd_r: &StatisticsData,
    tol: f64,
) -> Result<StatisticsSymmetryVerdict> {
    let x_part = check_x_intertwining(z, sd_l, sd_r, tol)?;
    let (lambda_l, lambda_r) = lambdas(z, sd_l, sd_r);
    let zc = to_complex(z.matrix());
    let left: CMatrix = &sd_l.y * &zc / Complex64::new(lambda_l, 0.0);
    let right: CMatrix = &zc * &sd_r.y / Complex64::new(lambda_r, 0.0);
    let residual = max_abs_diff(&left, &right);
    let y_part = IntertwiningVerdict {
        residual,
        pass: residual <= tol,
    };
    Ok(StatisticsSymmetryVerdict {
        pass: x_part.pass && y_part.pass,
        x_part,
        y_part,
        lambda_l,
        lambda_r,
    })
}

/// Recomputes `T_stat_L Z = Z T_stat_R` and `S_stat_L Z = Z S_stat_R` for
/// nondegenerate statistics on both sides.
pub fn check_nondegenerate_symmetry(
    z: &CouplingMatrix,
    sd_l: &StatisticsData,
    sd_r: &StatisticsData,
    tol: f64,
) -> Result<NondegenerateSymmetryVerdict> {
    check_shape(z, sd_l.len(), sd_r.len(), "coupling matrix vs statistics")?;
    let rep_l = statistics_representation(sd_l, tol)?;
    let rep_r = statistics_representation(sd_r, tol)?;
    let (lambda_l, lambda_r) = lambdas(z, sd_l, sd_r);
    let scalar_residual = (sd_l.z / lambda_l - sd_r.z / lambda_r).norm();
    let zc = to_complex(z.matrix());
    let s_stat_residual = max_abs_diff(&(&rep_l.s * &zc), &(&zc * &rep_r.s));
    let t_stat_residual = max_abs_diff(&(&rep_l.t * &zc), &(&zc * &rep_r.t));
    Ok(NondegenerateSymmetryVerdict {
        pass: scalar_residual <= tol && s_stat_residual <= tol && t_stat_residual <= tol,
        scalar_residual,
        s_stat_residual,
        t_stat_residual,
    })
}
