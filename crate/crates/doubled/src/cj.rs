//! CJ reshapings of doubled states, one per doubling level, with spectral
//! reports.
//!
//! Levels are named 1..n from the innermost block size upward: level `m`
//! pairs positions inside contiguous blocks of `2^m` factors. At depth 2 the
//! level-2 reshaping groups each plain/conjugated half against the mirrored
//! other half; the printed depth-2 mix grouping (rows 0,2 / columns 1,3) is
//! exposed separately because it certifies only double mixtures.

use num_complex::Complex64 as C64;

use crate::doubling::{position_pairs, printed_mix_pairing, DoubledShape, PairingSpec};
use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigenvalues, reshape_group, scaled_tolerance, CJMatrix};
use crate::tensor::StateTensor;

/// Spectral summary of one CJ reshaping.
#[derive(Clone, Debug)]
pub struct CJReport {
    pub level: u32,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace: C64,
    pub psd: bool,
}

fn doubled_of(s: &StateTensor) -> Result<DoubledShape> {
    DoubledShape::infer(s.shape())
        .filter(|ds| ds.depth() >= 1)
        .ok_or_else(|| {
            Error::Shape(format!(
                "state of shape {:?} is not a doubled layout of depth >= 1",
                s.shape().dims()
            ))
        })
}

/// The level-`m` CJ reshaping of a doubled state.
pub fn cj_operator(s: &StateTensor, level: u32) -> Result<CJMatrix> {
    let ds = doubled_of(s)?;
    let pairing = position_pairs(ds.depth(), level)?;
    cj_along(s, &pairing)
}

/// Reshape along an explicit pairing.
pub fn cj_along(s: &StateTensor, pairing: &PairingSpec) -> Result<CJMatrix> {
    if pairing.factor_count() != s.shape().rank() {
        return Err(Error::Shape(format!(
            "pairing over {} factors applied to rank {}",
            pairing.factor_count(),
            s.shape().rank()
        )));
    }
    let m = reshape_group(s, &pairing.row_positions(), &pairing.col_positions())?;
    Ok(m.with_pairing(pairing.clone()))
}

fn report_for(matrix: &CJMatrix, level: u32, tol: f64) -> Result<CJReport> {
    let scaled = scaled_tolerance(tol, matrix);
    let defect = matrix.hermiticity_defect();
    let values = hermitian_eigenvalues(matrix)?;
    let min = values.first().copied().unwrap_or(0.0);
    Ok(CJReport {
        level,
        hermiticity_defect: defect,
        min_eigenvalue: min,
        trace: matrix.trace(),
        psd: defect <= scaled && min >= -scaled,
    })
}

/// One spectral report per level 1..n, sharing one tolerance.
pub fn cj_report_all(s: &StateTensor, tol: f64) -> Result<Vec<CJReport>> {
    let ds = doubled_of(s)?;
    (1..=ds.depth())
        .map(|level| {
            let matrix = cj_operator(s, level)?;
            report_for(&matrix, level, tol)
        })
        .collect()
}

/// The printed depth-2 mix grouping as a matrix (rows 0,2 / columns 1,3).
pub fn mix_pairing_operator(s: &StateTensor) -> Result<CJMatrix> {
    let ds = doubled_of(s)?;
    if ds.depth() != 2 {
        return Err(Error::Shape(format!(
            "the printed mix grouping is defined at depth 2, got {}",
            ds.depth()
        )));
    }
    cj_along(s, &printed_mix_pairing())
}

/// Spectral report of the printed depth-2 mix grouping; PSD here is
/// necessary for double mixtures but not for double dilations.
pub fn mix_pairing_report(s: &StateTensor, tol: f64) -> Result<CJReport> {
    let matrix = mix_pairing_operator(s)?;
    report_for(&matrix, 1, tol)
}
