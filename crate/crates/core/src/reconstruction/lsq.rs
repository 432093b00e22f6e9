//! Least-squares recovery of ε-scaled FDPTs from MSR matrices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::forward::{greens_row, MsrDataset};
use crate::linalg::{pseudo_inverse, CMatrix};
use crate::multi_index::count_up_to;
use crate::tensors::{compute_tdpt, FdptTable, FrequencySet, TdptTable};
use crate::{Error, Point, Result, C64};

/// Relative SVD cutoff for noiseless data.
pub const RCOND_NOISELESS: f64 = 1e-12;
/// Relative SVD cutoff for noisy data.
pub const RCOND_NOISY: f64 = 1e-6;

/// Rows `𝒢_ω(p, z)` for each point `p`.
pub fn green_matrix(points: &[Point], z: Point, omega: f64, n: u32) -> Result<CMatrix> {
    let p = count_up_to(n);
    let mut g = CMatrix::zeros(points.len(), p);
    for (i, &y) in points.iter().enumerate() {
        for (a, v) in greens_row(omega, y, z, n)?.into_iter().enumerate() {
            g[(i, a)] = v;
        }
    }
    Ok(g)
}

/// Minimizes `‖𝒢_x 𝒲ᵀ 𝒢_yᵀ − A‖_F` for one frequency.
///
/// The Green matrices have rank at most `2n + 1` because `(Δ + ω²)Γ = 0`, so the minimum-norm
/// solution is returned; fewer independent rows than that is reported as ill-posed.
pub fn reconstruct_fdpt_at(
    a: &CMatrix,
    transmitters: &[Point],
    receivers: &[Point],
    z: Point,
    omega: f64,
    n: u32,
    rcond: f64,
) -> Result<FdptTable> {
    if a.nrows() != receivers.len() || a.ncols() != transmitters.len() {
        return Err(Error::Validation(
            "MSR matrix shape does not match the layout".into(),
        ));
    }
    let gx = green_matrix(receivers, z, omega, n)?;
    let gy = green_matrix(transmitters, z, omega, n)?;
    let (gx_pinv, rx) = pseudo_inverse(&gx, rcond);
    let (gy_pinv, ry) = pseudo_inverse(&gy, rcond);
    let required = (2 * n as usize + 1)
        .min(receivers.len())
        .min(transmitters.len());
    let rank = rx.min(ry);
    if rank < required {
        return Err(Error::IllPosed { rank, required });
    }
    let wt = gx_pinv * a * gy_pinv.transpose();
    let p = count_up_to(n);
    let mut values = vec![C64::new(0.0, 0.0); p * p];
    for al in 0..p {
        for be in 0..p {
            values[al * p + be] = wt[(be, al)];
        }
    }
    FdptTable::from_values(n, omega, 1.0, 0.0, values)
}

/// Per-frequency recovery over a dataset. Recovered tables carry `eps = 1` and `contrast = 0`.
pub fn reconstruct_fdpt(
    dataset: &MsrDataset,
    z: Point,
    n: u32,
    rcond: f64,
) -> Result<Vec<FdptTable>> {
    dataset
        .frequencies
        .iter()
        .zip(&dataset.matrices)
        .map(|(&om, a)| {
            reconstruct_fdpt_at(
                a,
                &dataset.layout.transmitters,
                &dataset.layout.receivers,
                z,
                om,
                n,
                rcond,
            )
        })
        .collect()
}

/// Synthetic MSR matrix `𝒢_x 𝒲ᵀ 𝒢_yᵀ` generated by a tensor table.
pub fn forward_msr(
    table: &FdptTable,
    transmitters: &[Point],
    receivers: &[Point],
    z: Point,
    n: u32,
) -> Result<CMatrix> {
    let t = table.truncated(n);
    let p = count_up_to(n);
    let gx = green_matrix(receivers, z, table.omega, n)?;
    let gy = green_matrix(transmitters, z, table.omega, n)?;
    let mut wt = CMatrix::zeros(p, p);
    for al in 0..p {
        for be in 0..p {
            wt[(be, al)] = t.values()[al * p + be];
        }
    }
    Ok(gx * wt * gy.transpose())
}

/// TDPTs of recovered tables; the tables must sit on the positive grid of `freqs`.
pub fn reconstruct_tdpt(
    tables: &[FdptTable],
    freqs: &FrequencySet,
    times: &[f64],
) -> Result<TdptTable> {
    compute_tdpt(tables, freqs, times)
}

/// Pointwise sample variance of each TDPT signal across realizations.
pub fn tdpt_variance(realizations: &[TdptTable]) -> Result<Vec<Vec<f64>>> {
    let r = realizations.len();
    if r < 2 {
        return Err(Error::Validation(format!(
            "variance needs at least two realizations, got {r}"
        )));
    }
    let first = &realizations[0];
    if realizations
        .iter()
        .any(|t| t.times != first.times || t.order != first.order)
    {
        return Err(Error::Validation("realizations use different grids".into()));
    }
    let nt = first.times.len();
    let mut out = Vec::with_capacity(first.signals().len());
    for s in 0..first.signals().len() {
        let mut var = vec![0.0; nt];
        for ti in 0..nt {
            let mean: C64 = realizations.iter().map(|t| t.signals()[s][ti]).sum::<C64>() / r as f64;
            var[ti] = realizations
                .iter()
                .map(|t| (t.signals()[s][ti] - mean).norm_sqr())
                .sum::<f64>()
                / (r - 1) as f64;
        }
        out.push(var);
    }
    Ok(out)
}
