//! Size, contrast and equivalent-ellipse estimates from time-domain tensors.
//!
//! Pointwise ratios in `t` are aggregated by least squares over the samples where the
//! denominator exceeds a fraction of its maximum, which keeps the sinc zeros out.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::EquivalentEllipse;
use crate::multi_index::MultiIndex;
use crate::tensors::TdptTable;
use crate::{Error, Point, Result};

/// Samples with `|denominator| ≤ MASK_FRACTION · max` are ignored.
pub const MASK_FRACTION: f64 = 0.2;

/// A quantity estimated pointwise in `t` together with its aggregated value.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub times: Vec<f64>,
    /// Pointwise estimates; `None` where the denominator was masked.
    pub samples: Vec<Option<f64>>,
    pub value: f64,
}

/// Size and contrast estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeContrastEstimate {
    pub volume: Aggregate,
    pub contrast: Aggregate,
}

/// Least-squares solution of `num(t) ≈ x · den(t)` over unmasked samples.
fn aggregate_ratio(times: &[f64], num: &[f64], den: &[f64], what: &str) -> Result<Aggregate> {
    let dmax = den.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if !(dmax > 0.0) || !dmax.is_finite() {
        return Err(Error::Estimation(format!(
            "{what}: denominator vanishes on the whole grid"
        )));
    }
    let cut = MASK_FRACTION * dmax;
    let mut nd = 0.0;
    let mut dd = 0.0;
    let samples = num
        .iter()
        .zip(den)
        .map(|(&n, &d)| {
            if d.abs() > cut {
                nd += n * d;
                dd += d * d;
                Some(n / d)
            } else {
                None
            }
        })
        .collect();
    let value = nd / dd;
    if !value.is_finite() {
        return Err(Error::Estimation(format!("{what}: non-finite aggregate")));
    }
    Ok(Aggregate {
        times: times.to_vec(),
        samples,
        value,
    })
}

/// `|D| ≈ −P_ρ[𝒲_00](t) / K₂(t)` with `K₂` the discrete transform of `ω²`.
pub fn estimate_size(tdpt: &TdptTable) -> Result<Aggregate> {
    let z = MultiIndex::ZERO;
    let p00: Vec<f64> = tdpt.signal(z, z).iter().map(|v| -v.re).collect();
    let k2: Vec<f64> = tdpt.times.iter().map(|&t| tdpt.freqs.kernel2(t)).collect();
    aggregate_ratio(&tdpt.times, &p00, &k2, "size")
}

/// Real part of the first-order block at every time sample.
fn first_order_signals(tdpt: &TdptTable) -> Result<Vec<[[f64; 2]; 2]>> {
    if tdpt.order < 1 {
        return Err(Error::Validation(
            "first-order block requires order ≥ 1".into(),
        ));
    }
    let e = [MultiIndex::new(1, 0), MultiIndex::new(0, 1)];
    let s = [
        [tdpt.signal(e[0], e[0]), tdpt.signal(e[0], e[1])],
        [tdpt.signal(e[1], e[0]), tdpt.signal(e[1], e[1])],
    ];
    Ok((0..tdpt.times.len())
        .map(|i| {
            [
                [s[0][0][i].re, s[0][1][i].re],
                [s[1][0][i].re, s[1][1][i].re],
            ]
        })
        .collect())
}

/// `R(−θ) A R(−θ)ᵀ`.
pub fn rotate_block(a: [[f64; 2]; 2], theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let r = [[c, s], [-s, c]];
    let mut ra = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            ra[i][j] = r[i][0] * a[0][j] + r[i][1] * a[1][j];
        }
    }
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = ra[i][0] * r[j][0] + ra[i][1] * r[j][1];
        }
    }
    out
}

/// Symmetrized first-order tensor fitted against the `K₀(t)` envelope.
pub fn measured_first_order(tdpt: &TdptTable) -> Result<[[f64; 2]; 2]> {
    let blocks = first_order_signals(tdpt)?;
    let k0: Vec<f64> = tdpt.times.iter().map(|&t| tdpt.freqs.kernel0(t)).collect();
    let kk: f64 = k0.iter().map(|v| v * v).sum();
    if !(kk > 0.0) {
        return Err(Error::Estimation(
            "envelope vanishes on the whole grid".into(),
        ));
    }
    let mut m = [[0.0; 2]; 2];
    for (b, k) in blocks.iter().zip(&k0) {
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += b[i][j] * k / kk;
            }
        }
    }
    let off = 0.5 * (m[0][1] + m[1][0]);
    m[0][1] = off;
    m[1][0] = off;
    Ok(m)
}

/// Eigen-decomposition of a symmetric 2×2 matrix: `(λ_major, λ_minor, θ)` with `λ_major ≥ λ_minor`
/// and `θ ∈ [0, π)` the angle of the eigenvector of `λ_major`.
pub fn symmetric_eigen(m: [[f64; 2]; 2]) -> (f64, f64, f64) {
    let tr = m[0][0] + m[1][1];
    let diff = m[0][0] - m[1][1];
    let disc = (0.25 * diff * diff + m[0][1] * m[0][1]).sqrt();
    let hi = 0.5 * tr + disc;
    let lo = 0.5 * tr - disc;
    let mut theta = 0.5 * (2.0 * m[0][1]).atan2(diff);
    if theta < 0.0 {
        theta += PI;
    }
    if disc <= 1e-14 * tr.abs().max(f64::MIN_POSITIVE) {
        theta = 0.0;
    }
    (hi, lo, theta)
}

/// Contrast from the rotated first-order block, given `|D|` and the principal angle `θ`.
pub fn estimate_contrast(tdpt: &TdptTable, volume: f64, theta: f64) -> Result<Aggregate> {
    if !(volume > 0.0) {
        return Err(Error::Estimation(format!(
            "contrast needs a positive volume, got {volume}"
        )));
    }
    let blocks = first_order_signals(tdpt)?;
    let mut num = Vec::with_capacity(blocks.len());
    let mut den = Vec::with_capacity(blocks.len());
    for (b, &t) in blocks.iter().zip(&tdpt.times) {
        let r = rotate_block(*b, theta);
        let k0 = tdpt.freqs.kernel0(t);
        let s = volume * (r[0][0] + r[1][1]) * k0;
        let p = r[0][0] * r[1][1];
        num.push(s + p);
        den.push(s - p);
    }
    aggregate_ratio(&tdpt.times, &num, &den, "contrast")
}

/// Semi-axes `(a, b)` of the ellipse with volume `volume` and contrast `k` whose first-order
/// tensor has eigenvalues `major ≥ minor` (algebraically).
pub fn ellipse_axes(major: f64, minor: f64, volume: f64, k: f64) -> Result<(f64, f64)> {
    if !(volume > 0.0) || !(k > 0.0) || k == 1.0 {
        return Err(Error::Estimation(format!(
            "invalid volume {volume} or contrast {k}"
        )));
    }
    if (k > 1.0 && !(minor > 0.0)) || (k < 1.0 && !(major < 0.0)) {
        return Err(Error::Estimation(format!(
            "first-order tensor eigenvalues ({major}, {minor}) have the wrong sign for k = {k}"
        )));
    }
    let r = major / minor;
    let aspect = if (k > 1.0 && r >= k) || (k < 1.0 && r <= k) {
        return Err(Error::Estimation(format!(
            "eigenvalue ratio {r} is out of range for k = {k}"
        )));
    } else {
        ((r * k - 1.0) / (k - r)).max(1.0)
    };
    let a = (aspect * volume / PI).sqrt();
    let b = a / aspect;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Estimation("non-finite semi-axes".into()));
    }
    Ok((a, b))
}

/// Ellipse with the measured first-order tensor, volume and contrast, centered at `center`.
pub fn equivalent_ellipse(
    tdpt: &TdptTable,
    volume: f64,
    k: f64,
    center: Point,
) -> Result<EquivalentEllipse> {
    let m = measured_first_order(tdpt)?;
    let (hi, lo, theta) = symmetric_eigen(m);
    let (a, b) = ellipse_axes(hi, lo, volume, k)?;
    EquivalentEllipse::new(a, b, theta, center)
}

/// Size from the monopole signal, then angle, contrast and ellipse from the first-order block.
pub fn estimate_all(
    tdpt: &TdptTable,
    center: Point,
) -> Result<(SizeContrastEstimate, EquivalentEllipse)> {
    let volume = estimate_size(tdpt)?;
    if !(volume.value > 0.0) {
        return Err(Error::Estimation(format!(
            "estimated volume {} is not positive",
            volume.value
        )));
    }
    let (_, _, theta) = symmetric_eigen(measured_first_order(tdpt)?);
    let contrast = estimate_contrast(tdpt, volume.value, theta)?;
    let k = contrast.value;
    if !(k > 0.0) || k == 1.0 {
        return Err(Error::Estimation(format!(
            "estimated contrast {k} is not admissible"
        )));
    }
    let ellipse = equivalent_ellipse(tdpt, volume.value, k, center)?;
    Ok((SizeContrastEstimate { volume, contrast }, ellipse))
}
