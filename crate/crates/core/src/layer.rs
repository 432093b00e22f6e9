//! Nyström discretization of layer potentials and boundary operators.
//!
//! Kernels with a logarithmic singularity are split as
//! `k(t, τ) = k₁(t, τ) ln(4 sin²((t − τ)/2)) + k₂(t, τ)` and the log part is integrated with
//! exact trigonometric weights.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::BoundaryCurve;
use crate::linalg::{CMatrix, CVector};
use crate::special::{bessel01, EULER_GAMMA};
use crate::{Error, Point, Result, C64};

/// Which boundary operator a matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    SingleLayer,
    DoubleLayer,
    K,
    KStar,
}

/// Assembled `Q × Q` Nyström matrix acting on nodal densities.
#[derive(Debug, Clone)]
pub struct BoundaryOperator<'a> {
    pub kind: OperatorKind,
    pub omega: f64,
    pub matrix: CMatrix,
    pub curve: &'a BoundaryCurve,
}

impl BoundaryOperator<'_> {
    pub fn apply(&self, density: &[C64]) -> Vec<C64> {
        let v = CVector::from_column_slice(density);
        (&self.matrix * v).iter().cloned().collect()
    }
}

/// Nodal density on a curve.
#[derive(Debug, Clone)]
pub struct Density<'a> {
    pub values: Vec<C64>,
    pub curve: &'a BoundaryCurve,
}

impl<'a> Density<'a> {
    pub fn new(values: Vec<C64>, curve: &'a BoundaryCurve) -> Result<Self> {
        if values.len() != curve.len() {
            return Err(Error::Validation(format!(
                "density has {} values for {} nodes",
                values.len(),
                curve.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Validation("non-finite density".into()));
        }
        Ok(Self { values, curve })
    }

    /// `∫ φ dσ`.
    pub fn integral(&self) -> C64 {
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| v * self.curve.weight(j))
            .sum()
    }
}

/// Side of the boundary for one-sided traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Exterior,
    Interior,
}

/// Weights `R_d` for `∫₀^{2π} ln(4 sin²((t_i − τ)/2)) f(τ) dτ ≈ Σ_j R_{|i−j|} f(t_j)`.
pub(crate) fn log_weights(q: usize) -> Vec<f64> {
    let n = q / 2;
    let nf = n as f64;
    (0..q)
        .map(|d| {
            let mut s = 0.0;
            for m in 1..n {
                s += (m as f64 * d as f64 * PI / nf).cos() / m as f64;
            }
            let alt = if d % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * PI / nf * s - PI / (nf * nf) * alt
        })
        .collect()
}

fn diff(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Single layer and `K*` (and optionally `K`) at wavenumber `omega > 0`, sharing Bessel evaluations.
struct HelmholtzBlocks {
    s: CMatrix,
    kstar: CMatrix,
    k: CMatrix,
}

fn helmholtz_blocks(curve: &BoundaryCurve, omega: f64) -> HelmholtzBlocks {
    let q = curve.len();
    let rw = log_weights(q);
    let h = curve.step();
    let pts = curve.points();
    let nrm = curve.normals();
    let sp = curve.speed();
    let kap = curve.curvature();
    let mut s = CMatrix::zeros(q, q);
    let mut kstar = CMatrix::zeros(q, q);
    let mut k = CMatrix::zeros(q, q);
    let inv4pi = 1.0 / (4.0 * PI);
    for i in 0..q {
        for j in 0..q {
            let rwt = rw[(i + q - j) % q];
            if i == j {
                let diag_s = C64::new(
                    (EULER_GAMMA + (0.5 * omega * sp[j]).ln()) / (2.0 * PI),
                    -0.25,
                ) * sp[j];
                s[(i, j)] = rwt * inv4pi * sp[j] + diag_s * h;
                let kd = kap[j] * sp[j] * inv4pi * h;
                kstar[(i, j)] = C64::new(kd, 0.0);
                k[(i, j)] = C64::new(kd, 0.0);
                continue;
            }
            let d = diff(pts[i], pts[j]);
            let r = dot(d, d).sqrt();
            let (j0, j1, y0, y1) = bessel01(omega * r);
            let ti = (i as f64 - j as f64) * h;
            let lg = (4.0 * (0.5 * ti).sin().powi(2)).ln();
            // G = −(i/4)H0 = Y0/4 − i J0/4
            let g = C64::new(0.25 * y0, -0.25 * j0);
            let s1 = inv4pi * j0 * sp[j];
            let s2 = g * sp[j] - s1 * lg;
            s[(i, j)] = s2 * h + rwt * s1;
            // ∂G/∂ν_x = (iω/4) H1 ⟨x − y, ν_x⟩ / r
            let h1 = C64::new(j1, y1);
            let base = C64::new(0.0, 0.25 * omega) * h1 / r;
            let cx = dot(d, nrm[i]);
            let cy = -dot(d, nrm[j]);
            let l1x = -omega * inv4pi * j1 * cx / r * sp[j];
            let l1y = -omega * inv4pi * j1 * cy / r * sp[j];
            kstar[(i, j)] = (base * cx * sp[j] - l1x * lg) * h + rwt * l1x;
            k[(i, j)] = (base * cy * sp[j] - l1y * lg) * h + rwt * l1y;
        }
    }
    HelmholtzBlocks { s, kstar, k }
}

fn laplace_single(curve: &BoundaryCurve) -> CMatrix {
    let q = curve.len();
    let rw = log_weights(q);
    let h = curve.step();
    let pts = curve.points();
    let sp = curve.speed();
    let inv4pi = 1.0 / (4.0 * PI);
    CMatrix::from_fn(q, q, |i, j| {
        let rwt = rw[(i + q - j) % q];
        let s1 = inv4pi * sp[j];
        let s2 = if i == j {
            sp[j].ln() / (2.0 * PI) * sp[j]
        } else {
            let d = diff(pts[i], pts[j]);
            let ti = (i as f64 - j as f64) * h;
            let ratio = dot(d, d) / (4.0 * (0.5 * ti).sin().powi(2));
            inv4pi * ratio.ln() * sp[j]
        };
        C64::new(s2 * h + rwt * s1, 0.0)
    })
}

fn laplace_k(curve: &BoundaryCurve, adjoint: bool) -> CMatrix {
    let q = curve.len();
    let h = curve.step();
    let pts = curve.points();
    let nrm = curve.normals();
    let sp = curve.speed();
    let kap = curve.curvature();
    CMatrix::from_fn(q, q, |i, j| {
        let v = if i == j {
            kap[j] / (4.0 * PI)
        } else {
            let d = diff(pts[i], pts[j]);
            let c = if adjoint {
                dot(d, nrm[i])
            } else {
                -dot(d, nrm[j])
            };
            c / (2.0 * PI * dot(d, d))
        };
        C64::new(v * sp[j] * h, 0.0)
    })
}

fn conj_if(m: CMatrix, negative: bool) -> CMatrix {
    if negative {
        m.map(|v| v.conj())
    } else {
        m
    }
}

/// `S^ω` on the curve. `ω = 0` selects `(1/2π) ln r`; negative `ω` gives the conjugate of `S^{|ω|}`.
pub fn assemble_single_layer(curve: &BoundaryCurve, omega: f64) -> BoundaryOperator<'_> {
    let matrix = if omega == 0.0 {
        laplace_single(curve)
    } else {
        conj_if(helmholtz_blocks(curve, omega.abs()).s, omega < 0.0)
    };
    BoundaryOperator {
        kind: OperatorKind::SingleLayer,
        omega,
        matrix,
        curve,
    }
}

/// `(K^ω)*`, the normal derivative at `x` of the single layer (principal value).
pub fn assemble_k_star(curve: &BoundaryCurve, omega: f64) -> BoundaryOperator<'_> {
    let matrix = if omega == 0.0 {
        laplace_k(curve, true)
    } else {
        conj_if(helmholtz_blocks(curve, omega.abs()).kstar, omega < 0.0)
    };
    BoundaryOperator {
        kind: OperatorKind::KStar,
        omega,
        matrix,
        curve,
    }
}

/// `K^ω`, the boundary value (principal value) of the double layer.
pub fn assemble_k(curve: &BoundaryCurve, omega: f64) -> BoundaryOperator<'_> {
    let matrix = if omega == 0.0 {
        laplace_k(curve, false)
    } else {
        conj_if(helmholtz_blocks(curve, omega.abs()).k, omega < 0.0)
    };
    BoundaryOperator {
        kind: OperatorKind::K,
        omega,
        matrix,
        curve,
    }
}

/// Laplace double layer restricted to the boundary (principal value, equal to `K⁰`).
pub fn assemble_double_layer(curve: &BoundaryCurve) -> BoundaryOperator<'_> {
    BoundaryOperator {
        kind: OperatorKind::DoubleLayer,
        omega: 0.0,
        matrix: laplace_k(curve, false),
        curve,
    }
}

/// `(S^ω, (K^ω)*)` assembled together.
pub fn assemble_single_and_k_star(
    curve: &BoundaryCurve,
    omega: f64,
) -> (BoundaryOperator<'_>, BoundaryOperator<'_>) {
    let (s, ks) = if omega == 0.0 {
        (laplace_single(curve), laplace_k(curve, true))
    } else {
        let b = helmholtz_blocks(curve, omega.abs());
        (conj_if(b.s, omega < 0.0), conj_if(b.kstar, omega < 0.0))
    };
    (
        BoundaryOperator {
            kind: OperatorKind::SingleLayer,
            omega,
            matrix: s,
            curve,
        },
        BoundaryOperator {
            kind: OperatorKind::KStar,
            omega,
            matrix: ks,
            curve,
        },
    )
}

/// `∂S[φ]/∂ν|± = (±½ I + K*)[φ]`.
pub fn trace_normal_derivative<'a>(
    density: &Density<'a>,
    k_star: &BoundaryOperator<'_>,
    side: Side,
) -> Result<Density<'a>> {
    if k_star.kind != OperatorKind::KStar || k_star.matrix.nrows() != density.values.len() {
        return Err(Error::Validation(
            "trace needs the K* operator of the density's curve".into(),
        ));
    }
    let half = if side == Side::Exterior { 0.5 } else { -0.5 };
    let kv = k_star.apply(&density.values);
    let values = kv
        .iter()
        .zip(&density.values)
        .map(|(a, b)| a + b * half)
        .collect();
    Density::new(values, density.curve)
}

/// Fundamental solution used by all layer potentials: `−(i/4)H0(ω r)` or `(1/2π) ln r`.
pub fn green(omega: f64, r: f64) -> C64 {
    if omega == 0.0 {
        return C64::new(r.ln() / (2.0 * PI), 0.0);
    }
    let (j0, _, y0, _) = bessel01(omega.abs() * r);
    let g = C64::new(0.25 * y0, -0.25 * j0);
    if omega < 0.0 {
        g.conj()
    } else {
        g
    }
}

/// `S^ω[φ](x)` at points off the curve by direct quadrature.
///
/// Accuracy degrades for points within a few node spacings of the curve.
pub fn eval_potential_offboundary(
    density: &Density<'_>,
    omega: f64,
    points: &[Point],
) -> Result<Vec<C64>> {
    let curve = density.curve;
    let w = curve.weights();
    points
        .iter()
        .map(|&x| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, y) in curve.points().iter().enumerate() {
                let r = dot(diff(x, *y), diff(x, *y)).sqrt();
                if r == 0.0 {
                    return Err(Error::Singularity(
                        "evaluation point lies on the curve".into(),
                    ));
                }
                acc += green(omega, r) * density.values[j] * w[j];
            }
            Ok(acc)
        })
        .collect()
}

/// Laplace double layer `D[φ](x) = ∫ ∂Γ₀(x − y)/∂ν_y φ(y) dσ(y)` off the curve.
pub fn eval_double_layer_offboundary(density: &Density<'_>, points: &[Point]) -> Result<Vec<C64>> {
    let curve = density.curve;
    let w = curve.weights();
    points
        .iter()
        .map(|&x| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, y) in curve.points().iter().enumerate() {
                let d = diff(x, *y);
                let r2 = dot(d, d);
                if r2 == 0.0 {
                    return Err(Error::Singularity(
                        "evaluation point lies on the curve".into(),
                    ));
                }
                let kern = -dot(d, curve.normals()[j]) / (2.0 * PI * r2);
                acc += density.values[j] * (kern * w[j]);
            }
            Ok(acc)
        })
        .collect()
}

/// Gradient of `S^ω[φ]` at points off the curve.
pub fn eval_potential_gradient(
    density: &Density<'_>,
    omega: f64,
    points: &[Point],
) -> Result<Vec<[C64; 2]>> {
    let curve = density.curve;
    let w = curve.weights();
    points
        .iter()
        .map(|&x| {
            let mut acc = [C64::new(0.0, 0.0); 2];
            for (j, y) in curve.points().iter().enumerate() {
                let d = diff(x, *y);
                let r = dot(d, d).sqrt();
                if r == 0.0 {
                    return Err(Error::Singularity(
                        "evaluation point lies on the curve".into(),
                    ));
                }
                // ∇_x G = G'(r) d / r
                let dg = if omega == 0.0 {
                    C64::new(1.0 / (2.0 * PI * r), 0.0)
                } else {
                    let (_, j1, _, y1) = bessel01(omega.abs() * r);
                    let v = C64::new(0.0, 0.25 * omega.abs()) * C64::new(j1, y1);
                    if omega < 0.0 {
                        v.conj()
                    } else {
                        v
                    }
                };
                let f = dg * density.values[j] * (w[j] / r);
                acc[0] += f * d[0];
                acc[1] += f * d[1];
            }
            Ok(acc)
        })
        .collect()
}

/// Identity-scaled matrix helper: `a I + m`.
pub(crate) fn shifted(m: &CMatrix, a: f64) -> CMatrix {
    let mut out = m.clone();
    for i in 0..out.nrows() {
        out[(i, i)] += C64::new(a, 0.0);
    }
    out
}

/// Nodal values of a real field as complex.
pub(crate) fn complexify(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}
