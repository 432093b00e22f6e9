//! Dense complex factorizations with conditioning guards.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, LU};
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Condition number above which a boundary system is treated as resonant.
pub const RESONANCE_THRESHOLD: f64 = 1e12;

/// LU factorization with partial pivoting and a 1-norm condition estimate.
#[derive(Debug, Clone)]
pub struct LuSolver {
    lu: LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    cond: f64,
}

fn norm1(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn vnorm1(v: &CVector) -> f64 {
    v.iter().map(|x| x.norm()).sum()
}

impl LuSolver {
    /// Factors `a`; fails with a resonance error when `cond₁(a)` exceeds [`RESONANCE_THRESHOLD`].
    pub fn factor(a: CMatrix) -> Result<Self> {
        assert!(a.is_square(), "LU of a non-square matrix");
        let anorm = norm1(&a);
        let lu = a.lu();
        let u = lu.u();
        let n = u.nrows();
        if u.diagonal()
            .iter()
            .any(|d| *d == C64::new(0.0, 0.0) || !d.re.is_finite())
        {
            return Err(Error::Resonance {
                condition: f64::INFINITY,
            });
        }
        let inv_norm = estimate_inverse_norm1(&lu, &u, n);
        let cond = anorm * inv_norm;
        if !(cond <= RESONANCE_THRESHOLD) {
            return Err(Error::Resonance { condition: cond });
        }
        Ok(Self { lu, cond })
    }

    pub fn condition(&self) -> f64 {
        self.cond
    }

    pub fn solve(&self, b: &CVector) -> CVector {
        self.lu.solve(b).expect("factor checked invertibility")
    }

    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        self.lu.solve(b).expect("factor checked invertibility")
    }
}

fn adjoint_solve(lu: &LU<C64, nalgebra::Dyn, nalgebra::Dyn>, u: &CMatrix, b: &CVector) -> CVector {
    // P A = L U, so Aᴴ x = b ⇔ Uᴴ Lᴴ (P x) = b
    let l = lu.l();
    let w = u.ad_solve_upper_triangular(b).expect("nonsingular U");
    let mut v = l.ad_solve_lower_triangular(&w).expect("unit L");
    lu.p().inv_permute_rows(&mut v);
    v
}

/// Hager–Higham estimate of `‖A⁻¹‖₁`.
fn estimate_inverse_norm1(
    lu: &LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    u: &CMatrix,
    n: usize,
) -> f64 {
    let mut x = CVector::from_element(n, C64::new(1.0 / n as f64, 0.0));
    let mut est = 0.0;
    for iter in 0..5 {
        let y = lu.solve(&x).expect("nonsingular");
        let ny = vnorm1(&y);
        if iter > 0 && ny <= est {
            break;
        }
        est = ny;
        let xi = y.map(|v| {
            let a = v.norm();
            if a > 0.0 {
                v / a
            } else {
                C64::new(1.0, 0.0)
            }
        });
        let z = adjoint_solve(lu, u, &xi);
        let (jmax, zmax) = z
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.norm()))
            .fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        let ztx = z.dotc(&x).re;
        if iter > 0 && zmax <= ztx {
            break;
        }
        x = CVector::zeros(n);
        x[jmax] = C64::new(1.0, 0.0);
    }
    // alternating-sign probe guards against the estimator's known blind spots
    let mut alt = CVector::zeros(n);
    for j in 0..n {
        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
        alt[j] = C64::new(s * (1.0 + j as f64 / (n as f64 - 1.0).max(1.0)), 0.0);
    }
    let y = lu.solve(&alt).expect("nonsingular");
    let alt_est = 2.0 * vnorm1(&y) / (3.0 * n as f64);
    est.max(alt_est)
}

/// Moore–Penrose pseudo-inverse via SVD with relative cutoff; returns `(A⁺, rank)`.
pub fn pseudo_inverse(a: &CMatrix, rcond: f64) -> (CMatrix, usize) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = rcond * smax;
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested Vᵀ");
    let mut out = CMatrix::zeros(a.ncols(), a.nrows());
    let mut rank = 0;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            rank += 1;
            let vk = vt.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (vk * uk) * C64::new(1.0 / s, 0.0);
        }
    }
    (out, rank)
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(core::cmp::Ordering::Equal));
    s
}
