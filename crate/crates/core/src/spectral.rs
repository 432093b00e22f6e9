//! Trigonometric interpolation on equispaced periodic grids.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

fn twiddles(q: usize) -> Vec<C64> {
    (0..q)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / q as f64;
            C64::new(a.cos(), a.sin())
        })
        .collect()
}

/// Fourier coefficients `c_m = (1/Q) Σ_j f_j e^{−i m t_j}` for `m = 0..Q`, stored in DFT order.
pub fn dft(values: &[C64]) -> Vec<C64> {
    let q = values.len();
    let w = twiddles(q);
    let scale = 1.0 / q as f64;
    (0..q)
        .map(|m| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                acc += v * w[(j * m) % q].conj();
            }
            acc * scale
        })
        .collect()
}

/// Signed wavenumber of the DFT slot `m` on a grid of `q` points; the Nyquist slot maps to 0.
pub fn wavenumber(m: usize, q: usize) -> f64 {
    if 2 * m < q {
        m as f64
    } else if 2 * m == q {
        0.0
    } else {
        m as f64 - q as f64
    }
}

fn idft(coeffs: &[C64]) -> Vec<C64> {
    let q = coeffs.len();
    let w = twiddles(q);
    (0..q)
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            for (m, c) in coeffs.iter().enumerate() {
                acc += c * w[(j * m) % q];
            }
            acc
        })
        .collect()
}

/// `order`-th derivative in the parameter `t ∈ [0, 2π)` of periodic complex samples.
pub fn differentiate_complex(values: &[C64], order: u32) -> Vec<C64> {
    let q = values.len();
    let mut c = dft(values);
    for (m, cm) in c.iter_mut().enumerate() {
        let k = wavenumber(m, q);
        if 2 * m == q && order > 0 {
            *cm = C64::new(0.0, 0.0);
            continue;
        }
        let mut f = C64::new(1.0, 0.0);
        for _ in 0..order {
            f *= C64::new(0.0, k);
        }
        *cm *= f;
    }
    idft(&c)
}

/// Derivative in `t` of periodic real samples.
pub fn differentiate(values: &[f64]) -> Vec<f64> {
    let c: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
    differentiate_complex(&c, 1)
        .into_iter()
        .map(|v| v.re)
        .collect()
}

/// Trigonometric interpolant of periodic samples, evaluable at any parameter.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    coeffs: Vec<C64>,
}

impl TrigInterpolant {
    pub fn new(values: &[C64]) -> Self {
        Self {
            coeffs: dft(values),
        }
    }

    /// Value and first two derivatives at `t`.
    pub fn eval(&self, t: f64) -> [C64; 3] {
        let q = self.coeffs.len();
        let mut out = [C64::new(0.0, 0.0); 3];
        for (m, c) in self.coeffs.iter().enumerate() {
            if 2 * m == q {
                // Nyquist mode interpolates as c·cos(Qt/2)
                let k = 0.5 * q as f64;
                let (s, co) = (k * t).sin_cos();
                out[0] += c * co;
                out[1] += c * (-k * s);
                out[2] += c * (-k * k * co);
                continue;
            }
            let k = wavenumber(m, q);
            let e = C64::new((k * t).cos(), (k * t).sin()) * c;
            out[0] += e;
            out[1] += e * C64::new(0.0, k);
            out[2] += e * (-k * k);
        }
        out
    }
}

/// Samples a `2π`-periodic function on `q` equispaced nodes.
pub fn sample<F: Fn(f64) -> f64>(q: usize, f: F) -> Vec<f64> {
    (0..q).map(|j| f(2.0 * PI * j as f64 / q as f64)).collect()
}
