//! Bessel and Hankel functions of integer order and the 2D fundamental solutions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::multi_index::{binomial, count_up_to, MultiIndex};
use crate::{Error, Point, Result, C64};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Highest derivative order served by [`gamma_derivatives`].
pub const MAX_DERIVATIVE_ORDER: u32 = 5;

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// `H^(1)_order(x)` for `order ∈ {0, 1}`.
pub fn hankel1(order: u32, x: f64) -> Result<C64> {
    if order > 1 {
        return Err(Error::Domain(format!("hankel order {order} not supported")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "hankel argument must be positive, got {x}"
        )));
    }
    let (h0, h1) = hankel01(x);
    Ok(if order == 0 { h0 } else { h1 })
}

/// `(J0, J1, Y0, Y1)` at `x > 0`.
pub fn bessel01(x: f64) -> (f64, f64, f64, f64) {
    debug_assert!(x > 0.0);
    if x <= SERIES_LIMIT {
        series01(x)
    } else if x < ASYMPTOTIC_LIMIT {
        neumann01(x)
    } else {
        let (h0, h1) = asymptotic01(x);
        (h0.re, h1.re, h0.im, h1.im)
    }
}

pub(crate) fn hankel01(x: f64) -> (C64, C64) {
    let (j0, j1, y0, y1) = bessel01(x);
    (C64::new(j0, y0), C64::new(j1, y1))
}

/// `H^(1)_s(x)` for `s = 0..=nmax`.
///
/// `J_s` comes from its own series (small `x`) or forward recurrence (`s < x`), `Y_s` from
/// forward recurrence, which is stable for the second kind.
pub fn hankel1_orders(nmax: usize, x: f64) -> Vec<C64> {
    let (j0, j1, y0, y1) = bessel01(x);
    let mut j = vec![0.0; nmax + 1];
    let mut y = vec![0.0; nmax + 1];
    j[0] = j0;
    y[0] = y0;
    if nmax >= 1 {
        j[1] = j1;
        y[1] = y1;
    }
    for s in 1..nmax {
        y[s + 1] = 2.0 * s as f64 / x * y[s] - y[s - 1];
    }
    if x <= SERIES_LIMIT || nmax as f64 >= x {
        for s in 2..=nmax {
            j[s] = bessel_j_series(s as u32, x);
        }
    } else {
        for s in 1..nmax {
            j[s + 1] = 2.0 * s as f64 / x * j[s] - j[s - 1];
        }
    }
    j.iter().zip(&y).map(|(&a, &b)| C64::new(a, b)).collect()
}

fn bessel_j_series(n: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = (0.5 * x).powi(n as i32) / crate::multi_index::factorial(n);
    let mut sum = term;
    let mut k = 1.0;
    while term.abs() > 1e-18 * sum.abs().max(1e-300) || k < 3.0 {
        term *= q / (k * (k + n as f64));
        sum += term;
        k += 1.0;
        if k > 300.0 {
            break;
        }
    }
    sum
}

fn series01(x: f64) -> (f64, f64, f64, f64) {
    let q = 0.25 * x * x;
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    // t0 = (-q)^k/(k!)^2, t1 = (-q)^k/(k!(k+1)!)
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut j0 = 1.0;
    let mut s1 = 1.0;
    let mut h = 0.0;
    let mut y0s = 0.0;
    let mut y1s = 1.0; // k = 0 term: (H_0 + H_1) = 1
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        t0 *= -q / (kf * kf);
        t1 *= -q / (kf * (kf + 1.0));
        h += 1.0 / kf;
        j0 += t0;
        s1 += t1;
        y0s -= h * t0;
        y1s += (h + h + 1.0 / (kf + 1.0)) * t1;
        if t0.abs() * (h + 1.0) < 1e-18 && t1.abs() * (h + 2.0) < 1e-18 {
            break;
        }
        k += 1;
    }
    let j1 = 0.5 * x * s1;
    let y0 = (2.0 / PI) * (lg * j0 + y0s);
    let y1 = -2.0 / (PI * x) + (2.0 / PI) * lg * j1 - (0.5 * x / PI) * y1s;
    (j0, j1, y0, y1)
}

fn neumann01(x: f64) -> (f64, f64, f64, f64) {
    let top = 2 * ((x as usize + 40) / 2);
    let mut j = vec![0.0; top + 2];
    j[top] = 1.0;
    for n in (1..=top).rev() {
        j[n - 1] = 2.0 * n as f64 / x * j[n] - j[n + 1];
        if j[n - 1].abs() > 1e250 {
            for v in j.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = j[0];
    for k in (2..=top).step_by(2) {
        norm += 2.0 * j[k];
    }
    for v in j.iter_mut() {
        *v /= norm;
    }
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut sign = -1.0;
    let mut k = 1;
    while 2 * k < top {
        let kf = k as f64;
        s0 += sign * j[2 * k] / kf;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / kf;
        sign = -sign;
        k += 1;
    }
    let y0 = (2.0 / PI) * lg * j[0] - (4.0 / PI) * s0;
    let y1 = -2.0 / (PI * x) * j[0] + (2.0 / PI) * lg * j[1] + (2.0 / PI) * s1;
    (j[0], j[1], y0, y1)
}

fn asymptotic_order(nu: f64, x: f64) -> C64 {
    let mu = 4.0 * nu * nu;
    let mut a = 1.0;
    let mut ik = C64::new(1.0, 0.0);
    let mut sum = C64::new(1.0, 0.0);
    let mut last = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (8.0 * kf * x);
        ik *= C64::new(0.0, 1.0);
        let mag = a.abs();
        if mag > last {
            break;
        }
        sum += ik * a;
        last = mag;
        if mag < 1e-17 {
            break;
        }
    }
    let chi = x - nu * FRAC_PI_2 - FRAC_PI_4;
    let amp = (2.0 / (PI * x)).sqrt();
    C64::new(chi.cos(), chi.sin()) * sum * amp
}

fn asymptotic01(x: f64) -> (C64, C64) {
    (asymptotic_order(0.0, x), asymptotic_order(1.0, x))
}

/// Outgoing Helmholtz fundamental solution `(i/4) H^(1)_0(ω r)`.
pub fn gamma_helmholtz(omega: f64, r: f64) -> Result<C64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "wavenumber must be positive, got {omega}"
        )));
    }
    if r == 0.0 {
        return Err(Error::Singularity(
            "fundamental solution evaluated at r = 0".into(),
        ));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {r}")));
    }
    let (h0, _) = hankel01(omega * r);
    Ok(C64::new(0.0, 0.25) * h0)
}

/// Laplace fundamental solution `(1/2π) ln r`.
pub fn gamma_laplace(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {r}")));
    }
    Ok(r.ln() / (2.0 * PI))
}

/// `∂_z^β [(i/4) H^(1)_0(ω|x − z|)]` for all `|β| ≤ max_order`, indexed by [`MultiIndex::index`].
pub fn gamma_derivatives(omega: f64, x: Point, z: Point, max_order: u32) -> Result<Vec<C64>> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "wavenumber must be positive, got {omega}"
        )));
    }
    if max_order > MAX_DERIVATIVE_ORDER {
        return Err(Error::Domain(format!(
            "derivative order {max_order} exceeds {MAX_DERIVATIVE_ORDER}"
        )));
    }
    let d = [x[0] - z[0], x[1] - z[1]];
    if d[0] == 0.0 && d[1] == 0.0 {
        return Err(Error::Singularity(
            "x = z in fundamental solution derivative".into(),
        ));
    }
    let quarter_i = C64::new(0.0, 0.25);
    Ok(hankel_source_derivatives(omega, d, max_order)
        .into_iter()
        .map(|v| quarter_i * v)
        .collect())
}

/// `∂_z^β H^(1)_0(ω|x − z|)` at `d = x − z`, for `|β| ≤ max_order`.
///
/// Uses `D± = ∂1 ± i∂2`, for which `D±^s H0(ωr) = (−ω)^s H_s(ωr) e^{±isθ}` and `D+D− = −ω²`.
pub(crate) fn hankel_source_derivatives(omega: f64, d: Point, max_order: u32) -> Vec<C64> {
    let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let m = max_order as usize;
    let h = hankel1_orders(m, omega * r);
    let unit = C64::new(d[0] / r, d[1] / r);
    let mut eplus = vec![C64::new(1.0, 0.0); m + 1];
    for s in 1..=m {
        eplus[s] = eplus[s - 1] * unit;
    }
    // D+^p D-^q H0 for p + q = order
    let dpow = |p: usize, q: usize| -> C64 {
        let lo = p.min(q);
        let s = p.max(q) - lo;
        let scale = (-omega * omega).powi(lo as i32) * (-omega).powi(s as i32);
        let phase = if p >= q { eplus[s] } else { eplus[s].conj() };
        h[s] * phase * scale
    };
    let mut out = vec![C64::new(0.0, 0.0); count_up_to(max_order)];
    for (idx, slot) in out.iter_mut().enumerate() {
        let beta = MultiIndex::from_index(idx);
        let (a1, a2) = (beta.a1, beta.a2);
        let order = beta.order() as usize;
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..=a1 {
            for q in 0..=a2 {
                let sign = if (a2 - q) % 2 == 0 { 1.0 } else { -1.0 };
                let c = binomial(a1, p) * binomial(a2, q) * sign;
                let nplus = (p + q) as usize;
                acc += dpow(nplus, order - nplus) * c;
            }
        }
        // 2^{-m} i^{-a2}, then (−1)^{|β|} for the source variable
        let ipow = match a2 % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        };
        let src = if order % 2 == 0 { 1.0 } else { -1.0 };
        *slot = acc * ipow * (src / (1u64 << order) as f64);
    }
    out
}

/// Constants of the low-frequency expansion of the single layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowFreqConstants {
    pub eps_omega: f64,
    pub beta_eps_omega: C64,
    pub euler_gamma: f64,
}

impl LowFreqConstants {
    /// `β = (1/2π)(ln(εω) − ln 2 + γ − iπ/2)`.
    pub fn new(eps_omega: f64) -> Result<Self> {
        if !(eps_omega > 0.0) {
            return Err(Error::Domain(format!(
                "εω must be positive, got {eps_omega}"
            )));
        }
        let re = (eps_omega.ln() - core::f64::consts::LN_2 + EULER_GAMMA) / (2.0 * PI);
        Ok(Self {
            eps_omega,
            beta_eps_omega: C64::new(re, -0.25),
            euler_gamma: EULER_GAMMA,
        })
    }
}
