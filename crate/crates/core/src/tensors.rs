//! Frequency-dependent, classical and time-dependent polarization tensors.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::BoundaryCurve;
use crate::layer::{assemble_k_star, assemble_single_and_k_star, Density};
use crate::linalg::{CMatrix, CVector, LuSolver};
use crate::multi_index::{count_up_to, MultiIndex};
use crate::{Error, Point, Result, C64};

/// `λ = (k + 1) / (2(k − 1))`.
pub fn contrast_lambda(k: f64) -> f64 {
    (k + 1.0) / (2.0 * (k - 1.0))
}

fn check_contrast(k: f64) -> Result<()> {
    if !(k > 0.0) || k == 1.0 || !k.is_finite() {
        return Err(Error::Validation(format!(
            "contrast must be positive and ≠ 1, got {k}"
        )));
    }
    Ok(())
}

/// Transmission block operator
/// `[S^{ω/√k}, −S^ω; k(−½ + K*^{ω/√k}), −(½ + K*^ω)]` acting on `(φ, ψ)`.
pub(crate) fn transmission_matrix(curve: &BoundaryCurve, omega: f64, k: f64) -> CMatrix {
    let q = curve.len();
    let inner = omega / k.sqrt();
    let (si, ki) = assemble_single_and_k_star(curve, inner);
    let (so, ko) = assemble_single_and_k_star(curve, omega);
    let mut a = CMatrix::zeros(2 * q, 2 * q);
    a.view_mut((0, 0), (q, q)).copy_from(&si.matrix);
    a.view_mut((0, q), (q, q)).copy_from(&(-so.matrix));
    a.view_mut((q, 0), (q, q))
        .copy_from(&(ki.matrix * C64::new(k, 0.0)));
    a.view_mut((q, q), (q, q)).copy_from(&(-ko.matrix));
    for i in 0..q {
        a[(q + i, i)] -= C64::new(0.5 * k, 0.0);
        a[(q + i, q + i)] -= C64::new(0.5, 0.0);
    }
    a
}

/// Factored transmission system on a curve at one wavenumber.
#[derive(Debug, Clone)]
pub struct TransmissionSystem<'a> {
    pub curve: &'a BoundaryCurve,
    pub omega: f64,
    pub contrast: f64,
    matrix: CMatrix,
    lu: LuSolver,
}

impl<'a> TransmissionSystem<'a> {
    pub fn new(curve: &'a BoundaryCurve, omega: f64, contrast: f64) -> Result<Self> {
        check_contrast(contrast)?;
        if omega == 0.0 || !omega.is_finite() {
            return Err(Error::Domain(format!(
                "wavenumber must be nonzero and finite, got {omega}"
            )));
        }
        let matrix = transmission_matrix(curve, omega, contrast);
        let lu = LuSolver::factor(matrix.clone())?;
        Ok(Self {
            curve,
            omega,
            contrast,
            matrix,
            lu,
        })
    }

    pub fn condition(&self) -> f64 {
        self.lu.condition()
    }

    /// Solves for several right-hand sides; columns of `rhs` stack `(F, ∂F/∂ν)`.
    pub fn solve_many(&self, rhs: &CMatrix) -> CMatrix {
        self.lu.solve_matrix(rhs)
    }

    /// Relative residual of a solution.
    pub fn residual(&self, x: &CVector, rhs: &CVector) -> f64 {
        (&self.matrix * x - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE)
    }
}

/// Solution `(φ, ψ)` of the transmission system for one right-hand side.
#[derive(Debug, Clone)]
pub struct DensityPair<'a> {
    pub phi: Density<'a>,
    pub psi: Density<'a>,
    pub alpha: Option<MultiIndex>,
    /// `(exterior, interior)` wavenumbers.
    pub wavenumbers: (f64, f64),
    pub residual: f64,
}

/// Solves the transmission system on `curve` at wavenumber `eps_omega` with data `(f, g)`.
pub fn solve_density_system<'a>(
    curve: &'a BoundaryCurve,
    eps_omega: f64,
    k: f64,
    f: &[C64],
    g: &[C64],
) -> Result<DensityPair<'a>> {
    let q = curve.len();
    if f.len() != q || g.len() != q {
        return Err(Error::Validation(
            "boundary data length does not match the curve".into(),
        ));
    }
    let sys = TransmissionSystem::new(curve, eps_omega, k)?;
    let rhs = CVector::from_iterator(2 * q, f.iter().chain(g.iter()).cloned());
    let x = sys.lu.solve(&rhs);
    let residual = sys.residual(&x, &rhs);
    if !(residual < 1e-8) {
        return Err(Error::Resonance {
            condition: sys.condition(),
        });
    }
    Ok(DensityPair {
        phi: Density::new(x.rows(0, q).iter().cloned().collect(), curve)?,
        psi: Density::new(x.rows(q, q).iter().cloned().collect(), curve)?,
        alpha: None,
        wavenumbers: (eps_omega, eps_omega / k.sqrt()),
        residual,
    })
}

fn monomial_data(
    curve: &BoundaryCurve,
    center: Point,
    max_order: u32,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let p = count_up_to(max_order);
    let mut vals = vec![vec![0.0; curve.len()]; p];
    let mut dnu = vec![vec![0.0; curve.len()]; p];
    for (j, (x, n)) in curve.points().iter().zip(curve.normals()).enumerate() {
        let y = [x[0] - center[0], x[1] - center[1]];
        for a in 0..p {
            let m = MultiIndex::from_index(a);
            vals[a][j] = m.monomial(y);
            let gr = m.monomial_gradient(y);
            dnu[a][j] = gr[0] * n[0] + gr[1] * n[1];
        }
    }
    (vals, dnu)
}

/// Square table of tensor entries indexed by pairs of multi-indices in graded order.
#[derive(Debug, Clone, PartialEq)]
pub struct FdptTable {
    /// Largest `|α|` (and `|β|`) stored.
    pub order: u32,
    pub omega: f64,
    pub eps: f64,
    pub contrast: f64,
    values: Vec<C64>,
}

impl FdptTable {
    pub fn from_values(
        order: u32,
        omega: f64,
        eps: f64,
        contrast: f64,
        values: Vec<C64>,
    ) -> Result<Self> {
        let p = count_up_to(order);
        if values.len() != p * p {
            return Err(Error::Validation(format!(
                "expected {} entries, got {}",
                p * p,
                values.len()
            )));
        }
        Ok(Self {
            order,
            omega,
            eps,
            contrast,
            values,
        })
    }

    pub fn zeros(order: u32, omega: f64, eps: f64, contrast: f64) -> Self {
        let p = count_up_to(order);
        Self {
            order,
            omega,
            eps,
            contrast,
            values: vec![C64::new(0.0, 0.0); p * p],
        }
    }

    pub fn dim(&self) -> usize {
        count_up_to(self.order)
    }

    /// ε-scaled entry `𝒲_αβ = ε^{|α|+|β|} Ŵ_αβ`.
    pub fn get(&self, alpha: MultiIndex, beta: MultiIndex) -> C64 {
        self.values[alpha.index() * self.dim() + beta.index()]
    }

    pub fn set(&mut self, alpha: MultiIndex, beta: MultiIndex, v: C64) {
        let p = self.dim();
        self.values[alpha.index() * p + beta.index()] = v;
    }

    /// Unscaled entry `Ŵ_αβ` of the reference shape.
    pub fn raw(&self, alpha: MultiIndex, beta: MultiIndex) -> C64 {
        self.get(alpha, beta) / self.eps.powi((alpha.order() + beta.order()) as i32)
    }

    /// Entries in row-major graded order.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// `[[𝒲_(1,0)(1,0), 𝒲_(1,0)(0,1)], [𝒲_(0,1)(1,0), 𝒲_(0,1)(0,1)]]`.
    pub fn first_order_block(&self) -> [[C64; 2]; 2] {
        let e1 = MultiIndex::new(1, 0);
        let e2 = MultiIndex::new(0, 1);
        [
            [self.get(e1, e1), self.get(e1, e2)],
            [self.get(e2, e1), self.get(e2, e2)],
        ]
    }

    /// Table at `−ω`.
    pub fn conjugate(&self) -> Self {
        Self {
            omega: -self.omega,
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..self.clone()
        }
    }

    /// Sub-table with entries up to `order`.
    pub fn truncated(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let mut out = Self::zeros(order, self.omega, self.eps, self.contrast);
        for a in MultiIndex::up_to(order) {
            for b in MultiIndex::up_to(order) {
                out.set(a, b, self.get(a, b));
            }
        }
        out
    }
}

/// `∫ (x − c)^β ψ_α dσ` for `|α|, |β| ≤ max_order` on an arbitrary curve at wavenumber `omega`.
pub fn fdpt_on_curve(
    curve: &BoundaryCurve,
    center: Point,
    omega: f64,
    k: f64,
    max_order: u32,
) -> Result<Vec<C64>> {
    let q = curve.len();
    let p = count_up_to(max_order);
    let sys = TransmissionSystem::new(curve, omega, k)?;
    let (vals, dnu) = monomial_data(curve, center, max_order);
    let mut rhs = CMatrix::zeros(2 * q, p);
    for a in 0..p {
        for j in 0..q {
            rhs[(j, a)] = C64::new(vals[a][j], 0.0);
            rhs[(q + j, a)] = C64::new(dnu[a][j], 0.0);
        }
    }
    let x = sys.solve_many(&rhs);
    let w = curve.weights();
    let mut out = vec![C64::new(0.0, 0.0); p * p];
    for a in 0..p {
        for b in 0..p {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..q {
                acc += x[(q + j, a)] * (vals[b][j] * w[j]);
            }
            out[a * p + b] = acc;
        }
    }
    Ok(out)
}

/// FDPTs of `D = εB` at frequency `omega` for `|α|, |β| ≤ n + 1`, stored ε-scaled.
pub fn compute_fdpt(
    base: &BoundaryCurve,
    eps: f64,
    omega: f64,
    k: f64,
    n: u32,
) -> Result<FdptTable> {
    if !(eps > 0.0) {
        return Err(Error::Validation(format!(
            "scale must be positive, got {eps}"
        )));
    }
    let order = n + 1;
    let raw = fdpt_on_curve(base, [0.0, 0.0], eps * omega, k, order)?;
    let p = count_up_to(order);
    let values = raw
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let s = MultiIndex::from_index(i / p).order() + MultiIndex::from_index(i % p).order();
            v * eps.powi(s as i32)
        })
        .collect();
    FdptTable::from_values(order, omega, eps, k, values)
}

/// Classical polarization tensors `M_αβ` for `1 ≤ |α|, |β| ≤ n` (zero rows/columns at order 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PtTable {
    pub order: u32,
    pub lambda: f64,
    values: Vec<f64>,
}

impl PtTable {
    pub fn get(&self, alpha: MultiIndex, beta: MultiIndex) -> f64 {
        self.values[alpha.index() * count_up_to(self.order) + beta.index()]
    }

    pub fn first_order_block(&self) -> [[f64; 2]; 2] {
        let e1 = MultiIndex::new(1, 0);
        let e2 = MultiIndex::new(0, 1);
        [
            [self.get(e1, e1), self.get(e1, e2)],
            [self.get(e2, e1), self.get(e2, e2)],
        ]
    }
}

/// `M_αβ = ∫ x^β (λI − K*)^{-1}[∂x^α/∂ν] dσ` on the curve (moments about the origin).
pub fn compute_classical_pt(curve: &BoundaryCurve, k: f64, n: u32) -> Result<PtTable> {
    check_contrast(k)?;
    let q = curve.len();
    let lambda = contrast_lambda(k);
    let ks = assemble_k_star(curve, 0.0).matrix;
    let mut a = -ks;
    for i in 0..q {
        a[(i, i)] += C64::new(lambda, 0.0);
    }
    let lu = LuSolver::factor(a)?;
    let p = count_up_to(n);
    let (vals, dnu) = monomial_data(curve, [0.0, 0.0], n);
    let mut rhs = CMatrix::zeros(q, p);
    for a in 0..p {
        for j in 0..q {
            rhs[(j, a)] = C64::new(dnu[a][j], 0.0);
        }
    }
    let x = lu.solve_matrix(&rhs);
    let w = curve.weights();
    let mut values = vec![0.0; p * p];
    for a in 0..p {
        for b in 0..p {
            values[a * p + b] = (0..q).map(|j| x[(j, a)].re * vals[b][j] * w[j]).sum();
        }
    }
    Ok(PtTable {
        order: n,
        lambda,
        values,
    })
}

/// `ψ_ρ(t) = 2 sin(ρt)/t`, with `ψ_ρ(0) = 2ρ`.
pub fn psi_rho(rho: f64, t: f64) -> f64 {
    if t.abs() < 1e-8 / rho.max(1e-300) {
        2.0 * rho * (1.0 - (rho * t).powi(2) / 6.0)
    } else {
        2.0 * (rho * t).sin() / t
    }
}

/// `−ψ_ρ''(t) = ∫_{|ω|≤ρ} ω² e^{−iωt} dω`.
pub fn psi_rho_second_moment(rho: f64, t: f64) -> f64 {
    let x = rho * t;
    if x.abs() < 1e-2 {
        // series of 2ρ³ (1/3 − x²/10 + x⁴/168)
        2.0 * rho.powi(3) * (1.0 / 3.0 - x * x / 10.0 + x.powi(4) / 168.0)
    } else {
        2.0 * (x * x * x.sin() + 2.0 * x * x.cos() - 2.0 * x.sin()) / t.powi(3)
    }
}

/// Symmetric frequency set `±lρ/L` for `l0 ≤ l ≤ L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencySet {
    pub rho: f64,
    /// `L`: number of grid steps in `(0, ρ]`.
    pub l_count: usize,
    /// Smallest retained index; frequencies with `|ω| < l0·ρ/L` are excluded.
    pub l0: usize,
}

impl FrequencySet {
    /// Grid spacing `ρ/L`, keeping `|ω| ≥ rho0` (`rho0` is rounded to the grid, at least one step).
    pub fn new(rho: f64, l_count: usize, rho0: f64) -> Result<Self> {
        if !(rho > 0.0) || l_count == 0 {
            return Err(Error::Validation(
                "frequency set needs ρ > 0 and L ≥ 1".into(),
            ));
        }
        let h = rho / l_count as f64;
        let l0 = ((rho0 / h).round() as usize).max(1);
        if l0 > l_count {
            return Err(Error::Validation(
                "low-frequency exclusion removes every frequency".into(),
            ));
        }
        Ok(Self { rho, l_count, l0 })
    }

    /// Default exclusion of one grid step.
    pub fn with_default_exclusion(rho: f64, l_count: usize) -> Result<Self> {
        Self::new(rho, l_count, rho / l_count as f64)
    }

    pub fn spacing(&self) -> f64 {
        self.rho / self.l_count as f64
    }

    pub fn rho0(&self) -> f64 {
        self.l0 as f64 * self.spacing()
    }

    /// Positive frequencies in increasing order.
    pub fn positive(&self) -> Vec<f64> {
        (self.l0..=self.l_count)
            .map(|l| l as f64 * self.spacing())
            .collect()
    }

    /// Total number of frequencies, both signs.
    pub fn len(&self) -> usize {
        2 * (self.l_count - self.l0 + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Trapezoid weights on the sorted symmetric set; the excluded gap is bridged by one panel.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let m = self.l_count - self.l0 + 1;
        let mut w = vec![h; m];
        if m == 1 {
            w[0] = h / 2.0 + self.rho0();
            return w;
        }
        w[0] = h / 2.0 + self.rho0();
        w[m - 1] = h / 2.0;
        w
    }

    /// `Σ_ω w(ω) e^{−iωt} f(ω)` over both signs, with `f(−ω) = conj f(ω)`.
    pub fn transform(&self, positive_values: &[C64], t: f64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for ((om, w), v) in self
            .positive()
            .iter()
            .zip(self.weights())
            .zip(positive_values)
        {
            let e = C64::new((om * t).cos(), -(om * t).sin());
            acc += (e * v + e.conj() * v.conj()) * w;
        }
        acc
    }

    /// Discrete transform of the constant 1.
    pub fn kernel0(&self, t: f64) -> f64 {
        let ones = vec![C64::new(1.0, 0.0); self.len() / 2];
        self.transform(&ones, t).re
    }

    /// Discrete transform of `ω²`.
    pub fn kernel2(&self, t: f64) -> f64 {
        let sq: Vec<C64> = self
            .positive()
            .iter()
            .map(|w| C64::new(w * w, 0.0))
            .collect();
        self.transform(&sq, t).re
    }
}

/// Default observation window: 512 uniform samples of `[0, 5]`.
pub fn default_time_grid() -> Vec<f64> {
    uniform_grid(0.0, 5.0, 512)
}

pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Truncated time-domain tensors `P_ρ[𝒲_αβ](t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TdptTable {
    pub times: Vec<f64>,
    pub freqs: FrequencySet,
    pub order: u32,
    /// One time series per `(α, β)`, row-major graded order.
    signals: Vec<Vec<C64>>,
}

impl TdptTable {
    pub fn from_signals(
        times: Vec<f64>,
        freqs: FrequencySet,
        order: u32,
        signals: Vec<Vec<C64>>,
    ) -> Result<Self> {
        let p = count_up_to(order);
        if signals.len() != p * p || signals.iter().any(|s| s.len() != times.len()) {
            return Err(Error::Validation("signal table shape mismatch".into()));
        }
        Ok(Self {
            times,
            freqs,
            order,
            signals,
        })
    }

    pub fn dim(&self) -> usize {
        count_up_to(self.order)
    }

    pub fn signal(&self, alpha: MultiIndex, beta: MultiIndex) -> &[C64] {
        &self.signals[alpha.index() * self.dim() + beta.index()]
    }

    pub fn signals(&self) -> &[Vec<C64>] {
        &self.signals
    }

    pub fn rho(&self) -> f64 {
        self.freqs.rho
    }
}

fn check_grid(tables: &[FdptTable], freqs: &FrequencySet) -> Result<u32> {
    if tables.is_empty() {
        return Err(Error::Validation("empty frequency set".into()));
    }
    let pos = freqs.positive();
    if pos.len() != tables.len() {
        return Err(Error::Validation(format!(
            "{} tables for {} positive frequencies",
            tables.len(),
            pos.len()
        )));
    }
    for (t, w) in tables.iter().zip(&pos) {
        if (t.omega - w).abs() > 1e-9 * w.abs().max(1.0) {
            return Err(Error::Validation(format!(
                "table at ω={} does not match grid ω={w}",
                t.omega
            )));
        }
    }
    Ok(tables.iter().map(|t| t.order).min().unwrap_or(0))
}

/// DFT aggregation of per-frequency tables at the positive frequencies of `freqs`.
pub fn compute_tdpt(
    tables: &[FdptTable],
    freqs: &FrequencySet,
    times: &[f64],
) -> Result<TdptTable> {
    let order = check_grid(tables, freqs)?;
    let p = count_up_to(order);
    let pos = freqs.positive();
    let w = freqs.weights();
    // e^{−iω_l t} for all (l, t)
    let phases: Vec<Vec<C64>> = pos
        .iter()
        .map(|om| {
            times
                .iter()
                .map(|t| C64::new((om * t).cos(), -(om * t).sin()))
                .collect()
        })
        .collect();
    let mut signals = Vec::with_capacity(p * p);
    for ai in 0..p {
        for bi in 0..p {
            let (a, b) = (MultiIndex::from_index(ai), MultiIndex::from_index(bi));
            let mut s = vec![C64::new(0.0, 0.0); times.len()];
            for (l, tab) in tables.iter().enumerate() {
                let v = tab.get(a, b);
                for (ti, e) in phases[l].iter().enumerate() {
                    s[ti] += (e * v + e.conj() * v.conj()) * w[l];
                }
            }
            signals.push(s);
        }
    }
    TdptTable::from_signals(times.to_vec(), *freqs, order, signals)
}
