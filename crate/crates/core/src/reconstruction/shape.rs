//! Recovery of fine shape details by descent on the time-domain discrepancy.
//!
//! The optimizer works in the normalized frame `B = (D − z)/ε̂` with `ε̂ = √|D|`, and a harmonic
//! contraction of total degree `s` is divided by `ε̂^s` so that all orders are compared at unit
//! scale. Noise in the measured contractions grows like `ε̂^{−s}`, which is why the default
//! schedule stops at total degree 3.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{perturb, BoundaryCurve, EquivalentEllipse};
use crate::layer::{
    assemble_double_layer, assemble_k_star, assemble_single_layer, complexify, shifted, Density,
};
use crate::linalg::{pseudo_inverse, CMatrix, CVector, LuSolver};
use crate::multi_index::{binomial, count_up_to, MultiIndex};
use crate::spectral::differentiate;
use crate::tensors::{contrast_lambda, fdpt_on_curve, FrequencySet, TdptTable};
use crate::{Error, Point, Result, C64};

/// Harmonic polynomial `Σ c_α x^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPolynomial {
    pub degree: u32,
    pub coeffs: Vec<(MultiIndex, f64)>,
}

impl HarmonicPolynomial {
    pub fn eval(&self, x: Point) -> f64 {
        self.coeffs.iter().map(|(a, c)| c * a.monomial(x)).sum()
    }

    pub fn gradient(&self, x: Point) -> [f64; 2] {
        self.coeffs.iter().fold([0.0, 0.0], |acc, (a, c)| {
            let g = a.monomial_gradient(x);
            [acc[0] + c * g[0], acc[1] + c * g[1]]
        })
    }

    /// Coefficients of `Δp` in the monomial basis (empty for a harmonic polynomial).
    pub fn laplacian(&self) -> Vec<(MultiIndex, f64)> {
        let mut out: Vec<(MultiIndex, f64)> = Vec::new();
        let mut add = |m: MultiIndex, v: f64| match out.iter_mut().find(|(a, _)| *a == m) {
            Some(e) => e.1 += v,
            None => out.push((m, v)),
        };
        for &(a, c) in &self.coeffs {
            if a.a1 >= 2 {
                add(
                    MultiIndex::new(a.a1 - 2, a.a2),
                    c * (a.a1 * (a.a1 - 1)) as f64,
                );
            }
            if a.a2 >= 2 {
                add(
                    MultiIndex::new(a.a1, a.a2 - 2),
                    c * (a.a2 * (a.a2 - 1)) as f64,
                );
            }
        }
        out.retain(|(_, v)| *v != 0.0);
        out
    }
}

/// `[Re (x₁ + i x₂)^m, Im (x₁ + i x₂)^m]` for `m = 1..=k`.
pub fn harmonic_coefficients(k: u32) -> Result<Vec<[HarmonicPolynomial; 2]>> {
    if !(1..=6).contains(&k) {
        return Err(Error::Validation(format!(
            "harmonic order must lie in 1..=6, got {k}"
        )));
    }
    Ok((1..=k)
        .map(|m| {
            let mut re = Vec::new();
            let mut im = Vec::new();
            for j in 0..=m {
                // i^j
                let c = binomial(m, j);
                let a = MultiIndex::new(m - j, j);
                match j % 4 {
                    0 => re.push((a, c)),
                    1 => im.push((a, c)),
                    2 => re.push((a, -c)),
                    _ => im.push((a, -c)),
                }
            }
            [
                HarmonicPolynomial {
                    degree: m,
                    coeffs: re,
                },
                HarmonicPolynomial {
                    degree: m,
                    coeffs: im,
                },
            ]
        })
        .collect())
}

/// Factored static operators on one curve, reused across harmonic pairs.
pub struct HfSolver<'a> {
    curve: &'a BoundaryCurve,
    contrast: f64,
    s: CMatrix,
    kstar: CMatrix,
    k: CMatrix,
    inv_star: LuSolver,
    inv_k: LuSolver,
}

/// Interior normal and tangential derivatives at the nodes.
#[derive(Debug, Clone)]
pub struct InteriorTraces {
    pub normal: Vec<f64>,
    pub tangential: Vec<f64>,
}

fn re(v: &CVector) -> Vec<f64> {
    v.iter().map(|x| x.re).collect()
}

impl<'a> HfSolver<'a> {
    pub fn new(curve: &'a BoundaryCurve, contrast: f64) -> Result<Self> {
        if !(contrast > 0.0) || contrast == 1.0 || !contrast.is_finite() {
            return Err(Error::Validation(format!(
                "contrast must be positive and ≠ 1, got {contrast}"
            )));
        }
        let lambda = contrast_lambda(contrast);
        let s = assemble_single_layer(curve, 0.0).matrix;
        let kstar = assemble_k_star(curve, 0.0).matrix;
        let k = assemble_double_layer(curve).matrix;
        let inv_star = LuSolver::factor(shifted(&(-&kstar), lambda))?;
        let inv_k = LuSolver::factor(shifted(&(-&k), lambda))?;
        Ok(Self {
            curve,
            contrast,
            s,
            kstar,
            k,
            inv_star,
            inv_k,
        })
    }

    fn d_ds(&self, values: &[f64]) -> Vec<f64> {
        differentiate(values)
            .iter()
            .zip(self.curve.speed())
            .map(|(d, s)| d / s)
            .collect()
    }

    /// Traces of `u = H + S[(λ − K*)⁻¹ ∂H/∂ν]`.
    pub fn traces_u(&self, h: &HarmonicPolynomial) -> InteriorTraces {
        let pts = self.curve.points();
        let nrm = self.curve.normals();
        let hv: Vec<f64> = pts.iter().map(|&p| h.eval(p)).collect();
        let dh: Vec<f64> = pts
            .iter()
            .zip(nrm)
            .map(|(&p, n)| {
                let g = h.gradient(p);
                g[0] * n[0] + g[1] * n[1]
            })
            .collect();
        let phi = self.inv_star.solve(&CVector::from_vec(complexify(&dh)));
        let kphi = re(&(&self.kstar * &phi));
        let sphi = re(&(&self.s * &phi));
        let phi = re(&phi);
        let normal = (0..dh.len())
            .map(|j| dh[j] - 0.5 * phi[j] + kphi[j])
            .collect();
        let trace: Vec<f64> = hv.iter().zip(&sphi).map(|(a, b)| a + b).collect();
        InteriorTraces {
            normal,
            tangential: self.d_ds(&trace),
        }
    }

    /// Traces of `v = F + 𝒟[(λ − K)⁻¹ F]`.
    pub fn traces_v(&self, f: &HarmonicPolynomial) -> InteriorTraces {
        let pts = self.curve.points();
        let nrm = self.curve.normals();
        let fv: Vec<f64> = pts.iter().map(|&p| f.eval(p)).collect();
        let df: Vec<f64> = pts
            .iter()
            .zip(nrm)
            .map(|(&p, n)| {
                let g = f.gradient(p);
                g[0] * n[0] + g[1] * n[1]
            })
            .collect();
        let g = re(&self.inv_k.solve(&CVector::from_vec(complexify(&fv))));
        let kg = re(&(&self.k * &CVector::from_vec(complexify(&g))));
        let trace: Vec<f64> = (0..g.len()).map(|j| fv[j] + 0.5 * g[j] + kg[j]).collect();
        // normal derivative of the double layer: d/ds S[dg/ds]
        let dg = self.d_ds(&g);
        let sdg = re(&(&self.s * &CVector::from_vec(complexify(&dg))));
        let hyper = self.d_ds(&sdg);
        let normal = (0..g.len()).map(|j| df[j] + hyper[j]).collect();
        InteriorTraces {
            normal,
            tangential: self.d_ds(&trace),
        }
    }

    /// `(k − 1)[∂v/∂ν ∂u/∂ν + (1/k) ∂u/∂T ∂v/∂T]` from precomputed traces.
    pub fn combine(&self, u: &InteriorTraces, v: &InteriorTraces) -> Vec<f64> {
        let k = self.contrast;
        (0..u.normal.len())
            .map(|j| {
                (k - 1.0) * (v.normal[j] * u.normal[j] + u.tangential[j] * v.tangential[j] / k)
            })
            .collect()
    }
}

/// Shape sensitivity density `φ̂_HF` of the contraction `Σ a_α b_β M_αβ`.
pub fn phi_hf<'a>(
    curve: &'a BoundaryCurve,
    k: f64,
    h: &HarmonicPolynomial,
    f: &HarmonicPolynomial,
) -> Result<Density<'a>> {
    let solver = HfSolver::new(curve, k)?;
    let vals = solver.combine(&solver.traces_u(h), &solver.traces_v(f));
    Density::new(complexify(&vals), curve)
}

/// Fourier basis `1, cos(jt), sin(jt)` for `j = 1..=order` at the curve nodes.
pub fn fourier_basis(curve: &BoundaryCurve, order: u32) -> Vec<Vec<f64>> {
    let q = curve.len();
    let mut out = vec![vec![1.0; q]];
    for j in 1..=order {
        let jf = j as f64;
        out.push((0..q).map(|i| (jf * curve.param(i)).cos()).collect());
        out.push((0..q).map(|i| (jf * curve.param(i)).sin()).collect());
    }
    out
}

/// Descent direction rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// `−J/Σ⟨d_S J, ψ_j⟩² · Σ⟨d_S J, ψ_j⟩ψ_j`.
    Gradient,
    /// Gauss–Newton step in the span of the basis.
    GaussNewton,
}

/// Measured reference and evaluation machinery for the discrepancy.
#[derive(Debug, Clone)]
pub struct ShapeProblem {
    pub freqs: FrequencySet,
    pub times: Vec<f64>,
    pub contrast: f64,
    /// `ε̂`, the length scale of the normalized frame.
    pub scale: f64,
    /// Largest harmonic degree available in the data.
    pub max_degree: u32,
    harmonics: Vec<HarmonicPolynomial>,
    measured: Vec<Vec<f64>>,
    time_weights: Vec<f64>,
    envelope: Vec<f64>,
    /// `2 w_l cos(ω_l t)` and `2 w_l sin(ω_l t)` per frequency and time.
    phase: Vec<(Vec<f64>, Vec<f64>)>,
}

fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0; n];
    for i in 1..n {
        let h = 0.5 * (times[i] - times[i - 1]);
        w[i - 1] += h;
        w[i] += h;
    }
    w
}

impl ShapeProblem {
    /// `scale = √|D|`; the measured table must hold every entry up to `max_degree`.
    pub fn new(measured: &TdptTable, contrast: f64, scale: f64, max_degree: u32) -> Result<Self> {
        if measured.order < max_degree {
            return Err(Error::Validation(format!(
                "measured tensors of order {} cannot support harmonic degree {max_degree}",
                measured.order
            )));
        }
        if !(scale > 0.0) {
            return Err(Error::Validation(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if measured.times.len() < 2 {
            return Err(Error::Validation(
                "at least two time samples are needed".into(),
            ));
        }
        let harmonics: Vec<HarmonicPolynomial> = harmonic_coefficients(max_degree)?
            .into_iter()
            .flat_map(|[c, s]| [c, s])
            .collect();
        let times = measured.times.clone();
        let freqs = measured.freqs;
        let mut meas = Vec::with_capacity(harmonics.len() * harmonics.len());
        for h in &harmonics {
            for f in &harmonics {
                let norm = scale.powi((h.degree + f.degree) as i32);
                let mut s = vec![0.0; times.len()];
                for (a, ca) in &h.coeffs {
                    for (b, cb) in &f.coeffs {
                        for (acc, v) in s.iter_mut().zip(measured.signal(*a, *b)) {
                            *acc += ca * cb * v.re / norm;
                        }
                    }
                }
                meas.push(s);
            }
        }
        let w = freqs.weights();
        let phase = freqs
            .positive()
            .iter()
            .zip(&w)
            .map(|(om, wl)| {
                (
                    times.iter().map(|t| 2.0 * wl * (om * t).cos()).collect(),
                    times.iter().map(|t| 2.0 * wl * (om * t).sin()).collect(),
                )
            })
            .collect();
        Ok(Self {
            time_weights: trapezoid_weights(&times),
            envelope: times.iter().map(|&t| freqs.kernel0(t)).collect(),
            freqs,
            times,
            contrast,
            scale,
            max_degree,
            harmonics,
            measured: meas,
            phase,
        })
    }

    pub fn harmonics(&self) -> &[HarmonicPolynomial] {
        &self.harmonics
    }

    /// Index pairs `(i, j)` into [`Self::harmonics`] with `deg_i + deg_j ≤ order`.
    pub fn pairs(&self, order: u32) -> Vec<(usize, usize)> {
        let n = self.harmonics.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.harmonics[i].degree + self.harmonics[j].degree <= order {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Measured contraction for harmonic pair `(i, j)`, divided by `ε̂^{m+l}`.
    pub fn measured_signal(&self, i: usize, j: usize) -> &[f64] {
        &self.measured[i * self.harmonics.len() + j]
    }

    /// Contractions of the candidate `z + ε̂·curve` for the given pairs, divided by `ε̂^{m+l}`.
    pub fn candidate_signals(
        &self,
        curve: &BoundaryCurve,
        pairs: &[(usize, usize)],
    ) -> Result<Vec<Vec<f64>>> {
        let p = count_up_to(self.max_degree);
        let nt = self.times.len();
        let mut out = vec![vec![0.0; nt]; pairs.len()];
        for (l, om) in self.freqs.positive().iter().enumerate() {
            let raw = fdpt_on_curve(
                curve,
                [0.0, 0.0],
                self.scale * om,
                self.contrast,
                self.max_degree,
            )?;
            let (pc, ps) = &self.phase[l];
            for (o, &(i, j)) in out.iter_mut().zip(pairs) {
                let mut c = C64::new(0.0, 0.0);
                for (a, ca) in &self.harmonics[i].coeffs {
                    for (b, cb) in &self.harmonics[j].coeffs {
                        c += raw[a.index() * p + b.index()] * (ca * cb);
                    }
                }
                for t in 0..nt {
                    o[t] += pc[t] * c.re + ps[t] * c.im;
                }
            }
        }
        Ok(out)
    }

    fn residuals(
        &self,
        curve: &BoundaryCurve,
        order: u32,
    ) -> Result<(Vec<(usize, usize)>, Vec<Vec<f64>>)> {
        let pairs = self.pairs(order);
        let mut cand = self.candidate_signals(curve, &pairs)?;
        for (c, &(i, j)) in cand.iter_mut().zip(&pairs) {
            for (v, m) in c.iter_mut().zip(self.measured_signal(i, j)) {
                *v -= m;
            }
        }
        Ok((pairs, cand))
    }

    fn norm2(&self, r: &[f64]) -> f64 {
        r.iter()
            .zip(&self.time_weights)
            .map(|(v, w)| v * v * w)
            .sum()
    }

    /// `J^(K)`: squared residuals of all pairs with total degree ≤ `order`, integrated in `t`.
    pub fn discrepancy(&self, curve: &BoundaryCurve, order: u32) -> Result<f64> {
        let (_, res) = self.residuals(curve, order)?;
        Ok(res.iter().map(|r| self.norm2(r)).sum())
    }

    /// Residual projections and per-pair shape derivatives along `basis`.
    pub fn sensitivities(
        &self,
        curve: &BoundaryCurve,
        order: u32,
        basis: &[Vec<f64>],
    ) -> Result<Sensitivities> {
        let (pairs, res) = self.residuals(curve, order)?;
        let discrepancy = res.iter().map(|r| self.norm2(r)).sum();
        let solver = HfSolver::new(curve, self.contrast)?;
        let n = self.harmonics.len();
        let mut ut: Vec<Option<InteriorTraces>> = vec![None; n];
        let mut vt: Vec<Option<InteriorTraces>> = vec![None; n];
        let w = curve.weights();
        let mut projections = Vec::with_capacity(pairs.len());
        let mut derivatives = Vec::with_capacity(pairs.len());
        for (r, &(i, k)) in res.iter().zip(&pairs) {
            // ∫ r(t) K₀(t) dt
            let proj: f64 = r
                .iter()
                .zip(&self.envelope)
                .zip(&self.time_weights)
                .map(|((a, b), c)| a * b * c)
                .sum();
            let u = ut[i].get_or_insert_with(|| solver.traces_u(&self.harmonics[i]));
            let v = vt[k].get_or_insert_with(|| solver.traces_v(&self.harmonics[k]));
            let phi = solver.combine(u, v);
            let d: Vec<f64> = basis
                .iter()
                .map(|psi| {
                    psi.iter()
                        .zip(&phi)
                        .zip(&w)
                        .map(|((a, b), c)| a * b * c)
                        .sum::<f64>()
                })
                .collect();
            projections.push(proj);
            derivatives.push(d);
        }
        Ok(Sensitivities {
            discrepancy,
            projections,
            derivatives,
            envelope_norm: self.norm2(&self.envelope),
        })
    }

    /// `(J, ⟨d_S J, ψ_j⟩)` for the supplied boundary functions.
    pub fn gradient(
        &self,
        curve: &BoundaryCurve,
        order: u32,
        basis: &[Vec<f64>],
    ) -> Result<(f64, Vec<f64>)> {
        let s = self.sensitivities(curve, order, basis)?;
        Ok((s.discrepancy, s.gradient()))
    }
}

/// First-order model of the residuals: `δr_p(t) ≈ K₀(t) Σ_j c_j d_pj` for `h = Σ c_j ψ_j`.
#[derive(Debug, Clone)]
pub struct Sensitivities {
    pub discrepancy: f64,
    /// `∫ r_p K₀ dt` per pair.
    pub projections: Vec<f64>,
    /// `d_pj = ∫ ψ_j φ̂_HF dσ` per pair.
    pub derivatives: Vec<Vec<f64>>,
    /// `∫ K₀² dt`.
    pub envelope_norm: f64,
}

impl Sensitivities {
    pub fn gradient(&self) -> Vec<f64> {
        let nb = self.derivatives.first().map_or(0, |d| d.len());
        let mut g = vec![0.0; nb];
        for (p, d) in self.projections.iter().zip(&self.derivatives) {
            for (gj, dj) in g.iter_mut().zip(d) {
                *gj += 2.0 * p * dj;
            }
        }
        g
    }

    /// Coefficients minimizing the linearized discrepancy.
    pub fn gauss_newton(&self) -> Vec<f64> {
        let nb = self.derivatives.first().map_or(0, |d| d.len());
        let mut a = CMatrix::zeros(nb, nb);
        let mut b = CMatrix::zeros(nb, 1);
        for (p, d) in self.projections.iter().zip(&self.derivatives) {
            for j in 0..nb {
                b[(j, 0)] -= C64::new(p * d[j], 0.0);
                for k in 0..nb {
                    a[(j, k)] += C64::new(self.envelope_norm * d[j] * d[k], 0.0);
                }
            }
        }
        let (pinv, _) = pseudo_inverse(&a, 1e-10);
        (pinv * b).iter().map(|v| v.re).collect()
    }
}

/// One entry of the optimizer log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub order: u32,
    pub discrepancy: f64,
    /// Fraction of the full step that was accepted (`0` for the initial state of a stage).
    pub step_scale: f64,
}

/// Current candidate in the normalized frame.
#[derive(Debug, Clone)]
pub struct ShapeState {
    pub curve: BoundaryCurve,
    pub order: u32,
    pub discrepancy: f64,
    /// Area of the initial guess, for the area guard.
    pub reference_area: f64,
    pub history: Vec<StepRecord>,
}

impl ShapeState {
    pub fn new(problem: &ShapeProblem, curve: BoundaryCurve, order: u32) -> Result<Self> {
        let discrepancy = problem.discrepancy(&curve, order)?;
        let reference_area = curve.area();
        Ok(Self {
            curve,
            order,
            discrepancy,
            reference_area,
            history: vec![StepRecord {
                order,
                discrepancy,
                step_scale: 0.0,
            }],
        })
    }

    /// Same curve re-evaluated at another harmonic order.
    pub fn with_order(&self, problem: &ShapeProblem, order: u32) -> Result<Self> {
        let discrepancy = problem.discrepancy(&self.curve, order)?;
        let mut history = self.history.clone();
        history.push(StepRecord {
            order,
            discrepancy,
            step_scale: 0.0,
        });
        Ok(Self {
            curve: self.curve.clone(),
            order,
            discrepancy,
            reference_area: self.reference_area,
            history,
        })
    }
}

const MAX_HALVINGS: u32 = 8;
const AREA_GUARD: (f64, f64) = (0.5, 2.0);

enum StepOutcome {
    Accepted(ShapeState),
    /// Valid trial curves existed but none decreased `J`.
    Stalled,
    Invalid(alloc::string::String),
}

fn try_step(problem: &ShapeProblem, state: &ShapeState, rule: StepRule) -> Result<StepOutcome> {
    if state.discrepancy == 0.0 {
        return Ok(StepOutcome::Accepted(state.clone()));
    }
    let basis = fourier_basis(&state.curve, state.order);
    let sens = problem.sensitivities(&state.curve, state.order, &basis)?;
    let g = sens.gradient();
    let gg: f64 = g.iter().map(|v| v * v).sum();
    if gg == 0.0 {
        return Ok(StepOutcome::Accepted(state.clone()));
    }
    let coeffs: Vec<f64> = match rule {
        StepRule::Gradient => g.iter().map(|gj| -sens.discrepancy / gg * gj).collect(),
        StepRule::GaussNewton => sens.gauss_newton(),
    };
    let q = state.curve.len();
    let mut h = vec![0.0; q];
    for (c, psi) in coeffs.iter().zip(&basis) {
        for (hv, p) in h.iter_mut().zip(psi) {
            *hv += c * p;
        }
    }
    let mut any_valid = false;
    let mut last_err = alloc::string::String::new();
    let mut scale = 1.0;
    for _ in 0..=MAX_HALVINGS {
        match perturb(&state.curve, &h, scale) {
            Ok(curve) => {
                let ratio = curve.area() / state.reference_area;
                if ratio < AREA_GUARD.0 || ratio > AREA_GUARD.1 {
                    last_err = format!("area ratio {ratio} outside the guard");
                } else {
                    any_valid = true;
                    let jn = problem.discrepancy(&curve, state.order)?;
                    if jn < state.discrepancy {
                        let mut history = state.history.clone();
                        history.push(StepRecord {
                            order: state.order,
                            discrepancy: jn,
                            step_scale: scale,
                        });
                        return Ok(StepOutcome::Accepted(ShapeState {
                            curve,
                            order: state.order,
                            discrepancy: jn,
                            reference_area: state.reference_area,
                            history,
                        }));
                    }
                }
            }
            Err(e) => last_err = format!("{e}"),
        }
        scale *= 0.5;
    }
    Ok(if any_valid {
        StepOutcome::Stalled
    } else {
        StepOutcome::Invalid(last_err)
    })
}

/// One normalized descent step along `−Σ⟨d_S J, ψ_j⟩ψ_j ν`, halved until `J` decreases.
pub fn shape_gradient_step(problem: &ShapeProblem, state: &ShapeState) -> Result<ShapeState> {
    match try_step(problem, state, StepRule::Gradient)? {
        StepOutcome::Accepted(s) => Ok(s),
        StepOutcome::Stalled => Err(Error::StepFailure(format!(
            "no decrease of J after {MAX_HALVINGS} halvings"
        ))),
        StepOutcome::Invalid(msg) => Err(Error::StepFailure(format!(
            "every trial curve was rejected after {MAX_HALVINGS} halvings: {msg}"
        ))),
    }
}

/// Optimizer parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    /// Final harmonic order `K_max`; stages run for `K = 2..=K_max`.
    pub k_max: u32,
    pub max_iterations: usize,
    pub rel_tol: f64,
    /// Node count of the working curve.
    pub nodes: usize,
    pub step_rule: StepRule,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            k_max: 3,
            max_iterations: 30,
            rel_tol: 1e-6,
            nodes: 64,
            step_rule: StepRule::Gradient,
        }
    }
}

/// Result of [`optimize_shape`].
#[derive(Debug, Clone)]
pub struct ShapeReconstruction {
    /// Final boundary in physical coordinates.
    pub curve: BoundaryCurve,
    /// Initial guess in physical coordinates.
    pub initial: BoundaryCurve,
    pub state: ShapeState,
}

/// Staged descent from the equivalent ellipse, increasing `K` from 2 to `k_max`.
pub fn optimize_shape(
    problem: &ShapeProblem,
    init: &EquivalentEllipse,
    schedule: &Schedule,
) -> Result<ShapeReconstruction> {
    optimize_shape_observed(problem, init, schedule, &mut |_| {})
}

/// [`optimize_shape`] that hands every state (initial, each accepted step, each order change)
/// to `observer`. States are in the normalized frame.
pub fn optimize_shape_observed(
    problem: &ShapeProblem,
    init: &EquivalentEllipse,
    schedule: &Schedule,
    observer: &mut dyn FnMut(&ShapeState),
) -> Result<ShapeReconstruction> {
    if schedule.k_max < 2 || schedule.k_max > 2 * problem.max_degree {
        return Err(Error::Validation(format!(
            "k_max must lie in 2..={}, got {}",
            2 * problem.max_degree,
            schedule.k_max
        )));
    }
    let s = problem.scale;
    let normalized = EquivalentEllipse::new(init.a / s, init.b / s, init.theta, [0.0, 0.0])?;
    let start = normalized.to_curve(schedule.nodes)?;
    let mut state = ShapeState::new(problem, start.clone(), 2)?;
    observer(&state);
    for order in 2..=schedule.k_max {
        if order > 2 {
            state = state.with_order(problem, order)?;
            observer(&state);
        }
        for _ in 0..schedule.max_iterations {
            let before = state.discrepancy;
            match try_step(problem, &state, schedule.step_rule)? {
                StepOutcome::Accepted(next) => {
                    state = next;
                    observer(&state);
                }
                StepOutcome::Stalled => break,
                StepOutcome::Invalid(msg) => return Err(Error::StepFailure(msg)),
            }
            if before == 0.0 || (before - state.discrepancy) / before < schedule.rel_tol {
                break;
            }
        }
    }
    Ok(ShapeReconstruction {
        curve: state.curve.scaled_translated(s, init.center)?,
        initial: start.scaled_translated(s, init.center)?,
        state,
    })
}
