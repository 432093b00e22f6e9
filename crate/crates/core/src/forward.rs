//! Scattered fields of a small inclusion: full boundary-element solution, asymptotic model, MSR data.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{BoundaryCurve, Inclusion};
use crate::layer::green;
use crate::linalg::{CMatrix, LuSolver};
use crate::multi_index::MultiIndex;
use crate::special::{bessel01, gamma_derivatives};
use crate::tensors::{transmission_matrix, FdptTable};
use crate::{Error, Point, Result, C64};

/// Arrangement of the transmitter/receiver arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    Circle,
    Square,
    Custom,
}

/// Transmitters `y_j` and receivers `x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceReceiverLayout {
    pub transmitters: Vec<Point>,
    pub receivers: Vec<Point>,
    pub kind: LayoutKind,
}

impl SourceReceiverLayout {
    /// `n` coincident transmitters/receivers equally spaced on the circle of `radius` about the origin.
    pub fn circle(n: usize, radius: f64) -> Self {
        let pts: Vec<Point> = (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                [radius * t.cos(), radius * t.sin()]
            })
            .collect();
        Self {
            transmitters: pts.clone(),
            receivers: pts,
            kind: LayoutKind::Circle,
        }
    }

    /// `n` coincident transmitters/receivers equally spaced along the perimeter of `[−h, h]²`.
    pub fn square(n: usize, half_side: f64) -> Self {
        let per = 8.0 * half_side;
        let pts: Vec<Point> = (0..n)
            .map(|j| {
                let s = per * j as f64 / n as f64;
                let side = (s / (2.0 * half_side)).floor() as usize;
                let u = s - 2.0 * half_side * side as f64 - half_side;
                match side {
                    0 => [u, -half_side],
                    1 => [half_side, u],
                    2 => [-u, half_side],
                    _ => [-half_side, -u],
                }
            })
            .collect();
        Self {
            transmitters: pts.clone(),
            receivers: pts,
            kind: LayoutKind::Square,
        }
    }

    pub fn custom(transmitters: Vec<Point>, receivers: Vec<Point>) -> Self {
        Self {
            transmitters,
            receivers,
            kind: LayoutKind::Custom,
        }
    }

    /// Checks that every array point is at least `10ε` away from `∂D`.
    pub fn validate(&self, inclusion: &Inclusion) -> Result<()> {
        let curve = inclusion.physical_curve();
        let min_gap = 10.0 * inclusion.eps;
        for p in self.transmitters.iter().chain(&self.receivers) {
            if point_inside(&curve, *p) {
                return Err(Error::Validation(format!(
                    "array point {p:?} lies inside the inclusion"
                )));
            }
            let d = curve
                .points()
                .iter()
                .map(|q| ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            if d < min_gap {
                return Err(Error::Validation(format!(
                    "array point {p:?} is {d:.3e} from the inclusion, closer than 10ε"
                )));
            }
        }
        Ok(())
    }
}

/// Winding-number test against the node polygon.
pub fn point_inside(curve: &BoundaryCurve, p: Point) -> bool {
    let pts = curve.points();
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if x > p[0] {
                inside = !inside;
            }
        }
    }
    inside
}

/// Total, incident and scattered field at one receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub total: C64,
    pub incident: C64,
    pub scattered: C64,
}

/// Factored boundary-element model of one inclusion at one frequency.
#[derive(Debug, Clone)]
pub struct BemSolver {
    curve: BoundaryCurve,
    omega: f64,
    contrast: f64,
    matrix_lu: LuSolver,
}

impl BemSolver {
    pub fn new(inclusion: &Inclusion, omega: f64) -> Result<Self> {
        Self::on_curve(inclusion.physical_curve(), omega, inclusion.contrast)
    }

    pub fn on_curve(curve: BoundaryCurve, omega: f64, contrast: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!(
                "frequency must be positive, got {omega}"
            )));
        }
        if !(contrast > 0.0) || contrast == 1.0 {
            return Err(Error::Validation(format!(
                "contrast must be positive and ≠ 1, got {contrast}"
            )));
        }
        let a = transmission_matrix(&curve, omega, contrast);
        let matrix_lu = LuSolver::factor(a)?;
        Ok(Self {
            curve,
            omega,
            contrast,
            matrix_lu,
        })
    }

    pub fn condition(&self) -> f64 {
        self.matrix_lu.condition()
    }

    pub fn contrast(&self) -> f64 {
        self.contrast
    }

    /// Exterior density `ψ` for each source (one column per source).
    fn exterior_densities(&self, sources: &[Point]) -> CMatrix {
        let q = self.curve.len();
        let mut rhs = CMatrix::zeros(2 * q, sources.len());
        for (s, y) in sources.iter().enumerate() {
            for (j, (x, n)) in self
                .curve
                .points()
                .iter()
                .zip(self.curve.normals())
                .enumerate()
            {
                let d = [x[0] - y[0], x[1] - y[1]];
                let r = (d[0] * d[0] + d[1] * d[1]).sqrt();
                rhs[(j, s)] = green(self.omega, r);
                rhs[(q + j, s)] = green_gradient(self.omega, r) * ((d[0] * n[0] + d[1] * n[1]) / r);
            }
        }
        let x = self.matrix_lu.solve_matrix(&rhs);
        x.rows(q, q).into_owned()
    }

    /// Scattered field `S^ω[ψ_y](x)` at each receiver for each source: `N × M`.
    pub fn scattered_matrix(&self, sources: &[Point], receivers: &[Point]) -> Result<CMatrix> {
        for x in receivers {
            if point_inside(&self.curve, *x) {
                return Err(Error::Domain(format!(
                    "receiver {x:?} lies inside the inclusion"
                )));
            }
        }
        let psi = self.exterior_densities(sources);
        let q = self.curve.len();
        let w = self.curve.weights();
        let mut g = CMatrix::zeros(receivers.len(), q);
        for (i, x) in receivers.iter().enumerate() {
            for (j, s) in self.curve.points().iter().enumerate() {
                let r = ((x[0] - s[0]).powi(2) + (x[1] - s[1]).powi(2)).sqrt();
                if r == 0.0 {
                    return Err(Error::Singularity(format!(
                        "receiver {x:?} lies on the boundary"
                    )));
                }
                g[(i, j)] = green(self.omega, r) * w[j];
            }
        }
        Ok(g * psi)
    }

    /// Field samples for one source.
    pub fn field(&self, source: Point, receivers: &[Point]) -> Result<Vec<FieldSample>> {
        let sc = self.scattered_matrix(&[source], receivers)?;
        Ok(receivers
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let r = ((x[0] - source[0]).powi(2) + (x[1] - source[1]).powi(2)).sqrt();
                let incident = green(self.omega, r);
                FieldSample {
                    total: incident + sc[(i, 0)],
                    incident,
                    scattered: sc[(i, 0)],
                }
            })
            .collect())
    }
}

/// `G'(r)` for `G = −(i/4)H0(ωr)`.
fn green_gradient(omega: f64, r: f64) -> C64 {
    let (_, j1, _, y1) = bessel01(omega * r);
    C64::new(0.0, 0.25 * omega) * C64::new(j1, y1)
}

/// Scattered field of the full transmission problem at receivers `xs` due to a point source at `y`.
pub fn bem_scattered_field(
    inclusion: &Inclusion,
    omega: f64,
    y: Point,
    xs: &[Point],
) -> Result<Vec<C64>> {
    let solver = BemSolver::new(inclusion, omega)?;
    let m = solver.scattered_matrix(&[y], xs)?;
    Ok(m.column(0).iter().cloned().collect())
}

/// Scaled Green's row vector `((1/α!) ∂_z^α Γ_ω(y, z))_{|α| ≤ n}`.
pub fn greens_row(omega: f64, y: Point, z: Point, n: u32) -> Result<Vec<C64>> {
    let d = gamma_derivatives(omega, y, z, n)?;
    Ok(d.into_iter()
        .enumerate()
        .map(|(i, v)| v / MultiIndex::from_index(i).factorial())
        .collect())
}

/// Asymptotic expansion of the scattered field to order `n` from an ε-scaled FDPT table.
pub fn asymptotic_scattered_field(
    inclusion: &Inclusion,
    fdpt: &FdptTable,
    omega: f64,
    y: Point,
    xs: &[Point],
    n: u32,
) -> Result<Vec<C64>> {
    if fdpt.order < n + 1 {
        return Err(Error::Validation(format!(
            "expansion of order {n} needs tensors up to order {}, table has {}",
            n + 1,
            fdpt.order
        )));
    }
    let z = inclusion.center;
    let gy = greens_row(omega, y, z, n + 1)?;
    xs.iter()
        .map(|&x| {
            let gx = greens_row(omega, x, z, n + 1)?;
            let mut acc = C64::new(0.0, 0.0);
            for beta in MultiIndex::up_to(n + 1) {
                for alpha in MultiIndex::up_to(n + 1 - beta.order()) {
                    acc += gy[alpha.index()] * gx[beta.index()] * fdpt.get(alpha, beta);
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Per-frequency MSR matrices `A_ω` (`N × M`) with the noise that was added.
#[derive(Debug, Clone, PartialEq)]
pub struct MsrDataset {
    pub layout: SourceReceiverLayout,
    pub frequencies: Vec<f64>,
    pub matrices: Vec<CMatrix>,
    /// Noise standard deviation applied at each frequency.
    pub sigma: Vec<f64>,
    pub seed: u64,
}

/// Noise specification for synthetic data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    None,
    /// Standard deviation as a percentage of the mean absolute entry, per frequency.
    Percent(f64),
    /// Absolute standard deviation at every frequency.
    Absolute(f64),
}

/// Noiseless MSR matrix at one frequency.
pub fn msr_matrix(
    layout: &SourceReceiverLayout,
    inclusion: &Inclusion,
    omega: f64,
) -> Result<CMatrix> {
    let solver = BemSolver::new(inclusion, omega)?;
    solver.scattered_matrix(&layout.transmitters, &layout.receivers)
}

/// RNG for frequency slot `index` of a dataset seeded with `seed`.
pub fn noise_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Adds `σ (G₁ + iG₂)/√2` to every entry; returns `σ`.
pub fn add_noise(a: &mut CMatrix, level: NoiseLevel, rng: &mut ChaCha8Rng) -> f64 {
    let sigma = match level {
        NoiseLevel::None => return 0.0,
        NoiseLevel::Percent(p) => {
            let mean = a.iter().map(|v| v.norm()).sum::<f64>() / a.len().max(1) as f64;
            p / 100.0 * mean
        }
        NoiseLevel::Absolute(s) => s,
    };
    let scale = sigma / 2.0f64.sqrt();
    for v in a.iter_mut() {
        let g1: f64 = StandardNormal.sample(rng);
        let g2: f64 = StandardNormal.sample(rng);
        *v += C64::new(g1 * scale, g2 * scale);
    }
    sigma
}

/// Synthesizes MSR data at the given positive frequencies.
pub fn synthesize_msr(
    layout: &SourceReceiverLayout,
    inclusion: &Inclusion,
    frequencies: &[f64],
    noise: NoiseLevel,
    seed: u64,
) -> Result<MsrDataset> {
    layout.validate(inclusion)?;
    let mut matrices = Vec::with_capacity(frequencies.len());
    let mut sigma = Vec::with_capacity(frequencies.len());
    for (l, &om) in frequencies.iter().enumerate() {
        let mut a = msr_matrix(layout, inclusion, om)?;
        let s = add_noise(&mut a, noise, &mut noise_rng(seed, l));
        matrices.push(a);
        sigma.push(s);
    }
    Ok(MsrDataset {
        layout: layout.clone(),
        frequencies: frequencies.to_vec(),
        matrices,
        sigma,
        seed,
    })
}

/// Adds noise to a noiseless dataset using the per-frequency streams of `seed`.
pub fn with_noise(clean: &MsrDataset, noise: NoiseLevel, seed: u64) -> MsrDataset {
    let mut out = clean.clone();
    out.seed = seed;
    for (l, a) in out.matrices.iter_mut().enumerate() {
        out.sigma[l] = add_noise(a, noise, &mut noise_rng(seed, l));
    }
    out
}

/// Zero-filled dataset shell, used when frequencies are solved elsewhere.
pub fn empty_dataset(layout: &SourceReceiverLayout, frequencies: &[f64], seed: u64) -> MsrDataset {
    let (n, m) = (layout.receivers.len(), layout.transmitters.len());
    MsrDataset {
        layout: layout.clone(),
        frequencies: frequencies.to_vec(),
        matrices: vec![CMatrix::zeros(n, m); frequencies.len()],
        sigma: vec![0.0; frequencies.len()],
        seed,
    }
}
