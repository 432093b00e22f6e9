//! Smooth closed boundary curves sampled at equispaced parameters.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::spectral::{differentiate_complex, TrigInterpolant};
use crate::{Error, Point, Result, C64};

/// Closed curve `x(t)`, `t ∈ [0, 2π)`, sampled at `Q` equispaced nodes, counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    points: Vec<Point>,
    d1: Vec<Point>,
    d2: Vec<Point>,
    normals: Vec<Point>,
    speed: Vec<f64>,
    curvature: Vec<f64>,
}

fn to_complex(p: &[Point]) -> Vec<C64> {
    p.iter().map(|q| C64::new(q[0], q[1])).collect()
}

fn to_points(c: &[C64]) -> Vec<Point> {
    c.iter().map(|z| [z.re, z.im]).collect()
}

impl BoundaryCurve {
    /// Builds a curve from node positions; derivatives are spectral.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        let q = points.len();
        if q < 8 || q % 2 != 0 {
            return Err(Error::Validation(format!(
                "node count must be even and ≥ 8, got {q}"
            )));
        }
        if points
            .iter()
            .any(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(Error::Validation("non-finite curve node".into()));
        }
        let z = to_complex(&points);
        let d1 = to_points(&differentiate_complex(&z, 1));
        let d2 = to_points(&differentiate_complex(&z, 2));
        let curve = Self::from_parts(points, d1, d2)?;
        curve.check_simple()?;
        Ok(curve)
    }

    fn from_parts(points: Vec<Point>, d1: Vec<Point>, d2: Vec<Point>) -> Result<Self> {
        let q = points.len();
        let mut normals = Vec::with_capacity(q);
        let mut speed = Vec::with_capacity(q);
        let mut curvature = Vec::with_capacity(q);
        for j in 0..q {
            let [xp, yp] = d1[j];
            let s = (xp * xp + yp * yp).sqrt();
            if !(s > 0.0) {
                return Err(Error::Validation("degenerate parameterization".into()));
            }
            speed.push(s);
            normals.push([yp / s, -xp / s]);
            curvature.push((xp * d2[j][1] - yp * d2[j][0]) / (s * s * s));
        }
        let curve = Self {
            points,
            d1,
            d2,
            normals,
            speed,
            curvature,
        };
        if curve.signed_area() <= 0.0 {
            return Err(Error::Validation("curve must be counterclockwise".into()));
        }
        Ok(curve)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Parameter spacing `2π/Q`.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    pub fn param(&self, j: usize) -> f64 {
        self.step() * j as f64
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// `x'(t)` at the nodes.
    pub fn tangents(&self) -> &[Point] {
        &self.d1
    }

    /// `x''(t)` at the nodes.
    pub fn second_derivatives(&self) -> &[Point] {
        &self.d2
    }

    pub fn normals(&self) -> &[Point] {
        &self.normals
    }

    /// `|x'(t)|` at the nodes.
    pub fn speed(&self) -> &[f64] {
        &self.speed
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    /// Arc-length quadrature weight at node `j`.
    pub fn weight(&self, j: usize) -> f64 {
        self.speed[j] * self.step()
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.weight(j)).collect()
    }

    pub fn perimeter(&self) -> f64 {
        self.speed.iter().sum::<f64>() * self.step()
    }

    fn signed_area(&self) -> f64 {
        let s: f64 = self
            .points
            .iter()
            .zip(&self.d1)
            .map(|(p, d)| p[0] * d[1] - p[1] * d[0])
            .sum();
        0.5 * s * self.step()
    }

    /// Enclosed area.
    pub fn area(&self) -> f64 {
        self.signed_area()
    }

    pub fn centroid(&self) -> Point {
        // ∫ x dA = ½ ∮ x² dy, ∫ y dA = −½ ∮ y² dx
        let mut cx = 0.0;
        let mut cy = 0.0;
        for (p, d) in self.points.iter().zip(&self.d1) {
            cx += 0.5 * p[0] * p[0] * d[1];
            cy -= 0.5 * p[1] * p[1] * d[0];
        }
        let a = self.area();
        [cx * self.step() / a, cy * self.step() / a]
    }

    /// Image under `x ↦ A x + b` with `det A > 0`.
    pub fn affine(&self, a: [[f64; 2]; 2], b: Point) -> Result<Self> {
        let map = |p: &Point| {
            [
                a[0][0] * p[0] + a[0][1] * p[1],
                a[1][0] * p[0] + a[1][1] * p[1],
            ]
        };
        let points = self
            .points
            .iter()
            .map(|p| {
                let m = map(p);
                [m[0] + b[0], m[1] + b[1]]
            })
            .collect();
        let d1 = self.d1.iter().map(map).collect();
        let d2 = self.d2.iter().map(map).collect();
        Self::from_parts(points, d1, d2)
    }

    /// `ε·x + z`.
    pub fn scaled_translated(&self, eps: f64, z: Point) -> Result<Self> {
        self.affine([[eps, 0.0], [0.0, eps]], z)
    }

    /// Rotation about the origin by `theta`.
    pub fn rotated(&self, theta: f64) -> Result<Self> {
        let (s, c) = theta.sin_cos();
        self.affine([[c, -s], [s, c]], [0.0, 0.0])
    }

    /// Resamples the trigonometric interpolant on `q` nodes.
    pub fn resample(&self, q: usize) -> Result<Self> {
        let it = TrigInterpolant::new(&to_complex(&self.points));
        let pts = (0..q)
            .map(|j| {
                let v = it.eval(2.0 * PI * j as f64 / q as f64)[0];
                [v.re, v.im]
            })
            .collect();
        Self::from_points(pts)
    }

    fn check_simple(&self) -> Result<()> {
        let q = self.len();
        let p = &self.points;
        for i in 0..q {
            let a0 = p[i];
            let a1 = p[(i + 1) % q];
            for j in (i + 2)..q {
                if i == 0 && j == q - 1 {
                    continue;
                }
                if segments_intersect(a0, a1, p[j], p[(j + 1) % q]) {
                    return Err(Error::Validation(format!(
                        "curve self-intersects near nodes {i} and {j}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segments_intersect(p1: Point, p2: Point, p3: Point, p4: Point) -> bool {
    let d1 = cross(p3, p4, p1);
    let d2 = cross(p3, p4, p2);
    let d3 = cross(p1, p2, p3);
    let d4 = cross(p1, p2, p4);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Test shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeKind {
    Disk,
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `r(θ) = 1 + amplitude·cos(petals·θ)`.
    Flower {
        petals: u32,
        amplitude: f64,
    },
    Kite,
}

/// Unit-area curve of the requested kind, centered at its centroid.
pub fn make_shape(kind: ShapeKind, q: usize) -> Result<BoundaryCurve> {
    if q < 32 || q % 2 != 0 {
        return Err(Error::Validation(format!(
            "Q must be even and ≥ 32, got {q}"
        )));
    }
    let raw: Vec<Point> = match kind {
        ShapeKind::Disk => nodes(q, |t| [t.cos(), t.sin()]),
        ShapeKind::Ellipse { a, b } => {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::Validation(
                    "ellipse semi-axes must be positive".into(),
                ));
            }
            nodes(q, |t| [a * t.cos(), b * t.sin()])
        }
        ShapeKind::Flower { petals, amplitude } => {
            if !(0.0..1.0).contains(&amplitude) {
                return Err(Error::Validation(format!(
                    "flower amplitude {amplitude} makes the curve self-intersect"
                )));
            }
            let p = petals as f64;
            nodes(q, |t| {
                let r = 1.0 + amplitude * (p * t).cos();
                [r * t.cos(), r * t.sin()]
            })
        }
        ShapeKind::Kite => nodes(q, |t| {
            [t.cos() + 0.65 * (2.0 * t).cos() - 0.65, 1.5 * t.sin()]
        }),
    };
    let curve = BoundaryCurve::from_points(raw)?;
    let c = curve.centroid();
    let s = 1.0 / curve.area().sqrt();
    curve.affine([[s, 0.0], [0.0, s]], [-s * c[0], -s * c[1]])
}

fn nodes<F: Fn(f64) -> Point>(q: usize, f: F) -> Vec<Point> {
    (0..q).map(|j| f(2.0 * PI * j as f64 / q as f64)).collect()
}

/// Area of a closed curve.
pub fn area(curve: &BoundaryCurve) -> f64 {
    curve.area()
}

/// Moves each node by `η·h(x)` along the outward normal.
pub fn perturb(curve: &BoundaryCurve, h: &[f64], eta: f64) -> Result<BoundaryCurve> {
    if h.len() != curve.len() {
        return Err(Error::Validation(format!(
            "perturbation has {} values for {} nodes",
            h.len(),
            curve.len()
        )));
    }
    if eta == 0.0 {
        return Ok(curve.clone());
    }
    let pts = curve
        .points
        .iter()
        .zip(&curve.normals)
        .zip(h)
        .map(|((p, n), &hv)| [p[0] + eta * hv * n[0], p[1] + eta * hv * n[1]])
        .collect();
    BoundaryCurve::from_points(pts)
}

/// Distances between two curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDistance {
    /// Symmetric Hausdorff distance.
    pub hausdorff: f64,
    /// Root-mean-square point-to-curve distance, arc-length weighted over both curves.
    pub l2: f64,
}

/// Symmetric distances between `c1` and `c2`, measured against each curve's interpolant.
pub fn boundary_distance(c1: &BoundaryCurve, c2: &BoundaryCurve) -> BoundaryDistance {
    let (h12, s12) = one_sided(c1, c2);
    let (h21, s21) = one_sided(c2, c1);
    BoundaryDistance {
        hausdorff: h12.max(h21),
        l2: ((s12 + s21) / (c1.perimeter() + c2.perimeter())).sqrt(),
    }
}

fn one_sided(from: &BoundaryCurve, to: &BoundaryCurve) -> (f64, f64) {
    let it = TrigInterpolant::new(&to_complex(&to.points));
    let mut worst: f64 = 0.0;
    let mut sq = 0.0;
    for (j, p) in from.points.iter().enumerate() {
        let d = distance_to_curve(*p, to, &it);
        worst = worst.max(d);
        sq += d * d * from.weight(j);
    }
    (worst, sq)
}

fn distance_to_curve(p: Point, curve: &BoundaryCurve, it: &TrigInterpolant) -> f64 {
    let pc = C64::new(p[0], p[1]);
    let (mut best_j, mut best) = (0, f64::INFINITY);
    for (j, q) in curve.points.iter().enumerate() {
        let d = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
        if d < best {
            best = d;
            best_j = j;
        }
    }
    let h = curve.step();
    let t0 = curve.param(best_j);
    let mut t = t0;
    for _ in 0..30 {
        let [z, dz, ddz] = it.eval(t);
        let r = z - pc;
        let f = (r * dz.conj()).re;
        let fp = dz.norm_sqr() + (r * ddz.conj()).re;
        if fp <= 0.0 {
            break;
        }
        let step = (f / fp).clamp(-h, h);
        t -= step;
        if (t - t0).abs() > 2.0 * h {
            t = t0;
            break;
        }
        if step.abs() < 1e-15 {
            break;
        }
    }
    let z = it.eval(t)[0];
    ((z - pc).norm_sqr().min(best)).sqrt()
}

/// Small inclusion `D = z + εB` of contrast `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Inclusion {
    pub base: BoundaryCurve,
    pub center: Point,
    pub eps: f64,
    pub contrast: f64,
}

impl Inclusion {
    pub fn new(base: BoundaryCurve, center: Point, eps: f64, contrast: f64) -> Result<Self> {
        if !(contrast > 0.0) || contrast == 1.0 {
            return Err(Error::Validation(format!(
                "contrast must be positive and ≠ 1, got {contrast}"
            )));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Validation(format!(
                "scale must lie in (0, 1), got {eps}"
            )));
        }
        if (base.area() - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "base curve area {} is not 1",
                base.area()
            )));
        }
        Ok(Self {
            base,
            center,
            eps,
            contrast,
        })
    }

    /// `∂D` in physical coordinates.
    pub fn physical_curve(&self) -> BoundaryCurve {
        self.base
            .scaled_translated(self.eps, self.center)
            .expect("similarity preserves orientation")
    }

    /// `|D| = ε²|B|`.
    pub fn volume(&self) -> f64 {
        self.eps * self.eps * self.base.area()
    }
}

/// Ellipse with semi-axes `a ≥ b`, major axis at angle `theta ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentEllipse {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    pub center: Point,
}

impl EquivalentEllipse {
    pub fn new(a: f64, b: f64, theta: f64, center: Point) -> Result<Self> {
        if !(b > 0.0 && a >= b) {
            return Err(Error::Validation(format!("invalid semi-axes a={a}, b={b}")));
        }
        let mut theta = theta % PI;
        if theta < 0.0 {
            theta += PI;
        }
        Ok(Self {
            a,
            b,
            theta,
            center,
        })
    }

    /// Boundary in physical coordinates.
    pub fn to_curve(&self, q: usize) -> Result<BoundaryCurve> {
        let (s, c) = self.theta.sin_cos();
        let pts = nodes(q, |t| {
            let (x, y) = (self.a * t.cos(), self.b * t.sin());
            [
                self.center[0] + c * x - s * y,
                self.center[1] + s * x + c * y,
            ]
        });
        BoundaryCurve::from_points(pts)
    }
}
