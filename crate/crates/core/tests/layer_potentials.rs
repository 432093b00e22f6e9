use std::f64::consts::PI;

use tdpt_core::geometry::*;
use tdpt_core::layer::*;
use tdpt_core::special::LowFreqConstants;
use tdpt_core::C64;

fn circle(r: f64, q: usize) -> BoundaryCurve {
    EquivalentEllipse::new(r, r, 0.0, [0.0, 0.0])
        .unwrap()
        .to_curve(q)
        .unwrap()
}

fn real(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

#[test]
fn log_kernel_eigenvalues_on_unit_circle() {
    let c = circle(1.0, 256);
    let s = assemble_single_layer(&c, 0.0);
    for n in 1..=16 {
        let f: Vec<f64> = (0..c.len())
            .map(|j| (n as f64 * c.param(j)).cos())
            .collect();
        let sf = s.apply(&real(&f));
        let lam = -1.0 / (2.0 * n as f64);
        let err = sf
            .iter()
            .zip(&f)
            .map(|(a, b)| (a.re - lam * b).abs() + a.im.abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "n={n}: {err}");
    }
}

#[test]
fn k_star_on_disk_is_rank_one() {
    let r = 0.7;
    let c = circle(r, 64);
    let ks = assemble_k_star(&c, 0.0);
    let w = c.weights();
    for i in 0..c.len() {
        for j in 0..c.len() {
            let expect = w[j] / (4.0 * PI * r);
            assert!((ks.matrix[(i, j)].re - expect).abs() < 1e-10);
        }
    }
}

/// Quadratic extrapolation of `f(δ)` sampled at `δ, 2δ, 3δ` to `δ = 0`.
fn extrapolate(f1: C64, f2: C64, f3: C64) -> C64 {
    f1 * 3.0 - f2 * 3.0 + f3
}

#[test]
fn jump_relations_from_off_boundary_limits() {
    let c = make_shape(ShapeKind::Ellipse { a: 1.5, b: 1.0 }, 1024).unwrap();
    let omega = 2.0;
    let phi: Vec<f64> = (0..c.len())
        .map(|j| 1.0 + 0.5 * (2.0 * c.param(j)).sin())
        .collect();
    let dens = Density::new(real(&phi), &c).unwrap();
    let ks = assemble_k_star(&c, omega);
    let s = assemble_single_layer(&c, omega);
    let ext = trace_normal_derivative(&dens, &ks, Side::Exterior).unwrap();
    let int = trace_normal_derivative(&dens, &ks, Side::Interior).unwrap();
    let sv = s.apply(&dens.values);
    let delta = 0.01;
    let mut worst: f64 = 0.0;
    for j in (0..c.len()).step_by(37) {
        let x = c.points()[j];
        let nu = c.normals()[j];
        for (side, trace) in [(1.0, &ext), (-1.0, &int)] {
            let pts: Vec<[f64; 2]> = (1..=3)
                .map(|m| {
                    let d = side * delta * m as f64;
                    [x[0] + d * nu[0], x[1] + d * nu[1]]
                })
                .collect();
            let g = eval_potential_gradient(&dens, omega, &pts).unwrap();
            let dn: Vec<C64> = g.iter().map(|v| v[0] * nu[0] + v[1] * nu[1]).collect();
            let lim = extrapolate(dn[0], dn[1], dn[2]);
            worst = worst.max((lim - trace.values[j]).norm());
            let u = eval_potential_offboundary(&dens, omega, &pts).unwrap();
            worst = worst.max((extrapolate(u[0], u[1], u[2]) - sv[j]).norm());
        }
    }
    assert!(worst < 1e-3, "limit error {worst}");
}

#[test]
fn double_layer_jump() {
    let c = make_shape(ShapeKind::Kite, 256).unwrap();
    let dens = Density::new(vec![C64::new(1.0, 0.0); c.len()], &c).unwrap();
    let inside = eval_double_layer_offboundary(&dens, &[[0.0, 0.0]]).unwrap();
    let outside = eval_double_layer_offboundary(&dens, &[[3.0, 1.0]]).unwrap();
    assert!((inside[0].re - 1.0).abs() < 1e-10);
    assert!(outside[0].norm() < 1e-10);
    let k = assemble_double_layer(&c);
    let k1 = k.apply(&dens.values);
    assert!(k1.iter().all(|v| (v.re - 0.5).abs() < 1e-10));
}

#[test]
fn single_layer_low_frequency_expansion() {
    let b = make_shape(ShapeKind::Kite, 128).unwrap();
    let phi = real(
        &(0..b.len())
            .map(|j| 1.0 + 0.3 * b.param(j).cos())
            .collect::<Vec<_>>(),
    );
    let dens = Density::new(phi.clone(), &b).unwrap();
    let s0 = assemble_single_layer(&b, 0.0).apply(&phi);
    let integral = dens.integral();
    let mut errs = Vec::new();
    for &eo in &[1e-1, 1e-2, 1e-3] {
        let beta = LowFreqConstants::new(eo).unwrap().beta_eps_omega;
        let s = assemble_single_layer(&b, eo).apply(&phi);
        let e = s
            .iter()
            .zip(&s0)
            .map(|(a, b)| (a - b - beta * integral).norm())
            .fold(0.0, f64::max);
        errs.push(e);
    }
    // err ≈ C (εω)² |ln εω|
    let x: Vec<f64> = [1e-1f64, 1e-2, 1e-3].iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errs
        .iter()
        .zip([1e-1f64, 1e-2, 1e-3])
        .map(|(e, v)| (e / v.ln().abs()).ln())
        .collect();
    let xm = x.iter().sum::<f64>() / 3.0;
    let ym = y.iter().sum::<f64>() / 3.0;
    let slope = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (a - xm) * (b - ym))
        .sum::<f64>()
        / x.iter().map(|a| (a - xm).powi(2)).sum::<f64>();
    assert!((slope - 2.0).abs() < 0.4, "slope {slope}, errors {errs:?}");
}

#[test]
fn single_layer_weighted_symmetry_and_conjugation() {
    let c = make_shape(
        ShapeKind::Flower {
            petals: 4,
            amplitude: 0.15,
        },
        64,
    )
    .unwrap();
    let s = assemble_single_layer(&c, 3.0).matrix;
    let sn = assemble_single_layer(&c, -3.0).matrix;
    let w = c.weights();
    for i in 0..c.len() {
        for j in 0..c.len() {
            // S_ij / w_j is the kernel value, symmetric in (i, j)
            assert!(
                (s[(i, j)] / w[j] - s[(j, i)] / w[i]).norm()
                    < 1e-8 * (1.0 + s[(i, j)].norm() / w[j])
            );
            assert!((sn[(i, j)] - s[(i, j)].conj()).norm() < 1e-15);
        }
    }
}

#[test]
fn density_validation() {
    let c = circle(1.0, 32);
    assert!(Density::new(vec![C64::new(0.0, 0.0); 31], &c).is_err());
    assert!(Density::new(vec![C64::new(f64::NAN, 0.0); 32], &c).is_err());
}
