use std::f64::consts::PI;

use tdpt_core::geometry::*;
use tdpt_core::multi_index::MultiIndex;
use tdpt_core::reconstruction::shape::{fourier_basis, StepRule};
use tdpt_core::reconstruction::*;
use tdpt_core::tensors::*;

fn harmonic(m: u32, imag: bool) -> HarmonicPolynomial {
    harmonic_coefficients(m).unwrap()[(m - 1) as usize][imag as usize].clone()
}

fn sum(a: &HarmonicPolynomial, b: &HarmonicPolynomial, s: f64) -> HarmonicPolynomial {
    let mut coeffs = a.coeffs.clone();
    for &(m, c) in &b.coeffs {
        match coeffs.iter_mut().find(|(x, _)| *x == m) {
            Some(e) => e.1 += s * c,
            None => coeffs.push((m, s * c)),
        }
    }
    HarmonicPolynomial {
        degree: a.degree.max(b.degree),
        coeffs,
    }
}

fn real_part(d: &tdpt_core::layer::Density<'_>) -> Vec<f64> {
    d.values.iter().map(|v| v.re).collect()
}

#[test]
fn phi_hf_on_disk_matches_closed_form() {
    let c = make_shape(ShapeKind::Disk, 128).unwrap();
    let (x1, x2) = (harmonic(1, false), harmonic(1, true));
    for &k in &[3.0, 0.4] {
        let pp = real_part(&phi_hf(&c, k, &x1, &x1).unwrap());
        let pq = real_part(&phi_hf(&c, k, &x1, &x2).unwrap());
        for (j, p) in c.points().iter().enumerate() {
            let th = p[1].atan2(p[0]);
            let (s, co) = th.sin_cos();
            let same = 4.0 * (k - 1.0) / (k + 1.0).powi(2) * (k * co * co + s * s);
            let cross = 4.0 * (k - 1.0).powi(2) / (k + 1.0).powi(2) * s * co;
            assert!(
                (pp[j] - same).abs() < 1e-6,
                "k={k} θ={th}: {} vs {same}",
                pp[j]
            );
            assert!(
                (pq[j] - cross).abs() < 1e-6,
                "k={k} θ={th}: {} vs {cross}",
                pq[j]
            );
        }
    }
}

#[test]
fn phi_hf_is_bilinear_and_vanishes_without_contrast() {
    let c = make_shape(ShapeKind::Kite, 96).unwrap();
    let (h1, h2, f) = (harmonic(1, true), harmonic(2, false), harmonic(3, true));
    let combo = sum(&h1, &h2, -2.5);
    let a = real_part(&phi_hf(&c, 3.0, &h1, &f).unwrap());
    let b = real_part(&phi_hf(&c, 3.0, &h2, &f).unwrap());
    let ab = real_part(&phi_hf(&c, 3.0, &combo, &f).unwrap());
    let scale = ab.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for j in 0..c.len() {
        assert!((ab[j] - (a[j] - 2.5 * b[j])).abs() < 1e-10 * scale);
    }
    let d1 = real_part(&phi_hf(&c, 1.0 + 1e-4, &h1, &f).unwrap());
    let d2 = real_part(&phi_hf(&c, 1.0 + 2e-4, &h1, &f).unwrap());
    let n1 = d1.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n2 = d2.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((n2 / n1 - 2.0).abs() < 1e-3, "{}", n2 / n1);
}

/// `Σ a_α b_β M_αβ` for harmonic polynomials `H = Σ a_α x^α`, `F = Σ b_β x^β`.
fn contracted_pt(
    curve: &BoundaryCurve,
    k: f64,
    h: &HarmonicPolynomial,
    f: &HarmonicPolynomial,
) -> f64 {
    let n = h.degree.max(f.degree);
    let m = compute_classical_pt(curve, k, n).unwrap();
    let mut acc = 0.0;
    for &(a, ca) in &h.coeffs {
        for &(b, cb) in &f.coeffs {
            acc += ca * cb * m.get(a, b);
        }
    }
    acc
}

#[test]
fn phi_hf_is_the_shape_derivative_of_contracted_pt() {
    let c = make_shape(ShapeKind::Kite, 128).unwrap();
    let k = 3.0;
    let eta = 1e-4;
    let pairs = [
        (harmonic(1, false), harmonic(1, false)),
        (harmonic(2, true), harmonic(1, false)),
        (harmonic(2, false), harmonic(2, true)),
    ];
    let w = c.weights();
    for (h, f) in &pairs {
        let phi = real_part(&phi_hf(&c, k, h, f).unwrap());
        for (j, psi) in fourier_basis(&c, 3).iter().enumerate() {
            let analytic: f64 = psi
                .iter()
                .zip(&phi)
                .zip(&w)
                .map(|((a, b), c)| a * b * c)
                .sum();
            let plus = contracted_pt(&perturb(&c, psi, eta).unwrap(), k, h, f);
            let minus = contracted_pt(&perturb(&c, psi, -eta).unwrap(), k, h, f);
            let fd = (plus - minus) / (2.0 * eta);
            assert!(
                (analytic - fd).abs() < 1e-4 * (1.0 + fd.abs()),
                "mode {j}: {analytic} vs {fd}"
            );
        }
    }
}

struct Target {
    truth: BoundaryCurve,
    tdpt: TdptTable,
    scale: f64,
}

const EPS: f64 = 0.05;
const K: f64 = 3.0;

fn target(kind: ShapeKind, order: u32) -> Target {
    let base = make_shape(kind, 128).unwrap();
    let freqs = FrequencySet::with_default_exclusion(PI / 8.0, 32).unwrap();
    let tables: Vec<FdptTable> = freqs
        .positive()
        .iter()
        .map(|&w| compute_fdpt(&base, EPS, w, K, order - 1).unwrap())
        .collect();
    let tdpt = compute_tdpt(&tables, &freqs, &uniform_grid(0.0, 5.0, 128)).unwrap();
    let truth = base.scaled_translated(EPS, [0.0, 0.0]).unwrap();
    Target {
        truth,
        tdpt,
        scale: EPS * base.area().sqrt(),
    }
}

#[test]
fn discrepancy_vanishes_at_the_true_shape() {
    let t = target(
        ShapeKind::Flower {
            petals: 3,
            amplitude: 0.2,
        },
        3,
    );
    let p = ShapeProblem::new(&t.tdpt, K, t.scale, 3).unwrap();
    let normalized = t
        .truth
        .scaled_translated(1.0 / t.scale, [0.0, 0.0])
        .unwrap();
    let j = p.discrepancy(&normalized, 3).unwrap();
    let measured: f64 = p
        .pairs(3)
        .iter()
        .map(|&(i, k)| p.measured_signal(i, k).iter().map(|v| v * v).sum::<f64>())
        .sum();
    assert!(j < 1e-8 * measured, "{j} vs {measured}");
    let s = ShapeState::new(&p, normalized, 3).unwrap();
    let basis = fourier_basis(&s.curve, 3);
    let (_, g) = p.gradient(&s.curve, 3, &basis).unwrap();
    assert!(g.iter().all(|v| v.abs() < 1e-5), "{g:?}");
}

fn fd_check(t: &Target, start: &BoundaryCurve) {
    let p = ShapeProblem::new(&t.tdpt, K, t.scale, 3).unwrap();
    let basis = fourier_basis(start, 3);
    let (_, g) = p.gradient(start, 3, &basis).unwrap();
    let eta = 1e-4;
    let fd: Vec<f64> = basis
        .iter()
        .map(|psi| {
            let jp = p
                .discrepancy(&perturb(start, psi, eta).unwrap(), 3)
                .unwrap();
            let jm = p
                .discrepancy(&perturb(start, psi, -eta).unwrap(), 3)
                .unwrap();
            (jp - jm) / (2.0 * eta)
        })
        .collect();
    let floor = 0.05 * fd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (j, (a, b)) in g.iter().zip(&fd).enumerate() {
        assert!(
            (a - b).abs() <= (0.05 * b.abs()).max(floor),
            "mode {j}: {a} vs {b}"
        );
    }
}

#[test]
fn shape_derivative_matches_finite_differences() {
    let disk = target(ShapeKind::Disk, 3);
    let ell =
        EquivalentEllipse::new(1.2 / PI.sqrt(), 1.0 / (1.2 * PI.sqrt()), 0.3, [0.0, 0.0]).unwrap();
    fd_check(&disk, &ell.to_curve(64).unwrap());

    let flower = target(
        ShapeKind::Flower {
            petals: 3,
            amplitude: 0.2,
        },
        3,
    );
    fd_check(&flower, &make_shape(ShapeKind::Disk, 64).unwrap());
}

#[test]
fn one_step_decreases_discrepancy() {
    let t = target(
        ShapeKind::Flower {
            petals: 3,
            amplitude: 0.2,
        },
        3,
    );
    let (_, ell) = estimate_all(&t.tdpt, [0.0, 0.0]).unwrap();
    let p = ShapeProblem::new(&t.tdpt, K, t.scale, 3).unwrap();
    let start = EquivalentEllipse::new(ell.a / t.scale, ell.b / t.scale, ell.theta, [0.0, 0.0])
        .unwrap()
        .to_curve(64)
        .unwrap();
    let s0 = ShapeState::new(&p, start, 2).unwrap();
    let s1 = shape_gradient_step(&p, &s0).unwrap();
    assert!(s1.discrepancy < s0.discrepancy);
    assert_eq!(s1.history.len(), 2);
}

#[test]
fn ellipse_target_is_a_fixed_point() {
    let t = target(ShapeKind::Ellipse { a: 1.6, b: 1.0 }, 3);
    let (_, ell) = estimate_all(&t.tdpt, [0.0, 0.0]).unwrap();
    let p = ShapeProblem::new(&t.tdpt, K, t.scale, 3).unwrap();
    let rec = optimize_shape(&p, &ell, &Schedule::default()).unwrap();
    let moved = boundary_distance(&rec.curve, &rec.initial).l2;
    assert!(moved < 0.01 * t.scale, "moved {moved}");
}

#[test]
fn noiseless_flower_improves_on_the_ellipse() {
    let t = target(
        ShapeKind::Flower {
            petals: 3,
            amplitude: 0.2,
        },
        3,
    );
    let (_, ell) = estimate_all(&t.tdpt, [0.0, 0.0]).unwrap();
    let p = ShapeProblem::new(&t.tdpt, K, t.scale, 3).unwrap();
    for rule in [StepRule::Gradient, StepRule::GaussNewton] {
        let rec = optimize_shape(
            &p,
            &ell,
            &Schedule {
                step_rule: rule,
                ..Schedule::default()
            },
        )
        .unwrap();
        let d_ell = boundary_distance(&ell.to_curve(128).unwrap(), &t.truth).l2;
        let d_rec = boundary_distance(&rec.curve, &t.truth).l2;
        assert!(d_rec <= 0.3 * d_ell, "{rule:?}: {d_rec} vs ellipse {d_ell}");
        for w in rec.state.history.windows(2) {
            if w[0].order == w[1].order {
                assert!(w[1].discrepancy <= w[0].discrepancy);
            }
        }
    }
}

#[test]
fn schedule_is_validated() {
    let t = target(ShapeKind::Disk, 2);
    let p = ShapeProblem::new(&t.tdpt, K, t.scale, 2).unwrap();
    let ell =
        EquivalentEllipse::new(t.scale / PI.sqrt(), t.scale / PI.sqrt(), 0.0, [0.0, 0.0]).unwrap();
    assert!(optimize_shape(
        &p,
        &ell,
        &Schedule {
            k_max: 5,
            ..Schedule::default()
        }
    )
    .is_err());
    assert!(optimize_shape(
        &p,
        &ell,
        &Schedule {
            k_max: 1,
            ..Schedule::default()
        }
    )
    .is_err());
    assert!(ShapeProblem::new(&t.tdpt, K, t.scale, 3).is_err());
    assert_eq!(p.pairs(2).len(), 4);
    assert_eq!(
        p.harmonics()[2].coeffs,
        vec![(MultiIndex::new(2, 0), 1.0), (MultiIndex::new(0, 2), -1.0)]
    );
}
