use std::f64::consts::PI;

use proptest::prelude::*;
use tdpt_core::geometry::*;
use tdpt_core::layer::{assemble_k, assemble_k_star};
use tdpt_core::multi_index::{count_up_to, MultiIndex};
use tdpt_core::reconstruction::estimates::{ellipse_axes, rotate_block, symmetric_eigen};
use tdpt_core::reconstruction::harmonic_coefficients;
use tdpt_core::special::{bessel01, hankel1_orders};
use tdpt_core::tensors::FrequencySet;
use tdpt_core::C64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multi_index_roundtrip(idx in 0usize..2000) {
        let m = MultiIndex::from_index(idx);
        prop_assert_eq!(m.index(), idx);
        prop_assert!(idx < count_up_to(m.order()));
        prop_assert!(m.order() == 0 || idx >= count_up_to(m.order() - 1));
    }

    #[test]
    fn bessel_wronskian(x in 0.05f64..60.0) {
        let (j0, j1, y0, y1) = bessel01(x);
        // J1 Y0 − J0 Y1 = 2/(πx)
        let w = j1 * y0 - j0 * y1;
        prop_assert!((w * PI * x / 2.0 - 1.0).abs() < 1e-10, "x={} w={}", x, w);
    }

    #[test]
    fn hankel_recurrence(x in 0.1f64..40.0) {
        let h = hankel1_orders(6, x);
        for s in 1..6 {
            let lhs = h[s + 1] + h[s - 1];
            let rhs = h[s] * (2.0 * s as f64 / x);
            prop_assert!((lhs - rhs).norm() < 1e-9 * rhs.norm().max(1.0), "s={} x={}", s, x);
        }
    }

    #[test]
    fn transform_of_conjugate_symmetric_data_is_real_and_linear(
        re in prop::collection::vec(-1.0f64..1.0, 8),
        im in prop::collection::vec(-1.0f64..1.0, 8),
        a in -3.0f64..3.0,
        t in 0.0f64..5.0,
    ) {
        let f = FrequencySet::with_default_exclusion(1.0, 8).unwrap();
        let u: Vec<C64> = re.iter().zip(&im).map(|(x, y)| C64::new(*x, *y)).collect();
        let v: Vec<C64> = re.iter().rev().zip(&im).map(|(x, y)| C64::new(*y, *x)).collect();
        let w: Vec<C64> = u.iter().zip(&v).map(|(p, q)| p * a + q).collect();
        let (tu, tv, tw) = (f.transform(&u, t), f.transform(&v, t), f.transform(&w, t));
        prop_assert!(tu.im.abs() < 1e-12);
        prop_assert!((tw - (tu * a + tv)).norm() < 1e-12);
    }

    #[test]
    fn k_and_k_star_are_adjoint(amp in 0.0f64..0.25, petals in 2u32..6, q in 3usize..5) {
        let c = make_shape(ShapeKind::Flower { petals, amplitude: amp }, 16 * q).unwrap();
        let k = assemble_k(&c, 0.0).matrix;
        let ks = assemble_k_star(&c, 0.0).matrix;
        let w = c.weights();
        // ⟨K f, g⟩ = ⟨f, K* g⟩ with the quadrature inner product
        for i in 0..c.len() {
            for j in 0..c.len() {
                let lhs = w[i] * k[(i, j)];
                let rhs = w[j] * ks[(j, i)];
                prop_assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn ellipse_axes_roundtrip(a in 0.2f64..2.0, aspect in 1.0f64..4.0, k in prop_oneof![0.1f64..0.9, 1.1f64..20.0]) {
        let b = a / aspect;
        let v = PI * a * b;
        let m1 = (k - 1.0) * v * (a + b) / (a + k * b);
        let m2 = (k - 1.0) * v * (a + b) / (b + k * a);
        let (hi, lo) = if m1 >= m2 { (m1, m2) } else { (m2, m1) };
        if aspect > 1.0 + 1e-6 {
            let (ra, rb) = ellipse_axes(hi, lo, v, k).unwrap();
            prop_assert!((ra - a).abs() < 1e-8 * a && (rb - b).abs() < 1e-8 * a);
        }
    }

    #[test]
    fn rotation_and_eigen_agree(l1 in 0.1f64..5.0, gap in 0.05f64..3.0, th in 0.0f64..PI) {
        let d = [[l1 + gap, 0.0], [0.0, l1]];
        let m = rotate_block(d, -th);
        let (hi, lo, theta) = symmetric_eigen(m);
        prop_assert!((hi - l1 - gap).abs() < 1e-10 && (lo - l1).abs() < 1e-10);
        let dth = (theta - th).abs();
        prop_assert!(dth.min(PI - dth) < 1e-8);
    }

    #[test]
    fn zero_perturbation_is_identity(seed in 0u64..100) {
        let c = make_shape(ShapeKind::Flower { petals: 3 + (seed % 3) as u32, amplitude: 0.1 }, 48).unwrap();
        let h: Vec<f64> = (0..c.len()).map(|j| ((j as u64 * 31 + seed) % 7) as f64).collect();
        let p = perturb(&c, &h, 0.0).unwrap();
        prop_assert_eq!(p.points(), c.points());
        prop_assert!(perturb(&c, &h[1..], 0.1).is_err());
    }

    #[test]
    fn harmonic_polynomials_are_complex_powers(r in 0.1f64..2.0, t in 0.0f64..(2.0 * PI), m in 1u32..=6) {
        let [re, im] = harmonic_coefficients(m).unwrap()[(m - 1) as usize].clone();
        let x = [r * t.cos(), r * t.sin()];
        let z = C64::new(x[0], x[1]).powu(m);
        prop_assert!((re.eval(x) - z.re).abs() < 1e-10 * r.powi(m as i32).max(1.0));
        prop_assert!((im.eval(x) - z.im).abs() < 1e-10 * r.powi(m as i32).max(1.0));
    }

    #[test]
    fn equivalent_ellipse_curve_has_requested_area(a in 0.1f64..2.0, aspect in 1.0f64..3.0, th in 0.0f64..PI) {
        let e = EquivalentEllipse::new(a, a / aspect, th, [0.3, -0.2]).unwrap();
        let c = e.to_curve(64).unwrap();
        prop_assert!((c.area() - PI * a * a / aspect).abs() < 1e-10 * a * a);
        let z = c.centroid();
        prop_assert!((z[0] - 0.3).abs() < 1e-10 && (z[1] + 0.2).abs() < 1e-10);
    }
}
