use nonlocal::fields::{combination, generate_nonlocal_field, VectorField, VectorKind};
use nonlocal::geometry::{make_ball, make_box, make_ellipse, make_lshape, Domain};
use nonlocal::kernels::{levy_integral, make_fractional_family, make_localizing_family};
use nonlocal::operators::{nonlocal_divergence, OperatorContext};
use nonlocal::{Point, QuadSpec};
use proptest::prelude::*;

fn shapes() -> Vec<Domain> {
    vec![
        make_ball(2, Point::new2(0.2, -0.1), 0.8).unwrap(),
        make_box(2, &[1.0, 0.5]).unwrap(),
        make_ellipse(1.0, 0.5).unwrap(),
        make_lshape(),
        make_ball(3, Point::ZERO, 1.0).unwrap(),
        make_box(3, &[0.5, 1.0, 0.75]).unwrap(),
    ]
}

fn point(d: usize, c: [f64; 3]) -> Point {
    if d == 2 {
        Point::new2(c[0], c[1])
    } else {
        Point::new3(c[0], c[1], c[2])
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inside_iff_negative_distance(c in prop::array::uniform3(-2.0f64..2.0)) {
        for dom in shapes() {
            let x = point(dom.dimension(), c);
            let sd = dom.signed_distance(&x);
            prop_assume!(sd.abs() > 1e-9);
            prop_assert_eq!(dom.inside(&x), sd < 0.0, "{} at {:?}", dom.name(), x);
        }
    }

    #[test]
    fn signed_distance_is_distance_to_nearest_point(c in prop::array::uniform3(-2.0f64..2.0)) {
        for dom in shapes() {
            let x = point(dom.dimension(), c);
            let near = dom.nearest_boundary_point(&x);
            let sd = dom.signed_distance(&x);
            prop_assert!(((x - near.point).norm() - sd.abs()).abs() < 1e-9, "{} at {:?}", dom.name(), x);
            prop_assert!(dom.signed_distance(&near.point).abs() < 1e-9);
        }
    }

    #[test]
    fn ray_intervals_are_sorted_and_inside(c in prop::array::uniform3(-2.0f64..2.0), th in 0.0f64..std::f64::consts::TAU, z in -1.0f64..1.0) {
        for dom in shapes() {
            let d = dom.dimension();
            let x = point(d, c);
            let rho = (1.0 - z * z).sqrt();
            let u = if d == 2 { Point::new2(th.cos(), th.sin()) } else { Point::new3(rho * th.cos(), rho * th.sin(), z) };
            let iv = dom.ray_intervals(&x, &u, 5.0);
            for w in iv.windows(2) {
                prop_assert!(w[0].1 <= w[1].0);
            }
            for (a, b) in iv {
                prop_assert!(0.0 <= a && a < b && b <= 5.0);
                prop_assert!(dom.inside(&(x + u * (0.5 * (a + b)))), "{}", dom.name());
            }
        }
    }

    #[test]
    fn kernels_are_normalized(eps in 0.05f64..0.9, d in 1usize..=3) {
        for fam in [make_localizing_family(d).unwrap(), make_fractional_family(d).unwrap()] {
            let q = levy_integral(&fam.pair_at(eps).unwrap(), 1e-12);
            prop_assert!((q.value - d as f64).abs() < 1e-6, "{} eps={eps}: {q:?}", fam.name());
        }
    }

    #[test]
    fn generated_fields_are_antisymmetric(a in prop::array::uniform2(-1.0f64..1.0), b in prop::array::uniform2(-1.0f64..1.0)) {
        let alpha = make_localizing_family(2).unwrap().pair_at(0.5).unwrap().alpha;
        for kind in [VectorKind::Identity, VectorKind::Rotation, VectorKind::Constant(Point::new2(0.3, -0.7))] {
            let f = generate_nonlocal_field(VectorField::new(2, kind), alpha.clone(), 8).unwrap();
            let (x, y) = (Point::new2(a[0], a[1]), Point::new2(b[0], b[1]));
            prop_assert!((f.eval(&x, &y) + f.eval(&y, &x)).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn divergence_is_linear(x0 in -0.5f64..0.5, x1 in -0.5f64..0.5, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let pair = make_localizing_family(2).unwrap().pair_at(0.3).unwrap();
        let ctx = OperatorContext::new(make_ball(2, Point::ZERO, 1.0).unwrap(), pair.clone(), QuadSpec::default().with_tol(1e-9, 1e-8)).unwrap();
        let f = generate_nonlocal_field(VectorField::new(2, VectorKind::Identity), pair.alpha.clone(), 8).unwrap();
        let g = generate_nonlocal_field(
            VectorField::new(2, VectorKind::GaussianGradient { amp: 1.0, sigma: 0.3, center: Point::new2(0.1, 0.2) }),
            pair.alpha.clone(),
            8,
        ).unwrap();
        let x = Point::new2(x0, x1);
        let lhs = nonlocal_divergence(&ctx, &combination(2, vec![(a, f.clone()), (b, g.clone())]), &x).unwrap();
        let rhs = a * nonlocal_divergence(&ctx, &f, &x).unwrap().value + b * nonlocal_divergence(&ctx, &g, &x).unwrap().value;
        prop_assert!((lhs.value - rhs).abs() < 1e-6 * (1.0 + rhs.abs()), "{lhs:?} vs {rhs}");
    }
}
