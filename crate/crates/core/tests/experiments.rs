use nonlocal::experiments::{run_dc, run_nc, ExperimentReport};
use nonlocal::fields::{generate_nonlocal_field, ScalarField, VectorField, VectorKind};
use nonlocal::geometry::{make_ball, make_box};
use nonlocal::kernels::make_localizing_family;
use nonlocal::operators::{duality, OperatorContext};
use nonlocal::{Point, QuadSpec};

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(job)
}

/// Everything except the wall-clock times.
fn strip_times(mut r: ExperimentReport) -> ExperimentReport {
    for row in &mut r.rows {
        row.wall_time = Default::default();
    }
    r
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let disk = make_ball(2, Point::ZERO, 1.0).unwrap();
    let fam = make_localizing_family(2).unwrap();
    let field = VectorField::new(2, VectorKind::Identity);
    let spec = QuadSpec::default().with_tol(1e-5, 1e-4).with_seed(3);
    let run = || strip_times(run_dc(&disk, &fam, &field, &[0.4, 0.2], &spec).unwrap());
    let one = in_pool(1, run);
    let three = in_pool(3, run);
    assert_eq!(one, three);
    assert_ne!(one.rows[0].seed, one.rows[1].seed);
}

#[test]
fn monte_carlo_collar_is_reproducible() {
    let ball = make_ball(3, Point::ZERO, 1.0).unwrap();
    let fam = make_localizing_family(3).unwrap();
    let field = VectorField::new(3, VectorKind::Constant(Point::new3(0.0, 0.0, 1.0)));
    let spec = QuadSpec::default().with_tol(1e-4, 1e-3).with_seed(42);
    let run = || strip_times(run_nc(&ball, &fam, &field, &[0.3], &spec).unwrap());
    let a = in_pool(1, run);
    let b = in_pool(2, run);
    assert_eq!(a, b);
    // a constant field has zero flux through the sphere
    assert!(
        a.rows[0].value.abs() < 3.0 * a.rows[0].err_est.max(1e-3),
        "{a}"
    );
}

#[test]
fn square_flux_and_corner_columns() {
    let sq = make_box(2, &[1.0, 1.0]).unwrap();
    let fam = make_localizing_family(2).unwrap();
    let r = run_nc(
        &sq,
        &fam,
        &VectorField::new(2, VectorKind::Identity),
        &[0.4, 0.2],
        &QuadSpec::default().with_tol(1e-5, 1e-4),
    )
    .unwrap();
    for row in &r.rows {
        assert!((row.reference - 8.0).abs() < 1e-9);
        assert!((row.value - 8.0).abs() < 0.05, "{r}");
        assert!(row.extra("corner_measure").is_some());
    }
    let cm: Vec<f64> = r
        .rows
        .iter()
        .map(|row| row.extra("corner_measure").unwrap())
        .collect();
    assert!(cm[1] < cm[0]);
}

#[test]
fn duality_of_a_zero_field_vanishes() {
    let pair = make_localizing_family(2).unwrap().pair_at(0.3).unwrap();
    let ctx = OperatorContext::new(
        make_ball(2, Point::ZERO, 1.0).unwrap(),
        pair.clone(),
        QuadSpec::default().with_tol(1e-7, 1e-6),
    )
    .unwrap();
    let zero = generate_nonlocal_field(
        VectorField::new(2, VectorKind::Constant(Point::ZERO)),
        pair.alpha.clone(),
        8,
    )
    .unwrap();
    let phi = ScalarField::gaussian(1.0, 0.2, Point::ZERO).unwrap();
    assert_eq!(duality(&ctx, &zero, &phi).unwrap().residual(), 0.0);
}
