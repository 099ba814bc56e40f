//! Integration over unions of coordinate charts.

use super::adaptive::{integrate_adaptive_nested, Sample};
use super::{sum_results, Method, QuadResult, QuadSpec};
use crate::error::Result;
use crate::geometry::{volume_charts, Chart, Domain};
use crate::point::Point;
use crate::rng::StreamKey;
use rayon::prelude::*;

/// ∫_Ω g(x) dx.
pub fn integrate_volume<G>(domain: &Domain, g: G, spec: &QuadSpec) -> Result<QuadResult>
where
    G: Fn(&Point) -> Sample + Sync,
{
    spec.validate()?;
    Ok(integrate_charts(&volume_charts(domain)?, g, spec))
}

/// Σ over charts of ∫ g(map(u)) |J(u)| du, adaptively or by stratified
/// Monte Carlo depending on `spec.method`.
pub fn integrate_charts<G>(charts: &[Chart], g: G, spec: &QuadSpec) -> QuadResult
where
    G: Fn(&Point) -> Sample + Sync,
{
    if charts.is_empty() {
        return QuadResult::zero();
    }
    let k = charts.len() as f64;
    let parts: Vec<QuadResult> = charts
        .iter()
        .enumerate()
        .map(|(i, ch)| match spec.method {
            Method::MonteCarlo => stratified(
                ch,
                &g,
                spec.max_evals / charts.len() as u64,
                spec.seed,
                i as u64,
            ),
            _ => nested(
                ch,
                &g,
                spec.abs_tol / k,
                spec.rel_tol,
                spec.max_evals / charts.len() as u64,
            ),
        })
        .collect();
    let mut out = sum_results(&parts);
    if spec.method == Method::MonteCarlo {
        out.seed_used = Some(spec.seed);
    }
    out
}

fn nested<G>(ch: &Chart, g: &G, abs_tol: f64, rel_tol: f64, max_evals: u64) -> QuadResult
where
    G: Fn(&Point) -> Sample + Sync,
{
    let d = ch.dim;
    let span = |a: usize| ch.hi[a] - ch.lo[a];
    let leaf = |u: [f64; 3]| -> Sample {
        let (x, j) = ch.eval(&u);
        if j == 0.0 {
            return Sample::exact(0.0);
        }
        let s = g(&x);
        Sample {
            value: s.value * j,
            err: s.err * j.abs(),
            ..s
        }
    };
    let budget = max_evals.max(1_000);
    match d {
        1 => integrate_adaptive_nested(
            |u0| leaf([u0, 0.0, 0.0]),
            ch.lo[0],
            ch.hi[0],
            &[],
            2,
            abs_tol,
            rel_tol,
            budget,
            true,
        ),
        2 => {
            let tol1 = abs_tol / (4.0 * span(0));
            integrate_adaptive_nested(
                |u0| {
                    integrate_adaptive_nested(
                        |u1| leaf([u0, u1, 0.0]),
                        ch.lo[1],
                        ch.hi[1],
                        &[],
                        1,
                        tol1,
                        rel_tol,
                        budget / 8,
                        false,
                    )
                    .sample()
                },
                ch.lo[0],
                ch.hi[0],
                &[],
                1,
                abs_tol / 2.0,
                rel_tol,
                budget,
                true,
            )
        }
        _ => {
            let tol1 = abs_tol / (4.0 * span(0));
            let tol2 = tol1 / (4.0 * span(1));
            integrate_adaptive_nested(
                |u0| {
                    integrate_adaptive_nested(
                        |u1| {
                            integrate_adaptive_nested(
                                |u2| leaf([u0, u1, u2]),
                                ch.lo[2],
                                ch.hi[2],
                                &[],
                                1,
                                tol2,
                                rel_tol,
                                budget / 64,
                                false,
                            )
                            .sample()
                        },
                        ch.lo[1],
                        ch.hi[1],
                        &[],
                        1,
                        tol1,
                        rel_tol,
                        budget / 8,
                        false,
                    )
                    .sample()
                },
                ch.lo[0],
                ch.hi[0],
                &[],
                1,
                abs_tol / 2.0,
                rel_tol,
                budget,
                true,
            )
        }
    }
}

/// Two samples per cell of an m^d grid in chart coordinates; the error is
/// one standard deviation from the within-cell differences.
fn stratified<G>(ch: &Chart, g: &G, n: u64, seed: u64, stream: u64) -> QuadResult
where
    G: Fn(&Point) -> Sample + Sync,
{
    let d = ch.dim;
    let m = (((n / 2).max(1) as f64).powf(1.0 / d as f64).floor() as usize).max(1);
    let cells = m.pow(d as u32);
    let key = StreamKey::new(seed, 0x701_u64.wrapping_add(stream));
    let mut cell_vol = 1.0;
    for a in 0..d {
        cell_vol *= (ch.hi[a] - ch.lo[a]) / m as f64;
    }
    let per_cell: Vec<(f64, f64, u64)> = (0..cells)
        .into_par_iter()
        .map(|c| {
            let mut idx = [0usize; 3];
            let mut rest = c;
            for slot in idx.iter_mut().take(d) {
                *slot = rest % m;
                rest /= m;
            }
            let mut vals = [0.0; 2];
            let mut evals = 0;
            for (q, v) in vals.iter_mut().enumerate() {
                let r: [f64; 3] = key.uniforms((2 * c + q) as u64);
                let mut u = [0.0; 3];
                for a in 0..d {
                    u[a] = ch.lo[a] + (idx[a] as f64 + r[a]) / m as f64 * (ch.hi[a] - ch.lo[a]);
                }
                let (x, j) = ch.eval(&u);
                if j != 0.0 {
                    let s = g(&x);
                    *v = s.value * j;
                    evals += s.evals;
                }
            }
            let mean = 0.5 * (vals[0] + vals[1]) * cell_vol;
            let var = 0.25 * (vals[0] - vals[1]).powi(2) * cell_vol * cell_vol;
            (mean, var, evals)
        })
        .collect();
    let means: Vec<f64> = per_cell.iter().map(|p| p.0).collect();
    let vars: Vec<f64> = per_cell.iter().map(|p| p.1).collect();
    QuadResult {
        value: crate::sum::pairwise_sum(&means),
        error_estimate: crate::sum::pairwise_sum(&vars).sqrt(),
        n_evals: per_cell.iter().map(|p| p.2).sum(),
        seed_used: Some(seed),
        converged: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_ball, make_box, make_ellipse, make_lshape};
    use std::f64::consts::PI;

    #[test]
    fn volumes_and_moments() {
        let spec = QuadSpec::default().with_tol(1e-10, 1e-10);
        let one = |_: &Point| Sample::exact(1.0);
        let cases = [
            (make_ball(2, Point::ZERO, 1.0).unwrap(), PI),
            (make_ball(3, Point::ZERO, 1.0).unwrap(), 4.0 * PI / 3.0),
            (make_lshape(), 3.0),
            (make_ellipse(1.0, 0.5).unwrap(), 0.5 * PI),
            (make_box(3, &[1.0, 0.5, 2.0]).unwrap(), 8.0),
        ];
        for (dom, v) in cases {
            let r = integrate_volume(&dom, one, &spec).unwrap();
            assert!((r.value - v).abs() < 1e-9, "{} {r:?}", dom.name());
        }
        // ∫_disk |x|² = π/2
        let disk = make_ball(2, Point::new2(0.0, 0.0), 1.0).unwrap();
        let r = integrate_volume(&disk, |x: &Point| Sample::exact(x.norm_sq()), &spec).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_honest() {
        let spec = QuadSpec::default()
            .with_method(Method::MonteCarlo)
            .with_max_evals(20_000)
            .with_seed(3);
        let ball = make_ball(3, Point::ZERO, 1.0).unwrap();
        let g = |x: &Point| Sample::exact(x[0] * x[0]);
        let a = integrate_volume(&ball, g, &spec).unwrap();
        let b = integrate_volume(&ball, g, &spec).unwrap();
        assert_eq!(a, b);
        let exact = 4.0 * PI / 15.0;
        assert!((a.value - exact).abs() < 4.0 * a.error_estimate, "{a:?}");
        assert_eq!(a.seed_used, Some(3));
    }
}
