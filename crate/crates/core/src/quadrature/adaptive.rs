//! Globally adaptive 1-D Gauss–Kronrod (7/15) integration.
//!
//! The integrand may itself be the result of an inner integration, in which
//! case it reports its own error. Inner errors are carried through the outer
//! rule and combined with the outer discretisation error in quadrature.

use super::QuadResult;
use crate::gauss::{gk15_combine, gk15_points, GK15_WEIGHTS};
use rayon::prelude::*;

/// One integrand evaluation, possibly produced by an inner quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub err: f64,
    pub evals: u64,
    pub ok: bool,
}

impl Sample {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            err: 0.0,
            evals: 1,
            ok: true,
        }
    }
}

impl From<f64> for Sample {
    fn from(v: f64) -> Self {
        Sample::exact(v)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    inner_err: f64,
}

fn eval_segment<F>(f: &F, a: f64, b: f64, parallel: bool, evals: &mut u64, ok: &mut bool) -> Segment
where
    F: Fn(f64) -> Sample + Sync,
{
    let pts = gk15_points(a, b);
    let samples: Vec<Sample> = if parallel {
        pts.par_iter().map(|&x| f(x)).collect()
    } else {
        pts.iter().map(|&x| f(x)).collect()
    };
    let mut v = [0.0; 15];
    let mut e = [0.0; 15];
    for (i, s) in samples.iter().enumerate() {
        v[i] = s.value;
        e[i] = s.err;
        *evals += s.evals;
        *ok &= s.ok;
    }
    let (k, g) = gk15_combine(a, b, &v);
    let h = 0.5 * (b - a);

    // QUADPACK-style error scaling
    let mean = k / (b - a);
    let mut resasc = GK15_WEIGHTS[7] * (v[7] - mean).abs();
    let mut resabs = GK15_WEIGHTS[7] * v[7].abs();
    for i in 0..7 {
        resasc += GK15_WEIGHTS[i] * ((v[i] - mean).abs() + (v[14 - i] - mean).abs());
        resabs += GK15_WEIGHTS[i] * (v[i].abs() + v[14 - i].abs());
    }
    resasc *= h.abs();
    resabs *= h.abs();
    let mut err = (k - g).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    if !k.is_finite() {
        err = f64::INFINITY;
    }

    let mut inner = GK15_WEIGHTS[7] * e[7];
    for i in 0..7 {
        inner += GK15_WEIGHTS[i] * (e[i] + e[14 - i]);
    }
    Segment {
        a,
        b,
        value: k,
        err,
        inner_err: inner * h.abs(),
    }
}

/// Adaptive integration of an integrand that reports its own error.
///
/// `breaks` are interior points where the integrand may have kinks or jumps;
/// `init_panels` uniform panels are placed between consecutive breaks.
#[allow(clippy::too_many_arguments)]
pub fn integrate_adaptive_nested<F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    init_panels: usize,
    abs_tol: f64,
    rel_tol: f64,
    max_evals: u64,
    parallel: bool,
) -> QuadResult
where
    F: Fn(f64) -> Sample + Sync,
{
    if a == b {
        return QuadResult::zero();
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&x| x > lo && x < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let mut evals = 0u64;
    let mut ok = true;
    let mut segs: Vec<Segment> = Vec::new();
    let panels = init_panels.max(1);
    for w in cuts.windows(2) {
        let h = (w[1] - w[0]) / panels as f64;
        for p in 0..panels {
            let x0 = w[0] + h * p as f64;
            let x1 = if p + 1 == panels { w[1] } else { x0 + h };
            segs.push(eval_segment(&f, x0, x1, parallel, &mut evals, &mut ok));
        }
    }

    let mut converged;
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        converged = err <= abs_tol.max(rel_tol * total.abs());
        if converged || evals >= max_evals {
            break;
        }
        let (idx, worst) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, s)| (i, *s))
            .expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-14 * (hi - lo) {
            // cannot refine further; freeze this segment
            segs[idx].err = 0.0;
            segs[idx].inner_err += worst.err;
            if segs.iter().all(|s| s.err == 0.0) {
                break;
            }
            continue;
        }
        let left = eval_segment(&f, worst.a, mid, parallel, &mut evals, &mut ok);
        let right = eval_segment(&f, mid, worst.b, parallel, &mut evals, &mut ok);
        segs[idx] = left;
        segs.insert(idx + 1, right);
    }

    let values: Vec<f64> = segs.iter().map(|s| s.value).collect();
    let value = crate::sum::pairwise_sum(&values);
    let outer_err: f64 = segs.iter().map(|s| s.err).sum();
    let inner_err: f64 = segs.iter().map(|s| s.inner_err).sum();
    QuadResult {
        value: sign * value,
        error_estimate: outer_err.hypot(inner_err),
        n_evals: evals,
        seed_used: None,
        converged: converged && ok,
    }
}

/// Adaptive integration of a plain scalar integrand (serial evaluation).
pub fn integrate_adaptive<F>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_evals: u64,
) -> QuadResult
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_adaptive_nested(
        |x| Sample::exact(f(x)),
        a,
        b,
        &[],
        1,
        abs_tol,
        rel_tol,
        max_evals,
        false,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrals() {
        let r = integrate_adaptive(
            |x: f64| x.sin(),
            0.0,
            std::f64::consts::PI,
            1e-12,
            1e-12,
            100_000,
        );
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.converged);
        let r = integrate_adaptive(
            |x: f64| 1.0 / (1.0 + x * x),
            -1.0,
            1.0,
            1e-12,
            1e-12,
            100_000,
        );
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn kinks_at_breaks() {
        let f = |x: f64| (x - 0.3).abs();
        let r = integrate_adaptive_nested(
            |x| f(x).into(),
            0.0,
            1.0,
            &[0.3],
            1,
            1e-13,
            1e-13,
            10_000,
            false,
        );
        let exact = 0.5 * 0.09 + 0.5 * 0.49;
        assert!((r.value - exact).abs() < 1e-14);
        assert!(r.n_evals <= 30);
    }

    #[test]
    fn jump_without_break_is_resolved_adaptively() {
        let r = integrate_adaptive(
            |x: f64| if x < 0.3141 { 1.0 } else { 0.0 },
            0.0,
            1.0,
            1e-8,
            0.0,
            200_000,
        );
        assert!((r.value - 0.3141).abs() < 1e-7);
        assert!((r.value - 0.3141).abs() <= 3.0 * r.error_estimate.max(1e-15));
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate_adaptive(|x: f64| x * x, 1.0, 0.0, 1e-12, 1e-12, 1000);
        assert!((r.value + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn parallel_and_serial_agree_bitwise() {
        let f = |x: f64| Sample::exact((3.0 * x).cos() * (-x * x).exp());
        let a = integrate_adaptive_nested(f, -2.0, 3.0, &[], 3, 1e-10, 1e-10, 100_000, false);
        let b = integrate_adaptive_nested(f, -2.0, 3.0, &[], 3, 1e-10, 1e-10, 100_000, true);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error_estimate.to_bits(), b.error_estimate.to_bits());
    }

    #[test]
    fn inner_errors_propagate() {
        let f = |_x: f64| Sample {
            value: 1.0,
            err: 0.1,
            evals: 1,
            ok: true,
        };
        let r = integrate_adaptive_nested(f, 0.0, 2.0, &[], 1, 1e-12, 1e-12, 1000, false);
        assert!((r.value - 2.0).abs() < 1e-14);
        assert!((r.error_estimate - 0.2).abs() < 1e-12);
    }
}
