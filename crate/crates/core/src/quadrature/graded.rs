//! Geometric grading toward an endpoint singularity.
//!
//! The interval is cut into levels `[a + L rᵏ⁺¹, a + L rᵏ]`. Near an algebraic
//! singularity the level integrals form a geometric sequence, so once the
//! ratio of consecutive levels has stabilised, the remainder below the last
//! level is summed in closed form. No node ever sits on the singular end.

use super::adaptive::{integrate_adaptive_nested, Sample};
use super::QuadResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradeEnd {
    Lower,
    Upper,
    Both,
}

/// Parameters for a graded integration.
#[derive(Debug, Clone, Copy)]
pub struct Grading {
    pub ratio: f64,
    pub max_levels: usize,
    /// Levels integrated before the geometric tail may be trusted; the
    /// integrand must have reached its asymptotic regime by `rᵐⁱⁿ` of the
    /// interval length.
    pub min_levels: usize,
    /// Relative depth rᵏ below which no level is integrated, for integrands
    /// only resolved down to some scale; the remainder is then extrapolated
    /// from the levels above it.
    pub depth_floor: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: u64,
    pub parallel: bool,
}

impl Grading {
    pub fn from_spec(spec: &super::QuadSpec, parallel: bool) -> Self {
        Self {
            ratio: spec.grading_ratio,
            max_levels: spec.max_levels,
            min_levels: 6,
            depth_floor: 0.0,
            abs_tol: spec.abs_tol,
            rel_tol: spec.rel_tol,
            max_evals: spec.max_evals,
            parallel,
        }
    }
}

/// Integrates `f` over [a, b] with grading toward the chosen end(s).
pub fn integrate_graded<F>(f: F, a: f64, b: f64, end: GradeEnd, g: &Grading) -> QuadResult
where
    F: Fn(f64) -> Sample + Sync,
{
    match end {
        GradeEnd::Lower => graded_half(&f, a, b, g),
        GradeEnd::Upper => graded_half(&|t: f64| f(a + b - t), a, b, g),
        GradeEnd::Both => {
            let m = 0.5 * (a + b);
            let half = Grading {
                abs_tol: g.abs_tol / 2.0,
                max_evals: g.max_evals / 2,
                ..*g
            };
            let lo = graded_half(&f, a, m, &half);
            let hi = graded_half(&|t: f64| f(m + b - t), m, b, &half);
            lo.plus(hi)
        }
    }
}

/// Graded integration toward `a`; also reports the integrand's apparent
/// power-law exponent near `a` through the level ratio.
fn graded_half<F>(f: &F, a: f64, b: f64, g: &Grading) -> QuadResult
where
    F: Fn(f64) -> Sample + Sync,
{
    let len = b - a;
    if len == 0.0 {
        return QuadResult::zero();
    }
    let r = g.ratio;
    let mut levels: Vec<QuadResult> = Vec::with_capacity(g.max_levels);
    let mut evals = 0u64;
    let mut remainder = 0.0;
    let mut remainder_err = f64::NAN;
    let mut ok = true;
    let level_abs = g.abs_tol / 8.0;

    for k in 0..g.max_levels {
        if r.powi(k as i32 + 1) < g.depth_floor {
            ok = false;
            break;
        }
        let hi = a + len * r.powi(k as i32);
        let lo = a + len * r.powi(k as i32 + 1);
        let budget = (g.max_evals.saturating_sub(evals) / 2).max(1000);
        let lev =
            integrate_adaptive_nested(f, lo, hi, &[], 1, level_abs, g.rel_tol, budget, g.parallel);
        evals += lev.n_evals;
        ok &= lev.converged;
        levels.push(lev);

        let n = levels.len();
        if n < 3.max(g.min_levels) {
            continue;
        }
        let i2 = levels[n - 1].value;
        let i1 = levels[n - 2].value;
        let i0 = levels[n - 3].value;
        let running: f64 = levels.iter().map(|l| l.value).sum();
        let target = g.abs_tol.max(g.rel_tol * running.abs()) / 4.0;
        if i2 == 0.0 && i1 == 0.0 {
            remainder = 0.0;
            remainder_err = 0.0;
            break;
        }
        if i1 == 0.0 || i0 == 0.0 {
            continue;
        }
        let q = i2 / i1;
        let qp = i1 / i0;
        if (0.0..1.0).contains(&q) && (0.0..1.0).contains(&qp) {
            let rem = i2 * q / (1.0 - q);
            let rem_prev = i2 * qp / (1.0 - qp);
            let err = (rem - rem_prev).abs() + levels[n - 1].error_estimate * q / (1.0 - q);
            remainder = rem;
            remainder_err = err;
            if err <= target {
                break;
            }
        } else if i2.abs() <= target * 1e-3 {
            remainder = 0.0;
            remainder_err = i2.abs();
            break;
        } else {
            remainder = 0.0;
            remainder_err = f64::NAN;
        }
        if evals >= g.max_evals {
            ok = false;
            break;
        }
    }

    let last = levels.last().map(|l| l.value.abs()).unwrap_or(0.0);
    if remainder_err.is_nan() {
        // the tail never settled into a geometric sequence
        remainder = 0.0;
        remainder_err = last;
        if last > g.abs_tol {
            ok = false;
        }
    }
    let mut values: Vec<f64> = levels.iter().map(|l| l.value).collect();
    values.push(remainder);
    let value = crate::sum::pairwise_sum(&values);
    let err: f64 = levels.iter().map(|l| l.error_estimate).sum::<f64>() + remainder_err;
    QuadResult {
        value,
        error_estimate: err,
        n_evals: evals,
        seed_used: None,
        converged: ok && err <= 10.0 * g.abs_tol.max(g.rel_tol * value.abs()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grading(tol: f64) -> Grading {
        Grading {
            ratio: 0.5,
            max_levels: 60,
            min_levels: 6,
            depth_floor: 0.0,
            abs_tol: tol,
            rel_tol: tol,
            max_evals: 1_000_000,
            parallel: false,
        }
    }

    #[test]
    fn algebraic_endpoint_singularity() {
        // ∫_0^1 x^{-0.9} dx = 10; levels decay like 2^{-0.1}, so the
        // closed-form remainder carries most of the mass.
        let r = integrate_graded(
            |x: f64| x.powf(-0.9).into(),
            0.0,
            1.0,
            GradeEnd::Lower,
            &grading(1e-10),
        );
        assert!((r.value - 10.0).abs() < 1e-8, "{r:?}");
        assert!(r.converged);
    }

    #[test]
    fn singularity_with_smooth_correction() {
        // ∫_0^1 x^{-1/2}(1 + x) dx = 2 + 2/3
        let r = integrate_graded(
            |x: f64| (x.powf(-0.5) * (1.0 + x)).into(),
            0.0,
            1.0,
            GradeEnd::Lower,
            &grading(1e-10),
        );
        assert!((r.value - 8.0 / 3.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn upper_and_both_ends() {
        let r = integrate_graded(
            |x: f64| (1.0 - x).powf(-0.5).into(),
            0.0,
            1.0,
            GradeEnd::Upper,
            &grading(1e-10),
        );
        assert!((r.value - 2.0).abs() < 1e-8);
        // ∫_0^1 (x(1-x))^{-1/2} dx = π
        let r = integrate_graded(
            |x: f64| (x * (1.0 - x)).powf(-0.5).into(),
            0.0,
            1.0,
            GradeEnd::Both,
            &grading(1e-10),
        );
        assert!((r.value - std::f64::consts::PI).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn vanishing_near_end_stops_early() {
        let r = integrate_graded(
            |x: f64| if x < 0.1 { 0.0 } else { 1.0 }.into(),
            0.0,
            1.0,
            GradeEnd::Lower,
            &grading(1e-10),
        );
        assert!((r.value - 0.9).abs() < 1e-9, "{r:?}");
        assert!(r.n_evals < 5000);
    }
}
