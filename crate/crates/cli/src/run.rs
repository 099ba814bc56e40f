//! Dispatch from a validated configuration to the experiment runners.

use crate::config::Config;
use crate::registry::{build_domain, build_family, build_field, Experiment, FamilyName};
use nonlocal::experiments::{
    run_approx_identity, run_curvature, run_dc, run_fractional_suite, run_kernel_check,
    run_mollified_convergence, run_nc, run_nt_check, run_perimeter_scaling, run_perimeter_sweep,
    ExperimentReport,
};
use nonlocal::{Error, Point, QuadSpec};
use std::fmt;

/// Kernel normalization tolerance |levy − d|.
pub const KERNEL_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum RunError {
    /// The configuration asks for something the library rejects.
    Config(Error),
    /// A numerical failure while running.
    Numerical(Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "configuration rejected: {e}"),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonIntegrable(_) | Error::UnknownTail => RunError::Numerical(e),
            _ => RunError::Config(e),
        }
    }
}

/// Quadrature settings of a run; unset keys default to abs 1e-6, rel 1e-5.
pub fn quad_spec(cfg: &Config) -> QuadSpec {
    let q = &cfg.quad;
    let mut spec = QuadSpec::default()
        .with_tol(q.abs_tol.unwrap_or(1e-6), q.rel_tol.unwrap_or(1e-5))
        .with_seed(cfg.seed);
    if let Some(n) = q.max_evals {
        spec = spec.with_max_evals(n);
    }
    if let Some(m) = q.method.as_deref().and_then(|m| m.parse().ok()) {
        spec = spec.with_method(m);
    }
    spec
}

/// Final-point tolerance of the convergence studies.
fn final_tolerance(cfg: &Config) -> f64 {
    cfg.tolerance.unwrap_or(match (cfg.experiment, cfg.family) {
        (Experiment::ConvergeDc, FamilyName::Localizing) => 0.02,
        _ => 0.05,
    })
}

/// Tolerance of (1−s)Per_s against Per at the largest s.
pub const PERIMETER_LIMIT_TOL: f64 = 0.10;
/// Final gap of the mollified-maximizer perimeter functional.
pub const MOLLIFIED_GAP_TOL: f64 = 0.05;

pub fn run(cfg: &Config) -> Result<Vec<ExperimentReport>, RunError> {
    let spec = quad_spec(cfg);
    spec.validate()?;
    let domain = build_domain(cfg.shape, &cfg.domain)?;
    let d = domain.dimension();
    let family = || build_family(cfg.family, d);
    let field = build_field(cfg.field, d);
    let reports = match cfg.experiment {
        Experiment::CheckKernel => vec![run_kernel_check(&family()?, &cfg.eps, KERNEL_TOL)?],
        Experiment::NtCheck => vec![run_nt_check(&domain, &family()?, &field, &cfg.eps, &spec)?],
        Experiment::ConvergeDc => {
            let mut r = run_dc(&domain, &family()?, &field, &cfg.eps, &spec)?;
            r.check_final_rel_err(final_tolerance(cfg));
            vec![r]
        }
        Experiment::ConvergeNc => {
            let mut r = run_nc(&domain, &family()?, &field, &cfg.eps, &spec)?;
            r.check_final_rel_err(final_tolerance(cfg));
            vec![r]
        }
        Experiment::ApproxIdentity => vec![run_approx_identity(d, &cfg.eps, cfg.delta)?],
        Experiment::FracSuite => {
            let mut rs = run_fractional_suite(&domain, &sorted(&cfg.s), &cfg.p, &spec)?;
            rs[0].check_final_rel_err(PERIMETER_LIMIT_TOL);
            rs[1].check_final_rel_err(MOLLIFIED_GAP_TOL);
            rs
        }
        Experiment::Perimeter => {
            let s = sorted(&cfg.s);
            let mut sweep = run_perimeter_sweep(&domain, &s, &spec)?;
            sweep.check_final_rel_err(PERIMETER_LIMIT_TOL);
            let s_mid = s[s.len() / 2];
            let scaling = run_perimeter_scaling(&domain, s_mid, &cfg.lambda, &spec)?;
            let mut moll = run_mollified_convergence(&domain, s_mid, &cfg.eps_moll, &spec)?;
            moll.check_final_rel_err(MOLLIFIED_GAP_TOL);
            vec![sweep, scaling, moll]
        }
        Experiment::Curvature => {
            let x = match &cfg.point {
                Some(p) => Point::from_slice(p),
                None if domain.is_bounded() => {
                    let c = domain.center();
                    domain
                        .nearest_boundary_point(&(c + Point::unit(0) * domain.extent()))
                        .point
                }
                None => domain.center(),
            };
            vec![run_curvature(&domain, &cfg.s, &x, &spec)?]
        }
    };
    Ok(reports)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}
