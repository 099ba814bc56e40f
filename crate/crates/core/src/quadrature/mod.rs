//! Numerical integration engine.
//!
//! Everything here funnels through a handful of primitives: the 1-D adaptive
//! Gauss–Kronrod routine ([`adaptive`]), geometric grading toward an endpoint
//! singularity ([`graded`]), integration over the unit sphere ([`sphere`]),
//! volume cubature over domain charts ([`volume`]), principal-value integrals
//! ([`pv`]) and double integrals over E × Eᶜ ([`double`]).

pub mod adaptive;
pub mod double;
pub mod graded;
// pub mod montecarlo;
pub mod pv;
pub mod sphere;
pub mod volume;

pub use adaptive::{integrate_adaptive, integrate_adaptive_nested, Sample};
pub use double::integrate_double_graded;
pub use graded::{integrate_graded, GradeEnd};
pub use pv::{
    integrate_pv, integrate_pv_fn, integrate_pv_fn_with_kinks, integrate_tail, TailEstimate,
};
pub use sphere::integrate_sphere;
pub use volume::{integrate_charts, integrate_volume};

/// Integration method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    TensorAdaptive,
    MonteCarlo,
    RadialAngular,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tensor" | "tensor-adaptive" => Ok(Method::TensorAdaptive),
            "mc" | "monte-carlo" => Ok(Method::MonteCarlo),
            "radial" | "radial-angular" => Ok(Method::RadialAngular),
            other => Err(format!(
                "unknown method `{other}` (expected tensor-adaptive, monte-carlo, radial-angular)"
            )),
        }
    }
}

/// Quadrature configuration shared by every integration routine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSpec {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: u64,
    pub seed: u64,
    /// Explicit truncation radius for heavy-tailed kernels; `None` picks it
    /// from the field's far-field behaviour.
    pub truncation_radius: Option<f64>,
    /// Ratio between consecutive levels of a graded mesh, in (0, 1).
    pub grading_ratio: f64,
    pub max_levels: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self {
            method: Method::TensorAdaptive,
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            max_evals: 2_000_000,
            seed: 0x5eed,
            truncation_radius: None,
            grading_ratio: 0.5,
            max_levels: 40,
        }
    }
}

impl QuadSpec {
    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_evals(mut self, n: u64) -> Self {
        self.max_evals = n;
        self
    }

    /// Checks the documented invariants.
    pub fn validate(&self) -> crate::Result<()> {
        crate::error::check_positive("rel_tol", self.rel_tol)?;
        crate::error::check_positive("abs_tol", self.abs_tol)?;
        if self.max_evals < 100 {
            return Err(crate::Error::InvalidParameter {
                name: "max_evals",
                value: self.max_evals as f64,
                reason: "must be at least 100",
            });
        }
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(crate::Error::InvalidParameter {
                name: "grading_ratio",
                value: self.grading_ratio,
                reason: "must lie in (0, 1)",
            });
        }
        Ok(())
    }

    /// Tolerance target for a computed value.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// Spec for an inner integral nested inside an outer one.
    pub fn inner(&self) -> Self {
        let mut s = *self;
        s.max_evals = (self.max_evals / 20).max(2_000);
        s
    }
}

/// Value with an error estimate and bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub n_evals: u64,
    pub seed_used: Option<u64>,
    pub converged: bool,
}

impl QuadResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            n_evals: 0,
            seed_used: None,
            converged: true,
        }
    }

    pub fn zero() -> Self {
        Self::exact(0.0)
    }

    /// Multiplies value and error by a constant.
    pub fn scaled(mut self, k: f64) -> Self {
        self.value *= k;
        self.error_estimate *= k.abs();
        self
    }

    /// Sum of independent estimates; errors add linearly.
    pub fn plus(self, o: QuadResult) -> Self {
        Self {
            value: self.value + o.value,
            error_estimate: self.error_estimate + o.error_estimate,
            n_evals: self.n_evals + o.n_evals,
            seed_used: self.seed_used.or(o.seed_used),
            converged: self.converged && o.converged,
        }
    }

    pub fn sample(&self) -> Sample {
        Sample {
            value: self.value,
            err: self.error_estimate,
            evals: self.n_evals,
            ok: self.converged,
        }
    }
}

/// Sums a list of results in index order.
pub fn sum_results(parts: &[QuadResult]) -> QuadResult {
    let values: Vec<f64> = parts.iter().map(|r| r.value).collect();
    QuadResult {
        value: crate::sum::pairwise_sum(&values),
        error_estimate: parts.iter().map(|r| r.error_estimate).sum(),
        n_evals: parts.iter().map(|r| r.n_evals).sum(),
        seed_used: parts.iter().find_map(|r| r.seed_used),
        converged: parts.iter().all(|r| r.converged),
    }
}
