//! Radial kernels, admissible pairs (α, μ) and the two normalized families.
//!
//! Every profile is a finite sum of power laws `c·rᵖ` restricted to radial
//! bands `[r_lo, r_hi)`. This covers both built-in families and the custom
//! pairs accepted by the configuration format, and it makes products, tails
//! and far-field moments available in closed form.

use crate::error::{check_dim, check_positive, Error, Result};
use crate::point::Point;
use crate::quadrature::{integrate_adaptive, QuadResult};
use crate::special::sphere_area;
use std::sync::OnceLock;

/// Value at which a partial Lévy integral is declared divergent.
pub const OVERFLOW_GUARD: f64 = 1e12;

/// One power-law band `coeff · r^exponent` on `[r_lo, r_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPiece {
    pub r_lo: f64,
    pub r_hi: f64,
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerPiece {
    pub fn new(r_lo: f64, r_hi: f64, coeff: f64, exponent: f64) -> Self {
        Self {
            r_lo,
            r_hi,
            coeff,
            exponent,
        }
    }

    fn contains(&self, r: f64) -> bool {
        r >= self.r_lo && r < self.r_hi
    }

    /// ∫_{lo}^{hi} coeff · r^{exponent + extra} dr over the part of [lo, hi]
    /// inside the band. Returns +∞ when the integral diverges.
    fn moment(&self, lo: f64, hi: f64, extra: f64) -> f64 {
        let a = lo.max(self.r_lo);
        let b = hi.min(self.r_hi);
        if !(b > a) || self.coeff == 0.0 {
            return 0.0;
        }
        self.coeff * power_integral(a, b, self.exponent + extra)
    }
}

/// ∫_a^b rᵖ dr for 0 ≤ a < b ≤ ∞.
pub fn power_integral(a: f64, b: f64, p: f64) -> f64 {
    let q = p + 1.0;
    if q == 0.0 {
        if a == 0.0 || b.is_infinite() {
            return f64::INFINITY;
        }
        return (b / a).ln();
    }
    if (a == 0.0 && q < 0.0) || (b.is_infinite() && q > 0.0) {
        return f64::INFINITY;
    }
    let hi = if b.is_infinite() { 0.0 } else { b.powf(q) };
    let lo = if a == 0.0 { 0.0 } else { a.powf(q) };
    (hi - lo) / q
}

/// A nonnegative radial function h ↦ ρ(|h|) on ℝᵈ ∖ {0}.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    dim: usize,
    pieces: Vec<PowerPiece>,
}

impl RadialProfile {
    /// Builds a profile from bands; bands may not overlap.
    pub fn new(dim: usize, mut pieces: Vec<PowerPiece>) -> Result<Self> {
        check_dim(dim)?;
        for p in &pieces {
            if !(p.r_lo >= 0.0 && p.r_hi > p.r_lo) || p.r_lo.is_infinite() {
                return Err(Error::InvalidParameter {
                    name: "r_lo/r_hi",
                    value: p.r_lo,
                    reason: "bands need 0 <= r_lo < r_hi",
                });
            }
            if !(p.coeff >= 0.0 && p.coeff.is_finite()) || !p.exponent.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "coeff",
                    value: p.coeff,
                    reason: "coefficients must be finite and nonnegative",
                });
            }
        }
        pieces.retain(|p| p.coeff > 0.0);
        pieces.sort_by(|a, b| a.r_lo.total_cmp(&b.r_lo));
        for w in pieces.windows(2) {
            if w[1].r_lo < w[0].r_hi {
                return Err(Error::InvalidParameter {
                    name: "r_lo",
                    value: w[1].r_lo,
                    reason: "bands overlap",
                });
            }
        }
        Ok(Self { dim, pieces })
    }

    /// `coeff · r^exponent` on all of (0, ∞).
    pub fn power(dim: usize, coeff: f64, exponent: f64) -> Result<Self> {
        Self::new(
            dim,
            vec![PowerPiece::new(0.0, f64::INFINITY, coeff, exponent)],
        )
    }

    /// `value` on [0, radius), zero beyond.
    pub fn indicator(dim: usize, radius: f64, value: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        Self::new(dim, vec![PowerPiece::new(0.0, radius, value, 0.0)])
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        Self::power(dim, value, 0.0)
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new())
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[PowerPiece] {
        &self.pieces
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.contains(r))
            .map_or(0.0, |p| p.coeff * r.powf(p.exponent))
    }

    /// Evaluates at the vector h through its length, so h and −h agree bitwise.
    pub fn eval_vec(&self, h: &Point) -> f64 {
        self.eval(h.norm())
    }

    /// Order of the power-law blow-up at the origin (0 when bounded).
    pub fn singularity_exponent(&self) -> f64 {
        self.pieces
            .iter()
            .filter(|p| p.r_lo == 0.0)
            .map(|p| (-p.exponent).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Radius beyond which the profile vanishes (+∞ if it never does).
    pub fn support_radius(&self) -> f64 {
        self.pieces.iter().map(|p| p.r_hi).fold(0.0, f64::max)
    }

    /// Exponent of the power law governing r → ∞, if the support is unbounded.
    pub fn tail_exponent(&self) -> Option<f64> {
        self.pieces
            .iter()
            .find(|p| p.r_hi.is_infinite())
            .map(|p| p.exponent)
    }

    /// Radii where the profile may be discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.r_lo, p.r_hi])
            .filter(|r| *r > 0.0 && r.is_finite())
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Pointwise product of two profiles.
    pub fn product(&self, other: &RadialProfile) -> Result<RadialProfile> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let lo = a.r_lo.max(b.r_lo);
                let hi = a.r_hi.min(b.r_hi);
                if hi > lo {
                    out.push(PowerPiece::new(
                        lo,
                        hi,
                        a.coeff * b.coeff,
                        a.exponent + b.exponent,
                    ));
                }
            }
        }
        RadialProfile::new(self.dim, out)
    }

    /// Pointwise ratio `self / other` where `other` is positive; used for the
    /// weight α⁻¹μ of the nonlocal scalar product. Zero where `other` vanishes.
    pub fn quotient(&self, other: &RadialProfile) -> Result<RadialProfile> {
        let inv: Vec<PowerPiece> = other
            .pieces
            .iter()
            .map(|p| PowerPiece::new(p.r_lo, p.r_hi, 1.0 / p.coeff, -p.exponent))
            .collect();
        self.product(&RadialProfile::new(other.dim, inv)?)
    }

    /// ∫_{lo}^{hi} ρ(r) r^{extra} dr in closed form (+∞ if divergent).
    pub fn radial_moment(&self, lo: f64, hi: f64, extra: f64) -> f64 {
        self.pieces.iter().map(|p| p.moment(lo, hi, extra)).sum()
    }

    /// ∫_{lo<|h|<hi} ρ(|h|) |h|^{extra} dh over ℝᵈ.
    pub fn shell_integral(&self, lo: f64, hi: f64, extra: f64) -> f64 {
        sphere_area(self.dim) * self.radial_moment(lo, hi, extra + self.dim as f64 - 1.0)
    }

    /// Sampled check of the documented invariants: nonnegativity, vanishing
    /// beyond the support radius and boundedness of r^{sing}·ρ(r) near 0.
    pub fn check_invariants(&self) -> bool {
        let sing = self.singularity_exponent();
        let supp = self.support_radius();
        let mut near_zero = Vec::new();
        for k in 0..=120 {
            let r = 10f64.powf(-12.0 + 0.125 * k as f64);
            let v = self.eval(r);
            if v < 0.0 || !v.is_finite() {
                return false;
            }
            if supp.is_finite() && r > supp && v != 0.0 {
                return false;
            }
            if r < 1e-3 {
                near_zero.push(r.powf(sing) * v);
            }
        }
        let bound = near_zero.iter().copied().fold(0.0, f64::max);
        bound.is_finite()
            && near_zero
                .last()
                .is_none_or(|l| bound <= 1e3 * (l.abs() + 1.0))
    }
}

/// A kernel pair (α, μ) with the Lévy integral cached on first use.
#[derive(Debug)]
pub struct AdmissiblePair {
    pub alpha: RadialProfile,
    pub mu: RadialProfile,
    levy: OnceLock<QuadResult>,
}

impl Clone for AdmissiblePair {
    fn clone(&self) -> Self {
        let levy = OnceLock::new();
        if let Some(v) = self.levy.get() {
            let _ = levy.set(*v);
        }
        Self {
            alpha: self.alpha.clone(),
            mu: self.mu.clone(),
            levy,
        }
    }
}

impl AdmissiblePair {
    /// Pairs two profiles of the same dimension. Admissibility itself is
    /// checked by [`check_admissible`].
    pub fn new(alpha: RadialProfile, mu: RadialProfile) -> Result<Self> {
        if alpha.dim != mu.dim {
            return Err(Error::DimensionMismatch(alpha.dim, mu.dim));
        }
        Ok(Self {
            alpha,
            mu,
            levy: OnceLock::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.alpha.dim
    }

    /// ∫ min{1,|h|²} α μ dh, computed once at tight tolerance.
    pub fn levy_value(&self) -> QuadResult {
        *self.levy.get_or_init(|| levy_integral(self, 1e-11))
    }

    /// α·μ as a single profile.
    pub fn product(&self) -> RadialProfile {
        self.alpha
            .product(&self.mu)
            .expect("pair profiles share a dimension")
    }
}

/// Which normalized family a [`KernelFamily`] produces.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    Localizing,
    Fractional,
    /// A fixed user pair, the same for every ε.
    Custom {
        alpha: Vec<PowerPiece>,
        mu: Vec<PowerPiece>,
    },
}

/// An ε-indexed family of pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFamily {
    pub kind: FamilyKind,
    pub dim: usize,
}

impl KernelFamily {
    /// The localizing constant d(d+2)/ℋ^{d−1}(𝕊^{d−1}).
    pub fn localizing_constant(d: usize) -> f64 {
        (d * (d + 2)) as f64 / sphere_area(d)
    }

    /// Prefactor 2dε(1−ε)/ℋ^{d−1}(𝕊^{d−1}) of the fractional μ.
    pub fn fractional_prefactor(d: usize, eps: f64) -> f64 {
        2.0 * d as f64 * eps * (1.0 - eps) / sphere_area(d)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Localizing => "localizing",
            FamilyKind::Fractional => "fractional",
            FamilyKind::Custom { .. } => "custom",
        }
    }

    /// The pair at scale ε ∈ (0, 1).
    pub fn pair_at(&self, eps: f64) -> Result<AdmissiblePair> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                reason: "must lie in (0, 1)",
            });
        }
        let d = self.dim;
        let df = d as f64;
        match &self.kind {
            FamilyKind::Localizing => AdmissiblePair::new(
                RadialProfile::indicator(d, eps, 1.0 / eps)?,
                RadialProfile::indicator(
                    d,
                    eps,
                    Self::localizing_constant(d) * eps.powf(-df - 1.0),
                )?,
            ),
            FamilyKind::Fractional => AdmissiblePair::new(
                RadialProfile::power(d, 1.0, -1.0 + eps)?,
                RadialProfile::power(d, Self::fractional_prefactor(d, eps), -df - (1.0 - eps))?,
            ),
            FamilyKind::Custom { alpha, mu } => AdmissiblePair::new(
                RadialProfile::new(d, alpha.clone())?,
                RadialProfile::new(d, mu.clone())?,
            ),
        }
    }

    /// Whether (L1)/(L2) are expected to hold for this family.
    pub fn is_normalized(&self) -> bool {
        !matches!(self.kind, FamilyKind::Custom { .. })
    }
}

pub fn make_localizing_family(d: usize) -> Result<KernelFamily> {
    check_dim(d)?;
    Ok(KernelFamily {
        kind: FamilyKind::Localizing,
        dim: d,
    })
}

pub fn make_fractional_family(d: usize) -> Result<KernelFamily> {
    check_dim(d)?;
    Ok(KernelFamily {
        kind: FamilyKind::Fractional,
        dim: d,
    })
}

pub fn make_custom_family(
    d: usize,
    alpha: Vec<PowerPiece>,
    mu: Vec<PowerPiece>,
) -> Result<KernelFamily> {
    check_dim(d)?;
    RadialProfile::new(d, alpha.clone())?;
    RadialProfile::new(d, mu.clone())?;
    Ok(KernelFamily {
        kind: FamilyKind::Custom { alpha, mu },
        dim: d,
    })
}

/// Finest level of the graded radial mesh; below it the power law is
/// integrated in closed form.
const LEVY_LEVELS: i32 = 40;

/// ∫_{ℝᵈ} min{1,|h|²} α(h) μ(h) dh by radial reduction.
///
/// Bands touching the origin are integrated on the dyadic mesh 2⁻ᵏ with the
/// analytic power-law antiderivative below 2⁻⁴⁰; unbounded bands use their
/// analytic tail. A value above [`OVERFLOW_GUARD`] (or a divergent closed
/// form) yields `+∞` with `converged = false`.
pub fn levy_integral(pair: &AdmissiblePair, tol: f64) -> QuadResult {
    let d = pair.dimension();
    let area = sphere_area(d);
    let prod = pair.product();
    let mut parts: Vec<QuadResult> = Vec::new();
    let diverged = || QuadResult {
        value: f64::INFINITY,
        error_estimate: f64::INFINITY,
        n_evals: 0,
        seed_used: None,
        converged: false,
    };
    for piece in prod.pieces() {
        // integrand in r: min(1, r²) · c r^p · r^{d−1}
        let p = piece.exponent + d as f64 - 1.0;
        let radial = |r: f64| area * piece.coeff * r.powf(p) * r.min(1.0).powi(2);
        let mut bands = vec![
            (piece.r_lo, piece.r_hi.min(1.0), 2.0),
            (piece.r_lo.max(1.0), piece.r_hi, 0.0),
        ];
        bands.retain(|(a, b, _)| b > a);
        for (lo, hi, extra) in bands {
            if hi.is_infinite() {
                let v = area * piece.coeff * power_integral(lo, hi, p + extra);
                if !v.is_finite() {
                    return diverged();
                }
                parts.push(QuadResult::exact(v));
                continue;
            }
            let mut a = hi;
            if lo == 0.0 {
                let floor = hi * 2f64.powi(-LEVY_LEVELS);
                let v = area * piece.coeff * power_integral(0.0, floor, p + extra);
                if !v.is_finite() {
                    return diverged();
                }
                parts.push(QuadResult::exact(v));
                for k in 0..LEVY_LEVELS {
                    let b = a;
                    a = hi * 2f64.powi(-(k + 1));
                    parts.push(integrate_adaptive(
                        radial,
                        a,
                        b,
                        tol / 64.0,
                        tol * 1e-3,
                        100_000,
                    ));
                }
            } else {
                parts.push(integrate_adaptive(
                    radial,
                    lo,
                    hi,
                    tol / 4.0,
                    tol * 1e-3,
                    200_000,
                ));
            }
            let running: f64 = parts.iter().map(|r| r.value).sum();
            if running > OVERFLOW_GUARD {
                return diverged();
            }
        }
    }
    let r = crate::quadrature::sum_results(&parts);
    if r.value > OVERFLOW_GUARD {
        return diverged();
    }
    r
}

/// ∫_{|h|>δ} α μ dh in closed form; `+∞` when divergent.
pub fn tail_mass(pair: &AdmissiblePair, delta: f64) -> f64 {
    pair.product().shell_integral(delta, f64::INFINITY, 0.0)
}

/// Outcome of [`check_admissible`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub levy_value: f64,
    pub levy_error: f64,
    pub finite: bool,
    /// μ vanishes wherever α does (sampled).
    pub absolutely_continuous: bool,
    pub alpha_singularity: f64,
    pub mu_singularity: f64,
    /// Exponent of the radial integrand min(1,r²)αμ r^{d−1} at the origin;
    /// integrable iff > −1.
    pub radial_exponent_at_zero: f64,
    pub pass: bool,
}

/// Checks finiteness of the Lévy integral and the structural
/// absolute-continuity condition on a log-spaced radial grid.
pub fn check_admissible(pair: &AdmissiblePair) -> AdmissibilityReport {
    let levy = pair.levy_value();
    let finite = levy.value.is_finite();
    let mut radii: Vec<f64> = (0..=200)
        .map(|k| 10f64.powf(-8.0 + 0.06 * k as f64))
        .collect();
    for p in pair.mu.pieces().iter().chain(pair.alpha.pieces()) {
        if p.r_hi.is_finite() {
            radii.push(0.5 * (p.r_lo + p.r_hi));
        }
    }
    let absolutely_continuous = radii
        .iter()
        .all(|&r| pair.mu.eval(r) == 0.0 || pair.alpha.eval(r) > 0.0);
    let d = pair.dimension() as f64;
    let radial_exponent_at_zero =
        -pair.alpha.singularity_exponent() - pair.mu.singularity_exponent() + d + 1.0;
    AdmissibilityReport {
        levy_value: levy.value,
        levy_error: levy.error_estimate,
        finite,
        absolutely_continuous,
        alpha_singularity: pair.alpha.singularity_exponent(),
        mu_singularity: pair.mu.singularity_exponent(),
        radial_exponent_at_zero,
        pass: finite && absolutely_continuous,
    }
}
