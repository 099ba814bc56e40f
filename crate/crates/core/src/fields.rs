//! Classical fields and antisymmetric nonlocal fields f(x, y).

use crate::error::{check_positive, Result};
use crate::gauss::GaussLegendre;
use crate::geometry::{make_ball, Domain, Shape};
use crate::kernels::RadialProfile;
use crate::point::Point;
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub type Matrix = [[f64; 3]; 3];

/// Relative level below which a Gaussian is treated as exactly zero; this
/// gives the built-in bumps a finite support radius.
const GAUSSIAN_CUTOFF: f64 = 1e-18;

fn gaussian_support(sigma: f64) -> f64 {
    sigma * (-2.0 * GAUSSIAN_CUTOFF.ln()).sqrt()
}

/// Scalar test functions φ: ℝᵈ → ℝ.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    /// a·x + b
    Linear {
        a: Point,
        b: f64,
    },
    /// |x|²/2
    HalfSquare,
    /// amp·exp(−|x − c|²/(2σ²)), truncated to zero below 10⁻¹⁸·amp.
    Gaussian {
        amp: f64,
        sigma: f64,
        center: Point,
    },
    Custom(Arc<dyn Fn(&Point) -> f64 + Send + Sync>),
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(c) => write!(f, "Constant({c})"),
            ScalarField::Linear { a, b } => write!(f, "Linear({a:?}, {b})"),
            ScalarField::HalfSquare => write!(f, "HalfSquare"),
            ScalarField::Gaussian { amp, sigma, center } => {
                write!(f, "Gaussian({amp}, {sigma}, {center:?})")
            }
            ScalarField::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl ScalarField {
    pub fn gaussian(amp: f64, sigma: f64, center: Point) -> Result<Self> {
        check_positive("sigma", sigma)?;
        Ok(ScalarField::Gaussian { amp, sigma, center })
    }

    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Linear { a, b } => a.dot(x) + b,
            ScalarField::HalfSquare => 0.5 * x.norm_sq(),
            ScalarField::Gaussian { amp, sigma, center } => {
                let r2 = (*x - *center).norm_sq();
                if r2 >= gaussian_support(*sigma).powi(2) {
                    0.0
                } else {
                    amp * (-0.5 * r2 / (sigma * sigma)).exp()
                }
            }
            ScalarField::Custom(f) => f(x),
        }
    }

    pub fn gradient(&self, x: &Point, dim: usize) -> Point {
        match self {
            ScalarField::Constant(_) => Point::ZERO,
            ScalarField::Linear { a, .. } => *a,
            ScalarField::HalfSquare => *x,
            ScalarField::Gaussian { sigma, center, .. } => {
                (*x - *center) * (-self.eval(x) / (sigma * sigma))
            }
            ScalarField::Custom(_) => {
                let mut g = Point::ZERO;
                for i in 0..dim {
                    let h = 1e-6 * (1.0 + x[i].abs());
                    let e = Point::unit(i) * h;
                    g[i] = (self.eval(&(*x + e)) - self.eval(&(*x - e))) / (2.0 * h);
                }
                g
            }
        }
    }

    /// Δφ (analytic for built-ins).
    pub fn laplacian(&self, x: &Point, dim: usize) -> f64 {
        match self {
            ScalarField::Constant(_) | ScalarField::Linear { .. } => 0.0,
            ScalarField::HalfSquare => dim as f64,
            ScalarField::Gaussian { sigma, center, .. } => {
                let s2 = sigma * sigma;
                self.eval(x) / s2 * ((*x - *center).norm_sq() / s2 - dim as f64)
            }
            ScalarField::Custom(_) => {
                let mut l = 0.0;
                for i in 0..dim {
                    let h = 1e-4 * (1.0 + x[i].abs());
                    let e = Point::unit(i) * h;
                    l += (self.eval(&(*x + e)) - 2.0 * self.eval(x) + self.eval(&(*x - e)))
                        / (h * h);
                }
                l
            }
        }
    }

    /// Ball outside which φ vanishes identically, if any.
    pub fn support(&self) -> Option<(Point, f64)> {
        match self {
            ScalarField::Constant(c) if *c == 0.0 => Some((Point::ZERO, 0.0)),
            ScalarField::Gaussian { sigma, center, .. } => {
                Some((*center, gaussian_support(*sigma)))
            }
            _ => None,
        }
    }

    /// Value approached far away, for fields that settle to a constant.
    pub fn value_at_infinity(&self) -> Option<f64> {
        match self {
            ScalarField::Constant(c) => Some(*c),
            ScalarField::Gaussian { .. } => Some(0.0),
            _ => None,
        }
    }

    pub fn sup_norm(&self) -> Option<f64> {
        match self {
            ScalarField::Constant(c) => Some(c.abs()),
            ScalarField::Gaussian { amp, .. } => Some(amp.abs()),
            _ => None,
        }
    }
}

/// Built-in classical vector fields.
#[derive(Clone)]
pub enum VectorKind {
    /// F(x) = x
    Identity,
    Constant(Point),
    /// F(x) = (−x₂, x₁), divergence free in the plane.
    Rotation,
    /// F = ∇φ for a Gaussian φ.
    GaussianGradient {
        amp: f64,
        sigma: f64,
        center: Point,
    },
    Custom(Arc<dyn Fn(&Point) -> Point + Send + Sync>),
}

impl fmt::Debug for VectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorKind::Identity => write!(f, "Identity"),
            VectorKind::Constant(c) => write!(f, "Constant({c:?})"),
            VectorKind::Rotation => write!(f, "Rotation"),
            VectorKind::GaussianGradient { amp, sigma, center } => {
                write!(f, "GaussianGradient({amp}, {sigma}, {center:?})")
            }
            VectorKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Multiplier χ(sd) with χ = 1 on {sd ≤ margin/2} and χ = 0 on {sd ≥ margin}.
#[derive(Debug, Clone)]
pub struct Cutoff {
    pub domain: Domain,
    pub margin: f64,
}

impl Cutoff {
    pub fn factor(&self, x: &Point) -> f64 {
        smoothstep_cutoff(self.domain.signed_distance(x), self.margin)
    }
}

/// 1 − (3t² − 2t³) with t = (sd − m/2)/(m/2) clamped to [0, 1].
pub fn smoothstep_cutoff(sd: f64, margin: f64) -> f64 {
    let t = ((sd - 0.5 * margin) / (0.5 * margin)).clamp(0.0, 1.0);
    1.0 - t * t * (3.0 - 2.0 * t)
}

/// A classical field F: ℝᵈ → ℝᵈ, optionally multiplied by a cutoff.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub dim: usize,
    pub kind: VectorKind,
    pub cutoff: Option<Cutoff>,
}

impl VectorField {
    pub fn new(dim: usize, kind: VectorKind) -> Self {
        Self {
            dim,
            kind,
            cutoff: None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            VectorKind::Identity => "identity",
            VectorKind::Constant(_) => "constant",
            VectorKind::Rotation => "rotation",
            VectorKind::GaussianGradient { .. } => "gaussian-gradient",
            VectorKind::Custom(_) => "custom",
        }
    }

    fn raw(&self, x: &Point) -> Point {
        match &self.kind {
            VectorKind::Identity => *x,
            VectorKind::Constant(c) => *c,
            VectorKind::Rotation => Point::new2(-x[1], x[0]),
            VectorKind::GaussianGradient { amp, sigma, center } => ScalarField::Gaussian {
                amp: *amp,
                sigma: *sigma,
                center: *center,
            }
            .gradient(x, self.dim),
            VectorKind::Custom(f) => f(x),
        }
    }

    fn raw_jacobian(&self, x: &Point) -> Option<Matrix> {
        let mut j = [[0.0; 3]; 3];
        match &self.kind {
            VectorKind::Identity => {
                for (i, row) in j.iter_mut().enumerate().take(self.dim) {
                    row[i] = 1.0;
                }
            }
            VectorKind::Constant(_) => {}
            VectorKind::Rotation => {
                j[0][1] = -1.0;
                j[1][0] = 1.0;
            }
            VectorKind::GaussianGradient { amp, sigma, center } => {
                let phi = ScalarField::Gaussian {
                    amp: *amp,
                    sigma: *sigma,
                    center: *center,
                }
                .eval(x);
                let s2 = sigma * sigma;
                let p = *x - *center;
                for (r, row) in j.iter_mut().enumerate().take(self.dim) {
                    for (c, v) in row.iter_mut().enumerate().take(self.dim) {
                        let delta = if r == c { 1.0 } else { 0.0 };
                        *v = -phi / s2 * (delta - p[r] * p[c] / s2);
                    }
                }
            }
            VectorKind::Custom(_) => return None,
        }
        Some(j)
    }

    pub fn eval(&self, x: &Point) -> Point {
        let v = self.raw(x);
        match &self.cutoff {
            None => v,
            Some(c) => v * c.factor(x),
        }
    }

    /// ∂F_i/∂x_j; analytic where the cutoff is flat, central differences
    /// otherwise.
    pub fn jacobian(&self, x: &Point) -> Matrix {
        let flat = self.cutoff.as_ref().is_none_or(|c| {
            c.domain.signed_distance(x) < 0.5 * c.margin - 1e-6
        });
        if flat {
            if let Some(j) = self.raw_jacobian(x) {
                return j;
            }
        }
        let mut j = [[0.0; 3]; 3];
        for c in 0..self.dim {
            let h = 1e-6 * (1.0 + x[c].abs());
            let e = Point::unit(c) * h;
            let d = (self.eval(&(*x + e)) - self.eval(&(*x - e))) / (2.0 * h);
            for (r, row) in j.iter_mut().enumerate().take(self.dim) {
                row[c] = d[r];
            }
        }
        j
    }

    pub fn divergence(&self, x: &Point) -> f64 {
        let j = self.jacobian(x);
        (0..self.dim).map(|i| j[i][i]).sum()
    }

    /// Ball outside which F vanishes, if any.
    pub fn support(&self) -> Option<(Point, f64)> {
        if let Some(c) = &self.cutoff {
            return Some((c.domain.center(), c.domain.extent() + c.margin));
        }
        match &self.kind {
            VectorKind::Constant(c) if c.norm() == 0.0 => Some((Point::ZERO, 0.0)),
            VectorKind::GaussianGradient { sigma, center, .. } => {
                Some((*center, gaussian_support(*sigma)))
            }
            _ => None,
        }
    }

    /// Radii along the segment x + t(y − x), t ∈ (0, 1), where the field's
    /// smoothness changes (cutoff plateau edges).
    fn segment_breaks(&self, x: &Point, y: &Point) -> Vec<f64> {
        let Some(c) = &self.cutoff else {
            return Vec::new();
        };
        let Shape::Ball { radius } = c.domain.shape() else {
            return Vec::new();
        };
        let h = *y - *x;
        let len = h.norm();
        if len == 0.0 {
            return Vec::new();
        }
        let u = h / len;
        let mut out = Vec::new();
        for rr in [radius + 0.5 * c.margin, radius + c.margin] {
            let p = *x - c.domain.center();
            let b = p.dot(&u);
            let disc = b * b - (p.norm_sq() - rr * rr);
            if disc > 0.0 {
                for t in [-b - disc.sqrt(), -b + disc.sqrt()] {
                    if t > 0.0 && t < len {
                        out.push(t / len);
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// F multiplied by the C¹ cutoff χ(sd) of `domain`; equals F on Ω̄.
pub fn extend_compactly(field: VectorField, domain: &Domain, margin: f64) -> Result<VectorField> {
    check_positive("margin", margin)?;
    Ok(VectorField {
        cutoff: Some(Cutoff {
            domain: domain.clone(),
            margin,
        }),
        ..field
    })
}

/// How f(x, x + r u) behaves for large r, used to close principal-value
/// integrals analytically beyond a finite radius.
#[derive(Debug, Clone, PartialEq)]
pub enum FarField {
    /// For r ≥ `radius`: f(x, x + r u) = w(r)/w(radius) · f(x, x + radius·u),
    /// with w ≡ 1 when `weight` is `None`.
    Scaling {
        radius: f64,
        weight: Option<RadialProfile>,
    },
    /// |f| ≤ `sup` everywhere; only a tail bound is available.
    Bounded {
        sup: f64,
    },
    Unknown,
}

/// Smoothness of the integrand inside a [`NonlocalField`], used to pick
/// quadrature refinements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Smooth,
    /// Piecewise constant, with jumps across level sets.
    Jumps,
}

/// Evaluation of 1_{E_ε} or 1_{Eᶜ_ε} mollified at scale ε, see
/// [`crate::fractional::mollified_maximizer`].
pub trait Mollified: Send + Sync + fmt::Debug {
    /// (φ_ε ∗ 1_{E_ε})(x).
    fn inner(&self, x: &Point) -> f64;
    /// (φ_ε ∗ 1_{Eᶜ_ε})(x).
    fn outer(&self, x: &Point) -> f64;
    fn domain(&self) -> &Domain;
    fn scale(&self) -> f64;
    /// Both profiles depend only on the distance to the domain centre.
    fn is_radial(&self) -> bool {
        false
    }
}

#[derive(Clone)]
pub enum FieldKind {
    /// α(|y−x|) ∫₀¹ F(x + t(y−x))·(y−x) dt
    Generated {
        field: VectorField,
        alpha: RadialProfile,
        rule: Arc<GaussLegendre>,
        panel: f64,
    },
    /// α(|y−x|)(φ(y) − φ(x))
    Gradient {
        phi: ScalarField,
        alpha: RadialProfile,
    },
    /// φ(x) − φ(y)
    Difference {
        phi: ScalarField,
    },
    /// sign(δ_y − δ_x) with δ the signed distance
    Normal {
        domain: Domain,
    },
    /// |∇⁽ˢ⁾u|^{p−2} ∇⁽ˢ⁾u with ∇⁽ˢ⁾u = (u(y) − u(x))/|y − x|^s
    PowerGradient {
        u: ScalarField,
        s: f64,
        p: f64,
    },
    /// A(x)B(y) − A(y)B(x) from mollified indicators
    Mollified(Arc<dyn Mollified>),
    Combination(Vec<(f64, NonlocalField)>),
    Custom {
        f: Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>,
        far: FarField,
    },
}

impl fmt::Debug for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Generated { field, rule, .. } => {
                write!(f, "Generated({field:?}, order {})", rule.nodes.len())
            }
            FieldKind::Gradient { phi, .. } => write!(f, "Gradient({phi:?})"),
            FieldKind::Difference { phi } => write!(f, "Difference({phi:?})"),
            FieldKind::Normal { domain } => write!(f, "Normal({})", domain.name()),
            FieldKind::PowerGradient { u, s, p } => write!(f, "PowerGradient({u:?}, s={s}, p={p})"),
            FieldKind::Mollified(m) => write!(f, "Mollified({m:?})"),
            FieldKind::Combination(v) => write!(f, "Combination({} terms)", v.len()),
            FieldKind::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// Distance from ∂E below which a point counts as a boundary point.
pub const LEVEL_SNAP: f64 = 1e-9;

/// An antisymmetric function f: ℝᵈ × ℝᵈ → ℝ.
///
/// Only the lexicographically ordered pair is ever evaluated; the other order
/// is its exact negation and the diagonal is zero.
#[derive(Debug, Clone)]
pub struct NonlocalField {
    pub dim: usize,
    pub kind: FieldKind,
}

/// Default Gauss–Legendre order of the line integral in generated fields.
pub const DEFAULT_LINE_ORDER: usize = 8;

/// Longest segment handled by one Gauss–Legendre panel in generated fields.
pub const DEFAULT_LINE_PANEL: f64 = 1.0;

impl NonlocalField {
    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        if x == y {
            return 0.0;
        }
        match x.lex_cmp(y) {
            Ordering::Greater => -self.raw(y, x),
            _ => self.raw(x, y),
        }
    }

    fn raw(&self, x: &Point, y: &Point) -> f64 {
        match &self.kind {
            FieldKind::Generated {
                field,
                alpha,
                rule,
                panel,
            } => {
                let h = *y - *x;
                let r = h.norm();
                let a = alpha.eval(r);
                if a == 0.0 {
                    return 0.0;
                }
                a * line_integral(field, rule, *panel, x, y)
            }
            FieldKind::Gradient { phi, alpha } => {
                alpha.eval((*y - *x).norm()) * (phi.eval(y) - phi.eval(x))
            }
            FieldKind::Difference { phi } => phi.eval(x) - phi.eval(y),
            FieldKind::Normal { domain } => {
                let dx = domain.signed_distance(x);
                let dy = domain.signed_distance(y);
                match dy.partial_cmp(&dx) {
                    Some(Ordering::Greater) => 1.0,
                    Some(Ordering::Less) => -1.0,
                    _ => 0.0,
                }
            }
            FieldKind::PowerGradient { u, s, p } => {
                let g = (u.eval(y) - u.eval(x)) / (*y - *x).norm().powf(*s);
                g.abs().powf(p - 2.0) * g
            }
            FieldKind::Mollified(m) => m.inner(x) * m.outer(y) - m.inner(y) * m.outer(x),
            FieldKind::Combination(terms) => terms.iter().map(|(c, f)| c * f.eval(x, y)).sum(),
            FieldKind::Custom { f, .. } => f(x, y),
        }
    }

    pub fn regularity(&self) -> Regularity {
        match &self.kind {
            FieldKind::Normal { .. } => Regularity::Jumps,
            FieldKind::Combination(t)
                if t.iter().any(|(_, f)| f.regularity() == Regularity::Jumps) =>
            {
                Regularity::Jumps
            }
            FieldKind::Custom { .. } => Regularity::Jumps,
            _ => Regularity::Smooth,
        }
    }

    /// A set L with x ∈ ∂L such that, along every ray from x, y ↦ f(x, y)
    /// is constant between crossings of ∂L. Known for the normal field at
    /// boundary points (L = E) and around balls (L a concentric ball).
    pub fn ray_level_set(&self, x: &Point) -> Option<Domain> {
        let FieldKind::Normal { domain } = &self.kind else {
            return None;
        };
        let sd = domain.signed_distance(x);
        if sd.abs() < LEVEL_SNAP {
            return Some(domain.clone());
        }
        match domain.shape() {
            Shape::Ball { radius } if radius + sd > 0.0 => {
                make_ball(self.dim, domain.center(), radius + sd).ok()
            }
            _ => None,
        }
    }

    /// Far-field behaviour of y ↦ f(x, y) around the base point `x`.
    pub fn far_field(&self, x: &Point) -> FarField {
        const PAD: f64 = 1e-9;
        match &self.kind {
            FieldKind::Gradient {
                phi: ScalarField::Constant(_),
                ..
            }
            | FieldKind::Difference {
                phi: ScalarField::Constant(_),
            }
            | FieldKind::PowerGradient {
                u: ScalarField::Constant(_),
                ..
            } => FarField::Bounded { sup: 0.0 },
            FieldKind::Generated { field, alpha, .. } => match field.support() {
                Some((c, r)) => FarField::Scaling {
                    radius: (*x - c).norm() + r + PAD,
                    weight: Some(alpha.clone()),
                },
                None => FarField::Unknown,
            },
            FieldKind::Gradient { phi, alpha } => match phi.support() {
                Some((c, r)) => FarField::Scaling {
                    radius: (*x - c).norm() + r + PAD,
                    weight: Some(alpha.clone()),
                },
                None => FarField::Unknown,
            },
            FieldKind::Difference { phi } => match phi.support() {
                Some((c, r)) => FarField::Scaling {
                    radius: (*x - c).norm() + r + PAD,
                    weight: None,
                },
                None => FarField::Unknown,
            },
            FieldKind::Normal { domain } => {
                if !domain.is_bounded() {
                    return FarField::Bounded { sup: 1.0 };
                }
                FarField::Scaling {
                    radius: (*x - domain.center()).norm()
                        + domain.extent()
                        + domain.signed_distance(x).abs()
                        + PAD,
                    weight: None,
                }
            }
            FieldKind::PowerGradient { u, s, p } => match u.support() {
                Some((c, r)) => FarField::Scaling {
                    radius: (*x - c).norm() + r + PAD,
                    weight: Some(
                        RadialProfile::power(self.dim, 1.0, -s * (p - 1.0))
                            .expect("dimension already validated"),
                    ),
                },
                None => FarField::Unknown,
            },
            FieldKind::Mollified(m) => {
                let dom = m.domain();
                FarField::Scaling {
                    radius: (*x - dom.center()).norm() + dom.extent() + 2.0 * m.scale() + PAD,
                    weight: None,
                }
            }
            FieldKind::Combination(terms) => {
                // exact only when every term scales the same way
                let fars: Vec<FarField> = terms.iter().map(|(_, f)| f.far_field(x)).collect();
                let mut radius = 0.0f64;
                let mut weight: Option<Option<RadialProfile>> = None;
                for ff in &fars {
                    match ff {
                        FarField::Scaling {
                            radius: r,
                            weight: w,
                        } => {
                            radius = radius.max(*r);
                            match &weight {
                                None => weight = Some(w.clone()),
                                Some(prev) if prev == w => {}
                                Some(_) => return bounded_combination(terms, &fars),
                            }
                        }
                        _ => return bounded_combination(terms, &fars),
                    }
                }
                FarField::Scaling {
                    radius,
                    weight: weight.unwrap_or(None),
                }
            }
            FieldKind::Custom { far, .. } => far.clone(),
        }
    }
}

impl NonlocalField {
    /// sup |f(x, ·)| when it is known in closed form.
    pub fn sup_bound(&self, x: &Point) -> Option<f64> {
        match &self.kind {
            FieldKind::Normal { .. } | FieldKind::Mollified(_) => Some(1.0),
            FieldKind::Difference { phi } => phi.sup_norm().map(|m| m + phi.eval(x).abs()),
            FieldKind::Combination(terms) => terms
                .iter()
                .map(|(c, f)| f.sup_bound(x).map(|b| c.abs() * b))
                .sum(),
            FieldKind::Custom {
                far: FarField::Bounded { sup },
                ..
            } => Some(*sup),
            _ => None,
        }
    }
}

/// Outcome of the integrability test for pv ∫ f(x, x+h) μ(h) dh.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrability {
    /// ∫_{B₁} |f(x,x+h) + f(x,x−h)| μ(h) dh
    pub near: f64,
    /// ∫_{B₁ᶜ} |f(x,x+h)| μ(h) dh
    pub far: f64,
    pub pass: bool,
}

/// Checks that the symmetrised near-field and the absolute far-field
/// integrals are finite; either being infinite means the principal value
/// need not exist.
pub fn check_pv_integrability(f: &NonlocalField, mu: &RadialProfile, x: &Point) -> Integrability {
    let spec = crate::quadrature::QuadSpec::default().with_tol(1e-8, 1e-6);
    let (m1, m2) = crate::quadrature::pv::pv_moments(x, f, mu, &spec);
    Integrability {
        near: m1.value,
        far: m2.value,
        pass: m1.value.is_finite() && m2.value.is_finite(),
    }
}

fn bounded_combination(terms: &[(f64, NonlocalField)], fars: &[FarField]) -> FarField {
    let mut sup = 0.0;
    for ((c, _), ff) in terms.iter().zip(fars) {
        match ff {
            FarField::Bounded { sup: s } => sup += c.abs() * s,
            _ => return FarField::Unknown,
        }
    }
    FarField::Bounded { sup }
}

/// ∫₀¹ F(x + t(y − x))·(y − x) dt by composite Gauss–Legendre.
fn line_integral(
    field: &VectorField,
    rule: &GaussLegendre,
    panel: f64,
    x: &Point,
    y: &Point,
) -> f64 {
    let h = *y - *x;
    let len = h.norm();
    let mut cuts = vec![0.0];
    cuts.extend(field.segment_breaks(x, y));
    cuts.push(1.0);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let span = (w[1] - w[0]) * len;
        let pieces = ((span / panel).ceil() as usize).max(1);
        let dt = (w[1] - w[0]) / pieces as f64;
        for k in 0..pieces {
            let a = w[0] + dt * k as f64;
            total += rule.integrate(a, a + dt, |t| field.eval(&(*x + h * t)).dot(&h));
        }
    }
    total
}

/// f_α(x, y) = α(|y−x|) ∫₀¹ F(x + t(y−x))·(y−x) dt with a Gauss–Legendre
/// rule of the given order (at least 2).
pub fn generate_nonlocal_field(
    field: VectorField,
    alpha: RadialProfile,
    order: usize,
) -> Result<NonlocalField> {
    if order < 2 {
        return Err(crate::Error::InvalidParameter {
            name: "order",
            value: order as f64,
            reason: "line quadrature order must be at least 2",
        });
    }
    if field.dim != alpha.dimension() {
        return Err(crate::Error::DimensionMismatch(
            field.dim,
            alpha.dimension(),
        ));
    }
    Ok(NonlocalField {
        dim: field.dim,
        kind: FieldKind::Generated {
            field,
            alpha,
            rule: Arc::new(GaussLegendre::new(order)),
            panel: DEFAULT_LINE_PANEL,
        },
    })
}

/// 𝒢_α φ(x, y) = α(|y−x|)(φ(y) − φ(x)).
pub fn gradient_field(phi: ScalarField, alpha: RadialProfile) -> NonlocalField {
    NonlocalField {
        dim: alpha.dimension(),
        kind: FieldKind::Gradient { phi, alpha },
    }
}

/// f(x, y) = φ(x) − φ(y).
pub fn difference_field(dim: usize, phi: ScalarField) -> NonlocalField {
    NonlocalField {
        dim,
        kind: FieldKind::Difference { phi },
    }
}

/// n(x, y) = sign(δ_y − δ_x).
pub fn normal_field(domain: &Domain) -> NonlocalField {
    NonlocalField {
        dim: domain.dimension(),
        kind: FieldKind::Normal {
            domain: domain.clone(),
        },
    }
}

/// Σ cᵢ fᵢ.
pub fn combination(dim: usize, terms: Vec<(f64, NonlocalField)>) -> NonlocalField {
    NonlocalField {
        dim,
        kind: FieldKind::Combination(terms),
    }
}

/// A user-supplied antisymmetric field; only f(x, y) for x ≤ y (lexicographic)
/// is ever queried.
pub fn custom_field(
    dim: usize,
    f: Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>,
    far: FarField,
) -> NonlocalField {
    NonlocalField {
        dim,
        kind: FieldKind::Custom { f, far },
    }
}
