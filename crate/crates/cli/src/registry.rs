//! Built-in experiments, shapes, kernel families and vector fields.

use crate::config::{DomainSpec, DEFAULT_EPS, DEFAULT_S};
use nonlocal::fields::{VectorField, VectorKind};
use nonlocal::geometry::{make_ball, make_box, make_ellipse, make_half_space, make_lshape, Domain};
use nonlocal::kernels::{make_fractional_family, make_localizing_family, KernelFamily};
use nonlocal::Point;

/// A closed set of names.
pub trait Named: Sized + Copy + 'static {
    const KIND: &'static str;
    const ALL: &'static [Self];
    fn name(self) -> &'static str;

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|v| v.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    CheckKernel,
    NtCheck,
    ConvergeDc,
    ConvergeNc,
    ApproxIdentity,
    FracSuite,
    Perimeter,
    Curvature,
}

impl Named for Experiment {
    const KIND: &'static str = "experiment";
    const ALL: &'static [Self] = &[
        Self::CheckKernel,
        Self::NtCheck,
        Self::ConvergeDc,
        Self::ConvergeNc,
        Self::ApproxIdentity,
        Self::FracSuite,
        Self::Perimeter,
        Self::Curvature,
    ];

    fn name(self) -> &'static str {
        match self {
            Self::CheckKernel => "check-kernel",
            Self::NtCheck => "nt-check",
            Self::ConvergeDc => "converge-dc",
            Self::ConvergeNc => "converge-nc",
            Self::ApproxIdentity => "approx-identity",
            Self::FracSuite => "frac-suite",
            Self::Perimeter => "perimeter",
            Self::Curvature => "curvature",
        }
    }
}

impl Experiment {
    pub fn default_eps(self) -> Vec<f64> {
        match self {
            Self::CheckKernel => vec![0.5, 0.25, 0.1, 0.05],
            Self::ApproxIdentity => vec![0.5, 0.1],
            Self::NtCheck => vec![0.4, 0.2, 0.1],
            _ => DEFAULT_EPS.to_vec(),
        }
    }

    pub fn default_s(self) -> Vec<f64> {
        match self {
            Self::Curvature => vec![0.3, 0.7],
            _ => DEFAULT_S.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeName {
    Ball,
    Box,
    Ellipse,
    LShape,
    HalfSpace,
}

impl Named for ShapeName {
    const KIND: &'static str = "shape";
    const ALL: &'static [Self] = &[
        Self::Ball,
        Self::Box,
        Self::Ellipse,
        Self::LShape,
        Self::HalfSpace,
    ];

    fn name(self) -> &'static str {
        match self {
            Self::Ball => "ball",
            Self::Box => "box",
            Self::Ellipse => "ellipse",
            Self::LShape => "lshape",
            Self::HalfSpace => "half-space",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    Localizing,
    Fractional,
}

impl Named for FamilyName {
    const KIND: &'static str = "family";
    const ALL: &'static [Self] = &[Self::Localizing, Self::Fractional];

    fn name(self) -> &'static str {
        match self {
            Self::Localizing => "localizing",
            Self::Fractional => "fractional",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldName {
    Identity,
    Rotation,
    Constant,
    GaussianGradient,
}

impl Named for FieldName {
    const KIND: &'static str = "field";
    const ALL: &'static [Self] = &[
        Self::Identity,
        Self::Rotation,
        Self::Constant,
        Self::GaussianGradient,
    ];

    fn name(self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Rotation => "rotation",
            Self::Constant => "constant",
            Self::GaussianGradient => "gaussian-gradient",
        }
    }
}

/// Help text listing every registry.
pub fn registry_help() -> String {
    fn line<T: Named>() -> String {
        let names: Vec<&str> = T::ALL.iter().map(|v| v.name()).collect();
        format!("  {:<12}{}\n", T::KIND, names.join(", "))
    }
    format!(
        "Registry:\n{}{}{}{}",
        line::<Experiment>(),
        line::<ShapeName>(),
        line::<FamilyName>(),
        line::<FieldName>()
    )
}

fn center(spec: &DomainSpec) -> Point {
    spec.center
        .as_deref()
        .map(Point::from_slice)
        .unwrap_or(Point::ZERO)
}

/// Builds the configured domain. Boxes default to half-width 1 in every
/// direction, ellipses to semi-axes (1, 0.5).
pub fn build_domain(shape: ShapeName, spec: &DomainSpec) -> nonlocal::Result<Domain> {
    let d = spec.d.unwrap_or(2);
    let dom = match shape {
        ShapeName::Ball => make_ball(d, center(spec), spec.radius.unwrap_or(1.0))?,
        ShapeName::Box => {
            let hw = spec.half_widths.clone().unwrap_or_else(|| vec![1.0; d]);
            make_box(d, &hw)?.translated(center(spec))
        }
        ShapeName::Ellipse => {
            make_ellipse(spec.a.unwrap_or(1.0), spec.b.unwrap_or(0.5))?.translated(center(spec))
        }
        ShapeName::LShape => make_lshape().translated(center(spec)),
        ShapeName::HalfSpace => make_half_space(d)?,
    };
    Ok(dom)
}

pub fn build_family(name: FamilyName, d: usize) -> nonlocal::Result<KernelFamily> {
    match name {
        FamilyName::Localizing => make_localizing_family(d),
        FamilyName::Fractional => make_fractional_family(d),
    }
}

/// The constant field is e₁; the Gaussian gradient is ∇ of exp(−|x|²/(2·0.5²)).
pub fn build_field(name: FieldName, d: usize) -> VectorField {
    let kind = match name {
        FieldName::Identity => VectorKind::Identity,
        FieldName::Rotation => VectorKind::Rotation,
        FieldName::Constant => VectorKind::Constant(Point::unit(0)),
        FieldName::GaussianGradient => VectorKind::GaussianGradient {
            amp: 1.0,
            sigma: 0.5,
            center: Point::ZERO,
        },
    };
    VectorField::new(d, kind)
}
