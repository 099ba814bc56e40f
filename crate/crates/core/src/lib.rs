//! Nonlocal vector calculus: nonlocal divergence and normal operators,
//! nonlocal gradients, normalized kernel families and fractional operators,
//! together with the quadrature needed to evaluate them.

pub mod error;
pub mod experiments;
pub mod fields;
pub mod fractional;
pub mod gauss;
pub mod geometry;
pub mod kernels;
pub mod operators;
pub mod point;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod sum;

pub use error::{Error, Result};
pub use point::Point;
pub use quadrature::{Method, QuadResult, QuadSpec};
