//! Numerical convex geometry for the Lp Brunn-Minkowski toolbox.
//!
//! The crate evaluates the integral functionals of the Lp theory of convex
//! bodies (mixed volumes, dual mixed volumes, p-mixed volumes, mixed
//! p-affine surface areas, curvature images) and estimates the variationally
//! defined mixed geominimal surface areas with rigorous one-sided bound
//! semantics (a restricted-family infimum is an upper bound, a supremum a
//! lower bound). A verification harness turns the known inequalities between
//! these quantities into fuzzable, machine-checkable rules.
//!
//! The numeric kernels are generic over the scalar (see [`scalar::Real`]);
//! the aliases below fix `f64`, which is what the harness and CLI use.

pub mod bodies;
pub mod error;
pub mod functionals;
pub mod geominimal;
pub mod harness;
pub mod linalg;
pub mod scalar;
pub mod schema;
pub mod sphere;
pub mod trig;

pub use error::{GeoError, Result};

/// `f64` concrete aliases for the common types.
pub type SphereGrid = sphere::SphereGrid<f64>;
pub type StarBody = bodies::StarBody<f64>;
pub type ConvexSupportBody = bodies::ConvexSupportBody<f64>;
pub type SmoothBody = bodies::SmoothBody<f64>;
pub type LinearMap = bodies::LinearMap<f64>;
pub type FunctionalValue = functionals::FunctionalValue<f64>;
pub type PExponent = functionals::PExponent<f64>;
pub type GeoEstimate = geominimal::GeoEstimate<f64>;



