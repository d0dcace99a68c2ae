//! Dense random graphs driven by multi-type Moran and Wright-Fisher
//! population dynamics, their graphon limits, and the numerical checks that
//! go with them.
//!
//! The exact evaluators (distribution functions, step graphons, block sums,
//! urn probabilities) are generic over [`Scalar`], so the same code runs in
//! `f64`, `f32` or exact rational arithmetic. Simulation is `f64` throughout.

pub mod density;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod graphon;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Exact = num_rational::BigRational;

pub type StepGraphonF64 = graphon::StepGraphon<f64>;
pub type StepGraphonF32 = graphon::StepGraphon<f32>;
pub type StepGraphonExact = graphon::StepGraphon<Exact>;

pub type TypeMeasureF64 = graphon::TypeMeasure<f64>;
pub type TypeMeasureExact = graphon::TypeMeasure<Exact>;
