//! Numerical laboratory for the nonlocal operator with vanishing horizon
//!
//! The operator acts on functions over a domain `Ω` and is driven by the kernel
//! `K(x,y) = B(x,y) |x-y|^{-d-2s}`, where the weight `B` averages two ball
//! indicators whose radii shrink with the distance to the boundary
//! (`sigma * d(x)` and `sigma * d(y)`). The crate provides
//!
//! * exact kernel geometry (distances, the indicator weight, the half-space
//!   support shapes) and SVG rendering of the supports ([`geometry`]),
//! * the half-space constant `a(p, sigma)` with `L u = a(p,sigma) x_d^{p-2s}`
//!   for monomial profiles `u = x_d^p`, via a reduced one-dimensional integral
//!   and an independent principal-value oracle ([`halfspace`]),
//! * pointwise principal-value evaluation of the operator for smooth profiles
//!   in dimensions one and two ([`pv`]),
//! * a piecewise-linear Galerkin solver for the homogeneous Dirichlet problem
//!   on the unit interval with boundary-graded meshes ([`fem`]),
//! * post-processing: boundary exponent fits, oscillation decay of
//!   `u / d^{2s-1}`, energy comparability, and suite orchestration
//!   ([`experiments`], [`config`]).
//!
//! Everything is deterministic: fixed quadrature layouts, a fully specified
//! random generator ([`rng`]), and canonical float formatting in all artifacts
//! ([`report`]).

pub mod config;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod geometry;
pub mod halfspace;
pub mod pv;
pub mod quad;
pub mod report;
pub mod rng;

pub use error::Error;
pub use geometry::{DomainSpec, KernelParams, Point};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
