//! Analysis of singularly perturbed slow–fast ODE systems
//!
//! `dx/dt = f0(x, y, ε)`, `ε dy/dt = g0(x, y, ε)`, with a critical manifold
//! `y = m0(x)` and monotone reduced dynamics. Everything numerical is
//! generic over [`Real`]; the `f64` aliases below cover the usual case.

// `!(x > 0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod domain;
pub mod error;
pub mod experiments;
pub mod field;
pub mod integrate;
pub mod linalg;
pub mod manifold;
pub mod models;
pub mod monotone;
pub mod real;
pub mod system;

pub use error::{Error, Result};
pub use field::{FnField, VectorField};
pub use integrate::{integrate, IntegratorConfig, Method, Output, Status};
pub use monotone::OrthantCone;
pub use real::Real;

pub type Matrix = linalg::Matrix<f64>;
pub type State = system::State<f64>;
pub type SlowFastSystem = system::SlowFastSystem<f64>;
pub type Polytope = domain::Polytope<f64>;
pub type EpsPolytope = domain::EpsPolytope<f64>;
pub type Trajectory = integrate::Trajectory<f64>;
pub type Equilibrium = analysis::Equilibrium<f64>;
pub type Model = models::Model<f64>;
pub type FutileCycleParams = models::FutileCycleParams<f64>;
pub type CounterexampleParams = models::CounterexampleParams<f64>;
