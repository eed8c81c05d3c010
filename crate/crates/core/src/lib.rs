//! Truncated time-power-series solutions of autonomous polynomial ODE
//! systems `x' = f(x)`, together with the tools needed to see where such
//! local series stop being useful: closed-form solutions, an adaptive
//! Runge-Kutta integrator, singularity and convergence-radius estimates, and
//! fixed-point classification in the phase plane.

pub mod error;
pub mod exact;
pub mod integrator;
pub mod model;
pub mod modelfile;
pub mod phase;
pub mod report;
pub mod series;

pub use error::{Error, Result};
pub use model::{InitialValueProblem, ModelPreset, Monomial, PolyVectorField, Polynomial};
pub use series::{HpmExpansion, RadiusEstimate, RadiusMethod, TaylorSolution, TruncatedSeries};
