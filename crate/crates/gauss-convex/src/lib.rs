//! Numerical toolkit for the *convex influence* of directions on symmetric
//! convex sets in Gaussian space.
//!
//! A symmetric convex set `K ⊆ ℝⁿ` is identified with its 0/1 indicator. The
//! influence of a unit direction `v` on `K` under `N(0,σ²)ⁿ` is the negated
//! degree-2 Hermite coefficient of `K` along `v`,
//!
//! ```text
//! Inf_v[K] = E[ K(x) · (1 − (v·x/σ)²) / √2 ]
//! ```
//!
//! and the total influence is the basis-free sum `E[K(x)(n − ‖x/σ‖²)/√2]`.
//! Everything in this crate is built around estimating these quantities with
//! honest standard errors and then checking the identities and inequalities
//! they satisfy (Margulis-Russo, Poincaré, a KKL-type bound, sharp-threshold
//! behaviour, shell-density increments, and an averaging/junta procedure).
//!
//! Module map:
//!
//! * [`sampling`] — seeded counter-based random streams, Monte Carlo
//!   estimators with standard errors, sphere/chi samplers, and 1-D adaptive
//!   quadrature.
//! * [`hermite`] — orthonormal (σ-biased) Hermite polynomials and Hermite
//!   coefficients of indicator functions.
//! * [`bodies`] — symmetric convex bodies as membership oracles with
//!   analytic metadata (volume, in-radius, fibers) where known.
//! * [`influence`] — directional/total influences, the second-moment matrix
//!   and its extremal directions, shell densities, and comparison notions.
//! * [`verify`] — executable checks of the identities and inequalities, the
//!   threshold-curve and averaging experiments, and the built-in suite.

pub mod bodies;
pub mod constants;
mod error;
pub mod hermite;
pub mod influence;
pub mod linalg;
pub mod sampling;
pub mod special;
pub mod verify;

pub use bodies::ConvexBody;
pub use error::Error;
pub use sampling::{Estimate, SamplingPlan};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
