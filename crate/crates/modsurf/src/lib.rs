//! Numerical laboratory for geodesic statistics on the modular surface.
//!
//! The crate bundles the exact geometry of the upper half-plane, reduction
//! theory for the modular group and for indefinite binary quadratic forms,
//! the special functions controlling annulus variance asymptotics, chord
//! geometry for geodesic/annulus intersections, and seeded Monte Carlo
//! estimators for the variance of intersection lengths.
//!
//! Modules:
//!
//! - [`hyperbolic`] — points, tangents, isometries, geodesic flow in ℍ.
//! - [`surface`]    — the quotient PSL₂(ℤ)\ℍ: fundamental-domain reduction,
//!   lattice translate enumeration, automorphic kernel counts.
//! - [`forms`]      — indefinite binary quadratic forms, reduction cycles,
//!   narrow class numbers, fundamental units, Dirichlet L(1,χ).
//! - [`special`]    — elliptic integrals, the G function, Bessel J₀/J₁,
//!   conical Legendre functions, the Selberg–Harish-Chandra transform.
//! - [`intersect`]  — chord lengths of geodesics against annuli, segment
//!   walkers, and the main-term integral with its closed form.
//! - [`mc`]         — seeded, worker-count-independent Monte Carlo
//!   estimators for segment and closed-geodesic variance.
//! - [`calib`]      — frozen empirical constants for the bound suites.
//!
//! All radii and distances are hyperbolic throughout.

pub mod calib;
pub mod forms;
pub mod hyperbolic;
pub mod intersect;
pub mod mc;
mod quad;
pub mod special;
pub mod surface;

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geodesic: endpoints coincide ({0})")]
    DegenerateGeodesic(f64),
    #[error("fundamental-domain reduction did not terminate for point ({x}, {y})")]
    ReductionStuck { x: f64, y: f64 },
    #[error("translate enumeration exceeded the hit cap of {cap}")]
    HitCap { cap: usize },
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Hyperbolic area of the standard fundamental domain, μ(F) = π/3.
pub const FUNDAMENTAL_DOMAIN_AREA: f64 = std::f64::consts::PI / 3.0;
