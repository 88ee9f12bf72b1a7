//! Numerical laboratory for scalar variational problems with (p,q)-growth in
//! the plane.
//!
//! The crate provides four building blocks:
//!
//! * [`integrand`] — convex energy densities of the form
//!   `nu·(mu² + |z|²)^{p/2} + nu_tilde·(mu² + |z|²)^{q/2}`, their exact
//!   derivatives, gradient-variable mollification, and the two-parameter
//!   regularization that restores standard q-growth,
//! * [`grid`] — masked-lattice discretizations of discs and squares with
//!   piecewise-bilinear fields, subdomain quadrature, circle slices, and
//!   field mollification,
//! * [`solver`] — damped-Newton minimization of the discrete energy and a
//!   5-point solver for linear uniformly elliptic equations with a discrete
//!   maximum principle,
//! * [`estimates`] — every inequality of interest as a measurable check:
//!   1-D interpolation, circle-slice picking, hole filling, the L∞–L²
//!   contrast estimate with its sharp 1/4 exponent, Caccioppoli, and the
//!   Lipschitz bound with exponent 2/(3p−q).

pub mod error;
pub mod estimates;
pub mod grid;
pub mod integrand;
pub mod params;
pub mod quad;
pub mod solver;
pub mod vec2;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
