//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Hessian evaluation at the origin of a degenerate integrand (mu = 0, p < 2).
    #[error("integrand is not C2 at z = 0 for mu = 0 and p = {p}")]
    DegenerateOrigin { p: f64 },

    /// Quadrature rule mass deviates from 1 beyond tolerance.
    #[error("mollifier quadrature mass {mass} deviates from 1 beyond 1e-10")]
    QuadratureFailure { mass: f64 },

    /// Grid resolution below the supported minimum.
    #[error("grid resolution n = {n} is too coarse (need n >= 8)")]
    ResolutionTooCoarse { n: usize },

    /// Subdomain does not intersect the grid.
    #[error("subdomain contains no quadrature points of the grid")]
    EmptySubdomain,

    /// Circle slice outside the interpolable region of the grid.
    #[error("circle of radius {r} is not covered by the grid")]
    RadiusOutsideGrid { r: f64 },

    /// Mollification target not covered by the source field.
    #[error("source field does not cover the mollification stencil (missing margin)")]
    InsufficientMargin,

    /// Newton Hessian factorization met a nonpositive pivot.
    #[error("nonpositive Hessian pivot at dof {dof}: integrand is not strictly convex here")]
    NonConvexDetected { dof: usize },

    /// Newton failed to converge.
    #[error("no convergence after {iters} Newton iterations (residual {residual:.3e})")]
    MaxIterations { iters: usize, residual: f64 },

    /// Linear system factorization failed.
    #[error("singular linear system (pivot at dof {dof})")]
    SingularSystem { dof: usize },

    /// Not enough samples for the requested check or fit.
    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    /// Hole-filling absorption parameter out of range.
    #[error("hole-filling requires theta in [0,1), got {theta}")]
    InvalidTheta { theta: f64 },

    /// L-infinity / L2 ratio undefined: positive part vanishes identically.
    #[error("positive part of the field vanishes on the ball; ratio undefined")]
    ZeroPositivePart,

    /// Log-log fit abscissas have no spread.
    #[error("degenerate abscissa: fewer than 2 distinct scales")]
    DegenerateAbscissa,

    /// Exponent relation q < 3p violated where the Lipschitz estimate needs it.
    #[error("exponent out of range: q = {q} >= 3p = {three_p}")]
    ExponentOutOfRange { q: f64, three_p: f64 },

    /// Invalid growth parameters.
    #[error("invalid growth parameters: {0}")]
    InvalidGrowthParams(String),

    /// Generic precondition failure.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// Table import failure.
    #[error("malformed field table: {0}")]
    MalformedTable(String),
}
