//! Spectral zeta-function values, traces of inverses, and zeta-regularized
//! functional determinants for regular self-adjoint Sturm-Liouville
//! operators with general coefficients p, q, r and separated or coupled
//! boundary conditions.
//!
//! The computation pipeline:
//!
//! 1. [`problem`] describes tau = (1/r)[-(d/dx) p (d/dx) + q] on (a, b)
//!    and validates the regularity hypotheses.
//! 2. [`ivp`] integrates the quasi-derivative system directly and evaluates
//!    the characteristic function F(z) at any complex z: the ground truth.
//! 3. [`volterra`] iterates the z = 0 Volterra kernel to obtain Taylor
//!    coefficients in z of the solution basis at x = b.
//! 4. [`charseries`] assembles the small-z coefficients a_j of F for a
//!    boundary condition and detects the multiplicity m0 of the zero
//!    eigenvalue.
//! 5. [`zeta`] turns the a_j into zeta(n) for integer n >= 1 and the trace
//!    of the inverse via a logarithm-series recursion.
//! 6. [`liouville`] transforms the problem to Schroedinger form, expands
//!    ln F for large z, and evaluates zeta'(0) and the functional
//!    determinant in closed form.
//! 7. [`oracle`] locates eigenvalues by root bracketing, counts negative
//!    ones, and provides partial-sum-plus-tail cross-checks.

pub mod charseries;
pub mod coefficient;
pub mod error;
pub mod ivp;
pub mod jet;
pub mod liouville;
pub mod oracle;
pub mod pipeline;
pub mod problem;
pub mod quad;
pub mod volterra;
pub mod zeta;

pub use charseries::CharSeries;
pub use coefficient::{Coefficient, InterpOrder, Side};
pub use error::{Error, Result};
pub use ivp::{BasisValues, IntegratorConfig, RkMethod};
pub use liouville::{GammaData, LiouvilleData, ZetaPrimeZero};
pub use oracle::{OracleConfig, Spectrum};
pub use pipeline::ComputeOptions;
pub use problem::{
    resolve_named_bc, validate_basic, validate_liouville, BasisAtZero, BoundaryCondition, Interval,
    SLProblem, SmoothnessClass, ValidationReport,
};
pub use volterra::SeriesAtB;
pub use zeta::ZetaReport;
