//! Exact-degree polynomial algebra over `C`.
//!
//! Univariate polynomials ([`UniPoly`]), bivariate polynomials `Q(z, w)`
//! ([`BiPoly`]), Sylvester resultants and discriminants with respect to `w`,
//! simultaneous root finding and least-squares polynomial fitting.
//!
//! Resultants follow the product convention
//! `Res(Q, Q_w) = q_N^(2N-1) * prod_{i<j} (w_i - w_j)^2`, which differs from the
//! classical Sylvester determinant by `(-1)^(N(N-1)/2)`.

mod bipoly;
mod fit;
mod poly;
mod resultant;
mod roots;

pub use bipoly::BiPoly;
pub use fit::{polyfit, polyfit_complex, polyfit_degree, FitResult};
pub use poly::{UniPoly, TRIM_REL};
pub use resultant::{discriminant_wrt_w, resultant_wrt_w, sylvester_resultant};
pub use roots::{roots, ROOT_ITERATION_CAP};
pub(crate) use roots::sort_roots;

/// Complex scalar used throughout the polynomial routines.
pub type ComplexScalar = num_complex::Complex64;

pub(crate) fn check_finite(c: &ComplexScalar) -> bool {
    c.re.is_finite() && c.im.is_finite()
}
