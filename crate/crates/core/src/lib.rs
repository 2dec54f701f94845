//! Cut-volume functions of smooth bounded domains and numerical checks of
//! their algebraic structure.
//!
//! For a domain `D` in `R^n`, a unit direction `xi` and an offset `t`, the
//! cut volume `V_D(xi, t)` is the volume of `D ∩ {<xi, x> <= t}` and the
//! section area `A_D(xi, t)` is the `(n-1)`-volume of the slice
//! `D ∩ {<xi, x> = t}`. The crate computes both (exactly for balls and
//! ellipsoids, by quadrature for smooth star-shaped bodies) and provides the
//! machinery to test the algebraic behaviour of `V_D` in `t`:
//!
//! * [`polyalg`]: univariate/bivariate complex polynomials, resultants,
//!   discriminants, simultaneous root finding and least-squares fitting.
//! * [`domains`]: balls, ellipsoids and star-shaped bodies.
//! * [`sectioning`]: cut volumes, section areas and profiles.
//! * [`harmonics`]: real spherical harmonics on `S^2` and sphere quadrature.
//! * [`continuation`]: singular sets, root tracking, monodromy and the
//!   entire-branch polynomial check for algebraic functions `Q(z, w) = 0`.
//! * [`analysis`]: Fourier polynomiality, Radon inversion, Taylor-moment
//!   orthogonality, tangency exponents and the ellipsoid certificate.

pub mod analysis;
pub mod continuation;
pub mod domains;
mod error;
pub mod harmonics;
pub mod polyalg;
pub mod quadrature;
pub mod sectioning;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use analysis::{AnalysisWindow, CertificateReport, TestRecord, Verdict};
pub use continuation::{PathSpec, RootTrace, SingularitySet};
pub use domains::{AffineMap, Direction, DomainSpec, HarmonicTerm, Shape, SupportInterval};
pub use harmonics::{HarmonicExpansion, HarmonicIndex, SphereQuadrature};
pub use polyalg::{BiPoly, FitResult, UniPoly};
pub use sectioning::{CutVolumeProfile, SectionAreaProfile};
