//! Analytic continuation of the algebraic function `w(z)` defined by
//! `Q(z, w) = 0`: singular sets, root tracking, monodromy, and the check
//! that a branch without finite singularities is a polynomial.

mod branch;
mod path;
mod track;

pub use branch::{contour_moments, entire_branch_to_polynomial, upper_lower_contours, BranchOutcome};
pub use path::{PathSpec, Segment};
pub use track::{
    monodromy, track_roots, Permutation, RootTrace, TraceStep, INITIAL_STEPS, MIN_STEP_FRACTION,
    SEP_MIN_REL, SINGULAR_MARGIN_REL,
};

use num_complex::Complex64;

use crate::polyalg::{resultant_wrt_w, roots, BiPoly, UniPoly};
use crate::{Error, Result};

/// Leading resultant coefficients below this (relative) are treated as zero.
const LEADING_REL_FLOOR: f64 = 1e-10;

/// Zeros of the resultant in `z` and a radius enclosing them.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularitySet {
    pub points: Vec<Complex64>,
    pub enclosing_radius: f64,
}

/// Roots of `Res(Q, dQ/dw)` in `z`, clustered: branch points and poles.
pub fn singular_points(q: &BiPoly) -> Result<SingularitySet> {
    let res = resultant_wrt_w(q);
    if res.is_zero() {
        return Err(Error::Degenerate(
            "resultant vanishes identically (Q has a repeated factor)".into(),
        ));
    }
    let r = cauchy_radius(&res)?;
    if res.degree() == 0 {
        return Ok(SingularitySet {
            points: Vec::new(),
            enclosing_radius: r,
        });
    }
    let rs = roots(&res, 1e-10)?;
    Ok(SingularitySet {
        points: cluster(&rs),
        enclosing_radius: r,
    })
}

/// Merges roots closer than `1e-6 * scale` (multiple resultant roots come
/// back split by about `sqrt(eps)`).
fn cluster(rs: &[Complex64]) -> Vec<Complex64> {
    let scale = rs.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &z in rs {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|p| (p - z).norm() <= 1e-6 * scale))
        {
            Some(g) => g.push(z),
            None => groups.push(vec![z]),
        }
    }
    let mut pts: Vec<Complex64> = groups
        .iter()
        .map(|g| g.iter().sum::<Complex64>() / g.len() as f64)
        .collect();
    crate::polyalg::sort_roots(&mut pts);
    pts
}

/// Cauchy bound `R = 1 + max_j |r_j / r_M|` for the resultant of `Q`.
pub fn enclosing_radius(q: &BiPoly) -> Result<f64> {
    let res = resultant_wrt_w(q);
    if res.is_zero() {
        return Err(Error::Degenerate("resultant vanishes identically".into()));
    }
    cauchy_radius(&res)
}

/// Cauchy bound of a univariate polynomial; fails if the leading coefficient is negligible.
pub fn cauchy_radius(res: &UniPoly) -> Result<f64> {
    let m = res.degree();
    let lead = res.leading().norm();
    if !(lead > LEADING_REL_FLOOR * res.max_abs_coeff()) {
        return Err(Error::SingularityConditionFailed(format!(
            "leading resultant coefficient {lead:e} is negligible"
        )));
    }
    Ok(1.0
        + (0..m)
            .map(|j| res.coeff(j).norm() / lead)
            .fold(0.0, f64::max))
}

/// One radius for a family `Q(xi, ·, ·)` sampled at several directions:
/// `1 + max_xi max_j |r_j| / min_xi |r_M|`, requiring a common degree `M`.
pub fn family_enclosing_radius(family: &[BiPoly]) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::invalid("empty family"));
    }
    let res: Vec<UniPoly> = family.iter().map(resultant_wrt_w).collect();
    if res.iter().any(UniPoly::is_zero) {
        return Err(Error::Degenerate("resultant vanishes identically for a family member".into()));
    }
    let m = res[0].degree();
    if res.iter().any(|r| r.degree() != m) {
        return Err(Error::SingularityConditionFailed(
            "resultant degree in z varies across the family (leading coefficient vanishes)".into(),
        ));
    }
    let big = res.iter().map(UniPoly::max_abs_coeff).fold(0.0, f64::max);
    let min_lead = res.iter().map(|r| r.leading().norm()).fold(f64::INFINITY, f64::min);
    if !(min_lead > LEADING_REL_FLOOR * big) {
        return Err(Error::SingularityConditionFailed(format!(
            "leading resultant coefficient drops to {min_lead:e}"
        )));
    }
    let max_lower = res
        .iter()
        .flat_map(|r| (0..m).map(move |j| r.coeff(j).norm()))
        .fold(0.0, f64::max);
    Ok(1.0 + max_lower / min_lead)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn singular_sets_of_examples() {
        let sqrt = BiPoly::from_real(&[&[0.0, -1.0], &[], &[1.0]]).unwrap();
        let s = singular_points(&sqrt).unwrap();
        assert_eq!(s.points.len(), 1);
        assert!(s.points[0].norm() < 1e-12);
        assert!((s.enclosing_radius - 1.0).abs() < 1e-12);

        // (1 - z) w - 1: pole at z = 1
        let pole = BiPoly::from_real(&[&[-1.0], &[1.0, -1.0]]).unwrap();
        let s = singular_points(&pole).unwrap();
        assert_eq!(s.points.len(), 1);
        assert!((s.points[0] - c(1.0, 0.0)).norm() < 1e-12);

        // w^2 - (z^2 + 1)^2
        let sq = BiPoly::from_real(&[&[-1.0, 0.0, -2.0, 0.0, -1.0], &[], &[1.0]]).unwrap();
        let s = singular_points(&sq).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!((s.points[0] - c(0.0, -1.0)).norm() < 1e-6);
        assert!((s.points[1] - c(0.0, 1.0)).norm() < 1e-6);
        assert!(s.points.iter().all(|p| p.norm() <= s.enclosing_radius));
    }

    #[test]
    fn cauchy_radius_examples() {
        let r = cauchy_radius(&UniPoly::from_real(&[-4.0, 0.0, 1.0]).unwrap()).unwrap();
        assert!((r - 5.0).abs() < 1e-15);
        let r = cauchy_radius(&UniPoly::from_real(&[3.0]).unwrap()).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn repeated_factor_is_degenerate() {
        // (w - z)^2
        let q = BiPoly::from_real(&[&[0.0, 0.0, 1.0], &[0.0, -2.0], &[1.0]]).unwrap();
        assert!(matches!(singular_points(&q), Err(Error::Degenerate(_))));
    }

    #[test]
    fn family_radius_requires_common_degree() {
        let a = BiPoly::from_real(&[&[0.0, -1.0], &[], &[1.0]]).unwrap();
        let b = BiPoly::from_real(&[&[-2.0, -1.0], &[], &[1.0]]).unwrap();
        let r = family_enclosing_radius(&[a.clone(), b]).unwrap();
        assert!((r - 3.0).abs() < 1e-12);
        let constant = BiPoly::from_real(&[&[-1.0], &[], &[1.0]]).unwrap();
        assert!(matches!(
            family_enclosing_radius(&[a, constant]),
            Err(Error::SingularityConditionFailed(_))
        ));
    }
}
