//! Cut volumes `V(xi, t) = vol(D ∩ {<xi, x> <= t})` and parallel section
//! areas `A(xi, t) = dV/dt`.
//!
//! Balls and ellipsoids have closed forms in every dimension. Everything
//! else (and the numeric oracle for every shape) slices the domain: `A` by
//! polar quadrature inside the section plane, `V` by Gauss–Legendre in `t`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{norm, tangent_basis, unit_ball_volume, Direction, DomainSpec, Shape};
use crate::polyalg::UniPoly;
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Iteration cap of the bracketed root search for the section boundary along a ray.
pub const RAY_SEARCH_STEPS: usize = 60;
/// Rays per section (uniform angles; the trapezoid rule is spectral for periodic data).
pub const SECTION_RAYS: usize = 64;

/// Sampled cut volumes `V(xi, t)` and section areas on an ascending `t` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutVolumeProfile {
    pub xi: Direction,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub areas: Vec<f64>,
    pub domain_volume: f64,
}

/// Sampled section areas `A(xi, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionAreaProfile {
    pub xi: Direction,
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Cut volume of the unit ball in odd dimension `n`:
/// `kappa_{n-1} * ∫_{-1}^t (1 - s^2)^{(n-1)/2} ds`, a polynomial of degree `n`.
pub fn ball_cut_poly(n: usize) -> Result<UniPoly> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::invalid(format!(
            "ball cut volume is a polynomial only for odd n >= 3 (got {n})"
        )));
    }
    let m = (n - 1) / 2;
    let c = unit_ball_volume(n - 1);
    let mut coeffs = vec![0.0; n + 1];
    let mut binom = 1.0;
    for i in 0..=m {
        // ∫_{-1}^t s^{2i} ds = (t^{2i+1} + 1) / (2i + 1)
        let term = c * binom * if i % 2 == 0 { 1.0 } else { -1.0 } / (2 * i + 1) as f64;
        coeffs[2 * i + 1] += term;
        coeffs[0] += term;
        binom = binom * (m - i) as f64 / (i + 1) as f64;
    }
    UniPoly::from_real(&coeffs)
}

/// Unit-ball cut volume at offset `tau` for any `n >= 1`, clamped outside `[-1, 1]`.
pub fn unit_ball_cut_volume(n: usize, tau: f64) -> f64 {
    if tau <= -1.0 {
        return 0.0;
    }
    if tau >= 1.0 {
        return unit_ball_volume(n);
    }
    // ∫_{-π/2}^{φ} cos^n, by the reduction formula; the lower endpoint terms vanish.
    let phi = tau.asin();
    let (s, c) = phi.sin_cos();
    let mut j_prev = phi + PI / 2.0; // n = 0
    let mut j_cur = s + 1.0; // n = 1
    if n == 0 {
        return j_prev;
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = c.powi(k as i32 - 1) * s / kf + (kf - 1.0) / kf * j_prev;
        j_prev = j_cur;
        j_cur = next;
    }
    unit_ball_volume(n.saturating_sub(1)) * j_cur
}

/// Unit-ball section area `kappa_{n-1} (1 - tau^2)^{(n-1)/2}`.
pub fn unit_ball_section_area(n: usize, tau: f64) -> f64 {
    if tau.abs() >= 1.0 {
        return 0.0;
    }
    unit_ball_volume(n - 1) * (1.0 - tau * tau).powf((n as f64 - 1.0) / 2.0)
}

/// `(scale, offset)` with `V(xi, t) = |det| * V_ball((t - offset) / scale)`.
fn affine_reduction(d: &DomainSpec, xi: &Direction) -> Option<(f64, f64, f64)> {
    match d.shape() {
        Shape::Ball { center, radius } => {
            Some((*radius, xi.dot(center), radius.powi(d.dim() as i32)))
        }
        // E = A B + b: <xi, A y + b> = <A^T xi, y> + <xi, b>, so the ball is cut
        // in direction A^T xi / |A^T xi| at offset (t - <xi, b>) / |A^T xi|.
        Shape::Ellipsoid(m) => Some((
            norm(&m.transpose_apply(xi.components())),
            xi.dot(m.translation()),
            m.det().abs(),
        )),
        Shape::Star(_) => None,
    }
}

/// Closed-form cut volume of a ball or ellipsoid, any dimension.
pub fn ellipsoid_cut_volume(e: &DomainSpec, xi: &Direction, t: f64) -> Result<f64> {
    e.check_dir(xi)?;
    let (scale, offset, det) = affine_reduction(e, xi)
        .ok_or_else(|| Error::invalid("closed-form cut volume needs a ball or ellipsoid"))?;
    let tau = (t - offset) / scale;
    let n = e.dim();
    if tau <= -1.0 {
        return Ok(0.0);
    }
    if tau >= 1.0 {
        return Ok(det * unit_ball_volume(n));
    }
    if n % 2 == 1 {
        Ok(det * ball_cut_poly(n)?.eval_re(tau))
    } else {
        Ok(det * unit_ball_cut_volume(n, tau))
    }
}

/// Section area: closed form for balls/ellipsoids, polar quadrature otherwise.
pub fn section_area(d: &DomainSpec, xi: &Direction, t: f64) -> Result<f64> {
    d.check_dir(xi)?;
    match affine_reduction(d, xi) {
        Some((scale, offset, det)) => {
            Ok(det / scale * unit_ball_section_area(d.dim(), (t - offset) / scale))
        }
        None => section_area_numeric(d, xi, t),
    }
}

/// Section area by ray casting (n = 3; falls back to the closed form for other n).
pub fn section_area_numeric(d: &DomainSpec, xi: &Direction, t: f64) -> Result<f64> {
    d.check_dir(xi)?;
    if d.dim() != 3 {
        if d.is_star() {
            return Err(Error::invalid("numeric sections need dimension 3"));
        }
        return section_area(d, xi, t);
    }
    SectionFrame::new(d, xi)?.area(d, t)
}

/// Per-direction data reused across sections: tangency points and plane basis.
pub(crate) struct SectionFrame {
    pub h_minus: f64,
    pub h_plus: f64,
    lo: [f64; 3],
    hi: [f64; 3],
    e1: [f64; 3],
    e2: [f64; 3],
    center: Vec<f64>,
    radius: f64,
    rays: Vec<(f64, f64)>,
}

impl SectionFrame {
    pub(crate) fn new(d: &DomainSpec, xi: &Direction) -> Result<Self> {
        let u = xi.as_3d()?;
        let (lo, hi) = d.support_points(xi)?;
        let (e1, e2) = tangent_basis(&u);
        let rays = (0..SECTION_RAYS)
            .map(|j| (2.0 * PI * j as f64 / SECTION_RAYS as f64).sin_cos())
            .map(|(s, c)| (c, s))
            .collect();
        Ok(SectionFrame {
            h_minus: xi.dot(&lo),
            h_plus: xi.dot(&hi),
            lo: [lo[0], lo[1], lo[2]],
            hi: [hi[0], hi[1], hi[2]],
            e1,
            e2,
            center: d.center(),
            radius: d.bounding_radius(),
            rays,
        })
    }

    pub(crate) fn area(&self, d: &DomainSpec, t: f64) -> Result<f64> {
        let width = self.h_plus - self.h_minus;
        if t <= self.h_minus || t >= self.h_plus {
            return Ok(0.0);
        }
        // Polar center on the chord joining the tangency points: inside the
        // section for convex domains.
        let lam = (t - self.h_minus) / width;
        let p: Vec<f64> = (0..3)
            .map(|i| self.lo[i] + lam * (self.hi[i] - self.lo[i]))
            .collect();
        let mut inside = d.membership();
        if !inside(&p) {
            if (t - self.h_minus).min(self.h_plus - t) <= 1e-9 * width {
                return Ok(0.0);
            }
            return Err(Error::numeric(
                format!("section at t = {t}: polar center outside the domain"),
                f64::NAN,
            ));
        }
        let off: f64 = p
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let r_max = 1.01 * (self.radius + off) + 1e-12;
        let mut level = d.level();
        let f0 = level(&p);
        let mut q = [0.0; 3];
        let mut sum = 0.0;
        let mut prev: Option<f64> = None;
        for &(c, s) in &self.rays {
            let dir = [
                c * self.e1[0] + s * self.e2[0],
                c * self.e1[1] + s * self.e2[1],
                c * self.e1[2] + s * self.e2[2],
            ];
            let mut g = |r: f64| {
                for i in 0..3 {
                    q[i] = p[i] + r * dir[i];
                }
                level(&q)
            };
            // warm bracket around the previous ray's radius, else the full ray
            let mut bracket = None;
            if let Some(r) = prev {
                let (lo, hi) = (0.9 * r, (1.1 * r).min(r_max));
                let (glo, ghi) = (g(lo), g(hi));
                if glo < 0.0 && ghi > 0.0 {
                    bracket = Some((lo, hi, glo, ghi));
                }
            }
            let (a, b, ga, gb) = match bracket {
                Some(br) => br,
                None => (0.0, r_max, f0, g(r_max)),
            };
            let r = brent(&mut g, a, b, ga, gb, 1e-15 * r_max);
            prev = Some(r);
            sum += 0.5 * r * r;
        }
        Ok(sum * 2.0 * PI / SECTION_RAYS as f64)
    }
}

/// Zero of `f` in `[a, b]` given `f(a) < 0 < f(b)` (Brent's method).
fn brent(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, fa: f64, fb: f64, xtol: f64) -> f64 {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..RAY_SEARCH_STEPS {
        if fb == 0.0 {
            return b;
        }
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol {
            return b;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, or secant when a == c
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0)),
                    (qa - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    b
}

/// `∫_a^b A` with the substitution `s = a + (b - a)(1 - cos φ)/2`, which
/// removes square-root behavior at tangency endpoints.
fn integrate_smoothed(
    gl: &GaussLegendre,
    a: f64,
    b: f64,
    mut area: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (phi, w) in gl.on_interval(0.0, PI) {
        let s = a + half * (1.0 - phi.cos());
        sum += w * half * phi.sin() * area(s)?;
    }
    Ok(sum)
}

/// `V(xi, t)` as `∫_{h_-}^{min(t, h_+)} A(xi, s) ds` from numeric sections.
///
/// Rule orders double from 16 until successive estimates agree to
/// `tol * volume`.
pub fn cut_volume_numeric(d: &DomainSpec, xi: &Direction, t: f64, tol: f64) -> Result<f64> {
    if !(tol >= 1e-12) {
        return Err(Error::invalid("tolerance must be >= 1e-12"));
    }
    d.check_dir(xi)?;
    let vol = d.volume()?;
    if d.dim() != 3 {
        return integrate_adaptive(d.support_interval(xi)?.h_minus, t, d, tol * vol, |s| {
            section_area(d, xi, s)
        });
    }
    let frame = SectionFrame::new(d, xi)?;
    let b = t.min(frame.h_plus);
    integrate_adaptive(frame.h_minus, b, d, tol * vol, |s| frame.area(d, s))
}

fn integrate_adaptive(
    a: f64,
    b: f64,
    d: &DomainSpec,
    abs_tol: f64,
    mut area: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let b = b.min(a + 2.0 * d.bounding_radius() + 1.0);
    let mut prev = integrate_smoothed(&GaussLegendre::new(16), a, b, &mut area)?;
    let mut diff = f64::INFINITY;
    for m in [32, 64, 128] {
        let cur = integrate_smoothed(&GaussLegendre::new(m), a, b, &mut area)?;
        diff = (cur - prev).abs();
        if diff <= abs_tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::numeric("cut-volume quadrature", diff))
}

/// `V(xi, t)`: closed form where available, numeric otherwise.
pub fn cut_volume(d: &DomainSpec, xi: &Direction, t: f64) -> Result<f64> {
    if d.is_star() {
        cut_volume_numeric(d, xi, t, 1e-11)
    } else {
        ellipsoid_cut_volume(d, xi, t)
    }
}

/// `vol(D) - V(xi, t) = ∫_t^{h_+} A`, computed without cancellation.
pub fn tail_volume(d: &DomainSpec, xi: &Direction, t: f64) -> Result<f64> {
    if d.is_star() {
        let frame = SectionFrame::new(d, xi)?;
        let a = t.max(frame.h_minus);
        let gl = GaussLegendre::new(48);
        integrate_smoothed(&gl, a, frame.h_plus, |s| frame.area(d, s))
    } else {
        // {<xi, x> >= t} = {<-xi, x> <= -t}
        ellipsoid_cut_volume(d, &xi.neg(), -t)
    }
}

/// Cut volumes and areas along an ascending grid, integrating `A` panel by
/// panel between consecutive grid points.
pub fn cut_volume_profile(d: &DomainSpec, xi: &Direction, t_grid: &[f64]) -> Result<CutVolumeProfile> {
    d.check_dir(xi)?;
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("t grid must be strictly ascending"));
    }
    let vol = d.volume()?;
    if !d.is_star() {
        let values = t_grid
            .iter()
            .map(|&t| ellipsoid_cut_volume(d, xi, t))
            .collect::<Result<Vec<_>>>()?;
        let areas = t_grid
            .iter()
            .map(|&t| section_area(d, xi, t))
            .collect::<Result<Vec<_>>>()?;
        return Ok(CutVolumeProfile {
            xi: xi.clone(),
            t_grid: t_grid.to_vec(),
            values,
            areas,
            domain_volume: vol,
        });
    }
    let frame = SectionFrame::new(d, xi)?;
    let area = |s: f64| frame.area(d, s);
    let edge = GaussLegendre::new(24);
    let panel = GaussLegendre::new(5);
    let mut values = Vec::with_capacity(t_grid.len());
    let mut areas = Vec::with_capacity(t_grid.len());
    let mut acc = 0.0;
    let mut last = frame.h_minus;
    for &t in t_grid {
        let b = t.clamp(frame.h_minus, frame.h_plus);
        if b > last {
            let touches_edge = last <= frame.h_minus || b >= frame.h_plus;
            acc += if touches_edge {
                integrate_smoothed(&edge, last, b, area)?
            } else {
                let mut s = 0.0;
                for (x, w) in panel.on_interval(last, b) {
                    s += w * area(x)?;
                }
                s
            };
            last = b;
        }
        values.push(if t >= frame.h_plus { vol } else { acc });
        areas.push(area(t)?);
    }
    Ok(CutVolumeProfile {
        xi: xi.clone(),
        t_grid: t_grid.to_vec(),
        values,
        areas,
        domain_volume: vol,
    })
}

/// Profiles for many directions, in input order.
pub fn cut_volume_profiles(
    d: &DomainSpec,
    dirs: &[Direction],
    t_grid: &[f64],
) -> Result<Vec<CutVolumeProfile>> {
    dirs.par_iter()
        .map(|xi| cut_volume_profile(d, xi, t_grid))
        .collect()
}

pub fn section_area_profile(d: &DomainSpec, xi: &Direction, t_grid: &[f64]) -> Result<SectionAreaProfile> {
    let values = if d.is_star() {
        let frame = SectionFrame::new(d, xi)?;
        t_grid.iter().map(|&t| frame.area(d, t)).collect::<Result<Vec<_>>>()?
    } else {
        t_grid
            .iter()
            .map(|&t| section_area(d, xi, t))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(SectionAreaProfile {
        xi: xi.clone(),
        t_grid: t_grid.to_vec(),
        values,
    })
}

impl CutVolumeProfile {
    /// Checks bounds and monotonicity with the given slack.
    pub fn check_invariants(&self, slack: f64) -> Result<()> {
        let v = self.domain_volume;
        for (i, &x) in self.values.iter().enumerate() {
            if x < -slack * v || x > v * (1.0 + slack) {
                return Err(Error::InternalConsistency(format!(
                    "cut volume {x} at t = {} outside [0, {v}]",
                    self.t_grid[i]
                )));
            }
        }
        for w in self.values.windows(2) {
            if w[1] < w[0] - slack * v {
                return Err(Error::InternalConsistency("cut volume decreases in t".into()));
            }
        }
        if self.areas.iter().any(|&a| a < 0.0) {
            return Err(Error::InternalConsistency("negative section area".into()));
        }
        Ok(())
    }
}

/// CSV with columns `xi_1,...,xi_n,t,V,A`, one row per `(xi, t)`.
pub fn profiles_to_csv(profiles: &[CutVolumeProfile]) -> String {
    let n = profiles.first().map_or(0, |p| p.xi.dim());
    let mut s = String::new();
    for i in 1..=n {
        let _ = write!(s, "xi_{i},");
    }
    s.push_str("t,V,A\n");
    for p in profiles {
        for ((t, v), a) in p.t_grid.iter().zip(&p.values).zip(&p.areas) {
            for c in p.xi.components() {
                let _ = write!(s, "{c:.16e},");
            }
            let _ = writeln!(s, "{t:.16e},{v:.16e},{a:.16e}");
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::HarmonicTerm;

    #[test]
    fn ball_poly_n3_and_n5() {
        let p3 = ball_cut_poly(3).unwrap().real_coeffs();
        let want3 = [2.0 * PI / 3.0, PI, 0.0, -PI / 3.0];
        for (a, b) in p3.iter().zip(want3) {
            assert!((a - b).abs() < 1e-14);
        }
        let p5 = ball_cut_poly(5).unwrap().real_coeffs();
        let c = PI * PI / 2.0;
        let want5 = [c * 8.0 / 15.0, c, 0.0, -c * 2.0 / 3.0, 0.0, c / 5.0];
        for (a, b) in p5.iter().zip(want5) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!(ball_cut_poly(4).is_err());
    }

    #[test]
    fn ball_poly_endpoints() {
        for n in [3, 5, 7, 9] {
            let p = ball_cut_poly(n).unwrap();
            assert!(p.eval_re(-1.0).abs() < 1e-13);
            assert!((p.eval_re(1.0) - unit_ball_volume(n)).abs() < 1e-12);
            assert!((p.eval_re(0.0) - unit_ball_volume(n) / 2.0).abs() < 1e-13);
        }
    }

    #[test]
    fn reduction_formula_agrees_with_polynomial() {
        for n in [3, 5, 7] {
            let p = ball_cut_poly(n).unwrap();
            for i in 0..=20 {
                let tau = -1.0 + 0.1 * i as f64;
                assert!((p.eval_re(tau) - unit_ball_cut_volume(n, tau)).abs() < 1e-13);
            }
        }
        // disk: tau sqrt(1 - tau^2) + asin(tau) + pi/2
        let tau: f64 = 0.3;
        let want = tau * (1.0 - tau * tau).sqrt() + tau.asin() + PI / 2.0;
        assert!((unit_ball_cut_volume(2, tau) - want).abs() < 1e-14);
    }

    #[test]
    fn ball_sections() {
        let b = DomainSpec::unit_ball(3).unwrap();
        let xi = Direction::axis(3, 0);
        assert!((section_area_numeric(&b, &xi, 0.0).unwrap() - PI).abs() < 1e-12);
        assert!((section_area_numeric(&b, &xi, 0.5).unwrap() - 0.75 * PI).abs() < 1e-12);
        assert_eq!(section_area_numeric(&b, &xi, 2.0).unwrap(), 0.0);
        let v = cut_volume_numeric(&b, &xi, 0.0, 1e-10).unwrap();
        assert!((v - 2.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn ellipsoid_full_volume_at_support() {
        let e = DomainSpec::diag_ellipsoid(&[1.0, 2.0, 3.0]).unwrap();
        let v = ellipsoid_cut_volume(&e, &Direction::axis(3, 2), 3.0).unwrap();
        assert!((v - 8.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn star_profile_is_monotone_and_matches_pointwise() {
        let s = DomainSpec::perturbed_sphere(0.1).unwrap();
        let xi = Direction::new(vec![0.2, 0.5, 0.8]).unwrap();
        let grid: Vec<f64> = (0..11).map(|i| -0.5 + 0.1 * i as f64).collect();
        let p = cut_volume_profile(&s, &xi, &grid).unwrap();
        p.check_invariants(1e-10).unwrap();
        let direct = cut_volume_numeric(&s, &xi, 0.2, 1e-10).unwrap();
        assert!((p.values[7] - direct).abs() < 1e-9);
    }

    #[test]
    fn star_tail_complements_cut() {
        let s = DomainSpec::star(
            vec![
                HarmonicTerm { k: 0, alpha: 1, coeff: (4.0 * PI).sqrt() },
                HarmonicTerm { k: 2, alpha: 4, coeff: 0.05 },
            ],
            [0.0; 3],
        )
        .unwrap();
        let xi = Direction::axis(3, 2);
        let vol = s.volume().unwrap();
        let v = cut_volume_numeric(&s, &xi, 0.3, 1e-10).unwrap();
        let tail = tail_volume(&s, &xi, 0.3).unwrap();
        assert!((v + tail - vol).abs() < 1e-9);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let b = DomainSpec::unit_ball(3).unwrap();
        let p = cut_volume_profile(&b, &Direction::axis(3, 1), &[-0.5, 0.0, 0.5]).unwrap();
        let csv = profiles_to_csv(&[p]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "xi_1,xi_2,xi_3,t,V,A");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1].split(',').count(), 6);
    }
}
