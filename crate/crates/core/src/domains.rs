//! Smooth bounded domains: balls, ellipsoids (affine images of the unit
//! ball) and star-shaped bodies whose radial function is a finite real
//! spherical-harmonic series.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::harmonics::{eval_all_into, harmonic_count, HarmonicIndex, SphereQuadrature};
use crate::{Error, Result};

/// Highest harmonic degree allowed in a star-shaped radial function.
pub const MAX_RHO_DEGREE: usize = 8;
/// Directions used to validate `rho > 0` and seed support searches.
pub const RHO_MESH_SIZE: usize = 10_000;

/// Unit vector in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalizes `v`; rejects zero or non-finite input.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("direction has non-finite components"));
        }
        let n = norm(&v);
        if n == 0.0 {
            return Err(Error::invalid("direction must be nonzero"));
        }
        Ok(Direction(v.into_iter().map(|x| x / n).collect()))
    }

    pub(crate) fn from_unit_unchecked(v: Vec<f64>) -> Self {
        Direction(v)
    }

    /// Coordinate axis `e_i` in `R^n`.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Direction(v)
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        dot(&self.0, x)
    }

    pub fn neg(&self) -> Self {
        Direction(self.0.iter().map(|x| -x).collect())
    }

    pub fn as_3d(&self) -> Result<[f64; 3]> {
        match self.0.as_slice() {
            &[x, y, z] => Ok([x, y, z]),
            _ => Err(Error::invalid(format!(
                "expected a direction in R^3, got dimension {}",
                self.0.len()
            ))),
        }
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.0
    }
}

/// `x -> A x + b` with invertible `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMap {
    matrix: DMatrix<f64>,
    translation: DVector<f64>,
    inverse: Vec<f64>,
    det: f64,
}

impl AffineMap {
    pub fn new(matrix: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n || translation.len() != n {
            return Err(Error::invalid("affine map must be n x n with an n-vector translation"));
        }
        if matrix.iter().chain(translation.iter()).any(|x| !x.is_finite()) {
            return Err(Error::invalid("affine map has non-finite entries"));
        }
        let scale = matrix.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let det = matrix.determinant();
        if !(det.abs() > 1e-12 * scale.powi(n as i32)) {
            return Err(Error::invalid(format!("affine map is singular (det = {det:e})")));
        }
        let inv = matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::invalid("affine map is not invertible"))?;
        let inverse = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| inv[(i, j)])
            .collect();
        Ok(AffineMap {
            matrix,
            translation,
            inverse,
            det,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], translation: &[f64]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("matrix must be square"));
        }
        Self::new(
            DMatrix::from_fn(n, n, |i, j| rows[i][j]),
            DVector::from_column_slice(translation),
        )
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn translation(&self) -> &[f64] {
        self.translation.as_slice()
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// `A^T xi`.
    pub fn transpose_apply(&self, xi: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).map(|i| self.matrix[(i, j)] * xi[i]).sum())
            .collect()
    }

    pub fn apply_linear(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * y[j]).sum())
            .collect()
    }

    /// `|A^{-1} (x - b)|^2`.
    fn preimage_norm_sqr(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let b = self.translation.as_slice();
        let mut s = 0.0;
        for i in 0..n {
            let row = &self.inverse[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for j in 0..n {
                acc += row[j] * (x[j] - b[j]);
            }
            s += acc * acc;
        }
        s
    }

    /// `|A^{-1} u|`.
    fn inverse_norm(&self, u: &[f64]) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            let row = &self.inverse[i * n..(i + 1) * n];
            let acc: f64 = row.iter().zip(u).map(|(a, b)| a * b).sum();
            s += acc * acc;
        }
        s.sqrt()
    }

    fn spectral_norm(&self) -> f64 {
        self.matrix.clone().svd(false, false).singular_values.max()
    }
}

/// One term `coeff * Y_{k,alpha}` of a radial function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub k: usize,
    pub alpha: usize,
    pub coeff: f64,
}

/// Star-shaped body `{c + r u : 0 <= r < rho(u)}` in `R^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct StarBody {
    terms: Vec<HarmonicTerm>,
    center: [f64; 3],
    coeffs: Vec<f64>,
    degree: usize,
    rho_min: f64,
    rho_max: f64,
    // boundary points (relative to the center) on the validation mesh
    mesh: Vec<[f64; 3]>,
}

impl StarBody {
    pub fn new(terms: Vec<HarmonicTerm>, center: [f64; 3]) -> Result<Self> {
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("center has non-finite components"));
        }
        let mut degree = 0;
        for t in &terms {
            HarmonicIndex::new(t.k, t.alpha)?;
            if t.k > MAX_RHO_DEGREE {
                return Err(Error::invalid(format!(
                    "radial harmonic degree {} exceeds {MAX_RHO_DEGREE}",
                    t.k
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::invalid("radial coefficient is not finite"));
            }
            degree = degree.max(t.k);
        }
        let mut coeffs = vec![0.0; harmonic_count(degree)];
        for t in &terms {
            coeffs[HarmonicIndex { k: t.k, alpha: t.alpha }.flat()] += t.coeff;
        }
        let mut body = StarBody {
            terms,
            center,
            coeffs,
            degree,
            rho_min: f64::INFINITY,
            rho_max: 0.0,
            mesh: Vec::new(),
        };
        let mut scratch = vec![0.0; harmonic_count(degree)];
        let mesh: Vec<[f64; 3]> = fibonacci_sphere(RHO_MESH_SIZE)
            .into_iter()
            .map(|u| {
                let r = body.rho_with(&u, &mut scratch);
                body.rho_min = body.rho_min.min(r);
                body.rho_max = body.rho_max.max(r);
                [r * u[0], r * u[1], r * u[2]]
            })
            .collect();
        if !(body.rho_min > 0.0) {
            return Err(Error::invalid(format!(
                "radial function is not positive (min {:e} on the validation mesh)",
                body.rho_min
            )));
        }
        body.mesh = mesh;
        Ok(body)
    }

    pub fn terms(&self) -> &[HarmonicTerm] {
        &self.terms
    }

    pub fn center(&self) -> [f64; 3] {
        self.center
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Min and max of `rho` on the validation mesh.
    pub fn rho_range(&self) -> (f64, f64) {
        (self.rho_min, self.rho_max)
    }

    /// `rho(u)` for a unit vector `u`.
    pub fn rho(&self, u: &[f64; 3]) -> f64 {
        let mut scratch = vec![0.0; self.coeffs.len()];
        self.rho_with(u, &mut scratch)
    }

    fn rho_with(&self, u: &[f64; 3], scratch: &mut [f64]) -> f64 {
        eval_all_into(self.degree, u[0], u[1], u[2], scratch);
        self.coeffs.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum()
    }

    fn contains_with(&self, x: &[f64], scratch: &mut [f64]) -> bool {
        let d = [x[0] - self.center[0], x[1] - self.center[1], x[2] - self.center[2]];
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        if r2 == 0.0 {
            return true;
        }
        // cheap rejections from the mesh bounds
        if r2 < 0.99 * self.rho_min * self.rho_min {
            return true;
        }
        if r2 > 1.01 * self.rho_max * self.rho_max + 1e-12 {
            return false;
        }
        let r = r2.sqrt();
        let u = [d[0] / r, d[1] / r, d[2] / r];
        r < self.rho_with(&u, scratch)
    }

    /// Maximizer of `<xi, rho(u) u>` over the sphere: returns (value, boundary point offset).
    fn support_max(&self, xi: &[f64; 3]) -> (f64, [f64; 3]) {
        let (mut best, mut best_p) = (f64::NEG_INFINITY, [0.0; 3]);
        for p in &self.mesh {
            let v = xi[0] * p[0] + xi[1] * p[1] + xi[2] * p[2];
            if v > best {
                best = v;
                best_p = *p;
            }
        }
        let r = norm(&best_p);
        let u0 = [best_p[0] / r, best_p[1] / r, best_p[2] / r];
        self.polish_support(xi, u0)
    }

    /// Newton iteration on the sphere with finite-difference derivatives.
    fn polish_support(&self, xi: &[f64; 3], mut u: [f64; 3]) -> (f64, [f64; 3]) {
        let mut scratch = vec![0.0; self.coeffs.len()];
        let mut f = |u: &[f64; 3]| -> f64 {
            let r = self.rho_with(u, &mut scratch);
            r * (xi[0] * u[0] + xi[1] * u[1] + xi[2] * u[2])
        };
        for _ in 0..30 {
            let (e1, e2) = tangent_basis(&u);
            let at = |a: f64, b: f64| -> [f64; 3] {
                let v = [
                    u[0] + a * e1[0] + b * e2[0],
                    u[1] + a * e1[1] + b * e2[1],
                    u[2] + a * e1[2] + b * e2[2],
                ];
                let n = norm(&v);
                [v[0] / n, v[1] / n, v[2] / n]
            };
            let h = 1e-4;
            let f0 = f(&u);
            let fa = f(&at(h, 0.0));
            let fb = f(&at(-h, 0.0));
            let fc = f(&at(0.0, h));
            let fd = f(&at(0.0, -h));
            let fab = f(&at(h, h));
            let fcd = f(&at(-h, -h));
            let fad = f(&at(h, -h));
            let fbc = f(&at(-h, h));
            let gx = (fa - fb) / (2.0 * h);
            let gy = (fc - fd) / (2.0 * h);
            let hxx = (fa - 2.0 * f0 + fb) / (h * h);
            let hyy = (fc - 2.0 * f0 + fd) / (h * h);
            let hxy = (fab + fcd - fad - fbc) / (4.0 * h * h);
            let det = hxx * hyy - hxy * hxy;
            let (sx, sy) = if hxx < 0.0 && det > 0.0 {
                ((-hyy * gx + hxy * gy) / det, (hxy * gx - hxx * gy) / det)
            } else {
                (1e-2 * gx, 1e-2 * gy)
            };
            let step = (sx * sx + sy * sy).sqrt();
            let cand = at(sx.clamp(-0.1, 0.1), sy.clamp(-0.1, 0.1));
            if f(&cand) >= f0 {
                u = cand;
            } else {
                break;
            }
            if step < 1e-13 {
                break;
            }
        }
        let r = self.rho_with(&u, &mut scratch);
        let p = [r * u[0], r * u[1], r * u[2]];
        (xi[0] * p[0] + xi[1] * p[1] + xi[2] * p[2], p)
    }
}

/// Domain variants.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball { center: Vec<f64>, radius: f64 },
    Ellipsoid(AffineMap),
    Star(StarBody),
}

/// A validated bounded domain in `R^n`, `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    dim: usize,
    shape: Shape,
}

/// Support values `h_-(xi) = inf <xi, x>`, `h_+(xi) = sup <xi, x>` over the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportInterval {
    pub h_minus: f64,
    pub h_plus: f64,
}

impl SupportInterval {
    pub fn width(&self) -> f64 {
        self.h_plus - self.h_minus
    }

    pub fn contains(&self, t: f64) -> bool {
        self.h_minus < t && t < self.h_plus
    }
}

impl DomainSpec {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let dim = center.len();
        if dim < 2 {
            return Err(Error::invalid("dimension must be >= 2"));
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("center has non-finite components"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("radius must be positive"));
        }
        Ok(DomainSpec {
            dim,
            shape: Shape::Ball { center, radius },
        })
    }

    pub fn unit_ball(n: usize) -> Result<Self> {
        Self::ball(vec![0.0; n], 1.0)
    }

    /// `A(B^n) + b`.
    pub fn ellipsoid(map: AffineMap) -> Result<Self> {
        let dim = map.dim();
        if dim < 2 {
            return Err(Error::invalid("dimension must be >= 2"));
        }
        Ok(DomainSpec {
            dim,
            shape: Shape::Ellipsoid(map),
        })
    }

    /// Axis-aligned ellipsoid `diag(axes) B^n`, centered at the origin.
    pub fn diag_ellipsoid(axes: &[f64]) -> Result<Self> {
        let n = axes.len();
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { axes[i] } else { 0.0 });
        Self::ellipsoid(AffineMap::new(m, DVector::zeros(n))?)
    }

    pub fn star(terms: Vec<HarmonicTerm>, center: [f64; 3]) -> Result<Self> {
        Ok(DomainSpec {
            dim: 3,
            shape: Shape::Star(StarBody::new(terms, center)?),
        })
    }

    /// `rho = 1 + amplitude * Y_{4, m=0}` centered at the origin.
    pub fn perturbed_sphere(amplitude: f64) -> Result<Self> {
        let y00 = 1.0 / (4.0 * PI).sqrt();
        Self::star(
            vec![
                HarmonicTerm { k: 0, alpha: 1, coeff: 1.0 / y00 },
                HarmonicTerm { k: 4, alpha: 5, coeff: amplitude },
            ],
            [0.0; 3],
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_star(&self) -> bool {
        matches!(self.shape, Shape::Star(_))
    }

    pub fn center(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Ball { center, .. } => center.clone(),
            Shape::Ellipsoid(m) => m.translation().to_vec(),
            Shape::Star(s) => s.center.to_vec(),
        }
    }

    /// Radius of a ball around [`center`](Self::center) containing the domain.
    pub fn bounding_radius(&self) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => *radius,
            Shape::Ellipsoid(m) => m.spectral_norm(),
            Shape::Star(s) => s.rho_max * 1.01 + 1e-12,
        }
    }

    /// Same domain shifted by `c`.
    pub fn translated(&self, c: &[f64]) -> Result<Self> {
        if c.len() != self.dim {
            return Err(Error::invalid("translation has wrong dimension"));
        }
        let add = |a: &[f64]| a.iter().zip(c).map(|(x, y)| x + y).collect::<Vec<_>>();
        match &self.shape {
            Shape::Ball { center, radius } => Self::ball(add(center), *radius),
            Shape::Ellipsoid(m) => Self::ellipsoid(AffineMap::new(
                m.matrix.clone(),
                DVector::from_vec(add(m.translation())),
            )?),
            Shape::Star(s) => {
                let cc = add(&s.center);
                Self::star(s.terms.clone(), [cc[0], cc[1], cc[2]])
            }
        }
    }

    /// Strict membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match &self.shape {
            Shape::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                d2 < radius * radius
            }
            Shape::Ellipsoid(m) => m.preimage_norm_sqr(x) < 1.0,
            Shape::Star(s) => {
                let mut scratch = vec![0.0; s.coeffs.len()];
                s.contains_with(x, &mut scratch)
            }
        }
    }

    /// Membership predicate with reusable scratch space, for hot loops.
    pub(crate) fn membership(&self) -> impl FnMut(&[f64]) -> bool + '_ {
        let mut scratch = match &self.shape {
            Shape::Star(s) => vec![0.0; s.coeffs.len()],
            _ => Vec::new(),
        };
        move |x: &[f64]| match &self.shape {
            Shape::Star(s) => s.contains_with(x, &mut scratch),
            _ => self.contains(x),
        }
    }

    /// Continuous level function, negative inside and positive outside:
    /// radial distance minus boundary radius (preimage norm minus 1 for ellipsoids).
    pub(crate) fn level(&self) -> impl FnMut(&[f64]) -> f64 + '_ {
        let mut scratch = match &self.shape {
            Shape::Star(s) => vec![0.0; s.coeffs.len()],
            _ => Vec::new(),
        };
        move |x: &[f64]| match &self.shape {
            Shape::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() - radius
            }
            Shape::Ellipsoid(m) => m.preimage_norm_sqr(x).sqrt() - 1.0,
            Shape::Star(s) => {
                let d = [x[0] - s.center[0], x[1] - s.center[1], x[2] - s.center[2]];
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                if r == 0.0 {
                    return -s.rho_min;
                }
                r - s.rho_with(&[d[0] / r, d[1] / r, d[2] / r], &mut scratch)
            }
        }
    }

    /// Distance from the center to the boundary along the unit vector `u`.
    pub fn boundary_radius(&self, u: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { radius, .. } => *radius,
            Shape::Ellipsoid(m) => 1.0 / m.inverse_norm(u),
            Shape::Star(s) => s.rho(&[u[0], u[1], u[2]]),
        }
    }

    pub fn support_interval(&self, xi: &Direction) -> Result<SupportInterval> {
        let (lo, hi) = self.support_points(xi)?;
        Ok(SupportInterval {
            h_minus: xi.dot(&lo),
            h_plus: xi.dot(&hi),
        })
    }

    /// Boundary points where the supporting hyperplanes `<xi, x> = h_-` and
    /// `<xi, x> = h_+` touch.
    pub fn support_points(&self, xi: &Direction) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_dir(xi)?;
        let u = xi.components();
        Ok(match &self.shape {
            Shape::Ball { center, radius } => (
                center.iter().zip(u).map(|(c, x)| c - radius * x).collect(),
                center.iter().zip(u).map(|(c, x)| c + radius * x).collect(),
            ),
            Shape::Ellipsoid(m) => {
                // sup over A y + b is attained at y = A^T xi / |A^T xi|.
                let at = m.transpose_apply(u);
                let s = norm(&at);
                let y: Vec<f64> = at.iter().map(|v| v / s).collect();
                let ay = m.apply_linear(&y);
                let b = m.translation();
                (
                    b.iter().zip(&ay).map(|(b, a)| b - a).collect(),
                    b.iter().zip(&ay).map(|(b, a)| b + a).collect(),
                )
            }
            Shape::Star(s) => {
                let x = [u[0], u[1], u[2]];
                let (_, p_hi) = s.support_max(&x);
                let (_, p_lo) = s.support_max(&[-u[0], -u[1], -u[2]]);
                let c = s.center;
                (
                    (0..3).map(|i| c[i] + p_lo[i]).collect(),
                    (0..3).map(|i| c[i] + p_hi[i]).collect(),
                )
            }
        })
    }

    pub fn volume(&self) -> Result<f64> {
        match &self.shape {
            Shape::Ball { radius, .. } => Ok(unit_ball_volume(self.dim) * radius.powi(self.dim as i32)),
            Shape::Ellipsoid(m) => Ok(unit_ball_volume(self.dim) * m.det().abs()),
            Shape::Star(s) => {
                // rho^3 is band-limited to degree 3 * deg(rho): this rule is exact for it.
                let l = 3 * s.degree + 2;
                let a = star_volume(s, l)?;
                let b = star_volume(s, l + 4)?;
                let rel = (a - b).abs() / a.abs();
                if !(rel <= 1e-10) {
                    return Err(Error::numeric("star-shaped volume quadrature", rel));
                }
                Ok(b)
            }
        }
    }

    pub(crate) fn check_dir(&self, xi: &Direction) -> Result<()> {
        if xi.dim() != self.dim {
            return Err(Error::invalid(format!(
                "direction dimension {} does not match domain dimension {}",
                xi.dim(),
                self.dim
            )));
        }
        Ok(())
    }
}

fn star_volume(s: &StarBody, l: usize) -> Result<f64> {
    let q = SphereQuadrature::new(l)?;
    let vals: Vec<f64> = q
        .nodes
        .iter()
        .map(|n| {
            let c = n.components();
            s.rho(&[c[0], c[1], c[2]]).powi(3) / 3.0
        })
        .collect();
    Ok(q.integrate(&vals))
}

/// Volume `kappa_n` of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// JSON domain document:
/// `{"dimension", "type": "ball"|"ellipsoid"|"star", "center", "radius", "matrix", "rho"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainDoc {
    pub dimension: usize,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<HarmonicTerm>>,
}

impl DomainDoc {
    pub fn to_domain(&self) -> Result<DomainSpec> {
        let n = self.dimension;
        if n < 2 {
            return Err(Error::invalid("dimension must be >= 2"));
        }
        let center = self.center.clone().unwrap_or_else(|| vec![0.0; n]);
        if center.len() != n {
            return Err(Error::invalid(format!(
                "center has {} components, dimension is {n}",
                center.len()
            )));
        }
        match self.kind.as_str() {
            "ball" => DomainSpec::ball(center, self.radius.unwrap_or(1.0)),
            "ellipsoid" => {
                let rows = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| Error::invalid("ellipsoid needs \"matrix\""))?;
                if rows.len() != n {
                    return Err(Error::invalid("matrix must be dimension x dimension"));
                }
                DomainSpec::ellipsoid(AffineMap::from_rows(rows, &center)?)
            }
            "star" => {
                if n != 3 {
                    return Err(Error::invalid("star-shaped domains are supported for dimension 3"));
                }
                let rho = self
                    .rho
                    .clone()
                    .ok_or_else(|| Error::invalid("star domain needs \"rho\""))?;
                DomainSpec::star(rho, [center[0], center[1], center[2]])
            }
            other => Err(Error::invalid(format!("unknown domain type {other:?}"))),
        }
    }

    pub fn from_json(s: &str) -> Result<DomainSpec> {
        let doc: DomainDoc =
            serde_json::from_str(s).map_err(|e| Error::invalid(format!("domain JSON: {e}")))?;
        doc.to_domain()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormal `(e1, e2)` spanning the plane orthogonal to the unit vector `u`.
pub(crate) fn tangent_basis(u: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if u[0].abs() <= u[1].abs() && u[0].abs() <= u[2].abs() {
        [1.0, 0.0, 0.0]
    } else if u[1].abs() <= u[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let c = cross(u, &a);
    let n = norm(&c);
    let e1 = [c[0] / n, c[1] / n, c[2] / n];
    let e2 = cross(u, &e1);
    (e1, e2)
}

pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Quasi-uniform spiral points on `S^2`.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(5) - 8.0 * PI * PI / 15.0).abs() < 1e-14);
    }

    #[test]
    fn ball_support_and_membership() {
        let b = DomainSpec::unit_ball(3).unwrap();
        let xi = Direction::new(vec![1.0, 2.0, -2.0]).unwrap();
        let s = b.support_interval(&xi).unwrap();
        assert!((s.h_minus + 1.0).abs() < 1e-15 && (s.h_plus - 1.0).abs() < 1e-15);
        assert!(b.contains(&[0.0, 0.0, 0.0]));
        assert!(!b.contains(&[2.0, 0.0, 0.0]));
        assert!(!b.contains(&[1.0, 0.0, 0.0]));
    }

    #[test]
    fn ellipsoid_support_along_axis() {
        let e = DomainSpec::diag_ellipsoid(&[1.0, 2.0, 3.0]).unwrap();
        let s = e.support_interval(&Direction::axis(3, 2)).unwrap();
        assert!((s.h_minus + 3.0).abs() < 1e-14 && (s.h_plus - 3.0).abs() < 1e-14);
        assert!((e.volume().unwrap() - 8.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn singular_map_is_rejected() {
        let m = AffineMap::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[0.0, 0.0]);
        assert!(m.is_err());
    }

    #[test]
    fn constant_star_matches_ball() {
        let s = DomainSpec::perturbed_sphere(0.0).unwrap();
        let xi = Direction::new(vec![0.3, -0.4, 0.5]).unwrap();
        let si = s.support_interval(&xi).unwrap();
        assert!((si.h_plus - 1.0).abs() < 1e-8 && (si.h_minus + 1.0).abs() < 1e-8);
        assert!((s.volume().unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_radial_function_is_rejected() {
        assert!(DomainSpec::perturbed_sphere(5.0).is_err());
        let bad = vec![HarmonicTerm { k: 9, alpha: 1, coeff: 1.0 }];
        assert!(DomainSpec::star(bad, [0.0; 3]).is_err());
    }

    #[test]
    fn domain_json() {
        let d = DomainDoc::from_json(
            r#"{"dimension": 3, "type": "ellipsoid", "center": [0,0,0],
                "matrix": [[1,0,0],[0,2,0],[0,0,3]]}"#,
        )
        .unwrap();
        assert!((d.volume().unwrap() - 8.0 * PI).abs() < 1e-12);
        let s = DomainDoc::from_json(
            r#"{"dimension": 3, "type": "star",
                "rho": [{"k": 0, "alpha": 1, "coeff": 3.5449077018110318}, {"k": 4, "alpha": 5, "coeff": 0.1}]}"#,
        )
        .unwrap();
        assert!(s.is_star());
        assert!(DomainDoc::from_json(r#"{"dimension": 3, "type": "cube"}"#).is_err());
        assert!(DomainDoc::from_json(r#"{"dimension": 2, "type": "star", "rho": []}"#).is_err());
    }
}
