use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// A path piece in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    /// `center + radius * exp(i (start + s * sweep))`, `s in [0, 1]`;
    /// positive `sweep` is counter-clockwise.
    Arc {
        center: Complex64,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    /// Point at fraction `s in [0, 1]`.
    pub fn at(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Complex64::from_polar(radius, start + s * sweep),
        }
    }

    /// `dz/ds` with respect to arc length.
    pub fn unit_tangent(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => (to - from) / (to - from).norm(),
            Segment::Arc { start, sweep, .. } => {
                Complex64::i() * Complex64::from_polar(sweep.signum(), start + s * sweep)
            }
        }
    }

    pub fn start(&self) -> Complex64 {
        self.at(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.at(1.0)
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc {
                center,
                radius,
                start,
                sweep,
            } => Segment::Arc {
                center,
                radius,
                start: start + sweep,
                sweep: -sweep,
            },
        }
    }

    /// Euclidean distance from `p` to the segment.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                if len2 == 0.0 {
                    return (p - from).norm();
                }
                let s = (((p - from) * d.conj()).re / len2).clamp(0.0, 1.0);
                (p - (from + d * s)).norm()
            }
            Segment::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let rel = p - center;
                let ends = (p - self.start()).norm().min((p - self.end()).norm());
                if rel.norm() == 0.0 {
                    return radius;
                }
                // fraction along the sweep at which the ray through p crosses the arc
                let ang = rel.arg();
                let mut frac = (ang - start) / sweep;
                let turn = 2.0 * PI / sweep.abs();
                frac -= (frac / turn).floor() * turn;
                if frac <= 1.0 {
                    (rel.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
        }
    }
}

/// Contiguous chain of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    segments: Vec<Segment>,
    closed: bool,
}

impl PathSpec {
    pub fn new(segments: Vec<Segment>, closed: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::invalid("path needs at least one segment"));
        }
        let scale = segments
            .iter()
            .map(|s| s.start().norm().max(s.end().norm()))
            .fold(1.0, f64::max);
        for s in &segments {
            let ok = match *s {
                Segment::Line { from, to } => {
                    from.re.is_finite() && from.im.is_finite() && to.re.is_finite() && to.im.is_finite()
                }
                Segment::Arc {
                    center,
                    radius,
                    start,
                    sweep,
                } => {
                    center.re.is_finite()
                        && center.im.is_finite()
                        && radius > 0.0
                        && radius.is_finite()
                        && start.is_finite()
                        && sweep.is_finite()
                }
            };
            if !ok || s.length() == 0.0 {
                return Err(Error::invalid("degenerate or non-finite path segment"));
            }
        }
        for w in segments.windows(2) {
            if (w[0].end() - w[1].start()).norm() > 1e-12 * scale {
                return Err(Error::invalid("path segments are not contiguous"));
            }
        }
        if closed {
            let gap = (segments[segments.len() - 1].end() - segments[0].start()).norm();
            if gap > 1e-12 * scale {
                return Err(Error::invalid("closed path does not return to its start"));
            }
        }
        Ok(PathSpec { segments, closed })
    }

    /// Polyline through `vertices`; closing adds the edge back to the first vertex.
    pub fn polyline(vertices: &[Complex64], closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid("polyline needs at least two vertices"));
        }
        let mut segs: Vec<Segment> = vertices
            .windows(2)
            .map(|w| Segment::Line { from: w[0], to: w[1] })
            .collect();
        if closed && vertices[0] != vertices[vertices.len() - 1] {
            segs.push(Segment::Line {
                from: vertices[vertices.len() - 1],
                to: vertices[0],
            });
        }
        Self::new(segs, closed)
    }

    /// Full counter-clockwise circle starting at `center + radius * exp(i start)`.
    pub fn circle(center: Complex64, radius: f64, start: f64) -> Result<Self> {
        Self::new(
            vec![Segment::Arc {
                center,
                radius,
                start,
                sweep: 2.0 * PI,
            }],
            true,
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn basepoint(&self) -> Complex64 {
        self.segments[0].start()
    }

    pub fn end_point(&self) -> Complex64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn reversed(&self) -> PathSpec {
        PathSpec {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            closed: self.closed,
        }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &PathSpec) -> Result<PathSpec> {
        let mut segs = self.segments.clone();
        segs.extend_from_slice(&other.segments);
        let closed = (other.end_point() - self.basepoint()).norm()
            <= 1e-12 * self.basepoint().norm().max(1.0);
        PathSpec::new(segs, closed)
    }

    pub fn distance_to(&self, p: Complex64) -> f64 {
        self.segments
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point and unit tangent at arc length `s` from the start.
    pub fn at_arclength(&self, mut s: f64) -> (Complex64, Complex64) {
        for seg in &self.segments {
            let l = seg.length();
            if s <= l {
                let f = s / l;
                return (seg.at(f), seg.unit_tangent(f));
            }
            s -= l;
        }
        let last = &self.segments[self.segments.len() - 1];
        (last.end(), last.unit_tangent(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_geometry() {
        let p = PathSpec::circle(c(0.0, 0.0), 2.0, 0.0).unwrap();
        assert!((p.length() - 4.0 * PI).abs() < 1e-14);
        assert!((p.basepoint() - c(2.0, 0.0)).norm() < 1e-15);
        assert!((p.distance_to(c(0.5, 0.0)) - 1.5).abs() < 1e-14);
        let (z, t) = p.at_arclength(PI);
        assert!((z - c(0.0, 2.0)).norm() < 1e-14);
        assert!((t - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn arc_distance_respects_sweep() {
        let upper = Segment::Arc {
            center: c(0.0, 0.0),
            radius: 1.0,
            start: 0.0,
            sweep: PI,
        };
        assert!((upper.distance_to(c(0.0, 2.0)) - 1.0).abs() < 1e-14);
        // below the upper half circle: nearest points are the endpoints
        assert!((upper.distance_to(c(0.0, -1.0)) - 2f64.sqrt()).abs() < 1e-14);
        let lower_cw = upper.reversed();
        assert!((lower_cw.distance_to(c(0.0, 2.0)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_gaps_and_open_closures() {
        let a = Segment::Line { from: c(0.0, 0.0), to: c(1.0, 0.0) };
        let b = Segment::Line { from: c(2.0, 0.0), to: c(3.0, 0.0) };
        assert!(PathSpec::new(vec![a, b], false).is_err());
        assert!(PathSpec::new(vec![a], true).is_err());
        let sq = PathSpec::polyline(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)], true).unwrap();
        assert_eq!(sq.segments().len(), 3);
        assert!(sq.is_closed());
    }

    #[test]
    fn reverse_then_is_closed() {
        let a = PathSpec::polyline(&[c(1.0, 0.0), c(1.0, 1.0), c(-1.0, 1.0)], false).unwrap();
        let loop_ = a.then(&a.reversed()).unwrap();
        assert!(loop_.is_closed());
        assert!((loop_.length() - 2.0 * a.length()).abs() < 1e-14);
    }
}
