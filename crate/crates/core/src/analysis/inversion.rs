use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{Direction, DomainSpec};
use crate::harmonics::SphereQuadrature;
use crate::polyalg::{polyfit, UniPoly};
use crate::quadrature::chebyshev_lobatto;
use crate::sectioning::{section_area, SectionFrame};
use crate::{Error, Result};

/// `c` in `1 = c ∫ d^2/dt^2 A(xi, <xi, x>) dxi` for `n = 3`, fixed by the
/// unit ball: `A = π(1 - t^2)`, `A'' = -2π`, `∫ = -8π^2`.
pub const INVERSION_CONSTANT_3D: f64 = -1.0 / (8.0 * PI * PI);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionOptions {
    pub quad_level: usize,
    /// Chebyshev sample points per direction.
    pub fit_nodes: usize,
    pub max_degree: usize,
    /// Fraction of the support width trimmed at each end before fitting.
    pub shrink: f64,
}

impl Default for InversionOptions {
    fn default() -> Self {
        InversionOptions {
            quad_level: 40,
            fit_nodes: 41,
            max_degree: 12,
            shrink: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResidual {
    pub point: Vec<f64>,
    /// `c ∫ A''(xi, <xi, x>) dxi`, ideally 1.
    pub reconstruction: f64,
    /// `∫ A''''(xi, <xi, x>) dxi`, ideally 0.
    pub identity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InversionReport {
    pub probes: Vec<ProbeResidual>,
    pub max_reconstruction_error: f64,
    pub max_identity: f64,
}

/// Second and fourth `t`-derivatives of a polynomial fit of `A(xi, ·)`.
fn derivative_fits(d: &DomainSpec, xi: &Direction, opts: &InversionOptions) -> Result<(UniPoly, UniPoly)> {
    let (h_minus, h_plus, frame) = if d.is_star() {
        let f = SectionFrame::new(d, xi)?;
        (f.h_minus, f.h_plus, Some(f))
    } else {
        let s = d.support_interval(xi)?;
        (s.h_minus, s.h_plus, None)
    };
    let w = h_plus - h_minus;
    let ts = chebyshev_lobatto(opts.fit_nodes, h_minus + opts.shrink * w, h_plus - opts.shrink * w);
    let samples = ts
        .iter()
        .map(|&t| {
            let a = match &frame {
                Some(f) => f.area(d, t)?,
                None => section_area(d, xi, t)?,
            };
            Ok((t, a))
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = polyfit(&samples, opts.max_degree)?;
    Ok((fit.poly.nth_derivative(2), fit.poly.nth_derivative(4)))
}

/// Order-2 reconstruction of `χ_D` and the order-5 identity at interior probes.
pub fn radon_inversion_check(d: &DomainSpec, probes: &[Vec<f64>], opts: &InversionOptions) -> Result<InversionReport> {
    if d.dim() != 3 {
        return Err(Error::invalid("Radon inversion check is implemented for n = 3"));
    }
    for p in probes {
        if p.len() != 3 || !d.contains(p) {
            return Err(Error::invalid(format!("probe {p:?} is not an interior point")));
        }
    }
    let quad = SphereQuadrature::new(opts.quad_level)?;
    let fits = quad
        .nodes
        .par_iter()
        .map(|xi| derivative_fits(d, xi, opts))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(probes.len());
    for p in probes {
        let (mut rec, mut ident) = (0.0, 0.0);
        for ((xi, w), (d2, d4)) in quad.nodes.iter().zip(&quad.weights).zip(&fits) {
            let t = xi.dot(p);
            rec += w * d2.eval_re(t);
            ident += w * d4.eval_re(t);
        }
        out.push(ProbeResidual {
            point: p.clone(),
            reconstruction: INVERSION_CONSTANT_3D * rec,
            identity: ident,
        });
    }
    Ok(InversionReport {
        max_reconstruction_error: out.iter().map(|r| (r.reconstruction - 1.0).abs()).fold(0.0, f64::max),
        max_identity: out.iter().map(|r| r.identity.abs()).fold(0.0, f64::max),
        probes: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_center_reconstructs_one() {
        let b = DomainSpec::unit_ball(3).unwrap();
        let opts = InversionOptions {
            quad_level: 8,
            ..Default::default()
        };
        let rep = radon_inversion_check(&b, &[vec![0.0; 3], vec![0.3, -0.2, 0.1]], &opts).unwrap();
        assert!(rep.max_reconstruction_error < 1e-10, "{rep:?}");
        assert!(rep.max_identity < 1e-10);
    }

    #[test]
    fn exterior_probe_is_rejected() {
        let b = DomainSpec::unit_ball(3).unwrap();
        assert!(radon_inversion_check(&b, &[vec![2.0, 0.0, 0.0]], &InversionOptions::default()).is_err());
    }
}
