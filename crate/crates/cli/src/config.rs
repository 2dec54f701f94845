//! JSON run configuration.

use std::path::Path;

use cutvol_core::continuation::{PathSpec, Segment};
use cutvol_core::domains::DomainDoc;
use cutvol_core::{BiPoly, Complex64, Direction, DomainSpec};
use serde::Deserialize;

/// Upper limits for command parameters.
pub const MAX_K: usize = 12;
pub const MAX_T_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub domain: Option<DomainDoc>,
    #[serde(default)]
    pub command: CommandParams,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandParams {
    pub k_max: Option<usize>,
    /// Number of spiral directions (the coordinate axes are added).
    pub directions: Option<usize>,
    pub t_samples: Option<usize>,
    pub tol: Option<f64>,
    /// Explicit directions (normalized on load).
    pub xi: Option<Vec<Vec<f64>>>,
    /// Common `t` range for `section`; defaults to each direction's support.
    pub t_range: Option<[f64; 2]>,
    pub quad_level: Option<usize>,
    /// Explicit probe points for `invert`.
    pub probe_points: Option<Vec<Vec<f64>>>,
    /// Number of random interior probes for `invert` when no points are given.
    pub probes: Option<usize>,
    /// `bipoly[i][k] = [re, im]`: coefficient of `w^i z^k`.
    pub bipoly: Option<Vec<Vec<[f64; 2]>>>,
    pub path: Option<PathDoc>,
    pub germ: Option<GermDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PathDoc {
    Circle {
        center: [f64; 2],
        radius: f64,
        #[serde(default)]
        start_angle: f64,
    },
    Polyline {
        vertices: Vec<[f64; 2]>,
        #[serde(default)]
        closed: bool,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermDoc {
    pub z: [f64; 2],
    pub w: [f64; 2],
    /// Enclosing radius; computed from the resultant when absent.
    pub radius: Option<f64>,
}

/// Configuration problems (exit code 1).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| ConfigError(format!("bad config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.command;
        if c.k_max.is_some_and(|k| k > MAX_K) {
            return Err(ConfigError(format!("k_max must be <= {MAX_K}")));
        }
        if c.t_samples.is_some_and(|t| !(2..=MAX_T_SAMPLES).contains(&t)) {
            return Err(ConfigError(format!("t_samples must be in 2..={MAX_T_SAMPLES}")));
        }
        if c.tol.is_some_and(|t| !(t > 0.0 && t < 1.0)) {
            return Err(ConfigError("tol must be in (0, 1)".into()));
        }
        if c.directions.is_some_and(|d| d == 0 || d > 10_000) {
            return Err(ConfigError("directions must be in 1..=10000".into()));
        }
        if self.threads == Some(0) {
            return Err(ConfigError("threads must be >= 1".into()));
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<DomainSpec, ConfigError> {
        self.domain
            .as_ref()
            .ok_or_else(|| ConfigError("config has no \"domain\" block".into()))?
            .to_domain()
            .map_err(|e| ConfigError(format!("invalid domain: {e}")))
    }

    pub fn directions(&self, dim: usize) -> Result<Option<Vec<Direction>>, ConfigError> {
        let Some(xs) = &self.command.xi else {
            return Ok(None);
        };
        xs.iter()
            .map(|v| {
                if v.len() != dim {
                    return Err(ConfigError(format!("direction {v:?} does not have dimension {dim}")));
                }
                Direction::new(v.clone()).map_err(|e| ConfigError(format!("bad direction: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn bipoly(&self) -> Result<BiPoly, ConfigError> {
        let rows = self
            .command
            .bipoly
            .as_ref()
            .ok_or_else(|| ConfigError("continue needs command.bipoly".into()))?;
        let q = rows.iter().map(|r| r.iter().map(|&p| cx(p)).collect()).collect();
        BiPoly::new(q).map_err(|e| ConfigError(format!("invalid bipoly: {e}")))
    }

    pub fn path(&self) -> Result<PathSpec, ConfigError> {
        let doc = self
            .command
            .path
            .as_ref()
            .ok_or_else(|| ConfigError("continue needs command.path".into()))?;
        let p = match doc {
            PathDoc::Circle {
                center,
                radius,
                start_angle,
            } => PathSpec::new(
                vec![Segment::Arc {
                    center: cx(*center),
                    radius: *radius,
                    start: *start_angle,
                    sweep: 2.0 * std::f64::consts::PI,
                }],
                true,
            ),
            PathDoc::Polyline { vertices, closed } => {
                let v: Vec<Complex64> = vertices.iter().map(|&p| cx(p)).collect();
                PathSpec::polyline(&v, *closed)
            }
        };
        p.map_err(|e| ConfigError(format!("invalid path: {e}")))
    }

    pub fn germ(&self) -> Option<(Complex64, Complex64, Option<f64>)> {
        self.command.germ.as_ref().map(|g| (cx(g.z), cx(g.w), g.radius))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ball_config() {
        let cfg = RunConfig::parse(
            r#"{"domain": {"dimension": 3, "type": "ball", "radius": 2.0},
                "command": {"k_max": 4, "t_samples": 21}, "seed": 7}"#,
        )
        .unwrap();
        assert_eq!(cfg.seed, Some(7));
        assert!((cfg.domain().unwrap().volume().unwrap() - 32.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(RunConfig::parse(r#"{"command": {"k_max": 13}}"#).is_err());
        assert!(RunConfig::parse(r#"{"command": {"t_samples": 20000}}"#).is_err());
        assert!(RunConfig::parse(r#"{"command": {"bogus": 1}}"#).is_err());
    }

    #[test]
    fn parses_bipoly_and_paths() {
        let cfg = RunConfig::parse(
            r#"{"command": {"bipoly": [[[0,0],[-1,0]], [], [[1,0]]],
                            "path": {"type": "circle", "center": [0,0], "radius": 1}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.bipoly().unwrap().deg_w(), 2);
        assert!(cfg.path().unwrap().is_closed());
    }
}
