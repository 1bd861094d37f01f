//! TOML experiment configuration. The grammar is documented in
//! `docs/config.md`.

use std::collections::BTreeMap;
use std::path::Path;

use ou_brunn_core::ConvexBody;
use serde::Deserialize;
use thiserror::Error;

use crate::literal::{parse_body, LiteralError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error("config: {0}")]
    Invalid(String),
    #[error("config has no [{0}] section")]
    MissingSection(&'static str),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Named body literals; sections refer to bodies by name or by literal.
    #[serde(default)]
    pub bodies: BTreeMap<String, String>,
    pub eigen: Option<EigenConfig>,
    pub bm_sweep: Option<PairsConfig>,
    pub supconv: Option<SupconvConfig>,
    pub faber_krahn: Option<FaberKrahnConfig>,
    pub urysohn: Option<UrysohnConfig>,
    pub logconc: Option<LogconcConfig>,
    pub equality_probe: Option<EqualityConfig>,
    pub matrix_lemma: Option<MatrixConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct SolverConfig {
    pub h_1d: Vec<f64>,
    pub h_2d: Vec<f64>,
    pub tol: f64,
    pub safety: f64,
    pub min_order: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { h_1d: vec![0.02, 0.01, 0.005], h_2d: vec![0.08, 0.04, 0.02], tol: 1e-10, safety: 2.0, min_order: 1.0 }
    }
}

impl SolverConfig {
    pub fn h_seq(&self, dim: usize) -> &[f64] {
        if dim == 1 {
            &self.h_1d
        } else {
            &self.h_2d
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct HalflineAnchor {
    pub a: f64,
    pub truncation: f64,
    pub expected: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EigenConfig {
    pub bodies: Vec<String>,
    #[serde(default = "d_oracle_1d")]
    pub oracle_rel_tol_1d: f64,
    #[serde(default = "d_oracle_2d")]
    pub oracle_rel_tol_2d: f64,
    /// Smallest accepted ratio of successive oracle errors.
    #[serde(default = "d_error_ratio")]
    pub min_error_ratio: f64,
    /// Expected order in 1D and its allowed deviation.
    #[serde(default = "d_order_1d")]
    pub order_1d: [f64; 2],
    #[serde(default)]
    pub halfline: Vec<HalflineAnchor>,
    /// Write `eigenfunction_<case>.csv` for every body.
    #[serde(default)]
    pub dump: bool,
}

fn d_oracle_1d() -> f64 {
    1e-3
}
fn d_oracle_2d() -> f64 {
    1e-2
}
fn d_error_ratio() -> f64 {
    1.8
}
fn d_order_1d() -> [f64; 2] {
    [2.0, 0.2]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PairsConfig {
    pub pairs: Vec<[String; 2]>,
    pub t: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SupconvConfig {
    pub pairs: Vec<[String; 2]>,
    pub t: Vec<f64>,
    /// Spacing of the coarse 1D grids where the fast transform is compared
    /// with the direct maximisation.
    #[serde(default = "d_oracle_h")]
    pub oracle_h: f64,
    #[serde(default = "d_oracle_t")]
    pub oracle_t: Vec<f64>,
    #[serde(default = "d_oracle_1d")]
    pub oracle_rel_tol: f64,
}

fn d_oracle_h() -> f64 {
    0.05
}
fn d_oracle_t() -> Vec<f64> {
    vec![0.5]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FaberKrahnConfig {
    pub bodies: Vec<String>,
    #[serde(default = "d_resolution")]
    pub resolution: f64,
    #[serde(default = "d_truncation")]
    pub truncation: f64,
}

fn d_resolution() -> f64 {
    0.005
}
fn d_truncation() -> f64 {
    8.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct UrysohnConfig {
    pub bodies: Vec<String>,
    #[serde(default = "d_rotations")]
    pub m: Vec<usize>,
    /// Required `d(last m) / d(first m)` for the Hausdorff distance to the ball.
    #[serde(default = "d_hausdorff_ratio")]
    pub hausdorff_ratio: f64,
}

fn d_rotations() -> Vec<usize> {
    vec![1, 2, 4, 8, 16]
}
fn d_hausdorff_ratio() -> f64 {
    0.25
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct LogconcConfig {
    pub bodies: Vec<String>,
    #[serde(default = "d_tau")]
    pub tau: f64,
    /// Core fraction for the Hessian of `−ln u`.
    #[serde(default = "d_hessian_tau")]
    pub hessian_tau: f64,
    /// Core fraction for the conjugate-Hessian comparison.
    #[serde(default = "d_conjugate_tau")]
    pub conjugate_tau: f64,
    /// Midpoint tolerance is this times `h²`.
    #[serde(default = "d_midpoint_factor")]
    pub midpoint_tol_factor: f64,
    #[serde(default = "d_star_tol")]
    pub star_tol: f64,
    #[serde(default = "d_max_pairs")]
    pub max_pairs: usize,
}

fn d_tau() -> f64 {
    0.01
}
fn d_hessian_tau() -> f64 {
    0.1
}
fn d_conjugate_tau() -> f64 {
    0.5
}
fn d_midpoint_factor() -> f64 {
    10.0
}
fn d_star_tol() -> f64 {
    1e-9
}
fn d_max_pairs() -> usize {
    ou_brunn_core::concavity::MAX_PAIRS
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Translate {
    pub body: String,
    pub shift: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct EqualityConfig {
    #[serde(default)]
    pub pairs: Vec<[String; 2]>,
    #[serde(default)]
    pub translates: Vec<Translate>,
    #[serde(default = "d_half")]
    pub t: f64,
    /// Hausdorff distance from which distinct symmetric pairs must show a gap.
    #[serde(default = "d_min_distance")]
    pub min_distance: f64,
    /// Required deficit in units of the combined budget.
    #[serde(default = "d_gap_factor")]
    pub gap_factor: f64,
}

fn d_half() -> f64 {
    0.5
}
fn d_min_distance() -> f64 {
    0.1
}
fn d_gap_factor() -> f64 {
    3.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MatrixConfig {
    #[serde(default = "d_samples")]
    pub samples: usize,
    #[serde(default = "d_max_dim")]
    pub max_dim: usize,
    #[serde(default = "d_matrix_tol")]
    pub tol: f64,
}

fn d_samples() -> usize {
    1000
}
fn d_max_dim() -> usize {
    5
}
fn d_matrix_tol() -> f64 {
    1e-12
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// A body by name from `[bodies]`, or else parsed as a literal.
    pub fn body(&self, key: &str) -> Result<ConvexBody, ConfigError> {
        let lit = self.bodies.get(key).map_or(key, String::as_str);
        Ok(parse_body(lit)?)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.solver;
        for (name, seq) in [("h-1d", &s.h_1d), ("h-2d", &s.h_2d)] {
            if seq.len() < 3 {
                return invalid(format!("solver.{name} needs at least three spacings"));
            }
            if seq.iter().any(|h| !(h.is_finite() && *h > 0.0)) || seq.windows(2).any(|w| w[1] >= w[0]) {
                return invalid(format!("solver.{name} must be positive and strictly decreasing"));
            }
        }
        if s.tol.is_nan() || s.tol <= 0.0 || s.safety.is_nan() || s.safety < 2.0 {
            return invalid("solver.tol must be positive and solver.safety at least 2");
        }
        for lit in self.bodies.values() {
            parse_body(lit)?;
        }
        let ts = |name: &str, t: &[f64]| -> Result<(), ConfigError> {
            if t.is_empty() || t.iter().any(|t| !(0.0..=1.0).contains(t)) {
                return invalid(format!("{name}: t-values must be nonempty and lie in [0, 1]"));
            }
            Ok(())
        };
        let same_dim = |name: &str, pairs: &[[String; 2]]| -> Result<(), ConfigError> {
            for [a, b] in pairs {
                if self.body(a)?.dim() != self.body(b)?.dim() {
                    return invalid(format!("{name}: pair ({a}, {b}) mixes dimensions"));
                }
            }
            Ok(())
        };
        let all = |keys: &[String]| -> Result<(), ConfigError> { keys.iter().try_for_each(|k| self.body(k).map(drop)) };
        if let Some(c) = &self.eigen {
            all(&c.bodies)?;
        }
        if let Some(c) = &self.bm_sweep {
            ts("bm-sweep", &c.t)?;
            same_dim("bm-sweep", &c.pairs)?;
            if c.pairs.is_empty() {
                return invalid("bm-sweep needs at least one pair");
            }
        }
        if let Some(c) = &self.supconv {
            ts("supconv", &c.t)?;
            ts("supconv oracle", &c.oracle_t)?;
            same_dim("supconv", &c.pairs)?;
        }
        if let Some(c) = &self.faber_krahn {
            all(&c.bodies)?;
        }
        if let Some(c) = &self.urysohn {
            all(&c.bodies)?;
            for k in &c.bodies {
                if self.body(k)?.dim() != 2 {
                    return invalid(format!("urysohn: `{k}` is not planar"));
                }
            }
            if c.m.is_empty() || c.m.contains(&0) {
                return invalid("urysohn: rotation counts must be positive");
            }
        }
        if let Some(c) = &self.logconc {
            all(&c.bodies)?;
            for tau in [c.tau, c.hessian_tau, c.conjugate_tau] {
                if !(0.0..1.0).contains(&tau) {
                    return invalid("logconc: core fractions must lie in [0, 1)");
                }
            }
        }
        if let Some(c) = &self.equality_probe {
            ts("equality-probe", &[c.t])?;
            same_dim("equality-probe", &c.pairs)?;
            for tr in &c.translates {
                if self.body(&tr.body)?.dim() != tr.shift.len() {
                    return invalid(format!("equality-probe: shift of `{}` has the wrong length", tr.body));
                }
            }
        }
        if let Some(c) = &self.matrix_lemma {
            if c.max_dim == 0 || c.samples == 0 {
                return invalid("matrix-lemma: samples and max-dim must be positive");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let cfg = Config::parse("seed = 3\n[bodies]\ndisk = \"ball{1}\"\n[logconc]\nbodies = [\"disk\", \"interval{-1,1}\"]\n").unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.solver.h_2d, vec![0.08, 0.04, 0.02]);
        assert_eq!(cfg.logconc.as_ref().unwrap().tau, 0.01);
        assert_eq!(cfg.body("disk").unwrap(), ConvexBody::ball(1.0, [0.0, 0.0]).unwrap());
        assert!(cfg.body("interval{-1,1}").is_ok());
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Config::parse("[bm-sweep]\npairs = [[\"ball{1}\", \"ball{2}\"]]\nt = [1.5]\n").is_err());
        assert!(Config::parse("[bm-sweep]\npairs = [[\"ball{1}\", \"interval{-1,1}\"]]\nt = [0.5]\n").is_err());
        assert!(Config::parse("[solver]\nh-2d = [0.02, 0.04, 0.08]\n").is_err());
        assert!(Config::parse("[eigen]\nbodies = [\"blob{1}\"]\n").is_err());
        assert!(Config::parse("unknown = 1\n").is_err());
    }
}
