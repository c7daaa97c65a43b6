//! Experiment configuration: a single versioned JSON schema shared by every
//! command. A config names the domain, the flux (and optionally a comparison
//! flux), the grid spacing, the horizon, and the piecewise-constant data;
//! command-specific knobs (time grid size, seed, entropy sample count) ride
//! along with defaults so one file drives any subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flux::SpaceTimeFlux;
use crate::interval::Interval;
use crate::stepfn::StepFunction;
use crate::tracker::{Domain, Problem};

/// Current config schema version. Files carrying any other value are
/// rejected so stale configs fail loudly instead of being misread.
pub const SCHEMA_VERSION: u32 = 1;

/// Spatial domain selector as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainConfig {
    HalfLine,
    Segment { length: f64 },
}

impl DomainConfig {
    pub fn to_domain(self) -> Domain {
        match self {
            DomainConfig::HalfLine => Domain::HalfLine,
            DomainConfig::Segment { length } => Domain::Segment { length },
        }
    }
}

/// A scalar or a list, so sweeps and single runs share one schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Copy> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

fn default_time_samples() -> usize {
    20
}

fn default_entropy_samples() -> usize {
    64
}

/// One experiment: data, flux, discretisation, and run options.
///
/// Piecewise-constant data are written as sorted `[breakpoint, value]`
/// pairs; each pair opens the piece `[breakpoint, next breakpoint)` and the
/// first breakpoint must be the left end of the axis (0 for both space and
/// time). Flux coefficients form a dense matrix: `flux[j][k]` multiplies
/// `t^j * u^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub domain: DomainConfig,
    pub flux: Vec<Vec<f64>>,
    /// Comparison flux for stability runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux_g: Option<Vec<Vec<f64>>>,
    pub epsilon: OneOrMany<f64>,
    pub horizon: f64,
    /// Time-splitting depth(s); required once any flux depends on t.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<OneOrMany<u32>>,
    pub initial: Vec<(f64, f64)>,
    pub left_boundary: Vec<(f64, f64)>,
    /// Required iff the domain is a segment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_boundary: Option<Vec<(f64, f64)>>,
    /// Number of sample times for comparison and consistency studies.
    #[serde(default = "default_time_samples")]
    pub time_samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Entropy spot checks per verification run.
    #[serde(default = "default_entropy_samples")]
    pub entropy_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

fn cfg_err(msg: String) -> Error {
    Error::Config(msg)
}

fn check_matrix(field: &str, coeffs: &[Vec<f64>]) -> Result<()> {
    if coeffs.is_empty() || coeffs.iter().all(|row| row.is_empty()) {
        return Err(cfg_err(format!("{field}: coefficient matrix is empty")));
    }
    for (j, row) in coeffs.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            if !c.is_finite() {
                return Err(cfg_err(format!("{field}[{j}][{k}]: {c} is not finite")));
            }
        }
    }
    Ok(())
}

fn check_pairs(field: &str, pairs: &[(f64, f64)], axis_start: f64) -> Result<()> {
    if pairs.is_empty() {
        return Err(cfg_err(format!("{field}: needs at least one [breakpoint, value] pair")));
    }
    if pairs[0].0 != axis_start {
        return Err(cfg_err(format!(
            "{field}[0]: first breakpoint must be {axis_start}, got {}",
            pairs[0].0
        )));
    }
    for (i, (x, v)) in pairs.iter().enumerate() {
        if !x.is_finite() {
            return Err(cfg_err(format!("{field}[{i}]: breakpoint {x} is not finite")));
        }
        if !v.is_finite() {
            return Err(cfg_err(format!("{field}[{i}]: value {v} is not finite")));
        }
        if i > 0 && *x <= pairs[i - 1].0 {
            return Err(cfg_err(format!(
                "{field}[{i}]: breakpoints must be strictly increasing ({} then {x})",
                pairs[i - 1].0
            )));
        }
    }
    Ok(())
}

fn pairs_to_step(pairs: &[(f64, f64)], domain: Interval) -> Result<StepFunction> {
    let breaks = pairs[1..].iter().map(|p| p.0).collect();
    let values = pairs.iter().map(|p| p.1).collect();
    StepFunction::new(domain, breaks, values)
}

impl ExperimentConfig {
    /// Parse a config file; JSON syntax errors keep their line and column.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(cfg_err(format!(
                "schema_version: expected {SCHEMA_VERSION}, got {}",
                self.schema_version
            )));
        }
        if let DomainConfig::Segment { length } = self.domain {
            if !(length.is_finite() && length > 0.0) {
                return Err(cfg_err(format!("domain.length: must be positive, got {length}")));
            }
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(cfg_err(format!("horizon: must be positive, got {}", self.horizon)));
        }
        check_matrix("flux", &self.flux)?;
        if let Some(g) = &self.flux_g {
            check_matrix("flux_g", g)?;
        }
        let eps_list = self.epsilon.to_vec();
        if eps_list.is_empty() {
            return Err(cfg_err("epsilon: list is empty".into()));
        }
        for (i, e) in eps_list.iter().enumerate() {
            if !(e.is_finite() && *e > 0.0) {
                return Err(cfg_err(format!("epsilon[{i}]: must be positive, got {e}")));
            }
        }
        if let Some(d) = &self.depth {
            if d.to_vec().is_empty() {
                return Err(cfg_err("depth: list is empty".into()));
            }
        }
        let time_dependent = SpaceTimeFlux::new(self.flux.clone())?.deg_t() > 0
            || match &self.flux_g {
                Some(g) => SpaceTimeFlux::new(g.clone())?.deg_t() > 0,
                None => false,
            };
        if time_dependent && self.depth.is_none() {
            return Err(cfg_err(
                "depth: required because the flux depends on t".into(),
            ));
        }
        check_pairs("initial", &self.initial, 0.0)?;
        check_pairs("left_boundary", &self.left_boundary, 0.0)?;
        match (&self.right_boundary, self.domain) {
            (Some(rb), DomainConfig::Segment { .. }) => check_pairs("right_boundary", rb, 0.0)?,
            (Some(_), DomainConfig::HalfLine) => {
                return Err(cfg_err(
                    "right_boundary: only valid on a segment domain".into(),
                ))
            }
            (None, DomainConfig::Segment { .. }) => {
                return Err(cfg_err(
                    "right_boundary: required on a segment domain".into(),
                ))
            }
            (None, DomainConfig::HalfLine) => {}
        }
        for (field, pairs) in [
            ("initial", &self.initial),
            ("left_boundary", &self.left_boundary),
        ] {
            let axis_end = if field == "initial" {
                self.domain.to_domain().length().unwrap_or(f64::INFINITY)
            } else {
                self.horizon
            };
            if let Some((x, _)) = pairs.iter().find(|(x, _)| *x >= axis_end && *x > 0.0) {
                return Err(cfg_err(format!(
                    "{field}: breakpoint {x} is not inside the axis (end {axis_end})"
                )));
            }
        }
        if let Some(rb) = &self.right_boundary {
            if let Some((x, _)) = rb.iter().find(|(x, _)| *x >= self.horizon && *x > 0.0) {
                return Err(cfg_err(format!(
                    "right_boundary: breakpoint {x} is not inside the axis (end {})",
                    self.horizon
                )));
            }
        }
        if self.time_samples < 2 {
            return Err(cfg_err(format!(
                "time_samples: need at least 2, got {}",
                self.time_samples
            )));
        }
        if self.entropy_samples == 0 {
            return Err(cfg_err("entropy_samples: must be positive".into()));
        }
        Ok(())
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.epsilon.to_vec()
    }

    /// Splitting depths to run; `[0]` when none are configured (autonomous).
    pub fn depths(&self) -> Vec<u32> {
        self.depth.as_ref().map_or(vec![0], |d| d.to_vec())
    }

    fn build_problem(&self, coeffs: &[Vec<f64>], eps: f64) -> Result<Problem> {
        let domain = self.domain.to_domain();
        let tdom = Interval::new(0.0, self.horizon)?;
        let problem = Problem {
            domain,
            flux: SpaceTimeFlux::new(coeffs.to_vec())?,
            initial: pairs_to_step(&self.initial, domain.interval())?,
            left_boundary: pairs_to_step(&self.left_boundary, tdom)?,
            right_boundary: match &self.right_boundary {
                Some(rb) => Some(pairs_to_step(rb, tdom)?),
                None => None,
            },
            horizon: self.horizon,
            eps,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// The problem for the primary flux at the given spacing.
    pub fn problem(&self, eps: f64) -> Result<Problem> {
        self.build_problem(&self.flux, eps)
    }

    /// The same data driven by the comparison flux.
    pub fn problem_g(&self, eps: f64) -> Result<Problem> {
        let g = self
            .flux_g
            .as_ref()
            .ok_or_else(|| cfg_err("flux_g: required for flux comparison".into()))?;
        self.build_problem(g, eps)
    }

    /// Evenly spaced sample times `(0, horizon]` for comparison studies.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.time_samples;
        (1..=n)
            .map(|i| self.horizon * i as f64 / n as f64)
            .collect()
    }
}
