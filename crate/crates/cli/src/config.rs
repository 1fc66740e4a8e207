use std::path::Path;

use anyhow::{bail, Context, Result};
use mapforest::boltzmann::{Conditioning, FamilySpec, DEFAULT_BUDGET};
use mapforest::DegreeSequence;
use serde::{Deserialize, Serialize};

/// Which random maps to draw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    /// `n` inner faces, all of degree `2q`.
    Angulation { q: u64 },
    /// Inner faces of degree `2k` in proportion `weight`; counts are
    /// rounded and at least one face is kept.
    Profile { weights: Vec<(u64, f64)> },
    /// Boltzmann map with a given offspring family, conditioned on size.
    Boltzmann {
        law: FamilySpec,
        #[serde(default = "default_conditioning")]
        conditioning: Conditioning,
    },
}

fn default_conditioning() -> Conditioning {
    Conditioning::Faces
}

/// Boundary half-length as a function of `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RhoRule {
    Constant { value: u64 },
    /// `round(c σ_n)`, at least 1. Boltzmann models use `c n^{1/2}`.
    Sigma { c: f64 },
    /// `round(n^γ)`, at least 1.
    Power { gamma: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Double-sweep lower bound on the diameter.
    Diameter,
    /// `d(★, U)` and `d(X, Y)` for uniform vertices.
    TwoPoint,
    /// Rescaled label process on a fixed time grid.
    Labels,
    /// KS distance of the rescaled label marginal to a continuum snapshot.
    LabelKs,
    /// Jump counts and order statistics of the coding walk.
    Jumps,
}

/// Test hooks that corrupt an otherwise valid run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Shift the label of one leaf after the map is built.
    LabelCorruption,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub sizes: Vec<u64>,
    #[serde(default = "default_rho")]
    pub rho: RhoRule,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    /// Overridden by `--seed`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_statistics")]
    pub statistics: Vec<Statistic>,
    /// Vertex pairs per instance for distance statistics and cactus checks.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Time grid for label traces.
    #[serde(default = "default_grid")]
    pub label_grid: usize,
    #[serde(default)]
    pub inject: Option<Fault>,
}

fn default_rho() -> RhoRule {
    RhoRule::Constant { value: 1 }
}
fn default_replicas() -> usize {
    1
}
fn default_statistics() -> Vec<Statistic> {
    vec![Statistic::Diameter, Statistic::TwoPoint]
}
fn default_pairs() -> usize {
    100
}
fn default_budget() -> u64 {
    DEFAULT_BUDGET
}
fn default_grid() -> usize {
    20
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).context("parsing config")?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            bail!("sizes must not be empty");
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            bail!("sizes must be strictly increasing");
        }
        if self.sizes[0] == 0 {
            bail!("sizes must be positive");
        }
        if self.replicas == 0 {
            bail!("replicas must be at least 1");
        }
        if self.label_grid == 0 {
            bail!("label_grid must be positive");
        }
        if let ModelSpec::Profile { weights } = &self.model {
            if weights.is_empty() || weights.iter().any(|&(k, w)| k == 0 || !(w > 0.0)) {
                bail!("profile weights need k ≥ 1 and positive weights");
            }
        }
        match self.rho {
            RhoRule::Sigma { c } if !(c > 0.0) => bail!("sigma multiple must be positive"),
            RhoRule::Power { gamma } if !(gamma >= 0.0) => bail!("power must be non-negative"),
            RhoRule::Constant { value: 0 } => bail!("rho must be at least 1"),
            _ => Ok(()),
        }
    }

    /// Degree sequence with boundary `ρ` for a prescribed-degree model.
    pub fn degrees(&self, n: u64) -> Result<Option<DegreeSequence>> {
        let counts: Vec<(u64, u64)> = match &self.model {
            ModelSpec::Angulation { q } => vec![(*q, n)],
            ModelSpec::Profile { weights } => {
                let total: f64 = weights.iter().map(|w| w.1).sum();
                let mut c: Vec<(u64, u64)> =
                    weights.iter().map(|&(k, w)| (k, (w / total * n as f64).round() as u64)).collect();
                if c.iter().all(|x| x.1 == 0) {
                    c[0].1 = 1;
                }
                c
            }
            ModelSpec::Boltzmann { .. } => return Ok(None),
        };
        let d = DegreeSequence::new(counts, 1)?;
        let rho = self.rho_for(n, d.stats()?.sigma());
        Ok(Some(d.with_rho(rho)?))
    }

    pub fn rho_for(&self, n: u64, sigma: f64) -> u64 {
        let r = match self.rho {
            RhoRule::Constant { value } => return value,
            RhoRule::Sigma { c } => c * sigma,
            RhoRule::Power { gamma } => (n as f64).powf(gamma),
        };
        (r.round() as u64).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let c = ExperimentConfig::from_json(r#"{"model": {"type": "angulation", "q": 2}, "sizes": [10, 20]}"#).unwrap();
        assert_eq!(c.replicas, 1);
        assert_eq!(c.rho, RhoRule::Constant { value: 1 });
        let d = c.degrees(10).unwrap().unwrap();
        assert_eq!(d.count(2), 10);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            r#"{"model": {"type": "angulation", "q": 2}, "sizes": [20, 10]}"#,
            r#"{"model": {"type": "angulation", "q": 2}, "sizes": [10], "replicas": 0}"#,
            r#"{"model": {"type": "angulation", "q": 2}, "sizes": []}"#,
            r#"{"model": {"type": "angulation", "q": 2}, "sizes": [10], "colour": 1}"#,
            r#"{"model": {"type": "profile", "weights": []}, "sizes": [10]}"#,
        ] {
            assert!(ExperimentConfig::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn rho_rules() {
        let mut c = ExperimentConfig::from_json(r#"{"model": {"type": "angulation", "q": 2}, "sizes": [100]}"#).unwrap();
        c.rho = RhoRule::Sigma { c: 1.0 };
        let d = c.degrees(100).unwrap().unwrap();
        assert_eq!(d.rho(), (200f64).sqrt().round() as u64);
        c.rho = RhoRule::Power { gamma: 0.5 };
        assert_eq!(c.rho_for(100, 0.0), 10);
        c.rho = RhoRule::Power { gamma: 0.0 };
        assert_eq!(c.rho_for(100, 0.0), 1);
    }

    #[test]
    fn boltzmann_config() {
        let c = ExperimentConfig::from_json(
            r#"{"model": {"type": "boltzmann", "law": {"family": "cauchy_loc", "c": null}}, "sizes": [1000]}"#,
        )
        .unwrap();
        assert!(c.degrees(1000).unwrap().is_none());
        assert!(matches!(c.model, ModelSpec::Boltzmann { conditioning: Conditioning::Faces, .. }));
    }
}
