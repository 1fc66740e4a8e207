//! Degree sequences: how many inner faces of each half-degree a map has,
//! together with the half boundary length.
//!
//! Under the forest bijection the same data reads as "how many vertices of
//! each out-degree, and how many trees".

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse degree sequence: `counts[k]` inner faces of degree `2k` (k ≥ 1)
/// and a boundary of length `2 * rho`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDegrees", into = "RawDegrees")]
pub struct DegreeSequence {
    counts: BTreeMap<u64, u64>,
    rho: u64,
}

#[derive(Serialize, Deserialize)]
struct RawDegrees {
    rho: u64,
    counts: BTreeMap<u64, u64>,
}

impl TryFrom<RawDegrees> for DegreeSequence {
    type Error = Error;
    fn try_from(raw: RawDegrees) -> Result<Self> {
        DegreeSequence::build(raw.counts, raw.rho, true)
    }
}

impl From<DegreeSequence> for RawDegrees {
    fn from(d: DegreeSequence) -> Self {
        RawDegrees { rho: d.rho, counts: d.counts }
    }
}

/// Integer statistics derived from a degree sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    /// Number of inner faces, `Σ_{k≥1} d(k)`.
    pub faces: u128,
    /// `Σ k(k-1) d(k)`.
    pub sigma2: u128,
    /// Number of edges, `Σ k d(k)`.
    pub eps: u128,
    /// Leaves of the forest, `rho + Σ (k-1) d(k)`; also the map vertices other
    /// than the distinguished one.
    pub leaves: u128,
    /// Forest vertices, `eps + rho`.
    pub upsilon: u128,
    /// Largest half-degree, 0 for the empty sequence.
    pub delta: u64,
}

impl Stats {
    pub fn sigma(&self) -> f64 {
        (self.sigma2 as f64).sqrt()
    }

    /// Map vertices including the distinguished one.
    pub fn vertices(&self) -> u128 {
        self.leaves + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactors {
    /// `(sigma + rho)^{-1/2}`.
    pub label_scale: f64,
    /// `(3 / (2 sigma))^{1/2}`.
    pub dist_scale_disk: f64,
    /// `(2 rho)^{-1/2}`.
    pub dist_scale_crt: f64,
}

impl DegreeSequence {
    /// Non-empty degree sequence. Zero counts are dropped.
    pub fn new<I: IntoIterator<Item = (u64, u64)>>(counts: I, rho: u64) -> Result<Self> {
        Self::build(counts.into_iter().collect(), rho, false)
    }

    /// The sequence with no inner face: a forest of `rho` isolated roots.
    pub fn empty(rho: u64) -> Result<Self> {
        Self::build(BTreeMap::new(), rho, true)
    }

    /// All `n` inner faces of degree `2q`.
    pub fn angulation(q: u64, n: u64, rho: u64) -> Result<Self> {
        Self::new([(q, n)], rho)
    }

    fn build(counts: BTreeMap<u64, u64>, rho: u64, allow_empty: bool) -> Result<Self> {
        if rho == 0 {
            return Err(Error::InvalidDegrees("rho must be at least 1".into()));
        }
        if counts.contains_key(&0) {
            return Err(Error::InvalidDegrees(
                "half-degrees start at 1; leaves are derived, not given".into(),
            ));
        }
        let counts: BTreeMap<u64, u64> = counts.into_iter().filter(|&(_, c)| c > 0).collect();
        if counts.is_empty() && !allow_empty {
            return Err(Error::InvalidDegrees("no inner face".into()));
        }
        let d = DegreeSequence { counts, rho };
        d.stats()?;
        Ok(d)
    }

    pub fn rho(&self) -> u64 {
        self.rho
    }

    pub fn with_rho(&self, rho: u64) -> Result<Self> {
        Self::build(self.counts.clone(), rho, true)
    }

    /// `d(k)` for `k ≥ 1`; use [`Stats::leaves`] for `k = 0`.
    pub fn count(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    /// Non-zero `(k, d(k))` pairs, `k ≥ 1`, increasing in `k`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Out-degree multiset including leaves: `(k, d(k))` for `k ≥ 0`.
    pub fn with_leaves(&self) -> Result<Vec<(u64, u128)>> {
        let s = self.stats()?;
        let mut out = vec![(0, s.leaves)];
        out.extend(self.iter().map(|(k, c)| (k, c as u128)));
        Ok(out)
    }

    pub fn stats(&self) -> Result<Stats> {
        let mut faces: u128 = 0;
        let mut eps: u128 = 0;
        let mut sigma2: u128 = 0;
        let mut extra: u128 = 0;
        for (k, c) in self.iter() {
            let (k, c) = (k as u128, c as u128);
            faces = faces.checked_add(c).ok_or(Error::Overflow("face count"))?;
            let kc = k.checked_mul(c).ok_or(Error::Overflow("edge count"))?;
            eps = eps.checked_add(kc).ok_or(Error::Overflow("edge count"))?;
            let s = (k - 1)
                .checked_mul(kc)
                .ok_or(Error::Overflow("sum of k(k-1)d(k)"))?;
            sigma2 = sigma2.checked_add(s).ok_or(Error::Overflow("sum of k(k-1)d(k)"))?;
            extra = extra
                .checked_add((k - 1) * c)
                .ok_or(Error::Overflow("leaf count"))?;
        }
        let rho = self.rho as u128;
        let leaves = extra.checked_add(rho).ok_or(Error::Overflow("leaf count"))?;
        let upsilon = eps.checked_add(rho).ok_or(Error::Overflow("vertex count"))?;
        let delta = self.counts.keys().next_back().copied().unwrap_or(0);
        Ok(Stats { faces, sigma2, eps, leaves, upsilon, delta })
    }

    pub fn scaling_factors(&self) -> Result<ScalingFactors> {
        Ok(ScalingFactors {
            label_scale: self.label_scale()?,
            dist_scale_disk: self.disk_scale()?,
            dist_scale_crt: self.crt_scale(),
        })
    }

    pub fn disk_scale(&self) -> Result<f64> {
        let s = self.stats()?;
        if s.sigma2 == 0 {
            return Err(Error::Domain("disk scale needs sigma > 0".into()));
        }
        Ok((1.5 / s.sigma()).sqrt())
    }

    pub fn crt_scale(&self) -> f64 {
        (2.0 * self.rho as f64).sqrt().recip()
    }

    pub fn label_scale(&self) -> Result<f64> {
        let s = self.stats()?;
        Ok((s.sigma() + self.rho as f64).sqrt().recip())
    }

    /// Text form: a `rho R` header followed by `k count` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("rho {}\n", self.rho);
        for (k, c) in self.iter() {
            let _ = writeln!(out, "{k} {c}");
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. Blank lines and `#` comments
    /// are ignored; repeated `k` lines accumulate.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rho = None;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (a, b) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(Error::Parse(format!("line {}: expected two fields", lineno + 1))),
            };
            let num = |s: &str| {
                s.parse::<u64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            if a == "rho" {
                if rho.replace(num(b)?).is_some() {
                    return Err(Error::Parse("duplicate rho header".into()));
                }
            } else {
                let c = counts.entry(num(a)?).or_default();
                *c = c
                    .checked_add(num(b)?)
                    .ok_or(Error::Overflow("degree count"))?;
            }
        }
        let rho = rho.ok_or_else(|| Error::Parse("missing rho header".into()))?;
        Self::build(counts, rho, true)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("degree sequences always serialise")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
