//! Boltzmann weights, offspring laws and conditioned random walks.
//!
//! Walks are written in Łukasiewicz form: a step `X = ξ - 1 ≥ -1` where `ξ`
//! is an offspring count, so `ν(k) = μ(k + 1)`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use num_rational::Ratio;
use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::forest::{decode_forest, vervaat_shift};
use crate::labels::decorate;
use crate::map::{build_map, reroot_to_uniform, PointedMap};
use crate::path::{LatticePath, PathKind};
use crate::stats::median;

/// Default cap on rejection attempts.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Face weights `q_k`, `k ≥ 1`, with finite support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence {
    q: BTreeMap<u64, f64>,
}

impl WeightSequence {
    pub fn new<I: IntoIterator<Item = (u64, f64)>>(q: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, w) in q {
            if k == 0 || !(w >= 0.0) || !w.is_finite() {
                return Err(Error::Inadmissible(format!("weight q_{k} = {w}")));
            }
            if w > 0.0 {
                *map.entry(k).or_insert(0.0) += w;
            }
        }
        if !map.keys().any(|&k| k >= 2) {
            return Err(Error::Inadmissible("no positive weight of degree at least 4".into()));
        }
        Ok(WeightSequence { q: map })
    }

    pub fn q(&self, k: u64) -> f64 {
        self.q.get(&k).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.q.iter().map(|(&k, &w)| (k, w))
    }

    fn coefficient(k: u64) -> f64 {
        ln_binomial(2 * k - 1, k - 1).exp()
    }

    /// `g(W) = 1 + Σ C(2k-1, k-1) q_k W^k - W`; `W_★` is its smallest
    /// positive root.
    fn g(&self, w: f64) -> f64 {
        1.0 + self.iter().map(|(k, q)| Self::coefficient(k) * q * w.powi(k as i32)).sum::<f64>() - w
    }

    fn g_prime(&self, w: f64) -> f64 {
        self.iter().map(|(k, q)| Self::coefficient(k) * q * k as f64 * w.powi(k as i32 - 1)).sum::<f64>() - 1.0
    }

    /// Solves for `W_★`. A double root is reported as critical.
    pub fn w_star(&self) -> Result<(f64, bool)> {
        // g is convex with g(0) = 1 and g'(0) ≥ -1; find the minimiser.
        let mut hi = 1.0;
        while self.g_prime(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::Inadmissible("weights too small to normalise".into()));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.g_prime(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let wmin = 0.5 * (lo + hi);
        let gmin = self.g(wmin);
        let tol = 1e-9 * wmin.max(1.0);
        if gmin > tol {
            return Err(Error::Inadmissible(format!("no fixed point (min of g is {gmin:.3e})")));
        }
        if gmin.abs() <= tol {
            return Ok((wmin, true));
        }
        let (mut lo, mut hi) = (0.0, wmin);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((0.5 * (lo + hi), false))
    }

    /// `μ_q(0) = 1 / W_★`, `μ_q(k) = W_★^{k-1} C(2k-1, k-1) q_k`.
    pub fn offspring(&self) -> Result<(Vec<f64>, f64)> {
        let (w, _) = self.w_star()?;
        let kmax = *self.q.keys().last().unwrap() as usize;
        let mut mu = vec![0.0; kmax + 1];
        mu[0] = 1.0 / w;
        for (k, q) in self.iter() {
            mu[k as usize] = w.powi(k as i32 - 1) * Self::coefficient(k) * q;
        }
        Ok((mu, w))
    }

    /// Inverse map: `W_★ = 1/μ(0)` and `q_k = μ(k) W_★^{1-k} / C(2k-1, k-1)`.
    pub fn from_offspring(mu: &[f64]) -> Result<(Self, f64)> {
        if mu.is_empty() || mu[0] <= 0.0 {
            return Err(Error::Inadmissible("μ(0) must be positive".into()));
        }
        let w = 1.0 / mu[0];
        let q = mu
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &m)| (k as u64, m * w.powi(1 - k as i32) / Self::coefficient(k as u64)));
        Ok((WeightSequence::new(q)?, w))
    }
}

fn binomial_exact(n: u64, k: u64) -> i128 {
    let mut r: i128 = 1;
    for i in 0..k as i128 {
        r = r * (n as i128 - i) / (i + 1);
    }
    r
}

/// Exact version of the weight → offspring map for a rational `W_★`.
pub fn offspring_exact(q: &[(u64, Ratio<i128>)], w_star: Ratio<i128>) -> BTreeMap<u64, Ratio<i128>> {
    let mut mu = BTreeMap::new();
    mu.insert(0, w_star.recip());
    for &(k, qk) in q {
        let c = Ratio::from_integer(binomial_exact(2 * k - 1, k - 1));
        mu.insert(k, w_star.pow(k as i32 - 1) * c * qk);
    }
    mu
}

/// Exact inverse of [`offspring_exact`].
pub fn weights_exact(mu: &BTreeMap<u64, Ratio<i128>>) -> Result<(Vec<(u64, Ratio<i128>)>, Ratio<i128>)> {
    let m0 = *mu.get(&0).ok_or_else(|| Error::Inadmissible("μ(0) missing".into()))?;
    if m0 <= Ratio::from_integer(0) {
        return Err(Error::Inadmissible("μ(0) must be positive".into()));
    }
    let w = m0.recip();
    let q = mu
        .iter()
        .filter(|(&k, _)| k >= 1)
        .map(|(&k, &m)| {
            let c = Ratio::from_integer(binomial_exact(2 * k - 1, k - 1));
            (k, m * w.pow(1 - k as i32) / c)
        })
        .collect();
    Ok((q, w))
}

/// Riemann zeta for `s > 1` by Euler–Maclaurin.
pub fn zeta(s: f64) -> f64 {
    let n = 1000u32;
    let nf = n as f64;
    let head: f64 = (1..=n).map(|k| (k as f64).powf(-s)).sum();
    let f = nf.powf(-s);
    head + nf.powf(1.0 - s) / (s - 1.0) - f / 2.0 + s * nf.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * nf.powf(-s - 3.0) / 720.0
}

/// Partial sums of `1/(k ln²k)` and `1/(k² ln²k)` from `k = 2`.
struct LogSums {
    p1: Vec<f64>,
    p2: Vec<f64>,
}

const LOG_SUM_N: usize = 1_000_000;

fn f1(k: f64) -> f64 {
    1.0 / (k * k.ln().powi(2))
}

fn f2(k: f64) -> f64 {
    1.0 / (k * k * k.ln().powi(2))
}

fn log_sums() -> &'static LogSums {
    static CELL: OnceLock<LogSums> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut p1 = vec![0.0; LOG_SUM_N + 1];
        let mut p2 = vec![0.0; LOG_SUM_N + 1];
        for k in 2..=LOG_SUM_N {
            p1[k] = p1[k - 1] + f1(k as f64);
            p2[k] = p2[k - 1] + f2(k as f64);
        }
        LogSums { p1, p2 }
    })
}

/// `Σ_{j > m} 1/(j ln²j)` for `m ≥ 1000`, by Euler–Maclaurin.
fn tail1_em(m: f64) -> f64 {
    let l = m.ln();
    let d1 = -(l + 2.0) / (m * m * l.powi(3));
    1.0 / l - f1(m) / 2.0 - d1 / 12.0
}

/// `Σ_{j > m} 1/(j² ln²j)` for `m ≥ 1000`: asymptotic series of the
/// integral, then Euler–Maclaurin corrections.
fn tail2_em(m: f64) -> f64 {
    let l = m.ln();
    let mut integral = 0.0;
    let mut fact = 1.0;
    for j in 0..6 {
        fact *= (j + 1) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        integral += sign * fact / (m * l.powi(j + 2));
    }
    let d1 = -(2.0 * l + 2.0) / (m * m * m * l.powi(3));
    integral - f2(m) / 2.0 - d1 / 12.0
}

/// `Σ_{j ≥ k} 1/(j ln²j)`, `k ≥ 2`.
fn suffix1(k: u64) -> f64 {
    let s = log_sums();
    let total = s.p1[LOG_SUM_N] + tail1_em(LOG_SUM_N as f64);
    if (k as usize) <= LOG_SUM_N + 1 {
        total - s.p1[k as usize - 1]
    } else {
        tail1_em((k - 1) as f64)
    }
}

/// `Σ_{j ≥ k} 1/(j² ln²j)`, `k ≥ 2`.
fn suffix2(k: u64) -> f64 {
    let s = log_sums();
    let total = s.p2[LOG_SUM_N] + tail2_em(LOG_SUM_N as f64);
    if (k as usize) <= LOG_SUM_N + 1 {
        total - s.p2[k as usize - 1]
    } else {
        tail2_em((k - 1) as f64)
    }
}

/// `Σ_{k≥2} 1/(k ln²k)`.
pub fn log_sum_1() -> f64 {
    suffix1(2)
}

/// `Σ_{k≥2} 1/(k² ln²k)`.
pub fn log_sum_2() -> f64 {
    suffix2(2)
}

/// Parametric families, as read from configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Finitely supported offspring pmf `μ(0), μ(1), ...`.
    Tabulated { mu: Vec<f64> },
    /// Offspring law of finitely supported Boltzmann weights.
    Weights { q: Vec<(u64, f64)> },
    /// `μ(k) = 2^{-(k+1)}`.
    Geometric,
    /// `P(X ≥ k) = c k^{-α}` for `k ≥ 1`, centred.
    Stable { alpha: f64, c: f64 },
    /// `ν(k) = c / (k² ln²k)` for `k ≥ 2`, centred. `c` defaults to the
    /// value making `ν(0) = 0`.
    CauchyLoc { c: Option<f64> },
    /// `P(X ≥ k) = p h(k + 1) / h(2)`, `h(x) = 1/(x ln²x)`, centred.
    CauchyTail { p: f64 },
    /// `μ(k) ∝ k^{-(1+β)}` for `k ≥ 1` with mean `m < 1`.
    Subcritical { beta: f64, mean: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Tabulated,
    Geometric,
    Stable { alpha: f64, c: f64 },
    CauchyLoc { c: f64 },
    CauchyTail { p: f64 },
    Subcritical { beta: f64, mean: f64, norm: f64 },
}

/// Step law `ν` on `{-1, 0, 1, ...}`.
#[derive(Clone, Debug)]
pub struct OffspringLaw {
    family: Family,
    /// `ν(-1), ν(0), ..., ν(K)`.
    table: Vec<f64>,
    tail_mass: f64,
    alias: Option<WeightedAliasIndex<f64>>,
}

/// Explicit table length for heavy-tailed families.
const TABLE_K: usize = 4096;

impl OffspringLaw {
    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        match spec {
            FamilySpec::Tabulated { mu } => Self::tabulated(mu),
            FamilySpec::Weights { q } => {
                let (mu, _) = WeightSequence::new(q.iter().copied())?.offspring()?;
                Self::tabulated(&mu)
            }
            FamilySpec::Geometric => Ok(Self::geometric()),
            &FamilySpec::Stable { alpha, c } => Self::stable(alpha, c),
            &FamilySpec::CauchyLoc { c } => Self::cauchy_loc(c),
            &FamilySpec::CauchyTail { p } => Self::cauchy_tail(p),
            &FamilySpec::Subcritical { beta, mean } => Self::subcritical(beta, mean),
        }
    }

    fn build(family: Family, table: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if table.iter().any(|&p| !(p >= 0.0)) || !(tail_mass >= 0.0) {
            return Err(Error::Inadmissible("negative probability".into()));
        }
        if table[0] <= 0.0 {
            return Err(Error::Inadmissible("ν(-1) must be positive".into()));
        }
        let total: f64 = table.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Inadmissible(format!("pmf sums to {total}")));
        }
        let mut weights = table.clone();
        weights.push(tail_mass);
        let alias = WeightedAliasIndex::new(weights).map_err(|e| Error::Inadmissible(e.to_string()))?;
        Ok(OffspringLaw { family, table, tail_mass, alias: Some(alias) })
    }

    /// Finitely supported offspring law given as `μ(0), μ(1), ...`.
    pub fn tabulated(mu: &[f64]) -> Result<Self> {
        let total: f64 = mu.iter().sum();
        if mu.is_empty() || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Inadmissible(format!("offspring pmf sums to {total}")));
        }
        let table: Vec<f64> = mu.iter().map(|m| m / total).collect();
        if !table.iter().skip(2).any(|&p| p > 0.0) && table.get(1) != Some(&1.0) && table[0] < 1.0 {
            // Supported on {0, 1}: allowed, but degenerate.
        }
        Self::build(Family::Tabulated, table, 0.0)
    }

    pub fn geometric() -> Self {
        let table: Vec<f64> = (0..64).map(|k| 0.5f64.powi(k + 1)).collect();
        let tail = 0.5f64.powi(64);
        OffspringLaw { family: Family::Geometric, table, tail_mass: tail, alias: None }
    }

    pub fn stable(alpha: f64, c: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) || !(c > 0.0) {
            return Err(Error::Inadmissible(format!("stable family needs α ∈ (1, 2), c > 0; got {alpha}, {c}")));
        }
        let down = c * zeta(alpha);
        if c + down > 1.0 {
            return Err(Error::Inadmissible(format!("c = {c} too large for α = {alpha}")));
        }
        let mut table = vec![down, 1.0 - c - down];
        for k in 1..=TABLE_K {
            let k = k as f64;
            table.push(c * (k.powf(-alpha) - (k + 1.0).powf(-alpha)));
        }
        let tail = c * ((TABLE_K + 1) as f64).powf(-alpha);
        Self::build(Family::Stable { alpha, c }, table, tail)
    }

    /// Default constant making the law supported on `{-1} ∪ {2, 3, ...}`.
    pub fn cauchy_loc_default_c() -> f64 {
        1.0 / (log_sum_1() + log_sum_2())
    }

    pub fn cauchy_loc(c: Option<f64>) -> Result<Self> {
        let (s1, s2) = (log_sum_1(), log_sum_2());
        let c = c.unwrap_or(1.0 / (s1 + s2));
        if !(c > 0.0) || c * (s1 + s2) > 1.0 + 1e-15 {
            return Err(Error::Inadmissible(format!("cauchy_loc constant {c} out of range")));
        }
        let zero = (1.0 - c * (s1 + s2)).max(0.0);
        let mut table = vec![c * s1, zero, 0.0];
        for k in 2..=TABLE_K {
            table.push(c * f2(k as f64));
        }
        let tail = c * suffix2(TABLE_K as u64 + 1);
        let mut law = Self::build(Family::CauchyLoc { c }, table, tail);
        if let Err(Error::Inadmissible(_)) = law {
            // Rounding in the complement: renormalise the zero cell.
            let mut table = vec![c * s1, 0.0, 0.0];
            for k in 2..=TABLE_K {
                table.push(c * f2(k as f64));
            }
            let rest: f64 = table.iter().sum::<f64>() + tail;
            table[1] = (1.0 - rest).max(0.0);
            law = Self::build(Family::CauchyLoc { c }, table, tail);
        }
        law
    }

    fn h(x: f64) -> f64 {
        1.0 / (x * x.ln().powi(2))
    }

    pub fn cauchy_tail(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::Inadmissible("cauchy_tail needs p > 0".into()));
        }
        let h2 = Self::h(2.0);
        let down = p * log_sum_1() / h2;
        if p + down > 1.0 {
            return Err(Error::Inadmissible(format!("cauchy_tail p = {p} too large")));
        }
        let ge = |k: usize| if k == 0 { 1.0 } else { p * Self::h(k as f64 + 1.0) / h2 };
        let mut table = vec![down, 1.0 - p - down];
        for k in 1..=TABLE_K {
            table.push(ge(k) - ge(k + 1));
        }
        let tail = ge(TABLE_K + 1);
        let total: f64 = table.iter().sum::<f64>() + tail;
        table[1] += 1.0 - total;
        Self::build(Family::CauchyTail { p }, table, tail)
    }

    pub fn subcritical(beta: f64, mean: f64) -> Result<Self> {
        if !(beta > 1.0) || !(mean > 0.0 && mean < 1.0) {
            return Err(Error::Inadmissible(format!("subcritical family needs β > 1, m ∈ (0, 1); got {beta}, {mean}")));
        }
        let norm = mean / zeta(beta);
        let z1 = zeta(1.0 + beta);
        if norm * z1 >= 1.0 {
            return Err(Error::Inadmissible(format!("mean {mean} too large for β = {beta}")));
        }
        // ν(k) = μ(k + 1).
        let mut table = vec![1.0 - norm * z1];
        let mut head = 0.0;
        for k in 1..=TABLE_K + 1 {
            let p = norm * (k as f64).powf(-1.0 - beta);
            head += p;
            table.push(p);
        }
        let tail = (1.0 - table[0] - head).max(0.0);
        let total: f64 = table.iter().sum::<f64>() + tail;
        table[0] += 1.0 - total;
        Self::build(Family::Subcritical { beta, mean, norm }, table, tail)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `ν(k)`.
    pub fn nu(&self, k: i64) -> f64 {
        if k < -1 {
            return 0.0;
        }
        if let Some(&p) = self.table.get((k + 1) as usize) {
            return p;
        }
        let kf = k as f64;
        match self.family {
            Family::Tabulated => 0.0,
            Family::Geometric => 0.5f64.powf(kf + 2.0),
            Family::Stable { alpha, c } => c * (kf.powf(-alpha) - (kf + 1.0).powf(-alpha)),
            Family::CauchyLoc { c } => c * f2(kf),
            Family::CauchyTail { p } => p * (Self::h(kf + 1.0) - Self::h(kf + 2.0)) / Self::h(2.0),
            Family::Subcritical { beta, norm, .. } => norm * (kf + 1.0).powf(-1.0 - beta),
        }
    }

    /// `μ(k) = ν(k - 1)`.
    pub fn mu(&self, k: u64) -> f64 {
        self.nu(k as i64 - 1)
    }

    /// `P(X ≥ k)`.
    pub fn tail(&self, k: i64) -> f64 {
        if k <= -1 {
            return 1.0;
        }
        let kf = k as f64;
        match self.family {
            Family::Tabulated => self.table.iter().skip((k + 1) as usize).sum(),
            Family::Geometric => 0.5f64.powf(kf + 1.0),
            Family::Stable { alpha, c } if k >= 1 => c * kf.powf(-alpha),
            Family::CauchyLoc { c } if k >= 2 => c * suffix2(k as u64),
            Family::CauchyTail { p } if k >= 1 => p * Self::h(kf + 1.0) / Self::h(2.0),
            Family::Subcritical { beta, norm, .. } if k as usize > self.table.len() => {
                // Σ_{j ≥ k+1} j^{-(1+β)} by Euler–Maclaurin.
                let m = kf + 1.0;
                norm * (m.powf(-beta) / beta + m.powf(-1.0 - beta) / 2.0 + (1.0 + beta) * m.powf(-2.0 - beta) / 12.0)
            }
            _ => 1.0 - self.table.iter().take((k + 1) as usize).sum::<f64>(),
        }
    }

    /// `E[X]` (walk form).
    pub fn mean(&self) -> f64 {
        match self.family {
            Family::Tabulated => self.table.iter().enumerate().map(|(i, p)| (i as f64 - 1.0) * p).sum(),
            Family::Subcritical { mean, .. } => mean - 1.0,
            _ => 0.0,
        }
    }

    /// Mean offspring number.
    pub fn offspring_mean(&self) -> f64 {
        self.mean() + 1.0
    }

    /// `Var(X)` when finite.
    pub fn variance(&self) -> Option<f64> {
        match self.family {
            Family::Tabulated => {
                let m = self.mean();
                Some(self.table.iter().enumerate().map(|(i, p)| (i as f64 - 1.0 - m).powi(2) * p).sum())
            }
            Family::Geometric => Some(2.0),
            Family::Subcritical { beta, mean, norm } if beta > 2.0 => {
                // E[ξ²] = C ζ(β - 1).
                Some(norm * zeta(beta - 1.0) - mean * mean)
            }
            _ => None,
        }
    }

    /// Normalising sequence `a_n`.
    pub fn a_n(&self, n: u64) -> f64 {
        let nf = n as f64;
        match self.family {
            Family::Tabulated | Family::Geometric => (nf * self.variance().unwrap() / 2.0).sqrt(),
            Family::Stable { alpha, c } => (c * alpha * gamma(-alpha) * nf).powf(1.0 / alpha),
            Family::Subcritical { beta, norm, .. } if beta <= 2.0 => (nf * norm / beta).powf(1.0 / beta),
            Family::Subcritical { .. } => (nf * self.variance().unwrap() / 2.0).sqrt(),
            Family::CauchyLoc { .. } | Family::CauchyTail { .. } => {
                // Smallest a with n P(X ≥ a) ≤ 1.
                let (mut lo, mut hi) = (1i64, 2i64);
                while nf * self.tail(hi) > 1.0 {
                    lo = hi;
                    hi *= 2;
                }
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    if nf * self.tail(mid) > 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi as f64
            }
        }
    }

    /// Centring sequence `b_n = -n E[X 1{X > a_n}]` of the Cauchy families.
    pub fn b_n(&self, n: u64) -> Option<f64> {
        let nf = n as f64;
        let a = self.a_n(n) as u64;
        match self.family {
            Family::CauchyLoc { c } => Some(-nf * c * suffix1(a + 1)),
            Family::CauchyTail { .. } => {
                let head: f64 = (a as i64 + 1..=a as i64 + 200_000).map(|k| self.tail(k)).sum();
                let rest = self.tail(a as i64 + 200_001) * (a as f64 + 200_001.0) * ((a as f64 + 200_001.0).ln());
                Some(-nf * (head + rest + a as f64 * self.tail(a as i64 + 1)))
            }
            _ => None,
        }
    }

    /// The closed forms `c n / ln² n` and `-c n / ln n` of the Cauchy-local
    /// family.
    pub fn cauchy_asymptotics(&self, n: u64) -> Option<(f64, f64)> {
        match self.family {
            Family::CauchyLoc { c } => {
                let nf = n as f64;
                Some((c * nf / nf.ln().powi(2), -c * nf / nf.ln()))
            }
            _ => None,
        }
    }

    /// True when `ν` is non-increasing on `[k, ∞)`.
    pub fn nonincreasing_from(&self, k: i64) -> bool {
        match self.family {
            Family::CauchyLoc { .. } => k >= 2,
            Family::Subcritical { .. } | Family::Geometric | Family::Stable { .. } | Family::CauchyTail { .. } => {
                k >= 1
            }
            Family::Tabulated => {
                let start = (k + 1).max(0) as usize;
                self.table.iter().skip(start).zip(self.table.iter().skip(start + 1)).all(|(a, b)| b <= a)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let alias = match &self.alias {
            Some(a) => a,
            None => return crate::labels::GeometricStep.sample(rng),
        };
        let i = alias.sample(rng);
        if i < self.table.len() {
            return i as i64 - 1;
        }
        self.sample_tail(rng)
    }

    /// Draws `X` conditioned on `X ≥ K` where `K = table.len() - 1` is the
    /// first value not in the table.
    fn sample_tail<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        let k0 = self.table.len() as i64 - 1;
        match self.family {
            Family::Stable { alpha, .. } => {
                // P(X ≥ k | X ≥ k0) = (k0 / k)^α.
                let u: f64 = 1.0 - rng.random::<f64>();
                ((k0 as f64) * u.powf(-1.0 / alpha)).floor() as i64
            }
            Family::CauchyTail { .. } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                let target = u * Self::h(k0 as f64 + 1.0);
                // Largest k ≥ k0 with h(k + 1) ≥ target.
                let (mut lo, mut hi) = (k0, k0 * 2);
                while Self::h(hi as f64 + 1.0) >= target {
                    lo = hi;
                    hi = hi.saturating_mul(2);
                }
                while hi - lo > 1 {
                    let mid = lo + (hi - lo) / 2;
                    if Self::h(mid as f64 + 1.0) >= target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
            Family::CauchyLoc { .. } => {
                // Proposal P(Y ≥ k) = k0 / k on k ≥ k0; ratio (k+1)/(k ln²k)
                // is decreasing.
                let bound = (k0 as f64 + 1.0) / (k0 as f64 * (k0 as f64).ln().powi(2));
                loop {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    let y = (k0 as f64 / u).floor();
                    if y > 9.0e18 {
                        continue;
                    }
                    let ratio = (y + 1.0) / (y * y.ln().powi(2));
                    if rng.random::<f64>() * bound <= ratio {
                        return y as i64;
                    }
                }
            }
            Family::Subcritical { beta, .. } => {
                // ν(k) ∝ (k + 1)^{-(1+β)}; propose m = k + 1 from a Pareto
                // envelope P(M ≥ m) = (m0 / m)^β.
                let m0 = (k0 + 1) as f64;
                let bound = ((m0 + 1.0) / m0).powf(1.0 + beta) / beta;
                loop {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    let m = (m0 * u.powf(-1.0 / beta)).floor();
                    if m > 9.0e18 {
                        continue;
                    }
                    let prop = m.powf(-beta) - (m + 1.0).powf(-beta);
                    let ratio = m.powf(-1.0 - beta) / prop;
                    if rng.random::<f64>() * bound <= ratio {
                        return m as i64 - 1;
                    }
                }
            }
            Family::Tabulated | Family::Geometric => unreachable!("no tail beyond the table"),
        }
    }
}

/// A set of jump values `B ⊂ {-1, 0, 1, ...}` that is finite or cofinite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum JumpSet {
    All,
    Finite(BTreeSet<i64>),
    /// Every value except these.
    Cofinite(BTreeSet<i64>),
}

impl JumpSet {
    /// Leaves: `{-1}`.
    pub fn leaves() -> Self {
        JumpSet::Finite([-1].into())
    }

    /// Internal vertices: `{0, 1, ...}`.
    pub fn internal() -> Self {
        JumpSet::Cofinite([-1].into())
    }

    pub fn contains(&self, x: i64) -> bool {
        match self {
            JumpSet::All => x >= -1,
            JumpSet::Finite(s) => s.contains(&x),
            JumpSet::Cofinite(s) => x >= -1 && !s.contains(&x),
        }
    }

    /// `ν(B)`.
    pub fn mass(&self, nu: &OffspringLaw) -> f64 {
        match self {
            JumpSet::All => 1.0,
            JumpSet::Finite(s) => s.iter().map(|&x| nu.nu(x)).sum(),
            JumpSet::Cofinite(s) => 1.0 - s.iter().map(|&x| nu.nu(x)).sum::<f64>(),
        }
    }

    /// `max_{x ∈ B} ν(x)`, searched over the explicit table.
    fn max_mass(&self, nu: &OffspringLaw) -> f64 {
        let tail_bound = if matches!(self, JumpSet::Finite(_)) { 0.0 } else { nu.tail_mass };
        (-1..nu.table.len() as i64 - 1)
            .filter(|&x| self.contains(x))
            .map(|x| nu.nu(x))
            .fold(tail_bound, f64::max)
    }
}

/// Jump counts and order statistics of a path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpStats {
    /// Number of steps.
    pub zeta: usize,
    /// `J_B` for each requested set.
    pub counts: Vec<u64>,
    pub delta: i64,
    /// Second largest step; `None` for paths with one step.
    pub delta2: Option<i64>,
    /// `Σ_{k ≥ 1} k(k+1) J_k`.
    pub sum_kk1: f64,
    /// The same sum restricted to `k ≤ Δ'`.
    pub sum_kk1_truncated: f64,
}

pub fn jump_stats(path: &LatticePath, sets: &[JumpSet]) -> JumpStats {
    let steps = path.steps();
    let mut counts = vec![0u64; sets.len()];
    let (mut d1, mut d2) = (i64::MIN, i64::MIN);
    let mut sum = 0.0;
    for &s in steps {
        for (c, b) in counts.iter_mut().zip(sets) {
            *c += b.contains(s) as u64;
        }
        if s > d1 {
            d2 = d1;
            d1 = s;
        } else if s > d2 {
            d2 = s;
        }
        sum += (s * (s + 1)) as f64;
    }
    let delta2 = (steps.len() >= 2).then_some(d2);
    let sum_kk1_truncated = match delta2 {
        Some(cap) => steps.iter().filter(|&&s| s <= cap).map(|&s| (s * (s + 1)) as f64).sum(),
        None => 0.0,
    };
    JumpStats { zeta: steps.len(), counts, delta: d1, delta2, sum_kk1: sum, sum_kk1_truncated }
}

/// A conditioned walk, shifted to first-passage form.
#[derive(Clone, Debug)]
pub struct ConditionedWalk {
    pub path: LatticePath,
    pub attempts: u64,
}

/// Exact sample of the walk run until its `n`-th jump in `A`, conditioned
/// to sit at `-ρ` there, then cyclically shifted into a first-passage path.
///
/// The last jump is not drawn: given everything before it, the required
/// value `v` is known and the attempt is accepted with probability
/// `ν(v) 1{v ∈ A} / max_A ν`.
pub fn sample_conditioned_walk<R: Rng + ?Sized>(
    nu: &OffspringLaw,
    n: u64,
    rho: u64,
    a: &JumpSet,
    budget: u64,
    rng: &mut R,
) -> Result<ConditionedWalk> {
    if n == 0 || rho == 0 {
        return Err(Error::Domain("need n ≥ 1 and ρ ≥ 1".into()));
    }
    let rho = rho as i64;
    let cap = a.max_mass(nu);
    if cap <= 0.0 {
        return Err(Error::Inadmissible("jump set has zero mass".into()));
    }
    let mut steps: Vec<i64> = Vec::with_capacity(n as usize + 1);
    for attempt in 1..=budget {
        steps.clear();
        let mut s = 0i64;
        let mut hits = 0u64;
        let mut dead = false;
        while hits < n - 1 {
            let x = nu.sample(rng);
            steps.push(x);
            s += x;
            if a.contains(x) {
                hits += 1;
            }
            if *a == JumpSet::All && s - (n - hits) as i64 > -rho {
                dead = true;
                break;
            }
        }
        if dead {
            continue;
        }
        // Steps outside A until the next A-step, which is replaced by the
        // value closing the bridge.
        loop {
            let x = nu.sample(rng);
            if a.contains(x) {
                break;
            }
            steps.push(x);
            s += x;
        }
        let v = -rho - s;
        if v < -1 || !a.contains(v) {
            continue;
        }
        if rng.random::<f64>() * cap < nu.nu(v) {
            steps.push(v);
            let bridge = LatticePath::new_unchecked(std::mem::take(&mut steps), PathKind::Bridge);
            return Ok(ConditionedWalk { path: vervaat_shift(&bridge, rng)?, attempts: attempt });
        }
    }
    Err(Error::Budget { attempts: budget })
}

/// Walk of length `n` conditioned on ending at `-ρ` and on its largest
/// step being at least `floor`, by designating the position of the first
/// maximum.
///
/// Requires `ν` non-increasing on `[floor, ∞)`.
pub fn sample_condensed_walk<R: Rng + ?Sized>(
    nu: &OffspringLaw,
    n: u64,
    rho: u64,
    floor: i64,
    budget: u64,
    rng: &mut R,
) -> Result<ConditionedWalk> {
    if n < 2 || rho == 0 {
        return Err(Error::Domain("need n ≥ 2 and ρ ≥ 1".into()));
    }
    if !nu.nonincreasing_from(floor) || nu.nu(floor) <= 0.0 {
        return Err(Error::Regime(format!("ν is not non-increasing from {floor}")));
    }
    let nf = nu.nu(floor);
    let mut steps = vec![0i64; n as usize];
    'attempt: for attempt in 1..=budget {
        let j = rng.random_range(0..n as usize);
        let mut s = 0i64;
        let mut max_before = i64::MIN;
        let mut max_after = i64::MIN;
        for (i, x) in steps.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            *x = nu.sample(rng);
            s += *x;
            if i < j {
                max_before = max_before.max(*x);
            } else {
                max_after = max_after.max(*x);
            }
        }
        let v = -(rho as i64) - s;
        if v < floor || v <= max_before || v < max_after {
            continue 'attempt;
        }
        if rng.random::<f64>() * nf < nu.nu(v) {
            steps[j] = v;
            let bridge = LatticePath::new_unchecked(steps, PathKind::Bridge);
            return Ok(ConditionedWalk { path: vervaat_shift(&bridge, rng)?, attempts: attempt });
        }
    }
    Err(Error::Budget { attempts: budget })
}

/// Walk conditioned to stay non-negative for `n` steps, stopped when it
/// first hits `-1`. At most `max_len` steps are simulated per attempt.
pub fn sample_tail_conditioned_walk<R: Rng + ?Sized>(
    nu: &OffspringLaw,
    n: u64,
    max_len: u64,
    budget: u64,
    rng: &mut R,
) -> Result<ConditionedWalk> {
    let mut steps = Vec::new();
    'attempt: for attempt in 1..=budget {
        steps.clear();
        let mut s = 0i64;
        for _ in 0..n {
            let x = nu.sample(rng);
            steps.push(x);
            s += x;
            if s < 0 {
                continue 'attempt;
            }
        }
        while s >= 0 {
            if steps.len() as u64 >= max_len {
                continue 'attempt;
            }
            let x = nu.sample(rng);
            steps.push(x);
            s += x;
        }
        let path = LatticePath::new(steps, PathKind::FirstPassage)?;
        return Ok(ConditionedWalk { path, attempts: attempt });
    }
    Err(Error::Budget { attempts: budget })
}

/// Summary of repeated condensation samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CondensationReport {
    pub n: u64,
    pub rho: u64,
    pub floor: i64,
    pub a_n: f64,
    pub b_n: Option<f64>,
    pub delta: Vec<i64>,
    pub delta2: Vec<i64>,
    pub attempts: Vec<u64>,
    pub median_delta_over_bn: Option<f64>,
    pub median_delta2_over_delta: f64,
    pub median_delta_over_n: f64,
}

/// Default floor for the designated-maximum sampler: `4 a_n` for the
/// Cauchy-local family and `(1 - m) n / 4` in the subcritical case.
pub fn default_floor(nu: &OffspringLaw, n: u64) -> Result<i64> {
    match nu.family() {
        Family::CauchyLoc { .. } => Ok((4.0 * nu.a_n(n)).ceil() as i64),
        Family::Subcritical { mean, .. } => Ok((((1.0 - mean) * n as f64) / 4.0).ceil().max(1.0) as i64),
        f => Err(Error::Regime(format!("no condensation regime for {f:?}"))),
    }
}

/// Runs `reps` independent condensed walks, replica `r` on `rng_for(r)`.
pub fn condensation_report<R, F>(nu: &OffspringLaw, n: u64, rho: u64, reps: usize, budget: u64, rng_for: F) -> Result<CondensationReport>
where
    R: Rng,
    F: Fn(usize) -> R + Sync,
{
    use rayon::prelude::*;
    let floor = default_floor(nu, n)?;
    let runs: Vec<(i64, i64, u64)> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(r);
            let w = sample_condensed_walk(nu, n, rho, floor, budget, &mut rng)?;
            let js = jump_stats(&w.path, &[]);
            Ok((js.delta, js.delta2.unwrap_or(i64::MIN), w.attempts))
        })
        .collect::<Result<_>>()?;
    let delta: Vec<i64> = runs.iter().map(|r| r.0).collect();
    let delta2: Vec<i64> = runs.iter().map(|r| r.1).collect();
    let b_n = nu.b_n(n);
    let ratio = |xs: Vec<f64>| median(&xs);
    Ok(CondensationReport {
        n,
        rho,
        floor,
        a_n: nu.a_n(n),
        b_n,
        median_delta_over_bn: b_n.map(|b| ratio(delta.iter().map(|&d| d as f64 / b.abs()).collect())),
        median_delta2_over_delta: ratio(runs.iter().map(|r| r.1 as f64 / r.0 as f64).collect()),
        median_delta_over_n: ratio(delta.iter().map(|&d| d as f64 / n as f64).collect()),
        attempts: runs.iter().map(|r| r.2).collect(),
        delta,
        delta2,
    })
}

/// What the size parameter of a Boltzmann map counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    Edges,
    Vertices,
    Faces,
    FacesIn(JumpSet),
}

impl Conditioning {
    pub fn jump_set(&self) -> JumpSet {
        match self {
            Conditioning::Edges => JumpSet::All,
            Conditioning::Vertices => JumpSet::leaves(),
            Conditioning::Faces => JumpSet::internal(),
            Conditioning::FacesIn(a) => a.clone(),
        }
    }
}

/// Conditioned Boltzmann map with a uniform root on the boundary.
pub fn boltzmann_map<R: Rng + ?Sized>(
    nu: &OffspringLaw,
    s: &Conditioning,
    n: u64,
    rho: u64,
    budget: u64,
    rng: &mut R,
) -> Result<PointedMap> {
    let w = sample_conditioned_walk(nu, n, rho, &s.jump_set(), budget, rng)?;
    let f = decode_forest(&w.path)?;
    let m = build_map(&decorate(f, rng))?;
    reroot_to_uniform(&m, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn quadrangulation_weights() {
        let q = WeightSequence::new([(2, 1.0 / 12.0)]).unwrap();
        let (w, critical) = q.w_star().unwrap();
        assert!((w - 2.0).abs() < 1e-4, "{w}");
        assert!(critical);
        let (back, w2) = WeightSequence::from_offspring(&[0.5, 0.0, 0.5]).unwrap();
        assert_eq!(w2, 2.0);
        assert!((back.q(2) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn exact_round_trip() {
        let half = Ratio::new(1, 2);
        let mu: BTreeMap<u64, Ratio<i128>> = [(0, half), (2, half)].into();
        let (q, w) = weights_exact(&mu).unwrap();
        assert_eq!(w, Ratio::from_integer(2));
        assert_eq!(q, vec![(2, Ratio::new(1, 12))]);
        assert_eq!(offspring_exact(&q, w), mu);
        let q = vec![(1, Ratio::new(1, 10)), (3, Ratio::new(1, 1000))];
        let w = Ratio::new(3, 2);
        let mu = offspring_exact(&q, w);
        assert_eq!(weights_exact(&mu).unwrap(), (q, w));
    }

    #[test]
    fn inadmissible_weights() {
        assert!(matches!(WeightSequence::new([(1, 0.3)]), Err(Error::Inadmissible(_))));
        assert!(WeightSequence::new([(2, 1.0)]).unwrap().w_star().is_err());
        let (w, critical) = WeightSequence::new([(2, 0.05)]).unwrap().w_star().unwrap();
        assert!(!critical);
        assert!(w < 2.0);
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert!((zeta(4.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-12);
        assert!((zeta(2.5) - 1.341_487_257_250_917).abs() < 1e-10);
    }

    #[test]
    fn log_sums_match_direct_summation() {
        // Independent check: direct summation to 10^7 plus the integral tail.
        let mut s2 = 0.0;
        for k in 2..10_000_000u64 {
            s2 += f2(k as f64);
        }
        assert!((log_sum_2() - s2).abs() < 1e-8);
        let l = 10_000_000f64.ln();
        let mut s1 = 0.0;
        for k in 2..10_000_000u64 {
            s1 += f1(k as f64);
        }
        assert!((log_sum_1() - (s1 + 1.0 / l)).abs() < 1e-7);
    }

    fn check_pmf(nu: &OffspringLaw, mean: f64) {
        let mut total = 0.0;
        let mut m = 0.0;
        for k in -1..200_000 {
            total += nu.nu(k);
            m += k as f64 * nu.nu(k);
        }
        assert!((total + nu.tail(200_000) - 1.0).abs() < 1e-9, "{:?} {total}", nu.family());
        if nu.variance().is_some() {
            assert!((m - mean).abs() < 1e-6, "{:?} {m}", nu.family());
        }
        for k in [1, 3, 10, 5000, 7000] {
            let direct: f64 = 1.0 - (-1..k).map(|j| nu.nu(j)).sum::<f64>();
            assert!((nu.tail(k) - direct).abs() < 1e-9, "{:?} tail({k})", nu.family());
        }
    }

    #[test]
    fn families_are_normalised() {
        check_pmf(&OffspringLaw::tabulated(&[0.5, 0.0, 0.5]).unwrap(), 0.0);
        check_pmf(&OffspringLaw::geometric(), 0.0);
        check_pmf(&OffspringLaw::stable(1.5, 0.2).unwrap(), 0.0);
        check_pmf(&OffspringLaw::cauchy_loc(None).unwrap(), 0.0);
        check_pmf(&OffspringLaw::cauchy_tail(0.25).unwrap(), 0.0);
        check_pmf(&OffspringLaw::subcritical(2.5, 0.7).unwrap(), -0.3);
        let c = OffspringLaw::cauchy_loc(None).unwrap();
        assert!(c.nu(0).abs() < 1e-12);
        assert_eq!(c.nu(1), 0.0);
        assert!((OffspringLaw::cauchy_loc_default_c() - 0.356).abs() < 0.01);
        assert!(OffspringLaw::stable(2.5, 0.1).is_err());
        assert!(OffspringLaw::subcritical(2.5, 1.0).is_err());
    }

    #[test]
    fn sampled_tails_match() {
        let mut rng = stream(3, 0);
        let laws = [
            OffspringLaw::stable(1.5, 0.2).unwrap(),
            OffspringLaw::cauchy_loc(None).unwrap(),
            OffspringLaw::cauchy_tail(0.25).unwrap(),
            OffspringLaw::subcritical(1.5, 0.5).unwrap(),
        ];
        for nu in &laws {
            let n = 400_000;
            let xs: Vec<i64> = (0..n).map(|_| nu.sample(&mut rng)).collect();
            for k in [-1i64, 0, 2, 20, 4000, 5000] {
                let p = nu.tail(k);
                let emp = xs.iter().filter(|&&x| x >= k).count() as f64 / n as f64;
                let se = (p * (1.0 - p) / n as f64).sqrt();
                assert!((emp - p).abs() < 5.0 * se + 1e-6, "{:?} k={k} {emp} vs {p}", nu.family());
            }
        }
    }

    #[test]
    fn tail_sampler_beyond_table() {
        // Conditioned on exceeding the table, the law still matches the tail.
        let mut rng = stream(4, 0);
        for nu in [OffspringLaw::cauchy_loc(None).unwrap(), OffspringLaw::subcritical(2.5, 0.7).unwrap()] {
            let k0 = nu.table.len() as i64 - 1;
            let xs: Vec<i64> = (0..100_000).map(|_| nu.sample_tail(&mut rng)).collect();
            assert!(xs.iter().all(|&x| x >= k0));
            for m in [2, 4, 16] {
                let p = nu.tail(k0 * m) / nu.tail(k0);
                let emp = xs.iter().filter(|&&x| x >= k0 * m).count() as f64 / xs.len() as f64;
                let se = (p * (1.0 - p) / xs.len() as f64).sqrt();
                assert!((emp - p).abs() < 5.0 * se, "{:?} m={m} {emp} vs {p}", nu.family());
            }
        }
    }

    #[test]
    fn cauchy_normalisations() {
        let nu = OffspringLaw::cauchy_loc(None).unwrap();
        let n = 1_000_000;
        let a = nu.a_n(n);
        assert!(n as f64 * nu.tail(a as i64) <= 1.0);
        assert!(n as f64 * nu.tail(a as i64 - 1) > 1.0);
        let b = nu.b_n(n).unwrap();
        assert!(b < 0.0 && b.abs() > a);
        let (a_asym, b_asym) = nu.cauchy_asymptotics(n).unwrap();
        assert!(a_asym > 0.0 && b_asym < 0.0);
    }

    #[test]
    fn jump_stats_examples() {
        let p = LatticePath::new(vec![-1], PathKind::Lukasiewicz).unwrap();
        let js = jump_stats(&p, &[JumpSet::leaves()]);
        assert_eq!((js.zeta, js.delta, js.delta2, js.counts[0]), (1, -1, None, 1));
        let steps: Vec<i64> =
            crate::forest::tests::EXAMPLE_DEGREES.iter().map(|&k| k as i64 - 1).collect();
        let p = LatticePath::new(steps, PathKind::Lukasiewicz).unwrap();
        let js = jump_stats(&p, &[JumpSet::leaves(), JumpSet::internal(), JumpSet::All]);
        assert_eq!(js.delta, 3);
        assert_eq!(js.delta2, Some(2));
        assert_eq!(js.counts, vec![11, 5, 16]);
        assert_eq!(js.sum_kk1, (12 + 6 + 2 + 2) as f64);
        assert_eq!(js.sum_kk1_truncated, (6 + 2 + 2) as f64);
        let flat = LatticePath::new(vec![0, 0, -1], PathKind::Lukasiewicz).unwrap();
        assert_eq!(jump_stats(&flat, &[]).delta2, Some(0));
    }

    #[test]
    fn conditioned_walk_events() {
        let mut rng = stream(7, 0);
        let quad = OffspringLaw::tabulated(&[0.5, 0.0, 0.5]).unwrap();
        let w = sample_conditioned_walk(&quad, 101, 1, &JumpSet::All, DEFAULT_BUDGET, &mut rng).unwrap();
        assert_eq!(w.path.len(), 101);
        LatticePath::new(w.path.steps().to_vec(), PathKind::FirstPassage).unwrap();
        let geo = OffspringLaw::geometric();
        for rho in [1, 3] {
            let w = sample_conditioned_walk(&geo, 50, rho, &JumpSet::leaves(), DEFAULT_BUDGET, &mut rng).unwrap();
            assert_eq!(w.path.terminal(), -(rho as i64));
            assert_eq!(w.path.steps().iter().filter(|&&s| s == -1).count(), 50);
            LatticePath::new(w.path.steps().to_vec(), PathKind::FirstPassage).unwrap();
        }
        assert!(matches!(
            sample_conditioned_walk(&quad, 100, 1, &JumpSet::All, 50, &mut rng),
            Err(Error::Budget { attempts: 50 })
        ));
    }

    #[test]
    fn condensed_walk_events() {
        let mut rng = stream(8, 0);
        let nu = OffspringLaw::subcritical(2.5, 0.7).unwrap();
        let n = 2000;
        let floor = default_floor(&nu, n).unwrap();
        let w = sample_condensed_walk(&nu, n, 2, floor, DEFAULT_BUDGET, &mut rng).unwrap();
        assert_eq!(w.path.len(), n as usize);
        assert_eq!(w.path.terminal(), -2);
        assert!(jump_stats(&w.path, &[]).delta >= floor);
        assert!(sample_condensed_walk(&nu, n, 1, 0, 10, &mut rng).is_err());
    }

    #[test]
    fn tail_conditioned_walk() {
        let mut rng = stream(9, 0);
        let nu = OffspringLaw::cauchy_tail(0.25).unwrap();
        for n in [0, 5, 20] {
            let w = sample_tail_conditioned_walk(&nu, n, 1 << 24, DEFAULT_BUDGET, &mut rng).unwrap();
            let v = w.path.values();
            assert!(v[1..=n as usize].iter().all(|&x| x >= 0));
            assert_eq!(w.path.terminal(), -1);
        }
    }

    #[test]
    fn boltzmann_map_sizes() {
        let mut rng = stream(10, 0);
        let quad = OffspringLaw::from_spec(&FamilySpec::Weights { q: vec![(2, 1.0 / 12.0)] }).unwrap();
        let m = boltzmann_map(&quad, &Conditioning::Faces, 100, 1, DEFAULT_BUDGET, &mut rng).unwrap();
        assert_eq!(m.map.num_faces() - 1, 100);
        let m = boltzmann_map(&quad, &Conditioning::Vertices, 50, 1, DEFAULT_BUDGET, &mut rng).unwrap();
        assert_eq!(m.map.num_vertices(), 51);
        let m = boltzmann_map(&quad, &Conditioning::Edges, 201, 1, DEFAULT_BUDGET, &mut rng).unwrap();
        assert_eq!(m.map.num_edges(), 201);
    }

    #[test]
    fn spec_round_trip() {
        let spec = FamilySpec::Subcritical { beta: 2.5, mean: 0.7 };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"family":"subcritical","beta":2.5,"mean":0.7}"#);
        assert_eq!(serde_json::from_str::<FamilySpec>(&text).unwrap(), spec);
    }
}
