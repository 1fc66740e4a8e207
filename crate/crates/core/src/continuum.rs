//! Grid approximations of the continuum objects: Brownian bridges,
//! first-passage bridges, the forest process `X^ρ` and the label field
//! `Z^ρ` built by a Brownian snake on the grid contour.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::EncodedMetric;

/// Default grid resolution.
pub const DEFAULT_GRID: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuumKind {
    Bridge,
    FirstPassage,
    Excursion,
    XRho,
    ZRho,
}

/// Values at `0, 1/N, ..., 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumPath {
    pub kind: ContinuumKind,
    pub rho: f64,
    pub values: Vec<f64>,
}

impl ContinuumPath {
    pub fn grid(&self) -> usize {
        self.values.len() - 1
    }

    /// Value at the grid point nearest below `t`.
    pub fn at(&self, t: f64) -> f64 {
        let i = (t.clamp(0.0, 1.0) * self.grid() as f64).floor() as usize;
        self.values[i.min(self.grid())]
    }

    pub fn to_csv(&self) -> String {
        let n = self.grid() as f64;
        let mut out = String::from("t,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i as f64 / n, v));
        }
        out
    }
}

/// The forest process together with the running infimum of the
/// first-passage bridge that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ForestProcess {
    pub x: ContinuumPath,
    /// `-inf_{s ≤ t} F_s`, non-decreasing from 0 to `ρ`.
    pub root_coord: Vec<f64>,
}

fn check_grid(n: usize, rho: f64) -> Result<()> {
    if n < 2 || !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::Domain(format!("grid {n} with ρ = {rho}")));
    }
    Ok(())
}

/// Brownian bridge from 0 to `-ρ`: `W_t - t W_1 - ρ t`.
pub fn simulate_bridge<R: Rng + ?Sized>(rho: f64, n: usize, rng: &mut R) -> Result<ContinuumPath> {
    check_grid(n, rho)?;
    let sd = (1.0 / n as f64).sqrt();
    let mut w = Vec::with_capacity(n + 1);
    w.push(0.0);
    let mut s = 0.0;
    for _ in 0..n {
        let z: f64 = StandardNormal.sample(rng);
        s += sd * z;
        w.push(s);
    }
    let end = s;
    let values = w
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let t = i as f64 / n as f64;
            v - t * (end + rho)
        })
        .collect::<Vec<_>>();
    let mut values = values;
    values[n] = -rho;
    Ok(ContinuumPath { kind: ContinuumKind::Bridge, rho, values })
}

/// First-passage bridge from 0 to `-ρ` (an excursion when `ρ = 0`), by a
/// cyclic shift of a bridge at the first grid time it reaches
/// `min + ρ U`.
pub fn simulate_first_passage_bridge<R: Rng + ?Sized>(rho: f64, n: usize, rng: &mut R) -> Result<ContinuumPath> {
    let b = simulate_bridge(rho, n, rng)?;
    let v = &b.values;
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let level = min + rho * rng.random::<f64>();
    let tau = v.iter().position(|&x| x <= level).unwrap();
    let base = v[tau];
    let mut values = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let j = tau + k;
        values.push(if j <= n { v[j] - base } else { v[n] - base + v[j - n] });
    }
    values[n] = -rho;
    let kind = if rho == 0.0 { ContinuumKind::Excursion } else { ContinuumKind::FirstPassage };
    Ok(ContinuumPath { kind, rho, values })
}

/// `X^ρ = F - inf F` for a first-passage bridge `F`.
pub fn forest_process(f: &ContinuumPath) -> Result<ForestProcess> {
    if !matches!(f.kind, ContinuumKind::FirstPassage | ContinuumKind::Excursion) {
        return Err(Error::Domain(format!("forest process needs a first-passage path, got {:?}", f.kind)));
    }
    let mut inf: f64 = 0.0;
    let mut x = Vec::with_capacity(f.values.len());
    let mut root_coord = Vec::with_capacity(f.values.len());
    for &v in &f.values {
        inf = inf.min(v);
        x.push(v - inf);
        root_coord.push(-inf);
    }
    Ok(ForestProcess { x: ContinuumPath { kind: ContinuumKind::XRho, rho: f.rho, values: x }, root_coord })
}

pub fn simulate_forest_process<R: Rng + ?Sized>(rho: f64, n: usize, rng: &mut R) -> Result<ForestProcess> {
    forest_process(&simulate_first_passage_bridge(rho, n, rng)?)
}

/// Centred Gaussian process on the grid with covariance
/// `min_{[s, t]} X` given `X`, by a snake along the contour.
pub fn snake<R: Rng + ?Sized>(x: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if x.is_empty() || x.iter().any(|&h| !(h >= -1e-12)) {
        return Err(Error::Domain("snake needs a non-negative height process".into()));
    }
    let mut normal = |var: f64| -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        z * var.max(0.0).sqrt()
    };
    // Ancestral line: strictly increasing heights with their labels.
    let mut stack: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let mut out = Vec::with_capacity(x.len());
    for &h in x {
        let h = h.max(0.0);
        let mut above: Option<(f64, f64)> = None;
        while stack.len() > 1 && stack.last().unwrap().0 > h {
            above = stack.pop();
        }
        let &(h0, z0) = stack.last().unwrap();
        if h > h0 {
            let z = match above {
                // Brownian bridge between the two known heights.
                Some((h1, z1)) => {
                    let r = (h - h0) / (h1 - h0);
                    z0 + r * (z1 - z0) + normal((h - h0) * (h1 - h) / (h1 - h0))
                }
                None => z0 + normal(h - h0),
            };
            stack.push((h, z));
        }
        out.push(stack.last().unwrap().1);
    }
    Ok(out)
}

/// Standard Brownian bridge of duration `ρ` evaluated at the
/// non-decreasing times `ys ⊂ [0, ρ]`.
fn bridge_at<R: Rng + ?Sized>(rho: f64, ys: &[f64], rng: &mut R) -> Vec<f64> {
    let mut out = Vec::with_capacity(ys.len());
    let (mut y0, mut b0) = (0.0, 0.0);
    for &y in ys {
        let y = y.clamp(y0, rho);
        if y > y0 && rho - y0 > 0.0 {
            let mean = b0 * (rho - y) / (rho - y0);
            let var = (y - y0) * (rho - y) / (rho - y0);
            let z: f64 = StandardNormal.sample(rng);
            b0 = mean + z * var.max(0.0).sqrt();
            y0 = y;
        }
        out.push(b0);
    }
    out
}

/// `Z^ρ_t = Z̃_t + √3 b^ρ(-inf_{s ≤ t} F_s)`.
pub fn simulate_label_field<R: Rng + ?Sized>(x: &ForestProcess, rng: &mut R) -> Result<ContinuumPath> {
    if x.x.values.len() != x.root_coord.len() {
        return Err(Error::Domain("inconsistent grid".into()));
    }
    let mut z = snake(&x.x.values, rng)?;
    let rho = x.x.rho;
    if rho > 0.0 {
        let b = bridge_at(rho, &x.root_coord, rng);
        for (zi, bi) in z.iter_mut().zip(b) {
            *zi += 3f64.sqrt() * bi;
        }
    }
    Ok(ContinuumPath { kind: ContinuumKind::ZRho, rho, values: z })
}

/// Distances `d_{2X}(s, t)` in the tree coded by twice the excursion.
pub fn crt_from_excursion(x: &ContinuumPath, pairs: &[(f64, f64)]) -> Result<Vec<f64>> {
    let g = EncodedMetric::new(x.values.iter().map(|v| 2.0 * v).collect())?;
    Ok(pairs.iter().map(|&(s, t)| g.tree_distance(s, t)).collect())
}
