use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use mapforest::boltzmann::{
    condensation_report, jump_stats, sample_conditioned_walk, ConditionedWalk, Family, JumpSet, OffspringLaw,
};
use mapforest::continuum::{simulate_forest_process, simulate_label_field, DEFAULT_GRID};
use mapforest::forest::{decode_forest, sample_forest};
use mapforest::labels::{decompose_labels, decorate};
use mapforest::map::{build_map, reroot_to_uniform, verify_euler, EulerReport};
use mapforest::metrics::{bfs, check_cactus, label_distance_violations};
use mapforest::path::PathKind;
use mapforest::rng::{replica_stream, StreamRng};
use mapforest::stats::{ks_two_sample, mean, ols_slope};
use mapforest::{DegreeSequence, LabelledForest, LatticePath, PointedMap};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Fault, ModelSpec, Statistic};

/// Stream tag offset for continuum reference samples.
const CONTINUUM_TAG: u64 = 1 << 62;

struct Instance {
    n: u64,
    replica: usize,
    rho: u64,
    degrees: DegreeSequence,
    lf: LabelledForest,
    map: PointedMap,
    walk: Option<(ConditionedWalk, JumpSet)>,
}

fn law_of(cfg: &ExperimentConfig) -> Result<Option<OffspringLaw>> {
    match &cfg.model {
        ModelSpec::Boltzmann { law, .. } => Ok(Some(OffspringLaw::from_spec(law)?)),
        _ => Ok(None),
    }
}

fn instance(cfg: &ExperimentConfig, law: Option<&OffspringLaw>, n: u64, replica: usize, seed: u64) -> Result<Instance> {
    let mut rng = replica_stream(seed, n, replica as u64);
    let (forest, degrees, walk) = match (&cfg.model, law) {
        (ModelSpec::Boltzmann { conditioning, .. }, Some(law)) => {
            let rho = cfg.rho_for(n, (n as f64).sqrt());
            let a = conditioning.jump_set();
            let w = sample_conditioned_walk(law, n, rho, &a, cfg.budget, &mut rng)
                .with_context(|| format!("conditioned walk n={n} replica={replica}"))?;
            let f = decode_forest(&w.path)?;
            let d = f.degree_sequence()?;
            (f, d, Some((w, a)))
        }
        _ => {
            let d = cfg.degrees(n)?.expect("prescribed degrees");
            (sample_forest(&d, &mut rng)?, d, None)
        }
    };
    let lf = decorate(forest, &mut rng);
    let map = reroot_to_uniform(&build_map(&lf)?, &mut rng)?;
    Ok(Instance { n, replica, rho: degrees.rho(), degrees, lf, map, walk })
}

fn grid(cfg: &ExperimentConfig) -> Vec<(u64, usize)> {
    cfg.sizes.iter().flat_map(|&n| (0..cfg.replicas).map(move |r| (n, r))).collect()
}

#[derive(Serialize)]
struct SampleRecord {
    n: u64,
    replica: usize,
    rho: u64,
    attempts: Option<u64>,
    euler: EulerReport,
}

/// Writes map dumps and encodings for every `(n, replica)`.
pub fn run_sample(cfg: &ExperimentConfig, seed: u64, out: &Path) -> Result<()> {
    let law = law_of(cfg)?;
    let records: Vec<SampleRecord> = grid(cfg)
        .into_par_iter()
        .map(|(n, r)| {
            let inst = instance(cfg, law.as_ref(), n, r, seed)?;
            let dir = out.join(format!("n{n}")).join(format!("r{r}"));
            fs::create_dir_all(&dir)?;
            fs::write(dir.join("map.txt"), inst.map.to_dump_text())?;
            fs::write(dir.join("forest.txt"), inst.lf.forest().to_parent_text())?;
            fs::write(dir.join("labels.txt"), inst.lf.labels_to_text())?;
            fs::write(dir.join("walk.txt"), inst.lf.forest().lukasiewicz().to_text())?;
            Ok(SampleRecord {
                n,
                replica: r,
                rho: inst.rho,
                attempts: inst.walk.as_ref().map(|w| w.0.attempts),
                euler: verify_euler(&inst.map, &inst.degrees)?,
            })
        })
        .collect::<Result<_>>()?;
    fs::create_dir_all(out)?;
    fs::write(out.join("samples.json"), serde_json::to_string_pretty(&records)?)?;
    if let Some(law) = &law {
        if matches!(law.family(), Family::CauchyLoc { .. } | Family::Subcritical { .. }) {
            let reports = cfg
                .sizes
                .iter()
                .map(|&n| {
                    let rho = cfg.rho_for(n, (n as f64).sqrt());
                    condensation_report(law, n, rho, cfg.replicas, cfg.budget, |r| {
                        replica_stream(seed, n | CONTINUUM_TAG >> 1, r as u64)
                    })
                    .map_err(anyhow::Error::from)
                })
                .collect::<Result<Vec<_>>>()?;
            fs::write(out.join("condensation.json"), serde_json::to_string_pretty(&reports)?)?;
        }
    }
    if let Some(bad) = records.iter().find(|r| !r.euler.pass) {
        anyhow::bail!("Euler check failed for n={} replica={}: {:?}", bad.n, bad.replica, bad.euler);
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub n: u64,
    pub replica: usize,
    pub check: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutcome {
    pub seed: u64,
    pub checks: Vec<CheckRow>,
    /// Command line reproducing the first failure.
    pub reproducer: Option<String>,
}

impl VerifyOutcome {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn corrupt(lf: LabelledForest) -> LabelledForest {
    let (f, mut labels) = lf.into_parts();
    if let Some(x) = (0..f.len()).find(|&x| f.is_leaf(x)) {
        labels[x] += 1;
    }
    LabelledForest::from_parts_unchecked(f, labels)
}

fn verify_instance(inst: &Instance, pairs: usize, inject: Option<Fault>, rng: &mut StreamRng) -> Result<Vec<CheckRow>> {
    let row = |check, pass, detail: String| CheckRow { n: inst.n, replica: inst.replica, check, pass, detail };
    let mut rows = Vec::new();

    let e = verify_euler(&inst.map, &inst.degrees)?;
    rows.push(row("euler", e.pass, format!("{e:?}")));

    let lf = match inject {
        Some(Fault::LabelCorruption) => corrupt(inst.lf.clone()),
        None => inst.lf.clone(),
    };
    let bad = label_distance_violations(&inst.map, &lf)?;
    rows.push(row(
        "label_distance",
        bad.is_empty(),
        match bad.first() {
            Some(x) => format!("{} leaves violate the label/distance identity, first is forest vertex {x}", bad.len()),
            None => String::new(),
        },
    ));

    let v = lf.forest().len();
    let ps: Vec<(usize, usize)> = (0..pairs).map(|_| (rng.random_range(0..v), rng.random_range(0..v))).collect();
    let c = check_cactus(&inst.map, &lf, &ps)?;
    rows.push(row("cactus", c.pass(), format!("{:?}", c.witness)));

    let p = decompose_labels(&lf);
    let f = lf.forest();
    let sums = (0..p.l.len()).all(|i| p.l[i] == p.l_tilde[i] + p.boundary[i]);
    let roots = f.roots().iter().all(|&r| p.l_tilde[r as usize + 1] == 0);
    rows.push(row("label_decomposition", sums && roots, String::new()));

    if let Some((w, a)) = &inst.walk {
        let hits = w.path.steps().iter().filter(|&&s| a.contains(s)).count() as u64;
        let fp = LatticePath::new(w.path.steps().to_vec(), PathKind::FirstPassage).is_ok();
        let ok = hits == inst.n && w.path.terminal() == -(inst.rho as i64) && fp;
        rows.push(row("walk_events", ok, format!("hits {hits}, terminal {}", w.path.terminal())));
    }
    Ok(rows)
}

/// Runs every exact identity on fresh samples.
pub fn run_verify(cfg: &ExperimentConfig, seed: u64, out: &Path, config_path: Option<&Path>) -> Result<VerifyOutcome> {
    let law = law_of(cfg)?;
    let nested: Vec<Vec<CheckRow>> = grid(cfg)
        .into_par_iter()
        .map(|(n, r)| {
            let inst = instance(cfg, law.as_ref(), n, r, seed)?;
            let mut rng = replica_stream(seed ^ 0x5eed, n, r as u64);
            verify_instance(&inst, cfg.pairs, cfg.inject, &mut rng)
        })
        .collect::<Result<_>>()?;
    let checks: Vec<CheckRow> = nested.into_iter().flatten().collect();
    let reproducer = checks.iter().find(|c| !c.pass).map(|c| {
        let config = config_path.map_or("<config>".to_string(), |p| p.display().to_string());
        format!(
            "mapforest verify --config {config} --seed {seed} --out <dir>  # fails at n={} replica={} check={}",
            c.n, c.replica, c.check
        )
    });
    let outcome = VerifyOutcome { seed, checks, reproducer };
    fs::create_dir_all(out)?;
    fs::write(out.join("verify.json"), serde_json::to_string_pretty(&outcome)?)?;
    Ok(outcome)
}

#[derive(Debug, Default, Serialize)]
struct Row {
    seed: u64,
    replica: usize,
    n: u64,
    rho: u64,
    vertices: usize,
    edges: usize,
    faces: usize,
    sigma: f64,
    scale: f64,
    diameter_lb: Option<u32>,
    mean_star_dist: Option<f64>,
    mean_pair_dist: Option<f64>,
    delta: Option<i64>,
    delta2: Option<i64>,
    sum_kk1_over_an2: Option<f64>,
    leaf_jumps: Option<u64>,
}

#[derive(Debug, Serialize)]
struct LabelRow {
    seed: u64,
    replica: usize,
    n: u64,
    t: f64,
    value: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    sizes: Vec<u64>,
    mean_star_dist: Vec<f64>,
    slope_star_dist: Option<f64>,
    mean_diameter: Vec<f64>,
    slope_diameter: Option<f64>,
    label_ks: Vec<Option<f64>>,
}

/// Distance scale: disk scaling for finite variance, `1` otherwise.
fn scale_of(d: &DegreeSequence) -> f64 {
    d.disk_scale().unwrap_or(1.0)
}

fn measure(cfg: &ExperimentConfig, law: Option<&OffspringLaw>, inst: &Instance, seed: u64) -> Result<(Row, Vec<LabelRow>, Vec<f64>)> {
    let m = &inst.map.map;
    let mut rng = replica_stream(seed ^ 0xe8, inst.n, inst.replica as u64);
    let mut row = Row {
        seed,
        replica: inst.replica,
        n: inst.n,
        rho: inst.rho,
        vertices: m.num_vertices(),
        edges: m.num_edges(),
        faces: m.num_faces(),
        sigma: inst.degrees.stats()?.sigma(),
        scale: scale_of(&inst.degrees),
        ..Row::default()
    };
    let has = |s| cfg.statistics.contains(&s);
    if has(Statistic::Diameter) || has(Statistic::TwoPoint) {
        let from_star = bfs(m, inst.map.star)?;
        if has(Statistic::Diameter) {
            let far = (0..from_star.len()).max_by_key(|&v| from_star[v]).unwrap();
            row.diameter_lb = Some(*bfs(m, far)?.iter().max().unwrap());
        }
        if has(Statistic::TwoPoint) && m.num_vertices() > 1 {
            let v = m.num_vertices();
            let ys: Vec<usize> = (0..cfg.pairs)
                .map(|_| {
                    let y = rng.random_range(0..v - 1);
                    if y >= inst.map.star { y + 1 } else { y }
                })
                .collect();
            row.mean_star_dist = Some(mean(&ys.iter().map(|&y| from_star[y] as f64).collect::<Vec<_>>()));
            let x = rng.random_range(0..v);
            let from_x = bfs(m, x)?;
            let ds: Vec<f64> = (0..cfg.pairs).map(|_| from_x[rng.random_range(0..v)] as f64).collect();
            row.mean_pair_dist = Some(mean(&ds));
        }
    }
    if has(Statistic::Jumps) {
        if let (Some((w, _)), Some(law)) = (&inst.walk, law) {
            let js = jump_stats(&w.path, &[JumpSet::leaves()]);
            row.delta = Some(js.delta);
            row.delta2 = js.delta2;
            row.leaf_jumps = Some(js.counts[0]);
            row.sum_kk1_over_an2 = Some(js.sum_kk1 / law.a_n(inst.n).powi(2));
        }
    }
    let lscale = scale_of(&inst.degrees);
    let labels = inst.lf.labels();
    let ups = labels.len();
    let mut traces = Vec::new();
    if has(Statistic::Labels) {
        for k in 0..=cfg.label_grid {
            let t = k as f64 / cfg.label_grid as f64;
            let i = ((t * ups as f64) as usize).min(ups - 1);
            traces.push(LabelRow { seed, replica: inst.replica, n: inst.n, t, value: lscale * labels[i] as f64 });
        }
    }
    let marginal = if has(Statistic::LabelKs) {
        (0..cfg.pairs).map(|_| lscale * labels[rng.random_range(0..ups)] as f64).collect()
    } else {
        Vec::new()
    };
    Ok((row, traces, marginal))
}

/// Continuum label marginal `Z^ρ_U` for `ρ` on the disk scale.
fn continuum_marginal(rho: f64, count: usize, per_path: usize, rng: &mut StreamRng) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = simulate_forest_process(rho, DEFAULT_GRID, rng)?;
        let z = simulate_label_field(&x, rng)?;
        for _ in 0..per_path.min(count - out.len()) {
            out.push(z.at(rng.random()));
        }
    }
    Ok(out)
}

/// Per-instance CSV tables plus regression summaries.
pub fn run_experiment(cfg: &ExperimentConfig, seed: u64, out: &Path) -> Result<()> {
    let law = law_of(cfg)?;
    let results: Vec<(Row, Vec<LabelRow>, Vec<f64>)> = grid(cfg)
        .into_par_iter()
        .map(|(n, r)| {
            let inst = instance(cfg, law.as_ref(), n, r, seed)?;
            measure(cfg, law.as_ref(), &inst, seed)
        })
        .collect::<Result<_>>()?;
    fs::create_dir_all(out)?;
    let mut w = csv::Writer::from_path(out.join("instances.csv"))?;
    for (row, _, _) in &results {
        w.serialize(row)?;
    }
    w.flush()?;
    if cfg.statistics.contains(&Statistic::Labels) {
        let mut w = csv::Writer::from_path(out.join("labels.csv"))?;
        for (_, traces, _) in &results {
            for t in traces {
                w.serialize(t)?;
            }
        }
        w.flush()?;
    }

    let mut summary = Summary {
        sizes: cfg.sizes.clone(),
        mean_star_dist: Vec::new(),
        slope_star_dist: None,
        mean_diameter: Vec::new(),
        slope_diameter: None,
        label_ks: Vec::new(),
    };
    for &n in &cfg.sizes {
        let rows: Vec<&(Row, Vec<LabelRow>, Vec<f64>)> = results.iter().filter(|r| r.0.n == n).collect();
        let star: Vec<f64> = rows.iter().filter_map(|r| r.0.mean_star_dist).collect();
        let diam: Vec<f64> = rows.iter().filter_map(|r| r.0.diameter_lb.map(f64::from)).collect();
        summary.mean_star_dist.push(if star.is_empty() { f64::NAN } else { mean(&star) });
        summary.mean_diameter.push(if diam.is_empty() { f64::NAN } else { mean(&diam) });
        let marginal: Vec<f64> = rows.iter().flat_map(|r| r.2.iter().copied()).collect();
        summary.label_ks.push(if marginal.is_empty() {
            None
        } else {
            // Boundary on the scale of the coding walk: ρ / σ.
            let row = &rows[0].0;
            let rho = if row.sigma > 0.0 { row.rho as f64 / row.sigma } else { 0.0 };
            let mut rng = replica_stream(seed, n | CONTINUUM_TAG, 0);
            let reference = continuum_marginal(rho, marginal.len(), cfg.pairs, &mut rng)?;
            Some(ks_two_sample(&marginal, &reference)?.statistic)
        });
    }
    let logs = |ys: &[f64]| -> Option<f64> {
        if cfg.sizes.len() < 2 || ys.iter().any(|y| !(y > &0.0)) {
            return None;
        }
        let lx: Vec<f64> = cfg.sizes.iter().map(|&n| (n as f64).ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        Some(ols_slope(&lx, &ly))
    };
    summary.slope_star_dist = logs(&summary.mean_star_dist);
    summary.slope_diameter = logs(&summary.mean_diameter);
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}
