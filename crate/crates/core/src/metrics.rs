//! Graph distances on maps and label-based distance functionals.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::labels::LabelledForest;
use crate::map::{BipartiteMap, PointedMap};
use crate::stats::{ks_two_sample, KsReport};

/// Graph distances from `source`.
pub fn bfs(m: &BipartiteMap, source: usize) -> Result<Vec<u32>> {
    let n = m.num_vertices();
    if source >= n {
        return Err(Error::Domain(format!("vertex {source} out of range")));
    }
    let mut dist = vec![u32::MAX; n];
    let mut q = VecDeque::with_capacity(n);
    dist[source] = 0;
    q.push_back(source);
    while let Some(u) = q.pop_front() {
        let du = dist[u] + 1;
        for d in m.darts_at(u) {
            let w = m.tip(d);
            if dist[w] == u32::MAX {
                dist[w] = du;
                q.push_back(w);
            }
        }
    }
    if let Some(v) = dist.iter().position(|&d| d == u32::MAX) {
        return Err(Error::Disconnected(v));
    }
    Ok(dist)
}

/// One distance row per source, computed in parallel.
pub fn bfs_distances(m: &BipartiteMap, sources: &[usize]) -> Result<Vec<Vec<u32>>> {
    sources.par_iter().map(|&s| bfs(m, s)).collect()
}

/// Distances between forest vertices, `d_n(i, j) = d_gr(φ(x_i), φ(x_j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceSample {
    pub pairs: Vec<(usize, usize)>,
    pub values: Vec<u32>,
    pub scale: f64,
}

impl DistanceSample {
    /// BFS once per distinct first index.
    pub fn collect(m: &PointedMap, pairs: Vec<(usize, usize)>, scale: f64) -> Result<Self> {
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.sort_by_key(|&k| pairs[k].0);
        let mut values = vec![0u32; pairs.len()];
        let mut k = 0;
        while k < order.len() {
            let i = pairs[order[k]].0;
            let dist = bfs(&m.map, m.phi[i] as usize)?;
            while k < order.len() && pairs[order[k]].0 == i {
                values[order[k]] = dist[m.phi[pairs[order[k]].1] as usize];
                k += 1;
            }
        }
        Ok(DistanceSample { pairs, values, scale })
    }

    pub fn scaled(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64 * self.scale).collect()
    }

    /// Rows `i,j,d,scaled_d`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,d,scaled_d\n");
        for (&(i, j), &d) in self.pairs.iter().zip(&self.values) {
            writeln!(out, "{i},{j},{d},{}", d as f64 * self.scale).unwrap();
        }
        out
    }
}

/// Range minimum over a fixed array.
#[derive(Clone, Debug)]
pub struct SparseMin<T> {
    levels: Vec<Vec<T>>,
}

impl<T: Copy + PartialOrd> SparseMin<T> {
    pub fn new(values: &[T]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let row = (0..=values.len() - 2 * width)
                .map(|i| if prev[i + width] < prev[i] { prev[i + width] } else { prev[i] })
                .collect();
            levels.push(row);
            width *= 2;
        }
        SparseMin { levels }
    }

    /// Minimum over `lo..=hi`.
    pub fn min(&self, lo: usize, hi: usize) -> T {
        debug_assert!(lo <= hi);
        let k = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let row = &self.levels[k];
        let (a, b) = (row[lo], row[hi + 1 - (1 << k)]);
        if b < a {
            b
        } else {
            a
        }
    }
}

/// A function on `[0, 1]` given by its values on a uniform grid and linear
/// interpolation in between.
#[derive(Clone, Debug)]
pub struct EncodedMetric {
    values: Vec<f64>,
    mins: SparseMin<f64>,
}

impl EncodedMetric {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("encoding needs at least two finite values".into()));
        }
        let mins = SparseMin::new(&values);
        Ok(EncodedMetric { values, mins })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn steps(&self) -> f64 {
        (self.values.len() - 1) as f64
    }

    pub fn eval(&self, s: f64) -> f64 {
        let x = s.clamp(0.0, 1.0) * self.steps();
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let t = x - i as f64;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Minimum over `[s, t]`.
    pub fn min_on(&self, s: f64, t: f64) -> f64 {
        let (s, t) = (s.min(t).clamp(0.0, 1.0), t.max(s).clamp(0.0, 1.0));
        let mut m = self.eval(s).min(self.eval(t));
        let lo = (s * self.steps()).floor() as usize + 1;
        let hi = (t * self.steps()).ceil() as usize;
        if hi >= 1 && lo <= hi - 1 {
            m = m.min(self.mins.min(lo, hi - 1));
        }
        m
    }

    /// `g(s) + g(t) - 2 min_{[s,t]} g`.
    pub fn tree_distance(&self, s: f64, t: f64) -> f64 {
        let (s, t) = (s.min(t), s.max(t));
        (self.eval(s) + self.eval(t) - 2.0 * self.min_on(s, t)).max(0.0)
    }

    /// `g(s) + g(t) - 2 max(min_{[s,t]} g, min_{[0,s] ∪ [t,1]} g)`.
    pub fn belt_distance(&self, s: f64, t: f64) -> f64 {
        let (s, t) = (s.min(t), s.max(t));
        let inner = self.min_on(s, t);
        let outer = self.min_on(0.0, s).min(self.min_on(t, 1.0));
        self.eval(s) + self.eval(t) - 2.0 * inner.max(outer)
    }
}

/// Result of comparing graph distances with the label bounds.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CactusReport {
    pub checked: usize,
    pub upper_violations: usize,
    pub lower_violations: usize,
    pub diagonal: usize,
    pub same_tree: usize,
    pub cross_tree: usize,
    /// First offending pair, if any.
    pub witness: Option<(usize, usize)>,
}

impl CactusReport {
    pub fn pass(&self) -> bool {
        self.upper_violations == 0 && self.lower_violations == 0
    }

    pub fn merge(&mut self, o: &CactusReport) {
        self.checked += o.checked;
        self.upper_violations += o.upper_violations;
        self.lower_violations += o.lower_violations;
        self.diagonal += o.diagonal;
        self.same_tree += o.same_tree;
        self.cross_tree += o.cross_tree;
        self.witness = self.witness.or(o.witness);
    }
}

/// Label bounds for a labelled forest whose roots are placed on a cycle
/// through the planted root.
pub struct CactusBounds<'a> {
    lf: &'a LabelledForest,
    lex: SparseMin<i64>,
    roots: SparseMin<i64>,
}

impl<'a> CactusBounds<'a> {
    pub fn new(lf: &'a LabelledForest) -> Self {
        CactusBounds { lf, lex: SparseMin::new(lf.labels()), roots: SparseMin::new(&lf.root_labels()) }
    }

    fn cyclic_min(&self, i: usize, j: usize) -> (i64, i64) {
        let n = self.lf.forest().len();
        let (a, b) = (i.min(j), i.max(j));
        let inside = self.lex.min(a, b);
        let mut outside = self.lex.min(b, n - 1);
        outside = outside.min(self.lex.min(0, a));
        (inside, outside)
    }

    /// `L(i) + L(j) + 2 - 2 max(min over [i, j], min over [j, i])` with
    /// cyclic depth-first intervals.
    pub fn upper(&self, i: usize, j: usize) -> i64 {
        let l = self.lf.labels();
        let (a, b) = self.cyclic_min(i, j);
        l[i] + l[j] + 2 - 2 * a.max(b)
    }

    /// Minimum label from `x` up to its tree root.
    fn ancestor_min(&self, mut x: usize) -> i64 {
        let f = self.lf.forest();
        let mut m = self.lf.label(x);
        while let Some(p) = f.parent(x) {
            x = p;
            m = m.min(self.lf.label(x));
        }
        m
    }

    /// Minimum label from `x` up to, but excluding, its ancestor `z`; just
    /// the label of `x` when `x = z`.
    fn path_min_below(&self, mut x: usize, z: usize) -> i64 {
        let f = self.lf.forest();
        let mut m = self.lf.label(x);
        while x != z {
            let p = f.parent(x).unwrap();
            if p == z {
                break;
            }
            x = p;
            m = m.min(self.lf.label(x));
        }
        m
    }

    fn lca(&self, mut x: usize, mut y: usize) -> usize {
        let f = self.lf.forest();
        while f.depth(x) > f.depth(y) {
            x = f.parent(x).unwrap();
        }
        while f.depth(y) > f.depth(x) {
            y = f.parent(y).unwrap();
        }
        while x != y {
            x = f.parent(x).unwrap();
            y = f.parent(y).unwrap();
        }
        x
    }

    /// Root labels of trees other than `a..=b`.
    fn roots_outside(&self, a: usize, b: usize) -> i64 {
        let rho = self.lf.forest().rho();
        let mut m = i64::MAX;
        if a > 0 {
            m = m.min(self.roots.min(0, a - 1));
        }
        if b + 1 < rho {
            m = m.min(self.roots.min(b + 1, rho - 1));
        }
        m
    }

    /// `L(i) + L(j) - 2 max(min over ⟦i, j⟧, min over ⟦j, i⟧)`, the two
    /// arcs of the forest-plus-cycle joining `x_i` and `x_j`.
    ///
    /// Internal vertices stand for faces, so the lowest common ancestor of
    /// two vertices of one tree is not on their direct arc.
    pub fn lower(&self, i: usize, j: usize) -> i64 {
        let f = self.lf.forest();
        let l = self.lf.labels();
        if i == j {
            return 0;
        }
        let (ti, tj) = (f.tree_id(i), f.tree_id(j));
        let (direct, around) = if ti == tj {
            let z = self.lca(i, j);
            let direct = self.path_min_below(i, z).min(self.path_min_below(j, z));
            let full = self.ancestor_min(i).min(self.ancestor_min(j));
            (direct, full.min(self.roots_outside(ti, ti)))
        } else {
            let (a, b) = (ti.min(tj), ti.max(tj));
            let both = self.ancestor_min(i).min(self.ancestor_min(j));
            let between = if b > a + 1 { self.roots.min(a + 1, b - 1) } else { i64::MAX };
            (both.min(between), both.min(self.roots_outside(a, b)))
        };
        l[i] + l[j] - 2 * direct.max(around)
    }
}

/// Checks both label bounds on `pairs` of forest vertices.
pub fn check_cactus(m: &PointedMap, lf: &LabelledForest, pairs: &[(usize, usize)]) -> Result<CactusReport> {
    let sample = DistanceSample::collect(m, pairs.to_vec(), 1.0)?;
    let bounds = CactusBounds::new(lf);
    let f = lf.forest();
    let mut r = CactusReport::default();
    for (&(i, j), &d) in pairs.iter().zip(&sample.values) {
        let d = d as i64;
        r.checked += 1;
        if i == j {
            r.diagonal += 1;
        } else if f.tree_id(i) == f.tree_id(j) {
            r.same_tree += 1;
        } else {
            r.cross_tree += 1;
        }
        let mut bad = false;
        if d > bounds.upper(i, j) {
            r.upper_violations += 1;
            bad = true;
        }
        if d < bounds.lower(i, j) {
            r.lower_violations += 1;
            bad = true;
        }
        if bad && r.witness.is_none() {
            r.witness = Some((i, j));
        }
    }
    Ok(r)
}

/// Dense symmetric distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DistMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistMatrix {
    pub fn from_fn(n: usize, d: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = d(i, j);
            }
        }
        DistMatrix { n, data }
    }

    /// All-pairs graph distances; only sensible for small maps.
    pub fn of_map(m: &BipartiteMap) -> Result<Self> {
        let sources: Vec<usize> = (0..m.num_vertices()).collect();
        let rows = bfs_distances(m, &sources)?;
        Ok(DistMatrix::from_fn(m.num_vertices(), |i, j| rows[i][j] as f64))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn scaled(&self, c: f64) -> Self {
        DistMatrix { n: self.n, data: self.data.iter().map(|v| v * c).collect() }
    }
}

/// `sup |d_X(x, x') - d_Y(y, y')|` over pairs of related pairs.
pub fn distortion(corr: &[(usize, usize)], dx: &DistMatrix, dy: &DistMatrix) -> Result<f64> {
    let mut cover_x = vec![false; dx.len()];
    let mut cover_y = vec![false; dy.len()];
    for &(x, y) in corr {
        if x >= dx.len() || y >= dy.len() {
            return Err(Error::NotCorrespondence(format!("pair ({x}, {y}) out of range")));
        }
        cover_x[x] = true;
        cover_y[y] = true;
    }
    if let Some(x) = cover_x.iter().position(|c| !c) {
        return Err(Error::NotCorrespondence(format!("point {x} of the first space is not covered")));
    }
    if let Some(y) = cover_y.iter().position(|c| !c) {
        return Err(Error::NotCorrespondence(format!("point {y} of the second space is not covered")));
    }
    Ok(corr
        .par_iter()
        .map(|&(x, y)| corr.iter().map(|&(a, b)| (dx.get(x, a) - dy.get(y, b)).abs()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max))
}

/// Leaves `x` whose map vertex is not at distance `ℓ(x) - min ℓ + 1` from
/// `★`.
pub fn label_distance_violations(m: &PointedMap, lf: &LabelledForest) -> Result<Vec<usize>> {
    if m.phi.len() != lf.forest().len() {
        return Err(Error::Domain("map and forest have different sizes".into()));
    }
    let dist = bfs(&m.map, m.star)?;
    let min = lf.min_label();
    let f = lf.forest();
    Ok((0..f.len())
        .filter(|&x| f.is_leaf(x) && dist[m.phi[x] as usize] as i64 != lf.label(x) - min + 1)
        .collect())
}

/// Two samples of equal size: `d(X, Y)` for a uniform pair of distinct
/// vertices, and `d(★, Y')` for a uniform `Y' ≠ ★` on an independent map.
pub fn rerooting_samples<R, F>(mut sampler: F, reps: usize, rng: &mut R) -> Result<(Vec<f64>, Vec<f64>)>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Result<PointedMap>,
{
    let mut pair = Vec::with_capacity(reps);
    let mut star = Vec::with_capacity(reps);
    for _ in 0..reps {
        let m = sampler(rng)?;
        let v = m.map.num_vertices();
        let x = rng.random_range(0..v);
        let mut y = rng.random_range(0..v - 1);
        if y >= x {
            y += 1;
        }
        pair.push(bfs(&m.map, x)?[y] as f64);

        let m = sampler(rng)?;
        let v = m.map.num_vertices();
        let mut y = rng.random_range(0..v - 1);
        if y >= m.star {
            y += 1;
        }
        star.push(bfs(&m.map, m.star)?[y] as f64);
    }
    Ok((pair, star))
}

pub fn rerooting_identity_test<R, F>(sampler: F, reps: usize, rng: &mut R) -> Result<KsReport>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Result<PointedMap>,
{
    let (a, b) = rerooting_samples(sampler, reps, rng)?;
    ks_two_sample(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::DegreeSequence;
    use crate::forest::{decode_forest, sample_forest};
    use crate::labels::decorate;
    use crate::map::{build_map, tests::example_map};
    use crate::path::{LatticePath, PathKind};
    use crate::rng::stream;

    fn piecewise() -> EncodedMetric {
        // Grid step 0.2: g(0) = 0, g(0.2) = 1, g(0.4) = 0.5, g(0.6) = 2, g(0.8) = 1, g(1) = 0.
        EncodedMetric::new(vec![0.0, 1.0, 0.5, 2.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn one_edge_distances() {
        let f = decode_forest(&LatticePath::new(vec![-1], PathKind::Lukasiewicz).unwrap()).unwrap();
        let m = build_map(&LabelledForest::new(f, vec![0]).unwrap()).unwrap();
        assert_eq!(bfs(&m.map, 0).unwrap(), vec![0, 1]);
        assert!(bfs(&m.map, 2).is_err());
    }

    #[test]
    fn encoded_metric_examples() {
        let g = piecewise();
        assert_eq!(g.tree_distance(0.3, 0.3), 0.0);
        assert!((g.tree_distance(0.2, 0.6) - 2.0).abs() < 1e-12);
        assert!((g.belt_distance(0.2, 0.6) - 2.0).abs() < 1e-12);
        assert_eq!(g.belt_distance(0.5, 0.5), 0.0);
        assert!((g.eval(0.1) - 0.5).abs() < 1e-12);
        assert!((g.min_on(0.25, 0.55) - 0.5).abs() < 1e-12);
        let flat = EncodedMetric::new(vec![1.0; 5]).unwrap();
        assert_eq!(flat.tree_distance(0.1, 0.9), 0.0);
    }

    #[test]
    fn sparse_min_matches_scan() {
        let v = vec![5, 3, 8, -1, 4, 4, 2, 9, 0, 7];
        let s = SparseMin::new(&v);
        for a in 0..v.len() {
            for b in a..v.len() {
                assert_eq!(s.min(a, b), *v[a..=b].iter().min().unwrap());
            }
        }
    }

    #[test]
    fn cactus_on_example() {
        let (lf, m) = example_map();
        let n = lf.forest().len();
        let pairs: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let r = check_cactus(&m, &lf, &pairs).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(r.diagonal, n);
        let b = CactusBounds::new(&lf);
        assert_eq!(b.upper(3, 3), 2);
        assert_eq!(b.lower(3, 3), 0);
    }

    #[test]
    fn cactus_on_random_maps() {
        let mut rng = stream(21, 0);
        let d = DegreeSequence::new([(1, 4), (2, 10), (3, 5), (5, 2)], 4).unwrap();
        for _ in 0..30 {
            let lf = decorate(sample_forest(&d, &mut rng).unwrap(), &mut rng);
            let m = build_map(&lf).unwrap();
            let n = lf.forest().len();
            let pairs: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
            let r = check_cactus(&m, &lf, &pairs).unwrap();
            assert!(r.pass(), "{r:?}");
        }
    }

    #[test]
    fn parity_is_bipartite() {
        let (_, m) = example_map();
        assert!(m.map.bipartition().is_some());
    }

    #[test]
    fn distortion_basics() {
        let a = DistMatrix::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let b = DistMatrix::from_fn(2, |i, j| if i == j { 0.0 } else { 3.0 });
        let id = [(0, 0), (1, 1)];
        assert_eq!(distortion(&id, &a, &a).unwrap(), 0.0);
        let full = [(0, 0), (0, 1), (1, 0), (1, 1)];
        assert_eq!(distortion(&full, &a, &b).unwrap(), 3.0);
        assert_eq!(distortion(&id, &a, &b).unwrap(), 2.0);
        assert_eq!(distortion(&id, &b, &a).unwrap(), 2.0);
        assert!(matches!(distortion(&[(0, 0)], &a, &b), Err(Error::NotCorrespondence(_))));
    }

    #[test]
    fn rerooting_on_one_edge_map() {
        let f = decode_forest(&LatticePath::new(vec![-1], PathKind::Lukasiewicz).unwrap()).unwrap();
        let m = build_map(&LabelledForest::new(f, vec![0]).unwrap()).unwrap();
        let mut rng = stream(1, 0);
        let r = rerooting_identity_test(|_| Ok(m.clone()), 50, &mut rng).unwrap();
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn distance_sample_csv() {
        let (_, m) = example_map();
        let s = DistanceSample::collect(&m, vec![(0, 1), (0, 0), (5, 2)], 0.5).unwrap();
        assert_eq!(s.values[1], 0);
        let csv = s.to_csv();
        assert!(csv.starts_with("i,j,d,scaled_d\n"));
        assert_eq!(csv.lines().count(), 4);
    }
}
