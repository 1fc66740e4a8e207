//! Random labellings of plane forests.
//!
//! Around every vertex with `k` children the child labels, read left to
//! right and shifted by the parent label, form a bridge of length `k` whose
//! increments are ≥ -1 and whose last value is 0. The planted extra root has
//! label 0 and the `ρ` tree roots as children, so root labels form such a
//! bridge of length `ρ`.

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::forest::PlaneForest;

/// Uniform element of the set of integer bridges `(b_1, ..., b_k)` with
/// `b_k = 0` and increments (from `b_0 = 0`) at least -1.
///
/// Draws a uniform composition of `k` into `k` non-negative parts through a
/// uniform choice of `k - 1` bar positions among `2k - 1` slots; part `c`
/// becomes the increment `c - 1`.
pub fn sample_label_bridge<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Vec<i64>> {
    if k == 0 {
        return Err(Error::Domain("label bridge of length 0".into()));
    }
    let mut out = Vec::with_capacity(k);
    fill_label_bridge(k, 0, rng, |v| out.push(v));
    Ok(out)
}

fn fill_label_bridge<R: Rng + ?Sized>(k: usize, base: i64, rng: &mut R, mut emit: impl FnMut(i64)) {
    let mut bars = k as u64 - 1;
    let mut slots = 2 * k as u64 - 1;
    let mut value = base;
    let mut part = 0i64;
    while bars > 0 {
        if rng.random_range(0..slots) < bars {
            value += part - 1;
            emit(value);
            part = 0;
            bars -= 1;
        } else {
            part += 1;
        }
        slots -= 1;
    }
    // Remaining slots are all stars and belong to the last part, which
    // brings the bridge back to `base`.
    debug_assert_eq!(value + part + slots as i64 - 1, base);
    emit(base);
}

/// `Var(B(k, j)) = 2j(k - j)/(k + 1)` for the uniform label bridge.
pub fn bridge_variance(k: u64, j: u64) -> Result<Ratio<i128>> {
    if j == 0 || j > k {
        return Err(Error::Domain(format!("position {j} outside 1..={k}")));
    }
    let (k, j) = (k as i128, j as i128);
    Ok(Ratio::new(2 * j * (k - j), k + 1))
}

/// Step law of the unconditioned label walk: `P(S_1 = i) = 2^{-(i+2)}` for
/// `i ≥ -1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct GeometricStep;

impl GeometricStep {
    pub fn pmf(&self, i: i64) -> f64 {
        if i < -1 {
            0.0
        } else {
            0.5f64.powi((i + 2) as i32)
        }
    }

    pub const MEAN: f64 = 0.0;
    pub const VARIANCE: f64 = 2.0;

    /// `E[S_j^4]` for the walk after `j` steps.
    pub fn fourth_moment(j: u64) -> f64 {
        let j = j as f64;
        12.0 * j * j + 26.0 * j
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> i64 {
        // Number of failures before the first success of a fair coin, minus 1.
        let bits: u64 = rng.random();
        if bits == 0 {
            return 63 + self.sample(rng);
        }
        bits.trailing_zeros() as i64 - 1
    }
}

/// A plane forest together with the labels of its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledForest {
    forest: PlaneForest,
    labels: Vec<i64>,
}

impl LabelledForest {
    /// Checks every bridge constraint before accepting `labels`.
    pub fn new(forest: PlaneForest, labels: Vec<i64>) -> Result<Self> {
        let lf = LabelledForest { forest, labels };
        lf.validate()?;
        Ok(lf)
    }

    pub fn validate(&self) -> Result<()> {
        let (forest, labels) = (&self.forest, &self.labels);
        if labels.len() != forest.len() {
            return Err(Error::MalformedLabels(format!(
                "{} labels for {} vertices",
                labels.len(),
                forest.len()
            )));
        }
        check_bridge(forest.roots().iter().map(|&r| labels[r as usize]), 0)
            .map_err(|e| Error::MalformedLabels(format!("tree roots: {e}")))?;
        for v in 0..forest.len() {
            if !forest.is_leaf(v) {
                check_bridge(forest.children(v).map(|c| labels[c]), labels[v])
                    .map_err(|e| Error::MalformedLabels(format!("children of {v}: {e}")))?;
            }
        }
        Ok(())
    }

    pub fn forest(&self) -> &PlaneForest {
        &self.forest
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> i64 {
        self.labels[i]
    }

    /// Root labels `b(1), ..., b(ρ)`.
    pub fn root_labels(&self) -> Vec<i64> {
        self.forest.roots().iter().map(|&r| self.labels[r as usize]).collect()
    }

    pub fn min_label(&self) -> i64 {
        self.labels.iter().copied().min().unwrap_or(0)
    }

    pub fn into_parts(self) -> (PlaneForest, Vec<i64>) {
        (self.forest, self.labels)
    }

    /// Labels without validation; used to inject faults in tests of the
    /// verification harness.
    #[doc(hidden)]
    pub fn from_parts_unchecked(forest: PlaneForest, labels: Vec<i64>) -> Self {
        LabelledForest { forest, labels }
    }

    /// One label per line, in depth-first order.
    pub fn labels_to_text(&self) -> String {
        let mut out = String::with_capacity(self.labels.len() * 4);
        for l in &self.labels {
            out.push_str(&l.to_string());
            out.push('\n');
        }
        out
    }
}

fn check_bridge(values: impl Iterator<Item = i64>, base: i64) -> std::result::Result<(), String> {
    let mut prev = base;
    let mut count = 0;
    for v in values {
        if v - prev < -1 {
            return Err(format!("increment {} < -1", v - prev));
        }
        prev = v;
        count += 1;
    }
    if count > 0 && prev != base {
        return Err(format!("ends at {} instead of {base}", prev));
    }
    Ok(())
}

/// Independent uniform label bridges at the planted root and at every
/// internal vertex.
pub fn decorate<R: Rng + ?Sized>(f: PlaneForest, rng: &mut R) -> LabelledForest {
    let mut labels = vec![0i64; f.len()];
    {
        let roots = f.roots();
        let mut i = 0;
        fill_label_bridge(roots.len(), 0, rng, |v| {
            labels[roots[i] as usize] = v;
            i += 1;
        });
    }
    for v in 0..f.len() {
        let k = f.out_degree(v);
        if k == 0 {
            continue;
        }
        let base = labels[v];
        let mut child = v + 1;
        fill_label_bridge(k, base, rng, |value| {
            labels[child] = value;
            child += f.subtree_size(child);
        });
    }
    LabelledForest { forest: f, labels }
}

/// Label process and its split into tree-relative labels and root labels.
///
/// All sequences have length `υ + 1`; index 0 is the planted root and index
/// `i + 1` is vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelProcesses {
    pub l: Vec<i64>,
    /// Label minus the label of the root of its tree.
    pub l_tilde: Vec<i64>,
    /// `b(1 - W̲(i))`: the root label of the tree read off the running
    /// minimum of the Łukasiewicz path.
    pub boundary: Vec<i64>,
    /// Root labels `b(0), b(1), ..., b(ρ)` with `b(0) = b(ρ) = 0`.
    pub b: Vec<i64>,
}

pub fn decompose_labels(lf: &LabelledForest) -> LabelProcesses {
    let f = lf.forest();
    let n = f.len();
    let mut b = Vec::with_capacity(f.rho() + 1);
    b.push(0);
    b.extend(lf.root_labels());
    let w = f.lukasiewicz_values();
    let mut l = Vec::with_capacity(n + 1);
    let mut l_tilde = Vec::with_capacity(n + 1);
    let mut boundary = Vec::with_capacity(n + 1);
    l.push(0);
    l_tilde.push(0);
    boundary.push(0);
    let mut running_min = 0i64;
    for i in 0..n {
        running_min = running_min.min(w[i]);
        let root = f.roots()[f.tree_id(i)] as usize;
        l.push(lf.label(i));
        l_tilde.push(lf.label(i) - lf.label(root));
        boundary.push(b[(1 - running_min) as usize]);
    }
    LabelProcesses { l, l_tilde, boundary, b }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::tests::example_forest;
    use crate::rng::stream;

    /// Labels of the example forest, in depth-first order.
    pub(crate) const EXAMPLE_LABELS: [i64; 16] = [-1, -2, 1, 0, 0, -1, -2, -1, 0, 1, 0, -1, -2, 0, -1, 0];

    #[test]
    fn k1_bridge_is_trivial() {
        let mut rng = stream(1, 0);
        for _ in 0..10 {
            assert_eq!(sample_label_bridge(1, &mut rng).unwrap(), vec![0]);
        }
        assert!(sample_label_bridge(0, &mut rng).is_err());
    }

    #[test]
    fn k2_bridges() {
        let mut rng = stream(2, 0);
        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..3000 {
            *counts.entry(sample_label_bridge(2, &mut rng).unwrap()).or_insert(0) += 1;
        }
        let keys: Vec<_> = counts.keys().cloned().collect();
        assert_eq!(keys, vec![vec![-1, 0], vec![0, 0], vec![1, 0]]);
        assert!(counts.values().all(|&c| c > 850));
    }

    #[test]
    fn variance_formula() {
        assert_eq!(bridge_variance(2, 1).unwrap(), Ratio::new(2, 3));
        assert_eq!(bridge_variance(1, 1).unwrap(), Ratio::from_integer(0));
        assert!(bridge_variance(3, 0).is_err());
        assert!(bridge_variance(3, 4).is_err());
        for k in 1..=200u64 {
            let total: Ratio<i128> = (1..=k).map(|j| bridge_variance(k, j).unwrap()).sum();
            assert_eq!(total, Ratio::new((k * (k - 1)) as i128, 3));
        }
    }

    #[test]
    fn geometric_step_law() {
        let g = GeometricStep;
        let mass: f64 = (-1..80).map(|i| g.pmf(i)).sum();
        let mean: f64 = (-1..80).map(|i| i as f64 * g.pmf(i)).sum();
        let var: f64 = (-1..80).map(|i| (i * i) as f64 * g.pmf(i)).sum();
        let m4: f64 = (-1..200).map(|i| (i as f64).powi(4) * g.pmf(i)).sum();
        assert!((mass - 1.0).abs() < 1e-15);
        assert!((mean - GeometricStep::MEAN).abs() < 1e-15);
        assert!((var - GeometricStep::VARIANCE).abs() < 1e-12);
        assert!((m4 - GeometricStep::fourth_moment(1)).abs() < 1e-9);
        assert_eq!(GeometricStep::fourth_moment(1), 38.0);
    }

    #[test]
    fn example_labelling_is_admissible() {
        let lf = LabelledForest::new(example_forest(), EXAMPLE_LABELS.to_vec()).unwrap();
        let p = decompose_labels(&lf);
        assert_eq!(p.l, vec![0, -1, -2, 1, 0, 0, -1, -2, -1, 0, 1, 0, -1, -2, 0, -1, 0]);
        assert_eq!(p.b, vec![0, -1, -2, 1, 0]);
        for k in 0..p.l.len() {
            assert_eq!(p.l[k], p.l_tilde[k] + p.boundary[k]);
        }
        for &r in lf.forest().roots() {
            assert_eq!(p.l_tilde[r as usize + 1], 0);
        }
    }

    #[test]
    fn rejects_bad_labels() {
        let mut labels = EXAMPLE_LABELS.to_vec();
        labels[5] = -3;
        assert!(matches!(
            LabelledForest::new(example_forest(), labels),
            Err(Error::MalformedLabels(_))
        ));
        let mut labels = EXAMPLE_LABELS.to_vec();
        labels[0] = -3;
        assert!(LabelledForest::new(example_forest(), labels).is_err());
        assert!(LabelledForest::new(example_forest(), vec![0; 3]).is_err());
    }

    #[test]
    fn decorated_forests_are_admissible() {
        let mut rng = stream(3, 0);
        for _ in 0..200 {
            let lf = decorate(example_forest(), &mut rng);
            let (f, labels) = lf.into_parts();
            LabelledForest::new(f, labels).unwrap();
        }
    }
}
