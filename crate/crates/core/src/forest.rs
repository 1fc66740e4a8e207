//! Uniform plane forests with a prescribed out-degree sequence.
//!
//! A uniform arrangement of the jump multiset is a bridge; cyclically
//! shifting it at a uniform level above its minimum gives the Łukasiewicz
//! path of a uniform forest, which [`decode_forest`] turns into explicit
//! parent/child arrays.
//!
//! Vertices are indexed `0..υ` in depth-first (lexicographic) order. The
//! planted extra root that links the tree roots is implicit.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::degree::DegreeSequence;
use crate::error::{Error, Result};
use crate::path::{LatticePath, PathKind};

/// Above this many steps, bridges are drawn from a sequential urn instead of
/// shuffling an expanded jump array.
pub const SHUFFLE_LIMIT: usize = 10_000_000;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BridgeStrategy {
    /// Fisher–Yates over the expanded multiset.
    Shuffle,
    /// Draw without replacement from per-value counts.
    Urn,
}

/// Uniformly random arrangement of the jumps `k - 1`, each with multiplicity
/// `d(k)` (leaves included).
pub fn sample_degree_bridge<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Result<LatticePath> {
    let upsilon = d.stats()?.upsilon;
    let strategy = if upsilon <= SHUFFLE_LIMIT as u128 {
        BridgeStrategy::Shuffle
    } else {
        BridgeStrategy::Urn
    };
    sample_degree_bridge_using(d, strategy, rng)
}

pub fn sample_degree_bridge_using<R: Rng + ?Sized>(
    d: &DegreeSequence,
    strategy: BridgeStrategy,
    rng: &mut R,
) -> Result<LatticePath> {
    let multiset = d.with_leaves()?;
    let upsilon: u128 = multiset.iter().map(|&(_, c)| c).sum();
    if upsilon >= NONE as u128 {
        return Err(Error::Domain(format!("{upsilon} vertices exceed the supported size")));
    }
    let upsilon = upsilon as usize;
    let steps = match strategy {
        BridgeStrategy::Shuffle => {
            let mut steps = Vec::with_capacity(upsilon);
            for &(k, c) in &multiset {
                steps.extend(std::iter::repeat_n(k as i64 - 1, c as usize));
            }
            steps.shuffle(rng);
            steps
        }
        BridgeStrategy::Urn => {
            let values: Vec<i64> = multiset.iter().map(|&(k, _)| k as i64 - 1).collect();
            let mut urn = Fenwick::new(multiset.iter().map(|&(_, c)| c as u64).collect());
            let mut steps = Vec::with_capacity(upsilon);
            for left in (1..=upsilon as u64).rev() {
                let slot = urn.take(rng.random_range(0..left));
                steps.push(values[slot]);
            }
            steps
        }
    };
    Ok(LatticePath::new_unchecked(steps, PathKind::Bridge))
}

/// Cumulative counts with O(log K) draw-and-remove.
struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(counts: Vec<u64>) -> Self {
        let n = counts.len();
        let mut tree = vec![0; n + 1];
        for (i, c) in counts.into_iter().enumerate() {
            let mut j = i + 1;
            while j <= n {
                tree[j] += c;
                j += j & j.wrapping_neg();
            }
        }
        Fenwick { tree }
    }

    /// Removes the ball at rank `r` (0-based) and returns its slot.
    fn take(&mut self, mut r: u64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= r {
                pos = next;
                r -= self.tree[next];
            }
            step >>= 1;
        }
        let mut j = pos + 1;
        while j <= n {
            self.tree[j] -= 1;
            j += j & j.wrapping_neg();
        }
        pos
    }
}

/// Cyclic shift turning a bridge ending at `-rho` into a first-passage path.
pub fn vervaat_shift<R: Rng + ?Sized>(b: &LatticePath, rng: &mut R) -> Result<LatticePath> {
    vervaat_shift_indexed(b, rng).map(|(w, _)| w)
}

/// As [`vervaat_shift`], also returning the shift index `i ∈ 1..=υ`.
pub fn vervaat_shift_indexed<R: Rng + ?Sized>(b: &LatticePath, rng: &mut R) -> Result<(LatticePath, usize)> {
    let rho = -b.terminal();
    if rho < 1 || b.is_empty() {
        return Err(Error::MalformedPath(format!("bridge ends at {} instead of a negative value", -rho)));
    }
    let p = rng.random_range(0..rho);
    let steps = b.steps();
    let mut w = 0i64;
    let mut min = i64::MAX;
    for &s in steps {
        w += s;
        min = min.min(w);
    }
    let level = min + p;
    let mut w = 0i64;
    let mut shift = 0;
    for (i, &s) in steps.iter().enumerate() {
        w += s;
        if w == level {
            shift = i + 1;
            break;
        }
    }
    debug_assert!(shift > 0, "skip-free bridge must cross every level above its minimum");
    let n = steps.len();
    let start = shift % n;
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&steps[start..]);
    out.extend_from_slice(&steps[..start]);
    Ok((LatticePath::new_unchecked(out, PathKind::Lukasiewicz), shift))
}

/// Plane forest in depth-first order with its Łukasiewicz encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneForest {
    out_degree: Vec<u32>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    tree_id: Vec<u32>,
    child_rank: Vec<u32>,
    subtree_size: Vec<u32>,
    roots: Vec<u32>,
    luka: Vec<i64>,
}

/// Decodes a Łukasiewicz path. Fails as soon as the path reaches its final
/// level early.
pub fn decode_forest(w: &LatticePath) -> Result<PlaneForest> {
    let steps = w.steps();
    let n = steps.len();
    if n == 0 {
        return Err(Error::MalformedPath("empty path".into()));
    }
    if n >= NONE as usize {
        return Err(Error::Domain(format!("{n} vertices exceed the supported size")));
    }
    let rho = -w.terminal();
    if rho < 1 {
        return Err(Error::MalformedPath(format!("terminal value {} is not negative", -rho)));
    }
    let mut f = PlaneForest {
        out_degree: Vec::with_capacity(n),
        parent: Vec::with_capacity(n),
        depth: Vec::with_capacity(n),
        tree_id: Vec::with_capacity(n),
        child_rank: Vec::with_capacity(n),
        subtree_size: vec![1; n],
        roots: Vec::with_capacity(rho as usize),
        luka: Vec::with_capacity(n + 1),
    };
    // (vertex, children still to visit, children already visited)
    let mut stack: Vec<(u32, u32, u32)> = Vec::new();
    let mut value = 0i64;
    for (i, &s) in steps.iter().enumerate() {
        if s < -1 {
            return Err(Error::MalformedPath(format!("step {i} is {s} < -1")));
        }
        if i > 0 && value <= -rho {
            return Err(Error::MalformedPath(format!("reaches {value} at index {i} before the end")));
        }
        f.luka.push(value);
        value += s;
        let k = u32::try_from(s + 1).map_err(|_| Error::Domain(format!("out-degree {} too large", s + 1)))?;
        match stack.last_mut() {
            None => {
                f.parent.push(NONE);
                f.depth.push(1);
                f.child_rank.push(f.roots.len() as u32 + 1);
                f.roots.push(i as u32);
            }
            Some(top) => {
                let (p, left, seen) = *top;
                f.parent.push(p);
                f.depth.push(f.depth[p as usize] + 1);
                f.child_rank.push(seen + 1);
                if left == 1 {
                    stack.pop();
                } else {
                    *top = (p, left - 1, seen + 1);
                }
            }
        }
        f.tree_id.push(f.roots.len() as u32 - 1);
        f.out_degree.push(k);
        if k > 0 {
            stack.push((i as u32, k, 0));
        }
    }
    f.luka.push(value);
    if !stack.is_empty() || f.roots.len() as i64 != rho {
        return Err(Error::MalformedPath("path does not close its last tree".into()));
    }
    for i in (1..n).rev() {
        let p = f.parent[i];
        if p != NONE {
            f.subtree_size[p as usize] += f.subtree_size[i];
        }
    }
    Ok(f)
}

impl PlaneForest {
    /// Number of vertices `υ`.
    pub fn len(&self) -> usize {
        self.out_degree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out_degree.is_empty()
    }

    /// Number of trees `ρ`.
    pub fn rho(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[u32] {
        &self.roots
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_degree[i] as usize
    }

    pub fn out_degrees(&self) -> &[u32] {
        &self.out_degree
    }

    pub fn is_leaf(&self, i: usize) -> bool {
        self.out_degree[i] == 0
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        let p = self.parent[i];
        (p != NONE).then_some(p as usize)
    }

    /// Generation of vertex `i`; tree roots are at height 1.
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i] as usize
    }

    /// 0-based index of the tree containing `i`.
    pub fn tree_id(&self, i: usize) -> usize {
        self.tree_id[i] as usize
    }

    /// 1-based position of `i` among its siblings (roots count as siblings).
    pub fn child_rank(&self, i: usize) -> usize {
        self.child_rank[i] as usize
    }

    pub fn subtree_size(&self, i: usize) -> usize {
        self.subtree_size[i] as usize
    }

    pub fn children(&self, i: usize) -> Children<'_> {
        Children { forest: self, next: i + 1, left: self.out_degree[i] }
    }

    /// The leaf reached from `i` by always moving to the last child. It is
    /// also the last vertex of the subtree of `i` in depth-first order.
    pub fn rightmost_leaf(&self, i: usize) -> usize {
        i + self.subtree_size[i] as usize - 1
    }

    /// Łukasiewicz values `W(0), ..., W(υ)`; `W(i)` is read before vertex `i`.
    pub fn lukasiewicz_values(&self) -> &[i64] {
        &self.luka
    }

    pub fn lukasiewicz(&self) -> LatticePath {
        let steps = self.out_degree.iter().map(|&k| k as i64 - 1).collect();
        LatticePath::new_unchecked(steps, PathKind::Lukasiewicz)
    }

    pub fn degree_sequence(&self) -> Result<DegreeSequence> {
        let mut counts = std::collections::BTreeMap::<u64, u64>::new();
        for &k in self.out_degree.iter().filter(|&&k| k > 0) {
            *counts.entry(k as u64).or_default() += 1;
        }
        if counts.is_empty() {
            DegreeSequence::empty(self.rho() as u64)
        } else {
            DegreeSequence::new(counts, self.rho() as u64)
        }
    }

    /// Parent array dump, one entry per line, `-1` for roots.
    pub fn to_parent_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 6);
        for i in 0..self.len() {
            match self.parent(i) {
                Some(p) => out.push_str(&p.to_string()),
                None => out.push_str("-1"),
            }
            out.push('\n');
        }
        out
    }
}

pub struct Children<'a> {
    forest: &'a PlaneForest,
    next: usize,
    left: u32,
}

impl Iterator for Children<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.left == 0 {
            return None;
        }
        let c = self.next;
        self.left -= 1;
        self.next += self.forest.subtree_size[c] as usize;
        Some(c)
    }
}

/// Height process with the extra root prepended: `H(0) = 0`, `H(i+1)` is the
/// generation of vertex `i`.
pub fn height_process(f: &PlaneForest) -> Vec<u32> {
    let mut h = Vec::with_capacity(f.len() + 1);
    h.push(0);
    h.extend_from_slice(&f.depth);
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LrCounts {
    /// Children of strict ancestors of `x` lying after `x`.
    pub r: u64,
    /// Children of strict ancestors of `x` lying before `x`, other than
    /// ancestors of `x`.
    pub l: u64,
    pub lr: u64,
}

/// Siblings to the right and left of the ancestral line of `i`, inside its
/// tree. `R` is read off the Łukasiewicz path as `W(i) - min_{j ≤ i} W(j)`.
pub fn lr_counts(f: &PlaneForest, i: usize) -> LrCounts {
    let w = f.lukasiewicz_values();
    let root = f.roots[f.tree_id(i)] as usize;
    // Within a tree the running minimum is the value read at its root.
    let r = (w[i] - w[root]) as u64;
    let mut l = 0u64;
    let mut x = i;
    while let Some(p) = f.parent(x) {
        l += f.child_rank(x) as u64 - 1;
        x = p;
    }
    LrCounts { r, l, lr: l + r }
}

/// Draws `h` balls without replacement from an urn holding `k * d(k)` balls
/// labelled `k`; each draw `xi` comes with an independent uniform `chi` in
/// `1..=xi`.
pub fn spine_sample<R: Rng + ?Sized>(d: &DegreeSequence, h: u64, rng: &mut R) -> Result<Vec<(u64, u64)>> {
    let eps = d.stats()?.eps;
    if h as u128 > eps {
        return Err(Error::UrnExhausted { requested: h as u128, available: eps });
    }
    let labels: Vec<u64> = d.iter().map(|(k, _)| k).collect();
    let balls = d.iter().map(|(k, c)| k.checked_mul(c).ok_or(Error::Overflow("urn size")));
    let mut urn = Fenwick::new(balls.collect::<Result<Vec<_>>>()?);
    let mut left = eps as u64;
    let mut out = Vec::with_capacity(h as usize);
    for _ in 0..h {
        let xi = labels[urn.take(rng.random_range(0..left))];
        left -= 1;
        out.push((xi, rng.random_range(1..=xi)));
    }
    Ok(out)
}

/// Bridge → shift → decode.
pub fn sample_forest<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Result<PlaneForest> {
    let b = sample_degree_bridge(d, rng)?;
    let w = vervaat_shift(&b, rng)?;
    decode_forest(&w)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rng::stream;
    use std::collections::HashMap;

    /// Out-degrees of the four-tree example forest, in depth-first order.
    pub(crate) const EXAMPLE_DEGREES: [u32; 16] = [0, 0, 2, 1, 4, 0, 0, 0, 0, 0, 2, 3, 0, 0, 0, 0];

    pub(crate) fn example_forest() -> PlaneForest {
        let steps = EXAMPLE_DEGREES.iter().map(|&k| k as i64 - 1).collect();
        decode_forest(&LatticePath::new(steps, PathKind::Lukasiewicz).unwrap()).unwrap()
    }

    #[test]
    fn example_forest_structure() {
        let f = example_forest();
        assert_eq!(f.rho(), 4);
        assert_eq!(f.roots(), &[0, 1, 2, 10]);
        let parents: Vec<i64> = (0..16).map(|i| f.parent(i).map_or(-1, |p| p as i64)).collect();
        assert_eq!(parents, vec![-1, -1, -1, 2, 3, 4, 4, 4, 4, 2, -1, 10, 11, 11, 11, 10]);
        assert_eq!(f.children(2).collect::<Vec<_>>(), vec![3, 9]);
        assert_eq!(f.children(4).collect::<Vec<_>>(), vec![5, 6, 7, 8]);
        assert_eq!(f.rightmost_leaf(2), 9);
        assert_eq!(f.rightmost_leaf(10), 15);
        assert_eq!(f.rightmost_leaf(3), 8);
        let w = f.lukasiewicz_values();
        assert_eq!(w, &[0, -1, -2, -1, -1, 2, 1, 0, -1, -2, -3, -2, 0, -1, -2, -3, -4]);
        assert_eq!(
            height_process(&f),
            vec![0, 1, 1, 1, 2, 3, 4, 4, 4, 4, 2, 1, 2, 3, 3, 3, 2]
        );
        assert_eq!(f.degree_sequence().unwrap(), DegreeSequence::new([(1, 1), (2, 2), (3, 1), (4, 1)], 4).unwrap());
    }

    #[test]
    fn lr_counts_on_example() {
        let f = example_forest();
        let w = f.lukasiewicz_values();
        // Vertex 5 is the first child of the four-child vertex.
        let c = lr_counts(&f, 5);
        let min = w[..=5].iter().min().unwrap();
        assert_eq!(c.r as i64, w[5] - min);
        assert_eq!(c.r, 4);
        assert_eq!(c.l, 0);
        assert_eq!(lr_counts(&f, 8), LrCounts { r: 1, l: 3, lr: 4 });
        for root in f.roots() {
            assert_eq!(lr_counts(&f, *root as usize).r, 0);
        }
    }

    #[test]
    fn single_leaf_forest() {
        let f = decode_forest(&LatticePath::new(vec![-1], PathKind::Lukasiewicz).unwrap()).unwrap();
        assert_eq!((f.len(), f.rho()), (1, 1));
        assert!(f.is_leaf(0));
        assert_eq!(height_process(&f), vec![0, 1]);
    }

    #[test]
    fn decode_rejects_malformed() {
        let bad = LatticePath::new_unchecked(vec![-1, -1, 1], PathKind::Lukasiewicz);
        assert!(matches!(decode_forest(&bad), Err(Error::MalformedPath(_))));
        let bad = LatticePath::new_unchecked(vec![1, -1], PathKind::Lukasiewicz);
        assert!(decode_forest(&bad).is_err());
        let bad = LatticePath::new_unchecked(vec![], PathKind::Lukasiewicz);
        assert!(decode_forest(&bad).is_err());
    }

    #[test]
    fn bridge_of_empty_sequence() {
        let d = DegreeSequence::empty(1).unwrap();
        let mut rng = stream(1, 0);
        let b = sample_degree_bridge(&d, &mut rng).unwrap();
        assert_eq!(b.steps(), &[-1]);
        let w = vervaat_shift(&b, &mut rng).unwrap();
        assert_eq!(w.steps(), &[-1]);
    }

    #[test]
    fn bridges_have_the_right_multiset() {
        let d = DegreeSequence::new([(1, 3), (2, 5), (7, 2)], 3).unwrap();
        for strategy in [BridgeStrategy::Shuffle, BridgeStrategy::Urn] {
            let mut rng = stream(2, strategy as u64);
            let b = sample_degree_bridge_using(&d, strategy, &mut rng).unwrap();
            let mut counts: HashMap<i64, u64> = HashMap::new();
            for &s in b.steps() {
                *counts.entry(s).or_default() += 1;
            }
            let leaves = d.stats().unwrap().leaves as u64;
            assert_eq!(counts, HashMap::from([(-1, leaves), (0, 3), (1, 5), (6, 2)]));
            assert_eq!(b.terminal(), -3);
        }
    }

    #[test]
    fn shifted_paths_are_first_passage() {
        let d = DegreeSequence::new([(1, 4), (2, 6), (3, 1)], 5).unwrap();
        let mut rng = stream(3, 0);
        for _ in 0..500 {
            let b = sample_degree_bridge(&d, &mut rng).unwrap();
            let (w, shift) = vervaat_shift_indexed(&b, &mut rng).unwrap();
            assert!((1..=b.len()).contains(&shift));
            let w = w.with_kind(PathKind::Lukasiewicz).unwrap();
            let f = decode_forest(&w).unwrap();
            assert_eq!(f.lukasiewicz(), w);
            assert_eq!(f.degree_sequence().unwrap(), d);
        }
    }

    #[test]
    fn spine_urn() {
        let d = DegreeSequence::new([(3, 1)], 1).unwrap();
        let mut rng = stream(4, 0);
        let mut seen = [0u32; 4];
        for _ in 0..3000 {
            let s = spine_sample(&d, 1, &mut rng).unwrap();
            assert_eq!(s[0].0, 3);
            seen[s[0].1 as usize] += 1;
        }
        assert_eq!(seen[0], 0);
        assert!(seen[1..].iter().all(|&c| c > 850));
        assert!(matches!(spine_sample(&d, 4, &mut rng), Err(Error::UrnExhausted { .. })));
        let d = DegreeSequence::new([(1, 2), (2, 3), (5, 1)], 1).unwrap();
        let mut all = spine_sample(&d, 13, &mut rng).unwrap();
        all.sort();
        let labels: Vec<u64> = all.iter().map(|p| p.0).collect();
        assert_eq!(labels, vec![1, 1, 2, 2, 2, 2, 2, 2, 5, 5, 5, 5, 5]);
    }
}
