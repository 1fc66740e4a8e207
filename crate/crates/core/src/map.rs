//! Half-edge maps and the labelled-forest → pointed-map bijection.
//!
//! Edges are stored as pairs of darts `2e, 2e + 1`; `next` is the
//! counter-clockwise successor around the origin of a dart. Faces are the
//! orbits of `d ↦ next[twin(d)]`, which keeps the face on the right of each
//! dart. The root face is the one on the right of the root dart.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::degree::DegreeSequence;
use crate::error::{Error, Result};
use crate::labels::LabelledForest;

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteMap {
    next: Vec<u32>,
    origin: Vec<u32>,
    root: u32,
    vertex_dart: Vec<u32>,
    face_of: Vec<u32>,
    face_degree: Vec<u32>,
}

#[inline]
pub fn twin(d: usize) -> usize {
    d ^ 1
}

impl BipartiteMap {
    /// Builds a map from its rotation system. `next` must permute the darts
    /// and preserve origins.
    pub fn from_rotation(next: Vec<u32>, origin: Vec<u32>, root: u32, num_vertices: usize) -> Result<Self> {
        let n = next.len();
        if n == 0 || n % 2 == 1 || origin.len() != n {
            return Err(Error::Domain(format!("{n} darts, {} origins", origin.len())));
        }
        if root as usize >= n {
            return Err(Error::Domain(format!("root dart {root} out of range")));
        }
        let mut seen = vec![false; n];
        let mut vertex_dart = vec![NONE; num_vertices];
        for d in 0..n {
            let e = next[d] as usize;
            if e >= n || seen[e] {
                return Err(Error::Domain(format!("rotation is not a permutation at dart {d}")));
            }
            seen[e] = true;
            if origin[e] != origin[d] {
                return Err(Error::Domain(format!("dart {d} and its successor have different origins")));
            }
            let v = origin[d] as usize;
            if v >= num_vertices {
                return Err(Error::Domain(format!("origin {v} out of range")));
            }
            if vertex_dart[v] == NONE {
                vertex_dart[v] = d as u32;
            }
        }
        if let Some(v) = vertex_dart.iter().position(|&d| d == NONE) {
            return Err(Error::Disconnected(v));
        }
        let mut face_of = vec![NONE; n];
        let mut face_degree = Vec::new();
        for start in 0..n {
            if face_of[start] != NONE {
                continue;
            }
            let f = face_degree.len() as u32;
            let mut d = start;
            let mut deg = 0;
            while face_of[d] == NONE {
                face_of[d] = f;
                deg += 1;
                d = next[twin(d)] as usize;
            }
            face_degree.push(deg);
        }
        Ok(BipartiteMap { next, origin, root, vertex_dart, face_of, face_degree })
    }

    pub fn num_darts(&self) -> usize {
        self.next.len()
    }

    pub fn num_edges(&self) -> usize {
        self.next.len() / 2
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_dart.len()
    }

    pub fn num_faces(&self) -> usize {
        self.face_degree.len()
    }

    pub fn root(&self) -> usize {
        self.root as usize
    }

    pub fn origin(&self, d: usize) -> usize {
        self.origin[d] as usize
    }

    pub fn tip(&self, d: usize) -> usize {
        self.origin[twin(d)] as usize
    }

    /// Counter-clockwise successor of `d` around its origin.
    pub fn next_around(&self, d: usize) -> usize {
        self.next[d] as usize
    }

    pub fn face_of(&self, d: usize) -> usize {
        self.face_of[d] as usize
    }

    pub fn face_degree(&self, f: usize) -> usize {
        self.face_degree[f] as usize
    }

    pub fn face_degrees(&self) -> &[u32] {
        &self.face_degree
    }

    /// The face on the right of the root dart.
    pub fn external_face(&self) -> usize {
        self.face_of(self.root())
    }

    pub fn external_degree(&self) -> usize {
        self.face_degree(self.external_face())
    }

    /// Degrees of all faces but the external one, sorted.
    pub fn inner_face_degrees(&self) -> Vec<u32> {
        let ext = self.external_face();
        let mut v: Vec<u32> =
            self.face_degree.iter().enumerate().filter(|&(f, _)| f != ext).map(|(_, &d)| d).collect();
        v.sort_unstable();
        v
    }

    /// Darts leaving `v`, counter-clockwise.
    pub fn darts_at(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.vertex_dart[v] as usize;
        let mut d = Some(start);
        std::iter::from_fn(move || {
            let cur = d?;
            let nx = self.next[cur] as usize;
            d = (nx != start).then_some(nx);
            Some(cur)
        })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.darts_at(v).count()
    }

    /// Darts with the external face on their right.
    pub fn boundary_darts(&self) -> Vec<usize> {
        let ext = self.external_face() as u32;
        (0..self.num_darts()).filter(|&d| self.face_of[d] == ext).collect()
    }

    pub fn with_root(&self, root: usize) -> Result<Self> {
        if root >= self.num_darts() {
            return Err(Error::Domain(format!("root dart {root} out of range")));
        }
        Ok(BipartiteMap { root: root as u32, ..self.clone() })
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    /// Two-colouring by BFS parity; `None` if some edge joins two vertices of
    /// the same colour.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let dist = crate::metrics::bfs(self, 0).ok()?;
        let col: Vec<bool> = dist.iter().map(|&d| d % 2 == 1).collect();
        (0..self.num_darts())
            .step_by(2)
            .all(|d| col[self.origin(d)] != col[self.tip(d)])
            .then_some(col)
    }

    /// Removes a set of edges and renumbers the rest, keeping the order of
    /// the survivors and all vertices.
    fn without_edges(&self, drop: &[bool]) -> Result<Self> {
        let n = self.num_darts();
        let mut new_id = vec![NONE; n];
        let mut count = 0u32;
        for e in 0..self.num_edges() {
            if !drop[e] {
                new_id[2 * e] = count;
                new_id[2 * e + 1] = count + 1;
                count += 2;
            }
        }
        let mut next = vec![0u32; count as usize];
        let mut origin = vec![0u32; count as usize];
        for d in 0..n {
            if new_id[d] == NONE {
                continue;
            }
            let mut e = self.next[d] as usize;
            while new_id[e] == NONE {
                e = self.next[e] as usize;
            }
            next[new_id[d] as usize] = new_id[e];
            origin[new_id[d] as usize] = self.origin[d];
        }
        let root = new_id[self.root()];
        if root == NONE {
            return Err(Error::Domain("root edge removed".into()));
        }
        BipartiteMap::from_rotation(next, origin, root, self.num_vertices())
    }

    /// `darts`, then `root`, then one line `twin next origin` per dart.
    pub fn to_dump_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "darts {}", self.num_darts()).unwrap();
        writeln!(out, "vertices {}", self.num_vertices()).unwrap();
        writeln!(out, "root {}", self.root).unwrap();
        for d in 0..self.num_darts() {
            writeln!(out, "{} {} {}", twin(d), self.next[d], self.origin[d]).unwrap();
        }
        out
    }

    /// `u v` per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.num_edges() * 12);
        for e in 0..self.num_edges() {
            writeln!(out, "{} {}", self.origin(2 * e), self.tip(2 * e)).unwrap();
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedMap {
    pub map: BipartiteMap,
    pub star: usize,
    pub sign: Sign,
    /// Map vertex of every forest vertex: the rightmost leaf of its subtree.
    /// Empty when the map did not come from a forest.
    pub phi: Vec<u32>,
}

impl PointedMap {
    /// Derives the sign from distances to `star`.
    pub fn new(map: BipartiteMap, star: usize, phi: Vec<u32>) -> Result<Self> {
        let sign = sign_of(&map, star)?;
        Ok(PointedMap { map, star, sign, phi })
    }

    pub fn to_dump_text(&self) -> String {
        let mut out = self.map.to_dump_text();
        writeln!(out, "star {}", self.star).unwrap();
        out
    }
}

fn sign_of(map: &BipartiteMap, star: usize) -> Result<Sign> {
    let dist = crate::metrics::bfs(map, star)?;
    let r = map.root();
    Ok(if dist[map.tip(r)] < dist[map.origin(r)] { Sign::Negative } else { Sign::Positive })
}

/// The bijection. Forest vertex `c` is a corner of the map vertex holding
/// its rightmost leaf; each corner is joined to the next corner, in cyclic
/// depth-first order, with label one less. Corners of minimal label are
/// joined to the extra vertex `★`, numbered last. The root dart leaves the
/// rightmost leaf of the first tree.
pub fn build_map(lf: &LabelledForest) -> Result<PointedMap> {
    lf.validate()?;
    let f = lf.forest();
    let labels = lf.labels();
    let n = f.len();

    let mut leaf_rank = vec![NONE; n];
    let mut leaves = 0u32;
    for c in 0..n {
        if f.is_leaf(c) {
            leaf_rank[c] = leaves;
            leaves += 1;
        }
    }
    let star = leaves;
    let phi: Vec<u32> = (0..n).map(|c| leaf_rank[f.rightmost_leaf(c)]).collect();

    // Cyclic next-smaller-label corner.
    let mut succ = vec![NONE; n];
    let mut stack: Vec<u32> = Vec::new();
    for i in (0..2 * n).rev() {
        let c = i % n;
        while let Some(&t) = stack.last() {
            if labels[t as usize] >= labels[c] {
                stack.pop();
            } else {
                break;
            }
        }
        if i < n {
            if let Some(&t) = stack.last() {
                if labels[t as usize] != labels[c] - 1 {
                    return Err(Error::MalformedLabels(format!("corner {c} drops by more than one")));
                }
                succ[c] = t;
            }
        }
        stack.push(c as u32);
    }

    // Predecessors of every corner, ordered by cyclic distance after it.
    let mut pred_start = vec![0u32; n + 1];
    for &s in &succ {
        if s != NONE {
            pred_start[s as usize + 1] += 1;
        }
    }
    for c in 0..n {
        pred_start[c + 1] += pred_start[c];
    }
    let mut fill = pred_start.clone();
    let mut preds = vec![0u32; pred_start[n] as usize];
    for (p, &s) in succ.iter().enumerate() {
        if s != NONE {
            preds[fill[s as usize] as usize] = p as u32;
            fill[s as usize] += 1;
        }
    }
    for c in 0..n {
        let list = &mut preds[pred_start[c] as usize..pred_start[c + 1] as usize];
        let split = list.partition_point(|&p| (p as usize) < c);
        list.rotate_left(split);
    }

    // Corners of each vertex in depth-first order.
    let num_vertices = leaves as usize + 1;
    let mut corner_start = vec![0u32; num_vertices + 1];
    for &v in &phi {
        corner_start[v as usize + 1] += 1;
    }
    for v in 0..leaves as usize {
        corner_start[v + 1] += corner_start[v];
    }
    let mut fill = corner_start.clone();
    let mut corners = vec![0u32; n];
    for (c, &v) in phi.iter().enumerate() {
        corners[fill[v as usize] as usize] = c as u32;
        fill[v as usize] += 1;
    }

    let darts = 2 * n;
    let mut next = vec![NONE; darts];
    let mut origin = vec![NONE; darts];
    let mut ring: Vec<u32> = Vec::new();
    let mut close_ring = |ring: &mut Vec<u32>, v: u32| {
        for (i, &d) in ring.iter().enumerate() {
            next[d as usize] = ring[(i + 1) % ring.len()];
            origin[d as usize] = v;
        }
        ring.clear();
    };
    for v in 0..leaves {
        let cs = &corners[corner_start[v as usize] as usize..corner_start[v as usize + 1] as usize];
        for &c in cs.iter().rev() {
            ring.push(2 * c);
            ring.extend(
                preds[pred_start[c as usize] as usize..pred_start[c as usize + 1] as usize].iter().map(|&p| 2 * p + 1),
            );
        }
        close_ring(&mut ring, v);
    }
    ring.extend((0..n as u32).filter(|&c| succ[c as usize] == NONE).map(|c| 2 * c + 1));
    close_ring(&mut ring, star);
    debug_assert!(next.iter().all(|&d| d != NONE));

    // The out-dart of the rightmost leaf of a tree has the root face on its
    // right.
    let root = 2 * f.rightmost_leaf(f.roots()[0] as usize) as u32;
    let map = BipartiteMap::from_rotation(next, origin, root, num_vertices)?;
    Ok(PointedMap { map, star: star as usize, sign: Sign::Negative, phi })
}

/// Outcome of the structural checks on a built map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerReport {
    pub edges: usize,
    pub expected_edges: u128,
    pub vertices: usize,
    pub expected_vertices: u128,
    pub inner_faces: usize,
    pub expected_inner_faces: u128,
    pub external_degree: usize,
    pub expected_external_degree: u128,
    pub degrees_match: bool,
    pub euler: i64,
    pub pass: bool,
}

pub fn verify_euler(m: &PointedMap, d: &DegreeSequence) -> Result<EulerReport> {
    let s = d.stats()?;
    let map = &m.map;
    let mut expected: Vec<u32> = Vec::new();
    for (k, c) in d.iter() {
        expected.extend(std::iter::repeat_n(2 * k as u32, c as usize));
    }
    expected.sort_unstable();
    let degrees_match = map.inner_face_degrees() == expected;
    let mut r = EulerReport {
        edges: map.num_edges(),
        expected_edges: s.upsilon,
        vertices: map.num_vertices(),
        expected_vertices: s.leaves + 1,
        inner_faces: map.num_faces() - 1,
        expected_inner_faces: s.faces,
        external_degree: map.external_degree(),
        expected_external_degree: 2 * d.rho() as u128,
        degrees_match,
        euler: map.euler_characteristic(),
        pass: false,
    };
    r.pass = r.edges as u128 == r.expected_edges
        && r.vertices as u128 == r.expected_vertices
        && r.inner_faces as u128 == r.expected_inner_faces
        && r.external_degree as u128 == r.expected_external_degree
        && r.degrees_match
        && r.euler == 2;
    Ok(r)
}

/// Moves the root to a uniform dart among the `2ρ` with the external face
/// on their right.
pub fn reroot_to_uniform<R: Rng + ?Sized>(m: &PointedMap, rng: &mut R) -> Result<PointedMap> {
    let boundary = m.map.boundary_darts();
    let root = boundary[rng.random_range(0..boundary.len())];
    PointedMap::new(m.map.with_root(root)?, m.star, m.phi.clone())
}

/// Collapses every inner face of degree 2 onto one of its edges. The edge
/// with the smaller index survives, and the root edge always survives.
pub fn glue_degree_two(m: &BipartiteMap) -> Result<BipartiteMap> {
    let mut map = m.clone();
    loop {
        let ext = map.external_face();
        let root_edge = map.root() / 2;
        let mut first = vec![NONE; map.num_faces()];
        let mut drop = vec![false; map.num_edges()];
        let mut any = false;
        for d in 0..map.num_darts() {
            let f = map.face_of(d);
            if f == ext || map.face_degree(f) != 2 {
                continue;
            }
            if first[f] == NONE {
                first[f] = d as u32;
                continue;
            }
            let (a, b) = (first[f] as usize / 2, d / 2);
            if a == b {
                continue;
            }
            let key = |e: usize| if e == root_edge { -1 } else { e as i64 };
            drop[if key(a) > key(b) { a } else { b }] = true;
            any = true;
        }
        if !any {
            return Ok(map);
        }
        map = map.without_edges(&drop)?;
    }
}

/// Vertices reachable from `v`, for connectivity checks.
#[cfg(test)]
pub(crate) fn component_size(m: &BipartiteMap, v: usize) -> usize {
    let mut seen = vec![false; m.num_vertices()];
    let mut q = std::collections::VecDeque::from([v]);
    seen[v] = true;
    let mut count = 0;
    while let Some(u) = q.pop_front() {
        count += 1;
        for d in m.darts_at(u) {
            let w = m.tip(d);
            if !seen[w] {
                seen[w] = true;
                q.push_back(w);
            }
        }
    }
    count
}
