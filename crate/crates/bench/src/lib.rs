//! Shared fixtures for the benchmarks.

use mapforest::labels::decorate;
use mapforest::map::build_map;
use mapforest::forest::sample_forest;
use mapforest::rng::{stream, StreamRng};
use mapforest::{DegreeSequence, LabelledForest, PointedMap};

/// Quadrangulation degree sequence with `n` faces and boundary `2ρ`.
pub fn quadrangulation(n: u64, rho: u64) -> DegreeSequence {
    DegreeSequence::angulation(2, n, rho).expect("valid angulation")
}

/// Mixed face degrees with one large face.
pub fn mixed(n: u64) -> DegreeSequence {
    DegreeSequence::new([(1, n / 2), (2, n / 3), (3, n / 6), (n / 10 + 1, 1)], 1).expect("valid profile")
}

pub fn rng(tag: u64) -> StreamRng {
    stream(0xbe4c, tag)
}

pub fn labelled(d: &DegreeSequence, rng: &mut StreamRng) -> LabelledForest {
    decorate(sample_forest(d, rng).expect("forest"), rng)
}

pub fn map(d: &DegreeSequence, rng: &mut StreamRng) -> (LabelledForest, PointedMap) {
    let lf = labelled(d, rng);
    let m = build_map(&lf).expect("map");
    (lf, m)
}
