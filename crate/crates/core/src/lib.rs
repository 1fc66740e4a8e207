//! Random bipartite planar maps with a prescribed face-degree sequence and a
//! boundary, sampled through uniformly labelled plane forests.
//!
//! The pipeline is
//! [`forest::sample_degree_bridge`] → [`forest::vervaat_shift`] →
//! [`forest::decode_forest`] → [`labels::decorate`] → [`map::build_map`].
//! Boltzmann-weighted maps and heavy-tailed conditioned walks live in
//! [`boltzmann`]; continuum reference objects in [`continuum`].

pub mod boltzmann;
pub mod continuum;
pub mod degree;
pub mod error;
pub mod forest;
pub mod labels;
pub mod map;
pub mod metrics;
pub mod path;
pub mod rng;
pub mod stats;

pub use boltzmann::{JumpSet, JumpStats, OffspringLaw, WeightSequence};
pub use degree::{DegreeSequence, ScalingFactors, Stats};
pub use error::{Error, Result};
pub use forest::PlaneForest;
pub use labels::LabelledForest;
pub use map::{BipartiteMap, PointedMap, Sign};
pub use metrics::EncodedMetric;
pub use path::{LatticePath, PathKind};
pub use stats::KsReport;
