//! Exact, finite-instance constructions from coarse median geometry.
//!
//! Everything here works over finite point sets with exact rational
//! arithmetic: median graphs and their hyperplanes, K-contractions and the
//! σ metric they induce, Isbell injective hulls with descent chains, the
//! Chepoi–Dragan–Vaxès coarse Helly point on hyperbolic graphs, and
//! quasi-isometric circle embeddings.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line tool live in `helly-tools`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod contraction;
pub mod generate;
pub mod graph;
pub mod hull;
pub mod hyperbolic;
pub mod median;
pub mod metric;
pub mod rational;
pub mod shortcut;

pub use contraction::{CoarseMedianData, ContractionMap, ContractionReport};
pub use graph::{Graph, GraphDistances};
pub use hull::{DescentChain, HullPoint, RadiusFunction};
pub use hyperbolic::{CdvResult, HyperbolicGraph, QuasiconvexSet};
pub use median::{ChainContraction, Hyperplane, MedianGraph};
pub use metric::{FiniteMetric, QiParams};
pub use rational::Q;
pub use shortcut::{CircleMap, WitnessReport};

