//! Recursive domain partitioning.
//!
//! Splits a 1D or 2D dataset into linearly separated subdomains, each
//! described by the least complex power series that fits it well. Candidate
//! boundaries are searched exhaustively (every sample in 1D, every line
//! through two grid-perimeter points in 2D), each side is fitted with the
//! penalized best model of a family, and a split is kept only when it lowers
//! the total effective loss by at least a fraction `q`.
//!
//! ```
//! use rdp::{partition, synth, RdpConfig};
//!
//! let data = synth::gen_two_domain(0.1).unwrap();
//! let tree = partition(&data, &RdpConfig::polynomial_1d(2, 0.15).unwrap()).unwrap();
//! assert_eq!(tree.leaves().len(), 2);
//! ```

pub mod basis;
pub mod cli;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod model;
pub mod sample;
pub mod scoring;
pub mod synth;

pub use basis::{design_matrix, Basis};
pub use engine::{
    accept_split, best_boundary, partition, score_boundary, BoundaryScore, BoundarySearch,
    CandidateId, LossSurface, Node, PartitionTree, RdpConfig,
};
pub use error::{Error, Result};
pub use geometry::{
    candidate_lines_2d, candidates_1d, orient, perimeter_points, split, split_indices, Edge,
    GridSpec, Hyperplane, PerimeterIndex, PerimeterLine, Point2,
};
pub use model::{fit, PowerSeriesModel};
pub use sample::SampleSet;
pub use scoring::{
    argmin_effective, reconstruction_loss, select_model, ModelFamily, PenaltySpec, ScoredModel,
};
