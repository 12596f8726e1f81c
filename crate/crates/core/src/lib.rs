//! Soft-margin SVM training over explicit feature vectors, posed as
//! optimization over zonotopes and reduced convex hulls.
//!
//! The dual of the soft-margin problem asks for the shortest vector in the
//! difference body `P = H₊ ⊖ H₋` of two reduced convex hulls. Both hulls,
//! and the zonotopes `Σ [0, u_i]·(x_i, 1)` they are cross-sections of, admit
//! linear optimization in `O(nd)` time ([`lmo`]). From that oracle this crate
//! builds separation oracles ([`nearest`]), a central-cut ellipsoid engine
//! ([`ellipsoid`]), fixed-μ training ([`trainer`]) and the zero-margin
//! separability measure ([`separability`]). [`reference`] holds brute-force
//! solvers for tiny instances used to check all of the above.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod ellipsoid;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lmo;
pub mod nearest;
pub mod reference;
pub mod separability;
pub mod trainer;

pub use dataset::{
    lift_dataset, polynomial_feature_map, FeatureMapSpec, Label, LabeledDataset, LiftedVector,
};

pub use ellipsoid::{
    ellipsoid_max_coordinate, ellipsoid_minimize, EllipsoidOptions, SolveReport, Termination,
};
pub use error::{Error, Result};
pub use io::{parse_dataset, write_dataset, Format};
pub use linalg::PointSet;
pub use lmo::{
    difference_extreme, hull_extreme, transition_decompose, zonotope_extreme, DifferenceBody,
    HullVertexWitness, LinearOracle, ReducedHull, TransitionReport, Vertex, Zonotope,
};
pub use nearest::{make_separation_oracle, nearest_point, NearestPointResult, Separation};
pub use reference::{
    brute_hard_margin, brute_lmo, brute_nearest, enumerate_hull_vertices, OracleConfig,
};
pub use separability::{margin_at_mu, zero_margin_mu, SeparabilityResult};
pub use trainer::{
    decision_value, kkt_check, line_search_bias, train, train_with, BiasStrategy, KktReport,
    Solver, TrainOptions, TrainedClassifier,
};
