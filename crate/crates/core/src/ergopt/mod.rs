//! Max-plus machinery on the cylinder graph: the Bousch operator, maximal
//! potential energy as a maximum mean cycle, calibrated sub-actions, the Mañé
//! normalization, the maximizing set and a Livšic-type coboundary test.

pub mod bousch;
pub mod livsic;
pub mod meancycle;

pub use bousch::{
    bousch_apply, calibrated_subaction, mane_normalize, maximizing_set, BouschState,
    ManeNormalization,
};
pub use livsic::{livsic_test, LivsicVerdict};
pub use meancycle::{max_mean_cycle, max_mean_cycle_any, q_value, ArcGraph, MaxMeanResult, Method};

/// Tolerance for identities that hold exactly on the graph.
pub const GRAPH_TOL: f64 = 1e-10;
/// Tolerance for checks involving realized points.
pub const POINT_TOL: f64 = 1e-8;
