//! Exact computation of graph Jacobians along cyclic voltage p-towers.
//!
//! The crate builds derived covers of a base graph from integer voltages,
//! computes the Sylow p-subgroups of their Jacobians with an arbitrary
//! precision Smith normal form, fits the growth law
//! `e_m = mu * p^m + lambda * m + nu` to the observed exponents, and evaluates
//! the determinant of the voltage Laplacian over the group ring to decide
//! whether the p-ranks stay bounded.
//!
//! With the default `parallel` feature, per-level tower work and the row
//! updates inside the Smith normal form run on rayon. Disabling the feature
//! gives a purely sequential build with identical results.

pub mod arith;
pub mod error;
pub mod graph;
pub mod iwasawa;
pub mod jacobian;
pub mod laurent;
pub mod matrix;
pub mod par;
pub mod snf;
pub mod tower;
pub mod voltage;

pub use error::{Error, Result};
pub use graph::{Divisor, Graph};
pub use iwasawa::{
    example1_expected, fit_invariants, rank_trajectory_check, stickelberger, verify_example1,
    Example1Verdict, IwasawaFit, RankCheck, RankCheckOutcome, StickelbergerReport, Verdict,
};
pub use jacobian::{
    brute_force_tree_count, is_connected, jacobian, jacobian_with_removed, laplacian, p_sylow,
    reduced_laplacian, spanning_tree_count, InvariantFactors, PSylow,
};
pub use laurent::{Laurent, LaurentMatrix};
pub use matrix::IntegerMatrix;
pub use par::Execution;
pub use snf::{smith_normal_form, smith_normal_form_with, SnfOptions, SnfResult};
pub use tower::{analyze_tower, level_graph, LevelRecord, TowerReport, TowerSpec};
pub use voltage::{
    derive, galois_action, intermediate_cover, voltage_laplacian, DerivedGraph, VoltageAssignment,
    DEFAULT_MAX_VERTICES,
};
