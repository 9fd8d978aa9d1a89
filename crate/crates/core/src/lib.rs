//! Hard instances, exact linear minimization oracles and Frank-Wolfe methods
//! for lower-bound experiments over strongly convex and smoothed sets.
//!
//! The crate is organized bottom-up: [`instances`] builds the sets and
//! objectives, [`lmo`] answers linear minimization queries exactly,
//! [`oracle`] hosts the resisting adversary, [`algorithms`] runs the method
//! suite, and [`harness`] checks the runs against the bounds.

pub mod algorithms;
pub mod error;
pub mod harness;
pub mod instances;
pub mod lmo;
pub mod oracle;
pub mod roots;
pub mod vector;

pub use algorithms::{
    run_method, FirstOrderOracle, IterationRecord, LinearMinimizationOracle, Method, StepKind, Trajectory,
};
pub use error::{Error, Result};
pub use harness::{
    bound_value, run_suite, sweep, BoundSpec, Family, SuiteConfig, SuiteKind, SuiteReport, SweepConfig, SweepRow,
    TheoremId, VerificationReport,
};
pub use instances::{
    build_hard_instance, build_permuted_family, build_smoothed_instance, compute_nu, compute_nu_beta, BaseKind,
    HardInstance, Instance, InstanceDocument, InstanceKind, Permutation, PermutedFamily, QuadraticObjective,
    SmoothedBase, SmoothedInstance, WeightedBallSet,
};
pub use lmo::{lmo_minkowski, lmo_simplex, lmo_weighted_ball, LmoResult, ProjectionResult};
pub use oracle::{CompletionResult, QueryLogEntry, QueryRecord, ResistingOracle};
