//! Multi-label feature selection by maximizing a sum-sum diversity term plus a
//! monotone submodular relevance term.
//!
//! The diversity term sums the normalized variation of information over every
//! unordered pair of selected features. The relevance term sums, per label, the
//! `p` largest normalized mutual information values between the selected
//! features and that label. Selection runs centralized ([`greedy`]), as a
//! randomized composable core-set over a simulated machine pool, or as a
//! bounded-memory stream ([`coreset`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`, which is what the CLI uses.

pub mod coreset;
pub mod data;
pub mod error;
pub mod greedy;
pub mod info;
pub mod metrics;
pub mod objective;
pub mod oracle;
pub mod scalar;

pub use error::{DataError, SelectError};
pub use scalar::Scalar;

pub use coreset::{
    centralized_select, default_machine_count, distributed_select, random_partition,
    streaming_select, DatasetStream, PartitionPlan, RunMode, RunReport,
};
pub use data::{BinningSpec, BinningStrategy, Dataset, DiscreteColumn, FeatureId};
pub use greedy::GreedyVariant;
pub use metrics::{multilabel_metrics, MultilabelScores, PredictionMatrix};
pub use objective::ObjectiveParams;

/// Information cache over `f64`.
pub type InfoCache = info::InfoCache<f64>;
/// Normalized mutual information table over `f64`.
pub type MiTable = objective::MiTable<f64>;
/// Objective configuration over `f64`.
pub type ObjectiveConfig = objective::ObjectiveConfig<f64>;
/// Incremental greedy state over `f64`.
pub type SelectionState = objective::SelectionState<f64>;
/// Per-label top-`p` tracker over `f64`.
pub type TopPTracker = objective::TopPTracker<f64>;

/// Single-precision variants, mostly useful for memory-bound experiments.
pub type InfoCacheF32 = info::InfoCache<f32>;
pub type ObjectiveConfigF32 = objective::ObjectiveConfig<f32>;
