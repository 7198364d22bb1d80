//! Convert trained feed-forward multilayer perceptrons into equivalent,
//! interpretable polynomials.
//!
//! The pipeline has three parts:
//!
//! 1. **Constrained training** ([`train`]): a small MLP trainer whose
//!    hidden-layer weight vectors are projected to norm at most 1 after every
//!    batch. Keeping synaptic potentials near zero is what makes the
//!    Taylor-based conversion accurate.
//! 2. **Extraction** ([`transform`]): walks the network layer by layer,
//!    alternating exact linear combinations with truncated Taylor expansions
//!    of each activation, and returns a polynomial in the original input
//!    variables (optionally one polynomial pair per layer).
//! 3. **Interpretation** ([`Polynomial`]): evaluate the polynomial as a drop-in
//!    surrogate for the network, or rank its coefficients to read off variable
//!    and interaction effects.
//!
//! Every capability has a runnable demo under `examples/`; the `nn2poly`
//! binary chains the same steps as CLI subcommands.

pub mod activation;
pub mod cli;
pub mod combinatorics;
pub mod data;
pub mod error;
pub mod network;
pub mod poly;
pub mod train;
pub mod transform;

pub use activation::{derivative_at_zero, taylor_coefficients, ActivationKind, TaylorCoefficients};
pub use combinatorics::{
    enumerate_partitions, Multiset, MultisetPartition, PartitionCache, Signature,
};
pub use data::{
    gen_blob_data, gen_poly_data, scale_to_unit, split_train_test, DatasetSpec, Response,
    ScalingRecord,
};
pub use error::{Error, Result};
pub use network::{Layer, NetworkSpec};
pub use poly::{canonicalize_label, linear_combine, Monomial, Polynomial};
pub use train::{
    column_norms, constraint_project, train, Architecture, Constraint, EpochStats, Loss,
    NormKind, Optimizer, TrainConfig,
};
pub use transform::{
    activation_step, derive_order_schedule, transform, LayerPolynomials, TaylorOrders,
    TransformConfig, TransformOutput,
};
