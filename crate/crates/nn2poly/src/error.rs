//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label index {index} out of range for p = {p}")]
    LabelIndexOutOfRange { index: u32, p: usize },

    #[error("label {label:?} mixes the intercept marker 0 with variable indices")]
    MixedInterceptLabel { label: Vec<u32> },

    #[error("label {label} has order {order}, above the polynomial's max order {max_order}")]
    LabelOrderTooHigh {
        label: String,
        order: usize,
        max_order: usize,
    },

    #[error("duplicate label {label} in polynomial")]
    DuplicateLabel { label: String },

    #[error("value matrix has {rows} rows but there are {labels} labels")]
    ValueRowMismatch { rows: usize, labels: usize },

    #[error("{context}: expected {expected} columns, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("polynomials passed to linear_combine do not share one label list")]
    LabelSpaceMismatch,

    #[error("linear_combine needs {expected} weights (bias first), found {found}")]
    WeightLengthMismatch { expected: usize, found: usize },

    #[error("the intercept label has no multiset")]
    InterceptHasNoMultiset,

    #[error("no cached partitions for signature {signature:?} (cache built for order {max_order})")]
    SignatureMissing {
        signature: Vec<u32>,
        max_order: usize,
    },

    #[error("partition count exceeded the ceiling of {ceiling}; lower max_order")]
    PartitionCeilingExceeded { ceiling: usize },

    #[error("unsupported activation '{name}' (supported: tanh, sigmoid, softplus, linear)")]
    UnsupportedActivation { name: String },

    #[error("Taylor order {q} is invalid here ({reason})")]
    InvalidTaylorOrder { q: usize, reason: &'static str },

    #[error("layer {layer} has {outputs} outputs but layer {next_layer} expects {next_inputs} inputs")]
    LayerChainMismatch {
        layer: usize,
        outputs: usize,
        next_layer: usize,
        next_inputs: usize,
    },

    #[error("layer {layer} contains a non-finite weight")]
    NonFiniteWeight { layer: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid transform config: {0}")]
    InvalidConfig(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid architecture '{spec}': {reason}")]
    InvalidArchitecture { spec: String, reason: String },

    #[error("column {column} is constant; cannot scale to [-1, 1]")]
    ConstantColumn { column: usize },

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("invalid value in '{field}': {reason}")]
    InvalidValue { field: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 validation, 3 numeric failure,
    /// 4 resource ceiling.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFiniteLoss { .. } => 3,
            Error::PartitionCeilingExceeded { .. } => 4,
            _ => 2,
        }
    }
}
