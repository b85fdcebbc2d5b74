//! Desk-scale stand-in for the evidential networks: synthetic two-view
//! data, linear softplus evidence heads, and a deterministic trainer that
//! exercises the losses and the fusion pipeline end to end.

mod data;
mod model_io;
mod train;

pub use data::{
    generate_dataset, MultiViewDataset, SampleMeta, SyntheticConfig, View, N_CLASSES,
};
pub use train::{
    sigmoid, softplus, train, EpochTrace, EvidenceHead, Inference, Pipeline, PipelineConfig,
    N_VIEWS, VIEW_PAIRS,
};
