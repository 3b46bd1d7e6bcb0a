//! Application pipelines: entity clustering, semi-supervised
//! classification and short-time transforms of point-cloud sequences.

mod classify;
mod cluster;
mod multiplex;
mod stmgst;

pub use classify::{
    classify_semisupervised, classify_semisupervised_with, ClassifierKind, ClassifyOptions, ClassifyResult,
};
pub use cluster::{
    adjusted_rand_index, highpass_entity_probe, largest_gap_k, mln_spectral_cluster, segment_from_features,
    ClusterBasis, ClusterResult, KChoice,
};
pub use multiplex::{build_feature_multiplex, MultiplexParams};
pub use stmgst::{
    short_time_mgst, short_time_mgst_with, window_count, Channel, Frame, LabeledPoint, Spectrogram, StftOptions,
};
