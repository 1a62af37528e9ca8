//! Wavelet-domain fusion of two registered source images.
//!
//! Four pipelines are provided: decimated (DWT) and undecimated (UDWT)
//! two-level Haar decompositions, each fused either with the max-magnitude
//! rule or with a weighted additive rule whose weights come from a
//! deterministic coarse-to-fine search over subband feature vectors. The
//! [`metrics`] module scores fused images with six objective measures.

pub mod cli;
pub mod error;
pub mod features;
pub mod fusion;
pub mod image;
pub mod imgio;
pub mod metrics;
pub mod optimizer;
pub mod synthetic;
pub mod wavelet;

pub use error::{Error, Result};
pub use features::{band_statistics, extract_features, FeatureVector};
pub use fusion::{
    fuse, fuse_bands_max, fuse_bands_weighted, ChannelWeights, FusionMethod, FusionResult,
    FusionRule,
};
pub use image::ImageBuffer;
pub use imgio::{load_image, merge_channels, register_pair, save_image, split_channels};
pub use metrics::{full_report, MetricReport};
pub use optimizer::{fitness_mse, optimize_weights, GaConfig, GaTrace, WeightPair};
pub use wavelet::{
    dwt_forward, dwt_inverse, udwt_forward, udwt_inverse, BandKind, Decomposition, Subband,
    TransformKind,
};
