//! Feedforward networks, geometric deep networks and their pipelines.

pub mod activation;
pub mod gdn;
pub mod net;
pub mod pipeline;
pub mod readout;

pub use activation::{ActivationClass, ActivationInfo, LinearPiece, ACTIVATION_NAMES};
pub use gdn::{gdn_eval, GdnModel};
pub use net::{eval_net, param_count, AffineLayer, FeedforwardNet};
pub use pipeline::{parallelize, pipeline_eval, Branch, Feature, PipelineModel, PipelineOutput};
pub use readout::{
    gauge_chart, homotopy_shrink, project_convex, softmax_chart, ConvexShape, Gauge, HomotopyShape, Readout,
};
