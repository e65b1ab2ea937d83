//! AND-OR tree analysis of LT decoding for the cooperative schemes, and
//! throughput upper bounds.

pub mod andor;
pub mod bounds;
pub mod fcc;
pub mod pcc;
pub mod predict;

pub use andor::{
    and_or_iterate, AnalysisError, AndOrModel, AndOrResult, Kernel, PrecodeGroup, Stream, StreamTerm,
    Term,
};
pub use bounds::{fcc_throughput_bound, pcc_throughput_bound, PccBound};
pub use fcc::{fcc_2user_model, fcc_2user_model_printed, fcc_muser_model, type_counts, UserSet};
pub use pcc::{
    pcc_destination_model, pcc_user_recursion, PartsLayout, PccDestinationModel, PccUserTrajectory,
};
pub use predict::{predict, Prediction, Predictor};
