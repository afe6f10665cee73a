//! Model representation: topologies, transition tensors of orders 1–3, the
//! start-up ramp, GMM emissions, validation and sampling.

mod gmm;
mod model;
mod random;
mod sample;
mod tensor;
mod topology;

pub use gmm::{log_emission, GmmEmission, PreparedGmm};
pub use model::{
    new_model, validate, HmmModel, ValidationReport, Violation, MAX_ORDER, MODEL_FORMAT,
    MODEL_VERSION, SUM_TOLERANCE, VARIANCE_FLOOR,
};
pub use random::random_model;
pub use sample::sample;
pub use tensor::{
    context_count, decode_context, encode_context, shift_context, InitialRamp, TransitionTensor,
};
pub use topology::{ExpandedTopology, History, Topology};
