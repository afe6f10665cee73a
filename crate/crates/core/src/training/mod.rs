//! Model initialization and Baum-Welch re-estimation for orders 1–3.

mod accumulate;
mod baum_welch;
mod config;
mod init;
mod kmeans;

pub use accumulate::{accumulate, accumulate_all, Accumulators, GmmStats};
pub use baum_welch::{baum_welch, reestimate, train, TrainOutcome};
pub use config::{TrainConfig, DEAD_COMPONENT_WEIGHT, PROB_FLOOR};
pub use init::init_model;
pub use kmeans::{kmeans, KMeans};

#[cfg(test)]
mod tests;
