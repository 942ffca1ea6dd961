//! Simulated human-in-the-loop perturbation of an LDA topic-modelling
//! pipeline.
//!
//! A baseline run prepares a corpus, trains LDA and scores the result with
//! benchmark and cluster metrics. Simulated user actions then perturb one
//! pipeline stage each; every perturbed run is scored the same way and
//! compared with the baseline through a normalized ℓ1 impact score.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar for the common cases.

pub mod actions;
pub mod corpus;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod preprocess;
pub mod report;
pub mod reuters;
pub mod scalar;
pub mod seed;

pub use scalar::Scalar;

pub type DocumentTermMatrix32 = preprocess::DocumentTermMatrix<f32>;
pub type DocumentTermMatrix64 = preprocess::DocumentTermMatrix<f64>;
pub type TopicModel32 = model::TopicModel<f32>;
pub type TopicModel64 = model::TopicModel<f64>;
pub type MetricsVector32 = metrics::MetricsVector<f32>;
pub type MetricsVector64 = metrics::MetricsVector<f64>;
