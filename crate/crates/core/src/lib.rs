//! Topic word re-ranking and its automatic evaluation.
//!
//! The crate turns a labelled document collection into a [`Corpus`], fits or
//! imports a topic model, re-ranks each topic's words with one of four
//! scoring methods, and measures how well each ranking describes its topic by
//! retrieving documents with the ranked words and scoring the result with
//! mean average precision.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the common `f64` instantiation.

pub mod coherence;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod index;
pub mod matrix;
pub mod model;
pub mod rerank;
pub mod scalar;
pub mod synthetic;

pub use coherence::{CoocStats, Metric, Window};
pub use corpus::{build_corpus, tokenize, Corpus, CorpusConfig, RawDocument, Vocabulary};
pub use error::{CoherenceError, CorpusError, EvalError, IndexError, MatrixError, ModelError, RerankError};
pub use eval::{EvalConfig, GoldLabelSet};
pub use index::{Bm25Params, Query};
pub use model::GibbsConfig;
pub use rerank::RankingMethod;
pub use scalar::Scalar;

pub type TopicModel = model::TopicModel<f64>;
pub type TopicModelF32 = model::TopicModel<f32>;
pub type Matrix = matrix::Matrix<f64>;
pub type MatrixF32 = matrix::Matrix<f32>;
pub type RankedTopic = rerank::RankedTopic<f64>;
pub type RankedTopicF32 = rerank::RankedTopic<f32>;
pub type InvertedIndex = index::InvertedIndex<f64>;
pub type InvertedIndexF32 = index::InvertedIndex<f32>;
pub type EvalReport = eval::EvalReport<f64>;
pub type EvalReportF32 = eval::EvalReport<f32>;
pub type CoherenceReport = coherence::CoherenceReport<f64>;
