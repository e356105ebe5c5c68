//! editalign: sentence alignment and edit labeling between document
//! revisions.
//!
//! The crate aligns the sentences of a draft document to the sentences of
//! its final revision, derives a per-sentence edit label (kept, edited, or
//! deleted), and provides the surrounding corpus machinery: record
//! serialization, statistics, stratified splits, class balancing, triplet
//! construction for retriever training, and an evaluation harness.
//!
//! Modules:
//! - [`text_metrics`]: tokenization, BLEU/ROUGE/METEOR/chrF, LCS utilities
//! - [`alignment`]: similarity matrices and the three matching algorithms
//! - [`labeling`]: threshold rules turning matches into edit labels
//! - [`corpus`]: record files, stats, splits, undersampling, triplets
//! - [`analysis`]: match/label F1, entailment mapping, chi-squared test

pub mod alignment;
pub mod analysis;
pub mod corpus;
pub mod error;
pub mod labeling;
pub mod text_metrics;

pub use alignment::{
    BuiltinMetric, MatchAlgorithm, MatchEdge, MatchResult, ScorerSpec, SimilarityMatrix,
};
pub use analysis::{
    ChiSquaredResult, ContingencyTable, EntailmentLabel, LabelEvalReport, MatchEvalReport,
};
pub use corpus::{PatentRecord, SplitSpec, StatsReport, Triplet};
pub use error::{Error, Result};
pub use labeling::{EditLabel, LabelConfig, PerClass};
pub use text_metrics::{MetricScore, TokenSequence};
