//! Parsing, growth classification, the peripheral recursion and the
//! end-to-end classification report.

pub mod config;
pub mod corpus;
pub mod graph_json;
pub mod growth;
pub mod parse;
pub mod pipeline;
pub mod recursion;
pub mod report;
pub mod stabilize;

use thiserror::Error;

use crate::flaring::FlaringError;
use crate::laminations::LaminationError;

pub use config::AnalysisConfig;
pub use corpus::{
    class_corpus, corpus_generate, Constraints, CorpusError, CorpusSpec, GenerationLog,
};
pub use graph_json::{GraphMapError, GraphMapSpec};
pub use growth::{classify_growth, GrowthReport, GrowthType};
pub use parse::{
    parse_automorphism, parse_automorphism_in, parse_class, parse_word, ParseError,
    ParsedAutomorphism,
};
pub use pipeline::{classify, classify_automorphism};
pub use recursion::{
    analyze_level, parse_restrictions, peripheral_recursion, LevelAnalysis, LevelInput, NodeKind,
    PeripheralNode, Restriction, RestrictionSpec,
};
pub use report::{verdict, ClassificationReport};
pub use stabilize::{stabilize_power, StabilizeReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("peripheral recursion: {0}")]
    Recursion(String),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error(transparent)]
    Lamination(#[from] LaminationError),
    #[error(transparent)]
    Flaring(#[from] FlaringError),
}

impl ClassifyError {
    /// 3 for unreadable input, 2 for everything the analysis refuses.
    pub fn exit_code(&self) -> i32 {
        match self {
            ClassifyError::Parse(_) => 3,
            _ => 2,
        }
    }
}
