use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix file is empty (missing `R C` header)")]
    MissingHeader,
    #[error("malformed matrix header {0:?}, expected `R C`")]
    BadHeader(String),
    #[error("line {line}: cannot parse {token:?} as a number")]
    BadValue { line: usize, token: String },
    #[error("row {row}: expected {expected} values, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("expected {expected} data rows, found {found}")]
    RowCount { expected: usize, found: usize },
    #[error("{len} values cannot fill a {rows}x{cols} matrix")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("input document set is empty")]
    Empty,
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("document id must be nonempty (record {0})")]
    EmptyId(usize),
    #[error("min_df must be at least 1, got {0}")]
    MinDf(usize),
    #[error("max_df_ratio must lie in (0, 1], got {0}")]
    MaxDfRatio(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{field} {value:?} cannot be written to the TSV format (contains a separator)")]
    Unserializable { field: &'static str, value: String },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("number of topics must be at least 1")]
    NoTopics,
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("corpus contains no tokens")]
    NoTokens,
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("{matrix} row {row} sums to {sum}, expected 1")]
    RowSum { matrix: &'static str, row: usize, sum: f64 },
    #[error("{matrix} row {row} column {col} holds {value}, expected a positive finite probability")]
    InvalidEntry {
        matrix: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{matrix}: {source}")]
    Matrix { matrix: &'static str, source: MatrixError },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Metadata { path: PathBuf, source: serde_json::Error },
}

#[derive(Debug, Error)]
pub enum RerankError {
    #[error("topic {topic} out of range (model has {num_topics} topics)")]
    TopicOutOfRange { topic: usize, num_topics: usize },
    #[error("word {word} out of range (vocabulary size {vocab_size})")]
    WordOutOfRange { word: usize, vocab_size: usize },
    #[error("probability for word {word} in topic {topic} is {value}, log-space scoring needs positive values")]
    NonPositiveProbability { topic: usize, word: usize, value: f64 },
    #[error("word {0} has zero document frequency")]
    ZeroDocFreq(usize),
    #[error("model has {model} words but the vocabulary has {vocab}")]
    VocabMismatch { model: usize, vocab: usize },
    #[error("representation size n must be at least 1")]
    ZeroN,
    #[error("unknown ranking method {0:?} (expected orig, norm, tfidf or idf)")]
    UnknownMethod(String),
    #[error("malformed ranked-topic line: {0:?}")]
    BadLine(String),
}

#[derive(Debug, Error)]
pub enum CoherenceError {
    #[error("co-occurrence window must be at least 2 tokens, got {0}")]
    WindowTooSmall(usize),
    #[error("unknown window {0:?} (expected `document` or an integer >= 2)")]
    BadWindow(String),
    #[error("unknown coherence metric {0:?} (expected npmi or uci)")]
    BadMetric(String),
    #[error("corpus yields no co-occurrence windows")]
    NoWindows,
    #[error("word {0} is outside the vocabulary")]
    UnknownWord(usize),
    #[error("word {0} never occurs in any window")]
    UnseenWord(usize),
    #[error("coherence needs at least 2 words, got {0}")]
    TooFewWords(usize),
    #[error("no candidate topic counts supplied")]
    NoCandidates,
    #[error(transparent)]
    Rerank(#[from] RerankError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("document ordinal {doc} out of range ({num_docs} documents)")]
    DocOutOfRange { doc: usize, num_docs: usize },
    #[error("retrieval depth k must be at least 1")]
    ZeroDepth,
    #[error("BM25 parameter {name} = {value} is invalid")]
    BadParameter { name: &'static str, value: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("relevant document set is empty")]
    EmptyRelevant,
    #[error("corpus carries no gold labels")]
    NoLabels,
    #[error("gold document {0:?} has no row in the model")]
    MissingDoc(String),
    #[error("label depth must be at least 1")]
    ZeroDepth,
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("series {0} has zero variance")]
    ZeroVariance(&'static str),
    #[error(transparent)]
    Rerank(#[from] RerankError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
