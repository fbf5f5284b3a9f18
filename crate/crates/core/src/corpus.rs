//! Document ingestion: tokenization, stopword removal and document-frequency
//! pruning of the vocabulary.
//!
//! Word ids are assigned in lexicographic word order, so two runs over the same
//! input always produce the same [`Corpus`]. Documents that lose every token
//! to filtering are kept: they still count towards the collection size used by
//! IDF-style weights.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CorpusError;

pub const VOCAB_FILE: &str = "corpus.vocab.tsv";
pub const DOCS_FILE: &str = "corpus.docs.tsv";

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// Splits text into lowercase runs of alphabetic characters. Everything else
/// (digits, punctuation, whitespace) separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|s| !s.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// One input record, as read from a JSON Lines corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    #[serde(default)]
    pub labels: Vec<String>,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            labels: Vec::new(),
        }
    }

    pub fn with_labels<I, L>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = L>,
        L: Into<String>,
    {
        self.labels = labels.into_iter().map(Into::into).collect();
        self
    }
}

/// Filtering thresholds applied by [`build_corpus`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    /// Words found in fewer documents than this are dropped.
    pub min_df: usize,
    /// Words found in more than `max_df_ratio * |D|` documents are dropped.
    pub max_df_ratio: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            min_df: 5,
            max_df_ratio: 0.5,
        }
    }
}

impl CorpusConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.min_df < 1 {
            return Err(CorpusError::MinDf(self.min_df));
        }
        if !(self.max_df_ratio > 0.0 && self.max_df_ratio <= 1.0) {
            return Err(CorpusError::MaxDfRatio(self.max_df_ratio));
        }
        Ok(())
    }

    /// Accepts every token: no minimum and no maximum document frequency.
    pub fn keep_all() -> Self {
        Self {
            min_df: 1,
            max_df_ratio: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    doc_freq: Vec<usize>,
    num_docs: usize,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary, checking that words are unique and that every
    /// document frequency lies in `1..=num_docs`.
    pub fn new(words: Vec<String>, doc_freq: Vec<usize>, num_docs: usize) -> Result<Self, CorpusError> {
        if words.len() != doc_freq.len() {
            return Err(CorpusError::Parse {
                line: 0,
                message: format!("{} words but {} document frequencies", words.len(), doc_freq.len()),
            });
        }
        let mut index = HashMap::with_capacity(words.len());
        for (id, (w, &df)) in words.iter().zip(&doc_freq).enumerate() {
            if index.insert(w.clone(), id).is_some() {
                return Err(CorpusError::Parse {
                    line: id + 1,
                    message: format!("duplicate word {w:?}"),
                });
            }
            if df == 0 || df > num_docs {
                return Err(CorpusError::Parse {
                    line: id + 1,
                    message: format!("doc_freq {df} of {w:?} outside 1..={num_docs}"),
                });
            }
        }
        Ok(Self {
            words,
            doc_freq,
            num_docs,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, id: usize) -> Option<&str> {
        self.words.get(id).map(String::as_str)
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// |D_w|: number of documents containing the word.
    pub fn doc_freq(&self, id: usize) -> Option<usize> {
        self.doc_freq.get(id).copied()
    }

    /// |D|: size of the whole collection, empty documents included.
    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn doc_freqs(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<(), CorpusError> {
        for (w, df) in self.words.iter().zip(&self.doc_freq) {
            check_field("word", w, &['\t', '\n', '\r'])?;
            writeln!(out, "{w}\t{df}")?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub labels: Vec<String>,
    pub tokens: Vec<usize>,
}

impl Document {
    /// True when filtering removed every token.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub documents: usize,
    pub distinct_words: usize,
    pub tokens: usize,
    pub empty_documents: usize,
    pub labelled_documents: usize,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    docs: Vec<Document>,
    vocab: Vocabulary,
    by_id: HashMap<String, usize>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.docs == other.docs && self.vocab == other.vocab
    }
}

impl Corpus {
    /// Assembles a corpus from already tokenized documents. Token ids must be
    /// in range and the vocabulary's document frequencies must match the
    /// documents exactly.
    pub fn from_parts(docs: Vec<Document>, vocab: Vocabulary) -> Result<Self, CorpusError> {
        if docs.is_empty() {
            return Err(CorpusError::Empty);
        }
        if vocab.num_docs != docs.len() {
            return Err(CorpusError::Parse {
                line: 0,
                message: format!("vocabulary records {} documents, found {}", vocab.num_docs, docs.len()),
            });
        }
        let by_id = index_ids(docs.iter().map(|d| d.id.as_str()))?;
        let mut df = vec![0usize; vocab.len()];
        let mut seen = vec![usize::MAX; vocab.len()];
        for (d, doc) in docs.iter().enumerate() {
            for &t in &doc.tokens {
                if t >= vocab.len() {
                    return Err(CorpusError::Parse {
                        line: d + 1,
                        message: format!("token id {t} outside vocabulary of {}", vocab.len()),
                    });
                }
                if seen[t] != d {
                    seen[t] = d;
                    df[t] += 1;
                }
            }
        }
        if let Some(w) = (0..vocab.len()).find(|&w| df[w] != vocab.doc_freq[w]) {
            return Err(CorpusError::Parse {
                line: w + 1,
                message: format!(
                    "word {:?} has doc_freq {} but occurs in {} documents",
                    vocab.words[w], vocab.doc_freq[w], df[w]
                ),
            });
        }
        Ok(Self { docs, vocab, by_id })
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.docs.iter().map(|d| d.tokens.len()).sum()
    }

    /// Position of the document with the given id.
    pub fn ordinal(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn has_labels(&self) -> bool {
        self.docs.iter().any(|d| !d.labels.is_empty())
    }

    /// Returns a copy with every document's labels rewritten by `f`;
    /// duplicate labels produced by the rewrite are merged.
    pub fn map_labels(&self, mut f: impl FnMut(&[String]) -> Vec<String>) -> Self {
        let docs = self
            .docs
            .iter()
            .map(|d| {
                let mut labels = Vec::new();
                for l in f(&d.labels) {
                    if !labels.contains(&l) {
                        labels.push(l);
                    }
                }
                Document {
                    id: d.id.clone(),
                    labels,
                    tokens: d.tokens.clone(),
                }
            })
            .collect();
        Self {
            docs,
            vocab: self.vocab.clone(),
            by_id: self.by_id.clone(),
        }
    }

    pub fn summary(&self) -> CorpusSummary {
        CorpusSummary {
            documents: self.num_docs(),
            distinct_words: self.vocab.len(),
            tokens: self.num_tokens(),
            empty_documents: self.docs.iter().filter(|d| d.is_empty()).count(),
            labelled_documents: self.docs.iter().filter(|d| !d.labels.is_empty()).count(),
        }
    }

    /// Document file: `doc_id<TAB>label1,label2<TAB>space-separated token ids`.
    pub fn write_docs_tsv<W: Write>(&self, mut out: W) -> Result<(), CorpusError> {
        let mut line = String::new();
        for doc in &self.docs {
            check_field("document id", &doc.id, &['\t', '\n', '\r'])?;
            line.clear();
            line.push_str(&doc.id);
            line.push('\t');
            for (i, l) in doc.labels.iter().enumerate() {
                check_field("label", l, &['\t', '\n', '\r', ','])?;
                if i > 0 {
                    line.push(',');
                }
                line.push_str(l);
            }
            line.push('\t');
            for (i, t) in doc.tokens.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                line.push_str(&t.to_string());
            }
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_tsv<V: BufRead, D: BufRead>(vocab_in: V, docs_in: D) -> Result<Self, CorpusError> {
        let mut docs = Vec::new();
        for (i, line) in docs_in.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| CorpusError::Parse { line: i + 1, message };
            let mut fields = line.split('\t');
            let (Some(id), Some(labels), Some(tokens), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(bad("expected 3 tab-separated fields".into()));
            };
            let labels = if labels.is_empty() {
                Vec::new()
            } else {
                labels.split(',').map(str::to_string).collect()
            };
            let tokens = tokens
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| bad(format!("bad token id {t:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            docs.push(Document {
                id: id.to_string(),
                labels,
                tokens,
            });
        }
        let mut words = Vec::new();
        let mut doc_freq = Vec::new();
        for (i, line) in vocab_in.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| CorpusError::Parse { line: i + 1, message };
            let (word, df) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected word<TAB>doc_freq".into()))?;
            let df = df.parse::<usize>().map_err(|_| bad(format!("bad doc_freq {df:?}")))?;
            words.push(word.to_string());
            doc_freq.push(df);
        }
        let vocab = Vocabulary::new(words, doc_freq, docs.len())?;
        Self::from_parts(docs, vocab)
    }

    /// Writes `corpus.vocab.tsv` and `corpus.docs.tsv` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), CorpusError> {
        let vocab_path = dir.join(VOCAB_FILE);
        self.vocab.write_tsv(BufWriter::new(create(&vocab_path)?))?;
        let docs_path = dir.join(DOCS_FILE);
        self.write_docs_tsv(BufWriter::new(create(&docs_path)?))?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self, CorpusError> {
        let vocab = BufReader::new(open(&dir.join(VOCAB_FILE))?);
        let docs = BufReader::new(open(&dir.join(DOCS_FILE))?);
        Self::read_tsv(vocab, docs)
    }
}

/// Tokenizes, removes stopwords and prunes words by document frequency.
pub fn build_corpus(
    raw: &[RawDocument],
    stopwords: &HashSet<String>,
    config: CorpusConfig,
) -> Result<Corpus, CorpusError> {
    config.validate()?;
    if raw.is_empty() {
        return Err(CorpusError::Empty);
    }
    for (i, d) in raw.iter().enumerate() {
        if d.id.is_empty() {
            return Err(CorpusError::EmptyId(i));
        }
    }
    let by_id = index_ids(raw.iter().map(|d| d.id.as_str()))?;

    let tokenized: Vec<Vec<String>> = raw
        .iter()
        .map(|d| {
            tokenize(&d.text)
                .into_iter()
                .filter(|t| !stopwords.contains(t))
                .collect()
        })
        .collect();

    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for tokens in &tokenized {
        let distinct: HashSet<&str> = tokens.iter().map(String::as_str).collect();
        for t in distinct {
            *df.entry(t).or_insert(0) += 1;
        }
    }

    let num_docs = raw.len();
    let max_df = config.max_df_ratio * num_docs as f64;
    let mut words = Vec::new();
    let mut doc_freq = Vec::new();
    let mut ids: HashMap<&str, usize> = HashMap::new();
    // BTreeMap iteration is lexicographic, which fixes the id order
    for (&w, &n) in &df {
        if n >= config.min_df && n as f64 <= max_df {
            ids.insert(w, words.len());
            words.push(w.to_string());
            doc_freq.push(n);
        }
    }

    let docs = raw
        .iter()
        .zip(&tokenized)
        .map(|(d, tokens)| Document {
            id: d.id.clone(),
            labels: d.labels.clone(),
            tokens: tokens.iter().filter_map(|t| ids.get(t.as_str()).copied()).collect(),
        })
        .collect();

    let vocab = Vocabulary {
        index: words.iter().cloned().zip(0..).collect(),
        words,
        doc_freq,
        num_docs,
    };
    Ok(Corpus { docs, vocab, by_id })
}

/// Reads a JSON Lines corpus: one `{"id", "text", "labels"?}` object per line.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<RawDocument>, CorpusError> {
    let mut docs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: RawDocument = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        if doc.id.is_empty() {
            return Err(CorpusError::EmptyId(i + 1));
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn read_jsonl_file(path: &Path) -> Result<Vec<RawDocument>, CorpusError> {
    read_jsonl(BufReader::new(open(path)?))
}

/// One word per line; surrounding whitespace is trimmed, blank lines and
/// `#` comments are skipped, and words are lowercased to match [`tokenize`].
pub fn read_stopwords<R: BufRead>(input: R) -> Result<HashSet<String>, CorpusError> {
    let mut words = HashSet::new();
    for line in input.lines() {
        let line = line?;
        let w = line.trim();
        if !w.is_empty() && !w.starts_with('#') {
            words.insert(w.to_lowercase());
        }
    }
    Ok(words)
}

pub fn read_stopwords_file(path: &Path) -> Result<HashSet<String>, CorpusError> {
    read_stopwords(BufReader::new(open(path)?))
}

/// The bundled English stopword list.
pub fn default_stopwords() -> HashSet<String> {
    read_stopwords(DEFAULT_STOPWORDS.as_bytes()).expect("bundled stopword list is valid UTF-8")
}

fn index_ids<'a>(ids: impl Iterator<Item = &'a str>) -> Result<HashMap<String, usize>, CorpusError> {
    let mut by_id = HashMap::new();
    for (i, id) in ids.enumerate() {
        if by_id.insert(id.to_string(), i).is_some() {
            return Err(CorpusError::DuplicateId(id.to_string()));
        }
    }
    Ok(by_id)
}

fn check_field(field: &'static str, value: &str, forbidden: &[char]) -> Result<(), CorpusError> {
    if value.contains(forbidden) {
        return Err(CorpusError::Unserializable {
            field,
            value: value.to_string(),
        });
    }
    Ok(())
}

fn open(path: &Path) -> Result<File, CorpusError> {
    File::open(path).map_err(|source| CorpusError::File {
        path: PathBuf::from(path),
        source,
    })
}

fn create(path: &Path) -> Result<File, CorpusError> {
    File::create(path).map_err(|source| CorpusError::File {
        path: PathBuf::from(path),
        source,
    })
}
