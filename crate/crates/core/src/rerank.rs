//! Topic word scoring and re-ranking.
//!
//! Four scores are available for a word `w` in topic `t`, where `p(w|t)` is
//! the topic-word probability and `T` the number of topics:
//!
//! * [`RankingMethod::Orig`]: `p(w|t)`, the usual most-probable-words list.
//! * [`RankingMethod::Norm`]: `p(w|t) / sum_j p(w|j)`.
//! * [`RankingMethod::TfIdf`]: `p(w|t) * ln(p(w|t) / geomean_j p(w|j))`.
//! * [`RankingMethod::Idf`]: `p(w|t) * ln(|D| / |D_w|)`.
//!
//! Logarithms are natural. The geometric mean is evaluated in log space so
//! that large topic counts do not underflow the product. Equal scores are
//! ordered by ascending word id.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::RerankError;
use crate::model::TopicModel;
use crate::scalar::Scalar;

/// Base of the logarithms used by the TF-IDF and IDF scores.
pub const LOG_BASE: &str = "e";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankingMethod {
    Orig,
    Norm,
    TfIdf,
    Idf,
}

impl RankingMethod {
    /// Every method, in reporting order.
    pub const ALL: [RankingMethod; 4] = [Self::Orig, Self::Norm, Self::TfIdf, Self::Idf];

    pub fn name(self) -> &'static str {
        match self {
            Self::Orig => "orig",
            Self::Norm => "norm",
            Self::TfIdf => "tfidf",
            Self::Idf => "idf",
        }
    }
}

impl fmt::Display for RankingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RankingMethod {
    type Err = RerankError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "orig" => Ok(Self::Orig),
            "norm" => Ok(Self::Norm),
            "tfidf" | "tf-idf" => Ok(Self::TfIdf),
            "idf" => Ok(Self::Idf),
            _ => Err(RerankError::UnknownMethod(s.to_string())),
        }
    }
}

fn check_indices<S: Scalar>(model: &TopicModel<S>, topic: usize, word: usize) -> Result<(), RerankError> {
    if topic >= model.num_topics() {
        return Err(RerankError::TopicOutOfRange {
            topic,
            num_topics: model.num_topics(),
        });
    }
    if word >= model.vocab_size() {
        return Err(RerankError::WordOutOfRange {
            word,
            vocab_size: model.vocab_size(),
        });
    }
    Ok(())
}

pub fn score_orig<S: Scalar>(model: &TopicModel<S>, topic: usize, word: usize) -> Result<S, RerankError> {
    check_indices(model, topic, word)?;
    Ok(model.phi().row(topic)[word])
}

pub fn score_norm<S: Scalar>(model: &TopicModel<S>, topic: usize, word: usize) -> Result<S, RerankError> {
    check_indices(model, topic, word)?;
    let column_sum: S = model.phi().column(word).sum();
    Ok(model.phi().row(topic)[word] / column_sum)
}

pub fn score_tfidf<S: Scalar>(model: &TopicModel<S>, topic: usize, word: usize) -> Result<S, RerankError> {
    check_indices(model, topic, word)?;
    let mean_ln = mean_log_prob(model, word)?;
    Ok(tfidf(model.phi().row(topic)[word], mean_ln))
}

pub fn score_idf<S: Scalar>(
    model: &TopicModel<S>,
    vocab: &Vocabulary,
    topic: usize,
    word: usize,
) -> Result<S, RerankError> {
    check_indices(model, topic, word)?;
    Ok(model.phi().row(topic)[word] * idf(vocab, word)?)
}

fn mean_log_prob<S: Scalar>(model: &TopicModel<S>, word: usize) -> Result<S, RerankError> {
    let mut sum = S::zero();
    for (j, p) in model.phi().column(word).enumerate() {
        if p <= S::zero() {
            return Err(RerankError::NonPositiveProbability {
                topic: j,
                word,
                value: p.to_f64_lossy(),
            });
        }
        sum += p.ln();
    }
    Ok(sum / S::from_count(model.num_topics()))
}

fn tfidf<S: Scalar>(p: S, mean_ln: S) -> S {
    p * (p.ln() - mean_ln)
}

fn idf<S: Scalar>(vocab: &Vocabulary, word: usize) -> Result<S, RerankError> {
    let df = vocab.doc_freq(word).ok_or(RerankError::WordOutOfRange {
        word,
        vocab_size: vocab.len(),
    })?;
    if df == 0 {
        return Err(RerankError::ZeroDocFreq(word));
    }
    Ok((S::from_count(vocab.num_docs()) / S::from_count(df)).ln())
}

/// Per-word quantities shared by every topic, computed once per model so
/// that ranking all topics costs O(T·V).
pub struct WordScorer<'a, S> {
    model: &'a TopicModel<S>,
    column_sum: Vec<S>,
    mean_ln: Vec<S>,
    idf: Vec<S>,
}

impl<'a, S: Scalar> WordScorer<'a, S> {
    pub fn new(model: &'a TopicModel<S>, vocab: &Vocabulary) -> Result<Self, RerankError> {
        if vocab.len() != model.vocab_size() {
            return Err(RerankError::VocabMismatch {
                model: model.vocab_size(),
                vocab: vocab.len(),
            });
        }
        let v = model.vocab_size();
        let column_sum = (0..v).map(|w| model.phi().column(w).sum()).collect();
        let mean_ln = (0..v).map(|w| mean_log_prob(model, w)).collect::<Result<_, _>>()?;
        let idf = (0..v).map(|w| idf(vocab, w)).collect::<Result<_, _>>()?;
        Ok(Self {
            model,
            column_sum,
            mean_ln,
            idf,
        })
    }

    pub fn score(&self, method: RankingMethod, topic: usize, word: usize) -> Result<S, RerankError> {
        check_indices(self.model, topic, word)?;
        Ok(self.score_unchecked(method, self.model.phi().row(topic)[word], word))
    }

    fn score_unchecked(&self, method: RankingMethod, p: S, word: usize) -> S {
        match method {
            RankingMethod::Orig => p,
            RankingMethod::Norm => p / self.column_sum[word],
            RankingMethod::TfIdf => tfidf(p, self.mean_ln[word]),
            RankingMethod::Idf => p * self.idf[word],
        }
    }

    /// Scores every word of `topic` and keeps the best `n`.
    pub fn rank(
        &self,
        topic: usize,
        method: RankingMethod,
        n: usize,
        vocab: &Vocabulary,
    ) -> Result<RankedTopic<S>, RerankError> {
        if n == 0 {
            return Err(RerankError::ZeroN);
        }
        let row = self.model.topic_row(topic).ok_or(RerankError::TopicOutOfRange {
            topic,
            num_topics: self.model.num_topics(),
        })?;
        let scored = top_n(
            row.iter()
                .enumerate()
                .map(|(w, &p)| (w, self.score_unchecked(method, p, w))),
            n,
        );
        let entries = scored
            .into_iter()
            .map(|(word_id, score)| RankedWord {
                word_id,
                word: vocab.word(word_id).unwrap_or_default().to_string(),
                score,
            })
            .collect();
        Ok(RankedTopic {
            topic_id: topic,
            method,
            n,
            entries,
        })
    }
}

/// Descending score, then ascending word id.
fn rank_order<S: Scalar>(a: &(usize, S), b: &(usize, S)) -> Ordering {
    b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0))
}

/// The `n` best `(id, score)` pairs, sorted by descending score with ties
/// broken by ascending id.
pub fn top_n<S: Scalar>(scores: impl IntoIterator<Item = (usize, S)>, n: usize) -> Vec<(usize, S)> {
    let mut scored: Vec<(usize, S)> = scores.into_iter().collect();
    let keep = n.min(scored.len());
    if keep == 0 {
        return Vec::new();
    }
    if keep < scored.len() {
        scored.select_nth_unstable_by(keep - 1, rank_order);
        scored.truncate(keep);
    }
    scored.sort_by(rank_order);
    scored
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedWord<S> {
    pub word_id: usize,
    pub word: String,
    pub score: S,
}

/// The top-`n` words of one topic under one ranking method.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedTopic<S> {
    pub topic_id: usize,
    pub method: RankingMethod,
    pub n: usize,
    pub entries: Vec<RankedWord<S>>,
}

#[derive(Serialize, Deserialize)]
struct RankedTopicJson {
    topic_id: usize,
    method: RankingMethod,
    n: usize,
    words: Vec<WordScoreJson>,
}

#[derive(Serialize, Deserialize)]
struct WordScoreJson {
    word: String,
    score: f64,
}

impl<S: Scalar> RankedTopic<S> {
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.word.as_str())
    }

    pub fn word_ids(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.word_id).collect()
    }

    /// `{topic_id, method, n, words: [{word, score}]}`
    pub fn to_json(&self) -> serde_json::Value {
        let json = RankedTopicJson {
            topic_id: self.topic_id,
            method: self.method,
            n: self.n,
            words: self
                .entries
                .iter()
                .map(|e| WordScoreJson {
                    word: e.word.clone(),
                    score: e.score.to_f64_lossy(),
                })
                .collect(),
        };
        serde_json::to_value(json).expect("ranked topic serializes")
    }

    /// `topic_id<TAB>method<TAB>word1 word2 ...`
    pub fn to_query_line(&self) -> String {
        let words: Vec<&str> = self.words().collect();
        format!("{}\t{}\t{}", self.topic_id, self.method, words.join(" "))
    }
}

/// A parsed `topic_id<TAB>method<TAB>words` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryLine {
    pub topic_id: usize,
    pub method: RankingMethod,
    pub words: Vec<String>,
}

pub fn parse_query_line(line: &str) -> Result<QueryLine, RerankError> {
    let bad = || RerankError::BadLine(line.to_string());
    let mut parts = line.trim_end_matches(['\n', '\r']).splitn(3, '\t');
    let topic_id = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
    let method = parts.next().ok_or_else(bad)?.parse()?;
    let words = parts
        .next()
        .ok_or_else(bad)?
        .split_whitespace()
        .map(str::to_string)
        .collect();
    Ok(QueryLine {
        topic_id,
        method,
        words,
    })
}

/// Ranks the words of one topic. Ranking several topics of the same model is
/// cheaper through a shared [`WordScorer`].
pub fn rerank_topic<S: Scalar>(
    model: &TopicModel<S>,
    vocab: &Vocabulary,
    topic: usize,
    method: RankingMethod,
    n: usize,
) -> Result<RankedTopic<S>, RerankError> {
    WordScorer::new(model, vocab)?.rank(topic, method, n, vocab)
}

/// Every topic under every requested method, grouped by method then topic.
pub fn rerank_all<S: Scalar>(
    model: &TopicModel<S>,
    vocab: &Vocabulary,
    methods: &[RankingMethod],
    n: usize,
) -> Result<Vec<RankedTopic<S>>, RerankError> {
    let scorer = WordScorer::new(model, vocab)?;
    let mut out = Vec::with_capacity(methods.len() * model.num_topics());
    for &method in methods {
        for t in 0..model.num_topics() {
            out.push(scorer.rank(t, method, n, vocab)?);
        }
    }
    Ok(out)
}
