//! Inverted index with BM25 ranked retrieval.
//!
//! Scoring uses the Lucene form of BM25:
//!
//! ```text
//! score(q, d) = sum over distinct terms t of q:
//!     idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * |d| / avgdl))
//! idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
//! ```
//!
//! Queries are unweighted bags of words; repeated terms count once.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Vocabulary};
use crate::error::IndexError;
use crate::rerank::{RankedTopic, RankingMethod};
use crate::scalar::Scalar;

/// Default retrieval depth per query.
pub const DEFAULT_DEPTH: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<(), IndexError> {
        if !(self.k1.is_finite() && self.k1 >= 0.0) {
            return Err(IndexError::BadParameter {
                name: "k1",
                value: self.k1,
            });
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(IndexError::BadParameter {
                name: "b",
                value: self.b,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: usize,
    pub tf: u32,
}

#[derive(Debug, Clone)]
pub struct InvertedIndex<S = f64> {
    postings: Vec<Vec<Posting>>,
    doc_len: Vec<u32>,
    avg_doc_len: S,
    doc_ids: Vec<String>,
    params: Bm25Params,
}

impl<S: Scalar> InvertedIndex<S> {
    pub fn build(corpus: &Corpus) -> Self {
        Self::with_params(corpus, Bm25Params::default()).expect("default parameters are valid")
    }

    pub fn with_params(corpus: &Corpus, params: Bm25Params) -> Result<Self, IndexError> {
        params.validate()?;
        let mut postings: Vec<Vec<Posting>> = vec![Vec::new(); corpus.vocab().len()];
        let mut doc_len = Vec::with_capacity(corpus.num_docs());
        // Documents are visited in order, so every postings list comes out sorted.
        for (d, doc) in corpus.docs().iter().enumerate() {
            for &w in &doc.tokens {
                let list = &mut postings[w];
                match list.last_mut() {
                    Some(p) if p.doc == d => p.tf += 1,
                    _ => list.push(Posting { doc: d, tf: 1 }),
                }
            }
            doc_len.push(doc.tokens.len() as u32);
        }
        let total: u64 = doc_len.iter().map(|&l| l as u64).sum();
        let avg_doc_len = if doc_len.is_empty() {
            S::zero()
        } else {
            S::from_f64_lossy(total as f64) / S::from_count(doc_len.len())
        };
        Ok(Self {
            postings,
            doc_len,
            avg_doc_len,
            doc_ids: corpus.docs().iter().map(|d| d.id.clone()).collect(),
            params,
        })
    }

    pub fn num_docs(&self) -> usize {
        self.doc_len.len()
    }

    pub fn num_terms(&self) -> usize {
        self.postings.len()
    }

    pub fn postings(&self, word: usize) -> &[Posting] {
        self.postings.get(word).map_or(&[], Vec::as_slice)
    }

    pub fn doc_len(&self, doc: usize) -> Option<u32> {
        self.doc_len.get(doc).copied()
    }

    pub fn avg_doc_len(&self) -> S {
        self.avg_doc_len
    }

    pub fn doc_id(&self, doc: usize) -> Option<&str> {
        self.doc_ids.get(doc).map(String::as_str)
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn doc_freq(&self, word: usize) -> usize {
        self.postings(word).len()
    }

    /// `ln(1 + (N - df + 0.5) / (df + 0.5))`; never negative.
    pub fn idf(&self, word: usize) -> S {
        let n = S::from_count(self.num_docs());
        let df = S::from_count(self.doc_freq(word));
        let half = S::from_f64_lossy(0.5);
        (S::one() + (n - df + half) / (df + half)).ln()
    }

    /// Contribution of one term occurring `tf` times in document `doc`.
    pub fn term_weight(&self, word: usize, tf: u32, doc: usize) -> S {
        if tf == 0 {
            return S::zero();
        }
        let k1 = S::from_f64_lossy(self.params.k1);
        let b = S::from_f64_lossy(self.params.b);
        let tf = S::from_f64_lossy(tf as f64);
        let len = S::from_f64_lossy(self.doc_len[doc] as f64);
        let norm = if self.avg_doc_len > S::zero() {
            len / self.avg_doc_len
        } else {
            S::one()
        };
        self.idf(word) * tf * (k1 + S::one()) / (tf + k1 * (S::one() - b + b * norm))
    }

    fn tf(&self, word: usize, doc: usize) -> u32 {
        let list = self.postings(word);
        list.binary_search_by_key(&doc, |p| p.doc).map_or(0, |i| list[i].tf)
    }
}

/// Where a query came from: a topic's top-`n` words under one method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuerySource {
    pub topic_id: usize,
    pub method: RankingMethod,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    /// Distinct vocabulary ids in first-seen order.
    pub terms: Vec<usize>,
    /// Input words not present in the vocabulary.
    pub unknown: Vec<String>,
    pub source: Option<QuerySource>,
}

impl Query {
    /// Maps words to vocabulary ids, dropping unknown words and duplicates.
    pub fn from_words<'a>(vocab: &Vocabulary, words: impl IntoIterator<Item = &'a str>) -> Self {
        let mut terms = Vec::new();
        let mut unknown = Vec::new();
        for w in words {
            match vocab.id(w) {
                Some(id) if !terms.contains(&id) => terms.push(id),
                Some(_) => {}
                None => unknown.push(w.to_string()),
            }
        }
        Self {
            terms,
            unknown,
            source: None,
        }
    }

    pub fn from_ids(ids: impl IntoIterator<Item = usize>) -> Self {
        let mut terms = Vec::new();
        for id in ids {
            if !terms.contains(&id) {
                terms.push(id);
            }
        }
        Self {
            terms,
            unknown: Vec::new(),
            source: None,
        }
    }

    pub fn from_ranked<S: Scalar>(ranked: &RankedTopic<S>) -> Self {
        let mut q = Self::from_ids(ranked.entries.iter().map(|e| e.word_id));
        q.source = Some(QuerySource {
            topic_id: ranked.topic_id,
            method: ranked.method,
            n: ranked.n,
        });
        q
    }

    /// True when no term survived vocabulary intersection.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// BM25 score of one document. Terms missing from the document, or from the
/// index entirely, contribute nothing.
pub fn bm25_score<S: Scalar>(index: &InvertedIndex<S>, query: &Query, doc: usize) -> Result<S, IndexError> {
    if doc >= index.num_docs() {
        return Err(IndexError::DocOutOfRange {
            doc,
            num_docs: index.num_docs(),
        });
    }
    let mut score = S::zero();
    for &t in distinct(&query.terms).iter() {
        score += index.term_weight(t, index.tf(t, doc), doc);
    }
    Ok(score)
}

fn distinct(terms: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(terms.len());
    for &t in terms {
        if !out.contains(&t) {
            out.push(t);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hit<S> {
    pub doc: usize,
    pub doc_id: String,
    pub score: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<S> {
    pub hits: Vec<Hit<S>>,
    /// Set when the query had no usable terms.
    pub empty_query: bool,
}

/// Documents with positive score, best first (ties by ordinal), at most `k`.
pub fn search<S: Scalar>(index: &InvertedIndex<S>, query: &Query, k: usize) -> Result<SearchResult<S>, IndexError> {
    if k == 0 {
        return Err(IndexError::ZeroDepth);
    }
    if query.is_empty() {
        return Ok(SearchResult {
            hits: Vec::new(),
            empty_query: true,
        });
    }
    // Term-at-a-time accumulation in query order, matching bm25_score's
    // summation order so both give bit-identical scores.
    let mut acc = vec![S::zero(); index.num_docs()];
    let mut touched = Vec::new();
    for &t in distinct(&query.terms).iter() {
        for p in index.postings(t) {
            if acc[p.doc] == S::zero() {
                touched.push(p.doc);
            }
            acc[p.doc] += index.term_weight(t, p.tf, p.doc);
        }
    }
    touched.sort_unstable();
    touched.dedup();
    let scored = crate::rerank::top_n(
        touched.into_iter().map(|d| (d, acc[d])).filter(|&(_, s)| s > S::zero()),
        k,
    );
    let hits = scored
        .into_iter()
        .map(|(doc, score)| Hit {
            doc,
            doc_id: index.doc_ids[doc].clone(),
            score,
        })
        .collect();
    Ok(SearchResult {
        hits,
        empty_query: false,
    })
}

/// Writes hits as trec_eval run lines: `qid Q0 doc_id rank score tag`.
pub fn write_run<S: Scalar, W: Write>(out: &mut W, qid: &str, hits: &[Hit<S>], tag: &str) -> Result<(), IndexError> {
    for (rank, h) in hits.iter().enumerate() {
        writeln!(out, "{qid} Q0 {} {} {} {tag}", h.doc_id, rank + 1, h.score)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::corpus::{build_corpus, CorpusConfig, RawDocument};

    fn corpus(texts: &[&str]) -> Corpus {
        let raw: Vec<RawDocument> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| RawDocument::new(format!("d{i}"), *t))
            .collect();
        build_corpus(&raw, &HashSet::new(), CorpusConfig::keep_all()).unwrap()
    }

    fn q(c: &Corpus, words: &[&str]) -> Query {
        Query::from_words(c.vocab(), words.iter().copied())
    }

    #[test]
    fn single_document_postings() {
        let c = corpus(&["a b a"]);
        let idx: InvertedIndex = InvertedIndex::build(&c);
        assert_eq!(idx.postings(0), [Posting { doc: 0, tf: 2 }]);
        assert_eq!(idx.postings(1), [Posting { doc: 0, tf: 1 }]);
        assert_eq!(idx.doc_len(0), Some(3));
        assert_eq!(idx.avg_doc_len(), 3.0);
    }

    #[test]
    fn empty_document_counts_toward_averages() {
        let c = corpus(&["a b", "...", "a a a a"]);
        let idx: InvertedIndex = InvertedIndex::build(&c);
        assert_eq!(idx.num_docs(), 3);
        assert_eq!(idx.doc_len(1), Some(0));
        assert_eq!(idx.avg_doc_len(), 2.0);
        assert!(idx.postings(0).iter().all(|p| p.doc != 1));
    }

    #[test]
    fn ln2_case() {
        // N = 2, df = 1, tf = 1, |d| = avgdl
        let c = corpus(&["a b", "c d"]);
        let idx: InvertedIndex = InvertedIndex::build(&c);
        let s = bm25_score(&idx, &q(&c, &["a"]), 0).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-12);
        assert_eq!(bm25_score(&idx, &q(&c, &["a"]), 1).unwrap(), 0.0);
        assert!(matches!(
            bm25_score(&idx, &q(&c, &["a"]), 2),
            Err(IndexError::DocOutOfRange { .. })
        ));
    }

    #[test]
    fn duplicate_terms_score_once() {
        let c = corpus(&["a b", "c d"]);
        let idx: InvertedIndex = InvertedIndex::build(&c);
        let once = bm25_score(&idx, &q(&c, &["a"]), 0).unwrap();
        let twice = bm25_score(&idx, &Query::from_ids([0, 0]), 0).unwrap();
        let raw = Query {
            terms: vec![0, 0],
            unknown: vec![],
            source: None,
        };
        assert_eq!(once, twice);
        assert_eq!(once, bm25_score(&idx, &raw, 0).unwrap());
    }

    #[test]
    fn unknown_words_are_dropped() {
        let c = corpus(&["a b"]);
        let query = q(&c, &["zzz", "a", "a"]);
        assert_eq!(query.terms, [0]);
        assert_eq!(query.unknown, ["zzz"]);
        let empty = q(&c, &["zzz"]);
        assert!(empty.is_empty());
        let idx: InvertedIndex = InvertedIndex::build(&c);
        let r = search(&idx, &empty, 5).unwrap();
        assert!(r.empty_query && r.hits.is_empty());
    }

    #[test]
    fn higher_tf_ranks_first_at_equal_length() {
        let c = corpus(&["a a b", "a b b", "c c c"]);
        let idx: InvertedIndex = InvertedIndex::build(&c);
        let r = search(&idx, &q(&c, &["a"]), 10).unwrap();
        let ids: Vec<&str> = r.hits.iter().map(|h| h.doc_id.as_str()).collect();
        assert_eq!(ids, ["d0", "d1"]);
        let top = search(&idx, &q(&c, &["a"]), 1).unwrap();
        assert_eq!(top.hits.len(), 1);
        assert_eq!(top.hits[0].doc, 0);
        assert!(matches!(search(&idx, &q(&c, &["a"]), 0), Err(IndexError::ZeroDepth)));
    }

    #[test]
    fn ties_break_by_ordinal() {
        let c = corpus(&["x a", "a x", "y y"]);
        let idx: InvertedIndex = InvertedIndex::build(&c);
        let r = search(&idx, &q(&c, &["a"]), 10).unwrap();
        assert_eq!(r.hits[0].score, r.hits[1].score);
        assert_eq!((r.hits[0].doc, r.hits[1].doc), (0, 1));
    }

    #[test]
    fn tf_increase_raises_weight() {
        let c = corpus(&["a b", "c d", "e f"]);
        let idx: InvertedIndex = InvertedIndex::build(&c);
        let mut prev = 0.0;
        for tf in 1..20 {
            let w = idx.term_weight(0, tf, 0);
            assert!(w > prev);
            prev = w;
        }
    }

    #[test]
    fn run_file_format() {
        let hits = vec![
            Hit {
                doc: 3,
                doc_id: "d3".into(),
                score: 1.5f64,
            },
            Hit {
                doc: 0,
                doc_id: "d0".into(),
                score: 0.25,
            },
        ];
        let mut out = Vec::new();
        write_run(&mut out, "7", &hits, "orig_n5").unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "7 Q0 d3 1 1.5 orig_n5\n7 Q0 d0 2 0.25 orig_n5\n"
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        let c = corpus(&["a"]);
        assert!(InvertedIndex::<f64>::with_params(&c, Bm25Params { k1: 1.2, b: 1.5 }).is_err());
        assert!(InvertedIndex::<f64>::with_params(&c, Bm25Params { k1: -1.0, b: 0.5 }).is_err());
    }
}
