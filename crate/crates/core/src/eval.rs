//! Retrieval-based evaluation of topic representations.
//!
//! For every gold label the pipeline picks the model topic that dominates the
//! label's documents, turns that topic's top-`n` words under each ranking
//! method into a BM25 query, and scores the retrieved list with average
//! precision against the label's documents. Mean average precision per
//! `(method, n)` summarizes how well each method describes the topics.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;
use std::hash::Hash;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::EvalError;
use crate::index::{search, write_run, Bm25Params, Hit, InvertedIndex, Query, DEFAULT_DEPTH};
use crate::model::TopicModel;
use crate::rerank::{RankingMethod, WordScorer, LOG_BASE};
use crate::scalar::Scalar;

/// Cuts each `sep`-delimited hierarchical label to its first `depth` segments.
pub fn truncate_labels(labels: &[String], depth: usize, sep: char) -> Result<Vec<String>, EvalError> {
    if depth == 0 {
        return Err(EvalError::ZeroDepth);
    }
    Ok(labels
        .iter()
        .map(|l| match l.match_indices(sep).nth(depth - 1) {
            Some((cut, _)) => l[..cut].to_string(),
            None => l.clone(),
        })
        .collect())
}

/// Copy of `corpus` whose labels are truncated to `depth` levels.
pub fn truncate_corpus_labels(corpus: &Corpus, depth: usize, sep: char) -> Result<Corpus, EvalError> {
    if depth == 0 {
        return Err(EvalError::ZeroDepth);
    }
    Ok(corpus.map_labels(|ls| truncate_labels(ls, depth, sep).expect("depth checked above")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabelSet {
    pub label: String,
    pub doc_ids: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldSelection {
    /// Largest document count first; equal counts in label order.
    pub sets: Vec<GoldLabelSet>,
    /// Set when fewer than the requested number of labels exist.
    pub shortfall: Option<String>,
}

/// The `k` labels attached to the most documents.
pub fn select_top_gold(corpus: &Corpus, k: usize) -> Result<GoldSelection, EvalError> {
    let mut by_label: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for doc in corpus.docs() {
        for l in &doc.labels {
            by_label.entry(l.as_str()).or_default().insert(doc.id.clone());
        }
    }
    if by_label.is_empty() {
        return Err(EvalError::NoLabels);
    }
    let available = by_label.len();
    let mut sets: Vec<GoldLabelSet> = by_label
        .into_iter()
        .map(|(label, doc_ids)| GoldLabelSet {
            label: label.to_string(),
            doc_ids,
        })
        .collect();
    // stable sort keeps the BTreeMap's label order among equal counts
    sets.sort_by_key(|s| std::cmp::Reverse(s.doc_ids.len()));
    sets.truncate(k);
    let shortfall = (available < k).then(|| format!("requested {k} gold labels but only {available} exist; using all"));
    Ok(GoldSelection { sets, shortfall })
}

/// The topic with the largest summed document-topic probability over the
/// gold documents; ties go to the lower topic id.
pub fn map_gold_to_topic<S: Scalar>(
    model: &TopicModel<S>,
    corpus: &Corpus,
    gold: &GoldLabelSet,
) -> Result<usize, EvalError> {
    let mut sums = vec![S::zero(); model.num_topics()];
    for id in &gold.doc_ids {
        let row = corpus
            .ordinal(id)
            .and_then(|d| model.doc_row(d))
            .ok_or_else(|| EvalError::MissingDoc(id.clone()))?;
        for (s, &p) in sums.iter_mut().zip(row) {
            *s += p;
        }
    }
    let mut best = 0;
    for (t, &s) in sums.iter().enumerate() {
        if s > sums[best] {
            best = t;
        }
    }
    Ok(best)
}

/// Non-interpolated average precision, as computed by trec_eval: the sum of
/// precision at each relevant rank, divided by the number of relevant
/// documents. Relevant documents that are never retrieved add zero.
pub fn average_precision<S: Scalar, D: Eq + Hash>(ranked: &[D], relevant: &HashSet<D>) -> Result<S, EvalError> {
    if relevant.is_empty() {
        return Err(EvalError::EmptyRelevant);
    }
    let mut seen: HashSet<&D> = HashSet::new();
    let mut hits = 0usize;
    let mut sum = S::zero();
    for (i, d) in ranked.iter().enumerate() {
        if relevant.contains(d) && seen.insert(d) {
            hits += 1;
            sum += S::from_count(hits) / S::from_count(i + 1);
        }
    }
    Ok(sum / S::from_count(relevant.len()))
}

pub fn mean<S: Scalar>(values: &[S]) -> S {
    if values.is_empty() {
        return S::zero();
    }
    values.iter().copied().sum::<S>() / S::from_count(values.len())
}

/// Sample Pearson correlation coefficient.
pub fn pearson<S: Scalar>(xs: &[S], ys: &[S]) -> Result<S, EvalError> {
    if xs.len() != ys.len() {
        return Err(EvalError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(EvalError::TooFewPoints(xs.len()));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (S::zero(), S::zero(), S::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == S::zero() {
        return Err(EvalError::ZeroVariance("x"));
    }
    if syy == S::zero() {
        return Err(EvalError::ZeroVariance("y"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).max(-S::one()).min(S::one()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub methods: Vec<RankingMethod>,
    pub ns: Vec<usize>,
    /// Retrieval depth per query.
    pub depth: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            methods: RankingMethod::ALL.to_vec(),
            ns: vec![5, 10, 20],
            depth: DEFAULT_DEPTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelResult<S> {
    /// Query id used in qrels and run files.
    pub qid: String,
    pub label: String,
    pub topic: usize,
    pub query: Vec<String>,
    pub average_precision: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCell<S> {
    pub method: RankingMethod,
    pub n: usize,
    pub results: Vec<LabelResult<S>>,
    pub map: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalMetadata {
    pub k1: f64,
    pub b: f64,
    pub log_base: String,
    pub depth: usize,
    pub seed: Option<u64>,
    pub num_topics: usize,
    pub num_docs: usize,
    pub num_labels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<S> {
    pub metadata: EvalMetadata,
    /// Methods in declared order, then ascending `n`.
    pub cells: Vec<EvalCell<S>>,
    pub warnings: Vec<String>,
}

impl<S: Scalar> EvalReport<S> {
    pub fn map(&self, method: RankingMethod, n: usize) -> Option<S> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.n == n)
            .map(|c| c.map)
    }

    pub fn maps(&self) -> Vec<S> {
        self.cells.iter().map(|c| c.map).collect()
    }

    /// One row per `n`, one column per method, under a `title` heading.
    pub fn to_table(&self, title: &str) -> String {
        let methods: Vec<RankingMethod> = RankingMethod::ALL
            .into_iter()
            .filter(|m| self.cells.iter().any(|c| c.method == *m))
            .collect();
        let ns: BTreeSet<usize> = self.cells.iter().map(|c| c.n).collect();
        let mut out = String::new();
        let _ = writeln!(out, "{title}");
        let _ = write!(out, "{:<8}", "#words");
        for m in &methods {
            let _ = write!(out, "{:>10}", m.name());
        }
        out.push('\n');
        for n in ns {
            let _ = write!(out, "{n:<8}");
            for &m in &methods {
                match self.map(m, n) {
                    Some(v) => {
                        let _ = write!(out, "{:>10.4}", v.to_f64_lossy());
                    }
                    None => {
                        let _ = write!(out, "{:>10}", "-");
                    }
                }
            }
            out.push('\n');
        }
        out
    }

    /// Writes trec_eval qrels lines `qid 0 doc_id 1` for every gold label.
    pub fn write_qrels<W: Write>(&self, out: &mut W, golds: &[GoldLabelSet]) -> Result<(), EvalError> {
        let Some(cell) = self.cells.first() else { return Ok(()) };
        for r in &cell.results {
            if let Some(g) = golds.iter().find(|g| g.label == r.label) {
                for id in &g.doc_ids {
                    writeln!(out, "{} 0 {id} 1", r.qid)?;
                }
            }
        }
        Ok(())
    }
}

/// Retrieved lists for one `(method, n)` cell, keyed by query id; kept so
/// callers can write trec_eval run files.
#[derive(Debug, Clone)]
pub struct CellRun<S> {
    pub method: RankingMethod,
    pub n: usize,
    pub hits: Vec<(String, Vec<Hit<S>>)>,
}

impl<S: Scalar> CellRun<S> {
    pub fn tag(&self) -> String {
        format!("{}_n{}", self.method, self.n)
    }

    pub fn write<W: Write>(&self, out: &mut W) -> Result<(), EvalError> {
        let tag = self.tag();
        for (qid, hits) in &self.hits {
            write_run(out, qid, hits, &tag)?;
        }
        Ok(())
    }
}

/// Runs the whole evaluation and returns the report with the raw runs.
///
/// Gold labels are processed in ascending label order and assigned query
/// ids `1, 2, ...` in that order.
pub fn run_ir_eval<S: Scalar>(
    corpus: &Corpus,
    model: &TopicModel<S>,
    index: &InvertedIndex<S>,
    golds: &[GoldLabelSet],
    config: &EvalConfig,
) -> Result<(EvalReport<S>, Vec<CellRun<S>>), EvalError> {
    if config.depth == 0 {
        return Err(crate::error::IndexError::ZeroDepth.into());
    }
    let vocab = corpus.vocab();
    let scorer = WordScorer::new(model, vocab)?;

    let mut golds: Vec<&GoldLabelSet> = golds.iter().collect();
    golds.sort_by(|a, b| a.label.cmp(&b.label));
    let mut mapped = Vec::with_capacity(golds.len());
    for g in &golds {
        if g.doc_ids.is_empty() {
            return Err(EvalError::EmptyRelevant);
        }
        mapped.push(map_gold_to_topic(model, corpus, g)?);
    }

    let mut methods = config.methods.clone();
    methods.sort();
    methods.dedup();
    let mut ns = config.ns.clone();
    ns.sort_unstable();
    ns.dedup();

    let mut warnings = Vec::new();
    let mut cells = Vec::new();
    let mut runs = Vec::new();
    for &method in &methods {
        for &n in &ns {
            let mut results = Vec::with_capacity(golds.len());
            let mut hits_by_query = Vec::with_capacity(golds.len());
            for (i, (g, &topic)) in golds.iter().zip(&mapped).enumerate() {
                let qid = (i + 1).to_string();
                let ranked = scorer.rank(topic, method, n, vocab)?;
                let query = Query::from_ranked(&ranked);
                let found = search(index, &query, config.depth)?;
                let ap = if found.empty_query {
                    warnings.push(format!("{method} n={n} label {:?}: empty query, AP set to 0", g.label));
                    S::zero()
                } else {
                    let ranked_ids: Vec<&str> = found.hits.iter().map(|h| h.doc_id.as_str()).collect();
                    let relevant: HashSet<&str> = g.doc_ids.iter().map(String::as_str).collect();
                    average_precision(&ranked_ids, &relevant)?
                };
                results.push(LabelResult {
                    qid: qid.clone(),
                    label: g.label.clone(),
                    topic,
                    query: ranked.words().map(str::to_string).collect(),
                    average_precision: ap,
                });
                hits_by_query.push((qid, found.hits));
            }
            let aps: Vec<S> = results.iter().map(|r| r.average_precision).collect();
            cells.push(EvalCell {
                method,
                n,
                results,
                map: mean(&aps),
            });
            runs.push(CellRun {
                method,
                n,
                hits: hits_by_query,
            });
        }
    }

    let params: Bm25Params = index.params();
    let metadata = EvalMetadata {
        k1: params.k1,
        b: params.b,
        log_base: LOG_BASE.to_string(),
        depth: config.depth,
        seed: None,
        num_topics: model.num_topics(),
        num_docs: corpus.num_docs(),
        num_labels: golds.len(),
    };
    Ok((
        EvalReport {
            metadata,
            cells,
            warnings,
        },
        runs,
    ))
}
