//! Topic coherence from corpus co-occurrence statistics.
//!
//! Probabilities are window frequencies: `p(w)` is the fraction of windows
//! containing `w` and `p(w1, w2)` the fraction containing both. A window is
//! either a whole document (boolean occurrence) or a sliding span of tokens.
//! The reference corpus is the training corpus itself.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{CoherenceError, ModelError};
use crate::model::{train_lda, GibbsConfig, TopicModel};
use crate::rerank::top_n;
use crate::scalar::Scalar;

/// Smoothing added to joint probabilities inside logarithms.
pub const EPSILON: f64 = 1e-12;

/// Number of most probable words per topic used when selecting a topic count.
pub const SELECTION_TOP_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Window {
    /// Every document is one window.
    Document,
    /// Every run of this many consecutive tokens is a window.
    Sliding(usize),
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Document => f.write_str("document"),
            Self::Sliding(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Window {
    type Err = CoherenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("document") {
            return Ok(Self::Document);
        }
        let n: usize = s.parse().map_err(|_| CoherenceError::BadWindow(s.to_string()))?;
        if n < 2 {
            return Err(CoherenceError::WindowTooSmall(n));
        }
        Ok(Self::Sliding(n))
    }
}

impl From<Window> for String {
    fn from(w: Window) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for Window {
    type Error = CoherenceError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Npmi,
    Uci,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Npmi => "npmi",
            Self::Uci => "uci",
        })
    }
}

impl FromStr for Metric {
    type Err = CoherenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "npmi" => Ok(Self::Npmi),
            "uci" | "pmi" => Ok(Self::Uci),
            _ => Err(CoherenceError::BadMetric(s.to_string())),
        }
    }
}

/// Window occurrence counts.
///
/// Single-word counts cover the whole vocabulary. Pair counts cover either
/// every word pair or, when built with [`CoocStats::build_for`], only pairs of
/// the tracked words; asking for an untracked pair is an error.
#[derive(Debug, Clone)]
pub struct CoocStats {
    window: Window,
    num_windows: u64,
    single: Vec<u64>,
    pair: HashMap<(usize, usize), u64>,
    tracked: Option<Vec<bool>>,
}

impl CoocStats {
    pub fn build(corpus: &Corpus, window: Window) -> Result<Self, CoherenceError> {
        Self::build_inner(corpus, window, None)
    }

    /// Counts pairs only among `words`, which keeps memory proportional to
    /// the words actually being scored.
    pub fn build_for(corpus: &Corpus, window: Window, words: &[usize]) -> Result<Self, CoherenceError> {
        let mut tracked = vec![false; corpus.vocab().len()];
        for &w in words {
            *tracked.get_mut(w).ok_or(CoherenceError::UnknownWord(w))? = true;
        }
        Self::build_inner(corpus, window, Some(tracked))
    }

    fn build_inner(corpus: &Corpus, window: Window, tracked: Option<Vec<bool>>) -> Result<Self, CoherenceError> {
        if let Window::Sliding(n) = window {
            if n < 2 {
                return Err(CoherenceError::WindowTooSmall(n));
            }
        }
        let mut stats = Self {
            window,
            num_windows: 0,
            single: vec![0; corpus.vocab().len()],
            pair: HashMap::new(),
            tracked,
        };
        let mut present: Vec<usize> = Vec::new();
        for doc in corpus.docs() {
            match window {
                Window::Document => {
                    present.clear();
                    present.extend_from_slice(&doc.tokens);
                    stats.add_window(&mut present);
                }
                Window::Sliding(size) => stats.add_sliding(&doc.tokens, size, &mut present),
            }
        }
        if stats.num_windows == 0 {
            return Err(CoherenceError::NoWindows);
        }
        Ok(stats)
    }

    fn add_sliding(&mut self, tokens: &[usize], size: usize, present: &mut Vec<usize>) {
        if tokens.is_empty() {
            return;
        }
        if tokens.len() <= size {
            present.clear();
            present.extend_from_slice(tokens);
            self.add_window(present);
            return;
        }
        let mut counts: HashMap<usize, usize> = HashMap::new();
        let mut span: VecDeque<usize> = VecDeque::with_capacity(size);
        for &t in tokens {
            span.push_back(t);
            *counts.entry(t).or_insert(0) += 1;
            if span.len() > size {
                let gone = span.pop_front().expect("span is nonempty");
                let c = counts.get_mut(&gone).expect("counted on entry");
                *c -= 1;
                if *c == 0 {
                    counts.remove(&gone);
                }
            }
            if span.len() == size {
                present.clear();
                present.extend(counts.keys().copied());
                self.add_window(present);
            }
        }
    }

    fn add_window(&mut self, words: &mut Vec<usize>) {
        self.num_windows += 1;
        words.sort_unstable();
        words.dedup();
        for &w in words.iter() {
            self.single[w] += 1;
        }
        if let Some(tracked) = &self.tracked {
            words.retain(|&w| tracked[w]);
        }
        for (i, &a) in words.iter().enumerate() {
            for &b in &words[i + 1..] {
                *self.pair.entry((a, b)).or_insert(0) += 1;
            }
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn num_windows(&self) -> u64 {
        self.num_windows
    }

    pub fn vocab_size(&self) -> usize {
        self.single.len()
    }

    pub fn is_tracked(&self, w: usize) -> bool {
        w < self.single.len() && self.tracked.as_ref().is_none_or(|t| t[w])
    }

    pub fn single_count(&self, w: usize) -> Result<u64, CoherenceError> {
        self.single.get(w).copied().ok_or(CoherenceError::UnknownWord(w))
    }

    /// Windows containing both words; a word paired with itself yields its
    /// single count.
    pub fn pair_count(&self, w1: usize, w2: usize) -> Result<u64, CoherenceError> {
        let c1 = self.single_count(w1)?;
        self.single_count(w2)?;
        if w1 == w2 {
            return Ok(c1);
        }
        for w in [w1, w2] {
            if !self.is_tracked(w) {
                return Err(CoherenceError::UnknownWord(w));
            }
        }
        let key = if w1 < w2 { (w1, w2) } else { (w2, w1) };
        Ok(self.pair.get(&key).copied().unwrap_or(0))
    }

    pub fn p_single<S: Scalar>(&self, w: usize) -> Result<S, CoherenceError> {
        Ok(self.ratio(self.single_count(w)?))
    }

    pub fn p_pair<S: Scalar>(&self, w1: usize, w2: usize) -> Result<S, CoherenceError> {
        Ok(self.ratio(self.pair_count(w1, w2)?))
    }

    fn ratio<S: Scalar>(&self, count: u64) -> S {
        S::from_f64_lossy(count as f64) / S::from_f64_lossy(self.num_windows as f64)
    }

    fn probabilities<S: Scalar>(&self, w1: usize, w2: usize) -> Result<(S, S, S), CoherenceError> {
        let p1: S = self.p_single(w1)?;
        let p2: S = self.p_single(w2)?;
        for (w, p) in [(w1, p1), (w2, p2)] {
            if p <= S::zero() {
                return Err(CoherenceError::UnseenWord(w));
            }
        }
        Ok((p1, p2, self.p_pair(w1, w2)?))
    }
}

/// Pointwise mutual information `ln((p12 + eps) / (p1 p2))`.
pub fn uci_pmi<S: Scalar>(stats: &CoocStats, w1: usize, w2: usize) -> Result<S, CoherenceError> {
    let (p1, p2, p12) = stats.probabilities::<S>(w1, w2)?;
    Ok(((p12 + S::from_f64_lossy(EPSILON)) / (p1 * p2)).ln())
}

/// Normalized PMI, `pmi / -ln(p12 + eps)`, clamped to `[-1, 1]`.
///
/// Pairs that never share a window take the limiting value -1 and pairs
/// present in every window take 1.
pub fn npmi<S: Scalar>(stats: &CoocStats, w1: usize, w2: usize) -> Result<S, CoherenceError> {
    let (p1, p2, p12) = stats.probabilities::<S>(w1, w2)?;
    if p12 == S::zero() {
        return Ok(-S::one());
    }
    if p12 >= S::one() {
        return Ok(S::one());
    }
    let joint = p12 + S::from_f64_lossy(EPSILON);
    let value = (joint / (p1 * p2)).ln() / -joint.ln();
    Ok(value.max(-S::one()).min(S::one()))
}

pub fn pair_score<S: Scalar>(stats: &CoocStats, metric: Metric, w1: usize, w2: usize) -> Result<S, CoherenceError> {
    match metric {
        Metric::Npmi => npmi(stats, w1, w2),
        Metric::Uci => uci_pmi(stats, w1, w2),
    }
}

/// Mean pair score over all unordered pairs of positions in `words`.
///
/// Pairs are summed in ascending word-id order, so the result is bitwise
/// independent of the order of `words`.
pub fn topic_coherence<S: Scalar>(stats: &CoocStats, words: &[usize], metric: Metric) -> Result<S, CoherenceError> {
    if words.len() < 2 {
        return Err(CoherenceError::TooFewWords(words.len()));
    }
    let mut words = words.to_vec();
    words.sort_unstable();
    let mut sum = S::zero();
    let mut pairs = 0usize;
    for (i, &a) in words.iter().enumerate() {
        for &b in &words[i + 1..] {
            sum += pair_score::<S>(stats, metric, a, b)?;
            pairs += 1;
        }
    }
    Ok(sum / S::from_count(pairs))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport<S> {
    pub metric: Metric,
    pub window: Window,
    pub top_n: usize,
    pub per_topic: Vec<S>,
    pub mean: S,
}

/// The `n` most probable word ids of every topic.
pub fn top_words<S: Scalar>(model: &TopicModel<S>, n: usize) -> Vec<Vec<usize>> {
    model
        .phi()
        .iter_rows()
        .map(|row| {
            top_n(row.iter().copied().enumerate(), n)
                .into_iter()
                .map(|(w, _)| w)
                .collect()
        })
        .collect()
}

/// Average coherence over all topics, each represented by its `top_n` most
/// probable words.
pub fn model_coherence<S: Scalar>(
    model: &TopicModel<S>,
    stats: &CoocStats,
    top_n: usize,
    metric: Metric,
) -> Result<CoherenceReport<S>, CoherenceError> {
    if top_n < 2 {
        return Err(CoherenceError::TooFewWords(top_n));
    }
    let per_topic = top_words(model, top_n)
        .iter()
        .map(|words| topic_coherence(stats, words, metric))
        .collect::<Result<Vec<S>, _>>()?;
    let mean = per_topic.iter().copied().sum::<S>() / S::from_count(per_topic.len());
    Ok(CoherenceReport {
        metric,
        window: stats.window(),
        top_n,
        per_topic,
        mean,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicCountSelection<S> {
    pub best: usize,
    /// `(num_topics, mean coherence)` for every distinct candidate, ascending.
    pub scores: Vec<(usize, S)>,
}

/// Fits one model per candidate topic count with `fit` and keeps the count
/// whose mean coherence is highest; ties go to the smaller count.
pub fn select_topic_count_with<S, F>(
    candidates: &[usize],
    mut fit: F,
    stats: &CoocStats,
    metric: Metric,
    top_n: usize,
) -> Result<TopicCountSelection<S>, CoherenceError>
where
    S: Scalar,
    F: FnMut(usize) -> Result<TopicModel<S>, ModelError>,
{
    let mut ts = candidates.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if ts.is_empty() {
        return Err(CoherenceError::NoCandidates);
    }
    let mut scores = Vec::with_capacity(ts.len());
    let mut best: Option<(usize, S)> = None;
    for t in ts {
        let model = fit(t)?;
        let c = model_coherence(&model, stats, top_n, metric)?.mean;
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((t, c));
        }
        scores.push((t, c));
    }
    Ok(TopicCountSelection {
        best: best.expect("at least one candidate").0,
        scores,
    })
}

/// Gibbs-trains a model for every candidate count. The template's total
/// prior mass `T * alpha` is held fixed across candidates, so the default
/// `alpha = 50 / T` carries over to every count.
pub fn select_topic_count<S: Scalar>(
    corpus: &Corpus,
    candidates: &[usize],
    template: &GibbsConfig,
    stats: &CoocStats,
    metric: Metric,
    top_n: usize,
) -> Result<TopicCountSelection<S>, CoherenceError> {
    let mass = template.alpha * template.num_topics.max(1) as f64;
    select_topic_count_with(
        candidates,
        |t| {
            let cfg = GibbsConfig {
                num_topics: t,
                alpha: mass / t.max(1) as f64,
                ..*template
            };
            train_lda(corpus, cfg)
        },
        stats,
        metric,
        top_n,
    )
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::corpus::{build_corpus, CorpusConfig, RawDocument};
    use crate::matrix::Matrix;

    fn corpus(texts: &[&str]) -> Corpus {
        let raw: Vec<RawDocument> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| RawDocument::new(format!("d{i}"), *t))
            .collect();
        build_corpus(&raw, &HashSet::new(), CorpusConfig::keep_all()).unwrap()
    }

    fn id(c: &Corpus, w: &str) -> usize {
        c.vocab().id(w).unwrap()
    }

    #[test]
    fn document_mode_counts() {
        let c = corpus(&["a b c", "a b", "a d"]);
        let s = CoocStats::build(&c, Window::Document).unwrap();
        let (a, b, cc, d) = (id(&c, "a"), id(&c, "b"), id(&c, "c"), id(&c, "d"));
        assert_eq!(s.num_windows(), 3);
        assert_eq!(s.p_single::<f64>(a).unwrap(), 1.0);
        assert_eq!(s.p_single::<f64>(b).unwrap(), 2.0 / 3.0);
        assert_eq!(s.p_pair::<f64>(a, b).unwrap(), 2.0 / 3.0);
        assert_eq!(s.p_pair::<f64>(b, a).unwrap(), 2.0 / 3.0);
        assert_eq!(s.p_pair::<f64>(cc, d).unwrap(), 0.0);
        assert_eq!(s.p_pair::<f64>(a, d).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn sliding_windows() {
        // "a b c d": windows of 2 are ab, bc, cd; doc "a" shorter than window is one window
        let c = corpus(&["a b c d", "a"]);
        let s = CoocStats::build(&c, Window::Sliding(2)).unwrap();
        let (a, b, cc, d) = (id(&c, "a"), id(&c, "b"), id(&c, "c"), id(&c, "d"));
        assert_eq!(s.num_windows(), 4);
        assert_eq!(s.single_count(a).unwrap(), 2);
        assert_eq!(s.single_count(b).unwrap(), 2);
        assert_eq!(s.pair_count(a, b).unwrap(), 1);
        assert_eq!(s.pair_count(a, cc).unwrap(), 0);
        assert_eq!(s.pair_count(cc, d).unwrap(), 1);
        assert!(matches!(
            CoocStats::build(&c, Window::Sliding(1)),
            Err(CoherenceError::WindowTooSmall(1))
        ));
        assert!(matches!("1".parse::<Window>(), Err(CoherenceError::WindowTooSmall(1))));
        assert_eq!("document".parse::<Window>().unwrap(), Window::Document);
    }

    #[test]
    fn sliding_repeated_tokens_count_once_per_window() {
        let c = corpus(&["a a a b"]);
        let s = CoocStats::build(&c, Window::Sliding(3)).unwrap();
        // windows: aaa, aab
        assert_eq!(s.num_windows(), 2);
        assert_eq!(s.single_count(id(&c, "a")).unwrap(), 2);
        assert_eq!(s.pair_count(id(&c, "a"), id(&c, "b")).unwrap(), 1);
    }

    #[test]
    fn restricted_build_rejects_untracked_pairs() {
        let c = corpus(&["a b c", "a b"]);
        let s = CoocStats::build_for(&c, Window::Document, &[id(&c, "a"), id(&c, "b")]).unwrap();
        assert_eq!(s.pair_count(id(&c, "a"), id(&c, "b")).unwrap(), 2);
        assert_eq!(s.single_count(id(&c, "c")).unwrap(), 1);
        assert!(s.pair_count(id(&c, "a"), id(&c, "c")).is_err());
    }

    #[test]
    fn npmi_boundaries() {
        // a in every other doc, b in the same docs, c never with a
        let c = corpus(&["a b", "c", "a b", "c"]);
        let s = CoocStats::build(&c, Window::Document).unwrap();
        let (a, b, cc) = (id(&c, "a"), id(&c, "b"), id(&c, "c"));
        assert!((npmi::<f64>(&s, a, a).unwrap() - 1.0).abs() < 1e-9);
        assert!((npmi::<f64>(&s, a, b).unwrap() - 1.0).abs() < 1e-9);
        assert!((npmi::<f64>(&s, a, cc).unwrap() + 1.0).abs() < 1e-6);
        assert!(uci_pmi::<f64>(&s, a, cc).unwrap() < -20.0);
        assert!((uci_pmi::<f64>(&s, a, a).unwrap() - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn independence_gives_zero() {
        // p(a) = p(b) = 0.5, p(a, b) = 0.25
        let c = corpus(&["a b", "a", "b", "z"]);
        let s = CoocStats::build(&c, Window::Document).unwrap();
        let (a, b) = (id(&c, "a"), id(&c, "b"));
        assert!(npmi::<f64>(&s, a, b).unwrap().abs() < 1e-9);
        assert!(uci_pmi::<f64>(&s, a, b).unwrap().abs() < 1e-9);
    }

    #[test]
    fn topic_coherence_is_mean_of_pairs() {
        let c = corpus(&["a b c", "a b", "c d", "a d", "b"]);
        let s = CoocStats::build(&c, Window::Document).unwrap();
        let words: Vec<usize> = ["a", "b", "c", "d"].iter().map(|w| id(&c, w)).collect();
        let mut pairs = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                pairs.push(npmi::<f64>(&s, words[i], words[j]).unwrap());
            }
        }
        assert_eq!(pairs.len(), 6);
        let expected = pairs.iter().sum::<f64>() / 6.0;
        let got: f64 = topic_coherence(&s, &words, Metric::Npmi).unwrap();
        assert!((got - expected).abs() < 1e-15);
        let single: f64 = topic_coherence(&s, &words[..2], Metric::Uci).unwrap();
        assert_eq!(single, uci_pmi::<f64>(&s, words[0], words[1]).unwrap());
        assert!(matches!(
            topic_coherence::<f64>(&s, &words[..1], Metric::Npmi),
            Err(CoherenceError::TooFewWords(1))
        ));
    }

    #[test]
    fn identical_words_have_unit_coherence() {
        let c = corpus(&["a b c", "z", "a b c", "y"]);
        let s = CoocStats::build(&c, Window::Document).unwrap();
        let words: Vec<usize> = ["a", "b", "c"].iter().map(|w| id(&c, w)).collect();
        let got: f64 = topic_coherence(&s, &words, Metric::Npmi).unwrap();
        assert!((got - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_topic_model_coherence() {
        let c = corpus(&["a b c", "a b", "c d"]);
        let s = CoocStats::build(&c, Window::Document).unwrap();
        let phi = Matrix::from_rows(&[[0.4, 0.3, 0.2, 0.1]]).unwrap();
        let theta = Matrix::from_rows(&[[1.0], [1.0], [1.0]]).unwrap();
        let m = TopicModel::new(phi, theta).unwrap();
        let r = model_coherence(&m, &s, 3, Metric::Npmi).unwrap();
        let direct: f64 = topic_coherence(&s, &[0, 1, 2], Metric::Npmi).unwrap();
        assert_eq!(r.per_topic, [direct]);
        assert_eq!(r.mean, direct);
        assert!(model_coherence(&m, &s, 1, Metric::Npmi).is_err());
    }

    #[test]
    fn selection_ties_go_to_smaller_count() {
        let c = corpus(&["a b", "a b", "c d"]);
        let s = CoocStats::build(&c, Window::Document).unwrap();
        let fit = |t: usize| {
            let phi = Matrix::from_vec(t, 4, vec![0.25; 4 * t]).unwrap();
            let theta = Matrix::from_vec(3, t, vec![1.0 / t as f64; 3 * t]).unwrap();
            TopicModel::new(phi, theta)
        };
        let sel = select_topic_count_with::<f64, _>(&[4, 2, 3], fit, &s, Metric::Npmi, 2).unwrap();
        assert_eq!(sel.best, 2);
        assert_eq!(sel.scores.len(), 3);
        let single = select_topic_count_with::<f64, _>(&[7], fit, &s, Metric::Npmi, 2).unwrap();
        assert_eq!(single.best, 7);
        assert!(matches!(
            select_topic_count_with::<f64, _>(&[], fit, &s, Metric::Npmi, 2),
            Err(CoherenceError::NoCandidates)
        ));
    }

    #[test]
    fn report_serializes_window_as_string() {
        let r = CoherenceReport {
            metric: Metric::Npmi,
            window: Window::Sliding(10),
            top_n: 10,
            per_topic: vec![0.5f64],
            mean: 0.5,
        };
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["window"], "10");
        assert_eq!(json["metric"], "npmi");
        let back: CoherenceReport<f64> = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }
}
