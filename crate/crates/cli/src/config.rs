//! Workspace configuration.
//!
//! Every setting can come from three places, highest precedence first: a
//! command-line flag, the workspace's `rerank.toml`, and the built-in
//! default. Flags and the file share one [`Options`] type so the two can
//! never drift apart.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use topic_rerank::coherence::SELECTION_TOP_N;
use topic_rerank::index::DEFAULT_DEPTH;
use topic_rerank::{Bm25Params, CorpusConfig, EvalConfig, GibbsConfig, Metric, RankingMethod, Window};

pub const CONFIG_FILE: &str = "rerank.toml";

/// Optional settings, each either given or left to the next source.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Dataset name used in printed tables.
    #[arg(long, global = true)]
    pub name: Option<String>,
    /// JSON Lines input corpus: one {"id", "text", "labels"} object per line.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Stopword file, one word per line (default: bundled English list).
    #[arg(long, global = true)]
    pub stopwords: Option<PathBuf>,
    /// Drop words found in fewer documents than this.
    #[arg(long, global = true)]
    pub min_df: Option<usize>,
    /// Drop words found in more than this fraction of documents.
    #[arg(long, global = true)]
    pub max_df_ratio: Option<f64>,
    /// Number of topics to train.
    #[arg(long, global = true)]
    pub topics: Option<usize>,
    /// Document-topic prior (default: 50 / topics).
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Topic-word prior.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Gibbs sweeps.
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    /// Random seed for Gibbs sampling.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Candidate topic counts for select-topics, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub candidates: Option<Vec<usize>>,
    /// Coherence metric: npmi or uci.
    #[arg(long, global = true)]
    pub metric: Option<Metric>,
    /// Co-occurrence window: "document" or a sliding window size.
    #[arg(long, global = true)]
    pub window: Option<Window>,
    /// Words per topic used for coherence.
    #[arg(long, global = true)]
    pub coherence_top_n: Option<usize>,
    /// Ranking methods, comma separated: orig, norm, tfidf, idf.
    #[arg(long, global = true, value_delimiter = ',')]
    pub methods: Option<Vec<RankingMethod>>,
    /// Words per ranked topic written by rerank.
    #[arg(long, global = true)]
    pub top_n: Option<usize>,
    /// Query lengths evaluated by ir-eval, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    /// BM25 term-frequency saturation.
    #[arg(long, global = true)]
    pub k1: Option<f64>,
    /// BM25 length normalization, in [0, 1].
    #[arg(long, global = true)]
    pub b: Option<f64>,
    /// Documents retrieved per query.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Number of gold labels (the most frequent ones) to evaluate.
    #[arg(long, global = true)]
    pub gold_labels: Option<usize>,
    /// Truncate hierarchical labels to this many segments before evaluation.
    #[arg(long, global = true)]
    pub label_depth: Option<usize>,
    /// Separator between hierarchical label segments.
    #[arg(long, global = true)]
    pub label_separator: Option<char>,
}

macro_rules! prefer {
    ($flags:expr, $file:expr, [$($field:ident),* $(,)?]) => {
        Options { $($field: $flags.$field.or($file.$field)),* }
    };
}

impl Options {
    /// Reads `rerank.toml` from `dir` if it exists. Relative paths in the
    /// file are taken relative to `dir`.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(CONFIG_FILE);
        if !path.exists() {
            return Ok(Self::default());
        }
        let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        let mut opts: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        for p in [&mut opts.input, &mut opts.stopwords].into_iter().flatten() {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
        Ok(opts)
    }

    /// Fields set in `self` win over those in `file`.
    pub fn over(self, file: Self) -> Self {
        prefer!(
            self,
            file,
            [
                name,
                input,
                stopwords,
                min_df,
                max_df_ratio,
                topics,
                alpha,
                beta,
                iterations,
                seed,
                candidates,
                metric,
                window,
                coherence_top_n,
                methods,
                top_n,
                ns,
                k1,
                b,
                depth,
                gold_labels,
                label_depth,
                label_separator,
            ]
        )
    }

    pub fn resolve(self) -> Settings {
        let d = Settings::default();
        let corpus_defaults = CorpusConfig::default();
        Settings {
            name: self.name,
            input: self.input,
            stopwords: self.stopwords,
            corpus: CorpusConfig {
                min_df: self.min_df.unwrap_or(corpus_defaults.min_df),
                max_df_ratio: self.max_df_ratio.unwrap_or(corpus_defaults.max_df_ratio),
            },
            topics: self.topics.unwrap_or(d.topics),
            alpha: self.alpha,
            beta: self.beta.unwrap_or(d.beta),
            iterations: self.iterations.unwrap_or(d.iterations),
            seed: self.seed.unwrap_or(d.seed),
            candidates: self.candidates.unwrap_or(d.candidates),
            metric: self.metric.unwrap_or(d.metric),
            window: self.window.unwrap_or(d.window),
            coherence_top_n: self.coherence_top_n.unwrap_or(d.coherence_top_n),
            methods: self.methods.unwrap_or(d.methods),
            top_n: self.top_n.unwrap_or(d.top_n),
            ns: self.ns.unwrap_or(d.ns),
            bm25: Bm25Params {
                k1: self.k1.unwrap_or(d.bm25.k1),
                b: self.b.unwrap_or(d.bm25.b),
            },
            depth: self.depth.unwrap_or(d.depth),
            gold_labels: self.gold_labels.unwrap_or(d.gold_labels),
            label_depth: self.label_depth,
            label_separator: self.label_separator.unwrap_or(d.label_separator),
        }
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub name: Option<String>,
    pub input: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub corpus: CorpusConfig,
    pub topics: usize,
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
    pub candidates: Vec<usize>,
    pub metric: Metric,
    pub window: Window,
    pub coherence_top_n: usize,
    pub methods: Vec<RankingMethod>,
    pub top_n: usize,
    pub ns: Vec<usize>,
    pub bm25: Bm25Params,
    pub depth: usize,
    pub gold_labels: usize,
    pub label_depth: Option<usize>,
    pub label_separator: char,
}

impl Default for Settings {
    fn default() -> Self {
        let gibbs = GibbsConfig::new(35);
        let eval = EvalConfig::default();
        Self {
            name: None,
            input: None,
            stopwords: None,
            corpus: CorpusConfig::default(),
            topics: gibbs.num_topics,
            alpha: None,
            beta: gibbs.beta,
            iterations: gibbs.iterations,
            seed: gibbs.seed,
            candidates: vec![10, 20, 35, 50],
            metric: Metric::Npmi,
            window: Window::Document,
            coherence_top_n: SELECTION_TOP_N,
            methods: eval.methods,
            top_n: 10,
            ns: eval.ns,
            bm25: Bm25Params::default(),
            depth: DEFAULT_DEPTH,
            gold_labels: 50,
            label_depth: None,
            label_separator: '/',
        }
    }
}

impl Settings {
    /// Gibbs configuration for `topics` topics; an unset alpha follows 50/T.
    pub fn gibbs(&self, topics: usize) -> GibbsConfig {
        let base = GibbsConfig::new(topics);
        GibbsConfig {
            alpha: self.alpha.unwrap_or(base.alpha),
            beta: self.beta,
            iterations: self.iterations,
            seed: self.seed,
            ..base
        }
    }

    pub fn eval(&self) -> EvalConfig {
        EvalConfig {
            methods: self.methods.clone(),
            ns: self.ns.clone(),
            depth: self.depth,
        }
    }

    pub fn input(&self) -> Result<&Path> {
        match &self.input {
            Some(p) => Ok(p),
            None => bail!("no input corpus given; pass --input FILE or set `input` in {CONFIG_FILE}"),
        }
    }
}
