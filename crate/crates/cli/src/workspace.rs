//! On-disk layout of a workspace and loaders for its artifacts.
//!
//! ```text
//! rerank.toml            optional configuration
//! corpus/                corpus.vocab.tsv, corpus.docs.tsv, summary.json
//! model/                 phi.txt, theta.txt, model.json
//! selection.json         select-topics result
//! rerank/                topics.jsonl, queries.tsv
//! coherence.json         coherence report
//! eval/                  report.json, report.txt, qrels.txt, runs/<method>_n<n>.txt
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use topic_rerank::corpus::VOCAB_FILE;
use topic_rerank::model::{load_model, ModelMetadata, PHI_FILE};
use topic_rerank::{Corpus, TopicModel};

pub const ENV_VAR: &str = "TOPIC_RERANK_WORKSPACE";

pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    pub fn new(root: PathBuf) -> Self {
        Self { root }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn corpus_dir(&self) -> PathBuf {
        self.root.join("corpus")
    }

    pub fn summary_file(&self) -> PathBuf {
        self.corpus_dir().join("summary.json")
    }

    pub fn model_dir(&self) -> PathBuf {
        self.root.join("model")
    }

    pub fn selection_file(&self) -> PathBuf {
        self.root.join("selection.json")
    }

    pub fn rerank_dir(&self) -> PathBuf {
        self.root.join("rerank")
    }

    pub fn coherence_file(&self) -> PathBuf {
        self.root.join("coherence.json")
    }

    pub fn eval_dir(&self) -> PathBuf {
        self.root.join("eval")
    }

    pub fn report_file(&self) -> PathBuf {
        self.eval_dir().join("report.json")
    }

    /// Creates `dir` (and parents) and returns it.
    pub fn ensure(&self, dir: PathBuf) -> Result<PathBuf> {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(dir)
    }

    /// Name shown in tables: the configured one, else the workspace directory name.
    pub fn display_name(&self, configured: Option<&str>) -> String {
        if let Some(n) = configured {
            return n.to_string();
        }
        fs::canonicalize(&self.root)
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "corpus".into())
    }

    pub fn load_corpus(&self) -> Result<Corpus> {
        let dir = self.corpus_dir();
        if !dir.join(VOCAB_FILE).exists() {
            bail!(
                "no corpus in {}; run `topic-rerank preprocess --input FILE` first",
                dir.display()
            );
        }
        Corpus::load(&dir).with_context(|| format!("loading corpus from {}", dir.display()))
    }

    /// The workspace model, checked against the corpus dimensions.
    pub fn load_model(&self, corpus: &Corpus) -> Result<(TopicModel, Option<ModelMetadata>)> {
        let dir = self.model_dir();
        if !dir.join(PHI_FILE).exists() {
            bail!(
                "no model in {}; run `topic-rerank train` or `topic-rerank import-model` first",
                dir.display()
            );
        }
        let (model, meta) = load_model(&dir).with_context(|| format!("loading model from {}", dir.display()))?;
        check_dimensions(&model, corpus)?;
        Ok((model, meta))
    }
}

pub fn check_dimensions(model: &TopicModel, corpus: &Corpus) -> Result<()> {
    if model.vocab_size() != corpus.vocab().len() {
        bail!(
            "model has {} words but the corpus vocabulary has {}; retrain or re-import against this corpus",
            model.vocab_size(),
            corpus.vocab().len()
        );
    }
    if model.num_docs() != corpus.num_docs() {
        bail!(
            "model has {} documents but the corpus has {}; retrain or re-import against this corpus",
            model.num_docs(),
            corpus.num_docs()
        );
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
