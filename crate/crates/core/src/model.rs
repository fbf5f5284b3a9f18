//! Topic models: validated topic-word and document-topic matrices, a
//! collapsed Gibbs sampler that estimates them from a [`Corpus`], and the
//! plain-text matrix import/export used to exchange models with other
//! trainers.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::ModelError;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

pub const PHI_FILE: &str = "phi.txt";
pub const THETA_FILE: &str = "theta.txt";
pub const META_FILE: &str = "model.json";

/// Name of the generator driving the sampler, recorded in model metadata.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.3), seeded via seed_from_u64";

/// Value substituted for nonpositive imported probabilities.
pub const IMPORT_FLOOR: f64 = 1e-12;

/// Tolerated deviation of an imported row sum from 1 before it is rejected.
pub const IMPORT_ROW_TOLERANCE: f64 = 1e-6;

/// A fitted topic model.
///
/// `phi` is T×V with row `t` holding p(w | t); `theta` is D×T with row `d`
/// holding p(t | d). Every entry is strictly positive and every row sums to
/// one.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel<S = f64> {
    phi: Matrix<S>,
    theta: Matrix<S>,
}

impl<S: Scalar> TopicModel<S> {
    pub fn new(phi: Matrix<S>, theta: Matrix<S>) -> Result<Self, ModelError> {
        if phi.rows() == 0 {
            return Err(ModelError::NoTopics);
        }
        if phi.cols() == 0 {
            return Err(ModelError::EmptyVocabulary);
        }
        if theta.cols() != phi.rows() {
            return Err(ModelError::Dimension(format!(
                "phi has {} topics but theta has {} columns",
                phi.rows(),
                theta.cols()
            )));
        }
        check_stochastic("phi", &phi)?;
        check_stochastic("theta", &theta)?;
        Ok(Self { phi, theta })
    }

    pub fn num_topics(&self) -> usize {
        self.phi.rows()
    }

    pub fn vocab_size(&self) -> usize {
        self.phi.cols()
    }

    pub fn num_docs(&self) -> usize {
        self.theta.rows()
    }

    pub fn phi(&self) -> &Matrix<S> {
        &self.phi
    }

    pub fn theta(&self) -> &Matrix<S> {
        &self.theta
    }

    /// p(w | t), or `None` when either index is out of range.
    pub fn word_prob(&self, topic: usize, word: usize) -> Option<S> {
        self.phi.get(topic, word)
    }

    pub fn topic_row(&self, topic: usize) -> Option<&[S]> {
        (topic < self.num_topics()).then(|| self.phi.row(topic))
    }

    pub fn doc_row(&self, doc: usize) -> Option<&[S]> {
        (doc < self.num_docs()).then(|| self.theta.row(doc))
    }
}

fn check_stochastic<S: Scalar>(name: &'static str, m: &Matrix<S>) -> Result<(), ModelError> {
    let tol = S::stochastic_tolerance();
    for (r, row) in m.iter_rows().enumerate() {
        if let Some(c) = row.iter().position(|v| !(v.is_finite() && *v > S::zero())) {
            return Err(ModelError::InvalidEntry {
                matrix: name,
                row: r,
                col: c,
                value: row[c].to_f64_lossy(),
            });
        }
        let sum: S = row.iter().copied().sum();
        if (sum - S::one()).abs() > tol {
            return Err(ModelError::RowSum {
                matrix: name,
                row: r,
                sum: sum.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsConfig {
    pub num_topics: usize,
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior.
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl GibbsConfig {
    /// Defaults: alpha = 50/T, beta = 0.01, 1000 sweeps, seed 0.
    pub fn new(num_topics: usize) -> Self {
        Self {
            num_topics,
            alpha: 50.0 / num_topics.max(1) as f64,
            beta: 0.01,
            iterations: 1000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.num_topics == 0 {
            return Err(ModelError::NoTopics);
        }
        for (name, value) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::NonPositiveParameter { name, value });
            }
        }
        if self.iterations == 0 {
            return Err(ModelError::NoIterations);
        }
        Ok(())
    }
}

/// Collapsed Gibbs sampler over token-topic assignments.
///
/// Counts are kept word-major (`word_topic[w * T + t]`) so that the per-token
/// conditional reads one contiguous slice.
pub struct GibbsSampler<'a> {
    corpus: &'a Corpus,
    cfg: GibbsConfig,
    rng: ChaCha8Rng,
    assignments: Vec<Vec<usize>>,
    doc_topic: Vec<u32>,
    word_topic: Vec<u32>,
    topic_total: Vec<u32>,
    sweeps: usize,
    weights: Vec<f64>,
}

impl<'a> GibbsSampler<'a> {
    /// Validates the configuration and draws a uniform random initial
    /// assignment for every token.
    pub fn new(corpus: &'a Corpus, cfg: GibbsConfig) -> Result<Self, ModelError> {
        cfg.validate()?;
        let vocab_size = corpus.vocab().len();
        if vocab_size == 0 {
            return Err(ModelError::EmptyVocabulary);
        }
        if corpus.num_tokens() == 0 {
            return Err(ModelError::NoTokens);
        }
        let t = cfg.num_topics;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut doc_topic = vec![0u32; corpus.num_docs() * t];
        let mut word_topic = vec![0u32; vocab_size * t];
        let mut topic_total = vec![0u32; t];
        let assignments = corpus
            .docs()
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                doc.tokens
                    .iter()
                    .map(|&w| {
                        let k = rng.gen_range(0..t);
                        doc_topic[d * t + k] += 1;
                        word_topic[w * t + k] += 1;
                        topic_total[k] += 1;
                        k
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            corpus,
            cfg,
            rng,
            assignments,
            doc_topic,
            word_topic,
            topic_total,
            sweeps: 0,
            weights: vec![0.0; t],
        })
    }

    /// Resamples every token's topic once, in document order.
    pub fn sweep(&mut self) {
        let t = self.cfg.num_topics;
        let alpha = self.cfg.alpha;
        let beta = self.cfg.beta;
        let v_beta = self.corpus.vocab().len() as f64 * beta;
        for (d, doc) in self.corpus.docs().iter().enumerate() {
            let dt = &mut self.doc_topic[d * t..(d + 1) * t];
            for (i, &w) in doc.tokens.iter().enumerate() {
                let old = self.assignments[d][i];
                let wt = &mut self.word_topic[w * t..(w + 1) * t];
                dt[old] -= 1;
                wt[old] -= 1;
                self.topic_total[old] -= 1;

                let mut total = 0.0;
                for k in 0..t {
                    total += (dt[k] as f64 + alpha) * (wt[k] as f64 + beta) / (self.topic_total[k] as f64 + v_beta);
                    self.weights[k] = total;
                }
                let u = self.rng.gen::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(t - 1);

                dt[new] += 1;
                wt[new] += 1;
                self.topic_total[new] += 1;
                self.assignments[d][i] = new;
            }
        }
        self.sweeps += 1;
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Sum of all topic-word counts; equals the corpus token count at all times.
    pub fn assigned_tokens(&self) -> u64 {
        self.word_topic.iter().map(|&c| c as u64).sum()
    }

    pub fn topic_totals(&self) -> &[u32] {
        &self.topic_total
    }

    /// Smoothed point estimates from the current assignment state.
    pub fn estimate<S: Scalar>(&self) -> TopicModel<S> {
        let t = self.cfg.num_topics;
        let v = self.corpus.vocab().len();
        let (alpha, beta) = (self.cfg.alpha, self.cfg.beta);
        let mut phi = Matrix::zeros(t, v);
        for k in 0..t {
            let denom = self.topic_total[k] as f64 + v as f64 * beta;
            for (w, p) in phi.row_mut(k).iter_mut().enumerate() {
                *p = S::from_f64_lossy((self.word_topic[w * t + k] as f64 + beta) / denom);
            }
        }
        let mut theta = Matrix::zeros(self.corpus.num_docs(), t);
        for (d, doc) in self.corpus.docs().iter().enumerate() {
            let denom = doc.tokens.len() as f64 + t as f64 * alpha;
            for (k, p) in theta.row_mut(d).iter_mut().enumerate() {
                *p = S::from_f64_lossy((self.doc_topic[d * t + k] as f64 + alpha) / denom);
            }
        }
        TopicModel { phi, theta }
    }

    pub fn metadata(&self) -> ModelMetadata {
        ModelMetadata {
            num_topics: self.cfg.num_topics,
            vocab_size: self.corpus.vocab().len(),
            num_docs: self.corpus.num_docs(),
            trainer: "collapsed-gibbs".into(),
            seed: Some(self.cfg.seed),
            alpha: Some(self.cfg.alpha),
            beta: Some(self.cfg.beta),
            iterations: Some(self.sweeps),
            rng: Some(RNG_NAME.into()),
        }
    }
}

/// Runs `cfg.iterations` sweeps and returns the final-sweep estimates.
pub fn train_lda<S: Scalar>(corpus: &Corpus, cfg: GibbsConfig) -> Result<TopicModel<S>, ModelError> {
    train_lda_with_metadata(corpus, cfg).map(|(m, _)| m)
}

pub fn train_lda_with_metadata<S: Scalar>(
    corpus: &Corpus,
    cfg: GibbsConfig,
) -> Result<(TopicModel<S>, ModelMetadata), ModelError> {
    let mut sampler = GibbsSampler::new(corpus, cfg)?;
    for _ in 0..cfg.iterations {
        sampler.sweep();
    }
    Ok((sampler.estimate(), sampler.metadata()))
}

/// JSON sidecar stored next to exported matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub num_topics: usize,
    pub vocab_size: usize,
    pub num_docs: usize,
    pub trainer: String,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub iterations: Option<usize>,
    pub rng: Option<String>,
}

impl ModelMetadata {
    pub fn imported<S: Scalar>(model: &TopicModel<S>) -> Self {
        Self {
            num_topics: model.num_topics(),
            vocab_size: model.vocab_size(),
            num_docs: model.num_docs(),
            trainer: "imported".into(),
            seed: None,
            alpha: None,
            beta: None,
            iterations: None,
            rng: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImportWarning {
    /// `count` nonpositive entries in the row were raised to the floor.
    Floored {
        matrix: &'static str,
        row: usize,
        count: usize,
    },
    /// The row sum was within the import tolerance but not tight, so the
    /// row was rescaled.
    Renormalized { matrix: &'static str, row: usize, sum: f64 },
}

impl fmt::Display for ImportWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Floored { matrix, row, count } => write!(
                f,
                "{matrix} row {row}: {count} nonpositive entries floored to {IMPORT_FLOOR:e}, row renormalized"
            ),
            Self::Renormalized { matrix, row, sum } => {
                write!(f, "{matrix} row {row}: sum {sum} renormalized to 1")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Imported<S> {
    pub model: TopicModel<S>,
    pub warnings: Vec<ImportWarning>,
}

/// Parses and repairs externally produced matrices.
///
/// Rows whose sum is off by more than [`IMPORT_ROW_TOLERANCE`] are rejected.
/// Entries `<= 0` are raised to [`IMPORT_FLOOR`] and their row renormalized;
/// every repair is reported as a warning.
pub fn import_model<S: Scalar, P: BufRead, T: BufRead>(phi_in: P, theta_in: T) -> Result<Imported<S>, ModelError> {
    let phi = Matrix::read_text(phi_in).map_err(|source| ModelError::Matrix { matrix: "phi", source })?;
    let theta = Matrix::read_text(theta_in).map_err(|source| ModelError::Matrix {
        matrix: "theta",
        source,
    })?;
    import_matrices(phi, theta)
}

pub fn import_matrices<S: Scalar>(mut phi: Matrix<S>, mut theta: Matrix<S>) -> Result<Imported<S>, ModelError> {
    if phi.rows() == 0 {
        return Err(ModelError::NoTopics);
    }
    if phi.cols() == 0 {
        return Err(ModelError::EmptyVocabulary);
    }
    if theta.cols() != phi.rows() {
        return Err(ModelError::Dimension(format!(
            "phi has {} topics but theta has {} columns",
            phi.rows(),
            theta.cols()
        )));
    }
    let mut warnings = Vec::new();
    repair_rows("phi", &mut phi, &mut warnings)?;
    repair_rows("theta", &mut theta, &mut warnings)?;
    let model = TopicModel::new(phi, theta)?;
    Ok(Imported { model, warnings })
}

fn repair_rows<S: Scalar>(
    name: &'static str,
    m: &mut Matrix<S>,
    warnings: &mut Vec<ImportWarning>,
) -> Result<(), ModelError> {
    let floor = S::from_f64_lossy(IMPORT_FLOOR);
    let tol = S::from_f64_lossy(IMPORT_ROW_TOLERANCE);
    for r in 0..m.rows() {
        let row = m.row_mut(r);
        if let Some(c) = row.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::InvalidEntry {
                matrix: name,
                row: r,
                col: c,
                value: row[c].to_f64_lossy(),
            });
        }
        let sum: S = row.iter().copied().sum();
        if (sum - S::one()).abs() > tol {
            return Err(ModelError::RowSum {
                matrix: name,
                row: r,
                sum: sum.to_f64_lossy(),
            });
        }
        let mut floored = 0;
        for v in row.iter_mut() {
            if *v <= S::zero() {
                *v = floor;
                floored += 1;
            }
        }
        let sum: S = row.iter().copied().sum();
        if floored > 0 {
            normalize(row, sum);
            warnings.push(ImportWarning::Floored {
                matrix: name,
                row: r,
                count: floored,
            });
        } else if (sum - S::one()).abs() > S::stochastic_tolerance() {
            normalize(row, sum);
            warnings.push(ImportWarning::Renormalized {
                matrix: name,
                row: r,
                sum: sum.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

fn normalize<S: Scalar>(row: &mut [S], sum: S) {
    for v in row.iter_mut() {
        *v /= sum;
    }
}

/// Writes `phi.txt`, `theta.txt` and the `model.json` sidecar into `dir`.
pub fn export_model<S: Scalar>(model: &TopicModel<S>, meta: &ModelMetadata, dir: &Path) -> Result<(), ModelError> {
    write_matrix(model.phi(), &dir.join(PHI_FILE))?;
    write_matrix(model.theta(), &dir.join(THETA_FILE))?;
    let path = dir.join(META_FILE);
    let file = create(&path)?;
    serde_json::to_writer_pretty(BufWriter::new(file), meta).map_err(|source| ModelError::Metadata { path, source })
}

pub fn write_matrix<S: Scalar>(m: &Matrix<S>, path: &Path) -> Result<(), ModelError> {
    m.write_text(BufWriter::new(create(path)?))
        .map_err(|source| ModelError::File {
            path: path.to_path_buf(),
            source,
        })
}

pub fn import_model_files<S: Scalar>(phi: &Path, theta: &Path) -> Result<Imported<S>, ModelError> {
    import_model(BufReader::new(open(phi)?), BufReader::new(open(theta)?))
}

/// Loads a model previously written by [`export_model`].
pub fn load_model<S: Scalar>(dir: &Path) -> Result<(TopicModel<S>, Option<ModelMetadata>), ModelError> {
    let imported = import_model_files(&dir.join(PHI_FILE), &dir.join(THETA_FILE))?;
    let meta_path = dir.join(META_FILE);
    let meta = if meta_path.exists() {
        let file = open(&meta_path)?;
        Some(
            serde_json::from_reader(BufReader::new(file)).map_err(|source| ModelError::Metadata {
                path: meta_path,
                source,
            })?,
        )
    } else {
        None
    };
    Ok((imported.model, meta))
}

fn open(path: &Path) -> Result<File, ModelError> {
    File::open(path).map_err(|source| ModelError::File {
        path: PathBuf::from(path),
        source,
    })
}

fn create(path: &Path) -> Result<File, ModelError> {
    File::create(path).map_err(|source| ModelError::File {
        path: PathBuf::from(path),
        source,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::corpus::{build_corpus, CorpusConfig, RawDocument};

    fn toy_corpus() -> Corpus {
        let raw = vec![
            RawDocument::new("a", "apple banana apple cherry"),
            RawDocument::new("b", "banana banana date"),
            RawDocument::new("c", "cherry date date apple"),
            RawDocument::new("d", ""),
        ];
        build_corpus(&raw, &HashSet::new(), CorpusConfig::keep_all()).unwrap()
    }

    #[test]
    fn single_topic_is_smoothed_unigram() {
        let corpus = toy_corpus();
        let cfg = GibbsConfig {
            iterations: 5,
            ..GibbsConfig::new(1)
        };
        let m: TopicModel = train_lda(&corpus, cfg).unwrap();
        assert!(m.theta().as_slice().iter().all(|&p| p == 1.0));
        // counts: apple 3, banana 3, cherry 2, date 3; 11 tokens, V = 4
        let counts = [3.0, 3.0, 2.0, 3.0];
        for (w, c) in counts.iter().enumerate() {
            let expected = (c + cfg.beta) / (11.0 + 4.0 * cfg.beta);
            assert!((m.word_prob(0, w).unwrap() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn seeded_training_is_deterministic() {
        let corpus = toy_corpus();
        let cfg = GibbsConfig {
            iterations: 20,
            seed: 7,
            ..GibbsConfig::new(2)
        };
        let a: TopicModel = train_lda(&corpus, cfg).unwrap();
        let b: TopicModel = train_lda(&corpus, cfg).unwrap();
        assert_eq!(a, b);
        let c: TopicModel = train_lda(&corpus, GibbsConfig { seed: 8, ..cfg }).unwrap();
        assert_eq!(c.num_topics(), 2);
    }

    #[test]
    fn counts_conserved_after_every_sweep() {
        let corpus = toy_corpus();
        let mut s = GibbsSampler::new(&corpus, GibbsConfig::new(3)).unwrap();
        for _ in 0..25 {
            s.sweep();
            assert_eq!(s.assigned_tokens(), corpus.num_tokens() as u64);
            assert_eq!(
                s.topic_totals().iter().map(|&c| c as usize).sum::<usize>(),
                corpus.num_tokens()
            );
        }
    }

    #[test]
    fn trained_model_is_row_stochastic() {
        let corpus = toy_corpus();
        let m: TopicModel = train_lda(
            &corpus,
            GibbsConfig {
                iterations: 10,
                ..GibbsConfig::new(3)
            },
        )
        .unwrap();
        assert!(TopicModel::new(m.phi().clone(), m.theta().clone()).is_ok());
        // the empty document gets the prior mean
        assert!(m.doc_row(3).unwrap().iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
        let m32: TopicModel<f32> = train_lda(
            &corpus,
            GibbsConfig {
                iterations: 10,
                ..GibbsConfig::new(3)
            },
        )
        .unwrap();
        assert_eq!(m32.vocab_size(), 4);
    }

    #[test]
    fn training_rejects_bad_input() {
        let raw = vec![RawDocument::new("a", "")];
        let empty = build_corpus(&raw, &HashSet::new(), CorpusConfig::keep_all()).unwrap();
        assert!(matches!(
            train_lda::<f64>(&empty, GibbsConfig::new(2)),
            Err(ModelError::EmptyVocabulary)
        ));
        let corpus = toy_corpus();
        assert!(matches!(
            train_lda::<f64>(&corpus, GibbsConfig::new(0)),
            Err(ModelError::NoTopics)
        ));
        let cfg = GibbsConfig {
            beta: 0.0,
            ..GibbsConfig::new(2)
        };
        assert!(matches!(
            train_lda::<f64>(&corpus, cfg),
            Err(ModelError::NonPositiveParameter { name: "beta", .. })
        ));
    }

    #[test]
    fn import_accepts_normalized_matrices_unchanged() {
        let phi = "2 2\n0.5 0.5\n0.5 0.5\n";
        let theta = "1 2\n0.5 0.5\n";
        let imp = import_model::<f64, _, _>(phi.as_bytes(), theta.as_bytes()).unwrap();
        assert!(imp.warnings.is_empty());
        assert_eq!(imp.model.phi().as_slice(), [0.5; 4]);
    }

    #[test]
    fn import_rejects_bad_row_sum_with_index() {
        let phi = "2 2\n0.5 0.5\n0.4 0.4\n";
        let theta = "1 2\n0.5 0.5\n";
        match import_model::<f64, _, _>(phi.as_bytes(), theta.as_bytes()) {
            Err(ModelError::RowSum {
                matrix: "phi",
                row: 1,
                sum,
            }) => assert!((sum - 0.8).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn import_rejects_dimension_mismatch() {
        let phi = "2 2\n0.5 0.5\n0.5 0.5\n";
        let theta = "1 3\n0.2 0.3 0.5\n";
        assert!(matches!(
            import_model::<f64, _, _>(phi.as_bytes(), theta.as_bytes()),
            Err(ModelError::Dimension(_))
        ));
    }

    #[test]
    fn import_floors_zero_entries() {
        let phi = "1 3\n0 0.25 0.75\n";
        let theta = "1 1\n1\n";
        let imp = import_model::<f64, _, _>(phi.as_bytes(), theta.as_bytes()).unwrap();
        assert_eq!(
            imp.warnings,
            [ImportWarning::Floored {
                matrix: "phi",
                row: 0,
                count: 1
            }]
        );
        let z = 1.0 + 1e-12;
        let expected = [1e-12 / z, 0.25 / z, 0.75 / z];
        for (got, want) in imp.model.phi().row(0).iter().zip(expected) {
            assert!((got - want).abs() < 1e-18);
        }
    }

    #[test]
    fn export_import_round_trip() {
        let corpus = toy_corpus();
        let (m, meta) = train_lda_with_metadata::<f64>(
            &corpus,
            GibbsConfig {
                iterations: 15,
                ..GibbsConfig::new(2)
            },
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        export_model(&m, &meta, dir.path()).unwrap();
        let (back, back_meta) = load_model::<f64>(dir.path()).unwrap();
        for (a, b) in m.phi().as_slice().iter().zip(back.phi().as_slice()) {
            assert!((a - b).abs() <= 1e-12);
        }
        for (a, b) in m.theta().as_slice().iter().zip(back.theta().as_slice()) {
            assert!((a - b).abs() <= 1e-12);
        }
        let back_meta = back_meta.unwrap();
        assert_eq!(back_meta, meta);
        assert_eq!(back_meta.rng.as_deref(), Some(RNG_NAME));
    }

    #[test]
    fn export_reports_path_on_io_failure() {
        let m = TopicModel::new(
            Matrix::from_rows(&[[0.25, 0.75]]).unwrap(),
            Matrix::from_rows(&[[1.0]]).unwrap(),
        )
        .unwrap();
        let missing = Path::new("/nonexistent/dir/for/export");
        match export_model(&m, &ModelMetadata::imported(&m), missing) {
            Err(ModelError::File { path, .. }) => assert!(path.starts_with(missing)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
