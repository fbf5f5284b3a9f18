//! Seeded generator for labelled corpora with planted themes.
//!
//! Content words share one Zipf frequency ranking (a seeded shuffle). Each
//! content word has one or more home themes where its weight is multiplied by
//! `home_boost`: a `shared_fraction` of them are boosted in `shared_homes`
//! themes instead of one, like words common to several related subjects.
//! Filler words carry no theme: `filler_share` of every document is drawn
//! from their own Zipf ranking, identically for all themes.
//!
//! Each document has a main theme, which is also its label, and a random
//! secondary theme; `purity` is the share of content tokens from the main one.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::RawDocument;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThemeCorpusSpec {
    pub num_docs: usize,
    pub num_themes: usize,
    /// Total vocabulary size, content and filler words together.
    pub vocab_size: usize,
    /// Fraction of the vocabulary made of filler words.
    pub filler_fraction: f64,
    pub doc_len: usize,
    /// Fraction of every document's tokens spent on filler words.
    pub filler_share: f64,
    /// Weight multiplier of a content word inside its home themes.
    pub home_boost: f64,
    /// Fraction of content words with several home themes.
    pub shared_fraction: f64,
    pub shared_homes: usize,
    /// Share of a document's content tokens drawn from its main theme.
    pub purity: f64,
    pub content_exponent: f64,
    pub filler_exponent: f64,
    pub seed: u64,
}

impl Default for ThemeCorpusSpec {
    /// 500 documents, 5 themes, 1000 words of which 20% are filler.
    fn default() -> Self {
        Self {
            num_docs: 500,
            num_themes: 5,
            vocab_size: 1000,
            filler_fraction: 0.2,
            doc_len: 80,
            filler_share: 0.25,
            home_boost: 5.0,
            shared_fraction: 0.3,
            shared_homes: 3,
            purity: 1.0,
            content_exponent: 1.0,
            filler_exponent: 1.0,
            seed: 0,
        }
    }
}

/// Lowercase alphabetic rendering of `n`, so the tokenizer keeps it whole.
fn letters(mut n: usize, width: usize) -> String {
    let mut out = vec![b'a'; width];
    for slot in out.iter_mut().rev() {
        *slot = b'a' + (n % 26) as u8;
        n /= 26;
    }
    String::from_utf8(out).expect("ASCII letters")
}

pub fn theme_word(theme: usize, i: usize) -> String {
    format!("t{}{}", letters(theme, 2), letters(i, 3))
}

pub fn filler_word(i: usize) -> String {
    format!("f{}", letters(i, 4))
}

pub fn theme_label(theme: usize) -> String {
    format!("theme-{}", letters(theme, 2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedWord {
    pub word: String,
    /// Themes where the word is boosted; empty for filler words.
    pub homes: Vec<usize>,
    /// 1-based position in the Zipf ranking of its kind (content or filler).
    pub rank: usize,
}

impl PlantedWord {
    pub fn is_filler(&self) -> bool {
        self.homes.is_empty()
    }
}

/// Content words (in rank order) followed by filler words (in rank order).
pub fn planted_vocabulary(spec: &ThemeCorpusSpec) -> Vec<PlantedWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fillers = ((spec.vocab_size as f64 * spec.filler_fraction).round() as usize).min(spec.vocab_size);
    let themes = spec.num_themes.max(1);
    let mut content: Vec<(String, usize)> = (0..spec.vocab_size - fillers)
        .map(|i| (theme_word(i % themes, i / themes), i % themes))
        .collect();
    content.shuffle(&mut rng);
    let others: Vec<usize> = (0..themes).collect();
    let content: Vec<PlantedWord> = content
        .into_iter()
        .enumerate()
        .map(|(i, (word, home))| {
            let mut homes = vec![home];
            if rng.gen_bool(spec.shared_fraction.clamp(0.0, 1.0)) {
                let extra = spec.shared_homes.saturating_sub(1);
                let pool: Vec<usize> = others.iter().copied().filter(|&k| k != home).collect();
                homes.extend(pool.choose_multiple(&mut rng, extra));
                homes.sort_unstable();
            }
            PlantedWord {
                word,
                homes,
                rank: i + 1,
            }
        })
        .collect();
    let filler = (0..fillers).map(|i| PlantedWord {
        word: filler_word(i),
        homes: Vec::new(),
        rank: i + 1,
    });
    content.into_iter().chain(filler).collect()
}

fn zipf(rank: usize, exponent: f64) -> f64 {
    (rank as f64).powf(-exponent)
}

pub fn generate(spec: &ThemeCorpusSpec) -> Vec<RawDocument> {
    let vocab = planted_vocabulary(spec);
    let (content, fillers): (Vec<&PlantedWord>, Vec<&PlantedWord>) = vocab.iter().partition(|w| !w.is_filler());
    let themes: Vec<WeightedIndex<f64>> = (0..spec.num_themes)
        .map(|k| {
            let weights = content.iter().map(|w| {
                let base = zipf(w.rank, spec.content_exponent);
                if w.homes.contains(&k) {
                    base * spec.home_boost
                } else {
                    base
                }
            });
            WeightedIndex::new(weights).expect("positive content weights")
        })
        .collect();
    let filler_dist = WeightedIndex::new(fillers.iter().map(|w| zipf(w.rank, spec.filler_exponent))).ok();

    // separate stream from the vocabulary shuffle
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let filler_p = if filler_dist.is_some() { spec.filler_share } else { 0.0 };
    (0..spec.num_docs)
        .map(|d| {
            let theme = d % spec.num_themes;
            let second = if spec.num_themes > 1 {
                (theme + rng.gen_range(1..spec.num_themes)) % spec.num_themes
            } else {
                theme
            };
            let purity = spec.purity.clamp(0.0, 1.0);
            let text = (0..spec.doc_len)
                .map(|_| match &filler_dist {
                    Some(fd) if rng.gen_bool(filler_p) => fillers[fd.sample(&mut rng)].word.as_str(),
                    _ => {
                        let k = if rng.gen_bool(purity) { theme } else { second };
                        content[themes[k].sample(&mut rng)].word.as_str()
                    }
                })
                .collect::<Vec<_>>()
                .join(" ");
            RawDocument::new(format!("doc{d:05}"), text).with_labels([theme_label(theme)])
        })
        .collect()
}
