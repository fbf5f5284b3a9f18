use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topic_rerank::coherence::{model_coherence, select_topic_count};
use topic_rerank::eval::{average_precision, run_ir_eval, select_top_gold};
use topic_rerank::model::train_lda;
use topic_rerank::{
    build_corpus, CoocStats, CorpusConfig, EvalConfig, GibbsConfig, InvertedIndex, Matrix, Metric, RankingMethod,
    RawDocument, TopicModel, Window,
};

/// Expected AP of a uniformly random full ranking of `n` documents with `r`
/// relevant: (H_n + (r - 1)/(n - 1) * (n - H_n)) / n.
fn expected_random_ap(n: usize, r: usize) -> f64 {
    let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    let tail = if n > 1 {
        (r as f64 - 1.0) / (n as f64 - 1.0) * (n as f64 - h)
    } else {
        0.0
    };
    (h + tail) / n as f64
}

#[test]
fn random_rankings_average_the_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, r) in [(10, 1), (20, 5), (50, 10), (40, 40)] {
        let relevant: HashSet<usize> = (0..r).collect();
        let mut docs: Vec<usize> = (0..n).collect();
        let trials = 20_000;
        let mut total = 0.0;
        for _ in 0..trials {
            docs.shuffle(&mut rng);
            total += average_precision::<f64, usize>(&docs, &relevant).unwrap();
        }
        let want = expected_random_ap(n, r);
        let got = total / trials as f64;
        assert!((got - want).abs() < 0.01, "n={n} r={r}: mean {got} vs {want}");
        // the expectation tracks the base rate r/n
        assert!((want - r as f64 / n as f64).abs() < 0.3);
    }
}

fn two_theme_docs(num_docs: usize, len: usize, seed: u64) -> Vec<RawDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let themes = [
        ["apple", "banana", "cherry", "grape", "lemon", "mango"],
        ["anvil", "bolt", "chisel", "drill", "hammer", "wrench"],
    ];
    (0..num_docs)
        .map(|d| {
            let words: Vec<&str> = (0..len).map(|_| *themes[d % 2].choose(&mut rng).unwrap()).collect();
            RawDocument::new(format!("d{d}"), words.join(" ")).with_labels([if d % 2 == 0 { "fruit" } else { "tools" }])
        })
        .collect()
}

#[test]
fn coherent_themes_beat_shuffled_words() {
    let raw = two_theme_docs(80, 20, 1);
    let corpus = build_corpus(&raw, &HashSet::new(), CorpusConfig::keep_all()).unwrap();
    // the same tokens scattered across documents
    let mut tokens: Vec<String> = raw.iter().flat_map(|d| d.text.split(' ').map(str::to_string)).collect();
    tokens.shuffle(&mut ChaCha8Rng::seed_from_u64(2));
    let shuffled: Vec<RawDocument> = tokens
        .chunks(20)
        .enumerate()
        .map(|(i, c)| RawDocument::new(format!("s{i}"), c.join(" ")))
        .collect();
    let shuffled = build_corpus(&shuffled, &HashSet::new(), CorpusConfig::keep_all()).unwrap();

    let coherence = |c| {
        let model: TopicModel = train_lda(
            c,
            GibbsConfig {
                iterations: 200,
                ..GibbsConfig::new(2)
            },
        )
        .unwrap();
        let stats = CoocStats::build(c, Window::Document).unwrap();
        model_coherence(&model, &stats, 5, Metric::Npmi).unwrap().mean
    };
    let (clean, noisy) = (coherence(&corpus), coherence(&shuffled));
    assert!(clean > noisy, "clean {clean} vs shuffled {noisy}");
}

#[test]
fn topic_count_selection_finds_two_themes() {
    let corpus = build_corpus(&two_theme_docs(80, 20, 3), &HashSet::new(), CorpusConfig::keep_all()).unwrap();
    let stats = CoocStats::build(&corpus, Window::Document).unwrap();
    let template = GibbsConfig {
        iterations: 200,
        ..GibbsConfig::new(2)
    };
    let sel = select_topic_count::<f64>(&corpus, &[20, 2], &template, &stats, Metric::Npmi, 5).unwrap();
    assert_eq!(sel.best, 2);
    assert_eq!(sel.scores.iter().map(|s| s.0).collect::<Vec<_>>(), [2, 20]);
    assert!(sel.scores[0].1 > sel.scores[1].1);
}

#[test]
fn perfectly_separated_topics_retrieve_perfectly() {
    let raw = two_theme_docs(40, 15, 4);
    let corpus = build_corpus(&raw, &HashSet::new(), CorpusConfig::keep_all()).unwrap();
    let v = corpus.vocab().len();
    // topic 0 holds the fruit words, topic 1 the tools
    let fruit: HashSet<&str> = ["apple", "banana", "cherry", "grape", "lemon", "mango"].into();
    let rows: Vec<Vec<f64>> = (0..2)
        .map(|t| {
            let row: Vec<f64> = (0..v)
                .map(|w| {
                    if fruit.contains(corpus.vocab().word(w).unwrap()) == (t == 0) {
                        1.0
                    } else {
                        1e-6
                    }
                })
                .collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let theta: Vec<Vec<f64>> = (0..corpus.num_docs())
        .map(|d| if d % 2 == 0 { vec![0.9, 0.1] } else { vec![0.1, 0.9] })
        .collect();
    let model = TopicModel::new(Matrix::from_rows(&rows).unwrap(), Matrix::from_rows(&theta).unwrap()).unwrap();
    let index = InvertedIndex::build(&corpus);
    let golds = select_top_gold(&corpus, 2).unwrap().sets;
    // a query of exactly a theme's six words matches every document of that
    // theme and nothing else
    let config = EvalConfig {
        ns: vec![6],
        ..EvalConfig::default()
    };
    let (report, _) = run_ir_eval(&corpus, &model, &index, &golds, &config).unwrap();
    for method in RankingMethod::ALL {
        assert_eq!(report.map(method, 6), Some(1.0), "{method}");
    }
    let topics: Vec<usize> = report.cells[0].results.iter().map(|r| r.topic).collect();
    assert_eq!(topics, [0, 1]);
}
