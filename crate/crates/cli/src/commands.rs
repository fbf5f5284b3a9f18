//! One function per subcommand. Each reads its upstream artifacts from the
//! workspace, runs one pipeline stage and writes that stage's outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use topic_rerank::coherence::{model_coherence, select_topic_count, topic_coherence};
use topic_rerank::corpus::{default_stopwords, read_jsonl_file, read_stopwords_file, CorpusSummary};
use topic_rerank::eval::{pearson, run_ir_eval, select_top_gold, truncate_corpus_labels};
use topic_rerank::model::{export_model, import_model_files, train_lda_with_metadata, ModelMetadata};
use topic_rerank::rerank::{rerank_all, WordScorer};
use topic_rerank::{
    build_corpus, CoherenceReport, CoocStats, EvalReport, InvertedIndex, Metric, RankingMethod, TopicModel, Window,
};

use crate::config::Settings;
use crate::workspace::{check_dimensions, read_json, write_json, Workspace};

#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub name: String,
    #[serde(flatten)]
    pub summary: CorpusSummary,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Selection {
    pub metric: Metric,
    pub window: Window,
    pub top_n: usize,
    pub best: usize,
    pub scores: Vec<CandidateScore>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CandidateScore {
    pub topics: usize,
    pub coherence: f64,
}

fn dataset_table(rows: &[&DatasetSummary]) -> String {
    let mut out = format!("{:<16}{:>12}{:>16}\n", "Dataset", "Documents", "Distinct Words");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<16}{:>12}{:>16}",
            r.name, r.summary.documents, r.summary.distinct_words
        );
    }
    out
}

pub fn preprocess(ws: &Workspace, s: &Settings) -> Result<()> {
    let input = s.input()?;
    let raw = read_jsonl_file(input).with_context(|| format!("reading corpus {}", input.display()))?;
    let stopwords = match &s.stopwords {
        Some(p) => read_stopwords_file(p).with_context(|| format!("reading stopword file {}", p.display()))?,
        None => default_stopwords(),
    };
    let corpus = build_corpus(&raw, &stopwords, s.corpus)?;
    let dir = ws.ensure(ws.corpus_dir())?;
    corpus
        .save(&dir)
        .with_context(|| format!("writing corpus to {}", dir.display()))?;
    let summary = DatasetSummary {
        name: ws.display_name(s.name.as_deref()),
        summary: corpus.summary(),
    };
    write_json(&ws.summary_file(), &summary)?;
    print!("{}", dataset_table(&[&summary]));
    if summary.summary.empty_documents > 0 {
        eprintln!(
            "warning: {} documents have no tokens left after filtering",
            summary.summary.empty_documents
        );
    }
    Ok(())
}

pub fn train(ws: &Workspace, s: &Settings) -> Result<()> {
    let corpus = ws.load_corpus()?;
    let cfg = s.gibbs(s.topics);
    let (model, meta): (TopicModel, _) = train_lda_with_metadata(&corpus, cfg)?;
    let dir = ws.ensure(ws.model_dir())?;
    export_model(&model, &meta, &dir)?;
    println!(
        "trained {} topics on {} documents (V = {}), alpha {}, beta {}, {} sweeps, seed {}",
        cfg.num_topics,
        corpus.num_docs(),
        corpus.vocab().len(),
        cfg.alpha,
        cfg.beta,
        cfg.iterations,
        cfg.seed
    );
    Ok(())
}

pub fn import_model(ws: &Workspace, phi: &Path, theta: &Path) -> Result<()> {
    let corpus = ws.load_corpus()?;
    let imported = import_model_files::<f64>(phi, theta)?;
    for w in &imported.warnings {
        eprintln!("warning: {w}");
    }
    check_dimensions(&imported.model, &corpus)?;
    let dir = ws.ensure(ws.model_dir())?;
    export_model(&imported.model, &ModelMetadata::imported(&imported.model), &dir)?;
    println!(
        "imported {} topics over {} words",
        imported.model.num_topics(),
        imported.model.vocab_size()
    );
    Ok(())
}

pub fn select_topics(ws: &Workspace, s: &Settings) -> Result<()> {
    let corpus = ws.load_corpus()?;
    let stats = CoocStats::build(&corpus, s.window)?;
    let template = s.gibbs(s.topics);
    let sel = select_topic_count::<f64>(&corpus, &s.candidates, &template, &stats, s.metric, s.coherence_top_n)?;
    let selection = Selection {
        metric: s.metric,
        window: s.window,
        top_n: s.coherence_top_n,
        best: sel.best,
        scores: sel
            .scores
            .iter()
            .map(|&(topics, coherence)| CandidateScore { topics, coherence })
            .collect(),
    };
    write_json(&ws.selection_file(), &selection)?;
    println!("{:<8}{:>12}", "topics", s.metric);
    for c in &selection.scores {
        let mark = if c.topics == selection.best { "  *" } else { "" };
        println!("{:<8}{:>12.4}{mark}", c.topics, c.coherence);
    }
    println!(
        "best: {} topics (train with --topics {})",
        selection.best, selection.best
    );
    Ok(())
}

pub fn rerank(ws: &Workspace, s: &Settings) -> Result<()> {
    let corpus = ws.load_corpus()?;
    let (model, _) = ws.load_model(&corpus)?;
    let ranked = rerank_all(&model, corpus.vocab(), &s.methods, s.top_n)?;
    let dir = ws.ensure(ws.rerank_dir())?;
    let mut json = String::new();
    let mut queries = String::new();
    for r in &ranked {
        json.push_str(&serde_json::to_string(&r.to_json())?);
        json.push('\n');
        queries.push_str(&r.to_query_line());
        queries.push('\n');
    }
    fs::write(dir.join("topics.jsonl"), json)?;
    fs::write(dir.join("queries.tsv"), queries)?;
    println!(
        "{} ranked topics ({} methods x {} topics, top {} words) written to {}",
        ranked.len(),
        s.methods.len(),
        model.num_topics(),
        s.top_n,
        dir.display()
    );
    Ok(())
}

pub fn coherence(ws: &Workspace, s: &Settings) -> Result<()> {
    let corpus = ws.load_corpus()?;
    let (model, _) = ws.load_model(&corpus)?;
    let stats = CoocStats::build(&corpus, s.window)?;
    let report: CoherenceReport = model_coherence(&model, &stats, s.coherence_top_n, s.metric)?;
    write_json(&ws.coherence_file(), &report)?;
    println!(
        "{} over top {} words, window {}: mean {:.4}",
        report.metric, report.top_n, report.window, report.mean
    );
    // the same statistic for the other rankings' top words
    let scorer = WordScorer::new(&model, corpus.vocab())?;
    for &method in &s.methods {
        let mut sum = 0.0;
        for t in 0..model.num_topics() {
            let words = scorer.rank(t, method, s.coherence_top_n, corpus.vocab())?.word_ids();
            sum += topic_coherence::<f64>(&stats, &words, s.metric)?;
        }
        println!("  {:<6} {:.4}", method.name(), sum / model.num_topics() as f64);
    }
    Ok(())
}

pub fn ir_eval(ws: &Workspace, s: &Settings) -> Result<()> {
    let mut corpus = ws.load_corpus()?;
    let (model, meta) = ws.load_model(&corpus)?;
    if let Some(depth) = s.label_depth {
        corpus = truncate_corpus_labels(&corpus, depth, s.label_separator)?;
    }
    let index = InvertedIndex::with_params(&corpus, s.bm25)?;
    let gold = select_top_gold(&corpus, s.gold_labels)?;
    if let Some(w) = &gold.shortfall {
        eprintln!("warning: {w}");
    }
    let (mut report, runs): (EvalReport, _) = run_ir_eval(&corpus, &model, &index, &gold.sets, &s.eval())?;
    report.metadata.seed = meta.and_then(|m| m.seed);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    let dir = ws.ensure(ws.eval_dir())?;
    write_json(&ws.report_file(), &report)?;
    let table = report.to_table(&ws.display_name(s.name.as_deref()));
    fs::write(dir.join("report.txt"), &table)?;
    let mut qrels = BufWriter::new(File::create(dir.join("qrels.txt"))?);
    report.write_qrels(&mut qrels, &gold.sets)?;
    qrels.flush()?;
    let runs_dir = ws.ensure(dir.join("runs"))?;
    for run in &runs {
        let mut out = BufWriter::new(File::create(runs_dir.join(format!("{}.txt", run.tag())))?);
        run.write(&mut out)?;
        out.flush()?;
    }
    print!("{table}");
    Ok(())
}

/// Reads a result vector: the MAPs of an evaluation report (`.json`), or
/// the last whitespace-separated field of every non-empty, non-`#` line.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    if path.extension().is_some_and(|e| e == "json") {
        let report: EvalReport = read_json(path)?;
        return Ok(report.maps());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.split_whitespace().next_back().expect("line is nonempty");
        let v: f64 = field
            .parse()
            .with_context(|| format!("{}:{}: {field:?} is not a number", path.display(), i + 1))?;
        values.push(v);
    }
    Ok(values)
}

pub fn correlate(x: &Path, y: &Path) -> Result<()> {
    let xs = read_vector(x)?;
    let ys = read_vector(y)?;
    ensure!(
        xs.len() == ys.len(),
        "{} has {} values but {} has {}",
        x.display(),
        xs.len(),
        y.display(),
        ys.len()
    );
    ensure!(xs.len() >= 2, "need at least two paired values, got {}", xs.len());
    let r = pearson(&xs, &ys)?;
    println!("pearson r = {r:.6} (n = {})", xs.len());
    Ok(())
}

pub fn report(ws: &Workspace) -> Result<()> {
    let mut shown = false;
    let mut name = ws.display_name(None);
    if ws.summary_file().exists() {
        let summary: DatasetSummary = read_json(&ws.summary_file())?;
        print!("{}", dataset_table(&[&summary]));
        name = summary.name;
        shown = true;
    }
    let meta_path = ws.model_dir().join(topic_rerank::model::META_FILE);
    if meta_path.exists() {
        let m: ModelMetadata = read_json(&meta_path)?;
        let seed = m.seed.map_or_else(|| "-".into(), |s| s.to_string());
        println!(
            "\nmodel: {} topics, {} words, {} documents ({}, seed {seed})",
            m.num_topics, m.vocab_size, m.num_docs, m.trainer
        );
        shown = true;
    }
    if ws.selection_file().exists() {
        let sel: Selection = read_json(&ws.selection_file())?;
        let scores: Vec<String> = sel
            .scores
            .iter()
            .map(|c| format!("{}={:.4}", c.topics, c.coherence))
            .collect();
        println!(
            "\ntopic count selection ({}): best {} [{}]",
            sel.metric,
            sel.best,
            scores.join(" ")
        );
        shown = true;
    }
    if ws.coherence_file().exists() {
        let c: CoherenceReport = read_json(&ws.coherence_file())?;
        println!(
            "\ncoherence ({}, top {}, window {}): mean {:.4}",
            c.metric, c.top_n, c.window, c.mean
        );
        shown = true;
    }
    if ws.report_file().exists() {
        let r: EvalReport = read_json(&ws.report_file())?;
        println!("\nMAP by ranking method and query length");
        print!("{}", r.to_table(&name));
        let mut best: BTreeMap<usize, (RankingMethod, f64)> = BTreeMap::new();
        for c in &r.cells {
            let e = best.entry(c.n).or_insert((c.method, c.map));
            if c.map > e.1 {
                *e = (c.method, c.map);
            }
        }
        for (n, (m, v)) in best {
            println!("  best at n={n}: {m} ({v:.4})");
        }
        shown = true;
    }
    if !shown {
        bail!(
            "workspace {} has no artifacts yet; start with `topic-rerank preprocess --input FILE`",
            ws.root().display()
        );
    }
    Ok(())
}
