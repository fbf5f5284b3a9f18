//! `topic-rerank`: re-rank topic words and evaluate the rankings by retrieval.

mod commands;
mod config;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::Options;
use workspace::Workspace;

#[derive(Debug, Parser)]
#[command(name = "topic-rerank", version, about)]
struct Cli {
    /// Workspace directory holding the configuration and all artifacts.
    #[arg(long, short = 'w', global = true, env = workspace::ENV_VAR, default_value = ".")]
    workspace: PathBuf,
    #[command(flatten)]
    options: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tokenize and filter a JSON Lines corpus into the workspace.
    Preprocess,
    /// Fit an LDA model with collapsed Gibbs sampling.
    Train,
    /// Import phi and theta matrices produced by another trainer.
    ImportModel {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        theta: PathBuf,
    },
    /// Pick the candidate topic count with the highest mean coherence.
    SelectTopics,
    /// Write every topic's top words under each ranking method.
    Rerank,
    /// Score the model's topics with a word-association metric.
    Coherence,
    /// Retrieval evaluation: MAP per ranking method and query length.
    IrEval,
    /// Pearson correlation of two result vectors.
    Correlate {
        /// Evaluation report (.json) or a file with one value per line.
        x: PathBuf,
        y: PathBuf,
    },
    /// Summarize the artifacts present in the workspace.
    Report,
}

fn run(cli: Cli) -> Result<()> {
    let ws = Workspace::new(cli.workspace);
    let settings = cli.options.over(Options::load(ws.root())?).resolve();
    match cli.command {
        Command::Preprocess => commands::preprocess(&ws, &settings),
        Command::Train => commands::train(&ws, &settings),
        Command::ImportModel { phi, theta } => commands::import_model(&ws, &phi, &theta),
        Command::SelectTopics => commands::select_topics(&ws, &settings),
        Command::Rerank => commands::rerank(&ws, &settings),
        Command::Coherence => commands::coherence(&ws, &settings),
        Command::IrEval => commands::ir_eval(&ws, &settings),
        Command::Correlate { x, y } => commands::correlate(&x, &y),
        Command::Report => commands::report(&ws),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn list_flags_split_on_commas() {
        let cli = Cli::parse_from(["topic-rerank", "ir-eval", "--ns", "5,10", "--methods", "orig,tfidf"]);
        assert_eq!(cli.options.ns, Some(vec![5, 10]));
        assert_eq!(cli.options.methods.unwrap().len(), 2);
    }
}
