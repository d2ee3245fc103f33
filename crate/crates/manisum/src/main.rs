//! Thin command-line front end over the manisum library. Flags mirror the
//! configuration keys; a `key = value` config file provides the base values
//! and flags override it.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manisum::config::RunConfig;
use manisum::error::Error;
use manisum::pipeline;

#[derive(Parser)]
#[command(
    name = "manisum",
    version,
    about = "Extractive multi-document summarization with topic-model manifold ranking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize every cluster under the corpus root
    Summarize(ConfigArgs),
    /// Score existing summaries against refs/ reference summaries
    Evaluate(ConfigArgs),
    /// Show top words and coherence of dumped topics
    InspectTopics(ConfigArgs),
    /// Knowledge-base utilities
    #[command(subcommand)]
    Kb(KbCommand),
}

#[derive(Subcommand)]
enum KbCommand {
    /// Print statistics of a knowledge-base file
    Stats {
        #[arg(long)]
        kb: PathBuf,
    },
}

/// Every flag maps onto one configuration key; parsing and validation live in
/// the library so file values and flags get identical treatment.
#[derive(Args, Default)]
struct ConfigArgs {
    /// Configuration file (line-oriented `key = value`, # comments)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model: single_mr, jtmmr, jltmmr or jltmmr_sf
    #[arg(long)]
    model: Option<String>,
    /// Corpus root holding one directory per cluster
    #[arg(long)]
    corpus: Option<String>,
    /// Output directory for summaries and reports
    #[arg(long)]
    output: Option<String>,
    /// Knowledge-base file (required for lifelong models)
    #[arg(long)]
    kb: Option<String>,
    /// Stopword file; the bundled list is used when omitted
    #[arg(long)]
    stopwords: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    alpha_mr: Option<String>,
    #[arg(long)]
    alpha_v: Option<String>,
    #[arg(long)]
    alpha_a: Option<String>,
    #[arg(long)]
    alpha_overlap: Option<String>,
    #[arg(long)]
    alpha_ltm: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    mu1: Option<String>,
    #[arg(long)]
    mu2: Option<String>,
    #[arg(long)]
    mu3: Option<String>,
    #[arg(long)]
    mu4: Option<String>,
    #[arg(long)]
    mu5: Option<String>,
    /// Summary length budget in words
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    nmf_tol: Option<String>,
    #[arg(long)]
    nmf_max_iters: Option<String>,
    #[arg(long)]
    outer_tol: Option<String>,
    #[arg(long)]
    outer_max_iters: Option<String>,
    #[arg(long)]
    rank_tol: Option<String>,
    #[arg(long)]
    rank_max_iters: Option<String>,
    /// true/false: apply the rank-derived column weights R
    #[arg(long)]
    rank_weighting: Option<String>,
    /// tfidf or topic: embedding behind the topic-similarity feature
    #[arg(long)]
    sim_source: Option<String>,
    #[arg(long)]
    rouge_stemming: Option<String>,
    #[arg(long)]
    rouge_stopwords: Option<String>,
    /// Worker threads for non-lifelong models
    #[arg(long)]
    parallelism: Option<String>,
    #[arg(long)]
    dump_factors: Option<String>,
    #[arg(long)]
    dump_diagnostics: Option<String>,
}

impl ConfigArgs {
    fn to_config(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        let overrides: [(&str, &Option<String>); 35] = [
            ("model", &self.model),
            ("corpus", &self.corpus),
            ("output", &self.output),
            ("kb", &self.kb),
            ("stopwords", &self.stopwords),
            ("k", &self.k),
            ("beta", &self.beta),
            ("lambda", &self.lambda),
            ("alpha_mr", &self.alpha_mr),
            ("alpha_v", &self.alpha_v),
            ("alpha_a", &self.alpha_a),
            ("alpha_overlap", &self.alpha_overlap),
            ("alpha_ltm", &self.alpha_ltm),
            ("gamma", &self.gamma),
            ("omega", &self.omega),
            ("mu1", &self.mu1),
            ("mu2", &self.mu2),
            ("mu3", &self.mu3),
            ("mu4", &self.mu4),
            ("mu5", &self.mu5),
            ("budget", &self.budget),
            ("seed", &self.seed),
            ("nmf_tol", &self.nmf_tol),
            ("nmf_max_iters", &self.nmf_max_iters),
            ("outer_tol", &self.outer_tol),
            ("outer_max_iters", &self.outer_max_iters),
            ("rank_tol", &self.rank_tol),
            ("rank_max_iters", &self.rank_max_iters),
            ("rank_weighting", &self.rank_weighting),
            ("sim_source", &self.sim_source),
            ("rouge_stemming", &self.rouge_stemming),
            ("rouge_stopwords", &self.rouge_stopwords),
            ("parallelism", &self.parallelism),
            ("dump_factors", &self.dump_factors),
            ("dump_diagnostics", &self.dump_diagnostics),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                cfg.set(key, value)?;
            }
        }
        Ok(cfg)
    }
}

fn execute(command: Command) -> Result<u8, Error> {
    match command {
        Command::Summarize(args) => {
            let cfg = args.to_config()?;
            let report = pipeline::run(&cfg)?;
            println!(
                "summarized {} cluster(s) into {}",
                report.processed.len(),
                cfg.output.display()
            );
            if report.failures.is_empty() {
                Ok(0)
            } else {
                for (id, msg) in &report.failures {
                    eprintln!("failed cluster {id}: {msg}");
                }
                Ok(2)
            }
        }
        Command::Evaluate(args) => {
            let cfg = args.to_config()?;
            let outcome = pipeline::evaluate(&cfg)?;
            print!("{}", outcome.report);
            if outcome.failures.is_empty() {
                Ok(0)
            } else {
                for (id, msg) in &outcome.failures {
                    eprintln!("failed cluster {id}: {msg}");
                }
                Ok(2)
            }
        }
        Command::InspectTopics(args) => {
            let cfg = args.to_config()?;
            print!("{}", pipeline::inspect_topics(&cfg.output)?);
            Ok(0)
        }
        Command::Kb(KbCommand::Stats { kb }) => {
            print!("{}", pipeline::kb_stats(&kb)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
