//! End-to-end orchestration: cluster discovery, model dispatch, artifact
//! writing, ROUGE evaluation, topic inspection and knowledge-base reporting.
//!
//! Artifacts land under the configured output directory:
//!
//! ```text
//! <output>/
//!   config.txt            effective configuration (reparseable)
//!   corpus_stats.txt      preprocessing statistics
//!   evaluation.tsv        written by `evaluate`
//!   <cluster>/
//!     summary.txt         one selected sentence per line, in pick order
//!     metadata.tsv        index<TAB>score at selection time
//!     factors.tsv         word, topic weights, presence columns (diagnostic)
//!     diagnostics.tsv     per-outer-iteration trace (optional)
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rayon::prelude::*;

use crate::config::{Model, RunConfig};
use crate::corpus::{
    corpus_stats_from, load_cluster, load_stopwords, process_cluster, ClusterStats, CorpusStats,
    ProcessedCluster,
};
use crate::error::{Error, Result};
use crate::eval::{coherence, rouge_n, rouge_tokens};
use crate::lifelong::KnowledgeBase;
use crate::ranking::{jltmmr, jtmmr, single_mr, OuterDiag, WeightedGraph};
use crate::summarizer::{combined_score, mmr_select, statistical_features, word_count, Summary};
use crate::topics::{top_words, FactorPair};

#[derive(Debug)]
pub struct RunReport {
    pub processed: Vec<String>,
    pub failures: Vec<(String, String)>,
    pub stats: CorpusStats,
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn resolve_stopwords(path: Option<&PathBuf>) -> Result<HashSet<String>> {
    match path {
        Some(p) => {
            if !p.is_file() {
                return Err(Error::Config(format!(
                    "stopword file {} does not exist",
                    p.display()
                )));
            }
            load_stopwords(p)
        }
        None => Ok(crate::corpus::default_stopwords()),
    }
}

/// Cluster subdirectories of the corpus root, in lexicographic name order
/// (the lifelong task order).
pub fn discover_clusters(corpus: &Path) -> Result<Vec<PathBuf>> {
    if !corpus.is_dir() {
        return Err(Error::Config(format!(
            "corpus root {} is not a directory",
            corpus.display()
        )));
    }
    let entries = fs::read_dir(corpus).map_err(|e| Error::io(corpus, e))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::Config(format!(
            "corpus root {} contains no cluster directories",
            corpus.display()
        )));
    }
    Ok(dirs)
}

struct ClusterRun {
    f: Vec<f64>,
    graph: WeightedGraph,
    factors: Option<FactorPair>,
    trace: Vec<OuterDiag>,
}

fn dispatch_model(
    cfg: &RunConfig,
    pc: &ProcessedCluster,
    kb: Option<&mut KnowledgeBase>,
) -> Result<ClusterRun> {
    let mw = cfg.mix_weights();
    match cfg.model {
        Model::SingleMr => {
            let res = single_mr(pc, &mw, &cfg.rank_options())?;
            Ok(ClusterRun {
                f: res.f.to_vec(),
                graph: res.graph,
                factors: None,
                trace: vec![],
            })
        }
        Model::Jtmmr => {
            let res = jtmmr(pc, &cfg.nmf_hyper(), &mw, &cfg.rank_options(), cfg.seed)?;
            Ok(ClusterRun {
                f: res.f.to_vec(),
                graph: res.graph,
                factors: Some(res.factors),
                trace: vec![],
            })
        }
        Model::Jltmmr | Model::JltmmrSf => {
            let kb = kb.expect("lifelong models run with a knowledge base");
            let res = jltmmr(
                pc,
                kb,
                &cfg.ltm_hyper(),
                &mw,
                &cfg.outer_options(),
                cfg.seed,
            )?;
            Ok(ClusterRun {
                f: res.f.to_vec(),
                graph: res.graph,
                factors: Some(res.factors),
                trace: res.trace,
            })
        }
    }
}

fn factors_dump(pc: &ProcessedCluster, factors: &FactorPair) -> String {
    let k = factors.u.ncols();
    let n = pc.matrix.a.ncols();
    let mut out = format!("#k={k}\n#cols={n}\n");
    for (w, word) in pc.wordmap.words().iter().enumerate() {
        out.push_str(word);
        for t in 0..k {
            out.push('\t');
            out.push_str(&factors.u[[w, t]].to_string());
        }
        out.push('\t');
        let cols: Vec<String> = (0..n)
            .filter(|&s| pc.matrix.a[[w, s]] != 0.0)
            .map(|s| s.to_string())
            .collect();
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    out
}

fn diagnostics_dump(trace: &[OuterDiag]) -> String {
    let mut out = String::from("#iteration\tobjective\tf_change\tkb_pairs\tkb_increments\tf\n");
    for diag in trace {
        let f_csv: Vec<String> = diag.f.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            diag.iteration,
            diag.objective,
            diag.f_change,
            diag.kb_pairs,
            diag.kb_increments,
            f_csv.join(",")
        ));
    }
    out
}

fn write_cluster_artifacts(
    cfg: &RunConfig,
    pc: &ProcessedCluster,
    run: &ClusterRun,
    summary: &Summary,
) -> Result<()> {
    let dir = cfg.output.join(&pc.id);
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let mut text = String::new();
    for &idx in &summary.selected {
        text.push_str(&pc.sentences[idx].raw_text);
        text.push('\n');
    }
    write_file(&dir.join("summary.txt"), &text)?;

    let mut meta = String::new();
    for (&idx, &score) in summary.selected.iter().zip(&summary.scores) {
        meta.push_str(&format!("{idx}\t{score}\n"));
    }
    write_file(&dir.join("metadata.tsv"), &meta)?;

    if cfg.dump_factors {
        if let Some(factors) = &run.factors {
            write_file(&dir.join("factors.tsv"), &factors_dump(pc, factors))?;
        }
    }
    if cfg.dump_diagnostics && !run.trace.is_empty() {
        write_file(&dir.join("diagnostics.tsv"), &diagnostics_dump(&run.trace))?;
    }
    Ok(())
}

fn run_cluster(
    cfg: &RunConfig,
    dir: &Path,
    stopwords: &HashSet<String>,
    kb: Option<&mut KnowledgeBase>,
) -> Result<ClusterStats> {
    let raw = load_cluster(dir)?;
    let pc = process_cluster(&raw, stopwords)?;
    let run = dispatch_model(cfg, &pc, kb)?;

    let scores = match cfg.model {
        Model::JltmmrSf => {
            let topic_space = run.factors.as_ref().map(|fp| &fp.v);
            let feats = statistical_features(&pc, topic_space, cfg.sim_source)?;
            combined_score(&run.f, &feats, &cfg.sf_weights())?
        }
        _ => run.f.clone(),
    };
    let word_counts: Vec<usize> = pc
        .sentences
        .iter()
        .map(|s| word_count(&s.raw_text))
        .collect();
    let summary = mmr_select(&run.graph.w, &scores, &word_counts, &cfg.sf_weights())?;
    write_cluster_artifacts(cfg, &pc, &run, &summary)?;
    log::info!(
        "cluster {}: {} sentences, summary {} words in {} sentences",
        pc.id,
        pc.sentences.len() - 1,
        summary.word_count,
        summary.selected.len()
    );
    Ok(ClusterStats::of(&pc))
}

fn stats_text(stats: &CorpusStats) -> String {
    format!(
        "clusters\t{}\navg_sentences_per_topic\t{:.4}\navg_tokens_per_sentence\t{:.4}\nwordmap_size\t{}\n",
        stats.clusters,
        stats.avg_sentences_per_topic,
        stats.avg_tokens_per_sentence,
        stats.wordmap_size
    )
}

/// Run the summarize pipeline over every cluster under the corpus root.
/// Lifelong models process clusters strictly in task order against the shared
/// knowledge base; the others may fan out across `parallelism` threads.
/// Per-cluster failures are logged and skipped, and reported at the end.
pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let stopwords = resolve_stopwords(cfg.stopwords.as_ref())?;
    let dirs = discover_clusters(&cfg.corpus)?;
    fs::create_dir_all(&cfg.output).map_err(|e| Error::io(&cfg.output, e))?;
    write_file(&cfg.output.join("config.txt"), &cfg.to_config_string())?;

    let mut outcomes: Vec<(String, Result<ClusterStats>)> = Vec::new();
    if cfg.model.is_lifelong() {
        let kb_path = cfg.kb.as_ref().expect("validated");
        let mut kb = if kb_path.is_file() {
            KnowledgeBase::load(kb_path)?
        } else {
            KnowledgeBase::new()
        };
        for dir in &dirs {
            let id = dir.file_name().unwrap().to_string_lossy().into_owned();
            let outcome = run_cluster(cfg, dir, &stopwords, Some(&mut kb));
            outcomes.push((id, outcome));
        }
        kb.save(kb_path)?;
    } else if cfg.parallelism <= 1 {
        for dir in &dirs {
            let id = dir.file_name().unwrap().to_string_lossy().into_owned();
            let outcome = run_cluster(cfg, dir, &stopwords, None);
            outcomes.push((id, outcome));
        }
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.parallelism)
            .build()
            .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
        outcomes = pool.install(|| {
            dirs.par_iter()
                .map(|dir| {
                    let id = dir.file_name().unwrap().to_string_lossy().into_owned();
                    (id, run_cluster(cfg, dir, &stopwords, None))
                })
                .collect()
        });
    }

    let mut processed = Vec::new();
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (id, outcome) in outcomes {
        match outcome {
            Ok(part) => {
                processed.push(id);
                parts.push(part);
            }
            Err(e) => {
                log::error!("cluster {id} skipped: {e}");
                failures.push((id, e.to_string()));
            }
        }
    }

    let stats = corpus_stats_from(&parts);
    let text = stats_text(&stats);
    print!("{text}");
    write_file(&cfg.output.join("corpus_stats.txt"), &text)?;

    // Score the fresh summaries right away when the corpus bundles
    // references; clusters without refs/ are simply not scored.
    match evaluate(cfg) {
        Ok(outcome) => {
            for (id, msg) in outcome.failures {
                log::warn!("evaluation of cluster {id} failed: {msg}");
            }
        }
        Err(Error::Config(_)) => {}
        Err(e) => return Err(e),
    }

    Ok(RunReport {
        processed,
        failures,
        stats,
    })
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct EvalOutcome {
    pub report: String,
    pub evaluated: usize,
    pub failures: Vec<(String, String)>,
}

fn load_references(
    cluster_dir: &Path,
    stemming: bool,
    stopwords: Option<&HashSet<String>>,
) -> Result<Vec<Vec<String>>> {
    let refs_dir = cluster_dir.join("refs");
    if !refs_dir.is_dir() {
        return Ok(vec![]);
    }
    let entries = fs::read_dir(&refs_dir).map_err(|e| Error::io(&refs_dir, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
        .collect();
    files.sort();
    let mut refs = Vec::new();
    for file in files {
        let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        refs.push(rouge_tokens(&text, stemming, stopwords));
    }
    Ok(refs)
}

/// Score existing summaries against `refs/*.txt` reference summaries with
/// ROUGE-1..4. The report is line-oriented `cluster<TAB>metric<TAB>value`
/// with a final MEAN row per metric, and is also written to
/// `<output>/evaluation.tsv`.
pub fn evaluate(cfg: &RunConfig) -> Result<EvalOutcome> {
    if cfg.corpus.as_os_str().is_empty() || cfg.output.as_os_str().is_empty() {
        return Err(Error::Config("corpus and output paths are required".into()));
    }
    let stopwords = if cfg.rouge_stopwords {
        Some(resolve_stopwords(cfg.stopwords.as_ref())?)
    } else {
        None
    };
    let dirs = discover_clusters(&cfg.corpus)?;

    let orders = [1usize, 2, 3, 4];
    let mut rows = String::new();
    let mut sums = [0.0f64; 4];
    let mut evaluated = 0usize;
    let mut failures = Vec::new();

    for dir in &dirs {
        let id = dir.file_name().unwrap().to_string_lossy().into_owned();
        let refs = load_references(dir, cfg.rouge_stemming, stopwords.as_ref())?;
        if refs.is_empty() {
            log::warn!("cluster {id}: no reference summaries, skipping");
            continue;
        }
        let summary_path = cfg.output.join(&id).join("summary.txt");
        let candidate = match fs::read_to_string(&summary_path) {
            Ok(text) => rouge_tokens(&text, cfg.rouge_stemming, stopwords.as_ref()),
            Err(e) => {
                failures.push((id.clone(), format!("missing summary: {e}")));
                continue;
            }
        };
        let mut values = [0.0f64; 4];
        let mut failed = false;
        for (slot, &n) in orders.iter().enumerate() {
            match rouge_n(&refs, &candidate, n) {
                Ok(v) => values[slot] = v,
                Err(e) => {
                    failures.push((id.clone(), e.to_string()));
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            continue;
        }
        for (slot, &n) in orders.iter().enumerate() {
            rows.push_str(&format!("{id}\trouge-{n}\t{:.5}\n", values[slot]));
            sums[slot] += values[slot];
        }
        evaluated += 1;
    }

    if evaluated == 0 {
        return Err(Error::Config(
            "no cluster could be evaluated (check refs/ directories and summaries)".into(),
        ));
    }
    for (slot, &n) in orders.iter().enumerate() {
        rows.push_str(&format!(
            "MEAN\trouge-{n}\t{:.5}\n",
            sums[slot] / evaluated as f64
        ));
    }
    write_file(&cfg.output.join("evaluation.tsv"), &rows)?;
    Ok(EvalOutcome {
        report: rows,
        evaluated,
        failures,
    })
}

// ---------------------------------------------------------------------------
// Topic inspection
// ---------------------------------------------------------------------------

fn parse_factors(path: &Path) -> Result<(Vec<String>, Array2<f64>, Array2<f64>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let parse_header = |entry: Option<(usize, &str)>, prefix: &str| -> Result<usize> {
        match entry {
            Some((idx, line)) if line.starts_with(prefix) => {
                line[prefix.len()..].parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("bad header {line:?}"),
                })
            }
            other => Err(Error::Parse {
                path: path.to_path_buf(),
                line: other.map(|(i, _)| i + 1).unwrap_or(1),
                msg: format!("expected {prefix} header"),
            }),
        }
    };
    let k = parse_header(lines.next(), "#k=")?;
    let cols = parse_header(lines.next(), "#cols=")?;

    let mut words = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut presence_rows: Vec<Vec<usize>> = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != k + 2 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected {} fields, got {}", k + 2, fields.len()),
            });
        }
        words.push(fields[0].to_string());
        for t in 0..k {
            let v: f64 = fields[1 + t].parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("bad weight {:?}", fields[1 + t]),
            })?;
            weights.push(v);
        }
        let presence = if fields[k + 1].is_empty() {
            vec![]
        } else {
            fields[k + 1]
                .split(',')
                .map(|c| {
                    c.parse().map_err(|_| Error::Parse {
                        path: path.to_path_buf(),
                        line: idx + 1,
                        msg: format!("bad presence column {c:?}"),
                    })
                })
                .collect::<Result<Vec<usize>>>()?
        };
        presence_rows.push(presence);
    }

    let m = words.len();
    let u = Array2::from_shape_vec((m, k), weights)
        .map_err(|e| Error::Contract(format!("factor dump shape: {e}")))?;
    let mut presence = Array2::zeros((m, cols));
    for (w, row) in presence_rows.iter().enumerate() {
        for &c in row {
            if c >= cols {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: w + 3,
                    msg: format!("presence column {c} out of range {cols}"),
                });
            }
            presence[[w, c]] = 1.0;
        }
    }
    Ok((words, u, presence))
}

/// Render the top-10 words and coherence of every dumped topic, cluster by
/// cluster in lexicographic order.
pub fn inspect_topics(output: &Path) -> Result<String> {
    if output.as_os_str().is_empty() {
        return Err(Error::Config("output path is required".into()));
    }
    let entries = fs::read_dir(output).map_err(|e| Error::io(output, e))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir() && p.join("factors.tsv").is_file())
        .collect();
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::MissingArtifact(format!(
            "no factor dumps under {} (run summarize with dump_factors = true first)",
            output.display()
        )));
    }

    let mut out = String::new();
    for dir in dirs {
        let id = dir.file_name().unwrap().to_string_lossy().into_owned();
        let (words, u, presence) = parse_factors(&dir.join("factors.tsv"))?;
        let tops = top_words(&u, 10);
        let values = coherence(&u, &presence, 10)?;
        out.push_str(&format!("cluster {id}\n"));
        for (t, (top, value)) in tops.iter().zip(&values).enumerate() {
            let listed: Vec<&str> = top.iter().map(|&w| words[w].as_str()).collect();
            out.push_str(&format!(
                "  topic {t} (coherence {value:.6}): {}\n",
                listed.join(" ")
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Knowledge-base reporting
// ---------------------------------------------------------------------------

/// Human-readable snapshot of a persisted knowledge base.
pub fn kb_stats(path: &Path) -> Result<String> {
    let kb = KnowledgeBase::load(path)?;
    let mut out = format!(
        "tasks\t{}\npairs\t{}\nwords\t{}\nincrements\t{}\n",
        kb.task_count(),
        kb.pair_len(),
        kb.word_len(),
        kb.total_increments()
    );
    let mut pairs: Vec<(&(String, String), &u64)> = kb.iter_pairs().collect();
    pairs.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    for ((a, b), count) in pairs.into_iter().take(10) {
        out.push_str(&format!("top\t{a}\t{b}\t{count}\n"));
    }
    Ok(out)
}
