//! Corpus loading and preprocessing: cluster directories on disk, sentence
//! splitting, tokenization with stopword removal and Porter stemming, and the
//! TFIDF term-by-sentence matrix every model consumes.

pub mod porter;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// One summarization task as found on disk: an optional topic statement plus
/// the raw document texts, in lexicographic filename order.
#[derive(Debug, Clone)]
pub struct RawCluster {
    pub topic_id: String,
    /// Empty string when the cluster directory has no `topic.txt`.
    pub topic_statement: String,
    pub documents: Vec<(String, String)>,
}

/// A preprocessed sentence. `doc_index` is `None` for a topic node built from
/// the topic statement; a promoted first sentence keeps its document origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Sentence {
    pub raw_text: String,
    pub tokens: Vec<String>,
    pub doc_index: Option<usize>,
    /// 1-based position at split time, before any sentence was dropped.
    pub position_in_doc: usize,
    pub is_topic_sentence: bool,
}

/// Dense word <-> index map with first-seen ordering.
#[derive(Debug, Clone, Default)]
pub struct Wordmap {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Wordmap {
    pub fn from_sentences(sentences: &[Sentence]) -> Wordmap {
        let mut wm = Wordmap::default();
        for sentence in sentences {
            for token in &sentence.tokens {
                if !wm.index.contains_key(token) {
                    wm.index.insert(token.clone(), wm.words.len());
                    wm.words.push(token.clone());
                }
            }
        }
        wm
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, index: usize) -> &str {
        &self.words[index]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Non-negative M x (N+1) TFIDF matrix; column 0 is the topic sentence.
#[derive(Debug, Clone)]
pub struct TermDocMatrix {
    pub a: Array2<f64>,
}

/// A fully preprocessed cluster, ready for model fitting. `sentences[0]` is
/// the topic sentence and parallels column 0 of the matrix.
#[derive(Debug, Clone)]
pub struct ProcessedCluster {
    pub id: String,
    pub sentences: Vec<Sentence>,
    pub wordmap: Wordmap,
    pub matrix: TermDocMatrix,
    /// Sentence count per document at split time (for position features).
    pub doc_sentence_counts: Vec<usize>,
}

// ---------------------------------------------------------------------------
// Stopwords
// ---------------------------------------------------------------------------

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Parse a stopword list: UTF-8, one token per line, `#` starts a comment.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(|line| match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        })
        .map(str::trim)
        .filter(|line| !line.is_empty())
        .map(|word| word.to_lowercase())
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

/// The bundled SMART-style English list.
pub fn default_stopwords() -> HashSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

// ---------------------------------------------------------------------------
// Cluster loading
// ---------------------------------------------------------------------------

/// Load a cluster directory: one `*.txt` file per document plus an optional
/// `topic.txt` holding the topic statement. Subdirectories (such as `refs/`)
/// are ignored.
pub fn load_cluster(dir: &Path) -> Result<RawCluster> {
    let topic_id = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());

    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<_> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|ext| ext == "txt") {
            files.push(path);
        }
    }
    files.sort();

    let mut topic_statement = String::new();
    let mut documents = Vec::new();
    for path in files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        if name == "topic.txt" {
            topic_statement = text.trim().to_string();
        } else {
            let doc_id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or(name);
            documents.push((doc_id, text));
        }
    }

    if documents.is_empty() {
        return Err(Error::EmptyCluster(format!(
            "no document files in {}",
            dir.display()
        )));
    }

    Ok(RawCluster {
        topic_id,
        topic_statement,
        documents,
    })
}

// ---------------------------------------------------------------------------
// Sentence splitting
// ---------------------------------------------------------------------------

/// Abbreviations whose trailing period does not end a sentence. Single
/// alphabetic letters (initials like "J.") are exempted by rule.
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "rev", "hon", "st", "jr", "sr", "gen", "sen", "rep", "gov",
    "adm", "capt", "sgt", "col", "lt", "cmdr", "co", "inc", "corp", "ltd", "dept", "univ", "assn",
    "bros", "est", "fig", "vol", "no", "vs", "etc", "approx", "jan", "feb", "mar", "apr", "jun",
    "jul", "aug", "sep", "sept", "oct", "nov", "dec", "mon", "tue", "wed", "thu", "fri", "sat",
    "sun",
];

fn is_abbreviation(text: &str, punct_start: usize) -> bool {
    let prefix = &text[..punct_start];
    let word_start = prefix
        .rfind(|c: char| !c.is_alphanumeric())
        .map(|p| p + prefix[p..].chars().next().unwrap().len_utf8())
        .unwrap_or(0);
    let word = &prefix[word_start..];
    if word.is_empty() {
        return false;
    }
    if word.chars().count() == 1 && word.chars().all(char::is_alphabetic) {
        return true;
    }
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Split text into sentences. Boundaries sit at `.`, `!` or `?` followed by
/// whitespace and an uppercase letter, or by end of text; periods after known
/// abbreviations and single-letter initials do not split. Whitespace runs in
/// each returned sentence are collapsed to single spaces, so the concatenation
/// of the output equals the input modulo whitespace.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    for (i, c) in text.char_indices() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        if c == '.' && is_abbreviation(text, i) {
            continue;
        }
        let rest = &text[i + 1..];
        let boundary = if rest.trim().is_empty() {
            true
        } else {
            rest.starts_with(|c: char| c.is_whitespace())
                && rest.trim_start().starts_with(|c: char| c.is_uppercase())
        };
        if boundary {
            let piece = collapse_whitespace(&text[start..=i]);
            if !piece.is_empty() {
                sentences.push(piece);
            }
            start = i + 1;
        }
    }
    if start < text.len() {
        let piece = collapse_whitespace(&text[start..]);
        if !piece.is_empty() {
            sentences.push(piece);
        }
    }
    sentences
}

/// Fraction of a sentence's characters lying inside complete double-quoted
/// spans (quotes included). Sentences above 1/2 are treated as dialog.
fn quoted_fraction(text: &str) -> f64 {
    let total = text.chars().count();
    if total == 0 {
        return 0.0;
    }
    let mut quoted = 0usize;
    let mut span_len = 0usize;
    let mut in_quote = false;
    for c in text.chars() {
        if c == '"' {
            if in_quote {
                quoted += span_len + 2;
                span_len = 0;
                in_quote = false;
            } else {
                in_quote = true;
            }
        } else if in_quote {
            span_len += 1;
        }
    }
    quoted as f64 / total as f64
}

pub fn is_dialog_sentence(text: &str) -> bool {
    quoted_fraction(text) > 0.5
}

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

/// Lowercase, strip punctuation, drop stopwords, then Porter-stem what is left.
pub fn preprocess(sentence: &str, stopwords: &HashSet<String>) -> Vec<String> {
    sentence
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|token| !token.is_empty())
        .filter(|token| !stopwords.contains(*token))
        .map(porter::stem)
        .collect()
}

// ---------------------------------------------------------------------------
// TFIDF matrix
// ---------------------------------------------------------------------------

/// Raw TFIDF for a fixed sentence set: `A[w][s] = tf(w, s) * ln(S / df(w))`,
/// with S the column count and df the number of sentences containing w.
pub fn tfidf_matrix(sentences: &[Sentence], wordmap: &Wordmap) -> Array2<f64> {
    let m = wordmap.len();
    let s_count = sentences.len();
    let mut a = Array2::zeros((m, s_count));
    let mut df = vec![0usize; m];
    for sentence in sentences {
        let mut seen = HashSet::new();
        for token in &sentence.tokens {
            let w = wordmap.index_of(token).expect("token missing from wordmap");
            if seen.insert(w) {
                df[w] += 1;
            }
        }
    }
    for (s, sentence) in sentences.iter().enumerate() {
        for token in &sentence.tokens {
            let w = wordmap.index_of(token).unwrap();
            a[[w, s]] += 1.0;
        }
    }
    for w in 0..m {
        let idf = (s_count as f64 / df[w] as f64).ln();
        for s in 0..s_count {
            a[[w, s]] *= idf;
        }
    }
    a
}

/// Build the wordmap and TFIDF matrix for a cluster, iteratively dropping
/// non-topic sentences whose column is all-zero (and any vocabulary that
/// vanishes with them) until every retained column carries weight.
pub fn build_matrix(
    mut sentences: Vec<Sentence>,
) -> Result<(Wordmap, TermDocMatrix, Vec<Sentence>)> {
    loop {
        let wordmap = Wordmap::from_sentences(&sentences);
        if wordmap.is_empty() {
            return Err(Error::DegenerateCluster(
                "empty vocabulary after preprocessing".into(),
            ));
        }
        let a = tfidf_matrix(&sentences, &wordmap);
        let zero_cols: Vec<usize> = (0..sentences.len())
            .filter(|&s| a.column(s).iter().all(|&v| v == 0.0))
            .collect();
        if zero_cols.contains(&0) {
            return Err(Error::DegenerateCluster(
                "topic sentence column is all-zero".into(),
            ));
        }
        if zero_cols.is_empty() {
            return Ok((wordmap, TermDocMatrix { a }, sentences));
        }
        let drop: HashSet<usize> = zero_cols.into_iter().collect();
        sentences = sentences
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, s)| s)
            .collect();
    }
}

// ---------------------------------------------------------------------------
// Full cluster preprocessing
// ---------------------------------------------------------------------------

/// Split, clean, tokenize and vectorize one raw cluster. When the topic
/// statement is absent (or preprocesses to nothing) the first retained
/// document sentence is promoted to topic node.
pub fn process_cluster(raw: &RawCluster, stopwords: &HashSet<String>) -> Result<ProcessedCluster> {
    let mut doc_sentences: Vec<Sentence> = Vec::new();
    let mut doc_sentence_counts = vec![0usize; raw.documents.len()];

    for (doc_index, (_, text)) in raw.documents.iter().enumerate() {
        let split = split_sentences(text);
        doc_sentence_counts[doc_index] = split.len();
        for (pos, sentence_text) in split.into_iter().enumerate() {
            if is_dialog_sentence(&sentence_text) {
                continue;
            }
            let tokens = preprocess(&sentence_text, stopwords);
            if tokens.is_empty() {
                continue;
            }
            doc_sentences.push(Sentence {
                raw_text: sentence_text,
                tokens,
                doc_index: Some(doc_index),
                position_in_doc: pos + 1,
                is_topic_sentence: false,
            });
        }
    }

    if doc_sentences.is_empty() {
        return Err(Error::DegenerateCluster(format!(
            "cluster {} has no sentences left after preprocessing",
            raw.topic_id
        )));
    }

    let statement = collapse_whitespace(&raw.topic_statement);
    let statement_tokens = preprocess(&statement, stopwords);
    let topic = if !statement.is_empty() && !statement_tokens.is_empty() {
        Sentence {
            raw_text: statement,
            tokens: statement_tokens,
            doc_index: None,
            position_in_doc: 0,
            is_topic_sentence: true,
        }
    } else {
        let mut promoted = doc_sentences.remove(0);
        promoted.is_topic_sentence = true;
        promoted
    };

    if doc_sentences.is_empty() {
        return Err(Error::DegenerateCluster(format!(
            "cluster {} has a topic sentence but no candidates",
            raw.topic_id
        )));
    }

    let mut sentences = Vec::with_capacity(doc_sentences.len() + 1);
    sentences.push(topic);
    sentences.extend(doc_sentences);

    let (wordmap, matrix, sentences) = build_matrix(sentences)?;
    if sentences.len() < 2 {
        return Err(Error::DegenerateCluster(format!(
            "cluster {} lost all candidate sentences to zero columns",
            raw.topic_id
        )));
    }

    Ok(ProcessedCluster {
        id: raw.topic_id.clone(),
        sentences,
        wordmap,
        matrix,
        doc_sentence_counts,
    })
}

// ---------------------------------------------------------------------------
// Corpus statistics
// ---------------------------------------------------------------------------

/// Per-cluster contribution to corpus statistics, detachable from the full
/// `ProcessedCluster` so a pipeline can drop the matrices early.
#[derive(Debug, Clone)]
pub struct ClusterStats {
    /// Retained document sentences (the topic node excluded).
    pub candidate_sentences: usize,
    /// All retained sentences including the topic node.
    pub total_sentences: usize,
    pub token_count: usize,
    pub words: Vec<String>,
}

impl ClusterStats {
    pub fn of(pc: &ProcessedCluster) -> ClusterStats {
        ClusterStats {
            candidate_sentences: pc.sentences.len() - 1,
            total_sentences: pc.sentences.len(),
            token_count: pc.sentences.iter().map(|s| s.tokens.len()).sum(),
            words: pc.wordmap.words().to_vec(),
        }
    }
}

/// Aggregate preprocessing statistics over a set of processed clusters.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub clusters: usize,
    /// Mean retained document sentences per cluster (topic node excluded).
    pub avg_sentences_per_topic: f64,
    /// Mean stemmed-token count per retained sentence.
    pub avg_tokens_per_sentence: f64,
    /// Size of the union vocabulary across all clusters.
    pub wordmap_size: usize,
}

pub fn corpus_stats_from(parts: &[ClusterStats]) -> CorpusStats {
    let mut union: HashSet<&str> = HashSet::new();
    let mut candidate_total = 0usize;
    let mut token_total = 0usize;
    let mut sentence_total = 0usize;
    for part in parts {
        candidate_total += part.candidate_sentences;
        sentence_total += part.total_sentences;
        token_total += part.token_count;
        for word in &part.words {
            union.insert(word);
        }
    }
    CorpusStats {
        clusters: parts.len(),
        avg_sentences_per_topic: if parts.is_empty() {
            0.0
        } else {
            candidate_total as f64 / parts.len() as f64
        },
        avg_tokens_per_sentence: if sentence_total == 0 {
            0.0
        } else {
            token_total as f64 / sentence_total as f64
        },
        wordmap_size: union.len(),
    }
}

pub fn corpus_stats(clusters: &[ProcessedCluster]) -> CorpusStats {
    let parts: Vec<ClusterStats> = clusters.iter().map(ClusterStats::of).collect();
    corpus_stats_from(&parts)
}
