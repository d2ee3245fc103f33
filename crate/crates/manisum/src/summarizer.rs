//! Summary construction: surface statistical features, the combined sentence
//! score, and diversity-penalized greedy selection under a word budget.

use std::collections::{HashMap, HashSet};

use ndarray::Array2;

use crate::corpus::ProcessedCluster;
use crate::error::{Error, Result};
use crate::math::cosine;

/// Weights of the five surface features, the diversity penalty and the
/// summary word budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SfWeights {
    pub mu: [f64; 5],
    pub omega: f64,
    pub length_budget: usize,
}

impl Default for SfWeights {
    fn default() -> Self {
        SfWeights {
            mu: [0.2; 5],
            omega: 1.0,
            length_budget: 250,
        }
    }
}

/// Which sentence embedding feeds the topic-similarity feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimSource {
    /// TFIDF column of the sentence (self-contained default).
    Tfidf,
    /// Topic-space column from a fitted factorization.
    Topic,
}

/// Surface features of one sentence, each in a bounded range.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceFeatures {
    /// Mean cluster-wide term frequency of the sentence's unique tokens.
    pub tf: f64,
    /// Similarity to the topic sentence in the chosen embedding.
    pub sim_ts: f64,
    /// Unigram overlap with the topic sentence, relative to the topic.
    pub overlap_topic: f64,
    /// Unigram overlap with the topic sentence, relative to the sentence.
    pub overlap_self: f64,
    /// Linear position decay: 1 for the first sentence of a document,
    /// 1/n for the last of n.
    pub position: f64,
}

/// Compute the five surface features for every sentence (index 0 is the
/// topic node; its entries are only placeholders since it is never a
/// selection candidate).
pub fn statistical_features(
    pc: &ProcessedCluster,
    topic_space: Option<&Array2<f64>>,
    source: SimSource,
) -> Result<Vec<SentenceFeatures>> {
    let emb = match source {
        SimSource::Tfidf => &pc.matrix.a,
        SimSource::Topic => topic_space.ok_or_else(|| {
            Error::Contract("topic-space similarity requested without factors".into())
        })?,
    };
    if emb.ncols() != pc.sentences.len() {
        return Err(Error::Contract(
            "embedding columns must match sentence count".into(),
        ));
    }

    let mut term_freq: HashMap<&str, usize> = HashMap::new();
    for sentence in &pc.sentences {
        for token in &sentence.tokens {
            *term_freq.entry(token.as_str()).or_insert(0) += 1;
        }
    }

    let topic_set: HashSet<&str> = pc.sentences[0].tokens.iter().map(String::as_str).collect();
    let mut features = Vec::with_capacity(pc.sentences.len());
    for (i, sentence) in pc.sentences.iter().enumerate() {
        let unique: HashSet<&str> = sentence.tokens.iter().map(String::as_str).collect();
        let tf_sum: usize = unique.iter().map(|t| term_freq[t]).sum();
        let tf = tf_sum as f64 / unique.len() as f64;
        let sim_ts = cosine(emb.column(0), emb.column(i));
        let overlap = topic_set.intersection(&unique).count() as f64;
        let position = match sentence.doc_index {
            Some(doc) => {
                let n = pc.doc_sentence_counts[doc].max(1) as f64;
                1.0 - (sentence.position_in_doc.saturating_sub(1)) as f64 / n
            }
            None => 1.0,
        };
        features.push(SentenceFeatures {
            tf,
            sim_ts,
            overlap_topic: overlap / topic_set.len() as f64,
            overlap_self: overlap / unique.len() as f64,
            position,
        });
    }
    Ok(features)
}

/// score(S_i) = f(S_i) + mu1 tf + mu2 sim + mu3 overlap_topic
///            + mu4 overlap_self + mu5 position.
pub fn combined_score(f: &[f64], features: &[SentenceFeatures], w: &SfWeights) -> Result<Vec<f64>> {
    if f.len() != features.len() {
        return Err(Error::Contract(
            "scores and features must be aligned".into(),
        ));
    }
    Ok(f.iter()
        .zip(features)
        .map(|(&fi, ft)| {
            fi + w.mu[0] * ft.tf
                + w.mu[1] * ft.sim_ts
                + w.mu[2] * ft.overlap_topic
                + w.mu[3] * ft.overlap_self
                + w.mu[4] * ft.position
        })
        .collect())
}

/// A selected summary: sentence indices in cluster node space (the topic node
/// 0 never appears), the score each sentence carried when picked, and the
/// total word count.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub selected: Vec<usize>,
    pub scores: Vec<f64>,
    pub word_count: usize,
}

/// Words of raw text for budget accounting (whitespace tokens, unstemmed).
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Greedy diversity-penalized selection. `w` is the full (N+1)x(N+1) affinity
/// matrix including the topic node at index 0, which is excluded from
/// candidacy; similarities are row-normalized over the candidate block.
/// After each pick the remaining scores lose
/// `omega * S[i][picked] * score_of_pick`; selection stops as soon as the
/// best remaining sentence would push the summary past the word budget.
/// Ties break toward the lower index, and sentences with negative updated
/// scores stay eligible.
pub fn mmr_select(
    w: &Array2<f64>,
    scores: &[f64],
    word_counts: &[usize],
    sf: &SfWeights,
) -> Result<Summary> {
    let n = w.nrows();
    if scores.len() != n || word_counts.len() != n || w.ncols() != n {
        return Err(Error::Contract(
            "affinity, scores and word counts must be aligned".into(),
        ));
    }
    if n <= 1 {
        return Ok(Summary {
            selected: vec![],
            scores: vec![],
            word_count: 0,
        });
    }

    // Row-normalize the candidate block (nodes 1..n).
    let c = n - 1;
    let mut sim = Array2::zeros((c, c));
    for i in 0..c {
        let row_sum: f64 = (0..c).map(|j| w[[i + 1, j + 1]]).sum();
        if row_sum > 0.0 {
            for j in 0..c {
                sim[[i, j]] = w[[i + 1, j + 1]] / row_sum;
            }
        }
    }

    let mut current: Vec<f64> = (0..c).map(|i| scores[i + 1]).collect();
    let mut remaining: Vec<bool> = vec![true; c];
    let mut summary = Summary {
        selected: vec![],
        scores: vec![],
        word_count: 0,
    };

    loop {
        let mut best: Option<usize> = None;
        for i in 0..c {
            if !remaining[i] {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) if current[i] > current[b] => best = Some(i),
                _ => {}
            }
        }
        let Some(pick) = best else { break };
        let words = word_counts[pick + 1];
        if summary.word_count + words > sf.length_budget {
            break;
        }
        let pick_score = current[pick];
        remaining[pick] = false;
        summary.selected.push(pick + 1);
        summary.scores.push(pick_score);
        summary.word_count += words;
        for i in 0..c {
            if remaining[i] {
                current[i] -= sf.omega * sim[[i, pick]] * pick_score;
            }
        }
    }

    Ok(summary)
}
