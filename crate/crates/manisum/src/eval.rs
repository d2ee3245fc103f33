//! Self-contained evaluation: clipped-count ROUGE-N against reference
//! summaries, and the document co-occurrence coherence of fitted topics.

use std::collections::{HashMap, HashSet};

use ndarray::Array2;

use crate::corpus::porter;
use crate::error::{Error, Result};
use crate::topics::top_words;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts: HashMap<&[String], u64> = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Recall-oriented n-gram overlap with clipped counting: per reference gram,
/// the match is min(candidate count, reference count); numerators and
/// denominators are summed across references. References shorter than n
/// contribute nothing; if every reference is too short the score is
/// undefined and an error is returned.
pub fn rouge_n(references: &[Vec<String>], candidate: &[String], n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Contract("rouge order n must be >= 1".into()));
    }
    let cand = ngram_counts(candidate, n);
    let mut matched = 0u64;
    let mut total = 0u64;
    for reference in references {
        for (gram, &count) in ngram_counts(reference, n).iter() {
            matched += count.min(cand.get(gram).copied().unwrap_or(0));
            total += count;
        }
    }
    if total == 0 {
        return Err(Error::Contract(format!(
            "no reference carries an n-gram of order {n}; rouge-{n} is undefined"
        )));
    }
    Ok(matched as f64 / total as f64)
}

/// Tokenize raw summary text for ROUGE: lowercase, split on non-alphanumeric,
/// optionally drop stopwords, optionally Porter-stem.
pub fn rouge_tokens(
    text: &str,
    stemming: bool,
    stopwords: Option<&HashSet<String>>,
) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| stopwords.is_none_or(|sw| !sw.contains(*t)))
        .map(|t| {
            if stemming {
                porter::stem(t)
            } else {
                t.to_string()
            }
        })
        .collect()
}

/// Per-topic coherence over the top `top_m` words:
/// sum over ordered pairs (l < m) of ln((co(v_m, v_l) + 1) / df(v_l)), where
/// co counts columns of A in which both words have nonzero weight and df
/// counts columns where v_l appears. Pairs whose conditioning word never
/// occurs are skipped with a warning.
pub fn coherence(u: &Array2<f64>, a: &Array2<f64>, top_m: usize) -> Result<Vec<f64>> {
    if u.nrows() != a.nrows() {
        return Err(Error::Contract(
            "U and A must share the vocabulary dimension".into(),
        ));
    }
    let cols = a.ncols();
    let present = |w: usize, d: usize| a[[w, d]] != 0.0;
    let df = |w: usize| (0..cols).filter(|&d| present(w, d)).count();
    let co = |x: usize, y: usize| {
        (0..cols)
            .filter(|&d| present(x, d) && present(y, d))
            .count()
    };

    let mut values = Vec::with_capacity(u.ncols());
    for tops in top_words(u, top_m) {
        let mut total = 0.0;
        for m in 1..tops.len() {
            for l in 0..m {
                let denom = df(tops[l]);
                if denom == 0 {
                    log::warn!(
                        "coherence: word index {} never occurs; skipping its pairs",
                        tops[l]
                    );
                    continue;
                }
                total += ((co(tops[m], tops[l]) + 1) as f64 / denom as f64).ln();
            }
        }
        values.push(total);
    }
    Ok(values)
}
