//! End-to-end summarization of one bundled cluster: preprocess, run the
//! lifelong joint solver, add surface features, and select sentences under a
//! word budget.
//!
//! ```bash
//! cargo run --example summarize_cluster
//! ```

use std::path::Path;

use manisum::corpus::{default_stopwords, load_cluster, process_cluster};
use manisum::lifelong::{KnowledgeBase, LtmHyper};
use manisum::ranking::{jltmmr, MixWeights, OuterOptions};
use manisum::summarizer::{
    combined_score, mmr_select, statistical_features, word_count, SfWeights, SimSource,
};

fn main() -> manisum::Result<()> {
    let cluster_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_corpus/c01_volcano");
    let raw = load_cluster(&cluster_dir)?;
    println!(
        "cluster {}: {} documents",
        raw.topic_id,
        raw.documents.len()
    );
    println!("topic statement: {}\n", raw.topic_statement);

    let pc = process_cluster(&raw, &default_stopwords())?;
    println!(
        "{} candidate sentences, vocabulary of {} stems",
        pc.sentences.len() - 1,
        pc.wordmap.len()
    );

    let hyper = LtmHyper {
        nmf: manisum::NmfHyper {
            k_topics: 6,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut kb = KnowledgeBase::new();
    let result = jltmmr(
        &pc,
        &mut kb,
        &hyper,
        &MixWeights::default(),
        &OuterOptions::default(),
        42,
    )?;
    println!(
        "solver ran {} outer iteration(s); final score change {:.2e}\n",
        result.trace.len(),
        result.trace.last().map(|d| d.f_change).unwrap_or(0.0)
    );

    let features = statistical_features(&pc, Some(&result.factors.v), SimSource::Tfidf)?;
    let weights = SfWeights {
        length_budget: 100,
        ..SfWeights::default()
    };
    let scores = combined_score(&result.f.to_vec(), &features, &weights)?;
    let word_counts: Vec<usize> = pc
        .sentences
        .iter()
        .map(|s| word_count(&s.raw_text))
        .collect();
    let summary = mmr_select(&result.graph.w, &scores, &word_counts, &weights)?;

    println!("summary ({} words):", summary.word_count);
    for (&idx, score) in summary.selected.iter().zip(&summary.scores) {
        println!("  [{score:.3}] {}", pc.sentences[idx].raw_text);
    }
    Ok(())
}
