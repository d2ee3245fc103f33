//! Corpus preprocessing walkthrough: sentence splitting, dialog filtering,
//! stemming, the TFIDF matrix, and corpus-level statistics.
//!
//! ```bash
//! cargo run --example preprocess_corpus
//! ```

use std::path::Path;

use manisum::corpus::{
    corpus_stats, default_stopwords, load_cluster, preprocess, process_cluster, split_sentences,
};
use manisum::pipeline::discover_clusters;

fn main() -> manisum::Result<()> {
    let text = "Dr. Ellis reached the rim at dawn. \"Stay well back from the edge,\" she warned. \
                The crater floor glowed faintly. Instruments recorded tremors all morning.";
    println!("splitting:");
    for sentence in split_sentences(text) {
        println!("  | {sentence}");
    }

    let stopwords = default_stopwords();
    println!("\ntokenizing \"The running dogs chased the caresses of the wind\":");
    println!(
        "  -> {:?}",
        preprocess(
            "The running dogs chased the caresses of the wind",
            &stopwords
        )
    );

    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_corpus");
    let mut processed = Vec::new();
    println!();
    for dir in discover_clusters(&corpus)? {
        let raw = load_cluster(&dir)?;
        let pc = process_cluster(&raw, &stopwords)?;
        println!(
            "cluster {:12} {} docs, {} retained sentences, matrix {} x {}",
            pc.id,
            raw.documents.len(),
            pc.sentences.len() - 1,
            pc.matrix.a.nrows(),
            pc.matrix.a.ncols()
        );
        processed.push(pc);
    }

    let stats = corpus_stats(&processed);
    println!(
        "\ncorpus: {} clusters, {:.2} sentences/topic, {:.2} tokens/sentence, {} distinct stems",
        stats.clusters,
        stats.avg_sentences_per_topic,
        stats.avg_tokens_per_sentence,
        stats.wordmap_size
    );
    Ok(())
}
