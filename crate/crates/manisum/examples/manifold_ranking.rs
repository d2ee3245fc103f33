//! Manifold ranking on its own: propagate saliency out of the topic node of
//! a bundled cluster over original features only, then compare against the
//! joint solve that also uses topic-space similarity.
//!
//! ```bash
//! cargo run --example manifold_ranking
//! ```

use std::path::Path;

use manisum::corpus::{default_stopwords, load_cluster, process_cluster};
use manisum::ranking::{jtmmr, single_mr, MixWeights, RankOptions};
use manisum::topics::NmfHyper;

fn top_sentences(f: &ndarray::Array1<f64>, count: usize) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, f64)> = (1..f.len()).map(|i| (i, f[i])).collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    ranked.truncate(count);
    ranked
}

fn main() -> manisum::Result<()> {
    let cluster_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_corpus/c05_flood");
    let raw = load_cluster(&cluster_dir)?;
    let pc = process_cluster(&raw, &default_stopwords())?;
    let rank = RankOptions::default();

    // Original features only (TFIDF cosine + unigram overlap).
    let original = MixWeights {
        alpha_v: 0.0,
        alpha_a: 0.6,
        alpha_overlap: 0.4,
        alpha_mr: 0.85,
    };
    let plain = single_mr(&pc, &original, &rank)?;
    println!("ranking on original features:");
    for (i, score) in top_sentences(&plain.f, 3) {
        println!("  [{score:.4}] {}", pc.sentences[i].raw_text);
    }

    // Joint: the fitted topic space contributes a third of the affinity.
    let joint_weights = MixWeights::default();
    let hyper = NmfHyper {
        k_topics: 5,
        ..NmfHyper::default()
    };
    let joint = jtmmr(&pc, &hyper, &joint_weights, &rank, 42)?;
    println!("\njoint ranking with topic-space similarity:");
    for (i, score) in top_sentences(&joint.f, 3) {
        println!("  [{score:.4}] {}", pc.sentences[i].raw_text);
    }
    Ok(())
}
