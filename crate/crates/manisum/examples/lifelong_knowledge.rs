//! Lifelong learning across a task sequence: the knowledge base accumulates
//! top-word co-occurrences from every cluster and each later task sees the
//! knowledge projected onto its own vocabulary.
//!
//! ```bash
//! cargo run --example lifelong_knowledge
//! ```

use std::path::Path;

use manisum::corpus::{default_stopwords, load_cluster, process_cluster};
use manisum::lifelong::{project_knowledge, KnowledgeBase, LtmHyper};
use manisum::pipeline::discover_clusters;
use manisum::ranking::{jltmmr, MixWeights, OuterOptions};

fn main() -> manisum::Result<()> {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_corpus");
    let stopwords = default_stopwords();
    let mut kb = KnowledgeBase::new();
    let hyper = LtmHyper {
        nmf: manisum::NmfHyper {
            k_topics: 4,
            ..Default::default()
        },
        ..Default::default()
    };

    for dir in discover_clusters(&corpus)? {
        let raw = load_cluster(&dir)?;
        let pc = process_cluster(&raw, &stopwords)?;
        let before = kb.pair_len();
        let result = jltmmr(
            &pc,
            &mut kb,
            &hyper,
            &MixWeights::default(),
            &OuterOptions::default(),
            42,
        )?;
        let km = project_knowledge(&kb, &pc.wordmap);
        let active = km.o.iter().filter(|&&v| v > 0.0).count();
        println!(
            "task {:12} outer iters {:2}  kb pairs {:4} -> {:4}  projected links {:4}",
            pc.id,
            result.trace.len(),
            before,
            kb.pair_len(),
            active / 2
        );
    }

    println!(
        "\nknowledge base after all tasks: {} tasks, {} word pairs, {} words",
        kb.task_count(),
        kb.pair_len(),
        kb.word_len()
    );
    let mut pairs: Vec<_> = kb.iter_pairs().collect();
    pairs.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    println!("heaviest co-occurrences:");
    for ((a, b), count) in pairs.into_iter().take(8) {
        println!("  {a} + {b}: {count}");
    }
    Ok(())
}
