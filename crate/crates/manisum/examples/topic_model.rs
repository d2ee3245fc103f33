//! Fit the constrained topic model on a bundled cluster and inspect the
//! topics it finds: top stems, coherence, and the objective value.
//!
//! ```bash
//! cargo run --example topic_model
//! ```

use std::path::Path;

use manisum::corpus::{default_stopwords, load_cluster, process_cluster};
use manisum::eval::coherence;
use manisum::topics::{fit_nmf, nmf_objective, top_words, NmfHyper};

fn main() -> manisum::Result<()> {
    let cluster_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_corpus/c02_bees");
    let raw = load_cluster(&cluster_dir)?;
    let pc = process_cluster(&raw, &default_stopwords())?;

    let hyper = NmfHyper {
        k_topics: 4,
        beta: 0.1,
        lambda: 0.1,
        ..NmfHyper::default()
    };
    let factors = fit_nmf(&pc.matrix.a, &hyper, 7)?;
    let objective = nmf_objective(&pc.matrix.a, &factors, &hyper)?;
    println!(
        "fit {} stems x {} sentences into {} topics (objective {objective:.2})\n",
        pc.matrix.a.nrows(),
        pc.matrix.a.ncols(),
        hyper.k_topics
    );

    let values = coherence(&factors.u, &pc.matrix.a, 10)?;
    for (t, (top, value)) in top_words(&factors.u, 10).iter().zip(&values).enumerate() {
        let words: Vec<&str> = top.iter().map(|&w| pc.wordmap.word(w)).collect();
        println!("topic {t} (coherence {value:8.3}): {}", words.join(" "));
    }
    Ok(())
}
