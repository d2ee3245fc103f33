//! Score candidate summaries against reference summaries with ROUGE-N.
//!
//! ```bash
//! cargo run --example rouge_eval
//! ```

use std::fs;
use std::path::Path;

use manisum::eval::{rouge_n, rouge_tokens};

fn main() -> manisum::Result<()> {
    let cluster = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/mini_corpus/c03_rail");

    // Two candidates: the opening sentences of one document, and an
    // off-topic sentence for contrast.
    let lead = "The coastal high-speed rail line between Avenport and Karsen opened to the \
                public on Saturday after nine years of construction. The first train completed \
                the 310 kilometer run in 94 minutes, less than half the old journey time.";
    let off_topic = "The festival of lanterns drew large crowds to the old harbor quarter.";

    let mut references = Vec::new();
    let refs_dir = cluster.join("refs");
    let mut files: Vec<_> = fs::read_dir(&refs_dir)
        .map_err(|e| manisum::Error::io(&refs_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    files.sort();
    for file in files {
        let text = fs::read_to_string(&file).map_err(|e| manisum::Error::io(&file, e))?;
        references.push(rouge_tokens(&text, true, None));
    }
    println!("{} reference summaries loaded\n", references.len());

    for (name, candidate) in [("lead sentences", lead), ("off-topic", off_topic)] {
        let tokens = rouge_tokens(candidate, true, None);
        print!("{name:>15}:");
        for n in 1..=4 {
            let score = rouge_n(&references, &tokens, n)?;
            print!("  rouge-{n} {score:.4}");
        }
        println!();
    }
    Ok(())
}
