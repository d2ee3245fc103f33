//! Extractive multi-document summarization built on non-negative matrix
//! factorization topic models joined with manifold ranking.
//!
//! A topic cluster (documents plus an optional topic statement) is split into
//! sentences, stemmed, and vectorized into a TFIDF term-by-sentence matrix.
//! A constrained NMF factorizes the matrix into word-topic and topic-sentence
//! weights; sentence affinities blend topic-space cosine, TFIDF cosine and
//! unigram overlap; and manifold ranking propagates saliency out of the topic
//! node. The lifelong variant accumulates top-word co-occurrence knowledge
//! across tasks and feeds it back into later factorizations, optionally
//! weighting columns by the current saliency scores. Summaries are picked
//! greedily under a word budget with a diversity penalty, and the built-in
//! harness scores them with ROUGE-N and topic coherence.
//!
//! Start with the runnable examples:
//!
//! ```text
//! cargo run --example preprocess_corpus
//! cargo run --example summarize_cluster
//! cargo run --example topic_model
//! cargo run --example manifold_ranking
//! cargo run --example lifelong_knowledge
//! cargo run --example rouge_eval
//! ```
//!
//! or the `manisum` binary (`summarize`, `evaluate`, `inspect-topics`,
//! `kb stats`).

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod lifelong;
pub mod math;
pub mod pipeline;
pub mod ranking;
pub mod summarizer;
pub mod topics;

pub use config::{Model, RunConfig};
pub use corpus::{ProcessedCluster, RawCluster, Sentence, TermDocMatrix, Wordmap};
pub use error::{Error, Result};
pub use lifelong::{DocRelation, KnowledgeBase, KnowledgeMatrices, LtmHyper};
pub use ranking::{MixWeights, RankOptions, WeightedGraph};
pub use summarizer::{SfWeights, Summary};
pub use topics::{FactorPair, NmfHyper};
