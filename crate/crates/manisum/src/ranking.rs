//! Manifold-ranking graph construction and score propagation, plus the two
//! joint solvers: topic-model + ranking in one pass, and the lifelong variant
//! that alternates a rank-weighted topic fit with propagation while feeding a
//! cross-task knowledge base.

use ndarray::{Array1, Array2};

use crate::corpus::{ProcessedCluster, Sentence};
use crate::error::{Error, Result};
use crate::lifelong::{
    doc_relation_from_f, project_knowledge, DocRelation, KnowledgeBase, KnowledgeMatrices, LtmHyper,
};
use crate::math::{column_cosines, inf_norm_diff, min_max_unit, scale_columns, scale_rows};
use crate::topics::{self, fit_loop, init_factors, FactorPair, NmfHyper};

/// Mixing weights of the affinity graph plus the propagation damping factor.
#[derive(Debug, Clone, PartialEq)]
pub struct MixWeights {
    /// Weight of topic-space cosine similarity.
    pub alpha_v: f64,
    /// Weight of TFIDF-space cosine similarity.
    pub alpha_a: f64,
    /// Weight of the unigram-overlap matrix.
    pub alpha_overlap: f64,
    /// Propagation damping in (0, 1).
    pub alpha_mr: f64,
}

impl Default for MixWeights {
    fn default() -> Self {
        MixWeights {
            alpha_v: 0.3,
            alpha_a: 0.4,
            alpha_overlap: 0.3,
            alpha_mr: 0.85,
        }
    }
}

impl MixWeights {
    pub fn validate(&self) -> Result<()> {
        if self.alpha_v < 0.0 || self.alpha_a < 0.0 || self.alpha_overlap < 0.0 {
            return Err(Error::Contract("mixing weights must be >= 0".into()));
        }
        let sum = self.alpha_v + self.alpha_a + self.alpha_overlap;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Contract(format!(
                "mixing weights must sum to 1, got {sum}"
            )));
        }
        if !(self.alpha_mr > 0.0 && self.alpha_mr < 1.0) {
            return Err(Error::Contract(format!(
                "alpha_mr must lie in (0, 1), got {}",
                self.alpha_mr
            )));
        }
        Ok(())
    }
}

/// The sentence affinity graph: overlap matrix SS, combined weights W with a
/// zeroed diagonal, degree vector D = W.1 and the symmetric normalization
/// D^{-1/2} W D^{-1/2}.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    pub ss: Array2<f64>,
    pub w: Array2<f64>,
    pub degrees: Array1<f64>,
    pub s_norm: Array2<f64>,
}

/// Degree floor for isolated nodes, keeping D invertible.
const DEGREE_FLOOR: f64 = 1e-12;

/// Unigram overlap: `SS[i][j] = |unique(S_i) ∩ unique(S_j)| / |unique(S_i)|`.
/// Asymmetric in general; the diagonal is all ones.
pub fn overlap_matrix(sentences: &[Sentence]) -> Array2<f64> {
    let sets: Vec<std::collections::HashSet<&str>> = sentences
        .iter()
        .map(|s| s.tokens.iter().map(String::as_str).collect())
        .collect();
    let n = sentences.len();
    let mut ss = Array2::zeros((n, n));
    for i in 0..n {
        debug_assert!(!sets[i].is_empty(), "sentence {i} has no tokens");
        for j in 0..n {
            let overlap = sets[i].intersection(&sets[j]).count();
            ss[[i, j]] = overlap as f64 / sets[i].len() as f64;
        }
    }
    ss
}

/// Convex combination of topic cosine, TFIDF cosine and unigram overlap,
/// with the diagonal zeroed before degrees are computed.
pub fn build_w(
    v: &Array2<f64>,
    a: &Array2<f64>,
    ss: &Array2<f64>,
    mw: &MixWeights,
) -> Result<WeightedGraph> {
    mw.validate()?;
    let n = a.ncols();
    if v.ncols() != n || ss.nrows() != n || ss.ncols() != n {
        return Err(Error::Contract(
            "V, A and SS column counts must agree".into(),
        ));
    }
    let cos_v = column_cosines(v);
    let cos_a = column_cosines(a);
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            w[[i, j]] = mw.alpha_v * cos_v[[i, j]]
                + mw.alpha_a * cos_a[[i, j]]
                + mw.alpha_overlap * ss[[i, j]];
        }
        w[[i, i]] = 0.0;
    }
    let degrees = w.sum_axis(ndarray::Axis(1)).mapv(|d| d.max(DEGREE_FLOOR));
    let inv_sqrt = degrees.mapv(|d| 1.0 / d.sqrt());
    let mut s_norm = w.clone();
    for i in 0..n {
        for j in 0..n {
            s_norm[[i, j]] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    Ok(WeightedGraph {
        ss: ss.clone(),
        w,
        degrees,
        s_norm,
    })
}

/// The indicator vector y: 1 at the topic-sentence node (index 0), else 0.
pub fn indicator(n: usize) -> Array1<f64> {
    let mut y = Array1::zeros(n);
    y[0] = 1.0;
    y
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions {
            tol: 1e-12,
            max_iters: 10_000,
        }
    }
}

/// Propagate scores to the fixed point of f <- alpha S f + (1 - alpha) y,
/// starting from f = 0.
pub fn manifold_rank(
    g: &WeightedGraph,
    y: &Array1<f64>,
    alpha_mr: f64,
    opts: &RankOptions,
) -> Result<Array1<f64>> {
    let n = g.s_norm.nrows();
    if y.len() != n {
        return Err(Error::Contract("y length must match the graph".into()));
    }
    if !(0.0..1.0).contains(&alpha_mr) {
        return Err(Error::Contract(format!(
            "alpha_mr must lie in [0, 1), got {alpha_mr}"
        )));
    }
    let mut f = Array1::zeros(n);
    for _ in 0..opts.max_iters {
        let next = alpha_mr * g.s_norm.dot(&f) + (1.0 - alpha_mr) * y;
        let change = inf_norm_diff(&next, &f);
        f = next;
        if change < opts.tol {
            return Ok(f);
        }
    }
    Err(Error::Numerical(format!(
        "manifold ranking did not converge within {} iterations",
        opts.max_iters
    )))
}

// ---------------------------------------------------------------------------
// Joint topic model + manifold ranking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct JtmmrResult {
    pub factors: FactorPair,
    pub f: Array1<f64>,
    pub graph: WeightedGraph,
}

/// One-pass joint solve: fit the topic model, build the affinity graph from
/// the fitted topic space plus the original features, then propagate.
pub fn jtmmr(
    pc: &ProcessedCluster,
    h: &NmfHyper,
    mw: &MixWeights,
    rank: &RankOptions,
    seed: u64,
) -> Result<JtmmrResult> {
    mw.validate()?;
    let a = &pc.matrix.a;
    let factors = topics::fit_nmf(a, h, seed)?;
    let ss = overlap_matrix(&pc.sentences);
    let graph = build_w(&factors.v, a, &ss, mw)?;
    let y = indicator(pc.sentences.len());
    let f = manifold_rank(&graph, &y, mw.alpha_mr, rank)?;
    Ok(JtmmrResult { factors, f, graph })
}

#[derive(Debug, Clone)]
pub struct SingleMrResult {
    pub f: Array1<f64>,
    pub graph: WeightedGraph,
}

/// Manifold ranking over original features only (no topic space). Requires
/// alpha_v = 0 so the remaining weights still form a convex combination.
pub fn single_mr(
    pc: &ProcessedCluster,
    mw: &MixWeights,
    rank: &RankOptions,
) -> Result<SingleMrResult> {
    if mw.alpha_v != 0.0 {
        return Err(Error::Contract(
            "single_mr requires alpha_v = 0 (topic features disabled)".into(),
        ));
    }
    let a = &pc.matrix.a;
    let n = pc.sentences.len();
    let ss = overlap_matrix(&pc.sentences);
    let zero_v = Array2::zeros((1, n));
    let graph = build_w(&zero_v, a, &ss, mw)?;
    let y = indicator(n);
    let f = manifold_rank(&graph, &y, mw.alpha_mr, rank)?;
    Ok(SingleMrResult { f, graph })
}

// ---------------------------------------------------------------------------
// Rank-weighted updates and the lifelong joint solver
// ---------------------------------------------------------------------------

/// Per-column weights r_j = e^{f_j} (f min-max mapped onto [0, 1]), realized
/// as column scaling by sqrt(r) on A and V inside the updates.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnWeights {
    pub r: Array1<f64>,
    pub r_sqrt: Array1<f64>,
}

impl ColumnWeights {
    pub fn from_scores(f: &Array1<f64>) -> ColumnWeights {
        let r = min_max_unit(f).mapv(f64::exp);
        let r_sqrt = r.mapv(f64::sqrt);
        ColumnWeights { r, r_sqrt }
    }

    /// All-ones weights; makes every weighted expression collapse to its
    /// unweighted counterpart exactly.
    pub fn uniform(n: usize) -> ColumnWeights {
        ColumnWeights {
            r: Array1::ones(n),
            r_sqrt: Array1::ones(n),
        }
    }
}

/// U <- U .* ((A R')(V R')^T + alpha O U + 2 beta U)
///        ./ (U (V R')(V R')^T + alpha P U + 2 beta U U^T U).
pub fn update_u_weighted(
    a: &Array2<f64>,
    fp: &FactorPair,
    km: &KnowledgeMatrices,
    cw: &ColumnWeights,
    h: &LtmHyper,
) -> Result<Array2<f64>> {
    let ar = scale_columns(a, &cw.r_sqrt);
    let vr = scale_columns(&fp.v, &cw.r_sqrt);
    let numer = ar.dot(&vr.t()) + &(h.alpha_ltm * km.o.dot(&fp.u)) + &(2.0 * h.nmf.beta * &fp.u);
    let gram = fp.u.t().dot(&fp.u);
    let denom = fp.u.dot(&vr.dot(&vr.t()))
        + &(h.alpha_ltm * scale_rows(&fp.u, &km.p))
        + &(2.0 * h.nmf.beta * fp.u.dot(&gram));
    topics::multiplicative_step(&fp.u, &numer, &denom)
}

/// V <- V .* ((U^T (A R')) R') ./ ((U^T U (V R')) R' + lambda/2).
pub fn update_v_weighted(
    a: &Array2<f64>,
    fp: &FactorPair,
    cw: &ColumnWeights,
    h: &LtmHyper,
) -> Result<Array2<f64>> {
    let ar = scale_columns(a, &cw.r_sqrt);
    let vr = scale_columns(&fp.v, &cw.r_sqrt);
    let numer = scale_columns(&fp.u.t().dot(&ar), &cw.r_sqrt);
    let denom = scale_columns(&fp.u.t().dot(&fp.u).dot(&vr), &cw.r_sqrt) + h.nmf.lambda / 2.0;
    topics::multiplicative_step(&fp.v, &numer, &denom)
}

/// One alternation: new U from the current pair, then new V from the new U.
pub fn weighted_updates(
    a: &Array2<f64>,
    fp: &FactorPair,
    km: &KnowledgeMatrices,
    cw: &ColumnWeights,
    h: &LtmHyper,
) -> Result<(Array2<f64>, Array2<f64>)> {
    let u = update_u_weighted(a, fp, km, cw, h)?;
    let staged = FactorPair { u, v: fp.v.clone() };
    let v = update_v_weighted(a, &staged, cw, h)?;
    Ok((staged.u, v))
}

/// Column-weighted residual plus the usual constraint terms:
/// ||(A - UV) R'||_F^2 + beta ||U^T U - I||_F^2 + lambda sum(V)
/// + alpha tr(U^T L U) + gamma tr(V Z V^T).
pub fn weighted_objective(
    a: &Array2<f64>,
    fp: &FactorPair,
    km: &KnowledgeMatrices,
    dr: &DocRelation,
    cw: &ColumnWeights,
    h: &LtmHyper,
) -> f64 {
    let ar = scale_columns(a, &cw.r_sqrt);
    let vr = scale_columns(&fp.v, &cw.r_sqrt);
    let residual = &ar - &fp.u.dot(&vr);
    let gram = fp.u.t().dot(&fp.u);
    let eye = Array2::<f64>::eye(fp.u.ncols());
    let base = crate::math::frob_sq(&residual)
        + h.nmf.beta * crate::math::frob_sq(&(&gram - &eye))
        + h.nmf.lambda * fp.v.sum();
    let knowledge = (&fp.u * &km.l.dot(&fp.u)).sum();
    let relation = (&fp.v.dot(&dr.z) * &fp.v).sum();
    base + h.alpha_ltm * knowledge + h.gamma * relation
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterOptions {
    /// Stop when the infinity norm of the score change drops below this.
    pub f_tol: f64,
    pub max_outer: usize,
    /// When false, the rank weights are pinned at 1 (R disabled).
    pub rank_weighting: bool,
    pub rank: RankOptions,
}

impl Default for OuterOptions {
    fn default() -> Self {
        OuterOptions {
            f_tol: 1e-4,
            max_outer: 10,
            rank_weighting: true,
            rank: RankOptions::default(),
        }
    }
}

/// Per-outer-iteration diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterDiag {
    pub iteration: usize,
    pub objective: f64,
    pub f_change: f64,
    pub kb_pairs: u64,
    pub kb_increments: u64,
    /// The score vector after this iteration's propagation.
    pub f: Array1<f64>,
}

#[derive(Debug, Clone)]
pub struct JltmmrResult {
    pub factors: FactorPair,
    pub f: Array1<f64>,
    pub graph: WeightedGraph,
    pub trace: Vec<OuterDiag>,
}

/// The lifelong joint solver. Each outer iteration projects the knowledge
/// base onto the task vocabulary, derives the sentence relation Q and the
/// rank weights R from the current scores (the indicator vector on the first
/// pass), adjusts the topic model (warm-started from the previous iteration's
/// factors; the first iteration starts from the seeded random init), records
/// the new top words into the knowledge base, and re-propagates. Stops when
/// the score vector moves less than `f_tol` in the infinity norm.
pub fn jltmmr(
    pc: &ProcessedCluster,
    kb: &mut KnowledgeBase,
    h: &LtmHyper,
    mw: &MixWeights,
    outer: &OuterOptions,
    seed: u64,
) -> Result<JltmmrResult> {
    mw.validate()?;
    h.validate()?;
    let a = &pc.matrix.a;
    let (m, n) = a.dim();
    let ss = overlap_matrix(&pc.sentences);
    let y = indicator(n);
    let mut f_prev = y.clone();
    let mut trace = Vec::new();
    let mut factors = init_factors(m, n, h.nmf.k_topics, seed);
    let mut state: Option<(Array1<f64>, WeightedGraph)> = None;

    for iteration in 1..=outer.max_outer {
        let km = project_knowledge(kb, &pc.wordmap);
        let dr = doc_relation_from_f(&f_prev);
        let cw = if outer.rank_weighting {
            ColumnWeights::from_scores(&f_prev)
        } else {
            ColumnWeights::uniform(n)
        };
        factors = fit_loop(
            factors,
            |fp| update_u_weighted(a, fp, &km, &cw, h),
            |fp| update_v_weighted(a, fp, &cw, h),
            |fp| weighted_objective(a, fp, &km, &dr, &cw, h),
            h.nmf.rel_tol,
            h.nmf.max_iters,
        )?;
        kb.record(&factors.u, &pc.wordmap, h.top_words);
        let graph = build_w(&factors.v, a, &ss, mw)?;
        let f = manifold_rank(&graph, &y, mw.alpha_mr, &outer.rank)?;
        let f_change = inf_norm_diff(&f, &f_prev);
        trace.push(OuterDiag {
            iteration,
            objective: weighted_objective(a, &factors, &km, &dr, &cw, h),
            f_change,
            kb_pairs: kb.pair_len() as u64,
            kb_increments: kb.total_increments(),
            f: f.clone(),
        });
        f_prev = f.clone();
        state = Some((f, graph));
        if f_change < outer.f_tol {
            break;
        }
    }

    let (f, graph) = state.expect("max_outer >= 1 guarantees one iteration");
    Ok(JltmmrResult {
        factors,
        f,
        graph,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_matrix, Sentence};
    use crate::lifelong::{update_u_ltm, update_v_ltm};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sent(tokens: &[&str], topic: bool) -> Sentence {
        Sentence {
            raw_text: tokens.join(" "),
            tokens: tokens.iter().map(|t| t.to_string()).collect(),
            doc_index: if topic { None } else { Some(0) },
            position_in_doc: if topic { 0 } else { 1 },
            is_topic_sentence: topic,
        }
    }

    fn cluster(token_lists: &[&[&str]]) -> ProcessedCluster {
        let mut sentences: Vec<Sentence> = Vec::new();
        for (i, tokens) in token_lists.iter().enumerate() {
            sentences.push(sent(tokens, i == 0));
        }
        let count = sentences.len();
        let (wordmap, matrix, sentences) = build_matrix(sentences).unwrap();
        assert_eq!(sentences.len(), count, "no column should drop in fixtures");
        ProcessedCluster {
            id: "test".into(),
            sentences,
            wordmap,
            matrix,
            doc_sentence_counts: vec![count - 1],
        }
    }

    #[test]
    fn overlap_matrix_hand_counts() {
        let sentences = vec![sent(&["a", "b", "c"], false), sent(&["b", "c", "d"], false)];
        let ss = overlap_matrix(&sentences);
        assert_abs_diff_eq!(ss[[0, 1]], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(ss[[1, 0]], 2.0 / 3.0, epsilon = 1e-12);
        assert_eq!(ss[[0, 0]], 1.0);
    }

    #[test]
    fn overlap_matrix_disjoint_and_subset() {
        let sentences = vec![
            sent(&["a", "b"], false),
            sent(&["c", "d"], false),
            sent(&["a", "b", "e", "f"], false),
        ];
        let ss = overlap_matrix(&sentences);
        assert_eq!(ss[[0, 1]], 0.0);
        assert_eq!(ss[[0, 2]], 1.0);
        assert_eq!(ss[[2, 0]], 0.5);
    }

    #[test]
    fn build_w_with_identical_topic_columns() {
        let v = array![[1.0, 1.0], [0.5, 0.5]];
        let a = array![[1.0, 0.0], [0.0, 1.0]];
        let ss = Array2::<f64>::eye(2);
        let mw = MixWeights {
            alpha_v: 1.0,
            alpha_a: 0.0,
            alpha_overlap: 0.0,
            alpha_mr: 0.85,
        };
        let g = build_w(&v, &a, &ss, &mw).unwrap();
        assert_abs_diff_eq!(g.w[[0, 1]], 1.0, epsilon = 1e-12);
        assert_eq!(g.w[[0, 0]], 0.0);
    }

    #[test]
    fn build_w_overlap_only_reduces_to_ss() {
        let sentences = vec![sent(&["a", "b", "c"], false), sent(&["b", "c", "d"], false)];
        let ss = overlap_matrix(&sentences);
        let v = array![[1.0, 2.0]];
        let a = array![[1.0, 2.0], [3.0, 1.0]];
        let mw = MixWeights {
            alpha_v: 0.0,
            alpha_a: 0.0,
            alpha_overlap: 1.0,
            alpha_mr: 0.85,
        };
        let g = build_w(&v, &a, &ss, &mw).unwrap();
        assert_eq!(g.w[[0, 1]], ss[[0, 1]]);
        assert_eq!(g.w[[0, 0]], 0.0);
    }

    #[test]
    fn build_w_convex_combination_hand_check() {
        let v = array![[1.0, 0.0], [0.0, 1.0]];
        let a = array![[1.0, 1.0], [0.0, 0.0]];
        let ss = array![[1.0, 0.5], [0.25, 1.0]];
        let third = 1.0 / 3.0;
        let mw = MixWeights {
            alpha_v: third,
            alpha_a: third,
            alpha_overlap: third,
            alpha_mr: 0.85,
        };
        let g = build_w(&v, &a, &ss, &mw).unwrap();
        // cos(V)=0, cos(A)=1, SS=0.5 off-diagonal (i=0, j=1).
        assert_abs_diff_eq!(
            g.w[[0, 1]],
            third * 0.0 + third * 1.0 + third * 0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn build_w_rejects_bad_weights() {
        let v = array![[1.0, 0.0]];
        let a = array![[1.0, 0.0]];
        let ss = Array2::<f64>::eye(2);
        let mw = MixWeights {
            alpha_v: 0.5,
            alpha_a: 0.2,
            alpha_overlap: 0.1,
            alpha_mr: 0.85,
        };
        assert!(build_w(&v, &a, &ss, &mw).is_err());
    }

    #[test]
    fn build_w_symmetric_without_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let v = Array2::from_shape_fn((3, 5), |_| rng.gen_range(0.1..1.0));
        let a = Array2::from_shape_fn((7, 5), |_| rng.gen_range(0.0..1.0));
        let ss = Array2::from_shape_fn((5, 5), |_| rng.gen_range(0.0..1.0));
        let mw = MixWeights {
            alpha_v: 0.6,
            alpha_a: 0.4,
            alpha_overlap: 0.0,
            alpha_mr: 0.85,
        };
        let g = build_w(&v, &a, &ss, &mw).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                assert_abs_diff_eq!(g.w[[i, j]], g.w[[j, i]], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn build_w_asymmetry_bounded_by_overlap_share() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let v = Array2::from_shape_fn((3, 6), |_| rng.gen_range(0.1..1.0));
            let a = Array2::from_shape_fn((8, 6), |_| rng.gen_range(0.0..1.0));
            let ss = Array2::from_shape_fn((6, 6), |_| rng.gen_range(0.0..1.0));
            let mw = MixWeights {
                alpha_v: 0.3,
                alpha_a: 0.3,
                alpha_overlap: 0.4,
                alpha_mr: 0.85,
            };
            let g = build_w(&v, &a, &ss, &mw).unwrap();
            let max_ss_gap = (0..6)
                .flat_map(|i| (0..6).map(move |j| (i, j)))
                .map(|(i, j)| (ss[[i, j]] - ss[[j, i]]).abs())
                .fold(0.0, f64::max);
            for i in 0..6 {
                for j in 0..6 {
                    let gap = (g.w[[i, j]] - g.w[[j, i]]).abs();
                    assert!(
                        gap <= mw.alpha_overlap * max_ss_gap + 1e-12,
                        "asymmetry {gap} exceeds bound"
                    );
                }
            }
        }
    }

    #[test]
    fn manifold_rank_two_node_oracle() {
        let w = array![[0.0, 1.0], [1.0, 0.0]];
        let degrees = w.sum_axis(ndarray::Axis(1));
        let g = WeightedGraph {
            ss: Array2::<f64>::eye(2),
            s_norm: w.clone(),
            w,
            degrees,
        };
        let f = manifold_rank(&g, &array![1.0, 0.0], 0.6, &RankOptions::default()).unwrap();
        assert_abs_diff_eq!(f[0], 0.625, epsilon = 1e-9);
        assert_abs_diff_eq!(f[1], 0.375, epsilon = 1e-9);
    }

    #[test]
    fn manifold_rank_zero_seed_gives_zero() {
        let w = array![[0.0, 0.5], [0.5, 0.0]];
        let degrees = w.sum_axis(ndarray::Axis(1));
        let g = WeightedGraph {
            ss: Array2::<f64>::eye(2),
            s_norm: w.clone(),
            w,
            degrees,
        };
        let f = manifold_rank(&g, &array![0.0, 0.0], 0.6, &RankOptions::default()).unwrap();
        assert!(f.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn manifold_rank_small_alpha_approaches_y() {
        let w = array![[0.0, 1.0], [1.0, 0.0]];
        let degrees = w.sum_axis(ndarray::Axis(1));
        let g = WeightedGraph {
            ss: Array2::<f64>::eye(2),
            s_norm: w.clone(),
            w,
            degrees,
        };
        let y = array![1.0, 0.0];
        let f = manifold_rank(&g, &y, 1e-6, &RankOptions::default()).unwrap();
        assert_abs_diff_eq!(f[0], 1.0, epsilon = 1e-5);
        assert_abs_diff_eq!(f[1], 0.0, epsilon = 1e-5);
    }

    #[test]
    fn manifold_rank_guards_against_non_convergence() {
        let w = array![[0.0, 1.0], [1.0, 0.0]];
        let degrees = w.sum_axis(ndarray::Axis(1));
        let g = WeightedGraph {
            ss: Array2::<f64>::eye(2),
            s_norm: w.clone(),
            w,
            degrees,
        };
        let opts = RankOptions {
            tol: 1e-12,
            max_iters: 2,
        };
        assert!(matches!(
            manifold_rank(&g, &array![1.0, 0.0], 0.9, &opts),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn single_mr_requires_zero_topic_weight() {
        let pc = cluster(&[&["a", "b"], &["b", "c"], &["c", "d"]]);
        let err = single_mr(&pc, &MixWeights::default(), &RankOptions::default());
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn ranking_order_invariant_to_y_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let raw = Array2::from_shape_fn((6, 6), |_| rng.gen_range(0.0..1.0));
        let mut w = &raw + &raw.t();
        for i in 0..6 {
            w[[i, i]] = 0.0;
        }
        let degrees = w.sum_axis(ndarray::Axis(1)).mapv(|d: f64| d.max(1e-12));
        let inv = degrees.mapv(|d| 1.0 / d.sqrt());
        let mut s_norm = w.clone();
        for i in 0..6 {
            for j in 0..6 {
                s_norm[[i, j]] *= inv[i] * inv[j];
            }
        }
        let g = WeightedGraph {
            ss: Array2::<f64>::eye(6),
            w,
            degrees,
            s_norm,
        };
        let y = indicator(6);
        let opts = RankOptions::default();
        let f1 = manifold_rank(&g, &y, 0.85, &opts).unwrap();
        let f2 = manifold_rank(&g, &(5.0 * &y), 0.85, &opts).unwrap();
        let order = |f: &Array1<f64>| {
            let mut idx: Vec<usize> = (0..f.len()).collect();
            idx.sort_by(|&a, &b| f[b].partial_cmp(&f[a]).unwrap());
            idx
        };
        assert_eq!(order(&f1), order(&f2));
    }

    #[test]
    fn jtmmr_is_deterministic() {
        let pc = cluster(&[
            &["storm", "coast", "wind"],
            &["storm", "wind", "rain"],
            &["coast", "flood"],
            &["mountain", "snow"],
        ]);
        let h = NmfHyper {
            k_topics: 2,
            ..NmfHyper::default()
        };
        let mw = MixWeights::default();
        let r1 = jtmmr(&pc, &h, &mw, &RankOptions::default(), 7).unwrap();
        let r2 = jtmmr(&pc, &h, &mw, &RankOptions::default(), 7).unwrap();
        assert_eq!(r1.factors, r2.factors);
        assert_eq!(r1.f, r2.f);
    }

    #[test]
    fn jtmmr_with_zero_alpha_v_matches_single_mr() {
        let pc = cluster(&[
            &["storm", "coast", "wind"],
            &["storm", "wind", "rain"],
            &["coast", "flood"],
            &["mountain", "snow"],
        ]);
        let h = NmfHyper {
            k_topics: 2,
            ..NmfHyper::default()
        };
        let mw = MixWeights {
            alpha_v: 0.0,
            alpha_a: 0.6,
            alpha_overlap: 0.4,
            alpha_mr: 0.85,
        };
        let joint = jtmmr(&pc, &h, &mw, &RankOptions::default(), 3).unwrap();
        let plain = single_mr(&pc, &mw, &RankOptions::default()).unwrap();
        assert!(inf_norm_diff(&joint.f, &plain.f) < 1e-10);
    }

    #[test]
    fn sentence_sharing_topic_tokens_ranks_highest() {
        let pc = cluster(&[
            &["quake", "city", "damage"],
            &["quake", "city", "damage"],
            &["harvest", "grain"],
            &["market", "price"],
            &["river", "bridge"],
        ]);
        let mw = MixWeights::default();
        let h = NmfHyper {
            k_topics: 2,
            ..NmfHyper::default()
        };
        let result = jtmmr(&pc, &h, &mw, &RankOptions::default(), 11).unwrap();
        let best = (1..pc.sentences.len())
            .max_by(|&a, &b| result.f[a].partial_cmp(&result.f[b]).unwrap())
            .unwrap();
        assert_eq!(best, 1, "f = {:?}", result.f);
    }

    #[test]
    fn weighted_updates_with_unit_weights_match_ltm_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a = Array2::from_shape_fn((8, 5), |_| rng.gen_range(0.1..1.0));
        let raw = Array2::from_shape_fn((8, 8), |_| rng.gen_range(0.0..0.5));
        let mut o = &raw + &raw.t();
        for i in 0..8 {
            o[[i, i]] = 0.0;
        }
        let km = KnowledgeMatrices::from_affinity(o);
        let h = LtmHyper::default();
        let fp = init_factors(8, 5, 3, 24);
        let cw = ColumnWeights::uniform(5);
        let (wu, wv) = weighted_updates(&a, &fp, &km, &cw, &h).unwrap();
        let lu = update_u_ltm(&a, &fp, &km, &h).unwrap();
        let staged = FactorPair {
            u: lu.clone(),
            v: fp.v.clone(),
        };
        let lv = update_v_ltm(&a, &staged, &h).unwrap();
        assert_eq!(wu, lu);
        assert_eq!(wv, lv);
    }

    #[test]
    fn constant_scores_scale_updates_uniformly() {
        // Constant f maps to r = e^{0.5} everywhere; with no constraint terms
        // the scale cancels and the update matches the plain rule.
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let a = Array2::from_shape_fn((6, 4), |_| rng.gen_range(0.1..1.0));
        let km = KnowledgeMatrices::zeros(6);
        let h = LtmHyper {
            alpha_ltm: 0.0,
            gamma: 0.0,
            nmf: NmfHyper {
                k_topics: 2,
                beta: 0.0,
                lambda: 0.0,
                ..NmfHyper::default()
            },
            ..LtmHyper::default()
        };
        let fp = init_factors(6, 4, 2, 26);
        let cw = ColumnWeights::from_scores(&Array1::from_elem(4, 0.7));
        assert!(cw.r.iter().all(|&x| (x - 0.5f64.exp()).abs() < 1e-15));
        let (wu, wv) = weighted_updates(&a, &fp, &km, &cw, &h).unwrap();
        let pu = topics::update_u(&a, &fp, &h.nmf).unwrap();
        let staged = FactorPair {
            u: pu.clone(),
            v: fp.v.clone(),
        };
        let pv = topics::update_v(&a, &staged, &h.nmf).unwrap();
        assert_relative_eq!(wu, pu, max_relative = 1e-12);
        assert_relative_eq!(wv, pv, max_relative = 1e-12);
        let argmax = |m: &Array2<f64>| -> Vec<usize> {
            (0..m.ncols())
                .map(|k| {
                    (0..m.nrows())
                        .max_by(|&x, &y| m[[x, k]].partial_cmp(&m[[y, k]]).unwrap())
                        .unwrap()
                })
                .collect()
        };
        assert_eq!(argmax(&wu), argmax(&pu));
    }

    #[test]
    fn dominant_column_weight_speeds_its_residual_decay() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let a = Array2::from_shape_fn((10, 6), |_| rng.gen_range(0.1..1.0));
        let km = KnowledgeMatrices::zeros(10);
        let h = LtmHyper {
            alpha_ltm: 0.0,
            gamma: 0.0,
            nmf: NmfHyper {
                k_topics: 2,
                beta: 0.0,
                lambda: 0.0,
                ..NmfHyper::default()
            },
            ..LtmHyper::default()
        };
        // Column 3 dominates the weights.
        let mut f = Array1::zeros(6);
        f[3] = 1.0;
        let cw = ColumnWeights::from_scores(&f);

        let col_residual = |fp: &FactorPair, j: usize| -> f64 {
            let approx = fp.u.dot(&fp.v);
            (0..10)
                .map(|i| (a[[i, j]] - approx[[i, j]]).powi(2))
                .sum::<f64>()
                .sqrt()
        };

        let mut weighted = init_factors(10, 6, 2, 28);
        let before: Vec<f64> = (0..6).map(|j| col_residual(&weighted, j)).collect();
        for _ in 0..10 {
            let (u, v) = weighted_updates(&a, &weighted, &km, &cw, &h).unwrap();
            weighted = FactorPair { u, v };
        }
        let after: Vec<f64> = (0..6).map(|j| col_residual(&weighted, j)).collect();
        let ratios: Vec<f64> = (0..6).map(|j| after[j] / before[j]).collect();
        let others_best = (0..6)
            .filter(|&j| j != 3)
            .map(|j| ratios[j])
            .fold(f64::INFINITY, f64::min);
        assert!(
            ratios[3] < others_best,
            "dominant column ratio {} vs best other {}",
            ratios[3],
            others_best
        );
    }

    #[test]
    fn jltmmr_records_fixed_pair_increments_per_outer_iteration() {
        let pc = cluster(&[
            &[
                "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota",
                "kappa", "lam", "mu",
            ],
            &[
                "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta", "iota",
                "kappa", "nu", "xi",
            ],
            &[
                "alpha", "beta", "omicron", "pi", "rho", "sigma", "tau", "upsilon", "phi", "chi",
                "psi", "omega",
            ],
        ]);
        let mut kb = KnowledgeBase::new();
        let h = LtmHyper {
            nmf: NmfHyper {
                k_topics: 2,
                ..NmfHyper::default()
            },
            ..LtmHyper::default()
        };
        let result = jltmmr(
            &pc,
            &mut kb,
            &h,
            &MixWeights::default(),
            &OuterOptions::default(),
            5,
        )
        .unwrap();
        let per_iter = 2 * 45; // K topics x C(10, 2)
        let mut expected = 0;
        for diag in &result.trace {
            expected += per_iter;
            assert_eq!(diag.kb_increments, expected, "at {:?}", diag);
        }
    }

    #[test]
    fn jltmmr_converges_and_reports_trace() {
        let pc = cluster(&[
            &["flood", "river", "bank"],
            &["flood", "rain", "river"],
            &["bank", "levee", "water"],
            &["storm", "rain", "water"],
        ]);
        let mut kb = KnowledgeBase::new();
        let h = LtmHyper {
            nmf: NmfHyper {
                k_topics: 2,
                ..NmfHyper::default()
            },
            ..LtmHyper::default()
        };
        let outer = OuterOptions::default();
        let result = jltmmr(&pc, &mut kb, &h, &MixWeights::default(), &outer, 9).unwrap();
        assert!(!result.trace.is_empty());
        let last = result.trace.last().unwrap();
        assert!(
            last.f_change < outer.f_tol,
            "final change {} (trace {:?})",
            last.f_change,
            result.trace
        );
    }
}
