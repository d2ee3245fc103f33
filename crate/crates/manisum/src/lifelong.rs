//! Lifelong learning machinery: the cross-task knowledge base of top-word
//! co-occurrence counts, its projection to the constraint matrices (O, P, L),
//! the sentence-relation matrices (Q, T, Z), and the knowledge-constrained
//! topic model fit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::corpus::Wordmap;
use crate::error::{Error, Result};
use crate::math::{column_cosines, min_max_unit, scale_rows};
use crate::topics::{
    self, fit_loop, init_factors, nmf_objective_unchecked, top_words, FactorPair, NmfHyper,
};

/// Accumulated co-occurrence counts of top topic words across tasks.
/// Pairs are stored as stemmed word strings (unordered, lexicographically
/// normalized) so the knowledge survives vocabulary drift between tasks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    pairs: BTreeMap<(String, String), u64>,
    totals: BTreeMap<String, u64>,
    tasks: u64,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl KnowledgeBase {
    pub fn new() -> Self {
        KnowledgeBase::default()
    }

    /// For every topic column of `u`, count all unordered pairs among its
    /// `top_count` heaviest words (ties broken by lower word index).
    pub fn record(&mut self, u: &Array2<f64>, wm: &Wordmap, top_count: usize) {
        for topic in top_words(u, top_count) {
            for i in 0..topic.len() {
                for j in (i + 1)..topic.len() {
                    let a = wm.word(topic[i]);
                    let b = wm.word(topic[j]);
                    *self.pairs.entry(pair_key(a, b)).or_insert(0) += 1;
                    *self.totals.entry(a.to_string()).or_insert(0) += 1;
                    *self.totals.entry(b.to_string()).or_insert(0) += 1;
                }
            }
        }
        self.tasks += 1;
    }

    pub fn pair_count(&self, a: &str, b: &str) -> u64 {
        self.pairs.get(&pair_key(a, b)).copied().unwrap_or(0)
    }

    pub fn word_total(&self, w: &str) -> u64 {
        self.totals.get(w).copied().unwrap_or(0)
    }

    pub fn task_count(&self) -> u64 {
        self.tasks
    }

    pub fn pair_len(&self) -> usize {
        self.pairs.len()
    }

    pub fn word_len(&self) -> usize {
        self.totals.len()
    }

    pub fn total_increments(&self) -> u64 {
        self.pairs.values().sum()
    }

    pub fn iter_pairs(&self) -> impl Iterator<Item = (&(String, String), &u64)> {
        self.pairs.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Serialize as `#tasks=<n>` followed by `wordA<TAB>wordB<TAB>count`
    /// lines in lexicographic order.
    pub fn to_string_repr(&self) -> String {
        let mut out = format!("#tasks={}\n", self.tasks);
        for ((a, b), count) in &self.pairs {
            out.push_str(a);
            out.push('\t');
            out.push_str(b);
            out.push('\t');
            out.push_str(&count.to_string());
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_string_repr()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<KnowledgeBase> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    fn parse(text: &str, path: &Path) -> Result<KnowledgeBase> {
        let mut kb = KnowledgeBase::new();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header.starts_with("#tasks=") => {
                kb.tasks = header["#tasks=".len()..]
                    .parse()
                    .map_err(|_| Error::Parse {
                        path: path.to_path_buf(),
                        line: 1,
                        msg: format!("bad task count in header {header:?}"),
                    })?;
            }
            other => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: 1,
                    msg: format!("expected #tasks= header, got {:?}", other.map(|(_, l)| l)),
                })
            }
        }
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (a, b, count) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), Some(c), None) => (a, b, c),
                _ => {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: idx + 1,
                        msg: "expected wordA<TAB>wordB<TAB>count".into(),
                    })
                }
            };
            let count: u64 = count.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("bad count {count:?}"),
            })?;
            *kb.pairs.entry(pair_key(a, b)).or_insert(0) += count;
            *kb.totals.entry(a.to_string()).or_insert(0) += count;
            *kb.totals.entry(b.to_string()).or_insert(0) += count;
        }
        Ok(kb)
    }
}

/// The knowledge constraint projected onto one task's vocabulary:
/// O (row-normalized co-occurrence), its degree vector P = O.1 and the
/// Laplacian-style L = diag(P) - O.
#[derive(Debug, Clone)]
pub struct KnowledgeMatrices {
    pub o: Array2<f64>,
    pub p: Array1<f64>,
    pub l: Array2<f64>,
}

impl KnowledgeMatrices {
    /// Derive P and L from an arbitrary nonnegative affinity matrix.
    pub fn from_affinity(o: Array2<f64>) -> KnowledgeMatrices {
        let p = o.sum_axis(ndarray::Axis(1));
        let mut l = -o.clone();
        for i in 0..o.nrows() {
            l[[i, i]] += p[i];
        }
        KnowledgeMatrices { o, p, l }
    }

    pub fn zeros(m: usize) -> KnowledgeMatrices {
        KnowledgeMatrices {
            o: Array2::zeros((m, m)),
            p: Array1::zeros(m),
            l: Array2::zeros((m, m)),
        }
    }
}

/// Project the knowledge base onto the current vocabulary:
/// `O[i][j] = count(w_i, w_j) / total(w_i)`, where the total runs over every
/// pair the base has recorded for w_i (so rows are substochastic). Words
/// absent from the wordmap are ignored; rows with no recorded mass stay zero.
pub fn project_knowledge(kb: &KnowledgeBase, wm: &Wordmap) -> KnowledgeMatrices {
    let m = wm.len();
    let mut o = Array2::zeros((m, m));
    for ((a, b), &count) in kb.iter_pairs() {
        let (Some(i), Some(j)) = (wm.index_of(a), wm.index_of(b)) else {
            continue;
        };
        o[[i, j]] += count as f64;
        o[[j, i]] += count as f64;
    }
    for i in 0..m {
        let total = kb.word_total(wm.word(i));
        if total > 0 {
            let scale = 1.0 / total as f64;
            o.row_mut(i).mapv_inplace(|v| v * scale);
        }
    }
    KnowledgeMatrices::from_affinity(o)
}

/// Sentence-relation constraint: Q with its degree vector T = Q.1 and
/// Z = diag(T) - Q.
#[derive(Debug, Clone)]
pub struct DocRelation {
    pub q: Array2<f64>,
    pub t: Array1<f64>,
    pub z: Array2<f64>,
}

impl DocRelation {
    fn from_q(q: Array2<f64>) -> DocRelation {
        let t = q.sum_axis(ndarray::Axis(1));
        let mut z = -q.clone();
        for i in 0..q.nrows() {
            z[[i, i]] += t[i];
        }
        DocRelation { q, t, z }
    }

    pub fn zeros(n: usize) -> DocRelation {
        DocRelation {
            q: Array2::zeros((n, n)),
            t: Array1::zeros(n),
            z: Array2::zeros((n, n)),
        }
    }
}

/// `Q[i][j] = cos(A_i, A_j) / sum_d cos(A_i, A_d)`; the normalizing sum includes
/// the self term. A row of all-zero similarities is left all-zero.
pub fn doc_relation_from_sim(a: &Array2<f64>) -> DocRelation {
    let mut q = column_cosines(a);
    for mut row in q.rows_mut() {
        let sum: f64 = row.sum();
        if sum > 0.0 {
            row.mapv_inplace(|v| v / sum);
        }
    }
    DocRelation::from_q(q)
}

/// `Q[i][j] = 1 - |f_i - f_j|` with f min-max mapped onto `[0, 1]`
/// (a constant f maps to all 0.5, making Q all-ones).
pub fn doc_relation_from_f(f: &Array1<f64>) -> DocRelation {
    let fm = min_max_unit(f);
    let n = fm.len();
    let q = Array2::from_shape_fn((n, n), |(i, j)| 1.0 - (fm[i] - fm[j]).abs());
    DocRelation::from_q(q)
}

/// Hyperparameters of the lifelong topic model.
#[derive(Debug, Clone, PartialEq)]
pub struct LtmHyper {
    pub nmf: NmfHyper,
    /// Weight of the knowledge constraint tr(U^T L U).
    pub alpha_ltm: f64,
    /// Weight of the sentence-relation constraint tr(V Z V^T).
    pub gamma: f64,
    /// Words per topic recorded into the knowledge base.
    pub top_words: usize,
}

impl Default for LtmHyper {
    fn default() -> Self {
        LtmHyper {
            nmf: NmfHyper::default(),
            alpha_ltm: 0.1,
            gamma: 0.1,
            top_words: 10,
        }
    }
}

impl LtmHyper {
    pub fn validate(&self) -> Result<()> {
        self.nmf.validate()?;
        if self.alpha_ltm < 0.0 || self.gamma < 0.0 {
            return Err(Error::Contract("alpha_ltm and gamma must be >= 0".into()));
        }
        if self.top_words == 0 {
            return Err(Error::Contract("top_words must be >= 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn ltm_objective_unchecked(
    a: &Array2<f64>,
    fp: &FactorPair,
    km: &KnowledgeMatrices,
    dr: &DocRelation,
    h: &LtmHyper,
) -> f64 {
    let base = nmf_objective_unchecked(a, fp, &h.nmf);
    let knowledge = (&fp.u * &km.l.dot(&fp.u)).sum();
    let relation = (&fp.v.dot(&dr.z) * &fp.v).sum();
    base + h.alpha_ltm * knowledge + h.gamma * relation
}

/// Plain objective plus alpha_ltm tr(U^T L U) + gamma tr(V Z V^T).
pub fn ltm_objective(
    a: &Array2<f64>,
    fp: &FactorPair,
    km: &KnowledgeMatrices,
    dr: &DocRelation,
    h: &LtmHyper,
) -> Result<f64> {
    let base = topics::nmf_objective(a, fp, &h.nmf)?;
    if km.o.nrows() != fp.u.nrows() || dr.q.nrows() != fp.v.ncols() {
        return Err(Error::Contract(
            "knowledge or relation matrix does not match factor dimensions".into(),
        ));
    }
    let knowledge = (&fp.u * &km.l.dot(&fp.u)).sum();
    let relation = (&fp.v.dot(&dr.z) * &fp.v).sum();
    Ok(base + h.alpha_ltm * knowledge + h.gamma * relation)
}

/// U <- U .* (A V^T + alpha O U + 2 beta U)
///        ./ (U V V^T + alpha P U + 2 beta U U^T U).
pub fn update_u_ltm(
    a: &Array2<f64>,
    fp: &FactorPair,
    km: &KnowledgeMatrices,
    h: &LtmHyper,
) -> Result<Array2<f64>> {
    let numer = a.dot(&fp.v.t()) + &(h.alpha_ltm * km.o.dot(&fp.u)) + &(2.0 * h.nmf.beta * &fp.u);
    let gram = fp.u.t().dot(&fp.u);
    let denom = fp.u.dot(&fp.v.dot(&fp.v.t()))
        + &(h.alpha_ltm * scale_rows(&fp.u, &km.p))
        + &(2.0 * h.nmf.beta * fp.u.dot(&gram));
    topics::multiplicative_step(&fp.u, &numer, &denom)
}

/// Identical in form to the plain V update; the relation term does not enter
/// the V update rule, only the objective.
pub fn update_v_ltm(a: &Array2<f64>, fp: &FactorPair, h: &LtmHyper) -> Result<Array2<f64>> {
    topics::update_v(a, fp, &h.nmf)
}

/// Analytic U gradient: plain gradient plus 2 alpha (P U - O U).
pub fn grad_u_ltm(
    a: &Array2<f64>,
    fp: &FactorPair,
    km: &KnowledgeMatrices,
    h: &LtmHyper,
) -> Array2<f64> {
    topics::grad_u(a, fp, &h.nmf) + 2.0 * h.alpha_ltm * (scale_rows(&fp.u, &km.p) - km.o.dot(&fp.u))
}

/// Analytic V gradient; matches the plain rule (the relation term is omitted
/// from the V update by construction).
pub fn grad_v_ltm(a: &Array2<f64>, fp: &FactorPair, h: &LtmHyper) -> Array2<f64> {
    topics::grad_v(a, fp, &h.nmf)
}

/// Fit the lifelong topic model from a seeded random start. Knowledge
/// recording is the caller's responsibility after convergence.
pub fn fit_ltm(
    a: &Array2<f64>,
    km: &KnowledgeMatrices,
    dr: &DocRelation,
    h: &LtmHyper,
    seed: u64,
) -> Result<FactorPair> {
    h.validate()?;
    let (m, n) = a.dim();
    if m == 0 || n == 0 {
        return Err(Error::Contract("empty matrix".into()));
    }
    if km.o.nrows() != m || dr.q.nrows() != n {
        return Err(Error::Contract(
            "knowledge or relation matrix does not match A".into(),
        ));
    }
    let init = init_factors(m, n, h.nmf.k_topics, seed);
    fit_loop(
        init,
        |fp| update_u_ltm(a, fp, km, h),
        |fp| update_v_ltm(a, fp, h),
        |fp| ltm_objective_unchecked(a, fp, km, dr, h),
        h.nmf.rel_tol,
        h.nmf.max_iters,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Sentence;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wordmap_of(words: &[&str]) -> Wordmap {
        let sentences = vec![Sentence {
            raw_text: words.join(" "),
            tokens: words.iter().map(|w| w.to_string()).collect(),
            doc_index: Some(0),
            position_in_doc: 1,
            is_topic_sentence: false,
        }];
        Wordmap::from_sentences(&sentences)
    }

    #[test]
    fn record_single_topic_counts_all_pairs() {
        let words: Vec<String> = (0..12).map(|i| format!("w{i:02}")).collect();
        let refs: Vec<&str> = words.iter().map(|s| s.as_str()).collect();
        let wm = wordmap_of(&refs);
        // Strictly decreasing weights pick w00..w09 as the top 10.
        let u = Array2::from_shape_fn((12, 1), |(i, _)| 1.0 / (i + 1) as f64);
        let mut kb = KnowledgeBase::new();
        kb.record(&u, &wm, 10);
        assert_eq!(kb.pair_len(), 45);
        assert!(kb.iter_pairs().all(|(_, &c)| c == 1));
        assert_eq!(kb.task_count(), 1);
        assert_eq!(kb.word_total("w00"), 9);
    }

    #[test]
    fn record_twice_doubles_counts() {
        let wm = wordmap_of(&["a", "b", "c"]);
        let u = array![[3.0], [2.0], [1.0]];
        let mut kb = KnowledgeBase::new();
        kb.record(&u, &wm, 10);
        kb.record(&u, &wm, 10);
        assert!(kb.iter_pairs().all(|(_, &c)| c == 2));
        assert_eq!(kb.task_count(), 2);
    }

    #[test]
    fn record_shared_top_sets_sum_per_topic() {
        let wm = wordmap_of(&["a", "b"]);
        let u = array![[2.0, 2.0], [1.0, 1.0]];
        let mut kb = KnowledgeBase::new();
        kb.record(&u, &wm, 10);
        assert_eq!(kb.pair_count("a", "b"), 2);
    }

    #[test]
    fn record_small_vocabulary_uses_min_m_words() {
        let wm = wordmap_of(&["a", "b", "c"]);
        let u = array![[3.0], [2.0], [1.0]];
        let mut kb = KnowledgeBase::new();
        kb.record(&u, &wm, 10);
        assert_eq!(kb.pair_len(), 3); // C(3,2)
    }

    #[test]
    fn project_empty_base_is_all_zero() {
        let wm = wordmap_of(&["a", "b"]);
        let km = project_knowledge(&KnowledgeBase::new(), &wm);
        assert!(km.o.iter().all(|&v| v == 0.0));
        assert!(km.l.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn project_single_pair_row_normalizes() {
        let wm = wordmap_of(&["a", "b"]);
        let mut kb = KnowledgeBase::new();
        for _ in 0..3 {
            kb.record(&array![[2.0], [1.0]], &wm, 2);
        }
        let km = project_knowledge(&kb, &wm);
        assert_eq!(km.o, array![[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(km.l, array![[1.0, -1.0], [-1.0, 1.0]]);
    }

    #[test]
    fn project_reproduces_hand_computed_ratios() {
        // Pairs: (a,b) twice, (a,c) once. Totals: a=3, b=2, c=1, so
        // O = [[0, 2/3, 1/3], [1, 0, 0], [1, 0, 0]] (row-substochastic).
        let wm = wordmap_of(&["a", "b", "c"]);
        let mut kb = KnowledgeBase::new();
        let ab = array![[3.0], [2.0], [0.0]];
        let ac = array![[3.0], [0.0], [2.0]];
        kb.record(&ab, &wm, 2);
        kb.record(&ab, &wm, 2);
        kb.record(&ac, &wm, 2);
        let km = project_knowledge(&kb, &wm);
        let expected = array![
            [0.0, 2.0 / 3.0, 1.0 / 3.0],
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0]
        ];
        assert_abs_diff_eq!(km.o, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(km.p[0], 1.0, epsilon = 1e-15);
        for i in 0..3 {
            assert!(km.l.row(i).sum().abs() < 1e-12);
        }
    }

    #[test]
    fn project_ignores_words_outside_wordmap() {
        let wm_record = wordmap_of(&["a", "b", "c"]);
        let mut kb = KnowledgeBase::new();
        kb.record(&array![[3.0], [2.0], [1.0]], &wm_record, 3);
        let wm_now = wordmap_of(&["a", "z"]);
        let km = project_knowledge(&kb, &wm_now);
        // Only the (a, *) row can carry mass, and none of a's partners exist.
        assert!(km.o.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut o = Array2::from_shape_fn((6, 6), |_| rng.gen_range(0.0..1.0));
        for i in 0..6 {
            o[[i, i]] = 0.0;
        }
        let km = KnowledgeMatrices::from_affinity(o);
        for i in 0..6 {
            assert!(km.l.row(i).sum().abs() < 1e-10);
        }
    }

    #[test]
    fn symmetric_laplacian_is_positive_semidefinite() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let raw = Array2::from_shape_fn((8, 8), |_| rng.gen_range(0.0..1.0));
        let mut o = &raw + &raw.t();
        for i in 0..8 {
            o[[i, i]] = 0.0;
        }
        let km = KnowledgeMatrices::from_affinity(o);
        for _ in 0..100 {
            let x = Array1::from_shape_fn(8, |_| rng.gen_range(-1.0..1.0));
            let quad = x.dot(&km.l.dot(&x));
            assert!(quad >= -1e-10, "x^T L x = {quad}");
        }
    }

    #[test]
    fn relation_from_identical_columns() {
        let a = array![[1.0, 1.0], [2.0, 2.0]];
        let dr = doc_relation_from_sim(&a);
        assert_abs_diff_eq!(dr.q, array![[0.5, 0.5], [0.5, 0.5]], epsilon = 1e-12);
    }

    #[test]
    fn relation_from_orthogonal_columns_concentrates_on_self() {
        let a = array![[1.0, 0.0], [0.0, 1.0]];
        let dr = doc_relation_from_sim(&a);
        assert_abs_diff_eq!(dr.q, array![[1.0, 0.0], [0.0, 1.0]], epsilon = 1e-12);
    }

    #[test]
    fn relation_z_rows_sum_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Array2::from_shape_fn((5, 4), |_| rng.gen_range(0.0..1.0));
        let dr = doc_relation_from_sim(&a);
        for i in 0..4 {
            assert!(dr.z.row(i).sum().abs() < 1e-10);
        }
    }

    #[test]
    fn relation_from_f_extremes() {
        let dr = doc_relation_from_f(&array![0.0, 1.0]);
        assert_eq!(dr.q, array![[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn relation_from_constant_f_is_all_ones() {
        let dr = doc_relation_from_f(&array![0.3, 0.3, 0.3]);
        assert!(dr.q.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn relation_from_f_midpoint() {
        let dr = doc_relation_from_f(&array![0.0, 0.5, 1.0]);
        assert_abs_diff_eq!(dr.q[[0, 2]], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dr.q[[0, 1]], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(dr.q[[1, 2]], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn ltm_objective_reduces_to_plain() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = Array2::from_shape_fn((5, 4), |_| rng.gen_range(0.1..1.0));
        let fp = init_factors(5, 4, 2, 9);
        let h = LtmHyper {
            alpha_ltm: 0.0,
            gamma: 0.0,
            ..LtmHyper::default()
        };
        let km = KnowledgeMatrices::zeros(5);
        let dr = DocRelation::zeros(4);
        let ltm = ltm_objective(&a, &fp, &km, &dr, &h).unwrap();
        let plain = topics::nmf_objective(&a, &fp, &h.nmf).unwrap();
        assert_eq!(ltm, plain);
    }

    #[test]
    fn laplacian_null_space_gives_zero_trace_terms() {
        // Constant U columns against a Laplacian L, and equal V columns
        // against Z, both vanish.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let raw = Array2::from_shape_fn((5, 5), |_| rng.gen_range(0.0..1.0));
        let mut o = &raw + &raw.t();
        for i in 0..5 {
            o[[i, i]] = 0.0;
        }
        let km = KnowledgeMatrices::from_affinity(o);
        let u = Array2::from_elem((5, 2), 0.7);
        let knowledge = (&u * &km.l.dot(&u)).sum();
        assert_abs_diff_eq!(knowledge, 0.0, epsilon = 1e-10);

        let dr = doc_relation_from_f(&array![0.1, 0.5, 0.9]);
        let v = Array2::from_shape_fn((2, 3), |(k, _)| 0.3 + k as f64);
        let relation = (&v.dot(&dr.z) * &v).sum();
        assert_abs_diff_eq!(relation, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn update_u_ltm_reduces_to_plain_with_zero_knowledge() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = Array2::from_shape_fn((6, 4), |_| rng.gen_range(0.1..1.0));
        let fp = init_factors(6, 4, 2, 12);
        let h = LtmHyper::default();
        let km = KnowledgeMatrices::zeros(6);
        let ltm = update_u_ltm(&a, &fp, &km, &h).unwrap();
        let plain = topics::update_u(&a, &fp, &h.nmf).unwrap();
        assert_eq!(ltm, plain);
    }

    #[test]
    fn ltm_single_step_does_not_increase_objective() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
            let a = Array2::from_shape_fn((6, 4), |_| rng.gen_range(0.1..1.0));
            let raw = Array2::from_shape_fn((6, 6), |_| rng.gen_range(0.0..0.5));
            let mut o = &raw + &raw.t();
            for i in 0..6 {
                o[[i, i]] = 0.0;
            }
            let km = KnowledgeMatrices::from_affinity(o);
            let dr = DocRelation::zeros(4);
            let h = LtmHyper {
                alpha_ltm: 0.1,
                gamma: 0.0,
                nmf: NmfHyper {
                    k_topics: 2,
                    beta: 0.0,
                    lambda: 0.0,
                    ..NmfHyper::default()
                },
                ..LtmHyper::default()
            };
            let mut fp = init_factors(6, 4, 2, 400 + seed);
            let before = ltm_objective(&a, &fp, &km, &dr, &h).unwrap();
            fp.u = update_u_ltm(&a, &fp, &km, &h).unwrap();
            fp.v = update_v_ltm(&a, &fp, &h).unwrap();
            let after = ltm_objective(&a, &fp, &km, &dr, &h).unwrap();
            assert!(
                after <= before * (1.0 + 1e-9),
                "seed {seed}: {before} -> {after}"
            );
        }
    }

    #[test]
    fn fit_ltm_with_empty_knowledge_matches_fit_nmf() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = Array2::from_shape_fn((6, 5), |_| rng.gen_range(0.1..1.0));
        let h = LtmHyper {
            alpha_ltm: 0.1,
            gamma: 0.0,
            ..LtmHyper::default()
        };
        let km = KnowledgeMatrices::zeros(6);
        let dr = DocRelation::zeros(5);
        let ltm = fit_ltm(&a, &km, &dr, &h, 14).unwrap();
        let plain = topics::fit_nmf(&a, &h.nmf, 14).unwrap();
        assert_eq!(ltm, plain);
    }

    #[test]
    fn fit_ltm_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let a = Array2::from_shape_fn((5, 4), |_| rng.gen_range(0.1..1.0));
        let km = KnowledgeMatrices::zeros(5);
        let dr = DocRelation::zeros(4);
        let h = LtmHyper::default();
        assert_eq!(
            fit_ltm(&a, &km, &dr, &h, 16).unwrap(),
            fit_ltm(&a, &km, &dr, &h, 16).unwrap()
        );
    }

    #[test]
    fn knowledge_base_roundtrip_is_bit_exact() {
        let wm = wordmap_of(&["alpha", "beta", "gamma", "delta"]);
        let mut kb = KnowledgeBase::new();
        let u = array![[4.0, 1.0], [3.0, 2.0], [2.0, 3.0], [1.0, 4.0]];
        kb.record(&u, &wm, 3);
        kb.record(&u, &wm, 2);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("kb.tsv");
        kb.save(&path).unwrap();
        let loaded = KnowledgeBase::load(&path).unwrap();
        assert_eq!(loaded, kb);

        let second = dir.path().join("kb2.tsv");
        loaded.save(&second).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&second).unwrap()
        );
    }

    #[test]
    fn knowledge_only_grows_across_tasks() {
        let wm = wordmap_of(&["a", "b", "c", "d"]);
        let mut kb = KnowledgeBase::new();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut previous: Vec<((String, String), u64)> = Vec::new();
        for _ in 0..5 {
            let u = Array2::from_shape_fn((4, 2), |_| rng.gen_range(0.1..1.0));
            kb.record(&u, &wm, 3);
            let current: Vec<_> = kb.iter_pairs().map(|(k, &v)| (k.clone(), v)).collect();
            for (key, old) in &previous {
                let now = kb.pair_count(&key.0, &key.1);
                assert!(now >= *old);
            }
            previous = current;
        }
    }
}
