//! Independent oracles for the integration suite. Everything here computes
//! expected values by a different route than the library (direct linear
//! solves, exhaustive gram scans, finite differences) so the tests check the
//! implementation against genuinely separate arithmetic.

use ndarray::{Array1, Array2};

/// Solve A x = b by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = b.len();
    assert_eq!(a.nrows(), n);
    assert_eq!(a.ncols(), n);
    let mut m = a.clone();
    let mut rhs = b.clone();
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if m[[row, col]].abs() > m[[pivot, col]].abs() {
                pivot = row;
            }
        }
        assert!(m[[pivot, col]].abs() > 1e-14, "singular system");
        if pivot != col {
            for k in 0..n {
                let tmp = m[[col, k]];
                m[[col, k]] = m[[pivot, k]];
                m[[pivot, k]] = tmp;
            }
            rhs.swap(col, pivot);
        }
        for row in (col + 1)..n {
            let factor = m[[row, col]] / m[[col, col]];
            for k in col..n {
                m[[row, k]] -= factor * m[[col, k]];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = Array1::zeros(n);
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= m[[row, k]] * x[k];
        }
        x[row] = acc / m[[row, row]];
    }
    x
}

/// Closed-form manifold ranking: (I - alpha S)^(-1) (1 - alpha) y.
pub fn manifold_direct(s_norm: &Array2<f64>, y: &Array1<f64>, alpha: f64) -> Array1<f64> {
    let n = y.len();
    let mut system = -alpha * s_norm;
    for i in 0..n {
        system[[i, i]] += 1.0;
    }
    let rhs = y.mapv(|v| v * (1.0 - alpha));
    gauss_solve(&system, &rhs)
}

/// Clipped-count ROUGE-N by exhaustive scanning (no hash maps, no sharing
/// with the library path). Returns None when no reference has an n-gram.
pub fn rouge_brute(references: &[Vec<String>], candidate: &[String], n: usize) -> Option<f64> {
    let grams = |tokens: &[String]| -> Vec<Vec<String>> {
        if tokens.len() < n {
            vec![]
        } else {
            tokens.windows(n).map(|w| w.to_vec()).collect()
        }
    };
    let cand = grams(candidate);
    let count_in = |list: &[Vec<String>], gram: &[String]| -> u64 {
        list.iter().filter(|g| g.as_slice() == gram).count() as u64
    };
    let mut matched = 0u64;
    let mut total = 0u64;
    for reference in references {
        let ref_grams = grams(reference);
        total += ref_grams.len() as u64;
        let mut seen: Vec<&Vec<String>> = Vec::new();
        for gram in &ref_grams {
            if seen.contains(&gram) {
                continue;
            }
            seen.push(gram);
            let in_ref = count_in(&ref_grams, gram);
            let in_cand = count_in(&cand, gram);
            matched += in_ref.min(in_cand);
        }
    }
    if total == 0 {
        None
    } else {
        Some(matched as f64 / total as f64)
    }
}

/// Central finite differences of a scalar function of a matrix.
pub fn fd_grad<F>(f: F, x: &Array2<f64>, step: f64) -> Array2<f64>
where
    F: Fn(&Array2<f64>) -> f64,
{
    let mut grad = Array2::zeros(x.dim());
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            let h = step * x[[i, j]].abs().max(1.0);
            let mut plus = x.clone();
            plus[[i, j]] += h;
            let mut minus = x.clone();
            minus[[i, j]] -= h;
            grad[[i, j]] = (f(&plus) - f(&minus)) / (2.0 * h);
        }
    }
    grad
}

/// Relative Frobenius error between two matrices.
pub fn rel_err(got: &Array2<f64>, want: &Array2<f64>) -> f64 {
    let diff: f64 = got
        .iter()
        .zip(want.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let norm: f64 = want.iter().map(|v| v * v).sum::<f64>().sqrt();
    diff / norm.max(1e-12)
}

/// Infinity-norm distance between two vectors.
pub fn inf_diff(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
