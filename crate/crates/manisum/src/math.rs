//! Small shared numeric helpers used across the model modules.

use ndarray::{Array1, Array2, ArrayView1};

/// Cosine similarity of two vectors; 0.0 when either has zero norm.
pub fn cosine(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    let dot = a.dot(&b);
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Pairwise cosine similarity of the columns of `m` (n x n for an ? x n input).
pub fn column_cosines(m: &Array2<f64>) -> Array2<f64> {
    let n = m.ncols();
    let mut out = Array2::zeros((n, n));
    let norms: Vec<f64> = (0..n)
        .map(|j| m.column(j).dot(&m.column(j)).sqrt())
        .collect();
    for i in 0..n {
        for j in i..n {
            let c = if norms[i] == 0.0 || norms[j] == 0.0 {
                0.0
            } else {
                m.column(i).dot(&m.column(j)) / (norms[i] * norms[j])
            };
            out[[i, j]] = c;
            out[[j, i]] = c;
        }
    }
    out
}

/// Min-max map onto [0, 1]. A constant vector maps to all 0.5.
pub fn min_max_unit(values: &Array1<f64>) -> Array1<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max > min {
        values.mapv(|v| (v - min) / (max - min))
    } else {
        Array1::from_elem(values.len(), 0.5)
    }
}

/// Scale column j of `m` by `scale[j]`.
pub fn scale_columns(m: &Array2<f64>, scale: &Array1<f64>) -> Array2<f64> {
    let mut out = m.clone();
    for (j, mut col) in out.columns_mut().into_iter().enumerate() {
        col.mapv_inplace(|v| v * scale[j]);
    }
    out
}

/// Scale row i of `m` by `scale[i]`.
pub fn scale_rows(m: &Array2<f64>, scale: &Array1<f64>) -> Array2<f64> {
    let mut out = m.clone();
    for (i, mut row) in out.rows_mut().into_iter().enumerate() {
        row.mapv_inplace(|v| v * scale[i]);
    }
    out
}

/// Infinity norm of the difference of two vectors.
pub fn inf_norm_diff(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Sum of squares of all entries.
pub fn frob_sq(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}
